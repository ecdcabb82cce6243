#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <vector>

namespace halfwave {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// 64-byte aligned storage so every field buffer can be handed to FFTW directly.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), alignment));
  }
  void deallocate(T* ptr, std::size_t) noexcept { ::operator delete(ptr, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexVector = std::vector<Complex, AlignedAllocator<Complex>>;

struct GridSpec {
  int dim = 2;
  int n = 0;
  double length = 0.0;

  double spacing() const { return length / n; }
  double frequency_step() const { return kTwoPi / length; }
  double nyquist() const { return kPi * n / length; }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  // h^d, the quadrature weight of one sample.
  double cell_area() const { return spacing() * spacing(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Throws ConfigError unless n is a power of two >= 32 and length > 0.
GridSpec create_grid(int n, double length);

bool is_power_of_two(int n);

// FFT ordering: index i holds lattice coordinate i for i < n/2 and i - n otherwise.
inline int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }
inline int wrap_index(int m, int n) { return ((m % n) + n) % n; }

// Physical coordinate of sample i, centred so that the origin sits at index 0.
inline double coordinate(const GridSpec& spec, int i) {
  return signed_index(i, spec.n) * spec.spacing();
}

// Precomputed frequency data shared by every operation on one grid.
struct Lattice {
  std::vector<double> axis;    // xi component per index along one axis
  std::vector<double> radius;  // |xi| per flat index
  std::vector<double> angle;   // arg(xi) in [0, 2 pi), 0 at the origin
};

std::shared_ptr<const Lattice> lattice(const GridSpec& spec);

enum class Representation { physical, spectral };
enum class Direction { forward, inverse };

// Complex samples on a periodic grid. Values are immutable once constructed.
// Spectral coefficients use the unitary DFT, so sum |f|^2 is the same in
// both representations.
class Field {
 public:
  Field(GridSpec spec, Representation representation, ComplexVector values,
        std::optional<double> support_radius = std::nullopt);

  static Field zeros(const GridSpec& spec, Representation representation);
  static Field sample(const GridSpec& spec, const std::function<Complex(double, double)>& fn);
  // Builds spectral coefficients from fn(xi_x, xi_y).
  static Field from_spectrum(const GridSpec& spec,
                             const std::function<Complex(double, double)>& fn);

  const GridSpec& spec() const { return spec_; }
  Representation representation() const { return representation_; }
  std::span<const Complex> values() const { return values_; }
  const ComplexVector& storage() const { return values_; }

  // Radius of the ball (about the origin) that carries the field's mass, if known.
  std::optional<double> support_radius() const { return support_radius_; }
  Field with_support_radius(std::optional<double> radius) const;

 private:
  GridSpec spec_;
  Representation representation_;
  ComplexVector values_;
  std::optional<double> support_radius_;
};

Field transform(const Field& f, Direction direction);
Field to_physical(const Field& f);
Field to_spectral(const Field& f);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(Complex scale, const Field& f);

using Symbol = std::function<Complex(double, double)>;

// m(D)f. The symbol is evaluated at every lattice point including xi = 0, where
// the caller supplies the limit value. Output keeps the input representation.
Field apply_multiplier(const Field& f, const Symbol& symbol);
Field apply_real_table(const Field& f, std::span<const double> table);

// (h^2 sum |f|^p)^{1/p}; p = infinity gives max |f|.
double lebesgue_norm(const Field& f, double p);
std::vector<double> lebesgue_norms(const Field& f, std::span<const double> exponents);
// Same on raw physical samples.
std::vector<double> lebesgue_norms(std::span<const Complex> samples, double cell_area,
                                   std::span<const double> exponents);

// h^2 sum conj(a) b.
Complex inner_product(const Field& a, const Field& b);

// Smallest radius about the origin outside which at most tail_fraction of the L2 mass lies.
double mass_radius(const Field& f, double tail_fraction);
// L2 mass fraction of f outside the ball of the given radius.
double mass_outside(const Field& f, double radius);

// Throws ValidationError if the field has a support radius R and L < 2(|t| + R).
void validate_wraparound(const Field& f, double t);

}  // namespace halfwave

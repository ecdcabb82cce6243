#include "halfwave/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include "halfwave/errors.hpp"
#include "halfwave/report.hpp"

namespace halfwave {
namespace {

static_assert(std::endian::native == std::endian::little, "field container assumes little-endian");

constexpr std::array<char, 4> kMagic = {'H', 'W', 'F', '1'};
constexpr int kMaxCsvGrid = 256;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw UsageError("truncated field container");
  return value;
}

}  // namespace

void write_field_binary(std::ostream& out, const Field& f) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.spec().dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.spec().n));
  put<double>(out, f.spec().length);
  put<std::uint32_t>(out, f.representation() == Representation::physical ? 0u : 1u);
  for (const Complex& z : f.values()) {
    put<float>(out, static_cast<float>(z.real()));
    put<float>(out, static_cast<float>(z.imag()));
  }
}

Field read_field_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw UsageError("not a field container");
  const auto dim = get<std::uint32_t>(in);
  const auto n = get<std::uint32_t>(in);
  const auto length = get<double>(in);
  const auto rep = get<std::uint32_t>(in);
  if (dim != 2) throw UsageError("only d = 2 fields are supported");
  if (rep > 1) throw UsageError("unknown representation tag");
  const GridSpec spec = create_grid(static_cast<int>(n), length);
  ComplexVector values(spec.size());
  for (auto& z : values) {
    const float re = get<float>(in);
    const float im = get<float>(in);
    z = Complex(re, im);
  }
  return Field(spec, rep == 0 ? Representation::physical : Representation::spectral,
               std::move(values));
}

void save_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_field_binary(out, f);
}

Field load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_field_binary(in);
}

void write_field_csv(std::ostream& out, const Field& f) {
  const GridSpec& spec = f.spec();
  if (spec.n > kMaxCsvGrid) {
    throw ConfigError("CSV export is limited to N <= " + std::to_string(kMaxCsvGrid));
  }
  const bool physical = f.representation() == Representation::physical;
  out << (physical ? "ix,iy,x,y,re,im\n" : "ix,iy,xi_x,xi_y,re,im\n");
  for (int iy = 0; iy < spec.n; ++iy) {
    for (int ix = 0; ix < spec.n; ++ix) {
      const double a = physical ? coordinate(spec, ix) : spec.frequency_step() * signed_index(ix, spec.n);
      const double b = physical ? coordinate(spec, iy) : spec.frequency_step() * signed_index(iy, spec.n);
      const Complex z = f.values()[static_cast<std::size_t>(iy) * spec.n + ix];
      out << ix << ',' << iy << ',' << format_double(a) << ',' << format_double(b) << ','
          << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
    }
  }
}

}  // namespace halfwave

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace halfwave::detail {
namespace {

struct RowPlans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW's planner is not thread-safe; execution is.
std::mutex planner_mutex;

const RowPlans& row_plans(int n) {
  static std::map<int, RowPlans> cache;
  std::lock_guard lock(planner_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  ComplexVector scratch(static_cast<std::size_t>(n) * n);
  auto* buffer = reinterpret_cast<fftw_complex*>(scratch.data());
  int length[1] = {n};
  RowPlans plans;
  // ESTIMATE keeps the plan (and hence rounding) identical from run to run.
  plans.forward = fftw_plan_many_dft(1, length, n, buffer, nullptr, 1, n, buffer, nullptr, 1, n,
                                     FFTW_FORWARD, FFTW_ESTIMATE);
  plans.inverse = fftw_plan_many_dft(1, length, n, buffer, nullptr, 1, n, buffer, nullptr, 1, n,
                                     FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, plans).first->second;
}

void transpose(Complex* a, int n) {
  constexpr int block = 32;
  for (int ib = 0; ib < n; ib += block) {
    const int iend = std::min(ib + block, n);
    for (int jb = ib; jb < n; jb += block) {
      const int jend = std::min(jb + block, n);
      for (int i = ib; i < iend; ++i) {
        for (int j = (ib == jb ? i + 1 : jb); j < jend; ++j) {
          std::swap(a[static_cast<std::size_t>(i) * n + j], a[static_cast<std::size_t>(j) * n + i]);
        }
      }
    }
  }
}

void run(fftw_plan plan, Complex* data, int n) {
  auto* buffer = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buffer, buffer);
  transpose(data, n);
  fftw_execute_dft(plan, buffer, buffer);
  transpose(data, n);
  const double scale = 1.0 / n;
  const std::size_t total = static_cast<std::size_t>(n) * n;
  for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

}  // namespace

void fft_forward(Complex* data, int n) { run(row_plans(n).forward, data, n); }

void fft_inverse(Complex* data, int n) { run(row_plans(n).inverse, data, n); }

}  // namespace halfwave::detail

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "halfwave/spectral_grid.hpp"

namespace halfwave {

// ChaCha20 (IETF) keystream as a counter-based generator. The key is the seed,
// the nonce is the stream id, so sample i of an ensemble is reproducible on its
// own without generating samples 0..i-1.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // 53-bit uniform in [0, 1).
  double uniform();
  // Box-Muller standard normal.
  double normal();
  // (N1 + i N2)/sqrt(2): unit variance complex Gaussian.
  Complex complex_normal();

  static std::string identity();

 private:
  void refill();

  std::array<unsigned char, 32> key_{};
  std::array<unsigned char, 12> nonce_{};
  std::array<unsigned char, 64> block_{};
  std::uint32_t counter_ = 0;
  int used_ = 64;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace halfwave

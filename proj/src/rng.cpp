#include "halfwave/rng.hpp"

#include <sodium.h>

#include <cmath>
#include <cstring>

#include "halfwave/errors.hpp"

namespace halfwave {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
  static const int init = sodium_init();
  if (init < 0) throw NumericError("libsodium failed to initialize");
  for (int i = 0; i < 8; ++i) {
    key_[i] = static_cast<unsigned char>(seed >> (8 * i));
    nonce_[i] = static_cast<unsigned char>(stream >> (8 * i));
  }
}

std::string CounterRng::identity() {
  return "chacha20-ietf (libsodium); key = seed (8 bytes LE, zero padded), nonce = sample index";
}

void CounterRng::refill() {
  block_.fill(0);
  crypto_stream_chacha20_ietf_xor_ic(block_.data(), block_.data(), block_.size(), nonce_.data(), counter_,
                                     key_.data());
  ++counter_;
  used_ = 0;
}

std::uint64_t CounterRng::next_u64() {
  if (used_ + 8 > 64) refill();
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | block_[used_ + i];
  used_ += 8;
  return value;
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Complex CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::sqrt(0.5);
}

}  // namespace halfwave

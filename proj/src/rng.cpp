#include "eqtime/rng.hpp"

#include <cmath>

namespace eqtime {

double Rng::uniform() {
  return static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (cached_) {
    double v = *cached_;
    cached_.reset();
    return v;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::complex<double> Rng::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

std::uint64_t Rng::derive(std::uint64_t master, std::uint64_t index) {
  Rng child(master ^ ((index + 1) * 0xD1B54A32D192ED03ULL));
  return child.next_bits();
}

}  // namespace eqtime

#include "spikedet/rng.hpp"

#include <cmath>
#include <numbers>

namespace spikedet {

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  // 53 random mantissa bits, shifted by half an ulp so 0 and 1 never occur.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spikedet

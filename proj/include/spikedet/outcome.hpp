#pragma once

#include <string_view>

namespace spikedet {

/// A statistic value, or the reason none exists.
///
/// `signal_certain`: an eigenvalue lies at or beyond sqrt(w) + 1/sqrt(w), so
/// the log-det factor is non-positive and the spike is present with high
/// probability. `reliably_detectable`: the transformed SNR w*F >= 1, the PCA
/// regime. `out_of_domain`: a test function was evaluated outside its domain.
class Evaluated {
 public:
  enum class Kind { finite, signal_certain, reliably_detectable, out_of_domain };

  static constexpr Evaluated of(double v) { return Evaluated(Kind::finite, v); }
  static constexpr Evaluated signal_certain() { return Evaluated(Kind::signal_certain, 0.0); }
  static constexpr Evaluated reliably_detectable() {
    return Evaluated(Kind::reliably_detectable, 0.0);
  }
  static constexpr Evaluated out_of_domain() { return Evaluated(Kind::out_of_domain, 0.0); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  /// Throws std::logic_error unless is_finite().
  double value() const;

 private:
  constexpr Evaluated(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

std::string_view to_string(Evaluated::Kind kind);

}  // namespace spikedet

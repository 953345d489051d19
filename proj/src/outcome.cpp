#include "spikedet/outcome.hpp"

#include <stdexcept>
#include <string>

namespace spikedet {

double Evaluated::value() const {
  if (kind_ != Kind::finite) {
    throw std::logic_error("no finite value: " + std::string(to_string(kind_)));
  }
  return value_;
}

std::string_view to_string(Evaluated::Kind kind) {
  switch (kind) {
    case Evaluated::Kind::finite: return "finite";
    case Evaluated::Kind::signal_certain: return "signal_certain";
    case Evaluated::Kind::reliably_detectable: return "reliably_detectable";
    case Evaluated::Kind::out_of_domain: return "out_of_domain";
  }
  return "unknown";
}

}  // namespace spikedet

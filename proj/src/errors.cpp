#include "frapm/errors.hpp"

namespace frapm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroMassMeasure: return "ZeroMassMeasure";
    case ErrorKind::InvalidParticle: return "InvalidParticle";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::SublinearityViolated: return "SublinearityViolated";
    case ErrorKind::EmptyLocationSet: return "EmptyLocationSet";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NonFiniteLocation: return "NonFiniteLocation";
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::NonIntegralStepCount: return "NonIntegralStepCount";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

Error Error::at_step(const Error& inner, int step) {
  Error e(inner.kind_, "step " + std::to_string(step) + ": " +
                           std::string(inner.what()).substr(to_string(inner.kind_).size() + 2));
  e.step_ = step;
  return e;
}

}  // namespace frapm

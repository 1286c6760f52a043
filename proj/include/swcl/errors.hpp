#pragma once
#include <stdexcept>
#include <string>

namespace swcl {

enum class ErrorKind {
  parameter,
  domain,
  configuration,
  detection_instability,
  impossibility,
  inconsistency,
  compatibility,
  classification_gap,
  numeric,
  internal,
  precondition,
  state,
  verification,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::detection_instability: return "detection instability";
    case ErrorKind::impossibility: return "impossibility violation";
    case ErrorKind::inconsistency: return "inconsistency error";
    case ErrorKind::compatibility: return "compatibility error";
    case ErrorKind::classification_gap: return "classification gap";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::internal: return "internal consistency error";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::state: return "state error";
    case ErrorKind::verification: return "verification failure";
  }
  return "error";
}

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& what)
      : std::runtime_error(std::string(kind_name(k)) + ": " + what), kind(k) {}
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) { throw Error(k, what); }

}  // namespace swcl

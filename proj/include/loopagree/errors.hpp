#pragma once

#include <stdexcept>
#include <string>

namespace loopagree {

// One exception type for the whole library; the code tells callers (and the
// CLI) which named failure condition fired.
enum class Errc {
  empty_input,
  duplicate_vertex,
  empty_complex,
  not_subcomplex,
  partial_assignment,
  not_simplicial,
  endpoint_mismatch,
  invalid_path,
  not_a_composition,
  source_mismatch,
  subdivision_mismatch,
  not_connected,
  unknown_basepoint,
  invalid_loop,
  unknown_task,
  target_source_mismatch,
  parse_error,
  invalid_task,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::empty_input: return "EmptyInput";
    case Errc::duplicate_vertex: return "DuplicateVertex";
    case Errc::empty_complex: return "EmptyComplex";
    case Errc::not_subcomplex: return "NotSubcomplex";
    case Errc::partial_assignment: return "PartialAssignment";
    case Errc::not_simplicial: return "NotSimplicial";
    case Errc::endpoint_mismatch: return "EndpointMismatch";
    case Errc::invalid_path: return "InvalidPath";
    case Errc::not_a_composition: return "NotAComposition";
    case Errc::source_mismatch: return "SourceMismatch";
    case Errc::subdivision_mismatch: return "SubdivisionMismatch";
    case Errc::not_connected: return "NotConnected";
    case Errc::unknown_basepoint: return "UnknownBasepoint";
    case Errc::invalid_loop: return "InvalidLoop";
    case Errc::unknown_task: return "UnknownTask";
    case Errc::target_source_mismatch: return "TargetSourceMismatch";
    case Errc::parse_error: return "ParseError";
    case Errc::invalid_task: return "InvalidTask";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace loopagree

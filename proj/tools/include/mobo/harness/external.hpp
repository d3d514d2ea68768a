#pragma once

#include "mobo/driver.hpp"

#include <string>

namespace mobo::harness {

/// Outcome of one call to an external black-box evaluator.
struct ExternalOutcome {
  enum class Status { Feasible, Infeasible, NonzeroExit, Timeout, Malformed, LaunchFailure };

  Status status = Status::LaunchFailure;
  EvaluationResult result;  ///< objectives only for Status::Feasible
  std::string raw_output;   ///< first line of the child's standard output
  int exit_code = -1;
};

std::string_view to_string(ExternalOutcome::Status status);

/// Runs `command` through /bin/sh, writes {"x":[...]} plus a newline to its
/// standard input and reads one JSON line from its standard output:
/// {"objectives":[...],"feasible":true} or {"feasible":false}. A nonzero exit,
/// a timeout (the child's process group is killed) or malformed output all
/// yield an infeasible result.
ExternalOutcome external_evaluate(const std::string& command, const Vector& x, double timeout_seconds = 3600.0);

}  // namespace mobo::harness

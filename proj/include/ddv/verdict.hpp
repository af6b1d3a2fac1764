#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddv/numerics.hpp"

namespace ddv {

enum class Status { Dissipative, NotDissipative, Inconclusive, Unknown };

const char* to_string(Status s);

// Sign requirement placed on the storage matrix P. StrictPd also makes the
// dissipation inequality itself strict, which is the strict-dissipativity
// reading of the definition.
enum class StorageMode { Psd, StrictPd, Free };

struct Certificate {
  Matrix P;
  // S-procedure multiplier; NaN for noise-free verdicts.
  double tau = std::numeric_limits<double>::quiet_NaN();
  // gamma-hat or rho-hat when produced by an optimizer; NaN otherwise.
  double performance = std::numeric_limits<double>::quiet_NaN();
};

struct Verdict {
  Status status = Status::Unknown;
  std::optional<Certificate> certificate;  // present iff status == Dissipative
  std::vector<double> margins;             // lambda_min per LMI block at the witness
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  int achieved_rank = -1;  // data-rank diagnostics for inconclusive verdicts
  int required_rank = -1;
  std::string notes;
};

// Process exit code used by the CLI: 0 dissipative, 1 not dissipative,
// 2 inconclusive or unknown. Pure function of the status.
int exit_code(Status s);

}  // namespace ddv

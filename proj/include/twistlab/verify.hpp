#pragma once

#include <string>
#include <vector>

#include "twistlab/lmfdb.hpp"

namespace twistlab {

// The one-shot verification suite behind `twistlab verify-paper` and the
// acceptance binary.  Each check is self-contained: it fetches the fixture
// curves it needs, recomputes everything, and reports one verdict line.

inline constexpr int kNumChecks = 10;

struct VerifyOptions {
  std::string fixtures_dir;  // forwarded to fetch_curve; empty = default search
  unsigned workers = 1;      // census fan-out inside the heavy checks
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured numbers, or the first mismatch / error
  double seconds = 0;
};

// id in [1, kNumChecks].  Never throws: setup failures (missing or corrupt
// fixtures, hypothesis violations) come back as a failed result whose detail
// carries the error message.
CheckResult run_check(int id, const VerifyOptions& opts = {});

std::vector<CheckResult> run_all_checks(const VerifyOptions& opts = {});

// "ok  3 m-density ..." / "FAIL 3 m-density ...": one fixed-width verdict line.
std::string check_summary_line(const CheckResult& r);

}  // namespace twistlab

#pragma once

#include <iosfwd>

namespace seqscreen {

/// Entry point of the `seqscreen` command line tool. Reports go to the
/// --out path when given, otherwise to `out`; diagnostics go to `err`.
///
/// Exit codes: 0 success (check: ES-regular; verify: consistent, not
/// applicable or hypothesis not satisfied), 1 check found a failing
/// assumption or verify flagged a discrepancy, 2 invalid input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqscreen

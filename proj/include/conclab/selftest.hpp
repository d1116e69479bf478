#pragma once

#include <iosfwd>

namespace conclab {

/// Compact invariant suite behind the `selftest` CLI subcommand: one line
/// per check, returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace conclab

#pragma once

#include <iosfwd>

namespace pmsfem::harness {

/// Command-line entry point.
///
///   pmsfem <mesh|solve-fine|solve-gmsfem|sweep|compare> [options]
///
/// Exit codes: 0 success, 1 invalid input (usage and a JSON error on `err`),
/// 2 solver failure (JSON error on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pmsfem::harness

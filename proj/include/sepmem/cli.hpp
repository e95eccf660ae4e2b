#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sepmem {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numerical = 3 };

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics and usage text to `err`.
///
///   reconstruct <in> -o <mesh> [--config <file>] [--trace <csv>] [--deterministic]
///   sepmap <in> -o <csv> --direction x,y,z --window d,h,w [--cells n]
///   synth sphere|plane [-n count] [--seed s] [--corrupt kind:params] -o <file>
///   eval --pred <mesh|cloud> --gt <mesh|cloud> [--tau-pct 1.0]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sepmem

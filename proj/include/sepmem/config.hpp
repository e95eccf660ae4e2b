#pragma once

#include "sepmem/membrane.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace sepmem {

/// Everything a reconstruction run needs besides the cloud itself.
struct RunConfig {
  MembraneConfig membrane;
  std::string input;
  std::string output;
  std::string trace;
  std::uint64_t seed = 0;
};

/// Parses flat `key = value` lines. '#' starts a comment; blank lines are ignored.
///
/// Keys are the MembraneConfig field names plus input, output, trace and seed.
/// Vector values are comma separated, e.g. `search_extents = 0.3,0.1,0.1`.
/// Unknown keys, repeated keys and malformed values throw InvalidArgument
/// carrying the line number; the result is validated before returning.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Inverse of parse_run_config, every key written.
void write_run_config(const RunConfig& config, std::ostream& out);

}  // namespace sepmem

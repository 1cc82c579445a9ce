// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmdf {

/// Environment variable naming the directory relative --out paths resolve against.
inline constexpr const char* kOutDirEnv = "BMDF_OUT_DIR";

/// Runs one CLI invocation. `args` excludes the program name. CSV goes to
/// `out` (or the --out file), diagnostics to `err`.
/// Returns 0 on success, 1 on a domain or validation error, 2 on a usage error.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmdf

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synchrosde {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConstruction = 3;

/// Command-line entry point; `args` excludes the program name.
///   validate | constants | transform | simulate | verify
/// Exit codes: 0 ok, 1 usage or configuration error, 2 hypothesis
/// validation failure, 3 numerical-construction failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace synchrosde

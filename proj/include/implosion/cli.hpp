#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace implosion::cli {

// Exit codes: 0 pass, 1 usage or configuration error, 2 numerical or verdict failure.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace implosion::cli

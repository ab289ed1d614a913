#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elc {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int domain = 1;
inline constexpr int blowup = 2;
inline constexpr int io = 3;
}  // namespace exit_code

/// Entry point of the `elc` binary. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace elc

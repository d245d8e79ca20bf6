#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdesign::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kRefused = 2;

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdesign::cli

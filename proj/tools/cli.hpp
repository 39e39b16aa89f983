#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kitwpa::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kComputeError = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kitwpa::cli

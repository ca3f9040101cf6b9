#pragma once

#include <string>
#include <vector>

namespace resplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point shared by the resplab binary and the in-process tests.
// args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace resplab::cli

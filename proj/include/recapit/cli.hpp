#pragma once

#include <iosfwd>

namespace recapit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recapit

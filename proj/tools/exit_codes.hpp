/**
 * @file exit_codes.hpp
 * @brief Process exit codes of the command-line driver.
 */
#ifndef DAEO_TOOLS_EXIT_CODES_HPP
#define DAEO_TOOLS_EXIT_CODES_HPP

#include <exception>

#include "daeo/errors.hpp"

namespace daeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitEvent = 4;

inline int exit_code(const std::exception &e) {
  if (dynamic_cast<const UsageError *>(&e) != nullptr) {
    return kExitUsage;
  }
  if (dynamic_cast<const EventInconsistency *>(&e) != nullptr) {
    return kExitEvent;
  }
  return kExitSolver;
}

} // namespace daeo::cli

#endif

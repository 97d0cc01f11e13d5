#pragma once

namespace frapm {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvariant = 2;

/// Entry point of the `frapm` binary. Returns the process exit code: 0 on
/// success, 64 on usage errors, 1 on runtime errors, 2 when a run breaks an
/// invariant (negative mass in strict mode, particles leaving [0, inf), model
/// violations).
int parse_and_dispatch(int argc, char** argv);

}  // namespace frapm

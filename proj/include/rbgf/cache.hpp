#pragma once

#include <optional>
#include <string>

#include "rbgf/collision.hpp"

namespace rbgf {

/// Kernel cache: flat little-endian float64 payload (row-major K then nu)
/// plus a JSON sidecar {mode, resolution, V_max, checksum, format_version}.
/// Writes are atomic (temp file + rename); a checksum mismatch on load is
/// treated as a miss so the caller reassembles.
void save_kernel_table(const std::string& dir, const KernelTable& t);
std::optional<KernelTable> load_kernel_table(const std::string& dir, int m, int n1, int n2,
                                             double V_max, int format_version = 1);

/// Assemble with the cache in front; writes back on a miss.
LinearizedOperator cached_assemble(const std::string& dir, const GridPtr& grid, int m,
                                   const CollisionInvariants& inv,
                                   const AssemblyOptions& opt = {});

}  // namespace rbgf

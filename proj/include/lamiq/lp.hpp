#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lamiq/exactnum.hpp"

namespace lamiq {

/// Bounded polytope {x : normals[k]·x ≤ rhs[k]}.
struct HalfspaceSystem {
  std::vector<QVector> normals;
  QVector rhs;

  std::size_t dim() const { return normals.empty() ? 0 : normals.front().size(); }
  std::size_t size() const { return normals.size(); }
};

struct LPResult {
  QVector x;
  /// n linearly independent tight constraints defining x.
  std::vector<std::uint32_t> basis;
  /// Every constraint tight at x, ascending.
  std::vector<std::uint32_t> active;
  std::size_t pivots = 0;
};

/// Exact simplex for max c·x over a bounded polytope containing the origin in its interior.
/// Pivots use the steepest reduced cost until a run of degenerate steps, then Bland's rule
/// for the remainder (which guarantees termination). Unbounded directions throw InvalidInput.
LPResult maximize(const HalfspaceSystem& system, const QVector& c);

}  // namespace lamiq

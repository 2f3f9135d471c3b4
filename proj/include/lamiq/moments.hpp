#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lamiq/approx.hpp"
#include "lamiq/exactnum.hpp"
#include "lamiq/voronoi.hpp"

namespace lamiq {

/// Geometry of one face-orbit representative. The tensor is u_coeff·√radicand and the
/// volume coeff·√radicand share one radicand.
struct MomentRecord {
  std::size_t dim = 0;
  RadQ volume;
  QVector centroid;
  QVector offset;  // barycenter − centroid
  QMatrix u_coeff;
  std::vector<QVector> span;
  Rational gram = 1;
  std::vector<RadQ> child_heights;  // centroid heights, one per child link

  QVector barycenter() const { return add(centroid, offset); }
  const Integer& radicand() const { return volume.radicand(); }
  /// Trace of the second-moment tensor.
  RadQ u_trace() const;
};

using MomentTable = std::vector<std::vector<MomentRecord>>;  // [dim][orbit]

/// Distance from apex to the affine span of (base + span) as √(𝒢_d/𝒢_{d−1}).
RadQ height_gram(const std::vector<QVector>& span, const Rational& span_gram, const QVector& base, const QVector& apex);

/// Bottom-up volume, barycenter and second-moment recursion over every orbit representative.
MomentTable face_moments(const FaceLattice& lattice, const VertexSet& vertices, unsigned workers = 1);

/// Groups orbits into face classes by (dim, vertex count, child classes, V²); orbits of one
/// class must agree on the second-moment trace.
void classify_faces(FaceLattice& lattice, const MomentTable& moments);

struct CellSummary {
  std::size_t n = 0;
  Rational volume;
  Rational u;  // trace
  QMatrix tensor;
  Rational alpha;
  Rational beta;
  std::optional<Rational> g_exact;
  ApproxReal g{Rational(0)};
};

CellSummary cell_summary(const MomentTable& moments, std::size_t n);

/// G = U / (n·V^{1+2/n}), exact when V^{1/n} is rational.
std::optional<Rational> exact_g(const Rational& u, const Rational& v, std::size_t n);
ApproxReal approx_g(const Rational& u, const Rational& v, std::size_t n);

struct OracleMoments {
  Rational volume;
  QMatrix tensor;  // ∫ x xᵀ over the cell
};

/// Independent check: triangulates the cell through face centroids along every flag and sums
/// simplex volumes and second moments. Brute force; intended for dimension ≤ 5.
OracleMoments simplex_moment_oracle(const VoronoiCell& cell, const VertexSet& vertices);

/// Volume and ∫ x xᵀ of a simplex with the given vertices.
OracleMoments simplex_moments(const std::vector<QVector>& vertices);

struct MonteCarloResult {
  double estimate = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
};

/// Uniform points in the fundamental parallelepiped, nearest-point error via a floating decoder.
MonteCarloResult monte_carlo_g(const GeneratorMatrix& b, std::size_t samples, std::uint64_t seed, unsigned workers = 1);

}  // namespace lamiq

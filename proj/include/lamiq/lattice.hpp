#pragma once

#include <cstddef>
#include <vector>

#include "lamiq/exactnum.hpp"

namespace lamiq {

/// Square rational basis; rows are basis vectors and lattice points are integer
/// row-combinations z·B.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(QMatrix rows);

  std::size_t dim() const noexcept { return rows_.rows(); }
  const QMatrix& rows() const noexcept { return rows_; }
  QVector row(std::size_t i) const { return rows_.row(i); }
  const Rational& determinant() const noexcept { return det_; }
  const QMatrix& inverse() const noexcept { return inverse_; }

  QVector point(const IntVector& z) const;
  /// Integer coordinates of p, or an empty vector when p is not a lattice point.
  IntVector coordinates(const QVector& p) const;
  GeneratorMatrix scaled(const Rational& s) const;

 private:
  QMatrix rows_;
  QMatrix inverse_;
  Rational det_;
};

/// Stacking template [[B_{n-1}, 0], [r, a]] with the height a left free.
struct LaminatedFamily {
  GeneratorMatrix base;
  QVector offset;

  std::size_t dim() const { return base.dim() + 1; }
  GeneratorMatrix at(const Rational& a) const;
};

GeneratorMatrix laminate(const GeneratorMatrix& base, const QVector& offset, const Rational& a);
GeneratorMatrix d8_generator();
GeneratorMatrix ae9(const Rational& a);
LaminatedFamily ae9_family();
GeneratorMatrix cubic_generator(std::size_t n);

struct LatticePoint {
  IntVector coords;
  QVector point;
  /// Squared distance to the query point.
  Rational distance2;
};

/// Fincke-Pohst enumerator bound to one basis. Floating point only steers the search;
/// every accepted point is checked with an exact squared distance.
class LatticeEnumerator {
 public:
  explicit LatticeEnumerator(const GeneratorMatrix& basis);

  const GeneratorMatrix& basis() const noexcept { return basis_; }

  /// All lattice points with |x - p|² ≤ radius2, ordered lexicographically on coordinates.
  std::vector<LatticePoint> within(const QVector& x, const Rational& radius2) const;
  /// Every lattice point minimizing |x - p|²; ties are all returned, lexicographic order.
  std::vector<LatticePoint> closest(const QVector& x) const;
  /// Babai nearest-plane point (a quick upper bound for the search radius).
  IntVector babai(const QVector& x) const;

 private:
  GeneratorMatrix basis_;
  std::size_t n_;
  std::vector<QVector> gs_;          // Gram-Schmidt vectors b*_i
  std::vector<Rational> gs_norm2_;   // |b*_i|²
  std::vector<double> gs_norm2_d_;
  std::vector<double> mu_d_;         // mu[i*n + j], j < i
};

std::vector<LatticePoint> closest_points(const GeneratorMatrix& b, const QVector& x);

struct RelevantVector {
  IntVector coords;
  QVector vector;
  Rational norm2;
};

struct RelevantVectorSet {
  std::vector<RelevantVector> vectors;  // sorted by lattice coordinates, closed under negation

  std::size_t size() const { return vectors.size(); }
  std::vector<QVector> points() const;
};

/// Voronoi-relevant vectors via the 2Λ-coset criterion: a coset of 2Λ in Λ contributes
/// its minimal pair ±m iff it has exactly two minimal-norm members.
RelevantVectorSet relevant_vectors(const GeneratorMatrix& b, unsigned workers = 1);

/// All nonzero lattice vectors with |p|² ≤ bound, sorted by norm then coordinates.
std::vector<LatticePoint> short_vectors(const GeneratorMatrix& b, const Rational& bound);

}  // namespace lamiq

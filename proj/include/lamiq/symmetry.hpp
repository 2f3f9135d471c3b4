#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lamiq/exactnum.hpp"
#include "lamiq/lattice.hpp"

namespace lamiq {

/// Signed coordinate permutation: y[i] = sign[i] · x[perm[i]].
class Isometry {
 public:
  Isometry() = default;
  Isometry(std::vector<std::uint32_t> perm, std::vector<std::int8_t> sign);
  static Isometry identity(std::size_t n);
  /// From a signed-permutation word: entry i is ±(k+1) meaning y[i] = ±x[k].
  static Isometry from_word(const std::vector<int>& word);

  std::size_t dim() const noexcept { return perm_.size(); }
  const std::vector<std::uint32_t>& perm() const noexcept { return perm_; }
  const std::vector<std::int8_t>& sign() const noexcept { return sign_; }
  std::vector<int> word() const;

  QVector apply(const QVector& x) const;
  void apply_into(const QVector& x, QVector& out) const;
  /// (*this ∘ inner)(x) = this(inner(x)).
  Isometry compose(const Isometry& inner) const;
  Isometry inverse() const;
  /// Orthogonal matrix M with y = M·x.
  QMatrix matrix() const;
  /// M·T·Mᵀ for a symmetric tensor T.
  QMatrix conjugate(const QMatrix& t) const;
  bool is_identity() const;
  bool preserves_lattice(const GeneratorMatrix& b) const;

  friend bool operator==(const Isometry&, const Isometry&) = default;

 private:
  std::vector<std::uint32_t> perm_;
  std::vector<std::int8_t> sign_;
};

struct GroupSpec {
  std::string name;
  std::size_t dim = 0;
  std::vector<Isometry> generators;
  /// Claimed order; 0 when unknown.
  std::uint64_t claimed_order = 0;
};

inline constexpr std::size_t kDefaultOrbitCap = 10'000'000;

/// R (negate x₉), adjacent transpositions of x₁…x₈, and the sign flip of x₁, x₂.
GroupSpec ae9_group();
/// {±I}.
GroupSpec central_group(std::size_t n);
/// Independent sign changes of every coordinate.
GroupSpec sign_group(std::size_t n);
/// All signed permutations (symmetries of Zⁿ).
GroupSpec hyperoctahedral_group(std::size_t n);

/// Throws InvalidInput unless every generator has the right dimension and maps b's lattice to itself.
void validate_group(const GroupSpec& g, const GeneratorMatrix& b);

/// Breadth-first orbit closure; seed first, then discovery order.
std::vector<QVector> orbit(const QVector& seed, const GroupSpec& g, std::size_t cap = kDefaultOrbitCap);
/// Lexicographically least orbit element.
QVector canonical_form(const QVector& v, const GroupSpec& g, std::size_t cap = kDefaultOrbitCap);

/// Permutations of an indexed point list induced by each generator.
struct IndexAction {
  std::vector<std::vector<std::uint32_t>> generators;

  std::size_t size() const { return generators.empty() ? 0 : generators.front().size(); }
  std::vector<std::uint32_t> image(const std::vector<std::uint32_t>& set, std::size_t gen) const;
};

/// Builds the index action on `points`; ConsistencyError when a generator maps a point outside the list.
IndexAction induced_action(const GroupSpec& g, const std::vector<QVector>& points);

/// Orbit of a sorted index set; sets returned sorted, seed first.
std::vector<std::vector<std::uint32_t>> orbit(const std::vector<std::uint32_t>& seed, const IndexAction& action,
                                              std::size_t cap = kDefaultOrbitCap);
std::vector<std::uint32_t> canonical_form(const std::vector<std::uint32_t>& seed, const IndexAction& action,
                                          std::size_t cap = kDefaultOrbitCap);

/// Partition of [0, size) into orbits under the action, each orbit sorted, orbits ordered by least member.
std::vector<std::vector<std::uint32_t>> point_orbits(const IndexAction& action);

/// Closed-form orbit size of a 9-vector under the AE₉ group.
Integer orbit_size_formula(const QVector& v);

/// Group order by enumerating group elements in packed form.
std::uint64_t group_order(const GroupSpec& g, std::size_t cap = kDefaultOrbitCap);

}  // namespace lamiq

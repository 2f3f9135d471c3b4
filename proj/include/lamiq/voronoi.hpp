#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lamiq/exactnum.hpp"
#include "lamiq/lattice.hpp"
#include "lamiq/lp.hpp"
#include "lamiq/symmetry.hpp"

namespace lamiq {

/// Halfspace x·m ≤ m·m/2 of one relevant vector.
struct FacetSpec {
  IntVector coords;
  QVector normal;
  Rational rhs;
};

/// A lattice with its Voronoi facets and a symmetry group acting on facet indices.
struct VoronoiCell {
  GeneratorMatrix basis;
  GroupSpec group;
  std::vector<FacetSpec> facets;
  IndexAction facet_action;
  std::size_t words = 0;  // 64-bit words per facet bitset

  std::size_t dim() const { return basis.dim(); }
  HalfspaceSystem halfspaces() const;
};

VoronoiCell make_cell(const GeneratorMatrix& basis, const GroupSpec& group, unsigned workers = 1);

/// Open-addressed set of fixed-width bitsets stored in one arena; indices are insertion order.
class BitsetTable {
 public:
  explicit BitsetTable(std::size_t words = 1);

  std::size_t words() const noexcept { return words_; }
  std::size_t size() const noexcept { return count_; }
  std::span<const std::uint64_t> at(std::size_t i) const { return {data_.data() + i * words_, words_}; }
  /// Index of the stored copy and whether it was new.
  std::pair<std::uint32_t, bool> insert(std::span<const std::uint64_t> bits);
  std::int64_t find(std::span<const std::uint64_t> bits) const;
  void clear();

 private:
  std::size_t hash(std::span<const std::uint64_t> bits) const;
  void grow();
  std::size_t words_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> data_;
  std::vector<std::uint32_t> slots_;
};

using FacetBits = std::vector<std::uint64_t>;

FacetBits facet_bits(const std::vector<std::uint32_t>& indices, std::size_t words);
std::vector<std::uint32_t> bit_indices(std::span<const std::uint64_t> bits);
std::size_t popcount(std::span<const std::uint64_t> bits);
/// Image of a facet bitset under one generator's facet permutation.
void permute_bits(std::span<const std::uint64_t> bits, const std::vector<std::uint32_t>& perm,
                  std::span<std::uint64_t> out);

/// Facet orbits, largest first, ties by least member.
std::vector<std::vector<std::uint32_t>> facet_classes(const VoronoiCell& cell);
/// How many facets of each class appear in a sorted facet list.
std::vector<std::size_t> incidence_counts(const std::vector<std::vector<std::uint32_t>>& classes,
                                          const std::vector<std::uint32_t>& facets);

struct VertexRecord {
  QVector coords;
  std::vector<std::uint32_t> active;
};

enum class VertexSolveStatus { vertex, underdetermined, not_a_vertex };

struct VertexSolution {
  VertexSolveStatus status = VertexSolveStatus::not_a_vertex;
  QVector coords;
  std::vector<std::uint32_t> active;  // all tight facets when status == vertex
};

/// Solves x·m = m·m/2 over the given facets and checks every other facet inequality.
VertexSolution solve_vertex(const VoronoiCell& cell, const std::vector<std::uint32_t>& facets);

struct VertexOrbitInfo {
  std::uint32_t rep = 0;
  std::uint32_t first = 0;  // vertices of an orbit are contiguous
  std::uint32_t size = 0;
  /// n independent facets whose planes meet at the representative.
  std::vector<std::uint32_t> basis;
};

struct VertexEnumerationOptions {
  std::uint64_t seed = 1;
  std::size_t saturation = 200;
  std::size_t max_draws = 1'000'000;
  std::size_t orbit_cap = kDefaultOrbitCap;
};

struct VertexEnumerationStats {
  std::size_t draws = 0;
  std::size_t orbits_from_draws = 0;
  std::size_t orbits_from_edges = 0;
  std::size_t pivots = 0;
};

/// All cell vertices, orbit by orbit. Within an orbit, vertex i ≠ rep equals
/// generator gen[i] applied to vertex parent[i].
struct VertexSet {
  std::size_t n = 0;
  BitsetTable bits;
  std::vector<QVector> coords;
  std::vector<std::uint32_t> orbit_of;
  std::vector<std::uint32_t> parent;
  std::vector<std::uint8_t> gen;
  std::vector<VertexOrbitInfo> orbits;
  VertexEnumerationStats stats;

  std::size_t size() const { return coords.size(); }
  VertexRecord record(std::size_t i) const;
  /// Isometry g with vertex i = g(rep of its orbit).
  Isometry isometry_from_rep(std::size_t i, const GroupSpec& group) const;
  /// Recomputes non-representative coordinates from the representatives.
  void propagate(const GroupSpec& group);
};

/// Random-objective LP draws until `saturation` consecutive draws add no orbit, then an
/// edge walk from every orbit representative; the walk closes the vertex graph, so the
/// result is complete even when some orbit has a tiny normal cone.
VertexSet enumerate_vertices(const VoronoiCell& cell, const VertexEnumerationOptions& options = {});

/// Indices of vertices on facet f.
std::vector<std::uint32_t> facet_vertex_set(const VertexSet& vertices, std::uint32_t f);

struct ChildLink {
  std::uint32_t orbit = 0;  // orbit index in dimension d-1
  Isometry map;             // child instance = map(orbit representative)
};

struct FaceOrbit {
  std::size_t dim = 0;
  std::uint64_t size = 0;
  FacetBits facets;
  std::vector<std::uint32_t> vertices;
  std::vector<ChildLink> children;
  std::uint32_t class_id = 0;
};

struct FaceClass {
  std::size_t dim = 0;
  std::vector<std::uint32_t> orbits;
  std::uint64_t total = 0;
  std::size_t vertex_count = 0;
  std::vector<std::uint32_t> child_classes;  // sorted multiset of dim-1 class ids
  Rational volume2;
};

struct FaceLattice {
  std::size_t n = 0;
  std::vector<std::vector<FaceOrbit>> orbits;  // [dim]
  std::vector<std::uint64_t> totals;           // faces per dimension
  std::vector<std::vector<FaceClass>> classes; // filled by classify_faces

  std::size_t orbit_count() const;
  std::size_t class_count() const;
  /// Σ_{d<n} (−1)^d N_d.
  std::int64_t euler_sum() const;
};

struct FaceLatticeOptions {
  unsigned workers = 1;
  std::size_t orbit_cap = kDefaultOrbitCap;
};

FaceLattice build_face_lattice(const VoronoiCell& cell, const VertexSet& vertices, const FaceLatticeOptions& options = {});

/// Rank of the facet normals in a bitset, computed on integer lattice coordinates.
std::size_t facet_rank(const VoronoiCell& cell, std::span<const std::uint64_t> bits);

}  // namespace lamiq

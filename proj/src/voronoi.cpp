#include "lamiq/voronoi.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <random>

#include "lamiq/parallel.hpp"

namespace lamiq {

HalfspaceSystem VoronoiCell::halfspaces() const {
  HalfspaceSystem sys;
  sys.normals.reserve(facets.size());
  sys.rhs.reserve(facets.size());
  for (const FacetSpec& f : facets) {
    sys.normals.push_back(f.normal);
    sys.rhs.push_back(f.rhs);
  }
  return sys;
}

VoronoiCell make_cell(const GeneratorMatrix& basis, const GroupSpec& group, unsigned workers) {
  validate_group(group, basis);
  VoronoiCell cell{basis, group, {}, {}, 0};
  const RelevantVectorSet rv = relevant_vectors(basis, workers);
  std::vector<QVector> normals;
  for (const RelevantVector& r : rv.vectors) {
    cell.facets.push_back(FacetSpec{r.coords, r.vector, r.norm2 / 2});
    normals.push_back(r.vector);
  }
  cell.facet_action = induced_action(group, normals);
  cell.words = (cell.facets.size() + 63) / 64;
  return cell;
}

// ---------------------------------------------------------------------------------------------
// Bitsets

namespace {
constexpr std::uint32_t kEmptySlot = 0xffffffffU;
}

BitsetTable::BitsetTable(std::size_t words) : words_(words), slots_(64, kEmptySlot) {}

std::size_t BitsetTable::hash(std::span<const std::uint64_t> bits) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const std::uint64_t w : bits) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

std::int64_t BitsetTable::find(std::span<const std::uint64_t> bits) const {
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash(bits) & mask;; i = (i + 1) & mask) {
    const std::uint32_t s = slots_[i];
    if (s == kEmptySlot) return -1;
    if (std::equal(bits.begin(), bits.end(), data_.begin() + static_cast<std::ptrdiff_t>(s * words_))) return s;
  }
}

std::pair<std::uint32_t, bool> BitsetTable::insert(std::span<const std::uint64_t> bits) {
  if (2 * (count_ + 1) > slots_.size()) grow();
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = hash(bits) & mask;
  for (;; i = (i + 1) & mask) {
    const std::uint32_t s = slots_[i];
    if (s == kEmptySlot) break;
    if (std::equal(bits.begin(), bits.end(), data_.begin() + static_cast<std::ptrdiff_t>(s * words_))) return {s, false};
  }
  if (count_ >= kEmptySlot - 1) throw ResourceError("bitset table is full");
  slots_[i] = static_cast<std::uint32_t>(count_);
  data_.insert(data_.end(), bits.begin(), bits.end());
  return {static_cast<std::uint32_t>(count_++), true};
}

void BitsetTable::grow() {
  std::vector<std::uint32_t> fresh(slots_.size() * 2, kEmptySlot);
  const std::size_t mask = fresh.size() - 1;
  for (std::size_t e = 0; e < count_; ++e) {
    std::size_t i = hash(at(e)) & mask;
    while (fresh[i] != kEmptySlot) i = (i + 1) & mask;
    fresh[i] = static_cast<std::uint32_t>(e);
  }
  slots_.swap(fresh);
}

void BitsetTable::clear() {
  count_ = 0;
  data_.clear();
  data_.shrink_to_fit();
  slots_.assign(64, kEmptySlot);
}

FacetBits facet_bits(const std::vector<std::uint32_t>& indices, std::size_t words) {
  FacetBits b(words, 0);
  for (const std::uint32_t i : indices) b[i / 64] |= std::uint64_t{1} << (i % 64);
  return b;
}

std::vector<std::uint32_t> bit_indices(std::span<const std::uint64_t> bits) {
  std::vector<std::uint32_t> out;
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t x = bits[w];
    while (x) {
      out.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(x))));
      x &= x - 1;
    }
  }
  return out;
}

std::size_t popcount(std::span<const std::uint64_t> bits) {
  std::size_t c = 0;
  for (const std::uint64_t w : bits) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

void permute_bits(std::span<const std::uint64_t> bits, const std::vector<std::uint32_t>& perm,
                  std::span<std::uint64_t> out) {
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t x = bits[w];
    while (x) {
      const std::uint32_t j = perm[w * 64 + static_cast<std::size_t>(std::countr_zero(x))];
      out[j / 64] |= std::uint64_t{1} << (j % 64);
      x &= x - 1;
    }
  }
}

namespace {

bool subset_of(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

bool test_bit(std::span<const std::uint64_t> b, std::uint32_t i) { return (b[i / 64] >> (i % 64)) & 1U; }

// Rank of an integer matrix by fraction-free elimination with row-content reduction.
std::size_t integer_rank(std::vector<std::vector<std::int64_t>> rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    const __int128 p = rows[rank][c];
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const __int128 f = rows[r][c];
      if (f == 0) continue;
      std::int64_t g = 0;
      std::vector<__int128> tmp(cols);
      for (std::size_t k = 0; k < cols; ++k) {
        tmp[k] = rows[r][k] * p - rows[rank][k] * f;
      }
      for (std::size_t k = 0; k < cols; ++k) {
        __int128 v = tmp[k] < 0 ? -tmp[k] : tmp[k];
        if (v > static_cast<__int128>(INT64_MAX)) throw ResourceError("integer rank: coefficient overflow");
        g = std::gcd(g, static_cast<std::int64_t>(v));
      }
      for (std::size_t k = 0; k < cols; ++k) rows[r][k] = g ? static_cast<std::int64_t>(tmp[k] / g) : 0;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t facet_rank(const VoronoiCell& cell, std::span<const std::uint64_t> bits) {
  std::vector<std::vector<std::int64_t>> rows;
  for (const std::uint32_t j : bit_indices(bits)) rows.push_back(cell.facets[j].coords);
  return integer_rank(std::move(rows), cell.dim());
}

// ---------------------------------------------------------------------------------------------
// Vertices

VertexSolution solve_vertex(const VoronoiCell& cell, const std::vector<std::uint32_t>& facets) {
  const std::size_t n = cell.dim();
  VertexSolution out;
  QMatrix a(facets.size(), n);
  QVector b(facets.size());
  for (std::size_t r = 0; r < facets.size(); ++r) {
    const FacetSpec& f = cell.facets.at(facets[r]);
    for (std::size_t c = 0; c < n; ++c) a(r, c) = f.normal[c];
    b[r] = f.rhs;
  }
  const LinearSolution s = solve_linear(a, b);
  if (s.status == LinearSolution::Status::inconsistent) return out;
  if (s.status == LinearSolution::Status::underdetermined) {
    out.status = VertexSolveStatus::underdetermined;
    return out;
  }
  for (std::uint32_t k = 0; k < cell.facets.size(); ++k) {
    const Rational lhs = dot(cell.facets[k].normal, s.x);
    if (lhs > cell.facets[k].rhs) return out;
    if (lhs == cell.facets[k].rhs) out.active.push_back(k);
  }
  out.status = VertexSolveStatus::vertex;
  out.coords = s.x;
  return out;
}

std::vector<std::vector<std::uint32_t>> facet_classes(const VoronoiCell& cell) {
  auto orbits = point_orbits(cell.facet_action);
  std::stable_sort(orbits.begin(), orbits.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
  return orbits;
}

std::vector<std::size_t> incidence_counts(const std::vector<std::vector<std::uint32_t>>& classes,
                                          const std::vector<std::uint32_t>& facets) {
  std::vector<std::size_t> out(classes.size(), 0);
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (const std::uint32_t f : facets)
      if (std::binary_search(classes[c].begin(), classes[c].end(), f)) ++out[c];
  return out;
}

VertexRecord VertexSet::record(std::size_t i) const { return VertexRecord{coords[i], bit_indices(bits.at(i))}; }

Isometry VertexSet::isometry_from_rep(std::size_t i, const GroupSpec& group) const {
  Isometry iso = Isometry::identity(n);
  while (parent[i] != i) {
    iso = iso.compose(group.generators[gen[i]]);
    i = parent[i];
  }
  return iso;
}

void VertexSet::propagate(const GroupSpec& group) {
  for (std::size_t i = 0; i < size(); ++i)
    if (parent[i] != i) group.generators[gen[i]].apply_into(coords[parent[i]], coords[i]);
}

namespace {

std::vector<std::uint32_t> independent_subset(const VoronoiCell& cell, const std::vector<std::uint32_t>& active) {
  std::vector<std::uint32_t> chosen;
  std::vector<std::vector<std::int64_t>> rows;
  for (const std::uint32_t j : active) {
    rows.push_back(cell.facets[j].coords);
    if (integer_rank(rows, cell.dim()) == rows.size())
      chosen.push_back(j);
    else
      rows.pop_back();
    if (chosen.size() == cell.dim()) break;
  }
  return chosen;
}

struct VertexBuilder {
  const VoronoiCell& cell;
  std::size_t cap;
  VertexSet vs;

  VertexBuilder(const VoronoiCell& c, std::size_t orbit_cap) : cell(c), cap(orbit_cap) {
    vs.n = c.dim();
    vs.bits = BitsetTable(c.words);
  }

  bool known(const std::vector<std::uint32_t>& active) const {
    return vs.bits.find(facet_bits(active, cell.words)) >= 0;
  }

  // Adds the orbit of x unless already present.
  bool add_orbit(const QVector& x, const std::vector<std::uint32_t>& active) {
    const FacetBits b = facet_bits(active, cell.words);
    if (vs.bits.find(b) >= 0) return false;
    const auto first = static_cast<std::uint32_t>(vs.size());
    vs.bits.insert(b);
    vs.coords.push_back(x);
    vs.parent.push_back(first);
    vs.gen.push_back(0);
    vs.orbit_of.push_back(static_cast<std::uint32_t>(vs.orbits.size()));
    FacetBits img(cell.words);
    for (std::size_t head = first; head < vs.size(); ++head) {
      for (std::size_t g = 0; g < cell.group.generators.size(); ++g) {
        permute_bits(vs.bits.at(head), cell.facet_action.generators[g], img);
        const auto [idx, fresh] = vs.bits.insert(img);
        if (!fresh) continue;
        if (vs.size() - first >= cap) throw ResourceError("vertex orbit exceeds the configured cap");
        vs.coords.push_back(cell.group.generators[g].apply(vs.coords[head]));
        vs.parent.push_back(static_cast<std::uint32_t>(head));
        vs.gen.push_back(static_cast<std::uint8_t>(g));
        vs.orbit_of.push_back(static_cast<std::uint32_t>(vs.orbits.size()));
      }
    }
    VertexOrbitInfo info;
    info.rep = first;
    info.first = first;
    info.size = static_cast<std::uint32_t>(vs.size() - first);
    info.basis = independent_subset(cell, active);
    vs.orbits.push_back(std::move(info));
    return true;
  }
};

// Extreme rays of {e : z_j·e ≤ 0, j ∈ rows} by double description; the cone must be pointed.
std::vector<std::vector<Integer>> cone_rays(const std::vector<IntVector>& rows, std::size_t n) {
  using Ray = std::vector<Integer>;
  const std::size_t k = rows.size();
  const std::size_t words = (k + 63) / 64;
  auto row_dot = [&](std::size_t j, const Ray& e) {
    Integer s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (rows[j][i] != 0) s += Integer(static_cast<long>(rows[j][i])) * e[i];
    return s;
  };
  auto normalize = [&](Ray& e) {
    Integer g = 0;
    for (const Integer& v : e) g = gcd(g, v);
    if (g > 1)
      for (Integer& v : e) v /= g;
  };

  // Initial simplicial cone from the first n independent rows.
  std::vector<std::size_t> order;
  {
    std::vector<std::vector<std::int64_t>> acc;
    for (std::size_t j = 0; j < k && order.size() < n; ++j) {
      acc.push_back(rows[j]);
      if (integer_rank(acc, n) == acc.size())
        order.push_back(j);
      else
        acc.pop_back();
    }
    if (order.size() < n) throw ConsistencyError("vertex cone is not pointed");
    for (std::size_t j = 0; j < k; ++j)
      if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
  }
  QMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = static_cast<long>(rows[order[r]][c]);
  struct Entry {
    Ray e;
    std::vector<std::uint64_t> zero;
  };
  std::vector<Entry> rays;
  for (std::size_t c = 0; c < n; ++c) {
    // Ray with row order[c] strictly negative and the other initial rows tight: −(column c of m⁻¹).
    QVector rhs = zero_vector(n);
    rhs[c] = -1;
    const LinearSolution s = solve_linear(m, rhs);
    Integer den = 1;
    for (const Rational& q : s.x) den = lcm(den, Integer(q.get_den()));
    Entry en{Ray(n), std::vector<std::uint64_t>(words, 0)};
    for (std::size_t i = 0; i < n; ++i) en.e[i] = Integer(s.x[i] * den);
    normalize(en.e);
    for (std::size_t r = 0; r < n; ++r)
      if (r != c) en.zero[order[r] / 64] |= std::uint64_t{1} << (order[r] % 64);
    rays.push_back(std::move(en));
  }
  for (std::size_t step = n; step < k; ++step) {
    const std::size_t j = order[step];
    std::vector<Integer> val(rays.size());
    std::vector<std::size_t> pos, neg, zer;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      val[r] = row_dot(j, rays[r].e);
      const int s = sgn(val[r]);
      (s > 0 ? pos : s < 0 ? neg : zer).push_back(r);
    }
    if (pos.empty()) {
      for (const std::size_t r : zer) rays[r].zero[j / 64] |= std::uint64_t{1} << (j % 64);
      continue;
    }
    std::vector<Entry> next;
    for (const std::size_t r : neg) next.push_back(rays[r]);
    for (const std::size_t r : zer) {
      next.push_back(rays[r]);
      next.back().zero[j / 64] |= std::uint64_t{1} << (j % 64);
    }
    for (const std::size_t p : pos)
      for (const std::size_t q : neg) {
        std::vector<std::uint64_t> common(words);
        std::size_t cnt = 0;
        for (std::size_t w = 0; w < words; ++w) {
          common[w] = rays[p].zero[w] & rays[q].zero[w];
          cnt += static_cast<std::size_t>(std::popcount(common[w]));
        }
        if (cnt + 2 < n) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          if (subset_of(common, rays[r].zero)) adjacent = false;
        }
        if (!adjacent) continue;
        Entry en{Ray(n), common};
        for (std::size_t i = 0; i < n; ++i) en.e[i] = val[p] * rays[q].e[i] - val[q] * rays[p].e[i];
        normalize(en.e);
        en.zero[j / 64] |= std::uint64_t{1} << (j % 64);
        next.push_back(std::move(en));
      }
    rays = std::move(next);
  }
  std::vector<Ray> out;
  for (auto& en : rays) out.push_back(std::move(en.e));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

VertexSet enumerate_vertices(const VoronoiCell& cell, const VertexEnumerationOptions& options) {
  const std::size_t n = cell.dim();
  const HalfspaceSystem sys = cell.halfspaces();
  VertexBuilder builder(cell, options.orbit_cap);

  std::mt19937_64 rng(options.seed);
  std::size_t quiet = 0;
  std::size_t draws = 0;
  while (quiet < options.saturation) {
    if (draws >= options.max_draws) throw ResourceError("vertex enumeration did not saturate within the draw budget");
    QVector c(n);
    for (Rational& v : c) v = Rational(static_cast<long>(rng() % 2000001ULL) - 1000000L);
    ++draws;
    if (is_zero(c)) continue;
    const LPResult r = maximize(sys, c);
    builder.vs.stats.pivots += r.pivots;
    if (builder.add_orbit(r.x, r.active)) {
      ++builder.vs.stats.orbits_from_draws;
      quiet = 0;
    } else {
      ++quiet;
    }
  }
  builder.vs.stats.draws = draws;

  // Edge walk from each representative.
  for (std::size_t o = 0; o < builder.vs.orbits.size(); ++o) {
    const std::uint32_t rep = builder.vs.orbits[o].rep;
    const QVector x = builder.vs.coords[rep];
    const std::vector<std::uint32_t> active = bit_indices(builder.vs.bits.at(rep));
    std::vector<IntVector> rows;
    for (const std::uint32_t j : active) rows.push_back(cell.facets[j].coords);
    for (const auto& e : cone_rays(rows, n)) {
      QVector eq(n);
      for (std::size_t i = 0; i < n; ++i) eq[i] = Rational(e[i]);
      const QVector d = cell.basis.inverse() * eq;
      Rational step;
      bool found = false;
      std::vector<Rational> rate(cell.facets.size());
      for (std::uint32_t k = 0; k < cell.facets.size(); ++k) {
        rate[k] = dot(cell.facets[k].normal, d);
        if (sgn(rate[k]) <= 0) continue;
        const Rational t = (cell.facets[k].rhs - dot(cell.facets[k].normal, x)) / rate[k];
        if (!found || t < step) {
          step = t;
          found = true;
        }
      }
      if (!found) throw InvalidInput("facet set leaves the cell unbounded");
      if (sgn(step) <= 0) throw ConsistencyError("edge walk stalled at a vertex");
      QVector y = x;
      for (std::size_t i = 0; i < n; ++i) y[i] += step * d[i];
      std::vector<std::uint32_t> act;
      for (std::uint32_t k = 0; k < cell.facets.size(); ++k)
        if (dot(cell.facets[k].normal, y) == cell.facets[k].rhs) act.push_back(k);
      if (builder.add_orbit(y, act)) ++builder.vs.stats.orbits_from_edges;
    }
  }

  // Canonical order: farthest orbits first, then by least coordinates in the orbit.
  struct Canon {
    QVector rep;
    std::vector<std::uint32_t> active;
    Rational norm2;
  };
  std::vector<Canon> canon;
  for (const VertexOrbitInfo& o : builder.vs.orbits) {
    std::uint32_t best = o.first;
    for (std::uint32_t i = o.first; i < o.first + o.size; ++i)
      if (builder.vs.coords[i] < builder.vs.coords[best]) best = i;
    const QVector& v = builder.vs.coords[best];
    canon.push_back(Canon{v, bit_indices(builder.vs.bits.at(best)), dot(v, v)});
  }
  std::sort(canon.begin(), canon.end(), [](const Canon& a, const Canon& b) {
    if (a.norm2 != b.norm2) return a.norm2 > b.norm2;
    return a.rep < b.rep;
  });
  VertexBuilder final_builder(cell, options.orbit_cap);
  for (const Canon& c : canon) final_builder.add_orbit(c.rep, c.active);
  final_builder.vs.stats = builder.vs.stats;
  return std::move(final_builder.vs);
}

std::vector<std::uint32_t> facet_vertex_set(const VertexSet& vertices, std::uint32_t f) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < vertices.size(); ++i)
    if (test_bit(vertices.bits.at(i), f)) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Face lattice

std::size_t FaceLattice::orbit_count() const {
  std::size_t c = 0;
  for (const auto& d : orbits) c += d.size();
  return c;
}

std::size_t FaceLattice::class_count() const {
  std::size_t c = 0;
  for (const auto& d : classes) c += d.size();
  return c;
}

std::int64_t FaceLattice::euler_sum() const {
  std::int64_t s = 0;
  for (std::size_t d = 0; d < n; ++d) s += (d % 2 ? -1 : 1) * static_cast<std::int64_t>(totals[d]);
  return s;
}

namespace {

struct Candidate {
  FacetBits facets;
  std::vector<std::uint32_t> vertices;
};

std::vector<Candidate> child_candidates(const VoronoiCell& cell, const VertexSet& vs, const FaceOrbit& face) {
  const std::size_t words = cell.words;
  std::map<std::uint32_t, std::vector<std::uint32_t>> buckets;
  for (const std::uint32_t v : face.vertices) {
    const auto bits = vs.bits.at(v);
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t x = bits[w] & ~face.facets[w];
      while (x) {
        buckets[static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(x)))].push_back(v);
        x &= x - 1;
      }
    }
  }
  std::vector<Candidate> cands;
  for (auto& [j, members] : buckets) {
    FacetBits closure(vs.bits.at(members.front()).begin(), vs.bits.at(members.front()).end());
    for (const std::uint32_t v : members) {
      const auto b = vs.bits.at(v);
      for (std::size_t w = 0; w < words; ++w) closure[w] &= b[w];
    }
    cands.push_back(Candidate{std::move(closure), std::move(members)});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.facets < b.facets; });
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](const Candidate& a, const Candidate& b) { return a.facets == b.facets; }),
              cands.end());
  std::vector<Candidate> children;
  for (std::size_t a = 0; a < cands.size(); ++a) {
    bool minimal = true;
    for (std::size_t b = 0; b < cands.size() && minimal; ++b)
      if (b != a && subset_of(cands[b].facets, cands[a].facets)) minimal = false;
    if (minimal) children.push_back(cands[a]);
  }
  return children;
}

struct OrbitTable {
  BitsetTable bits;
  std::vector<std::uint32_t> parent;
  std::vector<std::uint8_t> gen;
  std::vector<std::uint32_t> orbit;

  explicit OrbitTable(std::size_t words) : bits(words) {}

  Isometry from_rep(std::uint32_t i, const GroupSpec& group) const {
    Isometry iso = Isometry::identity(group.dim);
    while (parent[i] != i) {
      iso = iso.compose(group.generators[gen[i]]);
      i = parent[i];
    }
    return iso;
  }
};

}  // namespace

FaceLattice build_face_lattice(const VoronoiCell& cell, const VertexSet& vs, const FaceLatticeOptions& options) {
  const std::size_t n = cell.dim();
  const std::size_t words = cell.words;
  FaceLattice fl;
  fl.n = n;
  fl.orbits.resize(n + 1);
  fl.totals.assign(n + 1, 0);

  FaceOrbit top;
  top.dim = n;
  top.size = 1;
  top.facets.assign(words, 0);
  top.vertices.resize(vs.size());
  std::iota(top.vertices.begin(), top.vertices.end(), 0U);
  fl.orbits[n].push_back(std::move(top));
  fl.totals[n] = 1;

  for (std::size_t d = n; d >= 1; --d) {
    auto& reps = fl.orbits[d];
    std::vector<std::vector<Candidate>> found(reps.size());
    parallel_for(reps.size(), options.workers,
                 [&](std::size_t i) { found[i] = child_candidates(cell, vs, reps[i]); });

    OrbitTable table(words);
    FacetBits img(words);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      for (Candidate& c : found[r]) {
        if (n - facet_rank(cell, c.facets) != d - 1)
          throw ConsistencyError("face of dimension " + std::to_string(d) + " has a child of the wrong rank");
        ChildLink link;
        if (d == 1) {
          const std::int64_t v = vs.bits.find(c.facets);
          if (v < 0) throw ConsistencyError("edge endpoint is not a known vertex");
          link.orbit = vs.orbit_of[static_cast<std::size_t>(v)];
          link.map = vs.isometry_from_rep(static_cast<std::size_t>(v), cell.group);
          reps[r].children.push_back(std::move(link));
          continue;
        }
        const std::int64_t hit = table.bits.find(c.facets);
        if (hit >= 0) {
          const auto idx = static_cast<std::uint32_t>(hit);
          link.orbit = table.orbit[idx];
          link.map = table.from_rep(idx, cell.group);
          reps[r].children.push_back(std::move(link));
          continue;
        }
        // New orbit: breadth-first closure from this instance.
        const auto orbit_id = static_cast<std::uint32_t>(fl.orbits[d - 1].size());
        const std::uint32_t first = table.bits.insert(c.facets).first;
        table.parent.push_back(first);
        table.gen.push_back(0);
        table.orbit.push_back(orbit_id);
        for (std::size_t head = first; head < table.bits.size(); ++head) {
          for (std::size_t g = 0; g < cell.group.generators.size(); ++g) {
            permute_bits(table.bits.at(head), cell.facet_action.generators[g], img);
            if (!table.bits.insert(img).second) continue;
            if (table.bits.size() - first > options.orbit_cap)
              throw ResourceError("face orbit exceeds the configured cap");
            table.parent.push_back(static_cast<std::uint32_t>(head));
            table.gen.push_back(static_cast<std::uint8_t>(g));
            table.orbit.push_back(orbit_id);
          }
        }
        FaceOrbit child;
        child.dim = d - 1;
        child.size = table.bits.size() - first;
        child.facets = std::move(c.facets);
        child.vertices = std::move(c.vertices);
        fl.orbits[d - 1].push_back(std::move(child));
        link.orbit = orbit_id;
        link.map = Isometry::identity(n);
        reps[r].children.push_back(std::move(link));
      }
    }
    if (d == 1) {
      for (const VertexOrbitInfo& o : vs.orbits) {
        FaceOrbit v;
        v.dim = 0;
        v.size = o.size;
        const auto b = vs.bits.at(o.rep);
        v.facets.assign(b.begin(), b.end());
        v.vertices = {o.rep};
        fl.orbits[0].push_back(std::move(v));
      }
      fl.totals[0] = vs.size();
    } else {
      fl.totals[d - 1] = table.bits.size();
    }
  }
  return fl;
}

}  // namespace lamiq

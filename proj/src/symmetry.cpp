#include "lamiq/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace lamiq {

Isometry::Isometry(std::vector<std::uint32_t> perm, std::vector<std::int8_t> sign)
    : perm_(std::move(perm)), sign_(std::move(sign)) {
  const std::size_t n = perm_.size();
  if (sign_.size() != n) throw InvalidInput("isometry: permutation and sign lengths differ");
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm_[i] >= n || seen[perm_[i]]) throw InvalidInput("isometry: not a permutation");
    seen[perm_[i]] = true;
    if (sign_[i] != 1 && sign_[i] != -1) throw InvalidInput("isometry: signs must be ±1");
  }
}

Isometry Isometry::identity(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0U);
  return Isometry(std::move(p), std::vector<std::int8_t>(n, 1));
}

Isometry Isometry::from_word(const std::vector<int>& word) {
  std::vector<std::uint32_t> p(word.size());
  std::vector<std::int8_t> s(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] == 0) throw InvalidInput("isometry word entries are ±(1-based index)");
    p[i] = static_cast<std::uint32_t>(std::abs(word[i]) - 1);
    s[i] = word[i] < 0 ? -1 : 1;
  }
  return Isometry(std::move(p), std::move(s));
}

std::vector<int> Isometry::word() const {
  std::vector<int> w(dim());
  for (std::size_t i = 0; i < dim(); ++i) w[i] = sign_[i] * static_cast<int>(perm_[i] + 1);
  return w;
}

QVector Isometry::apply(const QVector& x) const {
  QVector y(x.size());
  apply_into(x, y);
  return y;
}

void Isometry::apply_into(const QVector& x, QVector& out) const {
  if (x.size() != dim()) throw InvalidInput("isometry applied to a vector of the wrong dimension");
  out.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (sign_[i] > 0)
      out[i] = x[perm_[i]];
    else
      out[i] = -x[perm_[i]];
  }
}

Isometry Isometry::compose(const Isometry& inner) const {
  const std::size_t n = dim();
  std::vector<std::uint32_t> p(n);
  std::vector<std::int8_t> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = inner.perm_[perm_[i]];
    s[i] = static_cast<std::int8_t>(sign_[i] * inner.sign_[perm_[i]]);
  }
  Isometry r;
  r.perm_ = std::move(p);
  r.sign_ = std::move(s);
  return r;
}

Isometry Isometry::inverse() const {
  const std::size_t n = dim();
  Isometry r;
  r.perm_.resize(n);
  r.sign_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.perm_[perm_[i]] = static_cast<std::uint32_t>(i);
    r.sign_[perm_[i]] = sign_[i];
  }
  return r;
}

QMatrix Isometry::matrix() const {
  QMatrix m(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) m(i, perm_[i]) = sign_[i];
  return m;
}

QMatrix Isometry::conjugate(const QMatrix& t) const {
  const std::size_t n = dim();
  QMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& v = t(perm_[i], perm_[j]);
      r(i, j) = (sign_[i] * sign_[j] > 0) ? v : Rational(-v);
    }
  return r;
}

bool Isometry::is_identity() const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (perm_[i] != i || sign_[i] != 1) return false;
  return true;
}

bool Isometry::preserves_lattice(const GeneratorMatrix& b) const {
  if (b.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (b.coordinates(apply(b.row(i))).empty()) return false;
  return true;
}

namespace {

Isometry transposition(std::size_t n, std::size_t i, std::size_t j) {
  Isometry id = Isometry::identity(n);
  std::vector<std::uint32_t> p = id.perm();
  std::swap(p[i], p[j]);
  return Isometry(std::move(p), id.sign());
}

Isometry sign_flip(std::size_t n, std::initializer_list<std::size_t> coords) {
  std::vector<std::int8_t> s(n, 1);
  for (const std::size_t c : coords) s[c] = -1;
  return Isometry(Isometry::identity(n).perm(), std::move(s));
}

}  // namespace

GroupSpec ae9_group() {
  GroupSpec g;
  g.name = "ae9";
  g.dim = 9;
  g.generators.push_back(sign_flip(9, {8}));
  for (std::size_t i = 0; i + 1 < 8; ++i) g.generators.push_back(transposition(9, i, i + 1));
  g.generators.push_back(sign_flip(9, {0, 1}));
  g.claimed_order = 10'321'920;
  return g;
}

GroupSpec central_group(std::size_t n) {
  GroupSpec g;
  g.name = "central";
  g.dim = n;
  std::vector<std::int8_t> s(n, -1);
  g.generators.push_back(Isometry(Isometry::identity(n).perm(), std::move(s)));
  g.claimed_order = 2;
  return g;
}

GroupSpec sign_group(std::size_t n) {
  GroupSpec g;
  g.name = "signs";
  g.dim = n;
  for (std::size_t i = 0; i < n; ++i) g.generators.push_back(sign_flip(n, {i}));
  g.claimed_order = std::uint64_t{1} << n;
  return g;
}

GroupSpec hyperoctahedral_group(std::size_t n) {
  GroupSpec g = sign_group(n);
  g.name = "hyperoctahedral";
  for (std::size_t i = 0; i + 1 < n; ++i) g.generators.push_back(transposition(n, i, i + 1));
  std::uint64_t order = std::uint64_t{1} << n;
  for (std::size_t k = 2; k <= n; ++k) order *= k;
  g.claimed_order = order;
  return g;
}

void validate_group(const GroupSpec& g, const GeneratorMatrix& b) {
  if (g.dim != b.dim()) throw InvalidInput("group dimension does not match the lattice");
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    if (g.generators[i].dim() != g.dim) throw InvalidInput("group generator has the wrong dimension");
    if (!g.generators[i].preserves_lattice(b))
      throw InvalidInput("group generator " + std::to_string(i) + " does not preserve the lattice");
  }
}

std::vector<QVector> orbit(const QVector& seed, const GroupSpec& g, std::size_t cap) {
  std::vector<QVector> out{seed};
  std::unordered_set<QVector, QVectorHash> seen{seed};
  QVector img;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const Isometry& gen : g.generators) {
      gen.apply_into(out[head], img);
      if (seen.insert(img).second) {
        if (out.size() >= cap) throw ResourceError("orbit exceeds the configured cap of " + std::to_string(cap));
        out.push_back(img);
      }
    }
  }
  return out;
}

QVector canonical_form(const QVector& v, const GroupSpec& g, std::size_t cap) {
  const std::vector<QVector> o = orbit(v, g, cap);
  return *std::min_element(o.begin(), o.end());
}

std::vector<std::uint32_t> IndexAction::image(const std::vector<std::uint32_t>& set, std::size_t gen) const {
  std::vector<std::uint32_t> out;
  out.reserve(set.size());
  for (const std::uint32_t i : set) out.push_back(generators[gen][i]);
  std::sort(out.begin(), out.end());
  return out;
}

IndexAction induced_action(const GroupSpec& g, const std::vector<QVector>& points) {
  std::unordered_map<QVector, std::uint32_t, QVectorHash> index;
  index.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) index.emplace(points[i], static_cast<std::uint32_t>(i));
  IndexAction action;
  QVector img;
  for (const Isometry& gen : g.generators) {
    std::vector<std::uint32_t> perm(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      gen.apply_into(points[i], img);
      const auto it = index.find(img);
      if (it == index.end()) throw ConsistencyError("group generator maps an indexed point outside the list");
      perm[i] = it->second;
    }
    action.generators.push_back(std::move(perm));
  }
  return action;
}

namespace {

struct IndexSetHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
    for (const std::uint32_t x : v) h = (h ^ x) * 0x100000001b3ULL;
    return h;
  }
};

}  // namespace

std::vector<std::vector<std::uint32_t>> orbit(const std::vector<std::uint32_t>& seed, const IndexAction& action,
                                              std::size_t cap) {
  std::vector<std::uint32_t> s = seed;
  std::sort(s.begin(), s.end());
  std::vector<std::vector<std::uint32_t>> out{s};
  std::unordered_set<std::vector<std::uint32_t>, IndexSetHash> seen{s};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (std::size_t gi = 0; gi < action.generators.size(); ++gi) {
      std::vector<std::uint32_t> img = action.image(out[head], gi);
      if (seen.insert(img).second) {
        if (out.size() >= cap) throw ResourceError("orbit exceeds the configured cap of " + std::to_string(cap));
        out.push_back(std::move(img));
      }
    }
  }
  return out;
}

std::vector<std::uint32_t> canonical_form(const std::vector<std::uint32_t>& seed, const IndexAction& action,
                                          std::size_t cap) {
  const auto o = orbit(seed, action, cap);
  return *std::min_element(o.begin(), o.end());
}

std::vector<std::vector<std::uint32_t>> point_orbits(const IndexAction& action) {
  const std::size_t n = action.size();
  std::vector<int> owner(n, -1);
  std::vector<std::vector<std::uint32_t>> orbits;
  for (std::size_t start = 0; start < n; ++start) {
    if (owner[start] >= 0) continue;
    const int id = static_cast<int>(orbits.size());
    std::vector<std::uint32_t> members{static_cast<std::uint32_t>(start)};
    owner[start] = id;
    for (std::size_t head = 0; head < members.size(); ++head)
      for (const auto& gen : action.generators) {
        const std::uint32_t img = gen[members[head]];
        if (owner[img] < 0) {
          owner[img] = id;
          members.push_back(img);
        }
      }
    std::sort(members.begin(), members.end());
    orbits.push_back(std::move(members));
  }
  return orbits;
}

Integer orbit_size_formula(const QVector& v) {
  if (v.size() != 9) throw InvalidInput("orbit_size_formula expects a 9-vector");
  std::vector<Rational> mags;
  int nonzero = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    mags.push_back(abs(v[i]));
    if (sgn(v[i]) != 0) ++nonzero;
  }
  std::sort(mags.begin(), mags.end());
  Integer denom = 1;
  for (std::size_t i = 0; i < mags.size();) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), j - i);
    denom *= f;
    i = j;
  }
  const int m = std::min(7, nonzero);
  const int z = sgn(v[8]) == 0 ? 0 : 1;
  Integer num;
  mpz_fac_ui(num.get_mpz_t(), 8);
  num <<= static_cast<mp_bitcnt_t>(m + z);
  return num / denom;
}

namespace {

// Packs a signed permutation of ≤ 12 coordinates into 64 bits: 4 bits per image index plus a sign mask.
std::uint64_t pack(const std::vector<std::uint32_t>& p, const std::vector<std::int8_t>& s) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < p.size(); ++i) key |= static_cast<std::uint64_t>(p[i]) << (4 * i);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 0) key |= std::uint64_t{1} << (48 + i);
  return key;
}

class PackedSet {
 public:
  explicit PackedSet(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < expected * 2) cap <<= 1;
    slots_.assign(cap, kEmpty);
  }
  bool insert(std::uint64_t key) {
    if (2 * (size_ + 1) > slots_.size()) grow();
    return place(key);
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  bool place(std::uint64_t key) {
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = (key * 0x9e3779b97f4a7c15ULL) >> 20 & mask;
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return false;
      i = (i + 1) & mask;
    }
    slots_[i] = key;
    ++size_;
    return true;
  }
  void grow() {
    std::vector<std::uint64_t> old(slots_.size() * 2, kEmpty);
    old.swap(slots_);
    size_ = 0;
    for (const std::uint64_t k : old)
      if (k != kEmpty) place(k);
  }
  std::vector<std::uint64_t> slots_;
  std::size_t size_ = 0;
};

}  // namespace

std::uint64_t group_order(const GroupSpec& g, std::size_t cap) {
  if (g.dim > 12) throw ResourceError("group_order supports at most 12 coordinates");
  const std::size_t n = g.dim;
  const Isometry id = Isometry::identity(n);
  std::vector<std::uint64_t> frontier{pack(id.perm(), id.sign())};
  PackedSet seen(std::min<std::size_t>(cap, 1U << 20));
  seen.insert(frontier.front());
  std::uint64_t count = 1;
  std::vector<std::uint32_t> p(n), q(n);
  std::vector<std::int8_t> s(n), t(n);
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (const std::uint64_t key : frontier) {
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = static_cast<std::uint32_t>(key >> (4 * i) & 15U);
        s[i] = (key >> (48 + i) & 1U) ? -1 : 1;
      }
      for (const Isometry& gen : g.generators) {
        for (std::size_t i = 0; i < n; ++i) {
          q[i] = p[gen.perm()[i]];
          t[i] = static_cast<std::int8_t>(gen.sign()[i] * s[gen.perm()[i]]);
        }
        const std::uint64_t h = pack(q, t);
        if (seen.insert(h)) {
          if (++count > cap) throw ResourceError("group order exceeds the configured cap of " + std::to_string(cap));
          next.push_back(h);
        }
      }
    }
    frontier.swap(next);
  }
  return count;
}

}  // namespace lamiq

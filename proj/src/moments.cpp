#include "lamiq/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "lamiq/parallel.hpp"

namespace lamiq {

RadQ MomentRecord::u_trace() const {
  if (u_coeff.rows() == 0) return RadQ();
  return radq_mul(RadQ(u_coeff.trace()), radq_normalize(Rational(1), radicand()));
}

RadQ height_gram(const std::vector<QVector>& span, const Rational& span_gram, const QVector& base, const QVector& apex) {
  std::vector<QVector> ext = span;
  ext.push_back(sub(apex, base));
  const Rational g = gram_determinant(ext);
  if (sgn(g) == 0) throw ConsistencyError("apex lies on the child plane (zero height)");
  return radq_sqrt(g / span_gram);
}

namespace {

struct Projection {
  Rational height2;
  QVector perp;
};

// Component of w orthogonal to an orthogonal basis; its squared norm is the Gram ratio 𝒢_d/𝒢_{d−1}.
Projection project_out(const QVector& w, const std::vector<QVector>& ortho, const std::vector<Rational>& norm2) {
  QVector perp = w;
  for (std::size_t k = 0; k < ortho.size(); ++k) {
    const Rational c = dot(w, ortho[k]) / norm2[k];
    if (sgn(c) == 0) continue;
    for (std::size_t i = 0; i < perp.size(); ++i) perp[i] -= c * ortho[k][i];
  }
  Rational h2 = dot(perp, perp);
  return Projection{std::move(h2), std::move(perp)};
}

struct ChildView {
  QVector centroid;
  QVector barycenter;
  std::vector<QVector> ortho;
  const MomentRecord* rec;
  QMatrix u_coeff;
};

std::vector<Rational> norms_of(const std::vector<QVector>& ortho) {
  std::vector<Rational> out;
  for (const QVector& q : ortho) out.push_back(dot(q, q));
  return out;
}

MomentRecord moments_of(const FaceOrbit& face, const VertexSet& vs,
                        const std::vector<MomentRecord>& below) {
  const std::size_t n = vs.n;
  const std::size_t d = face.dim;
  MomentRecord rec;
  rec.dim = d;
  rec.centroid = zero_vector(n);
  for (const std::uint32_t v : face.vertices)
    for (std::size_t i = 0; i < n; ++i) rec.centroid[i] += vs.coords[v][i];
  const Rational count(static_cast<long>(face.vertices.size()));
  for (Rational& c : rec.centroid) c /= count;
  if (d == 0) {
    rec.volume = RadQ(Rational(1));
    rec.offset = zero_vector(n);
    rec.u_coeff = QMatrix(n, n);
    rec.gram = 1;
    return rec;
  }

  std::vector<ChildView> views;
  views.reserve(face.children.size());
  for (const ChildLink& link : face.children) {
    const MomentRecord& c = below[link.orbit];
    ChildView v;
    v.rec = &c;
    v.centroid = link.map.apply(c.centroid);
    v.barycenter = link.map.apply(c.barycenter());
    for (const QVector& q : c.span) v.ortho.push_back(link.map.apply(q));
    v.u_coeff = link.map.conjugate(c.u_coeff);
    views.push_back(std::move(v));
  }

  // Volume and barycenter from centroid heights.
  RadQ vol_sum;
  QVector first_coeff = zero_vector(n);
  Integer first_radicand = 1;
  bool first_set = false;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const ChildView& v = views[i];
    const std::vector<Rational> nn = norms_of(v.ortho);
    Projection p = project_out(sub(rec.centroid, v.centroid), v.ortho, nn);
    if (sgn(p.height2) == 0) throw ConsistencyError("face centroid lies on a child plane");
    const RadQ h = radq_sqrt(p.height2);
    rec.child_heights.push_back(h);
    if (i == 0) {
      rec.span = v.ortho;
      rec.span.push_back(std::move(p.perp));
      rec.gram = v.rec->gram * p.height2;
    }
    const RadQ term = radq_mul(h, v.rec->volume);
    vol_sum = radq_add(vol_sum, term);
    if (!first_set) {
      first_radicand = term.radicand();
      first_set = true;
    } else if (term.radicand() != first_radicand) {
      throw IncompatibleRadicand("pyramid terms of one face have different radicands");
    }
    const QVector delta = sub(v.barycenter, rec.centroid);
    for (std::size_t k = 0; k < n; ++k) first_coeff[k] += term.coeff() * delta[k];
  }
  rec.volume = vol_sum * Rational(1, static_cast<long>(d));
  if (rec.volume.sign() <= 0) throw ConsistencyError("nonpositive face volume");
  // O = Σ h V (B_i − C) / ((d+1) V_F) with V_F = Σ h V / d; the common radical cancels.
  rec.offset = scale(first_coeff, Rational(static_cast<long>(d)) / (Rational(static_cast<long>(d + 1)) * vol_sum.coeff()));
  const QVector bary = rec.barycenter();

  // Second moment about the barycenter from barycenter heights.
  QMatrix u(n, n);
  for (const ChildView& v : views) {
    const std::vector<Rational> nn = norms_of(v.ortho);
    const Projection p = project_out(sub(bary, v.centroid), v.ortho, nn);
    if (sgn(p.height2) == 0) throw ConsistencyError("face barycenter lies on a child plane");
    const RadQ hb = radq_sqrt(p.height2);
    const RadQ k = radq_mul(hb, v.rec->volume);
    if (k.radicand() != rec.volume.radicand())
      throw IncompatibleRadicand("second-moment term radicand differs from the face radicand");
    const QVector delta = sub(v.barycenter, bary);
    const Rational inv_v = Rational(1) / v.rec->volume.coeff();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r; c < n; ++c) {
        Rational t = v.u_coeff(r, c) * inv_v + delta[r] * delta[c];
        t *= k.coeff();
        u(r, c) += t;
      }
  }
  const Rational inv = Rational(1, static_cast<long>(d + 2));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) {
      u(r, c) *= inv;
      u(c, r) = u(r, c);
    }
  rec.u_coeff = std::move(u);
  return rec;
}

}  // namespace

MomentTable face_moments(const FaceLattice& lattice, const VertexSet& vertices, unsigned workers) {
  MomentTable table(lattice.n + 1);
  for (std::size_t d = 0; d <= lattice.n; ++d) {
    const auto& reps = lattice.orbits[d];
    table[d].resize(reps.size());
    const std::vector<MomentRecord> empty;
    const std::vector<MomentRecord>& below = d == 0 ? empty : table[d - 1];
    parallel_for(reps.size(), workers,
                 [&](std::size_t i) { table[d][i] = moments_of(reps[i], vertices, below); });
  }
  return table;
}

void classify_faces(FaceLattice& lattice, const MomentTable& moments) {
  lattice.classes.assign(lattice.n + 1, {});
  for (std::size_t d = 0; d <= lattice.n; ++d) {
    auto& reps = lattice.orbits[d];
    using Key = std::tuple<std::size_t, std::vector<std::uint32_t>, Rational>;
    std::map<Key, std::vector<std::uint32_t>> groups;
    for (std::uint32_t o = 0; o < reps.size(); ++o) {
      std::vector<std::uint32_t> kids;
      if (d > 0)
        for (const ChildLink& l : reps[o].children) kids.push_back(lattice.orbits[d - 1][l.orbit].class_id);
      std::sort(kids.begin(), kids.end());
      groups[Key{reps[o].vertices.size(), std::move(kids), moments[d][o].volume.squared()}].push_back(o);
    }
    std::vector<FaceClass> classes;
    for (auto& [key, members] : groups) {
      const RadQ trace = moments[d][members.front()].u_trace();
      for (const std::uint32_t o : members)
        if (!(moments[d][o].u_trace() == trace))
          throw ConsistencyError("face classification failure: orbits with one key differ in second moment");
      FaceClass fc;
      fc.dim = d;
      fc.orbits = members;
      for (const std::uint32_t o : members) fc.total += reps[o].size;
      fc.vertex_count = std::get<0>(key);
      fc.child_classes = std::get<1>(key);
      fc.volume2 = std::get<2>(key);
      classes.push_back(std::move(fc));
    }
    std::stable_sort(classes.begin(), classes.end(), [](const FaceClass& a, const FaceClass& b) {
      if (a.total != b.total) return a.total > b.total;
      if (a.vertex_count != b.vertex_count) return a.vertex_count > b.vertex_count;
      if (a.volume2 != b.volume2) return a.volume2 > b.volume2;
      return a.orbits.front() < b.orbits.front();
    });
    for (std::uint32_t c = 0; c < classes.size(); ++c)
      for (const std::uint32_t o : classes[c].orbits) reps[o].class_id = c;
    lattice.classes[d] = std::move(classes);
  }
}

std::optional<Rational> exact_g(const Rational& u, const Rational& v, std::size_t n) {
  Integer rn, rd;
  const auto k = static_cast<unsigned long>(n);
  if (!mpz_root(rn.get_mpz_t(), v.get_num_mpz_t(), k)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), v.get_den_mpz_t(), k)) return std::nullopt;
  const Rational r(rn, rd);
  return Rational(u / (Rational(static_cast<long>(n)) * v * r * r));
}

ApproxReal approx_g(const Rational& u, const Rational& v, std::size_t n) {
  const ApproxReal vv(v);
  const ApproxReal root = vv.root(n);
  return ApproxReal(u) / (ApproxReal(Rational(static_cast<long>(n))) * vv * root * root);
}

CellSummary cell_summary(const MomentTable& moments, std::size_t n) {
  if (moments.size() != n + 1 || moments[n].size() != 1) throw InvalidInput("moment table has no cell record");
  const MomentRecord& cell = moments[n][0];
  if (!cell.volume.is_rational()) throw ConsistencyError("cell volume is irrational");
  CellSummary s;
  s.n = n;
  s.volume = cell.volume.coeff();
  s.tensor = cell.u_coeff;
  s.u = s.tensor.trace();
  s.alpha = s.tensor(0, 0);
  s.beta = s.tensor(n - 1, n - 1) - s.alpha;
  s.g_exact = exact_g(s.u, s.volume, n);
  s.g = approx_g(s.u, s.volume, n);
  return s;
}

OracleMoments simplex_moments(const std::vector<QVector>& pts) {
  const std::size_t n = pts.front().size();
  if (pts.size() != n + 1) throw InvalidInput("simplex needs n+1 vertices");
  QMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = pts[r + 1][c] - pts[0][c];
  Rational vol = abs(determinant(m));
  Integer fact;
  mpz_fac_ui(fact.get_mpz_t(), n);
  vol /= Rational(fact);
  QVector sum = zero_vector(n);
  QMatrix t(n, n);
  for (const QVector& p : pts)
    for (std::size_t r = 0; r < n; ++r) {
      sum[r] += p[r];
      for (std::size_t c = 0; c < n; ++c) t(r, c) += p[r] * p[c];
    }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) t(r, c) += sum[r] * sum[c];
  const Rational f = vol / Rational(static_cast<long>((n + 1) * (n + 2)));
  return OracleMoments{vol, t * f};
}

namespace {

std::size_t affine_rank(const std::vector<std::uint32_t>& idx, const VertexSet& vs) {
  if (idx.size() <= 1) return 0;
  QMatrix m(idx.size() - 1, vs.n);
  for (std::size_t r = 1; r < idx.size(); ++r)
    for (std::size_t c = 0; c < vs.n; ++c) m(r - 1, c) = vs.coords[idx[r]][c] - vs.coords[idx[0]][c];
  return rank(m);
}

struct OracleWalk {
  const VoronoiCell& cell;
  const VertexSet& vs;
  std::vector<std::vector<std::uint32_t>> on_facet;
  std::map<std::vector<std::uint32_t>, std::vector<std::vector<std::uint32_t>>> memo;
  OracleMoments acc;

  std::vector<std::vector<std::uint32_t>> faces_below(const std::vector<std::uint32_t>& face, std::size_t d) {
    auto it = memo.find(face);
    if (it != memo.end()) return it->second;
    std::set<std::vector<std::uint32_t>> cands;
    for (const auto& fv : on_facet) {
      std::vector<std::uint32_t> inter;
      std::set_intersection(face.begin(), face.end(), fv.begin(), fv.end(), std::back_inserter(inter));
      if (inter.empty() || inter.size() == face.size()) continue;
      if (affine_rank(inter, vs) == d - 1) cands.insert(std::move(inter));
    }
    std::vector<std::vector<std::uint32_t>> out(cands.begin(), cands.end());
    memo.emplace(face, out);
    return out;
  }

  QVector centroid(const std::vector<std::uint32_t>& face) const {
    QVector c = zero_vector(vs.n);
    for (const std::uint32_t v : face) c = add(c, vs.coords[v]);
    return scale(c, Rational(1, static_cast<long>(face.size())));
  }

  void walk(const std::vector<std::uint32_t>& face, std::size_t d, std::vector<QVector>& chain) {
    chain.push_back(centroid(face));
    if (d == 0) {
      const OracleMoments s = simplex_moments(chain);
      acc.volume += s.volume;
      acc.tensor += s.tensor;
    } else {
      for (const auto& child : faces_below(face, d)) walk(child, d - 1, chain);
    }
    chain.pop_back();
  }
};

}  // namespace

OracleMoments simplex_moment_oracle(const VoronoiCell& cell, const VertexSet& vertices) {
  const std::size_t n = cell.dim();
  if (n > 5) throw ResourceError("simplex oracle is limited to dimension 5");
  OracleWalk w{cell, vertices, {}, {}, OracleMoments{Rational(0), QMatrix(n, n)}};
  for (std::uint32_t f = 0; f < cell.facets.size(); ++f) {
    std::vector<std::uint32_t> on;
    for (std::uint32_t v = 0; v < vertices.size(); ++v)
      if (dot(vertices.coords[v], cell.facets[f].normal) == cell.facets[f].rhs) on.push_back(v);
    w.on_facet.push_back(std::move(on));
  }
  std::vector<std::uint32_t> all(vertices.size());
  for (std::uint32_t v = 0; v < all.size(); ++v) all[v] = v;
  std::vector<QVector> chain;
  // The cell is centrally symmetric, so its centroid is the origin.
  for (const auto& facet : w.faces_below(all, n)) {
    chain.assign(1, zero_vector(n));
    w.walk(facet, n - 1, chain);
  }
  return std::move(w.acc);
}

// ---------------------------------------------------------------------------------------------
// Monte Carlo

namespace {

class FloatDecoder {
 public:
  explicit FloatDecoder(const GeneratorMatrix& b) : n_(b.dim()), rows_(n_ * n_), gs_(n_ * n_), norm2_(n_), mu_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) rows_[i * n_ + j] = b.rows()(i, j).get_d();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < n_; ++k) gs_[i * n_ + k] = rows_[i * n_ + k];
      for (std::size_t j = 0; j < i; ++j) {
        double m = 0;
        for (std::size_t k = 0; k < n_; ++k) m += rows_[i * n_ + k] * gs_[j * n_ + k];
        m /= norm2_[j];
        mu_[i * n_ + j] = m;
        for (std::size_t k = 0; k < n_; ++k) gs_[i * n_ + k] -= m * gs_[j * n_ + k];
      }
      double s = 0;
      for (std::size_t k = 0; k < n_; ++k) s += gs_[i * n_ + k] * gs_[i * n_ + k];
      norm2_[i] = s;
    }
  }

  /// Squared distance from x to the nearest lattice point.
  double distance2(const std::vector<double>& x) {
    t_.assign(n_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n_; ++k) s += x[k] * gs_[j * n_ + k];
      t_[j] = s / norm2_[j];
    }
    z_.assign(n_, 0);
    best_ = std::numeric_limits<double>::infinity();
    search(n_ - 1, 0.0);
    return best_;
  }

 private:
  void search(std::size_t level, double partial) {
    double c = t_[level];
    for (std::size_t i = level + 1; i < n_; ++i) c -= static_cast<double>(z_[i]) * mu_[i * n_ + level];
    const double q = norm2_[level];
    const double k0 = std::round(c);
    const double dir = c >= k0 ? 1.0 : -1.0;
    double k = k0;
    // Candidates in order of increasing |k − c|: k0, k0+dir, k0−dir, k0+2dir, ...
    for (int m = 1;; ++m) {
      const double d = k - c;
      const double next = partial + d * d * q;
      if (next >= best_) break;
      z_[level] = static_cast<long>(k);
      if (level == 0)
        best_ = next;
      else
        search(level - 1, next);
      k = (m % 2) ? k0 + dir * ((m + 1) / 2) : k0 - dir * (m / 2);
    }
  }

  std::size_t n_;
  std::vector<double> rows_, gs_, norm2_, mu_, t_;
  std::vector<long> z_;
  double best_ = 0;
};

}  // namespace

MonteCarloResult monte_carlo_g(const GeneratorMatrix& b, std::size_t samples, std::uint64_t seed, unsigned workers) {
  if (samples < 10'000) throw InvalidInput("Monte Carlo needs at least 10^4 samples");
  const std::size_t n = b.dim();
  const double vol = std::fabs(b.determinant().get_d());
  const double norm = static_cast<double>(n) * std::pow(vol, 2.0 / static_cast<double>(n));
  constexpr std::size_t kChunk = 8192;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks, 0.0), sum2(chunks, 0.0);
  std::vector<double> rows(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i * n + j] = b.rows()(i, j).get_d();
  parallel_for(chunks, workers, [&](std::size_t c) {
    FloatDecoder dec(b);
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t count = std::min(kChunk, samples - c * kChunk);
    std::vector<double> x(n);
    for (std::size_t s = 0; s < count; ++s) {
      std::fill(x.begin(), x.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = unif(rng);
        for (std::size_t j = 0; j < n; ++j) x[j] += u * rows[i * n + j];
      }
      const double f = dec.distance2(x) / norm;
      sum[c] += f;
      sum2[c] += f * f;
    }
  });
  double s = 0, s2 = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sum2[c];
  }
  const double N = static_cast<double>(samples);
  const double mean = s / N;
  const double var = std::max(0.0, s2 / N - mean * mean);
  return MonteCarloResult{mean, std::sqrt(var / N), samples};
}

}  // namespace lamiq

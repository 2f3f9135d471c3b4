#include "lamiq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lamiq/parallel.hpp"

namespace lamiq {

namespace {

QMatrix inverse_of(const QMatrix& m) {
  const std::size_t n = m.rows();
  QMatrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    QVector e = zero_vector(n);
    e[c] = 1;
    const LinearSolution s = solve_linear(m, e);
    if (s.status != LinearSolution::Status::unique) throw InvalidInput("generator matrix is singular");
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = s.x[r];
  }
  return inv;
}

Rational round_nearest(const Rational& q) {
  // floor(q + 1/2)
  Rational t = q + Rational(1, 2);
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  return Rational(f);
}

bool lex_less(const IntVector& a, const IntVector& b) { return a < b; }

}  // namespace

GeneratorMatrix::GeneratorMatrix(QMatrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols()) throw InvalidInput("generator matrix must be square and nonempty");
  det_ = lamiq::determinant(rows_);
  if (sgn(det_) == 0) throw InvalidInput("generator rows are linearly dependent");
  inverse_ = inverse_of(rows_);
}

QVector GeneratorMatrix::point(const IntVector& z) const {
  const std::size_t n = dim();
  if (z.size() != n) throw InvalidInput("coordinate vector has wrong dimension");
  QVector p = zero_vector(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] == 0) continue;
    const Rational zi(static_cast<long>(z[i]));
    for (std::size_t j = 0; j < n; ++j) p[j] += zi * rows_(i, j);
  }
  return p;
}

IntVector GeneratorMatrix::coordinates(const QVector& p) const {
  if (p.size() != dim()) throw InvalidInput("point has wrong dimension");
  const QVector z = row_times(p, inverse_);
  IntVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i].get_den() != 1 || !z[i].get_num().fits_slong_p()) return {};
    out[i] = z[i].get_num().get_si();
  }
  return out;
}

GeneratorMatrix GeneratorMatrix::scaled(const Rational& s) const { return GeneratorMatrix(rows_ * s); }

GeneratorMatrix laminate(const GeneratorMatrix& base, const QVector& offset, const Rational& a) {
  const std::size_t m = base.dim();
  if (offset.size() != m) throw InvalidInput("offset dimension does not match the base lattice");
  if (sgn(a) <= 0) throw InvalidInput("lamination height must be positive");
  QMatrix rows(m + 1, m + 1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) rows(i, j) = base.rows()(i, j);
  for (std::size_t j = 0; j < m; ++j) rows(m, j) = offset[j];
  rows(m, m) = a;
  return GeneratorMatrix(std::move(rows));
}

GeneratorMatrix LaminatedFamily::at(const Rational& a) const { return laminate(base, offset, a); }

GeneratorMatrix d8_generator() {
  QMatrix rows(8, 8);
  rows(0, 0) = 2;
  for (std::size_t i = 1; i < 8; ++i) {
    rows(i, i - 1) = 1;
    rows(i, i) = 1;
  }
  return GeneratorMatrix(std::move(rows));
}

GeneratorMatrix ae9(const Rational& a) {
  if (sgn(a) <= 0) throw InvalidInput("ae9: parameter a must be positive");
  return ae9_family().at(a);
}

LaminatedFamily ae9_family() { return LaminatedFamily{d8_generator(), QVector(8, Rational(1, 2))}; }

GeneratorMatrix cubic_generator(std::size_t n) { return GeneratorMatrix(QMatrix::identity(n)); }

LatticeEnumerator::LatticeEnumerator(const GeneratorMatrix& basis) : basis_(basis), n_(basis.dim()) {
  gs_.resize(n_);
  gs_norm2_.resize(n_);
  gs_norm2_d_.resize(n_);
  mu_d_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    QVector v = basis_.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const Rational mu = dot(basis_.row(i), gs_[j]) / gs_norm2_[j];
      mu_d_[i * n_ + j] = mu.get_d();
      if (sgn(mu) != 0)
        for (std::size_t k = 0; k < n_; ++k) v[k] -= mu * gs_[j][k];
    }
    gs_norm2_[i] = dot(v, v);
    gs_norm2_d_[i] = gs_norm2_[i].get_d();
    gs_[i] = std::move(v);
  }
}

IntVector LatticeEnumerator::babai(const QVector& x) const {
  // x = Σ t_j b*_j; peel from the last Gram-Schmidt direction.
  QVector residual = x;
  IntVector z(n_, 0);
  for (std::size_t jj = n_; jj-- > 0;) {
    const Rational t = dot(residual, gs_[jj]) / gs_norm2_[jj];
    const Rational r = round_nearest(t);
    z[jj] = r.get_num().get_si();
    if (sgn(r) != 0) {
      const QVector row = basis_.row(jj);
      for (std::size_t k = 0; k < n_; ++k) residual[k] -= r * row[k];
    }
  }
  return z;
}

namespace {

struct SearchState {
  std::size_t n;
  std::vector<double> t;
  const std::vector<double>* gs_norm2;
  const std::vector<double>* mu;
  IntVector z;
  double bound;
  Rational best;
  std::vector<LatticePoint> hits;
};

double padded(double r2) { return r2 * (1.0 + 1e-9) + 1e-9; }

void search_level(SearchState& s, std::size_t level, double partial, const std::function<void(SearchState&)>& leaf) {
  const std::size_t n = s.n;
  double c = s.t[level];
  for (std::size_t i = level + 1; i < n; ++i) c -= static_cast<double>(s.z[i]) * (*s.mu)[i * n + level];
  const double q = (*s.gs_norm2)[level];
  const double room = s.bound - partial;
  if (room < 0) return;
  const double span = std::sqrt(room / q) + 1e-9;
  const auto lo = static_cast<std::int64_t>(std::ceil(c - span));
  const auto hi = static_cast<std::int64_t>(std::floor(c + span));
  if (lo > hi) return;
  // Nearest integers first, so a shrinking radius tightens early.
  std::vector<std::int64_t> order;
  order.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    const double da = std::fabs(static_cast<double>(a) - c), db = std::fabs(static_cast<double>(b) - c);
    if (da != db) return da < db;
    return a < b;
  });
  for (const std::int64_t k : order) {
    const double d = static_cast<double>(k) - c;
    const double next = partial + d * d * q;
    if (next > s.bound) continue;
    s.z[level] = k;
    if (level == 0)
      leaf(s);
    else
      search_level(s, level - 1, next, leaf);
  }
  s.z[level] = 0;
}

}  // namespace

std::vector<LatticePoint> LatticeEnumerator::within(const QVector& x, const Rational& radius2) const {
  if (x.size() != n_) throw InvalidInput("query point has wrong dimension");
  SearchState s{n_, {}, &gs_norm2_d_, &mu_d_, IntVector(n_, 0), padded(radius2.get_d()), radius2, {}};
  s.t.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) s.t[j] = Rational(dot(x, gs_[j]) / gs_norm2_[j]).get_d();
  search_level(s, n_ - 1, 0.0, [&](SearchState& st) {
    QVector p = basis_.point(st.z);
    const QVector diff = sub(x, p);
    Rational d2 = dot(diff, diff);
    if (d2 <= radius2) st.hits.push_back(LatticePoint{st.z, std::move(p), std::move(d2)});
  });
  std::sort(s.hits.begin(), s.hits.end(), [](const LatticePoint& a, const LatticePoint& b) { return lex_less(a.coords, b.coords); });
  return std::move(s.hits);
}

std::vector<LatticePoint> LatticeEnumerator::closest(const QVector& x) const {
  if (x.size() != n_) throw InvalidInput("query point has wrong dimension");
  const IntVector z0 = babai(x);
  const QVector p0 = basis_.point(z0);
  const QVector diff0 = sub(x, p0);
  SearchState s{n_, {}, &gs_norm2_d_, &mu_d_, IntVector(n_, 0), 0.0, dot(diff0, diff0), {}};
  s.bound = padded(s.best.get_d());
  s.t.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) s.t[j] = Rational(dot(x, gs_[j]) / gs_norm2_[j]).get_d();
  search_level(s, n_ - 1, 0.0, [&](SearchState& st) {
    QVector p = basis_.point(st.z);
    const QVector diff = sub(x, p);
    Rational d2 = dot(diff, diff);
    if (d2 > st.best) return;
    if (d2 < st.best) {
      st.hits.clear();
      st.best = d2;
      st.bound = padded(d2.get_d());
    }
    st.hits.push_back(LatticePoint{st.z, std::move(p), std::move(d2)});
  });
  std::sort(s.hits.begin(), s.hits.end(), [](const LatticePoint& a, const LatticePoint& b) { return lex_less(a.coords, b.coords); });
  return std::move(s.hits);
}

std::vector<LatticePoint> closest_points(const GeneratorMatrix& b, const QVector& x) { return LatticeEnumerator(b).closest(x); }

std::vector<QVector> RelevantVectorSet::points() const {
  std::vector<QVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(v.vector);
  return out;
}

RelevantVectorSet relevant_vectors(const GeneratorMatrix& b, unsigned workers) {
  const std::size_t n = b.dim();
  if (n >= 31) throw ResourceError("relevant_vectors: dimension too large for coset enumeration");
  const GeneratorMatrix doubled = b.scaled(Rational(2));
  const LatticeEnumerator enumerator(doubled);
  const std::size_t cosets = (std::size_t{1} << n) - 1;
  std::vector<std::vector<RelevantVector>> found(cosets);
  parallel_for(cosets, workers, [&](std::size_t idx) {
    const std::size_t mask = idx + 1;
    IntVector z0(n, 0);
    for (std::size_t i = 0; i < n; ++i) z0[i] = (mask >> i) & 1U;
    const QVector v0 = b.point(z0);
    const std::vector<LatticePoint> minima = enumerator.closest(scale(v0, Rational(-1)));
    if (minima.size() != 2) return;
    for (const LatticePoint& p : minima) {
      RelevantVector r;
      r.coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) r.coords[i] = z0[i] + 2 * p.coords[i];
      r.vector = add(v0, p.point);
      r.norm2 = dot(r.vector, r.vector);
      found[idx].push_back(std::move(r));
    }
  });
  RelevantVectorSet out;
  for (auto& group : found)
    for (auto& r : group) out.vectors.push_back(std::move(r));
  std::sort(out.vectors.begin(), out.vectors.end(),
            [](const RelevantVector& a, const RelevantVector& c) { return lex_less(a.coords, c.coords); });
  return out;
}

std::vector<LatticePoint> short_vectors(const GeneratorMatrix& b, const Rational& bound) {
  std::vector<LatticePoint> pts = LatticeEnumerator(b).within(zero_vector(b.dim()), bound);
  std::erase_if(pts, [](const LatticePoint& p) { return sgn(p.distance2) == 0; });
  std::sort(pts.begin(), pts.end(), [](const LatticePoint& a, const LatticePoint& c) {
    if (a.distance2 != c.distance2) return a.distance2 < c.distance2;
    return lex_less(a.coords, c.coords);
  });
  return pts;
}

}  // namespace lamiq

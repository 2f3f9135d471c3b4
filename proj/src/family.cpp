#include "lamiq/family.hpp"

#include <algorithm>
#include <functional>

#include "lamiq/parallel.hpp"

namespace lamiq {

LatticeFamily ae9_lattice_family() { return {"ae9", ae9_family(), ae9_group()}; }

LatticeFamily stacked_z_family() {
  QMatrix base(1, 1);
  base(0, 0) = 1;
  return {"stacked-z", LaminatedFamily{GeneratorMatrix(base), {Rational(1, 2)}}, sign_group(2)};
}

namespace {

FaceLatticeOptions face_options(const PipelineOptions& opt) { return {opt.workers, opt.orbit_cap}; }

PhaseSignature signature_of(const VoronoiCell& cell, const VertexSet& vs, const FaceLattice* faces) {
  PhaseSignature s;
  s.relevant = cell.facets.size();
  s.facet_classes = point_orbits(cell.facet_action).size();
  s.vertices = vs.size();
  s.vertex_classes = vs.orbits.size();
  if (faces) {
    s.totals = faces->totals;
    for (const auto& c : faces->classes) s.class_counts.push_back(c.size());
  }
  return s;
}

Integer isqrt(const Integer& z) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
  return r;
}

// Dyadic m/2^bits next to √ν: the largest below (up = false) or smallest above.
Rational dyadic_sqrt(const Rational& nu, std::size_t bits, bool up) {
  Integer scale = 1;
  scale <<= static_cast<mp_bitcnt_t>(bits);
  const Rational scaled = nu * Rational(scale * scale);
  Integer fl = scaled.get_num() / scaled.get_den();
  Integer m = isqrt(fl);
  Rational out(m, scale);
  if (up) {
    while (out * out < nu) out += Rational(1, scale);
  } else {
    while (out * out > nu) out -= Rational(1, scale);
  }
  out.canonicalize();
  return out;
}

Rational round_dyadic(const Rational& x, std::size_t bits) {
  Integer scale = 1;
  scale <<= static_cast<mp_bitcnt_t>(bits);
  const Rational s = x * Rational(scale);
  Integer m = s.get_num() / s.get_den();
  Rational out(m, scale);
  out.canonicalize();
  return out;
}

constexpr std::size_t kGridBits = 20;

}  // namespace

PhaseSignature cheap_signature(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt) {
  const VoronoiCell cell = make_cell(fam.lattice.at(a), fam.group, opt.workers);
  const VertexSet vs = enumerate_vertices(cell, opt.vertex);
  return signature_of(cell, vs, nullptr);
}

PhaseSignature phase_signature(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt) {
  return CellModel::build(fam, a, opt, true).signature();
}

const char* to_string(InstanceStatus s) {
  switch (s) {
    case InstanceStatus::ok: return "ok";
    case InstanceStatus::facets_changed: return "facets-changed";
    case InstanceStatus::vertex_changed: return "vertex-changed";
    case InstanceStatus::volume_mismatch: return "volume-mismatch";
  }
  return "?";
}

CellModel CellModel::build(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt, bool with_faces) {
  VoronoiCell cell = make_cell(fam.lattice.at(a), fam.group, opt.workers);
  VertexEnumerationOptions vopt = opt.vertex;
  vopt.orbit_cap = opt.orbit_cap;
  VertexSet vs = enumerate_vertices(cell, vopt);
  CellModel m(fam, a, std::move(cell), std::move(vs));
  if (with_faces) {
    auto faces = std::make_shared<FaceLattice>(build_face_lattice(m.cell_, m.vertices_, face_options(opt)));
    const MomentTable moments = face_moments(*faces, m.vertices_, opt.workers);
    classify_faces(*faces, moments);
    m.faces_ = std::move(faces);
  }
  return m;
}

const FaceLattice& CellModel::faces() const {
  if (!faces_) throw InvalidInput("cell model was built without its face lattice");
  return *faces_;
}

PhaseSignature CellModel::signature() const { return signature_of(cell_, vertices_, faces_.get()); }

InstanceStatus CellModel::solve_at(const VoronoiCell& cell, VertexSet* vs) const {
  if (cell.facets.size() != cell_.facets.size()) return InstanceStatus::facets_changed;
  for (std::size_t f = 0; f < cell.facets.size(); ++f)
    if (cell.facets[f].coords != cell_.facets[f].coords) return InstanceStatus::facets_changed;
  for (const VertexOrbitInfo& o : vertices_.orbits) {
    const VertexSolution sol = solve_vertex(cell, o.basis);
    if (sol.status != VertexSolveStatus::vertex) return InstanceStatus::vertex_changed;
    if (sol.active != bit_indices(vertices_.bits.at(o.rep))) return InstanceStatus::vertex_changed;
    if (vs) vs->coords[o.rep] = sol.coords;
  }
  return InstanceStatus::ok;
}

InstanceStatus CellModel::check(const Rational& a) const {
  return solve_at(make_cell(fam_.lattice.at(a), fam_.group, 1), nullptr);
}

std::optional<CellInstance> CellModel::instantiate(const Rational& a, InstanceStatus* status, unsigned workers) const {
  auto report = [&](InstanceStatus s) {
    if (status) *status = s;
  };
  CellInstance inst{a, make_cell(fam_.lattice.at(a), fam_.group, workers), vertices_, {}, {}};
  const InstanceStatus s = solve_at(inst.cell, &inst.vertices);
  if (s != InstanceStatus::ok) {
    report(s);
    return std::nullopt;
  }
  inst.vertices.propagate(fam_.group);
  inst.moments = face_moments(faces(), inst.vertices, workers);
  inst.summary = cell_summary(inst.moments, cell_.dim());
  if (inst.summary.volume != abs(inst.cell.basis.determinant())) {
    report(InstanceStatus::volume_mismatch);
    return std::nullopt;
  }
  report(InstanceStatus::ok);
  return inst;
}

// ---------------------------------------------------------------------------------------------
// Phase detection

namespace {

struct RawBracket {
  Rational a_lo, a_hi;
  std::size_t m_lo, m_hi;
};

struct Detector {
  const LatticeFamily& fam;
  const PipelineOptions& opt;
  const DetectOptions& det;
  std::vector<CellModel> models;
  std::vector<RawBracket> raw;
  std::size_t evaluations = 0;
  bool partial = false;

  std::size_t model_at(const Rational& a) {
    models.push_back(CellModel::build(fam, a, opt, false));
    return models.size() - 1;
  }

  bool same(std::size_t m, const Rational& a) {
    ++evaluations;
    return models[m].check(a) == InstanceStatus::ok;
  }

  void bisect(Rational lo, std::size_t ml, Rational hi, std::size_t mr) {
    for (;;) {
      if (hi * hi - lo * lo <= det.tolerance || evaluations >= det.max_evaluations) {
        if (hi * hi - lo * lo > det.tolerance) partial = true;
        raw.push_back({lo, hi, ml, mr});
        return;
      }
      Rational mid = (lo + hi) / 2;
      mid.canonicalize();
      if (same(ml, mid)) {
        lo = mid;
      } else if (same(mr, mid)) {
        hi = mid;
      } else {
        const std::size_t mm = model_at(mid);
        bisect(lo, ml, mid, mm);
        bisect(mid, mm, hi, mr);
        return;
      }
    }
  }
};

}  // namespace

PhaseScan detect_phase_boundaries(const LatticeFamily& fam, const Rational& nu_lo, const Rational& nu_hi,
                                  const PipelineOptions& opt, const DetectOptions& det) {
  if (sgn(nu_lo) <= 0 || nu_hi <= nu_lo) throw InvalidInput("phase scan needs 0 < lo < hi");
  if (det.grid < 1) throw InvalidInput("phase scan grid must be positive");
  const Rational a_lo = dyadic_sqrt(nu_lo, kGridBits, true);
  const Rational a_hi = dyadic_sqrt(nu_hi, kGridBits, false);
  if (a_hi <= a_lo) throw InvalidInput("phase scan interval is too narrow");

  // Odd numerators over 2^20 keep the grid off simple rational boundaries.
  const Rational ulp(1, Integer(1) << kGridBits);
  std::vector<Rational> grid;
  for (std::size_t k = 0; k <= det.grid; ++k) {
    Rational x = round_dyadic(a_lo + (a_hi - a_lo) * Rational(static_cast<long>(k), static_cast<long>(det.grid)), kGridBits);
    Rational scaled = x / ulp;
    if (scaled.get_num() % 2 == 0) x += (k == det.grid ? -ulp : ulp);
    x = std::clamp(x, a_lo, a_hi);
    x.canonicalize();
    if (grid.empty() || x > grid.back()) grid.push_back(x);
  }

  Detector d{fam, opt, det, {}, {}, 0, false};
  std::vector<std::size_t> node_model;
  node_model.push_back(d.model_at(grid[0]));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const std::size_t prev = node_model.back();
    node_model.push_back(d.same(prev, grid[k]) ? prev : d.model_at(grid[k]));
  }
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (node_model[k] != node_model[k - 1]) d.bisect(grid[k - 1], node_model[k - 1], grid[k], node_model[k]);

  PhaseScan scan;
  scan.lo = nu_lo;
  scan.hi = nu_hi;
  scan.evaluations = d.evaluations;
  scan.partial = d.partial;
  scan.phases.push_back(d.models[node_model[0]].signature());
  scan.phase_points.push_back(d.models[node_model[0]].reference());
  for (std::size_t i = 0; i < d.raw.size(); ++i) {
    const RawBracket& r = d.raw[i];
    // A model seen only at one point is a boundary lattice, not a phase.
    if (i + 1 < d.raw.size() && r.a_hi == d.raw[i + 1].a_lo && r.m_hi == d.raw[i + 1].m_lo &&
        d.models[r.m_hi].reference() == r.a_hi) {
      const RawBracket& next = d.raw[i + 1];
      scan.brackets.push_back({r.a_lo * r.a_lo, next.a_hi * next.a_hi, r.a_hi, d.models[r.m_lo].signature(),
                               d.models[next.m_hi].signature()});
      scan.phases.push_back(d.models[next.m_hi].signature());
      scan.phase_points.push_back(d.models[next.m_hi].reference());
      ++i;
      continue;
    }
    scan.brackets.push_back({r.a_lo * r.a_lo, r.a_hi * r.a_hi, std::nullopt, d.models[r.m_lo].signature(),
                             d.models[r.m_hi].signature()});
    scan.phases.push_back(d.models[r.m_hi].signature());
    scan.phase_points.push_back(d.models[r.m_hi].reference());
  }
  return scan;
}

// ---------------------------------------------------------------------------------------------
// Reconstruction

PhaseFit reconstruct_polynomials(const LatticeFamily& fam, const Rational& nu_lo, const Rational& nu_hi,
                                 const PipelineOptions& opt, const FitOptions& fit) {
  if (sgn(nu_lo) < 0 || nu_hi <= nu_lo) throw InvalidInput("phase bracket needs 0 ≤ lo < hi");
  const std::size_t n = fam.dim();
  const std::size_t need = n + 4;
  const std::size_t total = need + fit.held_out;
  const Rational w = nu_hi - nu_lo;
  const Rational in_lo = nu_lo + w / 10, in_hi = nu_hi - w / 10;

  std::vector<Rational> as;
  for (std::size_t bits = fit.denominator_bits;; ++bits) {
    if (bits > 64) throw InvalidInput("phase bracket is too narrow to place samples");
    const Rational lo = dyadic_sqrt(in_lo, bits, true), hi = dyadic_sqrt(in_hi, bits, false);
    as.clear();
    if (hi <= lo) continue;
    for (std::size_t k = 0; k < total; ++k) {
      Rational x = round_dyadic(lo + (hi - lo) * Rational(static_cast<long>(k), static_cast<long>(total - 1)), bits);
      if (x < lo) x = lo;
      if (!as.empty() && x <= as.back()) break;
      as.push_back(x);
    }
    if (as.size() == total) break;
  }

  PhaseFit out;
  out.nu_lo = nu_lo;
  out.nu_hi = nu_hi;
  out.reference = as[total / 2];
  const CellModel model = CellModel::build(fam, out.reference, opt, true);
  out.signature = model.signature();

  std::vector<std::optional<CellSummary>> summaries(total);
  // Per-sample pipelines run single-threaded; the pool spans samples.
  parallel_for(total, opt.workers, [&](std::size_t i) {
    auto inst = model.instantiate(as[i], nullptr, 1);
    if (inst) summaries[i] = std::move(inst->summary);
  });

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < total; ++i)
    if (summaries[i]) usable.push_back(i);
  if (usable.size() < need + std::min<std::size_t>(fit.held_out, 2))
    throw PhaseContamination("too few samples share the reference phase");

  const std::size_t held = usable.size() - need;
  std::vector<bool> is_held(usable.size(), false);
  for (std::size_t h = 0; h < held; ++h) is_held[(2 * h + 1) * usable.size() / (2 * held)] = true;

  QVector x, yu, ya, yb;
  for (std::size_t j = 0; j < usable.size(); ++j) {
    const Rational& a = as[usable[j]];
    const CellSummary& s = *summaries[usable[j]];
    out.samples.push_back({a, s, is_held[j]});
    if (is_held[j]) continue;
    const Rational a3 = a * a * a;
    x.push_back(a * a);
    yu.push_back(a3 * s.u);
    ya.push_back(a3 * s.alpha);
    yb.push_back(a3 * s.beta);
  }
  out.u = interpolate(x, yu);
  out.alpha = interpolate(x, ya);
  out.beta = interpolate(x, yb);

  out.volume_slope = out.samples.front().summary.volume / out.samples.front().a;
  for (const FitSample& s : out.samples) {
    if (s.summary.volume != out.volume_slope * s.a) throw ConsistencyError("cell volume is not linear in a");
    if (!s.held_out) continue;
    const Rational nu = s.a * s.a, a3 = nu * s.a;
    if (out.u(nu) != a3 * s.summary.u || out.alpha(nu) != a3 * s.summary.alpha || out.beta(nu) != a3 * s.summary.beta)
      throw PhaseContamination("held-out sample at a = " + to_string(s.a) + " disagrees with the fit");
  }
  return out;
}

PolyNu extremum_polynomial(const PolyNu& p, std::size_t n) {
  if (p.is_zero()) throw InvalidInput("extremum polynomial of zero");
  const auto nn = static_cast<long>(n);
  const PolyNu e = p.derivative().shifted(1) * Rational(nn) - p * Rational(2 * nn + 1);
  if (e.is_zero()) throw InvalidInput("extremum condition vanishes identically");
  return primitive_part(strip_nu_power(e));
}

ApproxReal g_from_polynomial(const PolyNu& p, std::size_t n, const Rational& slope, const Rational& nu_lo,
                             const Rational& nu_hi, unsigned precision) {
  const ApproxReal nu(nu_lo, nu_hi, precision);
  const ApproxReal a = nu.sqrt();
  const ApproxReal v = a * ApproxReal(slope, precision);
  const ApproxReal r = v.root(static_cast<unsigned long>(n));
  const ApproxReal denom = a * a * a * ApproxReal(Rational(static_cast<long>(n)), precision) * v * r * r;
  return p(nu) / denom;
}

OptimumReport optimum_report(const std::vector<PhaseFit>& fits, std::size_t n, unsigned precision, const Rational& width) {
  OptimumReport rep;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const PhaseFit& f = fits[i];
    rep.extremum.push_back(extremum_polynomial(f.u, n));
    for (const RootInterval& r : isolate_roots(rep.extremum.back(), f.nu_lo, f.nu_hi)) {
      RootCandidate c;
      c.phase = i;
      c.nu = refine_root(rep.extremum.back(), r, width);
      if (sgn(c.nu.lo) <= 0) continue;
      c.a = ApproxReal(c.nu.lo, c.nu.hi, precision).sqrt();
      c.g = g_from_polynomial(f.u, n, f.volume_slope, c.nu.lo, c.nu.hi, precision);
      rep.candidates.push_back(std::move(c));
    }
  }
  for (std::size_t k = 0; k < rep.candidates.size(); ++k)
    if (!rep.best || rep.candidates[k].g.value() < rep.candidates[*rep.best].g.value())
      rep.best = k;
  if (!rep.best) return rep;

  const RootCandidate& best = rep.candidates[*rep.best];
  const PolyNu& e = rep.extremum[best.phase];
  const PolyNu& beta = fits[best.phase].beta;
  rep.isotropy = !beta.is_zero() && primitive_part(strip_nu_power(beta)) == e;
  if (best.nu.exact()) {
    rep.beta_vanishes = sgn(beta(best.nu.lo)) == 0;
  } else if (!beta.is_zero()) {
    const PolyNu g = gcd(e, beta);
    rep.beta_vanishes = g.degree() >= 1 && sturm_count(sturm_sequence(squarefree_part(g)), best.nu.lo, best.nu.hi) == 1;
  }
  return rep;
}

std::size_t root_multiplicity(const PolyNu& p, const Rational& r) {
  if (p.is_zero()) return 0;
  std::size_t k = 0;
  PolyNu q = p;
  const PolyNu lin = PolyNu::linear_root(r);
  for (;;) {
    PolyDivision d = divide(q, lin);
    if (!d.remainder.is_zero()) return k;
    q = std::move(d.quotient);
    ++k;
  }
}

namespace {

// Simplest fraction in [lo, hi] by continued fractions.
Rational simplest_between(Rational lo, Rational hi) {
  Integer fl = lo.get_num() / lo.get_den();
  if (Rational(fl) > lo) fl -= 1;
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  const Rational f = lo - Rational(fl);
  const Rational g = hi - Rational(fl);
  const Rational inner = simplest_between(Rational(1) / g, Rational(1) / f);
  Rational out = Rational(fl) + Rational(1) / inner;
  out.canonicalize();
  return out;
}

std::optional<Rational> rational_root_in(const PolyNu& p, const Rational& lo, const Rational& hi) {
  if (p.degree() < 1) return std::nullopt;
  const Rational fine(1, Integer(1) << 200);
  for (const RootInterval& r : isolate_roots(p, lo - fine, hi + fine)) {
    if (r.exact()) return r.lo;
    const RootInterval t = refine_root(p, r, fine);
    if (t.exact()) return t.lo;
    const Rational s = simplest_between(t.lo, t.hi);
    if (sgn(p(s)) == 0) return s;
  }
  return std::nullopt;
}

}  // namespace

PhaseDifference phase_difference(const PhaseFit& lo, const PhaseFit& hi, const PhaseBracket& bracket) {
  PhaseDifference d;
  d.du = hi.u - lo.u;
  d.dbeta = hi.beta - lo.beta;
  if (d.du.is_zero()) return d;
  if (bracket.special_a && sgn(d.du(*bracket.special_a * *bracket.special_a)) == 0) {
    d.boundary = *bracket.special_a * *bracket.special_a;
  } else {
    d.boundary = rational_root_in(d.du, bracket.lo, bracket.hi);
  }
  if (d.boundary) {
    d.u_order = root_multiplicity(d.du, *d.boundary);
    d.beta_order = root_multiplicity(d.dbeta, *d.boundary);
  }
  return d;
}

}  // namespace lamiq

// Acceptance suite: one PASS/FAIL line per criterion.
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamiq/family.hpp"
#include "lamiq/moments.hpp"

using namespace lamiq;

namespace {

constexpr double kDecimalTolerance = 1e-9;
constexpr double kMonteCarloSigmas = 5.0;
constexpr std::size_t kMonteCarloSamples9 = 400'000;
constexpr std::size_t kMonteCarloSamples2 = 200'000;

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

PolyNu poly(std::vector<Rational> c) { return PolyNu(std::move(c)); }

/// Polynomial in a with only odd or only even powers, given as {power, coefficient}.
Rational eval_a(const std::vector<std::pair<int, Rational>>& terms, const Rational& a) {
  Rational s = 0;
  for (const auto& [k, c] : terms) {
    Rational p = 1;
    for (int i = 0; i < std::abs(k); ++i) p *= a;
    s += k >= 0 ? Rational(c * p) : Rational(c / p);
  }
  return s;
}

/// a³·f(a) read as a polynomial in ν = a², for f with odd powers of a only.
PolyNu times_a3(const std::vector<std::pair<int, Rational>>& terms) {
  std::vector<Rational> c(16, Rational(0));
  for (const auto& [k, v] : terms) c[static_cast<std::size_t>((k + 3) / 2)] += v;
  return PolyNu(c);
}

// ---- closed forms ---------------------------------------------------------------------------

const std::vector<std::pair<int, Rational>> kU_A = {{19, q(-1, 90)}, {17, q(4, 135)}, {13, q(-8, 135)}, {9, q(28, 225)},
                                                    {5, q(-16, 45)}, {3, q(2, 3)},    {1, q(929, 810)}};
const std::vector<std::pair<int, Rational>> kAlpha_A = {{19, q(1, 90)},   {17, q(-7, 270)}, {13, q(1, 27)},
                                                        {9, q(-7, 150)},  {5, q(2, 45)},    {1, q(929, 6480)}};
const std::vector<std::pair<int, Rational>> kBeta_A = {{19, q(-1, 9)},   {17, q(71, 270)}, {13, q(-53, 135)}, {9, q(49, 90)},
                                                       {5, q(-34, 45)},  {3, q(2, 3)},     {1, q(-929, 6480)}};
const std::vector<std::pair<int, Rational>> kU_B = {
    {19, q(121, 12150)}, {17, q(-92, 1215)}, {15, q(32, 135)}, {13, q(-152, 405)}, {11, q(112, 405)}, {9, q(-28, 675)},
    {7, q(28, 405)},     {5, q(-152, 405)},  {3, q(181, 270)}, {1, q(1393, 1215)}, {-1, q(1, 48600)}};
const PolyNu kExtremum = poly({929, -4320, 4896, 0, -3528, 0, 2544, 0, -1704, 720});

constexpr double kAStar = 0.5732237949;
constexpr double kGStar = 0.0716225944;
const Rational kGHalf = q(1371514291, 19110297600L);
constexpr double kGHalfDecimal = 0.0717683376;

// ---- shared pipeline results ----------------------------------------------------------------

struct FullRun {
  Rational a;
  VoronoiCell cell;
  VertexSet vertices;
  FaceLattice faces;
  MomentTable moments;
  CellSummary summary;
};

std::unique_ptr<FullRun> full_run(const GeneratorMatrix& b, const GroupSpec& g, const Rational& a = 0) {
  VoronoiCell cell = make_cell(b, g);
  VertexSet vs = enumerate_vertices(cell);
  FaceLattice fl = build_face_lattice(cell, vs);
  MomentTable m = face_moments(fl, vs);
  classify_faces(fl, m);
  CellSummary s = cell_summary(m, b.dim());
  return std::make_unique<FullRun>(FullRun{a, std::move(cell), std::move(vs), std::move(fl), std::move(m), std::move(s)});
}

std::map<Rational, std::unique_ptr<FullRun>> g_ae9;

const FullRun& ae9_run(const Rational& a) {
  auto& slot = g_ae9[a];
  if (!slot) slot = full_run(ae9(a), ae9_group(), a);
  return *slot;
}

struct FamilyResult {
  PhaseScan scan;
  std::vector<PhaseFit> fits;
  OptimumReport report;
  std::vector<PhaseDifference> differences;
};

std::optional<FamilyResult> g_family;

const FamilyResult& ae9_family_result() {
  if (g_family) return *g_family;
  const LatticeFamily fam = ae9_lattice_family();
  FamilyResult r;
  r.scan = detect_phase_boundaries(fam, q(1, 10), q(3));
  for (std::size_t i = 0; i < r.scan.phases.size(); ++i) {
    const Rational lo = i == 0 ? r.scan.lo : r.scan.brackets[i - 1].hi;
    const Rational hi = i + 1 == r.scan.phases.size() ? r.scan.hi : r.scan.brackets[i].lo;
    r.fits.push_back(reconstruct_polynomials(fam, lo, hi));
  }
  r.report = optimum_report(r.fits, fam.dim());
  for (std::size_t i = 0; i + 1 < r.fits.size(); ++i)
    r.differences.push_back(phase_difference(r.fits[i], r.fits[i + 1], r.scan.brackets[i]));
  g_family = std::move(r);
  return *g_family;
}

// ---- reporting ------------------------------------------------------------------------------

struct Check {
  std::vector<std::string> failures;
  std::size_t count = 0;

  void operator()(bool ok, const std::string& what) {
    ++count;
    if (!ok) failures.push_back(what);
  }
};

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// ---- criteria -------------------------------------------------------------------------------

void relevant_vectors_criterion(Check& check) {
  const GroupSpec g = ae9_group();
  for (const Rational& a : {q(1, 3), q(4, 7)}) {
    const VoronoiCell cell = make_cell(ae9(a), g);
    const std::string at = " at a=" + to_string(a);
    check(cell.facets.size() == 370, "370 relevant vectors" + at);
    const auto classes = facet_classes(cell);
    check(classes.size() == 3, "three facet classes" + at);
    if (classes.size() != 3) continue;
    const QVector h(8, q(1, 2));
    QVector n1 = h, n2(9, Rational(0)), n3(9, Rational(0));
    n1.push_back(a);
    n2[0] = n2[1] = 1;
    n3[8] = 2 * a;
    const std::array<std::pair<QVector, Rational>, 3> reps = {
        {{n1, a * a + 2}, {n2, Rational(2)}, {n3, 4 * a * a}}};
    const std::array<std::size_t, 3> sizes = {256, 112, 2};
    for (std::size_t c = 0; c < 3; ++c) {
      const QVector& m = cell.facets[classes[c].front()].normal;
      check(classes[c].size() == sizes[c], "class size " + std::to_string(sizes[c]) + at);
      check(canonical_form(m, g) == canonical_form(reps[c].first, g), "class representative " + std::to_string(c + 1) + at);
      check(dot(m, m) == reps[c].second, "class norm " + std::to_string(c + 1) + at);
      for (const std::uint32_t f : classes[c]) check(dot(cell.facets[f].normal, cell.facets[f].normal) == reps[c].second, "uniform norm" + at);
    }
  }
  const VoronoiCell d = make_cell(ae9(q(3, 2)), g);
  check(d.facets.size() == 368, "368 relevant vectors at a=3/2");
  check(facet_classes(d).size() == 2, "two facet classes at a=3/2");
}

struct TableRow {
  const char* name;
  std::vector<std::string> coords;  // tokens: w, -w, 1-w, a, a/2, 0, 1, 1/2
  std::function<Rational(const Rational&)> w;
  std::function<Rational(const Rational&)> norm2;
  std::size_t size;
  std::array<std::size_t, 3> facets;
};

QVector realize(std::vector<std::string> tokens, const Rational& a, const Rational& w) {
  // rows printed with ten entries carry one extra copy of their repeated coordinate
  if (tokens.size() == 10) {
    auto it = std::find(tokens.begin(), tokens.end(), "w");
    if (it == tokens.end()) it = std::find(tokens.begin(), tokens.end(), "0");
    tokens.erase(it);
  }
  QVector v;
  for (const std::string& t : tokens) {
    if (t == "w") v.push_back(w);
    else if (t == "-w") v.push_back(-w);
    else if (t == "1-w") v.push_back(1 - w);
    else if (t == "a") v.push_back(a);
    else if (t == "a/2") v.push_back(a / 2);
    else v.push_back(parse_rational(t));
  }
  return v;
}

std::vector<TableRow> vertex_table() {
  using F = std::function<Rational(const Rational&)>;
  const F none = [](const Rational&) { return Rational(0); };
  auto sq = [](const Rational& a) { return Rational(a * a); };
  std::vector<TableRow> t;
  t.push_back({"H1", {"0", "0", "0", "0", "0", "0", "0", "0", "1", "a"}, none, [&](const Rational& a) -> Rational { return 1 + sq(a); }, 32, {0, 14, 1}});
  t.push_back({"H2", {"-w", "w", "w", "w", "w", "w", "w", "w", "1-w", "a"}, [&](const Rational& a) -> Rational { return (1 - sq(a)) / 4; },
               [&](const Rational& a) -> Rational { return 1 + sq(a) / 2 + sq(sq(a)) / 2; }, 2048, {7, 7, 1}});
  t.push_back({"H3", {"-w", "w", "w", "w", "w", "w", "w", "w", "1-w", "0"}, [&](const Rational& a) -> Rational { return (1 + sq(a)) / 4; },
               [&](const Rational& a) -> Rational { return 1 + sq(a) / 2 + sq(sq(a)) / 2; }, 1024, {14, 7, 0}});
  t.push_back({"H4", {"w", "w", "w", "w", "w", "w", "w", "w", "1-w", "a"}, [&](const Rational& a) -> Rational { return (1 - sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + 8 * sq(a) + 2 * sq(sq(a))) / 9; }, 2048, {1, 7, 1}});
  t.push_back({"H5", {"-w", "w", "w", "w", "w", "w", "w", "w", "w", "0"}, [&](const Rational& a) -> Rational { return (2 + sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + 8 * sq(a) + 2 * sq(sq(a))) / 9; }, 128, {16, 0, 0}});
  t.push_back({"H6", {"-w", "w", "w", "w", "w", "1/2", "1/2", "1/2", "0"}, [&](const Rational& a) -> Rational { return (1 + 2 * sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + 5 * sq(a) + 5 * sq(sq(a))) / 9; }, 7168, {10, 3, 0}});
  t.push_back({"H7", {"0", "0", "0", "w", "w", "w", "w", "w", "1-w", "a"}, [&](const Rational& a) -> Rational { return (1 - sq(a)) / 3; },
               [&](const Rational& a) -> Rational { return (8 + 5 * sq(a) + 5 * sq(sq(a))) / 9; }, 17920, {4, 4, 1}});
  t.push_back({"H8", {"0", "0", "0", "0", "w", "w", "w", "w", "1-w", "a"}, [&](const Rational& a) -> Rational { return (1 - sq(a)) / 2; },
               [&](const Rational& a) -> Rational { return 1 + sq(sq(a)); }, 8960, {8, 3, 1}});
  t.push_back({"H9", {"0", "0", "0", "w", "1/2", "1/2", "1/2", "1/2", "0"}, [&](const Rational& a) -> Rational { return sq(a); },
               [&](const Rational& a) -> Rational { return 1 + sq(sq(a)); }, 8960, {8, 6, 0}});
  t.push_back({"H10", {"0", "0", "0", "0", "w", "1/2", "1/2", "1/2", "a"}, [&](const Rational& a) -> Rational { return (1 - 2 * sq(a)) / 2; },
               [&](const Rational& a) -> Rational { return 1 + sq(sq(a)); }, 8960, {8, 3, 1}});
  t.push_back({"H11", {"-w", "w", "w", "w", "1/2", "1/2", "1/2", "1/2", "0"}, [&](const Rational& a) -> Rational { return sq(a) / 2; },
               [&](const Rational& a) -> Rational { return 1 + sq(sq(a)); }, 8960, {8, 6, 0}});
  t.push_back({"H12", {"-w", "w", "w", "w", "w", "1/2", "1/2", "1/2", "a"}, [&](const Rational& a) -> Rational { return (1 - 2 * sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + 4 * sq(a) + 5 * sq(sq(a))) / 9; }, 14336, {5, 3, 1}});
  t.push_back({"H13", {"0", "0", "0", "w", "w", "w", "w", "w", "1-w", "0"}, [&](const Rational& a) -> Rational { return (1 + sq(a)) / 3; },
               [&](const Rational& a) -> Rational { return (8 + 4 * sq(a) + 5 * sq(sq(a))) / 9; }, 8960, {8, 4, 0}});
  t.push_back({"H14", {"0", "0", "0", "0", "1/2", "1/2", "1/2", "1/2", "a/2"}, none, [&](const Rational& a) -> Rational { return 1 + sq(a) / 4; },
               2240, {8, 6, 0}});
  t.push_back({"H15", {"w", "w", "w", "w", "w", "w", "w", "w", "1-w", "0"}, [&](const Rational& a) -> Rational { return (1 + sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + sq(a) + 2 * sq(sq(a))) / 9; }, 1024, {2, 7, 0}});
  t.push_back({"H16", {"-w", "w", "w", "w", "w", "w", "w", "w", "w", "a"}, [&](const Rational& a) -> Rational { return (2 - sq(a)) / 6; },
               [&](const Rational& a) -> Rational { return (8 + sq(a) + 2 * sq(sq(a))) / 9; }, 256, {8, 0, 1}});
  return t;
}

std::unordered_map<QVector, std::uint32_t, QVectorHash> vertex_index(const VertexSet& vs) {
  std::unordered_map<QVector, std::uint32_t, QVectorHash> idx;
  for (std::uint32_t i = 0; i < vs.size(); ++i) idx.emplace(vs.coords[i], i);
  return idx;
}

void vertices_criterion(Check& check) {
  const Rational a = q(4, 7);
  const VoronoiCell cell = make_cell(ae9(a), ae9_group());
  const VertexSet vs = enumerate_vertices(cell);
  check(vs.size() == 93024, "93024 vertices at a=4/7, got " + std::to_string(vs.size()));
  check(vs.orbits.size() == 16, "16 vertex classes at a=4/7");
  const auto classes = facet_classes(cell);
  const auto idx = vertex_index(vs);
  std::vector<bool> seen(vs.orbits.size(), false);
  for (const TableRow& row : vertex_table()) {
    const QVector v = realize(row.coords, a, row.w(a));
    check(v.size() == 9 && dot(v, v) == row.norm2(a), std::string(row.name) + " norm");
    const auto it = idx.find(v);
    check(it != idx.end(), std::string(row.name) + " is a vertex");
    if (it == idx.end()) continue;
    const std::uint32_t o = vs.orbit_of[it->second];
    check(!seen[o], std::string(row.name) + " is a new class");
    seen[o] = true;
    check(vs.orbits[o].size == row.size, std::string(row.name) + " orbit size");
    const auto inc = incidence_counts(classes, bit_indices(vs.bits.at(it->second)));
    check(inc == std::vector<std::size_t>(row.facets.begin(), row.facets.end()), std::string(row.name) + " facet incidence");
  }

  const std::array<std::tuple<Rational, std::size_t, std::size_t>, 4> table3 = {
      {{q(1), 8160, 7}, {q(4, 5), 66144, 16}, {q(5, 4), 9344, 9}, {q(3, 2), 7266, 7}}};
  for (const auto& [b, count, orbits] : table3) {
    const VertexSet other = enumerate_vertices(make_cell(ae9(b), ae9_group()));
    check(other.size() == count, "vertex count at a=" + to_string(b) + ", got " + std::to_string(other.size()));
    check(other.orbits.size() == orbits, "vertex classes at a=" + to_string(b));
  }

  // modified representatives in the second phase
  const Rational b = q(4, 5), nu = b * b;
  const VertexSet phase_b = enumerate_vertices(make_cell(ae9(b), ae9_group()));
  const auto idx_b = vertex_index(phase_b);
  const std::vector<std::pair<std::vector<std::string>, Rational>> modified = {
      {{"-w", "w", "w", "1/2", "1/2", "1/2", "1/2", "1/2", "0"}, nu - q(1, 2)},
      {{"1-w", "w", "w", "w", "0", "0", "0", "0", "0", "a"}, 1 - nu},
      {{"0", "0", "0", "0", "0", "1/2", "1/2", "1/2", "w"}, b / 2 + 1 / (4 * b)},
      {{"0", "0", "0", "1/2", "1/2", "1/2", "1/2", "1/2", "w"}, b / 2 - 1 / (4 * b)}};
  for (std::size_t i = 0; i < modified.size(); ++i)
    check(idx_b.count(realize(modified[i].first, b, modified[i].second)) == 1,
          "modified representative " + std::to_string(i + 1) + " is a vertex at a=4/5");
}

void faces_criterion(Check& check) {
  const FullRun& r = ae9_run(q(4, 7));
  const FaceLattice& fl = r.faces;
  const std::vector<std::uint64_t> totals = {93024, 773136, 1995904, 2479680, 1693888, 652512, 134848, 12704, 370, 1};
  check(fl.totals == totals, "face totals " + join(fl.totals));
  const std::vector<std::size_t> types = {1, 12, 15, 13, 12, 10, 7, 4, 3, 1};
  const std::vector<std::vector<std::uint64_t>> columns = {
      {93024},
      {218112, 134656, 107520, 88064, 62720, 53760, 53760, 32256, 17920, 2304, 2048, 16},
      {584192, 358400, 197120, 179200, 143360, 125440, 114688, 98560, 71680, 40320, 35840, 28672, 16384, 1024, 1024},
      {645120, 501760, 369152, 250880, 215040, 150528, 89600, 71680, 67200, 50176, 50176, 11200, 7168},
      {430080, 322560, 286720, 250880, 107520, 98560, 86016, 53760, 20160, 16128, 10752, 10752},
      {358400, 89600, 80640, 50176, 35840, 17920, 8960, 8960, 1120, 896},
      {57344, 53760, 8960, 7168, 4480, 2688, 448},
      {10752, 1344, 384, 224},
      {256, 112, 2},
      {1}};
  check(fl.class_count() == 78, "78 face types, got " + std::to_string(fl.class_count()));
  for (std::size_t d = 0; d <= 9; ++d) {
    check(fl.classes[d].size() == types[d], "type count in dimension " + std::to_string(d));
    std::vector<std::uint64_t> got;
    for (const FaceClass& c : fl.classes[d]) got.push_back(c.total);
    std::sort(got.rbegin(), got.rend());
    check(got == columns[d], "type totals in dimension " + std::to_string(d) + ": " + join(got));
  }
  check(fl.euler_sum() == 2, "Euler sum");
  const auto classes = facet_classes(r.cell);
  if (classes.size() == 3) {
    check(facet_vertex_set(r.vertices, classes[2].front()).size() == 27280, "top facet vertices");
    check(facet_vertex_set(r.vertices, classes[1].front()).size() == 3484, "vertical facet vertices");
    check(facet_vertex_set(r.vertices, classes[0].front()).size() == 2454, "diagonal facet vertices");
  } else {
    check(false, "facet classes");
  }
}

void determinant_criterion(Check& check) {
  for (const Rational& a : {q(1, 3), q(4, 7), q(1, 2)}) check(ae9_run(a).summary.volume == 2 * a, "V = 2a at a=" + to_string(a));
  const FamilyResult& fr = ae9_family_result();
  check(fr.fits.size() == 4, "four phases");
  std::size_t samples = 0;
  for (const PhaseFit& f : fr.fits) {
    check(f.volume_slope == 2, "volume slope 2");
    for (const FitSample& s : f.samples) {
      ++samples;
      check(s.summary.volume == 2 * s.a, "V = 2a at sample a=" + to_string(s.a));
    }
  }
  check(samples >= 4 * 15, "samples in every phase");
}

void moments_criterion(Check& check) {
  const CellSummary& h = ae9_run(q(1, 2)).summary;
  check(h.g_exact.has_value() && *h.g_exact == kGHalf, "G at a=1/2");
  check(std::abs(h.g.value() - kGHalfDecimal) <= kDecimalTolerance, "G decimal at a=1/2");
  const Rational a = q(4, 7);
  const CellSummary& s = ae9_run(a).summary;
  check(s.u == eval_a(kU_A, a), "U at 4/7");
  check(s.alpha == eval_a(kAlpha_A, a), "alpha at 4/7");
  check(s.beta == eval_a(kBeta_A, a), "beta at 4/7");
  check(s.u == 9 * s.alpha + s.beta, "U = 9 alpha + beta");
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      if (i != j) check(s.tensor(i, j) == 0, "off-diagonal tensor entry");
      else if (i < 8) check(s.tensor(i, i) == s.alpha, "equal diagonal entry");
    }
}

void facet_formula_criterion(Check& check) {
  for (const Rational& a : {q(1, 3), q(4, 7)}) {
    const FullRun& r = ae9_run(a);
    const std::string at = " at a=" + to_string(a);
    const Rational a2 = a * a;
    auto pw = [&](int k) {
      Rational p = 1;
      for (int i = 0; i < k; ++i) p *= a;
      return p;
    };
    const RadQ v1 = radq_sqrt(a2 + 2) * RadQ(pw(15) / 64 - pw(13) / 30 + 7 * pw(9) / 180 - 7 * pw(5) / 180 + a / 30);
    const RadQ v2 = radq_sqrt(2) * RadQ(-pw(15) / 28 + 8 * pw(13) / 105 - 4 * pw(9) / 45 + 4 * pw(5) / 45 + a / 15);
    const RadQ v3(-pw(16) + 32 * pw(14) / 15 - 112 * pw(10) / 45 + 112 * pw(6) / 45 - 32 * pw(2) / 15 + 1);
    const RadQ h1 = radq_sqrt(a2 + 2) * RadQ(q(1, 2)), h2 = radq_sqrt(2) * RadQ(q(1, 2)), h3(a);

    // facet type by the norm of its normal
    auto type_of = [&](std::uint32_t orbit8) {
      const auto f = bit_indices(r.faces.orbits[8][orbit8].facets);
      const QVector& m = r.cell.facets.at(f.front()).normal;
      const Rational n2 = dot(m, m);
      return n2 == a2 + 2 ? 0 : n2 == 2 ? 1 : n2 == 4 * a2 ? 2 : 3;
    };
    const std::array<RadQ, 3> vols = {v1, v2, v3}, heights = {h1, h2, h3};
    std::array<int, 3> found = {0, 0, 0};
    for (std::uint32_t o = 0; o < r.faces.orbits[8].size(); ++o) {
      const int t = type_of(o);
      if (t > 2) {
        check(false, "unknown facet type" + at);
        continue;
      }
      ++found[t];
      check(r.moments[8][o].volume == vols[t], "facet volume of type " + std::to_string(t + 1) + at);
    }
    check(found[0] > 0 && found[1] > 0 && found[2] > 0, "all facet types present" + at);

    const FaceOrbit& top = r.faces.orbits[9][0];
    const MomentRecord& cell = r.moments[9][0];
    Rational sum = 0;
    for (std::size_t i = 0; i < top.children.size(); ++i) {
      const int t = type_of(top.children[i].orbit);
      if (t > 2) continue;
      check(cell.child_heights[i] == heights[t], "facet height of type " + std::to_string(t + 1) + at);
      const RadQ hv = heights[t] * vols[t];
      check(hv.is_rational(), "height times volume is rational" + at);
      sum += hv.coeff();
    }
    if (top.children.size() == 370) check(sum / 9 == 2 * a, "cone decomposition gives V = 2a" + at);
    else {
      // children listed per orbit: weight by orbit sizes
      Rational weighted = 0;
      for (std::size_t i = 0; i < top.children.size(); ++i) {
        const std::uint32_t o = top.children[i].orbit;
        const int t = type_of(o);
        weighted += Rational(static_cast<unsigned long>(r.faces.orbits[8][o].size)) * (heights[t] * vols[t]).coeff();
      }
      check(weighted / 9 == 2 * a, "cone decomposition gives V = 2a" + at);
    }

    const Rational v3d = a * (3 - 2 * pw(4)) / 72;
    const Rational target2 = v3d * v3d * (12 * a2 + 7);
    std::vector<std::size_t> kids;
    for (const FaceClass& c : r.faces.classes[3])
      if (c.volume2 == target2) kids.push_back(r.faces.orbits[3][c.orbits.front()].children.size());
    std::sort(kids.begin(), kids.end());
    check(kids == std::vector<std::size_t>{6, 7}, "two 3-face types share a volume, with 6 and 7 sub-faces" + at);
  }
}

void reconstruction_criterion(Check& check) {
  const FamilyResult& fr = ae9_family_result();
  const PhaseScan& sc = fr.scan;
  check(!sc.partial, "scan completed");
  check(sc.brackets.size() == 3, "three phase boundaries");
  if (sc.brackets.size() == 3) {
    const std::array<Rational, 3> at = {q(1, 2), q(1), q(2)};
    for (std::size_t i = 0; i < 3; ++i)
      check(sc.brackets[i].lo <= at[i] && at[i] <= sc.brackets[i].hi, "bracket contains " + to_string(at[i]));
  }
  const std::array<std::array<std::size_t, 4>, 4> table3 = {
      {{93024, 16, 370, 3}, {66144, 16, 370, 3}, {9344, 9, 370, 3}, {7266, 7, 368, 2}}};
  if (sc.phases.size() == 4)
    for (std::size_t i = 0; i < 4; ++i) {
      const PhaseSignature& p = sc.phases[i];
      check(p.vertices == table3[i][0] && p.vertex_classes == table3[i][1] && p.relevant == table3[i][2] &&
                p.facet_classes == table3[i][3],
            "phase " + std::to_string(i + 1) + " structure");
    }
  if (fr.fits.size() != 4) {
    check(false, "four fits");
    return;
  }
  const PhaseFit& A = fr.fits[0];
  const PhaseFit& B = fr.fits[1];
  check(A.u == times_a3(kU_A), "phase A U coefficients: " + A.u.to_string());
  check(A.alpha == times_a3(kAlpha_A), "phase A alpha coefficients: " + A.alpha.to_string());
  check(A.beta == times_a3(kBeta_A), "phase A beta coefficients: " + A.beta.to_string());
  check(B.u == times_a3(kU_B), "phase B U coefficients: " + B.u.to_string());
  for (const PhaseFit& f : fr.fits) {
    std::size_t held = 0;
    for (const FitSample& s : f.samples) {
      held += s.held_out;
      const Rational nu = s.a * s.a, a3 = nu * s.a;
      check(f.u(nu) == a3 * s.summary.u && f.alpha(nu) == a3 * s.summary.alpha && f.beta(nu) == a3 * s.summary.beta,
            "zero residual at a=" + to_string(s.a));
    }
    check(held >= 2, "held-out samples");
    check(f.u.degree() <= 9 + 3, "degree bound");
    check(f.alpha * Rational(9) + f.beta == f.u, "9 alpha + beta = U");
  }
}

void optimum_criterion(Check& check) {
  const FamilyResult& fr = ae9_family_result();
  const OptimumReport& rep = fr.report;
  check(!rep.extremum.empty() && rep.extremum.front() == kExtremum,
        "extremum polynomial: " + (rep.extremum.empty() ? std::string("none") : rep.extremum.front().to_string()));
  check(rep.best.has_value(), "optimum found");
  if (rep.best) {
    const RootCandidate& b = rep.candidates[*rep.best];
    check(b.phase == 0, "optimum in the first phase");
    check(std::abs(b.a.value() - kAStar) <= kDecimalTolerance, "a* = " + b.a.to_decimal(15));
    check(std::abs(b.g.value() - kGStar) <= kDecimalTolerance, "G* = " + b.g.to_decimal(15));
    check(b.a.error_bound() < 1e-20 && b.g.error_bound() < 1e-20, "certified enclosures");
  }
  if (!fr.fits.empty()) check(fr.fits[0].beta * Rational(-6480) == kExtremum.shifted(2), "-6480 beta/a equals the extremum polynomial");
  check(rep.isotropy, "isotropy identity");
  check(rep.beta_vanishes, "beta vanishes at the optimum");
}

void differences_criterion(Check& check) {
  const FamilyResult& fr = ae9_family_result();
  if (fr.differences.size() != 3) {
    check(false, "three phase differences");
    return;
  }
  const PolyNu nu = PolyNu::monomial(1, 1);
  const PolyNu two_nu_minus_1 = poly({-1, 2}), one_minus_nu = poly({1, -1}), nu_minus_2 = poly({-2, 1});
  // a³·(difference) with V = 2a, read in ν
  const std::array<PolyNu, 3> du = {nu * two_nu_minus_1.pow(10) * q(2, 97200),
                                    nu * one_minus_nu.pow(9) * poly({3, 2}) * q(2, 405),
                                    nu * nu_minus_2.pow(10) * q(-2, 24300)};
  const std::array<PolyNu, 3> db = {nu * two_nu_minus_1.pow(9) * poly({1, 16}) * q(2, 77760),
                                    nu * one_minus_nu.pow(8) * poly({6, 43, 32}) * q(-2, 648),
                                    nu * nu_minus_2.pow(9) * poly({1, 4}) * q(-2, 9720)};
  const std::array<Rational, 3> boundary = {q(1, 2), q(1), q(2)};
  const std::array<std::size_t, 3> u_order = {10, 9, 10}, b_order = {9, 8, 9};
  for (std::size_t i = 0; i < 3; ++i) {
    const PhaseDifference& d = fr.differences[i];
    const std::string tag = " across boundary " + std::to_string(i + 1);
    check(d.du == du[i], "U difference" + tag + ": " + d.du.to_string());
    check(d.dbeta == db[i], "beta difference" + tag + ": " + d.dbeta.to_string());
    check(d.boundary && *d.boundary == boundary[i], "rational boundary" + tag);
    check(d.u_order == u_order[i] && root_multiplicity(d.du, boundary[i]) == u_order[i], "U contact order" + tag);
    check(d.beta_order == b_order[i] && root_multiplicity(d.dbeta, boundary[i]) == b_order[i], "beta contact order" + tag);
  }
}

void oracle_criterion(Check& check) {
  auto rows = [](std::vector<QVector> r) { return GeneratorMatrix(QMatrix::from_rows(r)); };
  const std::vector<std::pair<GeneratorMatrix, GroupSpec>> lattices = {
      {cubic_generator(2), hyperoctahedral_group(2)},
      {stacked_z_family().lattice.at(q(1, 3)), sign_group(2)},
      {stacked_z_family().lattice.at(q(7, 8)), sign_group(2)},
      {rows({{1, 0}, {q(1, 3), q(5, 4)}}), central_group(2)},
      {rows({{1, 1, 0}, {1, 0, 1}, {0, 1, 1}}), hyperoctahedral_group(3)},
      {rows({{2, 0, 0}, {0, 2, 0}, {1, 1, 1}}), hyperoctahedral_group(3)},
      {rows({{3, 0, 0}, {1, 2, 0}, {q(1, 2), q(1, 3), q(5, 2)}}), central_group(3)},
      {laminate(rows({{1, 1, 0}, {1, 0, 1}, {0, 1, 1}}), {q(1, 2), q(1, 2), q(1, 2)}, q(2, 3)), central_group(4)},
      {rows({{2, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}), hyperoctahedral_group(4)},
      {rows({{2, 0, 0, 0}, {1, 3, 0, 0}, {0, 1, 2, 0}, {q(1, 2), q(1, 2), q(1, 2), q(3, 4)}}), central_group(4)},
  };
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const auto r = full_run(lattices[i].first, lattices[i].second);
    const OracleMoments o = simplex_moment_oracle(r->cell, r->vertices);
    check(o.volume == r->summary.volume && o.tensor == r->summary.tensor, "oracle agreement on lattice " + std::to_string(i + 1));
  }

  // the planar family: fitted optimum against an exact grid scan
  const LatticeFamily fam = stacked_z_family();
  const PhaseScan sc = detect_phase_boundaries(fam, q(1, 10), q(3));
  std::vector<PhaseFit> fits;
  for (std::size_t i = 0; i < sc.phases.size(); ++i) {
    const Rational lo = i == 0 ? sc.lo : sc.brackets[i - 1].hi;
    const Rational hi = i + 1 == sc.phases.size() ? sc.hi : sc.brackets[i].lo;
    fits.push_back(reconstruct_polynomials(fam, lo, hi));
  }
  const OptimumReport rep = optimum_report(fits, 2);
  check(rep.best && rep.candidates[*rep.best].nu.exact() && rep.candidates[*rep.best].nu.lo == q(3, 4), "planar optimum at nu = 3/4");
  std::size_t best = 0;
  std::vector<double> grid;
  for (int k = 24; k <= 52; ++k) {
    const auto r = full_run(fam.lattice.at(q(k, 40)), fam.group);
    grid.push_back(r->summary.g.value());
    if (grid.back() < grid[best]) best = grid.size() - 1;
  }
  const double a_lo = (24.0 + best - 1) / 40, a_hi = (24.0 + best + 1) / 40;
  check(a_lo < std::sqrt(0.75) && std::sqrt(0.75) < a_hi, "grid minimum brackets sqrt(3)/2");

  const Rational near_hex = q(13, 15);
  const auto hex = full_run(fam.lattice.at(near_hex), fam.group);
  const MonteCarloResult m2 = monte_carlo_g(fam.lattice.at(near_hex), kMonteCarloSamples2, 5);
  check(std::abs(m2.estimate - hex->summary.g.value()) <= kMonteCarloSigmas * m2.stderr_, "Monte Carlo near the planar optimum");

  const MonteCarloResult half = monte_carlo_g(ae9(q(1, 2)), kMonteCarloSamples9, 17);
  const double g_half = ApproxReal(kGHalf).value();
  check(std::abs(half.estimate - g_half) <= kMonteCarloSigmas * half.stderr_,
        "Monte Carlo at a=1/2: " + std::to_string(half.estimate) + " +- " + std::to_string(half.stderr_));
  const Rational near = q(1433, 2500);
  const FamilyResult& fr = ae9_family_result();
  const ApproxReal g_near = g_from_polynomial(fr.fits[0].u, 9, fr.fits[0].volume_slope, near * near, near * near, 128);
  const MonteCarloResult star = monte_carlo_g(ae9(near), kMonteCarloSamples9, 23);
  check(std::abs(star.estimate - g_near.value()) <= kMonteCarloSigmas * star.stderr_,
        "Monte Carlo near a*: " + std::to_string(star.estimate) + " +- " + std::to_string(star.stderr_));
}

std::string capture(const std::string& cmd, int* status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  *status = pclose(p);
  return out;
}

void determinism_criterion(Check& check) {
  const std::string cli = LAMIQ_CLI;
  const std::vector<std::string> commands = {
      "faces --group ae9 --a 4/7 --format csv",
      "vertices --group ae9 --a 4/5 --seed 9",
      "optimize --group stacked-z",
      "mc-check --group stacked-z --a 13/15 --samples 50000 --seed 4",
  };
  for (const std::string& c : commands) {
    std::string reference;
    for (const int workers : {1, 4, 8, 1}) {
      int status = 0;
      const std::string out = capture(cli + " " + c + " --workers " + std::to_string(workers) + " 2>/dev/null", &status);
      check(status == 0 && !out.empty(), "'" + c + "' runs with " + std::to_string(workers) + " workers");
      if (reference.empty()) reference = out;
      else check(out == reference, "'" + c + "' output identical with " + std::to_string(workers) + " workers");
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)(Check&)>> criteria = {
      {"relevant vectors", relevant_vectors_criterion},
      {"vertices", vertices_criterion},
      {"face lattice", faces_criterion},
      {"determinant identity", determinant_criterion},
      {"exact moments", moments_criterion},
      {"facet formulas", facet_formula_criterion},
      {"polynomial reconstruction", reconstruction_criterion},
      {"optimum", optimum_criterion},
      {"phase differences", differences_criterion},
      {"oracle equivalence", oracle_criterion},
      {"determinism", determinism_criterion},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const bool pass = check.failures.empty() && check.count > 0;
    failed += !pass;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (pass ? "PASS" : "FAIL") << " ["
              << check.count - check.failures.size() << "/" << check.count << " checks]";
    for (std::size_t k = 0; k < check.failures.size() && k < 5; ++k) std::cout << "\n    " << check.failures[k];
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

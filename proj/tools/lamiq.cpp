#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lamiq/family.hpp"
#include "lamiq/io.hpp"

using namespace lamiq;

namespace {

struct Settings {
  std::string group = "ae9";
  std::string spec;
  std::string a;
  std::string interval;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  unsigned precision = 256;
  std::string out;
  std::string format = "doc";
  std::size_t saturation = 200;
  std::size_t orbit_cap = kDefaultOrbitCap;
  std::size_t samples = 200000;
};

using Table = std::vector<std::vector<std::string>>;

struct Context {
  Settings s;
  std::string command;
  LatticeFamily fam;
  RunConfig cfg;

  PipelineOptions pipeline() const {
    PipelineOptions o;
    o.workers = s.workers;
    o.vertex.seed = s.seed;
    o.vertex.saturation = s.saturation;
    o.vertex.orbit_cap = s.orbit_cap;
    o.orbit_cap = s.orbit_cap;
    return o;
  }

  Rational a() const {
    if (s.a.empty()) throw UsageError(command + " needs --a");
    const Rational q = parse_rational(s.a);
    if (sgn(q) <= 0) throw InvalidInput("--a must be positive");
    return q;
  }

  std::pair<Rational, Rational> interval() const {
    const std::string text = s.interval.empty() ? std::string("1/10:3") : s.interval;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--interval expects lo:hi");
    const Rational lo = parse_rational(text.substr(0, colon)), hi = parse_rational(text.substr(colon + 1));
    if (sgn(lo) <= 0 || hi <= lo) throw InvalidInput("--interval needs 0 < lo < hi");
    return {lo, hi};
  }

  Json header() const { return Json{{"provenance", provenance(cfg)}}; }
};

LatticeFamily family_for(const Settings& s) {
  if (!s.spec.empty()) return load_family_spec(s.spec);
  if (s.group == "ae9") return ae9_lattice_family();
  if (s.group == "stacked-z") return stacked_z_family();
  throw UsageError("unknown lattice '" + s.group + "' (expected ae9, stacked-z or --spec FILE)");
}

void emit(const Context& ctx, const std::string& name, const Json& doc, const Table* table) {
  std::ostringstream os;
  const bool csv = ctx.s.format == "csv" && table;
  if (csv) {
    os << "# " << provenance(ctx.cfg).dump() << "\n";
    for (const auto& row : *table) write_csv_row(os, row);
  } else {
    os << doc.dump(2) << "\n";
  }
  if (ctx.s.out.empty()) {
    std::cout << os.str();
    return;
  }
  std::filesystem::create_directories(ctx.s.out);
  const auto path = std::filesystem::path(ctx.s.out) / (name + (csv ? ".csv" : ".json"));
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f << os.str();
}

std::string join(const std::vector<std::string>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::vector<std::string> strings(const QVector& v) {
  std::vector<std::string> out;
  for (const Rational& q : v) out.push_back(to_string(q));
  return out;
}

template <typename T>
std::vector<std::string> strings(const std::vector<T>& v) {
  std::vector<std::string> out;
  for (const T& x : v) out.push_back(std::to_string(x));
  return out;
}

std::string label(std::size_t d, std::size_t t) { return "F" + std::to_string(d) + "^" + std::to_string(t + 1); }

// ---------------------------------------------------------------------------------------------

void cmd_relevant(const Context& ctx) {
  const VoronoiCell cell = make_cell(ctx.fam.lattice.at(ctx.a()), ctx.fam.group, ctx.s.workers);
  const auto classes = facet_classes(cell);
  Json doc = ctx.header();
  doc["count"] = cell.facets.size();
  Table t{{"class", "index", "coords", "vector", "norm2"}};
  Json cls = Json::array();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const FacetSpec& rep = cell.facets[classes[c].front()];
    cls.push_back(Json{{"size", classes[c].size()},
                       {"representative", Json{{"coords", rep.coords}, {"vector", exact(rep.normal)}}},
                       {"norm2", dual(rep.rhs * 2)}});
    for (const std::uint32_t f : classes[c]) {
      const FacetSpec& fs = cell.facets[f];
      t.push_back({std::to_string(c + 1), std::to_string(f), join(strings(fs.coords)), join(strings(fs.normal)),
                   to_string(fs.rhs * 2)});
    }
  }
  doc["classes"] = cls;
  Json all = Json::array();
  for (const FacetSpec& fs : cell.facets) all.push_back(Json{{"coords", fs.coords}, {"vector", exact(fs.normal)}});
  doc["vectors"] = all;
  emit(ctx, "relevant-vectors", doc, &t);
}

void cmd_vertices(const Context& ctx) {
  const VoronoiCell cell = make_cell(ctx.fam.lattice.at(ctx.a()), ctx.fam.group, ctx.s.workers);
  const VertexSet vs = enumerate_vertices(cell, ctx.pipeline().vertex);
  const auto classes = facet_classes(cell);
  Json doc = ctx.header();
  doc["vertices"] = vs.size();
  std::vector<std::size_t> sizes;
  for (const auto& c : classes) sizes.push_back(c.size());
  doc["facet_class_sizes"] = sizes;
  Table t{{"class", "size", "norm2", "coordinates", "incidence"}};
  Json cls = Json::array();
  for (std::size_t i = 0; i < vs.orbits.size(); ++i) {
    const VertexOrbitInfo& o = vs.orbits[i];
    const QVector& v = vs.coords[o.rep];
    const auto inc = incidence_counts(classes, bit_indices(vs.bits.at(o.rep)));
    cls.push_back(Json{{"class", i + 1}, {"size", o.size}, {"norm2", dual(dot(v, v))}, {"representative", exact(v)},
                       {"incidence", inc}});
    t.push_back({std::to_string(i + 1), std::to_string(o.size), to_string(dot(v, v)), join(strings(v)), join(strings(inc))});
  }
  doc["classes"] = cls;
  doc["facet_vertex_counts"] = [&] {
    std::vector<std::size_t> out;
    for (const auto& c : classes) out.push_back(facet_vertex_set(vs, c.front()).size());
    return out;
  }();
  emit(ctx, "vertices", doc, &t);
}

struct FullCell {
  VoronoiCell cell;
  VertexSet vertices;
  FaceLattice faces;
  MomentTable moments;
};

FullCell full_cell(const Context& ctx) {
  const PipelineOptions opt = ctx.pipeline();
  VoronoiCell cell = make_cell(ctx.fam.lattice.at(ctx.a()), ctx.fam.group, opt.workers);
  VertexSet vs = enumerate_vertices(cell, opt.vertex);
  FaceLattice faces = build_face_lattice(cell, vs, {opt.workers, opt.orbit_cap});
  MomentTable moments = face_moments(faces, vs, opt.workers);
  classify_faces(faces, moments);
  return {std::move(cell), std::move(vs), std::move(faces), std::move(moments)};
}

Table faces_table(const FaceLattice& fl, Json& doc) {
  Table t{{"dim", "type", "total", "orbits", "vertices", "children"}};
  Json dims = Json::array();
  for (std::size_t d = 0; d <= fl.n; ++d) {
    Json cls = Json::array();
    for (std::size_t k = 0; k < fl.classes[d].size(); ++k) {
      const FaceClass& c = fl.classes[d][k];
      const std::size_t children = fl.orbits[d][c.orbits.front()].children.size();
      cls.push_back(Json{{"type", label(d, k)}, {"total", c.total}, {"orbits", c.orbits.size()},
                         {"vertices", c.vertex_count}, {"children", children}});
      t.push_back({std::to_string(d), label(d, k), std::to_string(c.total), std::to_string(c.orbits.size()),
                   std::to_string(c.vertex_count), std::to_string(children)});
    }
    dims.push_back(Json{{"dim", d}, {"total", fl.totals[d]}, {"types", fl.classes[d].size()}, {"classes", cls}});
  }
  doc["totals"] = fl.totals;
  doc["types"] = fl.class_count();
  doc["euler_sum"] = fl.euler_sum();
  doc["dimensions"] = dims;
  return t;
}

void cmd_faces(const Context& ctx) {
  const FullCell fc = full_cell(ctx);
  Json doc = ctx.header();
  const Table t = faces_table(fc.faces, doc);
  emit(ctx, "faces", doc, &t);
}

Json summary_json(const CellSummary& s) {
  Json j{{"dimension", s.n}, {"volume", dual(s.volume)}, {"U", dual(s.u)}, {"alpha", dual(s.alpha)},
         {"beta", dual(s.beta)}, {"tensor", exact(s.tensor)}};
  Json g = approx(s.g, 20);
  if (s.g_exact) g["exact"] = to_string(*s.g_exact);
  j["G"] = g;
  return j;
}

void cmd_catalog(const Context& ctx) {
  const FullCell fc = full_cell(ctx);
  Json faces = ctx.header();
  const Table t = faces_table(fc.faces, faces);
  Json cat = ctx.header();
  Json classes = Json::array();
  for (std::size_t d = 0; d <= fc.faces.n; ++d)
    for (std::size_t k = 0; k < fc.faces.classes[d].size(); ++k) {
      const FaceClass& c = fc.faces.classes[d][k];
      const std::uint32_t o = c.orbits.front();
      const MomentRecord& m = fc.moments[d][o];
      Json heights = Json::array();
      const auto& kids = fc.faces.orbits[d][o].children;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const std::size_t child_class = fc.faces.orbits[d - 1][kids[i].orbit].class_id;
        heights.push_back(Json{{"child", label(d - 1, child_class)}, {"height", dual(m.child_heights[i], ctx.s.precision)}});
      }
      classes.push_back(Json{{"type", label(d, k)},
                             {"total", c.total},
                             {"vertices", c.vertex_count},
                             {"volume", dual(m.volume, ctx.s.precision)},
                             {"centroid", exact(m.centroid)},
                             {"barycenter_offset", exact(m.offset)},
                             {"U", dual(m.u_trace(), ctx.s.precision)},
                             {"tensor", Json{{"coeff", exact(m.u_coeff)}, {"radicand", m.radicand().get_str()}}},
                             {"child_heights", heights}});
    }
  cat["classes"] = classes;
  Json summary = ctx.header();
  summary["summary"] = summary_json(cell_summary(fc.moments, fc.faces.n));
  if (ctx.s.out.empty()) {
    Json all = ctx.header();
    all["faces"] = faces;
    all["catalog"] = cat;
    all["summary"] = summary;
    std::cout << all.dump(2) << "\n";
    return;
  }
  emit(ctx, "faces", faces, &t);
  Context doc_ctx = ctx;
  doc_ctx.s.format = "doc";
  emit(doc_ctx, "catalog", cat, nullptr);
  emit(doc_ctx, "summary", summary, nullptr);
}

void cmd_g(const Context& ctx) {
  const FullCell fc = full_cell(ctx);
  const CellSummary s = cell_summary(fc.moments, fc.faces.n);
  Json doc = ctx.header();
  doc["summary"] = summary_json(s);
  Table t{{"quantity", "exact", "decimal"}};
  t.push_back({"V", to_string(s.volume), ApproxReal(s.volume).to_decimal(20)});
  t.push_back({"U", to_string(s.u), ApproxReal(s.u).to_decimal(20)});
  t.push_back({"alpha", to_string(s.alpha), ApproxReal(s.alpha).to_decimal(20)});
  t.push_back({"beta", to_string(s.beta), ApproxReal(s.beta).to_decimal(20)});
  t.push_back({"G", s.g_exact ? to_string(*s.g_exact) : "", s.g.to_decimal(20)});
  emit(ctx, "g", doc, &t);
}

PhaseScan scan(const Context& ctx) {
  const auto [lo, hi] = ctx.interval();
  return detect_phase_boundaries(ctx.fam, lo, hi, ctx.pipeline());
}

Json scan_json(const PhaseScan& sc) {
  Json br = Json::array();
  for (const PhaseBracket& b : sc.brackets) {
    Json j{{"lo", dual(b.lo)}, {"hi", dual(b.hi)}};
    if (b.special_a) j["boundary_lattice_a"] = to_string(*b.special_a);
    br.push_back(j);
  }
  Json ph = Json::array();
  for (std::size_t i = 0; i < sc.phases.size(); ++i)
    ph.push_back(Json{{"reference_a", to_string(sc.phase_points[i])}, {"signature", signature_json(sc.phases[i])}});
  return Json{{"brackets", br}, {"phases", ph}, {"evaluations", sc.evaluations}, {"partial", sc.partial}};
}

void cmd_phases(const Context& ctx) {
  const PhaseScan sc = scan(ctx);
  Json doc = ctx.header();
  doc["scan"] = scan_json(sc);
  Table t{{"phase", "nu_from", "nu_to", "vertices", "vertex_classes", "facets", "facet_classes"}};
  for (std::size_t i = 0; i < sc.phases.size(); ++i) {
    const std::string from = i == 0 ? to_string(sc.lo) : to_string(sc.brackets[i - 1].hi);
    const std::string to = i + 1 == sc.phases.size() ? to_string(sc.hi) : to_string(sc.brackets[i].lo);
    const PhaseSignature& p = sc.phases[i];
    t.push_back({std::to_string(i + 1), from, to, std::to_string(p.vertices), std::to_string(p.vertex_classes),
                 std::to_string(p.relevant), std::to_string(p.facet_classes)});
  }
  emit(ctx, "phases", doc, &t);
}

std::vector<PhaseFit> fits_for(const Context& ctx, const PhaseScan& sc) {
  std::vector<PhaseFit> fits;
  for (std::size_t i = 0; i < sc.phases.size(); ++i) {
    const Rational lo = i == 0 ? sc.lo : sc.brackets[i - 1].hi;
    const Rational hi = i + 1 == sc.phases.size() ? sc.hi : sc.brackets[i].lo;
    fits.push_back(reconstruct_polynomials(ctx.fam, lo, hi, ctx.pipeline()));
  }
  return fits;
}

Json fit_json(const PhaseFit& f) {
  Json samples = Json::array();
  for (const FitSample& s : f.samples)
    samples.push_back(Json{{"a", to_string(s.a)}, {"U", to_string(s.summary.u)}, {"held_out", s.held_out}});
  return Json{{"nu_from", to_string(f.nu_lo)},
              {"nu_to", to_string(f.nu_hi)},
              {"reference_a", to_string(f.reference)},
              {"signature", signature_json(f.signature)},
              {"volume_slope", to_string(f.volume_slope)},
              {"a3_U", poly_json(f.u)},
              {"a3_alpha", poly_json(f.alpha)},
              {"a3_beta", poly_json(f.beta)},
              {"samples", samples}};
}

void cmd_fit(const Context& ctx) {
  const PhaseScan sc = scan(ctx);
  const std::vector<PhaseFit> fits = fits_for(ctx, sc);
  Json doc = ctx.header();
  doc["scan"] = scan_json(sc);
  Json arr = Json::array();
  Table t{{"phase", "quantity", "power", "coefficient"}};
  for (std::size_t i = 0; i < fits.size(); ++i) {
    arr.push_back(fit_json(fits[i]));
    const std::pair<const char*, const PolyNu*> polys[] = {{"a3_U", &fits[i].u}, {"a3_alpha", &fits[i].alpha}, {"a3_beta", &fits[i].beta}};
    for (const auto& [name, p] : polys)
      for (std::size_t k = 0; k < p->coeffs().size(); ++k)
        if (sgn(p->coeffs()[k]) != 0) t.push_back({std::to_string(i + 1), name, std::to_string(k), to_string(p->coeffs()[k])});
  }
  doc["fits"] = arr;
  emit(ctx, "fit", doc, &t);
}

void cmd_optimize(const Context& ctx) {
  const PhaseScan sc = scan(ctx);
  const std::vector<PhaseFit> fits = fits_for(ctx, sc);
  const OptimumReport rep = optimum_report(fits, ctx.fam.dim(), ctx.s.precision);
  Json doc = ctx.header();
  doc["scan"] = scan_json(sc);
  Json ex = Json::array();
  for (const PolyNu& e : rep.extremum) ex.push_back(poly_json(e));
  doc["extremum_polynomials"] = ex;
  Json cands = Json::array();
  for (const RootCandidate& c : rep.candidates)
    cands.push_back(Json{{"phase", c.phase + 1},
                         {"nu", Json{{"lo", to_string(c.nu.lo)}, {"hi", to_string(c.nu.hi)}, {"exact", c.nu.exact()}}},
                         {"a", approx(c.a, 20)},
                         {"G", approx(c.g, 20)}});
  doc["candidates"] = cands;
  Table t{{"quantity", "value"}};
  if (rep.best) {
    const RootCandidate& b = rep.candidates[*rep.best];
    doc["optimum"] = Json{{"phase", b.phase + 1}, {"a", b.a.to_fixed(10)}, {"G", b.g.to_fixed(10)},
                          {"isotropy", rep.isotropy ? "exact-pass" : "fail"},
                          {"beta_vanishes", rep.beta_vanishes}};
    t.push_back({"a", b.a.to_fixed(10)});
    t.push_back({"G", b.g.to_fixed(10)});
    t.push_back({"isotropy", rep.isotropy ? "exact-pass" : "fail"});
  } else {
    doc["optimum"] = nullptr;
  }
  Json diffs = Json::array();
  for (std::size_t i = 0; i + 1 < fits.size(); ++i) {
    const PhaseDifference d = phase_difference(fits[i], fits[i + 1], sc.brackets[i]);
    Json j{{"phases", {i + 1, i + 2}}, {"a3_dU", poly_json(d.du)}, {"a3_dbeta", poly_json(d.dbeta)}};
    if (d.boundary) j["boundary_nu"] = to_string(*d.boundary);
    j["U_order"] = d.u_order;
    j["beta_order"] = d.beta_order;
    diffs.push_back(j);
  }
  doc["differences"] = diffs;
  emit(ctx, "optimize", doc, &t);
}

void cmd_mc(const Context& ctx) {
  const Rational a = ctx.a();
  const GeneratorMatrix b = ctx.fam.lattice.at(a);
  const MonteCarloResult mc = monte_carlo_g(b, ctx.s.samples, ctx.s.seed, ctx.s.workers);
  const FullCell fc = full_cell(ctx);
  const CellSummary s = cell_summary(fc.moments, fc.faces.n);
  const double dev = (mc.estimate - s.g.value()) / mc.stderr_;
  Json doc = ctx.header();
  doc["samples"] = mc.samples;
  doc["estimate"] = mc.estimate;
  doc["stderr"] = mc.stderr_;
  doc["exact"] = approx(s.g, 20);
  if (s.g_exact) doc["exact"]["exact"] = to_string(*s.g_exact);
  doc["deviation_sigma"] = dev;
  doc["within_5_sigma"] = std::abs(dev) <= 5;
  Table t{{"estimate", "stderr", "exact", "deviation_sigma"}};
  std::ostringstream e, se, dv;
  e.precision(12);
  se.precision(6);
  dv.precision(6);
  e << mc.estimate;
  se << mc.stderr_;
  dv << dev;
  t.push_back({e.str(), se.str(), s.g.to_decimal(15), dv.str()});
  emit(ctx, "mc-check", doc, &t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Voronoi cells, second moments and optimal parameters of laminated lattice families"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  app.add_option("--group", s.group, "builtin family: ae9 or stacked-z")->envname("LAMIQ_GROUP");
  app.add_option("--spec", s.spec, "JSON family spec file")->envname("LAMIQ_SPEC");
  app.add_option("--a", s.a, "parameter a as p/q")->envname("LAMIQ_A");
  app.add_option("--interval", s.interval, "a² range lo:hi (default 1/10:3)")->envname("LAMIQ_INTERVAL");
  app.add_option("--seed", s.seed, "seed for LP objectives and Monte Carlo")->envname("LAMIQ_SEED");
  app.add_option("--workers", s.workers, "worker threads")->envname("LAMIQ_WORKERS")->check(CLI::PositiveNumber);
  app.add_option("--precision", s.precision, "interval precision in bits")->envname("LAMIQ_PRECISION")->check(CLI::Range(64u, 1u << 16));
  app.add_option("--out", s.out, "output directory (stdout when absent)")->envname("LAMIQ_OUT");
  app.add_option("--format", s.format, "csv or doc")->envname("LAMIQ_FORMAT")->check(CLI::IsMember({"csv", "doc"}));
  app.add_option("--saturation", s.saturation, "draws without a new vertex orbit before stopping")->envname("LAMIQ_SATURATION");
  app.add_option("--orbit-cap", s.orbit_cap, "largest orbit enumerated")->envname("LAMIQ_ORBIT_CAP");
  app.add_option("--samples", s.samples, "Monte Carlo sample count")->envname("LAMIQ_SAMPLES");

  using Handler = void (*)(const Context&);
  const std::pair<const char*, Handler> commands[] = {
      {"relevant-vectors", cmd_relevant}, {"vertices", cmd_vertices}, {"faces", cmd_faces},
      {"catalog", cmd_catalog},           {"g", cmd_g},               {"phases", cmd_phases},
      {"fit", cmd_fit},                   {"optimize", cmd_optimize}, {"mc-check", cmd_mc}};
  const char* help[] = {"relevant vectors with facet classes", "vertex classes with incidence",
                        "face counts and types per dimension", "face and moment catalog",
                        "volume, second moments and G", "phase boundaries over an interval",
                        "per-phase moment polynomials", "optimal parameter and G",
                        "Monte Carlo G against the exact value"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) subs.push_back(app.add_subcommand(commands[i].first, help[i]));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : UsageError("").exit_code();
  }

  try {
    std::string command;
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) command = commands[i].first;
    ApproxReal::set_default_precision(s.precision);
    LatticeFamily fam = family_for(s);
    RunConfig cfg{command, s.spec.empty() ? s.group : fam.name, s.a, s.interval, s.seed, s.precision,
                  s.saturation, s.orbit_cap, s.format, command == "mc-check" ? s.samples : 0};
    const Context ctx{s, command, std::move(fam), std::move(cfg)};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) commands[i].second(ctx);
  } catch (const Error& e) {
    std::cerr << "lamiq: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "lamiq: " << e.what() << "\n";
    return ConsistencyError("").exit_code();
  }
  return 0;
}

#include "lamiq/io.hpp"

#include <fstream>
#include <ostream>

namespace lamiq {

namespace {

Rational rational_field(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InvalidInput("expected a rational string or integer, got " + j.dump());
}

}  // namespace

LatticeFamily parse_family_spec(const Json& doc) {
  if (!doc.is_object()) throw InvalidInput("spec must be a JSON object");
  if (!doc.contains("base_rows") || !doc["base_rows"].is_array() || doc["base_rows"].empty())
    throw InvalidInput("spec needs a nonempty base_rows array");
  const Json& rows = doc["base_rows"];
  const std::size_t m = rows.size();
  if (doc.contains("dimension") && doc["dimension"].get<std::size_t>() != m + 1)
    throw InvalidInput("spec dimension must be one more than the number of base rows");
  QMatrix base(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    if (!rows[r].is_array() || rows[r].size() != m) throw InvalidInput("base_rows must be square");
    for (std::size_t c = 0; c < m; ++c) base(r, c) = rational_field(rows[r][c]);
  }
  if (!doc.contains("offset") || !doc["offset"].is_array() || doc["offset"].size() != m)
    throw InvalidInput("offset must have one entry per base column");
  QVector offset;
  for (const Json& x : doc["offset"]) offset.push_back(rational_field(x));

  LatticeFamily fam{doc.value("name", std::string("spec")), LaminatedFamily{GeneratorMatrix(base), offset},
                    sign_group(m + 1)};
  if (doc.contains("group")) {
    const Json& g = doc["group"];
    GroupSpec spec;
    spec.name = g.value("name", fam.name);
    spec.dim = m + 1;
    if (!g.contains("generators") || !g["generators"].is_array()) throw InvalidInput("group needs generators");
    for (const Json& w : g["generators"]) {
      std::vector<int> word = w.get<std::vector<int>>();
      if (word.size() != m + 1) throw InvalidInput("group generator has the wrong length");
      spec.generators.push_back(Isometry::from_word(word));
    }
    spec.claimed_order = g.value("order", std::uint64_t{0});
    fam.group = std::move(spec);
  }
  return fam;
}

LatticeFamily load_family_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open spec file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("spec file is not valid JSON: ") + e.what());
  }
  try {
    return parse_family_spec(doc);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed spec file: ") + e.what());
  }
}

Json provenance(const RunConfig& cfg) {
  Json j;
  j["version"] = kVersion;
  j["command"] = cfg.command;
  j["lattice"] = cfg.lattice;
  if (!cfg.a.empty()) j["a"] = cfg.a;
  if (!cfg.interval.empty()) j["interval"] = cfg.interval;
  j["seed"] = cfg.seed;
  j["precision"] = cfg.precision;
  j["saturation"] = cfg.saturation;
  j["orbit_cap"] = cfg.orbit_cap;
  j["format"] = cfg.format;
  if (cfg.samples) j["samples"] = cfg.samples;
  return j;
}

Json exact(const Rational& q) { return to_string(q); }

Json exact(const RadQ& r) { return Json{{"coeff", to_string(r.coeff())}, {"radicand", r.radicand().get_str()}}; }

Json dual(const Rational& q, int digits) {
  return Json{{"exact", to_string(q)}, {"decimal", ApproxReal(q).to_decimal(digits)}};
}

Json dual(const RadQ& r, unsigned precision, int digits) {
  const ApproxReal x = ApproxReal(r.coeff(), precision) * ApproxReal(Rational(r.radicand()), precision).sqrt();
  return Json{{"exact", exact(r)}, {"decimal", x.to_decimal(digits)}, {"error", x.error_bound()}};
}

Json approx(const ApproxReal& x, int digits) { return Json{{"decimal", x.to_decimal(digits)}, {"error", x.error_bound()}}; }

Json exact(const QVector& v) {
  Json a = Json::array();
  for (const Rational& q : v) a.push_back(to_string(q));
  return a;
}

Json exact(const QMatrix& m) {
  Json a = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) a.push_back(exact(m.row(r)));
  return a;
}

Json poly_json(const PolyNu& p) { return Json{{"coefficients", p.coeff_strings()}, {"text", p.to_string()}}; }

Json signature_json(const PhaseSignature& s) {
  Json j{{"relevant_vectors", s.relevant}, {"facet_classes", s.facet_classes}, {"vertices", s.vertices}, {"vertex_classes", s.vertex_classes}};
  if (!s.cheap()) {
    j["face_totals"] = s.totals;
    j["class_counts"] = s.class_counts;
  }
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
  os << "\n";
}

}  // namespace lamiq

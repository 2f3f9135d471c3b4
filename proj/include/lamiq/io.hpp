#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamiq/approx.hpp"
#include "lamiq/exactnum.hpp"
#include "lamiq/family.hpp"
#include "lamiq/polynomial.hpp"

namespace lamiq {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "lamiq 1.0.0";

/// Spec file:
///   {"name": "...", "base_rows": [["1","0"],["1/2","1"]], "offset": ["1/2","1/2"],
///    "group": {"generators": [[-1,2,3], ...], "order": 8}}
/// Entries are rational strings or integers; generator words are signed 1-based.
/// Without "group" the family gets the coordinate sign flips.
LatticeFamily parse_family_spec(const Json& doc);
LatticeFamily load_family_spec(const std::string& path);

/// Settings that determine a run's output; worker count is deliberately absent.
struct RunConfig {
  std::string command;
  std::string lattice;
  std::string a;
  std::string interval;
  std::uint64_t seed = 1;
  unsigned precision = 256;
  std::size_t saturation = 200;
  std::size_t orbit_cap = 0;
  std::string format = "doc";
  std::size_t samples = 0;  // Monte Carlo only
};

Json provenance(const RunConfig& cfg);

Json exact(const Rational& q);
Json exact(const RadQ& r);
/// {"exact": "p/q", "decimal": "..."}
Json dual(const Rational& q, int digits = 20);
Json dual(const RadQ& r, unsigned precision, int digits = 20);
/// {"decimal": "...", "error": bound}
Json approx(const ApproxReal& x, int digits = 20);
Json exact(const QVector& v);
Json exact(const QMatrix& m);
Json poly_json(const PolyNu& p);
Json signature_json(const PhaseSignature& s);

/// Quotes fields containing separators.
std::string csv_field(const std::string& s);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace lamiq

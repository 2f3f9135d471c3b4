#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lamiq/lattice.hpp"
#include "lamiq/moments.hpp"
#include "lamiq/polynomial.hpp"
#include "lamiq/symmetry.hpp"
#include "lamiq/voronoi.hpp"

namespace lamiq {

/// A laminated family together with a group that preserves every member.
struct LatticeFamily {
  std::string name;
  LaminatedFamily lattice;
  GroupSpec group;

  std::size_t dim() const { return lattice.dim(); }
};

LatticeFamily ae9_lattice_family();
/// Rows [[1]] stacked with offset 1/2: a hexagonal lattice at a = √3/2.
LatticeFamily stacked_z_family();

struct PipelineOptions {
  unsigned workers = 1;
  VertexEnumerationOptions vertex;
  std::size_t orbit_cap = kDefaultOrbitCap;
};

struct PhaseSignature {
  std::size_t relevant = 0;
  std::size_t facet_classes = 0;
  std::size_t vertices = 0;
  std::size_t vertex_classes = 0;
  std::vector<std::uint64_t> totals;      // empty in a cheap signature
  std::vector<std::size_t> class_counts;  // per dimension

  bool cheap() const { return totals.empty(); }
  friend bool operator==(const PhaseSignature&, const PhaseSignature&) = default;
};

/// Relevant vectors and vertices only.
PhaseSignature cheap_signature(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt = {});
/// Adds face totals and class counts.
PhaseSignature phase_signature(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt = {});

struct CellInstance {
  Rational a;
  VoronoiCell cell;
  VertexSet vertices;
  MomentTable moments;
  CellSummary summary;
};

enum class InstanceStatus { ok, facets_changed, vertex_changed, volume_mismatch };
const char* to_string(InstanceStatus s);

/// Combinatorics computed once at a reference parameter, re-instantiated elsewhere in
/// the same phase by re-solving each vertex orbit's facet system.
class CellModel {
 public:
  static CellModel build(const LatticeFamily& fam, const Rational& a, const PipelineOptions& opt, bool with_faces);

  const Rational& reference() const { return a_; }
  const VoronoiCell& cell() const { return cell_; }
  const VertexSet& vertices() const { return vertices_; }
  const FaceLattice& faces() const;
  bool has_faces() const { return faces_ != nullptr; }
  PhaseSignature signature() const;

  /// Same facets and every vertex orbit keeps its exact active set.
  InstanceStatus check(const Rational& a) const;
  /// Geometry and moments at a; volume must equal |det B|. Empty unless status is ok.
  std::optional<CellInstance> instantiate(const Rational& a, InstanceStatus* status = nullptr,
                                          unsigned workers = 1) const;

 private:
  CellModel(LatticeFamily fam, Rational a, VoronoiCell cell, VertexSet vs)
      : fam_(std::move(fam)), a_(std::move(a)), cell_(std::move(cell)), vertices_(std::move(vs)) {}
  InstanceStatus solve_at(const VoronoiCell& cell, VertexSet* vs) const;

  LatticeFamily fam_;
  Rational a_;
  VoronoiCell cell_;
  VertexSet vertices_;
  std::shared_ptr<FaceLattice> faces_;
};

struct PhaseBracket {
  Rational lo;  // ν values
  Rational hi;
  /// Set when a rational boundary lattice was hit exactly (its a value).
  std::optional<Rational> special_a;
  PhaseSignature below;
  PhaseSignature above;
};

struct DetectOptions {
  std::size_t grid = 12;
  Rational tolerance{1, 1024};  // bracket width in ν
  std::size_t max_evaluations = 400;
};

struct PhaseScan {
  Rational lo;
  Rational hi;
  std::vector<PhaseBracket> brackets;
  /// Phase signatures in increasing ν, one more than brackets.
  std::vector<PhaseSignature> phases;
  /// Reference a inside each phase.
  std::vector<Rational> phase_points;
  std::size_t evaluations = 0;
  bool partial = false;
};

/// Grid sweep in a, then bisection on every signature change.
PhaseScan detect_phase_boundaries(const LatticeFamily& fam, const Rational& nu_lo, const Rational& nu_hi,
                                  const PipelineOptions& opt = {}, const DetectOptions& det = {});

struct FitSample {
  Rational a;
  CellSummary summary;
  bool held_out = false;
};

struct PhaseFit {
  Rational nu_lo;  // phase domain used for roots
  Rational nu_hi;
  Rational reference;
  PhaseSignature signature;
  std::vector<FitSample> samples;
  PolyNu u;      // a³·U as a polynomial in ν
  PolyNu alpha;  // a³·α
  PolyNu beta;   // a³·β
  Rational volume_slope;  // V = slope·a
};

struct FitOptions {
  std::size_t held_out = 3;
  std::size_t denominator_bits = 10;
};

/// Exact reconstruction from n+4 samples in the middle 80% of (nu_lo, nu_hi), checked on
/// held-out samples.
PhaseFit reconstruct_polynomials(const LatticeFamily& fam, const Rational& nu_lo, const Rational& nu_hi,
                                 const PipelineOptions& opt = {}, const FitOptions& fit = {});

/// n·ν·P′ − (2n+1)·P as a primitive integer polynomial with ν^k factors removed.
PolyNu extremum_polynomial(const PolyNu& p, std::size_t n);

/// G = P(ν) / (a³·n·(s·a)^{1+2/n}) with a = √ν, for ν in the given interval.
ApproxReal g_from_polynomial(const PolyNu& p, std::size_t n, const Rational& slope, const Rational& nu_lo,
                             const Rational& nu_hi, unsigned precision);

struct RootCandidate {
  std::size_t phase = 0;
  RootInterval nu;
  ApproxReal a{Rational(0)};
  ApproxReal g{Rational(0)};
};

struct OptimumReport {
  std::vector<PolyNu> extremum;  // per phase
  std::vector<RootCandidate> candidates;
  std::optional<std::size_t> best;  // index into candidates
  /// Primitive β polynomial equals the extremum polynomial of the optimum's phase.
  bool isotropy = false;
  /// β(ν*) = 0 exactly, via divisibility of β by the extremum polynomial.
  bool beta_vanishes = false;
};

OptimumReport optimum_report(const std::vector<PhaseFit>& fits, std::size_t n, unsigned precision = 256,
                             const Rational& width = Rational(1, Integer("1000000000000000000000000000000")));

struct PhaseDifference {
  PolyNu du;     // a³(U_hi − U_lo)
  PolyNu dbeta;  // a³(β_hi − β_lo)
  std::optional<Rational> boundary;  // rational root of du inside the bracket
  std::size_t u_order = 0;     // multiplicity of (ν − boundary) in du
  std::size_t beta_order = 0;
};

std::size_t root_multiplicity(const PolyNu& p, const Rational& r);
PhaseDifference phase_difference(const PhaseFit& lo, const PhaseFit& hi, const PhaseBracket& bracket);

}  // namespace lamiq

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pbf/tensor.hpp"

namespace pbf {

inline constexpr std::size_t kDefaultMaxAmbient = 2'000'000;

struct BuildOptions {
  std::size_t max_ambient = kDefaultMaxAmbient;
  // Test hook: drops the component-0 boson slot from the fermion Klein string
  // of the given component, breaking the mixed distinct-component statistics.
  std::optional<int> klein_fault_component;
};

// Green components of the paraparticle generators, each already dressed with
// its Klein string. Index is the component alpha in [0, p).
struct GreenComponents {
  std::vector<SparseOperator> b_plus, b_minus, f_plus, f_minus;
};

// Order-p generators b+-, f+- of the relative parabose algebra in one
// parabosonic and one parafermionic degree of freedom, realized on the
// ambient tensor space of p boson and p fermion slots.
struct ParaOperators {
  ModeLayout layout;
  SparseOperator b_plus, b_minus, f_plus, f_minus;
  SparseOperator n_b, n_f;
  GreenComponents components;

  int order() const { return layout.order(); }
  int cutoff() const { return layout.cutoff(); }
  std::size_t ambient_dim() const { return layout.ambient_dim(); }
  // Highest total boson occupation at which truncation cannot enter any
  // identity checked here.
  int safe_boson_level() const { return layout.cutoff() - 2; }
};

ParaOperators build_para_ops(int order, int cutoff, const BuildOptions& options = {});

// Max |entry| over columns whose total boson occupation is <= max_boson.
double restricted_max(const SparseOperator& op, const ModeLayout& layout, int max_boson);

Vector vacuum(const ModeLayout& layout);

struct RelationResult {
  std::string family;  // e.g. "R1" or "stat:bb"
  std::string signs;   // e.g. "(-,+,+)" or "(0,1)"
  double residual = 0.0;
  bool pass = false;
};

struct RelationReport {
  double tolerance = 0.0;
  std::vector<RelationResult> results;

  bool all_pass() const;
  double max_residual() const;
  std::vector<RelationResult> failures() const;
};

// Pairwise Green-component (anti)commutators. Exact zeros are expected, so
// the default tolerance is 0.
RelationReport check_statistics(const ParaOperators& ops, double tol = 0.0);

// Trilinear families R1..R6 over all eight sign choices, restricted to the
// truncation-safe region. Throws InvalidArgument for tol <= 0 or M < 3.
RelationReport check_trilinear(const ParaOperators& ops, double tol);

struct VacuumReport {
  int order = 0;
  double b_minus_norm = 0.0;          // ||b- |0>||
  double f_minus_norm = 0.0;          // ||f- |0>||
  Complex b_minus_b_plus{};           // <0| b- b+ |0>
  Complex f_minus_f_plus{};           // <0| f- f+ |0>
  double b_minus_f_plus_norm = 0.0;   // ||b- f+ |0>||
  double f_minus_b_plus_norm = 0.0;   // ||f- b+ |0>||

  double max_deviation() const;
  bool pass(double tol) const { return max_deviation() <= tol; }
};

VacuumReport check_vacuum(const ParaOperators& ops);

struct LadderStep {
  int level = 0;              // m or n
  double expected = 0.0;      // c_m or n(p-n+1)
  double residual = 0.0;      // ||x- (x+)^k|0> - expected (x+)^(k-1)|0>||
};

struct LadderReport {
  std::vector<LadderStep> boson;     // m = 1..M-1
  std::vector<LadderStep> fermion;   // n = 1..p
  double fermion_top_norm = 0.0;     // ||(f+)^(p+1)|0>||

  double max_residual() const;
  bool pass(double tol) const { return max_residual() <= tol; }
};

// Paraboson coefficient c_m = m (even m), m - 1 + p (odd m).
double paraboson_ladder_coefficient(int m, int order);
// Parafermion coefficient n (p - n + 1).
double parafermion_ladder_coefficient(int n, int order);

LadderReport check_ladder(const ParaOperators& ops);

struct NumberIdentityReport {
  double boson_residual = 0.0;    // N_b - (1/2{b+,b-} - p/2)
  double fermion_residual = 0.0;  // N_f - (1/2[f+,f-] + p/2)
  bool pass(double tol) const { return boson_residual <= tol && fermion_residual <= tol; }
};

NumberIdentityReport check_number_identities(const ParaOperators& ops);

}  // namespace pbf

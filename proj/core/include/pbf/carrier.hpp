#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pbf/green_ansatz.hpp"
#include "pbf/tensor.hpp"

namespace pbf {

// Joint (N_b, N_f) eigenvalue label of a carrier subspace V_{m,n}.
struct Grade {
  int m = 0;
  int n = 0;

  friend auto operator<=>(const Grade&, const Grade&) = default;
};

std::string to_string(Grade g);

// Carrier basis label (m, n, i).
struct Label {
  int m = 0;
  int n = 0;
  int i = 0;

  Grade grade() const { return {m, n}; }
  friend auto operator<=>(const Label&, const Label&) = default;
};

struct BasisVector {
  Label label;
  Vector coeffs;  // ambient coefficients

  friend bool operator==(const BasisVector&, const BasisVector&) = default;
};

// Orthonormal basis of the cyclic module generated from the vacuum by b+ and
// f+, graded by (N_b, N_f) and truncated at boson grade m_keep. Vectors are
// stored in lexicographic (m, n, i) order; that order is also the carrier
// index used by the model layer.
class CarrierBasis {
 public:
  CarrierBasis() = default;
  CarrierBasis(int order, int cutoff, int m_keep, std::size_t ambient_dim, std::vector<BasisVector> vectors);

  int order() const { return order_; }
  int cutoff() const { return cutoff_; }
  int m_keep() const { return m_keep_; }
  std::size_t ambient_dim() const { return ambient_dim_; }

  std::size_t size() const { return vectors_.size(); }
  const std::vector<BasisVector>& vectors() const { return vectors_; }
  const BasisVector& operator[](std::size_t k) const { return vectors_[k]; }

  // All grades 0 <= m <= m_keep, 0 <= n <= p in lexicographic order.
  std::vector<Grade> grades() const;
  int dim(Grade g) const;
  // Carrier index of (m, n, 0); only meaningful when dim(g) > 0.
  std::size_t offset(Grade g) const;
  std::optional<std::size_t> index_of(const Label& label) const;
  const std::map<Grade, int>& dims() const { return dims_; }

  bool contains(Grade g) const { return g.m >= 0 && g.m <= m_keep_ && g.n >= 0 && g.n <= order_; }

  friend bool operator==(const CarrierBasis&, const CarrierBasis&) = default;

 private:
  int order_ = 0;
  int cutoff_ = 0;
  int m_keep_ = 0;
  std::size_t ambient_dim_ = 0;
  std::vector<BasisVector> vectors_;
  std::map<Grade, int> dims_;
  std::map<Grade, std::size_t> offsets_;
};

inline constexpr double kDefaultRankTol = 1e-8;

// Breadth-first closure of the vacuum under b+ and f+. Grades are processed
// by (m+n, m); within a grade b+ images precede f+ images, parents ascending.
// Throws RankAmbiguityError if a candidate residual lands within a decade of
// rank_tol.
CarrierBasis extract_carrier(const ParaOperators& ops, int m_keep, double rank_tol = kDefaultRankTol);

// max |<v_i|v_j> - delta_ij|
double gram_deviation(const CarrierBasis& basis);

// Largest norm of the component of b+ v or f+ v outside the extracted span,
// over every basis vector v (b+ out of m_keep excluded).
double completeness_residual(const ParaOperators& ops, const CarrierBasis& basis);

// Largest coefficient of any basis vector on an ambient state whose
// (N_b, N_f) differs from the vector's grade.
double grading_leak(const ModeLayout& layout, const CarrierBasis& basis);

enum class Generator { BPlus, BMinus, FPlus, FMinus };

inline constexpr std::array<Generator, 4> kGenerators{Generator::BPlus, Generator::BMinus, Generator::FPlus,
                                                     Generator::FMinus};

std::string_view generator_name(Generator g);  // "b+", "b-", "f+", "f-"
std::optional<Generator> parse_generator(std::string_view name);
Grade shifted(Grade g, Generator gen);
Generator adjoint_of(Generator g);

struct OpBlock {
  Generator generator = Generator::BPlus;
  Grade source;
  Grade target;
  Eigen::MatrixXcd matrix;  // target dim x source dim
  bool boundary = false;    // touches m = m_keep

  friend bool operator==(const OpBlock& a, const OpBlock& b) {
    return a.generator == b.generator && a.source == b.source && a.target == b.target && a.boundary == b.boundary &&
           a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() && a.matrix == b.matrix;
  }
};

inline constexpr double kBlockDropTol = 1e-12;

// The four generators restricted to the carrier basis, stored blockwise.
// Absent blocks are exact zeros.
class ProjectedOps {
 public:
  ProjectedOps() = default;
  ProjectedOps(int order, int m_keep, std::map<Grade, int> dims, std::vector<OpBlock> blocks);

  int order() const { return order_; }
  int m_keep() const { return m_keep_; }
  const std::map<Grade, int>& dims() const { return dims_; }
  int dim(Grade g) const;

  // Blocks ordered by (generator, source grade).
  const std::vector<OpBlock>& blocks() const { return blocks_; }
  const OpBlock* find(Generator gen, Grade source) const;

  // Carrier-space dimension and dense matrix of a generator in carrier order.
  std::size_t total_dim() const;
  std::size_t offset(Grade g) const;
  Eigen::MatrixXcd dense(Generator gen) const;

  friend bool operator==(const ProjectedOps&, const ProjectedOps&) = default;

 private:
  int order_ = 0;
  int m_keep_ = 0;
  std::map<Grade, int> dims_;
  std::vector<OpBlock> blocks_;
  std::map<std::pair<Generator, Grade>, std::size_t> index_;
  std::map<Grade, std::size_t> offsets_;
};

// <target basis| generator |source basis> for every generator and grade.
// Throws GradingError on any matrix element above kBlockDropTol between
// grades other than the generator's designated shift.
ProjectedOps project_ops(const ParaOperators& ops, const CarrierBasis& basis);

// Max deviation of block(b- out of V_{m+1,n}) from adjoint(block(b+ into
// V_{m+1,n})), and likewise for f, over the interior.
double interior_adjoint_deviation(const ProjectedOps& projected);

struct PatternViolation {
  Grade grade;
  int expected = 0;
  int actual = 0;
};

// 1 on the edges (m = 0, n = 0, n = p), 2 in the interior.
int expected_grade_dim(Grade g, int order);

std::string dims_table(const std::map<Grade, int>& dims);
std::optional<PatternViolation> compare_pattern(const std::map<Grade, int>& dims, int order);

inline std::string dims_table(const CarrierBasis& basis) { return dims_table(basis.dims()); }
inline std::optional<PatternViolation> compare_pattern(const CarrierBasis& basis) {
  return compare_pattern(basis.dims(), basis.order());
}

}  // namespace pbf

#include "pbf/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbf/error.hpp"

namespace pbf {

std::string to_string(Grade g) { return "V(" + std::to_string(g.m) + "," + std::to_string(g.n) + ")"; }

CarrierBasis::CarrierBasis(int order, int cutoff, int m_keep, std::size_t ambient_dim,
                           std::vector<BasisVector> vectors)
    : order_(order), cutoff_(cutoff), m_keep_(m_keep), ambient_dim_(ambient_dim), vectors_(std::move(vectors)) {
  std::sort(vectors_.begin(), vectors_.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  for (auto g : grades()) dims_[g] = 0;
  for (std::size_t k = 0; k < vectors_.size(); ++k) {
    const auto& v = vectors_[k];
    const Grade g = v.label.grade();
    if (!contains(g)) throw ValidationError("carrier basis: label outside grade range at " + to_string(g));
    if (v.label.i != dims_[g])
      throw ValidationError("carrier basis: intra-grade indices of " + to_string(g) + " are not 0..d-1");
    if (v.coeffs.size() != ambient_dim_) throw ValidationError("carrier basis: vector length != ambient dimension");
    if (dims_[g] == 0) offsets_[g] = k;
    ++dims_[g];
  }
}

std::vector<Grade> CarrierBasis::grades() const {
  std::vector<Grade> out;
  for (int m = 0; m <= m_keep_; ++m)
    for (int n = 0; n <= order_; ++n) out.push_back({m, n});
  return out;
}

int CarrierBasis::dim(Grade g) const {
  auto it = dims_.find(g);
  return it == dims_.end() ? 0 : it->second;
}

std::size_t CarrierBasis::offset(Grade g) const {
  auto it = offsets_.find(g);
  if (it == offsets_.end()) throw InvalidArgument("carrier basis: no vectors in " + to_string(g));
  return it->second;
}

std::optional<std::size_t> CarrierBasis::index_of(const Label& label) const {
  const Grade g = label.grade();
  if (label.i < 0 || label.i >= dim(g)) return std::nullopt;
  return offset(g) + static_cast<std::size_t>(label.i);
}

namespace {

struct SparseView {
  std::vector<std::size_t> index;
  std::vector<Complex> value;
};

SparseView nonzeros(const Vector& v) {
  SparseView s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != Complex{}) {
      s.index.push_back(i);
      s.value.push_back(v[i]);
    }
  return s;
}

Complex inner_sparse(const SparseView& a, const Vector& b) {
  Complex sum{};
  for (std::size_t k = 0; k < a.index.size(); ++k) sum += std::conj(a.value[k]) * b[a.index[k]];
  return sum;
}

// One modified Gram-Schmidt sweep of v against `accepted`.
void mgs_pass(Vector& v, const std::vector<Vector>& accepted) {
  for (const auto& q : accepted) {
    const Complex c = inner(q, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
  }
}

}  // namespace

CarrierBasis extract_carrier(const ParaOperators& ops, int m_keep, double rank_tol) {
  if (!(rank_tol > 0.0)) throw InvalidArgument("extract_carrier: rank_tol must be > 0");
  if (m_keep < 0 || m_keep > ops.cutoff() - 1)
    throw InvalidArgument("extract_carrier: M_keep must lie in [0, M-1] = [0, " + std::to_string(ops.cutoff() - 1) +
                          "], got " + std::to_string(m_keep));
  const int p = ops.order();

  std::vector<Grade> order;
  for (int m = 0; m <= m_keep; ++m)
    for (int n = 0; n <= p; ++n) order.push_back({m, n});
  std::stable_sort(order.begin(), order.end(), [](Grade a, Grade b) {
    return a.m + a.n != b.m + b.n ? a.m + a.n < b.m + b.n : a.m < b.m;
  });

  std::map<Grade, std::vector<Vector>> accepted;
  for (Grade g : order) {
    auto& here = accepted[g];
    if (g.m == 0 && g.n == 0) {
      here.push_back(vacuum(ops.layout));
      continue;
    }
    std::vector<Vector> candidates;
    if (g.m > 0)
      for (const auto& parent : accepted[{g.m - 1, g.n}]) candidates.push_back(apply_operator(ops.b_plus, parent));
    if (g.n > 0)
      for (const auto& parent : accepted[{g.m, g.n - 1}]) candidates.push_back(apply_operator(ops.f_plus, parent));

    for (auto& cand : candidates) {
      mgs_pass(cand, here);
      mgs_pass(cand, here);
      const double r = norm(cand);
      if (r >= rank_tol / 10.0 && r <= rank_tol * 10.0) {
        std::ostringstream msg;
        msg << "extract_carrier: ambiguous rank decision in " << to_string(g) << ": candidate residual " << r
            << " within a decade of rank_tol " << rank_tol;
        throw RankAmbiguityError(msg.str());
      }
      if (r > rank_tol) {
        for (auto& x : cand) x /= r;
        here.push_back(std::move(cand));
      }
    }
  }

  std::vector<BasisVector> vectors;
  for (auto& [g, vs] : accepted)
    for (std::size_t i = 0; i < vs.size(); ++i)
      vectors.push_back({{g.m, g.n, static_cast<int>(i)}, std::move(vs[i])});
  CarrierBasis basis(p, ops.cutoff(), m_keep, ops.ambient_dim(), std::move(vectors));

  if (const double leak = grading_leak(ops.layout, basis); leak != 0.0)
    throw GradingError("extract_carrier: basis vector not an (N_b, N_f) eigenvector, leak " + std::to_string(leak));
  return basis;
}

double gram_deviation(const CarrierBasis& basis) {
  double dev = 0.0;
  std::vector<SparseView> views;
  for (const auto& v : basis.vectors()) views.push_back(nonzeros(v.coeffs));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Complex g = inner_sparse(views[i], basis[j].coeffs);
      dev = std::max(dev, std::abs(g - Complex{i == j ? 1.0 : 0.0}));
    }
  return dev;
}

double grading_leak(const ModeLayout& layout, const CarrierBasis& basis) {
  double leak = 0.0;
  for (const auto& v : basis.vectors())
    for (std::size_t idx = 0; idx < v.coeffs.size(); ++idx)
      if (v.coeffs[idx] != Complex{} &&
          (layout.total_boson(idx) != v.label.m || layout.total_fermion(idx) != v.label.n))
        leak = std::max(leak, std::abs(v.coeffs[idx]));
  return leak;
}

double completeness_residual(const ParaOperators& ops, const CarrierBasis& basis) {
  double worst = 0.0;
  std::vector<SparseView> views;
  for (const auto& v : basis.vectors()) views.push_back(nonzeros(v.coeffs));

  for (const auto& v : basis.vectors()) {
    for (Generator gen : {Generator::BPlus, Generator::FPlus}) {
      if (gen == Generator::BPlus && v.label.m == basis.m_keep()) continue;
      const auto& op = gen == Generator::BPlus ? ops.b_plus : ops.f_plus;
      Vector w = apply_operator(op, v.coeffs);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const Complex c = inner_sparse(views[k], w);
        for (std::size_t t = 0; t < views[k].index.size(); ++t) w[views[k].index[t]] -= c * views[k].value[t];
      }
      worst = std::max(worst, norm(w));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::BPlus: return "b+";
    case Generator::BMinus: return "b-";
    case Generator::FPlus: return "f+";
    case Generator::FMinus: return "f-";
  }
  return "?";
}

std::optional<Generator> parse_generator(std::string_view name) {
  for (auto g : kGenerators)
    if (generator_name(g) == name) return g;
  return std::nullopt;
}

Grade shifted(Grade g, Generator gen) {
  switch (gen) {
    case Generator::BPlus: return {g.m + 1, g.n};
    case Generator::BMinus: return {g.m - 1, g.n};
    case Generator::FPlus: return {g.m, g.n + 1};
    case Generator::FMinus: return {g.m, g.n - 1};
  }
  return g;
}

Generator adjoint_of(Generator g) {
  switch (g) {
    case Generator::BPlus: return Generator::BMinus;
    case Generator::BMinus: return Generator::BPlus;
    case Generator::FPlus: return Generator::FMinus;
    case Generator::FMinus: return Generator::FPlus;
  }
  return g;
}

ProjectedOps::ProjectedOps(int order, int m_keep, std::map<Grade, int> dims, std::vector<OpBlock> blocks)
    : order_(order), m_keep_(m_keep), dims_(std::move(dims)), blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(), [](const OpBlock& a, const OpBlock& b) {
    return a.generator != b.generator ? a.generator < b.generator : a.source < b.source;
  });
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (!index_.emplace(std::pair{b.generator, b.source}, k).second)
      throw ValidationError("projected ops: duplicate block " + std::string(generator_name(b.generator)) + " from " +
                            to_string(b.source));
  }
  std::size_t off = 0;
  for (const auto& [g, d] : dims_) {
    offsets_[g] = off;
    off += static_cast<std::size_t>(d);
  }
}

int ProjectedOps::dim(Grade g) const {
  auto it = dims_.find(g);
  return it == dims_.end() ? 0 : it->second;
}

const OpBlock* ProjectedOps::find(Generator gen, Grade source) const {
  auto it = index_.find({gen, source});
  return it == index_.end() ? nullptr : &blocks_[it->second];
}

std::size_t ProjectedOps::total_dim() const {
  std::size_t total = 0;
  for (const auto& [g, d] : dims_) total += static_cast<std::size_t>(d);
  return total;
}

std::size_t ProjectedOps::offset(Grade g) const {
  auto it = offsets_.find(g);
  if (it == offsets_.end()) throw InvalidArgument("projected ops: unknown grade " + to_string(g));
  return it->second;
}

Eigen::MatrixXcd ProjectedOps::dense(Generator gen) const {
  const auto n = static_cast<Eigen::Index>(total_dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& b : blocks_) {
    if (b.generator != gen) continue;
    out.block(static_cast<Eigen::Index>(offset(b.target)), static_cast<Eigen::Index>(offset(b.source)),
              b.matrix.rows(), b.matrix.cols()) = b.matrix;
  }
  return out;
}

ProjectedOps project_ops(const ParaOperators& ops, const CarrierBasis& basis) {
  if (basis.ambient_dim() != ops.ambient_dim() || basis.order() != ops.order())
    throw InvalidArgument("project_ops: basis was not extracted from these operators");

  std::vector<SparseView> views;
  for (const auto& v : basis.vectors()) views.push_back(nonzeros(v.coeffs));

  std::vector<OpBlock> blocks;
  for (Generator gen : kGenerators) {
    const SparseOperator& op = gen == Generator::BPlus    ? ops.b_plus
                               : gen == Generator::BMinus ? ops.b_minus
                               : gen == Generator::FPlus  ? ops.f_plus
                                                          : ops.f_minus;
    for (Grade src : basis.grades()) {
      const int ds = basis.dim(src);
      if (ds == 0) continue;
      const Grade tgt = shifted(src, gen);
      const int dt = basis.contains(tgt) ? basis.dim(tgt) : 0;
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(dt, ds);

      for (int j = 0; j < ds; ++j) {
        const Vector w = apply_operator(op, basis[basis.offset(src) + j].coeffs);
        for (std::size_t k = 0; k < basis.size(); ++k) {
          const Complex amp = inner_sparse(views[k], w);
          const Label& lk = basis[k].label;
          if (lk.grade() == tgt) {
            block(lk.i, j) = amp;
          } else if (std::abs(amp) > kBlockDropTol) {
            std::ostringstream msg;
            msg << "project_ops: " << generator_name(gen) << " has element " << std::abs(amp) << " from "
                << to_string(src) << " into " << to_string(lk.grade()) << ", expected only " << to_string(tgt);
            throw GradingError(msg.str());
          }
        }
      }
      if (dt == 0 || block.cwiseAbs().maxCoeff() < kBlockDropTol) continue;
      const bool boundary = src.m == basis.m_keep() || tgt.m == basis.m_keep();
      blocks.push_back({gen, src, tgt, std::move(block), boundary});
    }
  }
  return ProjectedOps(basis.order(), basis.m_keep(), basis.dims(), std::move(blocks));
}

double interior_adjoint_deviation(const ProjectedOps& projected) {
  double dev = 0.0;
  auto block_or_zero = [&](Generator gen, Grade src) -> Eigen::MatrixXcd {
    if (const auto* b = projected.find(gen, src)) return b->matrix;
    const Grade tgt = shifted(src, gen);
    return Eigen::MatrixXcd::Zero(projected.dim(tgt), projected.dim(src));
  };
  for (const auto& [g, d] : projected.dims()) {
    if (d == 0) continue;
    for (Generator up : {Generator::BPlus, Generator::FPlus}) {
      const Grade tgt = shifted(g, up);
      if (projected.dim(tgt) == 0) continue;
      const Eigen::MatrixXcd raise = block_or_zero(up, g);
      const Eigen::MatrixXcd lower = block_or_zero(adjoint_of(up), tgt);
      if (raise.size() == 0) continue;
      dev = std::max(dev, (lower - raise.adjoint()).cwiseAbs().maxCoeff());
    }
  }
  return dev;
}

int expected_grade_dim(Grade g, int order) {
  if (g.m < 0 || g.n < 0 || g.n > order) return 0;
  if (g.m == 0 || g.n == 0 || g.n == order) return 1;
  return 2;
}

std::string dims_table(const std::map<Grade, int>& dims) {
  std::ostringstream out;
  out << "m n d\n";
  for (const auto& [g, d] : dims) out << g.m << ' ' << g.n << ' ' << d << '\n';
  return out.str();
}

std::optional<PatternViolation> compare_pattern(const std::map<Grade, int>& dims, int order) {
  int m_max = 0;
  for (const auto& [g, d] : dims) m_max = std::max(m_max, g.m);
  for (int m = 0; m <= m_max; ++m)
    for (int n = 0; n <= order; ++n) {
      const Grade g{m, n};
      const auto it = dims.find(g);
      const int d = it == dims.end() ? 0 : it->second;
      const int e = expected_grade_dim(g, order);
      if (d != e) return PatternViolation{g, e, d};
    }
  for (const auto& [g, d] : dims)
    if (!(g.m >= 0 && g.n >= 0 && g.n <= order) && d != 0) return PatternViolation{g, 0, d};
  return std::nullopt;
}

}  // namespace pbf

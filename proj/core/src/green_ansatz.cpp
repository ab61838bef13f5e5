#include "pbf/green_ansatz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pbf/error.hpp"

namespace pbf {

ParaOperators build_para_ops(int order, int cutoff, const BuildOptions& options) {
  if (order < 1) throw InvalidArgument("build_para_ops: p must be >= 1, got " + std::to_string(order));
  if (cutoff < 2) throw InvalidArgument("build_para_ops: M must be >= 2, got " + std::to_string(cutoff));
  const std::size_t dim = ModeLayout::ambient_dim_for(order, cutoff);
  if (dim > options.max_ambient) {
    std::ostringstream msg;
    msg << "build_para_ops: ambient dimension (M+1)^p 2^p = " << (cutoff + 1) << "^" << order << " * 2^" << order
        << " = " << dim << " exceeds ceiling " << options.max_ambient;
    throw ResourceLimitError(msg.str());
  }
  if (options.klein_fault_component && (*options.klein_fault_component < 1 || *options.klein_fault_component >= order))
    throw InvalidArgument("klein fault component must lie in [1, p)");

  ModeLayout layout(order, cutoff);
  const auto boson = make_boson_mode(cutoff);
  const auto fermion = make_fermion_mode();

  GreenComponents comps;
  for (int alpha = 0; alpha < order; ++alpha) {
    // Boson strings run over every slot of the preceding components; fermion
    // strings over their boson slots only.
    std::vector<int> boson_string, fermion_string;
    for (int gamma = 0; gamma < alpha; ++gamma) {
      boson_string.push_back(layout.boson_slot(gamma));
      boson_string.push_back(layout.fermion_slot(gamma));
      if (!(options.klein_fault_component == alpha && gamma == 0))
        fermion_string.push_back(layout.boson_slot(gamma));
    }
    const auto kb = parity_string(boson_string, layout);
    const auto kf = parity_string(fermion_string, layout);
    const int bs = layout.boson_slot(alpha);
    const int fs = layout.fermion_slot(alpha);
    comps.b_plus.push_back(kb * embed(boson.raise, bs, layout));
    comps.b_minus.push_back(kb * embed(boson.lower, bs, layout));
    comps.f_plus.push_back(kf * embed(fermion.raise, fs, layout));
    comps.f_minus.push_back(kf * embed(fermion.lower, fs, layout));
  }

  auto sum = [&](const std::vector<SparseOperator>& terms) {
    SparseOperator total(dim);
    for (const auto& t : terms) total = total + t;
    return total;
  };

  Vector nb(dim), nf(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    nb[i] = layout.total_boson(i);
    nf[i] = layout.total_fermion(i);
  }

  ParaOperators ops{layout,
                    sum(comps.b_plus),
                    sum(comps.b_minus),
                    sum(comps.f_plus),
                    sum(comps.f_minus),
                    SparseOperator::diagonal(nb),
                    SparseOperator::diagonal(nf),
                    std::move(comps)};
  return ops;
}

double restricted_max(const SparseOperator& op, const ModeLayout& layout, int max_boson) {
  double m = 0.0;
  for (const auto& e : op.entries())
    if (layout.total_boson(e.col) <= max_boson) m = std::max(m, std::abs(e.value));
  return m;
}

Vector vacuum(const ModeLayout& layout) {
  Vector v(layout.ambient_dim());
  v[0] = 1.0;  // all occupations zero
  return v;
}

bool RelationReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

double RelationReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : results) m = std::max(m, r.residual);
  return m;
}

std::vector<RelationResult> RelationReport::failures() const {
  std::vector<RelationResult> out;
  std::copy_if(results.begin(), results.end(), std::back_inserter(out), [](const auto& r) { return !r.pass; });
  return out;
}

RelationReport check_statistics(const ParaOperators& ops, double tol) {
  RelationReport report{tol, {}};
  const auto& c = ops.components;
  const int p = ops.order();

  auto record = [&](const std::string& family, int a, int b, double residual) {
    report.results.push_back({family, "(" + std::to_string(a) + "," + std::to_string(b) + ")", residual,
                              residual <= tol});
  };
  // Worst residual over all sign pairs of the two component operators.
  auto worst = [](const std::array<const SparseOperator*, 2>& x, const std::array<const SparseOperator*, 2>& y,
                  bool anti) {
    double m = 0.0;
    for (auto* u : x)
      for (auto* v : y) m = std::max(m, max_abs_entry(anti ? anticommutator(*u, *v) : commutator(*u, *v)));
    return m;
  };

  for (int a = 0; a < p; ++a) {
    const std::array<const SparseOperator*, 2> ba{&c.b_plus[a], &c.b_minus[a]};
    const std::array<const SparseOperator*, 2> fa{&c.f_plus[a], &c.f_minus[a]};
    record("stat:bf-same", a, a, worst(ba, fa, false));
    for (int b = a + 1; b < p; ++b) {
      const std::array<const SparseOperator*, 2> bb{&c.b_plus[b], &c.b_minus[b]};
      const std::array<const SparseOperator*, 2> fb{&c.f_plus[b], &c.f_minus[b]};
      record("stat:bb", a, b, worst(ba, bb, true));
      record("stat:ff", a, b, worst(fa, fb, false));
      record("stat:bf", a, b, worst(ba, fb, true));
      record("stat:fb", a, b, worst(fa, bb, true));
    }
  }
  return report;
}

RelationReport check_trilinear(const ParaOperators& ops, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("check_trilinear: tolerance must be > 0");
  if (ops.cutoff() < 3) throw InvalidArgument("check_trilinear: needs M >= 3");

  const int safe = ops.safe_boson_level();
  const std::array<int, 2> signs{+1, -1};
  auto b = [&](int s) -> const SparseOperator& { return s > 0 ? ops.b_plus : ops.b_minus; };
  auto f = [&](int s) -> const SparseOperator& { return s > 0 ? ops.f_plus : ops.f_minus; };
  auto idx = [](int s) { return s > 0 ? 0 : 1; };

  // Bilinears indexed by [xi][eta].
  std::array<std::array<SparseOperator, 2>, 2> bb, ff, bf;
  for (int xi : signs)
    for (int eta : signs) {
      bb[idx(xi)][idx(eta)] = anticommutator(b(xi), b(eta));
      ff[idx(xi)][idx(eta)] = commutator(f(xi), f(eta));
      bf[idx(xi)][idx(eta)] = anticommutator(b(xi), f(eta));
    }

  RelationReport report{tol, {}};
  auto sign_label = [](int xi, int eta, int eps) {
    auto ch = [](int s) { return s > 0 ? '+' : '-'; };
    return std::string{'(', ch(xi), ',', ch(eta), ',', ch(eps), ')'};
  };
  auto record = [&](const char* family, int xi, int eta, int eps, const SparseOperator& lhs,
                    const SparseOperator& rhs) {
    const double r = restricted_max(lhs - rhs, ops.layout, safe);
    report.results.push_back({family, sign_label(xi, eta, eps), r, r <= tol});
  };

  const SparseOperator zero(ops.ambient_dim());
  for (int xi : signs)
    for (int eta : signs)
      for (int eps : signs) {
        const double half_eta = (eps - eta) * (eps - eta) / 2.0;
        const double half_xi = (eps - xi) * (eps - xi) / 2.0;
        const auto& Bxe = bb[idx(xi)][idx(eta)];
        const auto& Fxe = ff[idx(xi)][idx(eta)];
        const auto& BFxe = bf[idx(xi)][idx(eta)];

        record("R1", xi, eta, eps, commutator(Bxe, b(eps)),
               scale(b(eta), static_cast<double>(eps - xi)) + scale(b(xi), static_cast<double>(eps - eta)));
        record("R2", xi, eta, eps, commutator(Fxe, f(eps)), scale(f(xi), half_eta) - scale(f(eta), half_xi));
        record("R3", xi, eta, eps, commutator(Bxe, f(eps)), zero);
        record("R4", xi, eta, eps, commutator(Fxe, b(eps)), zero);
        record("R5", xi, eta, eps, commutator(BFxe, b(eps)), scale(f(eta), static_cast<double>(eps - xi)));
        record("R6", xi, eta, eps, anticommutator(BFxe, f(eps)), scale(b(xi), half_eta));
      }
  return report;
}

double VacuumReport::max_deviation() const {
  const double p = order;
  return std::max({b_minus_norm, f_minus_norm, std::abs(b_minus_b_plus - Complex{p}),
                   std::abs(f_minus_f_plus - Complex{p}), b_minus_f_plus_norm, f_minus_b_plus_norm});
}

VacuumReport check_vacuum(const ParaOperators& ops) {
  const auto vac = vacuum(ops.layout);
  VacuumReport r;
  r.order = ops.order();
  r.b_minus_norm = norm(apply_operator(ops.b_minus, vac));
  r.f_minus_norm = norm(apply_operator(ops.f_minus, vac));
  r.b_minus_b_plus = inner(vac, apply_operator(ops.b_minus, apply_operator(ops.b_plus, vac)));
  r.f_minus_f_plus = inner(vac, apply_operator(ops.f_minus, apply_operator(ops.f_plus, vac)));
  r.b_minus_f_plus_norm = norm(apply_operator(ops.b_minus, apply_operator(ops.f_plus, vac)));
  r.f_minus_b_plus_norm = norm(apply_operator(ops.f_minus, apply_operator(ops.b_plus, vac)));
  return r;
}

double paraboson_ladder_coefficient(int m, int order) {
  return (m % 2 == 0) ? static_cast<double>(m) : static_cast<double>(m - 1 + order);
}

double parafermion_ladder_coefficient(int n, int order) { return static_cast<double>(n) * (order - n + 1); }

double LadderReport::max_residual() const {
  double m = fermion_top_norm;
  for (const auto& s : boson) m = std::max(m, s.residual);
  for (const auto& s : fermion) m = std::max(m, s.residual);
  return m;
}

namespace {

double ladder_residual(const SparseOperator& lower, const Vector& current, const Vector& previous,
                       double expected) {
  auto lhs = apply_operator(lower, current);
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= expected * previous[i];
  return norm(lhs);
}

}  // namespace

LadderReport check_ladder(const ParaOperators& ops) {
  const int p = ops.order();
  LadderReport report;

  Vector prev = vacuum(ops.layout);
  for (int m = 1; m <= ops.cutoff() - 1; ++m) {
    Vector cur = apply_operator(ops.b_plus, prev);
    const double c = paraboson_ladder_coefficient(m, p);
    report.boson.push_back({m, c, ladder_residual(ops.b_minus, cur, prev, c)});
    prev = std::move(cur);
  }

  prev = vacuum(ops.layout);
  for (int n = 1; n <= p; ++n) {
    Vector cur = apply_operator(ops.f_plus, prev);
    const double c = parafermion_ladder_coefficient(n, p);
    report.fermion.push_back({n, c, ladder_residual(ops.f_minus, cur, prev, c)});
    prev = std::move(cur);
  }
  report.fermion_top_norm = norm(apply_operator(ops.f_plus, prev));
  return report;
}

NumberIdentityReport check_number_identities(const ParaOperators& ops) {
  const double p = ops.order();
  const auto id = SparseOperator::identity(ops.ambient_dim());
  const auto nb = scale(anticommutator(ops.b_plus, ops.b_minus), 0.5) - scale(id, p / 2.0);
  const auto nf = scale(commutator(ops.f_plus, ops.f_minus), 0.5) + scale(id, p / 2.0);
  const int safe = ops.safe_boson_level();
  return {restricted_max(ops.n_b - nb, ops.layout, safe), restricted_max(ops.n_f - nf, ops.layout, safe)};
}

}  // namespace pbf

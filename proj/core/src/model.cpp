#include "pbf/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pbf/error.hpp"

namespace pbf {

std::array<Complex, 4> resolve_couplings(Complex l1, Complex l2, std::optional<Complex> l3,
                                         std::optional<Complex> l4, bool hermitize) {
  if (!hermitize) return {l1, l2, l3.value_or(Complex{}), l4.value_or(Complex{})};
  if (l3 && *l3 != std::conj(l2))
    throw InvalidArgument("hermitize: explicit lambda3 contradicts lambda3 = conj(lambda2)");
  if (l4 && *l4 != std::conj(l1))
    throw InvalidArgument("hermitize: explicit lambda4 contradicts lambda4 = conj(lambda1)");
  return {l1, l2, std::conj(l2), std::conj(l1)};
}

bool couplings_hermitian(const std::array<Complex, 4>& c) {
  return c[3] == std::conj(c[0]) && c[2] == std::conj(c[1]);
}

std::vector<Label> carrier_labels(const ProjectedOps& projected) {
  std::vector<Label> labels;
  for (const auto& [g, d] : projected.dims())
    for (int i = 0; i < d; ++i) labels.push_back({g.m, g.n, i});
  return labels;
}

namespace {

struct DenseGenerators {
  Eigen::MatrixXcd bp, bm, fp, fm;
};

DenseGenerators dense_generators(const ProjectedOps& projected) {
  return {projected.dense(Generator::BPlus), projected.dense(Generator::BMinus), projected.dense(Generator::FPlus),
          projected.dense(Generator::FMinus)};
}

void require_blocks(const ProjectedOps& projected) {
  const int p = projected.order();
  for (const auto& [g, d] : projected.dims()) {
    if (d == 0) continue;
    auto need = [&](Generator gen) {
      if (!projected.find(gen, g))
        throw ValidationError("model: representation lacks the " + std::string(generator_name(gen)) +
                              " block out of " + to_string(g));
    };
    if (g.m < projected.m_keep()) need(Generator::BPlus);
    if (g.m > 0) need(Generator::BMinus);
    if (g.n < p) need(Generator::FPlus);
    if (g.n > 0) need(Generator::FMinus);
  }
}

void reject_grade_frequencies(const ModelParams& params) {
  if (!params.grade_frequencies.empty())
    throw InvalidArgument("model: (m,n)-dependent frequencies are not supported by the Eq1/Eq2 builders");
}

Eigen::MatrixXcd number_part(const ModelParams& params, const std::vector<Label>& labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) h(k, k) = params.omega_b * labels[k].m + params.omega_f * labels[k].n;
  return h;
}

HamiltonianMatrix assemble(const ProjectedOps& projected, Eigen::MatrixXcd diagonal, Eigen::MatrixXcd interaction,
                           bool hermitian) {
  HamiltonianMatrix h;
  h.order = projected.order();
  h.m_keep = projected.m_keep();
  h.labels = carrier_labels(projected);
  h.full = diagonal + interaction;
  h.interaction = std::move(interaction);
  h.hermitian = hermitian;
  return h;
}

}  // namespace

Eigen::MatrixXcd q_up(const ProjectedOps& projected) {
  const auto g = dense_generators(projected);
  return 0.5 * (g.bm * g.fp + g.fp * g.bm);
}

Eigen::MatrixXcd q_down(const ProjectedOps& projected) {
  const auto g = dense_generators(projected);
  return 0.5 * (g.bp * g.fm + g.fm * g.bp);
}

HamiltonianMatrix build_h_eq1(const ModelParams& params, const ProjectedOps& projected) {
  reject_grade_frequencies(params);
  require_blocks(projected);
  const auto g = dense_generators(projected);
  const auto labels = carrier_labels(projected);
  const auto n = static_cast<Eigen::Index>(labels.size());
  const double p = projected.order();
  const double lam = params.lambda;

  const Eigen::MatrixXcd interaction = (lam / 2.0) * ((g.bm * g.fp + g.fp * g.bm) + (g.bp * g.fm + g.fm * g.bp));
  HamiltonianMatrix h = assemble(projected, number_part(params, labels), interaction, true);

  // Second written form: bilinears plus the zero-point constant.
  const Eigen::MatrixXcd bilinear =
      (params.omega_b / 2.0) * (g.bp * g.bm + g.bm * g.bp) + (params.omega_f / 2.0) * (g.fp * g.fm - g.fm * g.fp) +
      ((params.omega_f - params.omega_b) * p / 2.0) * Eigen::MatrixXcd::Identity(n, n) + interaction;

  double diff = 0.0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      if (labels[r].m + labels[r].n >= h.m_keep || labels[c].m + labels[c].n >= h.m_keep) continue;
      diff = std::max(diff, std::abs(h.full(r, c) - bilinear(r, c)));
    }
  h.form_difference = diff;
  if (diff > kFormTolerance) {
    std::ostringstream msg;
    msg << "build_h_eq1: the two forms of the Hamiltonian differ by " << diff << " on interior blocks";
    throw ValidationError(msg.str());
  }
  block_decompose(h);
  return h;
}

HamiltonianMatrix build_h_eq2(const ModelParams& params, const ProjectedOps& projected) {
  reject_grade_frequencies(params);
  require_blocks(projected);
  const auto g = dense_generators(projected);
  const auto labels = carrier_labels(projected);
  const auto& l = params.couplings;
  if (params.hermitize && !couplings_hermitian(l))
    throw InvalidArgument("build_h_eq2: hermitize requested but couplings violate l3 = conj(l2), l4 = conj(l1)");

  const Eigen::MatrixXcd interaction =
      l[0] * (g.bm * g.fp) + l[1] * (g.fp * g.bm) + l[2] * (g.bp * g.fm) + l[3] * (g.fm * g.bp);
  HamiltonianMatrix h = assemble(projected, number_part(params, labels), interaction, couplings_hermitian(l));
  block_decompose(h);
  return h;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const ProjectedOps& projected) {
  return params.variant == Variant::Eq1 ? build_h_eq1(params, projected) : build_h_eq2(params, projected);
}

void block_decompose(HamiltonianMatrix& h) {
  const auto n = static_cast<Eigen::Index>(h.labels.size());
  double comm = 0.0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const int dc = (h.labels[c].m + h.labels[c].n) - (h.labels[r].m + h.labels[r].n);
      comm = std::max(comm, std::abs(h.full(r, c)) * std::abs(dc));
    }
  h.charge_commutator = comm;
  if (comm > kConservationTolerance) {
    std::ostringstream msg;
    msg << "block_decompose: |[H, N_b + N_f]| = " << comm << " exceeds " << kConservationTolerance;
    throw ConservationError(msg.str());
  }

  std::map<int, HamiltonianBlock> by_charge;
  for (Eigen::Index k = 0; k < n; ++k) {
    const int c = h.labels[k].m + h.labels[k].n;
    auto& blk = by_charge[c];
    blk.charge = c;
    blk.indices.push_back(static_cast<std::size_t>(k));
    blk.labels.push_back(h.labels[k]);
    if (h.labels[k].m == h.m_keep) blk.boundary = true;
  }
  h.blocks.clear();
  for (auto& [c, blk] : by_charge) {
    const auto d = static_cast<Eigen::Index>(blk.indices.size());
    blk.matrix.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index s = 0; s < d; ++s)
        blk.matrix(r, s) = h.full(static_cast<Eigen::Index>(blk.indices[r]), static_cast<Eigen::Index>(blk.indices[s]));
    h.blocks.push_back(std::move(blk));
  }
}

Spectrum spectrum(const HamiltonianMatrix& h) {
  if (!h.hermitian) throw NonHermitianError("spectrum: Hamiltonian is not Hermitian");
  Spectrum out;
  for (const auto& blk : h.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(blk.matrix);
    if (solver.info() != Eigen::Success) throw ValidationError("spectrum: eigensolver failed in block " + std::to_string(blk.charge));
    BlockSpectrum bs{blk.charge, blk.labels, solver.eigenvalues(), solver.eigenvectors(), blk.boundary};

    const double scale = std::max(blk.matrix.norm(), 1.0);
    for (Eigen::Index k = 0; k < bs.eigenvalues.size(); ++k) {
      const double r = (blk.matrix * bs.eigenvectors.col(k) - bs.eigenvalues(k) * bs.eigenvectors.col(k)).norm();
      out.max_residual = std::max(out.max_residual, r);
      if (r > 1e-10 * scale)
        throw ValidationError("spectrum: eigenpair residual " + std::to_string(r) + " in block " +
                              std::to_string(blk.charge));
    }
    out.blocks.push_back(std::move(bs));
  }
  return out;
}

Eigen::VectorXd full_spectrum(const HamiltonianMatrix& h) {
  if (!h.hermitian) throw NonHermitianError("full_spectrum: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.full, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Eigen::VectorXcd carrier_state(const HamiltonianMatrix& h, std::span<const std::pair<Label, Complex>> terms) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.labels.size()));
  for (const auto& [label, amp] : terms) {
    auto it = std::lower_bound(h.labels.begin(), h.labels.end(), label);
    if (it == h.labels.end() || *it != label)
      throw InvalidArgument("carrier_state: no basis vector labelled (" + std::to_string(label.m) + "," +
                            std::to_string(label.n) + "," + std::to_string(label.i) + ")");
    v(it - h.labels.begin()) += amp;
  }
  return v;
}

std::vector<double> time_grid(double t_max, int steps) {
  if (steps < 1) throw InvalidArgument("time_grid: steps must be >= 1");
  if (!(t_max >= 0.0)) throw InvalidArgument("time_grid: t_max must be >= 0");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[k] = t_max * k / steps;
  return t;
}

Trajectory evolve(const HamiltonianMatrix& h, const Eigen::VectorXcd& initial, std::span<const double> times,
                  const EvolveOptions& options) {
  if (!h.hermitian && !options.allow_nonhermitian)
    throw NonHermitianError("evolve: Hamiltonian is not Hermitian (override required)");
  if (initial.size() != static_cast<Eigen::Index>(h.labels.size()))
    throw InvalidArgument("evolve: initial state has wrong dimension");
  if (std::abs(initial.norm() - 1.0) > 1e-9)
    throw InvalidArgument("evolve: initial state is not normalized (norm " + std::to_string(initial.norm()) + ")");

  struct Active {
    const HamiltonianBlock* block;
    Eigen::VectorXcd start;
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;
  };
  std::vector<Active> active;
  for (const auto& blk : h.blocks) {
    Eigen::VectorXcd a0(static_cast<Eigen::Index>(blk.indices.size()));
    for (std::size_t k = 0; k < blk.indices.size(); ++k) a0(k) = initial(static_cast<Eigen::Index>(blk.indices[k]));
    if (a0.norm() == 0.0) continue;
    if (blk.boundary && !options.allow_boundary)
      throw ValidationError("evolve: initial state has support on truncation-affected block c=" +
                            std::to_string(blk.charge));
    Active a{&blk, a0, {}, {}};
    if (h.hermitian) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(blk.matrix);
      a.energies = solver.eigenvalues();
      a.vectors = solver.eigenvectors();
    }
    active.push_back(std::move(a));
  }

  Trajectory traj;
  const double p = h.order;
  for (const auto& lab : h.labels) traj.populations[lab.grade()];

  for (double t : times) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(initial.size());
    for (const auto& a : active) {
      Eigen::VectorXcd at;
      if (h.hermitian) {
        const Eigen::VectorXcd w = a.vectors.adjoint() * a.start;
        Eigen::VectorXcd phased(w.size());
        for (Eigen::Index k = 0; k < w.size(); ++k) phased(k) = std::exp(Complex(0.0, -a.energies(k) * t)) * w(k);
        at = a.vectors * phased;
      } else {
        const Eigen::MatrixXcd generator = Complex(0.0, -t) * a.block->matrix;
        at = generator.exp() * a.start;
      }
      for (std::size_t k = 0; k < a.block->indices.size(); ++k) amp(static_cast<Eigen::Index>(a.block->indices[k])) = at(k);
    }

    double nb = 0.0, nf = 0.0, total = 0.0;
    for (auto& [g, series] : traj.populations) series.push_back(0.0);
    for (Eigen::Index k = 0; k < amp.size(); ++k) {
      const double w = std::norm(amp(k));
      const auto& lab = h.labels[k];
      nb += w * lab.m;
      nf += w * lab.n;
      total += w;
      traj.populations[lab.grade()].back() += w;
    }
    traj.times.push_back(t);
    traj.amplitudes.push_back(std::move(amp));
    traj.n_b.push_back(nb);
    traj.n_f.push_back(nf);
    traj.inversion.push_back(nf - p / 2.0);
    traj.norm.push_back(total);
  }
  return traj;
}

TransitionTable transition_table(const HamiltonianMatrix& h) {
  TransitionTable table;
  const auto n = static_cast<Eigen::Index>(h.labels.size());
  for (Eigen::Index src = 0; src < n; ++src)
    for (Eigen::Index dst = 0; dst < n; ++dst) {
      const Complex amp = h.interaction(dst, src);
      if (std::abs(amp) <= kTransitionTolerance) continue;
      const Label& a = h.labels[src];
      const Label& b = h.labels[dst];
      const int dm = b.m - a.m;
      const int dn = b.n - a.n;
      const bool allowed = (dm == -1 && dn == 1) || (dm == 1 && dn == -1);
      (allowed ? table.rows : table.violations).push_back({a, b, amp});
    }
  return table;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const Spectrum& spec, bool include_boundary) {
  out << "block,index,eigenvalue\n";
  for (const auto& b : spec.blocks) {
    if (b.boundary && !include_boundary) continue;
    for (Eigen::Index k = 0; k < b.eigenvalues.size(); ++k)
      out << b.charge << ',' << k << ',' << num(b.eigenvalues(k)) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,N_b,N_f,inversion";
  for (const auto& [g, series] : traj.populations) out << ",P_" << g.m << '_' << g.n;
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << num(traj.times[k]) << ',' << num(traj.n_b[k]) << ',' << num(traj.n_f[k]) << ',' << num(traj.inversion[k]);
    for (const auto& [g, series] : traj.populations) out << ',' << num(series[k]);
    out << '\n';
  }
}

void write_transitions_csv(std::ostream& out, const TransitionTable& table) {
  std::vector<Transition> all(table.rows);
  all.insert(all.end(), table.violations.begin(), table.violations.end());
  std::sort(all.begin(), all.end(), [](const Transition& a, const Transition& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  out << "m,n,i,m2,n2,i2,re,im\n";
  for (const auto& t : all)
    out << t.from.m << ',' << t.from.n << ',' << t.from.i << ',' << t.to.m << ',' << t.to.n << ',' << t.to.i << ','
        << num(t.amplitude.real()) << ',' << num(t.amplitude.imag()) << '\n';
}

}  // namespace pbf

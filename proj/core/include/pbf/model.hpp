#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbf/carrier.hpp"

namespace pbf {

enum class Variant { Eq1, Eq2 };

// Parameters of the generalized Jaynes-Cummings Hamiltonian
//
//   H = w_b N_b + w_f N_f + H_int
//
// with H_int = (lambda/2)({b-,f+} + {b+,f-}) for Eq1, and
// H_int = l1 b-f+ + l2 f+b- + l3 b+f- + l4 f-b+ for Eq2.
struct ModelParams {
  Variant variant = Variant::Eq1;
  double omega_b = 1.0;
  double omega_f = 1.0;
  double lambda = 0.0;
  std::array<Complex, 4> couplings{};
  bool hermitize = false;
  // (m, n)-dependent (w_b, w_f). Parsed and carried, but rejected by both
  // Hamiltonian builders.
  std::map<Grade, std::pair<double, double>> grade_frequencies;
};

// Completes (l1..l4). With hermitize set, l3 = conj(l2) and l4 = conj(l1)
// are filled in; explicit values that contradict them throw InvalidArgument.
std::array<Complex, 4> resolve_couplings(Complex l1, Complex l2, std::optional<Complex> l3,
                                         std::optional<Complex> l4, bool hermitize);

// Eq2 couplings give a Hermitian operator iff l4 = conj(l1) and l3 = conj(l2).
bool couplings_hermitian(const std::array<Complex, 4>& couplings);

struct HamiltonianBlock {
  int charge = 0;                     // c = m + n
  std::vector<std::size_t> indices;   // carrier indices, ascending
  std::vector<Label> labels;
  Eigen::MatrixXcd matrix;
  bool boundary = false;              // touches m = M_keep
};

struct HamiltonianMatrix {
  int order = 0;
  int m_keep = 0;
  std::vector<Label> labels;          // carrier order
  Eigen::MatrixXcd full;
  Eigen::MatrixXcd interaction;       // coupling terms only
  std::vector<HamiltonianBlock> blocks;
  bool hermitian = true;
  // Eq1 only: max entry difference between the number-operator form and the
  // bilinear form on interior blocks.
  std::optional<double> form_difference;
  double charge_commutator = 0.0;     // max |[H, N_b + N_f]|
};

std::vector<Label> carrier_labels(const ProjectedOps& projected);

// Dense Q_up = 1/2 {b-, f+} and Q_down = 1/2 {b+, f-} in carrier order.
Eigen::MatrixXcd q_up(const ProjectedOps& projected);
Eigen::MatrixXcd q_down(const ProjectedOps& projected);

inline constexpr double kFormTolerance = 1e-10;
inline constexpr double kConservationTolerance = 1e-10;

// Both written forms of Eq1 are assembled; their interior difference is
// recorded and must not exceed kFormTolerance (ValidationError otherwise).
HamiltonianMatrix build_h_eq1(const ModelParams& params, const ProjectedOps& projected);
HamiltonianMatrix build_h_eq2(const ModelParams& params, const ProjectedOps& projected);
HamiltonianMatrix build_hamiltonian(const ModelParams& params, const ProjectedOps& projected);

// Splits `h.full` into blocks of fixed c = m + n. Throws ConservationError if
// |[H, C]| exceeds kConservationTolerance.
void block_decompose(HamiltonianMatrix& h);

struct BlockSpectrum {
  int charge = 0;
  std::vector<Label> labels;
  Eigen::VectorXd eigenvalues;        // ascending
  Eigen::MatrixXcd eigenvectors;      // columns, in block label order
  bool boundary = false;
};

struct Spectrum {
  std::vector<BlockSpectrum> blocks;
  double max_residual = 0.0;          // max ||Hv - Ev||
};

Spectrum spectrum(const HamiltonianMatrix& h);

// Ascending eigenvalues of the full carrier-space matrix (dense cross-check).
Eigen::VectorXd full_spectrum(const HamiltonianMatrix& h);

struct EvolveOptions {
  bool allow_boundary = false;
  bool allow_nonhermitian = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> amplitudes;   // carrier order
  std::vector<double> n_b;
  std::vector<double> n_f;
  std::vector<double> inversion;              // <N_f> - p/2
  std::map<Grade, std::vector<double>> populations;
  std::vector<double> norm;                   // sum |amplitude|^2
};

Eigen::VectorXcd carrier_state(const HamiltonianMatrix& h, std::span<const std::pair<Label, Complex>> terms);

// Uniform grid t_k = k t_max / steps, k = 0..steps.
std::vector<double> time_grid(double t_max, int steps);

Trajectory evolve(const HamiltonianMatrix& h, const Eigen::VectorXcd& initial, std::span<const double> times,
                  const EvolveOptions& options = {});

struct Transition {
  Label from;
  Label to;
  Complex amplitude;
};

struct TransitionTable {
  std::vector<Transition> rows;        // allowed couplings
  std::vector<Transition> violations;  // couplings outside (m-+1, n+-1)
};

inline constexpr double kTransitionTolerance = 1e-12;

TransitionTable transition_table(const HamiltonianMatrix& h);

// CSV writers. Flagged boundary blocks are omitted from the spectrum file.
void write_spectrum_csv(std::ostream& out, const Spectrum& spec, bool include_boundary = false);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_transitions_csv(std::ostream& out, const TransitionTable& table);

}  // namespace pbf

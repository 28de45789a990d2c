#pragma once

// Local extraction isometry: a reduced-swap stage, a phase-kickback stage
// that witnesses complex conjugation of the device operators, the equivalent
// closed-form expression, and the extraction-distance evaluation against the
// ideal two-branch target.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vbqc/selftest.hpp"
#include "vbqc/state.hpp"

namespace vbqc {

// Matrices an untrusted device pair "applies": Alice's seven observables and
// Bob's three, plus Bob's phase witness M (the unitary tracking whether the
// devices implement the complex-conjugated copy). Sides may span one or two
// physical qubits.
struct OperatorAssignment {
  int alice_qubits = 1;
  int bob_qubits = 1;
  std::array<Operator<double>, 7> alice;  // indexed by AliceAxis
  std::array<Operator<double>, 3> bob;    // indexed by BobAxis
  Operator<double> phase_witness;         // M_B; unitary, not necessarily Hermitian

  const Operator<double>& alice_observable(AliceAxis a) const {
    return alice[static_cast<std::size_t>(a)];
  }
  const Operator<double>& bob_observable(BobAxis b) const {
    return bob[static_cast<std::size_t>(b)];
  }

  int total_qubits() const { return alice_qubits + bob_qubits; }

  // Observables must be Hermitian involutions of the declared side dimension;
  // the phase witness must be unitary on Bob's side.
  void validate() const;

  // Exact Pauli assignment with M = I; both sides single-qubit.
  static OperatorAssignment ideal();
};

// Largest deviation of the 14 correlations from ideal on the given state.
double chi_actual(const StateVector<double>& state, const OperatorAssignment& assignment);

// Reduced-swap stage: appends ancillas Q_A, Q_B (|0>) and runs, per side,
// H - controlled-Z(side) - H - controlled-X(side) with the assigned operators.
StateVector<double> swap_stage(const StateVector<double>& state,
                               const OperatorAssignment& assignment);

// Phase-kickback stage: appends R_B (|0>) and runs H - controlled-M - H with
// M acting on Bob's physical register.
StateVector<double> kickback_stage(const StateVector<double>& state,
                                   const OperatorAssignment& assignment);

// The linear part of the extraction map for a fixed Alice outcome bit:
// records the bit in Q_A, then runs Bob's reduced swap and the phase
// kickback. An isometry: norms and inner products are preserved.
// Output registers: [S_A, S_B, Q_A, Q_B, R_B].
StateVector<double> extraction_circuit(const StateVector<double>& state,
                                       const OperatorAssignment& assignment,
                                       int outcome_bit);

// Full extraction for Alice outcome a on observable sigma: projects the
// shared state onto the outcome, renormalizes, and applies the circuit.
StateVector<double> isometry_output(const StateVector<double>& state,
                                    const OperatorAssignment& assignment,
                                    AliceAxis sigma, int outcome);

// Closed-form expression for the same map: the normalized
//   (1/4 sqrt2) sum_{k,l} (I + (-1)^l M) X^k (I + (-1)^k Z) (I + (-1)^a sigma)
//   |psi> |ak>_Q |l>_R.
StateVector<double> closed_form(const StateVector<double>& state,
                                const OperatorAssignment& assignment,
                                AliceAxis sigma, int outcome);

// Born weight of the projection used by the closed form, <psi|Pi|psi>.
double projection_weight(const StateVector<double>& state,
                         const OperatorAssignment& assignment, AliceAxis sigma,
                         int outcome);

struct ExtractionResult {
  StateVector<double> extracted_state;  // isometry output on S x Q x R
  double distance = 0;                  // 2-norm to the ideal two-branch target
  double chi_actual = 0;                // largest measured correlation deviation
  AliceAxis sigma = AliceAxis::Z;
  int outcome = +1;
};

// Distance between the isometry output and the ideal target
//   b0 |junk_0>_S Pi^a_{Z,QA} Pi^a_{sigma,QB} |phi+>_Q |0>_R
// + b1 |junk_1>_S Pi^a_{Z,QA} (Pi^a_{sigma,QB})* |phi+>_Q |1>_R,
// minimized in closed form over the per-branch junk vectors and weights.
// Ideal-target projectors use the 2x2 observable_matrix of sigma.
ExtractionResult extraction_distance(const StateVector<double>& state,
                                     const OperatorAssignment& assignment,
                                     AliceAxis sigma, int outcome);

struct CommutationResiduals {
  double alice_anticommutator = 0;  // ||(X_A Z_A + Z_A X_A)|psi>||  <= 2 eps1
  double bob_anticommutator = 0;    // ||(X_B Z_B + Z_B X_B)|psi>||  <= 2 eps1 - 4 eps2
  double x_difference = 0;          // ||(X_A - X_B)|psi>||          <= eps2
  double z_difference = 0;          // ||(Z_A - Z_B)|psi>||          <= eps2
};

CommutationResiduals commutation_residuals(const StateVector<double>& state,
                                           const OperatorAssignment& assignment);

// --- sweep material -------------------------------------------------------

// cos(pi/4 + eta)|00> + e^{i phase} sin(pi/4 + eta)|11>.
StateVector<double> detuned_bell(double eta, double phase = 0.0);

// Ideal assignment with Alice's X rotated toward Z by `alice_xz` and Bob's X
// rotated toward Z by `bob_xz` (derived observables D, E+-, F stay ideal).
OperatorAssignment rotated_assignment(double alice_xz, double bob_xz = 0.0);

struct SweepRow {
  double chi = 0;
  double distance = 0;
  double eps_tilde_bound = 0;
  std::string sigma;
  int outcome = 0;
};

// Evaluates every (sigma, outcome) pair on one (state, assignment) point.
std::vector<SweepRow> extraction_sweep_point(const StateVector<double>& state,
                                             const OperatorAssignment& assignment);

}  // namespace vbqc

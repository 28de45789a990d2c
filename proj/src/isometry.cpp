#include "vbqc/isometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vbqc {

namespace {

std::vector<int> range_targets(int first, int count) {
  std::vector<int> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = first + i;
  return t;
}

// Appends one |0> ancilla at the end of the register.
StateVector<double> append_zero(const StateVector<double>& state, const std::string& label) {
  auto anc = basis_state<double>(1, 0);
  anc.labels() = {label};
  return tensor(state, anc);
}

// H(ancilla); controlled-Z_side; H(ancilla); controlled-X_side, which maps
// |0>_anc |phi> to (1/2) sum_k X^k (I + (-1)^k Z)|phi> |k>_anc.
StateVector<double> reduced_swap(StateVector<double> state, int ancilla,
                                 const Operator<double>& x_op, const Operator<double>& z_op,
                                 const std::vector<int>& side) {
  const auto h = hadamard<double>();
  state = apply(h, state, {ancilla});
  state = apply_controlled(z_op, state, ancilla, side);
  state = apply(h, state, {ancilla});
  state = apply_controlled(x_op, state, ancilla, side);
  return state;
}

}  // namespace

void OperatorAssignment::validate() const {
  if (alice_qubits < 1 || alice_qubits > 2 || bob_qubits < 1 || bob_qubits > 2)
    throw std::invalid_argument("side dimensions must be one or two qubits");
  const Eigen::Index da = Eigen::Index{1} << alice_qubits;
  const Eigen::Index db = Eigen::Index{1} << bob_qubits;
  for (const auto& op : alice) {
    if (op.dim() != da) throw std::invalid_argument("Alice observable dimension mismatch");
    if (!op.involution())
      throw std::invalid_argument("Alice observables must be Hermitian involutions");
  }
  for (const auto& op : bob) {
    if (op.dim() != db) throw std::invalid_argument("Bob observable dimension mismatch");
    if (!op.involution())
      throw std::invalid_argument("Bob observables must be Hermitian involutions");
  }
  if (phase_witness.dim() != db)
    throw std::invalid_argument("phase witness dimension mismatch");
  if (!phase_witness.unitary())
    throw std::invalid_argument("phase witness must be unitary");
}

OperatorAssignment OperatorAssignment::ideal() {
  OperatorAssignment a;
  for (int i = 0; i < 7; ++i)
    a.alice[static_cast<std::size_t>(i)] = observable_matrix(static_cast<AliceAxis>(i));
  for (int i = 0; i < 3; ++i)
    a.bob[static_cast<std::size_t>(i)] = observable_matrix(static_cast<BobAxis>(i));
  a.phase_witness = identity_op<double>(1);
  return a;
}

double chi_actual(const StateVector<double>& state, const OperatorAssignment& assignment) {
  assignment.validate();
  if (state.num_qubits() != assignment.total_qubits())
    throw std::invalid_argument("state does not match assignment dimensions");
  const auto alice_targets = range_targets(0, assignment.alice_qubits);
  const auto bob_targets = range_targets(assignment.alice_qubits, assignment.bob_qubits);
  double worst = 0.0;
  for (const auto& setting : all_settings()) {
    const auto joint = tensor(assignment.alice_observable(setting.alpha),
                              assignment.bob_observable(setting.beta));
    std::vector<int> targets = alice_targets;
    targets.insert(targets.end(), bob_targets.begin(), bob_targets.end());
    const double value = expectation(state, joint, targets);
    worst = std::max(worst, std::abs(value - ideal_correlation(setting)));
  }
  return worst;
}

StateVector<double> swap_stage(const StateVector<double>& state,
                               const OperatorAssignment& assignment) {
  assignment.validate();
  if (state.num_qubits() != assignment.total_qubits())
    throw std::invalid_argument("state does not match assignment dimensions");
  const int na = assignment.alice_qubits;
  const int nb = assignment.bob_qubits;

  auto out = append_zero(append_zero(state, "QA"), "QB");
  const int qa = na + nb;
  const int qb = na + nb + 1;
  out = reduced_swap(std::move(out), qa, assignment.alice_observable(AliceAxis::X),
                     assignment.alice_observable(AliceAxis::Z), range_targets(0, na));
  out = reduced_swap(std::move(out), qb, assignment.bob_observable(BobAxis::X),
                     assignment.bob_observable(BobAxis::Z), range_targets(na, nb));
  return out;
}

StateVector<double> kickback_stage(const StateVector<double>& state,
                                   const OperatorAssignment& assignment) {
  assignment.validate();
  const int na = assignment.alice_qubits;
  const int nb = assignment.bob_qubits;
  if (state.num_qubits() < na + nb)
    throw std::invalid_argument("state lacks the physical registers");

  auto out = append_zero(state, "RB");
  const int rb = out.num_qubits() - 1;
  const auto h = hadamard<double>();
  out = apply(h, out, {rb});
  out = apply_controlled(assignment.phase_witness, out, rb, range_targets(na, nb));
  out = apply(h, out, {rb});
  return out;
}

namespace {

int outcome_bit(int outcome) {
  if (outcome != 1 && outcome != -1)
    throw std::invalid_argument("outcome must be +-1");
  return outcome == 1 ? 0 : 1;
}

StateVector<double> project_onto_outcome(const StateVector<double>& state,
                                         const OperatorAssignment& assignment,
                                         AliceAxis sigma, int outcome) {
  const auto& obs = assignment.alice_observable(sigma);
  const auto alice_targets = range_targets(0, assignment.alice_qubits);
  const auto w = apply(obs, state, alice_targets);
  VectorC<double> projected =
      (state.amplitudes() + static_cast<double>(outcome) * w.amplitudes()) / 2.0;
  const double norm = projected.norm();
  if (norm < kNormTol)
    throw std::invalid_argument("projection onto the requested outcome has no weight");
  projected /= norm;
  return StateVector<double>(std::move(projected), state.labels(), false);
}

}  // namespace

double projection_weight(const StateVector<double>& state,
                         const OperatorAssignment& assignment, AliceAxis sigma,
                         int outcome) {
  const auto& obs = assignment.alice_observable(sigma);
  const auto alice_targets = range_targets(0, assignment.alice_qubits);
  const double ev = expectation(state, obs, alice_targets);
  return (1.0 + static_cast<double>(outcome) * ev) / 2.0;
}

StateVector<double> extraction_circuit(const StateVector<double>& state,
                                       const OperatorAssignment& assignment,
                                       int outcome_bit_value) {
  assignment.validate();
  if (state.num_qubits() != assignment.total_qubits())
    throw std::invalid_argument("state does not match assignment dimensions");
  if (outcome_bit_value != 0 && outcome_bit_value != 1)
    throw std::invalid_argument("outcome bit must be 0 or 1");
  const int na = assignment.alice_qubits;
  const int nb = assignment.bob_qubits;

  // Alice's half of the isometry is classical: her outcome bit lands in Q_A.
  auto qa_state = basis_state<double>(1, static_cast<std::uint64_t>(outcome_bit_value));
  qa_state.labels() = {"QA"};
  auto out = tensor(state, qa_state);
  out = append_zero(out, "QB");
  const int qb = na + nb + 1;
  out = reduced_swap(std::move(out), qb, assignment.bob_observable(BobAxis::X),
                     assignment.bob_observable(BobAxis::Z), range_targets(na, nb));
  return kickback_stage(out, assignment);
}

StateVector<double> isometry_output(const StateVector<double>& state,
                                    const OperatorAssignment& assignment,
                                    AliceAxis sigma, int outcome) {
  const auto projected = project_onto_outcome(state, assignment, sigma, outcome);
  return extraction_circuit(projected, assignment, outcome_bit(outcome));
}

StateVector<double> closed_form(const StateVector<double>& state,
                                const OperatorAssignment& assignment,
                                AliceAxis sigma, int outcome) {
  assignment.validate();
  if (state.num_qubits() != assignment.total_qubits())
    throw std::invalid_argument("state does not match assignment dimensions");
  const int na = assignment.alice_qubits;
  const int nb = assignment.bob_qubits;
  const int a_bit = outcome_bit(outcome);
  const Eigen::Index ds = state.dim();

  const auto alice_targets = range_targets(0, na);
  const auto bob_targets = range_targets(na, nb);
  const auto& sig = assignment.alice_observable(sigma);
  const auto& xb = assignment.bob_observable(BobAxis::X);
  const auto& zb = assignment.bob_observable(BobAxis::Z);
  const auto& m = assignment.phase_witness;

  // (I + (-1)^a sigma)|psi>
  const auto sig_psi = apply(sig, state, alice_targets);
  VectorC<double> base = state.amplitudes() +
                         (a_bit == 0 ? 1.0 : -1.0) * sig_psi.amplitudes();
  const StateVector<double> base_state(base, state.labels(), false);

  // Output register order [S, QA, QB, RB]; eight ancilla blocks of size ds.
  VectorC<double> full = VectorC<double>::Zero(ds * 8);
  const auto z_psi = apply(zb, base_state, bob_targets);
  for (int k = 0; k < 2; ++k) {
    VectorC<double> term =
        base_state.amplitudes() + (k == 0 ? 1.0 : -1.0) * z_psi.amplitudes();
    StateVector<double> term_state(term, state.labels(), false);
    if (k == 1) term_state = apply(xb, term_state, bob_targets);
    const auto m_term = apply(m, term_state, bob_targets);
    for (int l = 0; l < 2; ++l) {
      VectorC<double> branch = term_state.amplitudes() +
                               (l == 0 ? 1.0 : -1.0) * m_term.amplitudes();
      const Eigen::Index block = ((a_bit * 2 + k) * 2 + l);
      for (Eigen::Index s = 0; s < ds; ++s) full(s * 8 + block) += branch(s);
    }
  }
  full /= 4.0 * std::sqrt(2.0);

  std::vector<std::string> labels = state.labels();
  labels.insert(labels.end(), {"QA", "QB", "RB"});
  const double norm = full.norm();
  if (norm < kNormTol)
    throw std::invalid_argument("closed form vanished: outcome has no weight");
  full /= norm;
  return StateVector<double>(std::move(full), std::move(labels), false);
}

ExtractionResult extraction_distance(const StateVector<double>& state,
                                     const OperatorAssignment& assignment,
                                     AliceAxis sigma, int outcome) {
  ExtractionResult result;
  result.sigma = sigma;
  result.outcome = outcome;
  result.chi_actual = chi_actual(state, assignment);
  result.extracted_state = isometry_output(state, assignment, sigma, outcome);

  const int a_bit = outcome_bit(outcome);
  const Eigen::Index ds = state.dim();

  // Ideal target on Q = (Q_A, Q_B): |a> tensor the normalized projected
  // column of the 2x2 ideal observable. Honest remote preparation leaves the
  // conjugate state on Bob's side (outcome |+_theta> prepares |+_{-theta}>),
  // and Eq.-(2) evaluation confirms it: the R = |0> branch pairs with the
  // conjugated projector, R = |1> with the unconjugated one.
  const auto sig_ideal = observable_matrix(sigma).entries();
  const MatrixC<double> proj =
      (MatrixC<double>::Identity(2, 2) + (a_bit == 0 ? 1.0 : -1.0) * sig_ideal) / 2.0;
  VectorC<double> qb0 = proj.conjugate().col(a_bit);
  VectorC<double> qb1 = proj.col(a_bit);
  if (qb0.norm() < kNormTol || qb1.norm() < kNormTol)
    throw std::logic_error("ideal target projector vanished");
  qb0 /= qb0.norm();
  qb1 /= qb1.norm();

  // Per R branch, project out the best junk vector u_l(s) and accumulate the
  // orthogonal residual directly; this keeps the distance accurate near zero
  // where 2 - 2 sqrt(overlap) would cancel catastrophically.
  const auto& amps = result.extracted_state.amplitudes();
  double residual_sq = 0.0;
  // Components with Q_A orthogonal to |a> can never overlap the target.
  for (Eigen::Index s = 0; s < ds; ++s)
    for (int qb = 0; qb < 2; ++qb)
      for (int l = 0; l < 2; ++l) {
        const Eigen::Index idx = s * 8 + (((1 - a_bit) * 2 + qb) * 2 + l);
        residual_sq += std::norm(amps(idx));
      }
  for (int l = 0; l < 2; ++l) {
    const VectorC<double>& target = l == 0 ? qb0 : qb1;
    for (Eigen::Index s = 0; s < ds; ++s) {
      ComplexT<double> u{0, 0};
      for (int qb = 0; qb < 2; ++qb)
        u += std::conj(target(qb)) * amps(s * 8 + ((a_bit * 2 + qb) * 2 + l));
      for (int qb = 0; qb < 2; ++qb) {
        const ComplexT<double> w =
            amps(s * 8 + ((a_bit * 2 + qb) * 2 + l)) - u * target(qb);
        residual_sq += std::norm(w);
      }
    }
  }
  residual_sq = std::min(1.0, std::max(0.0, residual_sq));
  result.distance =
      std::sqrt(2.0 * residual_sq / (1.0 + std::sqrt(1.0 - residual_sq)));
  return result;
}

CommutationResiduals commutation_residuals(const StateVector<double>& state,
                                           const OperatorAssignment& assignment) {
  assignment.validate();
  if (state.num_qubits() != assignment.total_qubits())
    throw std::invalid_argument("state does not match assignment dimensions");
  const auto alice_targets = range_targets(0, assignment.alice_qubits);
  const auto bob_targets = range_targets(assignment.alice_qubits, assignment.bob_qubits);

  const auto& xa = assignment.alice_observable(AliceAxis::X);
  const auto& za = assignment.alice_observable(AliceAxis::Z);
  const auto& xb = assignment.bob_observable(BobAxis::X);
  const auto& zb = assignment.bob_observable(BobAxis::Z);

  auto anticommutator_norm = [&](const Operator<double>& p, const Operator<double>& q,
                                 const std::vector<int>& side) {
    const auto pq = apply(p, apply(q, state, side), side);
    const auto qp = apply(q, apply(p, state, side), side);
    return (pq.amplitudes() + qp.amplitudes()).norm();
  };
  auto difference_norm = [&](const Operator<double>& a, const Operator<double>& b) {
    const auto av = apply(a, state, alice_targets);
    const auto bv = apply(b, state, bob_targets);
    return (av.amplitudes() - bv.amplitudes()).norm();
  };

  CommutationResiduals r;
  r.alice_anticommutator = anticommutator_norm(xa, za, alice_targets);
  r.bob_anticommutator = anticommutator_norm(xb, zb, bob_targets);
  r.x_difference = difference_norm(xa, xb);
  r.z_difference = difference_norm(za, zb);
  return r;
}

StateVector<double> detuned_bell(double eta, double phase) {
  VectorC<double> v = VectorC<double>::Zero(4);
  v(0) = std::cos(M_PI / 4 + eta);
  v(3) = std::sin(M_PI / 4 + eta) * std::exp(ComplexT<double>{0, phase});
  return StateVector<double>(std::move(v), {"A", "B"});
}

OperatorAssignment rotated_assignment(double alice_xz, double bob_xz) {
  auto a = OperatorAssignment::ideal();
  const auto rotate = [](double angle) {
    return Operator<double>(std::cos(angle) * pauli_x().entries() +
                            std::sin(angle) * pauli_z().entries());
  };
  if (alice_xz != 0.0) a.alice[static_cast<std::size_t>(AliceAxis::X)] = rotate(alice_xz);
  if (bob_xz != 0.0) a.bob[static_cast<std::size_t>(BobAxis::X)] = rotate(bob_xz);
  return a;
}

std::vector<SweepRow> extraction_sweep_point(const StateVector<double>& state,
                                             const OperatorAssignment& assignment) {
  std::vector<SweepRow> rows;
  for (int axis = 0; axis < 7; ++axis) {
    for (int outcome : {+1, -1}) {
      const auto sigma = static_cast<AliceAxis>(axis);
      if (projection_weight(state, assignment, sigma, outcome) < 1e-6) continue;
      const auto res = extraction_distance(state, assignment, sigma, outcome);
      rows.push_back(SweepRow{res.chi_actual, res.distance,
                              epsilon_bounds(res.chi_actual).eps_tilde,
                              to_string(sigma), outcome});
    }
  }
  return rows;
}

}  // namespace vbqc

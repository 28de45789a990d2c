#include "vbqc/isometry.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace vbqc;

namespace {

// Random single-qubit-per-side assignment: Hermitian involutions everywhere,
// a Haar-ish unitary phase witness.
OperatorAssignment random_assignment(RandomStream& rng) {
  OperatorAssignment a;
  for (int i = 0; i < 7; ++i)
    a.alice[static_cast<std::size_t>(i)] = testutil::random_involution(1, rng);
  for (int i = 0; i < 3; ++i)
    a.bob[static_cast<std::size_t>(i)] = testutil::random_involution(1, rng);
  a.phase_witness = Operator<double>(testutil::random_unitary(2, rng));
  return a;
}

// Purification of a Werner pair with parameter q: Bell mixture with weights
// (1+3q)/4 and (1-q)/4 each, record qubits split one per side. Register
// order [A1 A2 B1 B2], so Alice owns qubits {0,1} and Bob {2,3}.
StateVector<double> werner_purification(double q) {
  const double p0 = (1 + 3 * q) / 4, p = (1 - q) / 4;
  VectorC<double> v = VectorC<double>::Zero(16);
  const double s = 1.0 / std::sqrt(2.0);
  auto put = [&](int a1, int b1, int a2, int b2, double amp) {
    v(((a1 * 2 + a2) * 2 + b1) * 2 + b2) += amp;
  };
  // phi+ (x) |00>, phi- (x) |01>, psi+ (x) |10>, psi- (x) |11>
  put(0, 0, 0, 0, s * std::sqrt(p0));
  put(1, 1, 0, 0, s * std::sqrt(p0));
  put(0, 0, 0, 1, s * std::sqrt(p));
  put(1, 1, 0, 1, -s * std::sqrt(p));
  put(0, 1, 1, 0, s * std::sqrt(p));
  put(1, 0, 1, 0, s * std::sqrt(p));
  put(0, 1, 1, 1, s * std::sqrt(p));
  put(1, 0, 1, 1, -s * std::sqrt(p));
  return StateVector<double>(std::move(v), {"A1", "A2", "B1", "B2"});
}

OperatorAssignment two_qubit_side_assignment() {
  OperatorAssignment a = OperatorAssignment::ideal();
  OperatorAssignment big;
  big.alice_qubits = 2;
  big.bob_qubits = 2;
  const auto id = identity_op<double>(1);
  for (int i = 0; i < 7; ++i)
    big.alice[static_cast<std::size_t>(i)] = tensor(a.alice[static_cast<std::size_t>(i)], id);
  for (int i = 0; i < 3; ++i)
    big.bob[static_cast<std::size_t>(i)] = tensor(a.bob[static_cast<std::size_t>(i)], id);
  big.phase_witness = identity_op<double>(2);
  return big;
}

}  // namespace

TEST_CASE("swap stage on the ideal Bell pair extracts it into Q") {
  const auto out = swap_stage(bell_pair(), OperatorAssignment::ideal());
  CHECK(out.num_qubits() == 4);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Expected |00>_S (x) |phi+>_Q: indices 0b0000 and 0b0011.
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(out.amplitude(0b0000) - ComplexT<double>{s, 0}) < 1e-12);
  CHECK(std::abs(out.amplitude(0b0011) - ComplexT<double>{s, 0}) < 1e-12);
  for (Eigen::Index i = 0; i < 16; ++i)
    if (i != 0b0000 && i != 0b0011) CHECK(std::abs(out.amplitude(i)) < 1e-12);
}

TEST_CASE("swap stage on |00> leaves the Q_B ancilla in |0>") {
  const StateVector<double> zz(basis_state<double>(2, 0).amplitudes(), {"A", "B"});
  const auto out = swap_stage(zz, OperatorAssignment::ideal());
  const auto rho_qb = reduced_density(out, {3});
  CHECK(std::abs(rho_qb.entries()(0, 0).real() - 1.0) < 1e-12);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("swap stage preserves inner products on random inputs") {
  RandomStream rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto assignment = random_assignment(rng);
    const auto u = testutil::random_state(2, rng);
    const auto v = testutil::random_state(2, rng);
    const auto fu = swap_stage(u, assignment);
    const auto fv = swap_stage(v, assignment);
    CHECK(std::abs(inner_product(fu, fv) - inner_product(u, v)) < 1e-10);
  }
}

TEST_CASE("kickback stage phase witness branches") {
  const auto ideal = OperatorAssignment::ideal();
  RandomStream rng(37);
  const auto psi = testutil::random_state(2, rng);

  SUBCASE("M = I pins R_B to |0>") {
    const auto out = kickback_stage(psi, ideal);
    const int rb = out.num_qubits() - 1;
    for (Eigen::Index i = 0; i < out.dim(); ++i)
      if (out.bit(i, rb) == 1) CHECK(std::abs(out.amplitude(i)) < 1e-14);
  }

  SUBCASE("M = -I pins R_B to |1>") {
    auto conj = ideal;
    conj.phase_witness = Operator<double>(-MatrixC<double>::Identity(2, 2));
    const auto out = kickback_stage(psi, conj);
    const int rb = out.num_qubits() - 1;
    for (Eigen::Index i = 0; i < out.dim(); ++i)
      if (out.bit(i, rb) == 0) CHECK(std::abs(out.amplitude(i)) < 1e-14);
  }

  SUBCASE("M = Z populates both branches and matches the closed form") {
    // Ideal X_B/Z_B leave the swapped-out junk exactly in |0>, which a Z
    // witness cannot kick; a generic assignment exposes both branches.
    auto noisy = random_assignment(rng);
    noisy.phase_witness = pauli_z();
    const auto circuit = isometry_output(bell_pair(), noisy, AliceAxis::Y, +1);
    const auto formula = closed_form(bell_pair(), noisy, AliceAxis::Y, +1);
    CHECK((circuit.amplitudes() - formula.amplitudes()).norm() < 1e-10);
    const int rb = circuit.num_qubits() - 1;
    double w1 = 0;
    for (Eigen::Index i = 0; i < circuit.dim(); ++i)
      if (circuit.bit(i, rb) == 1) w1 += std::norm(circuit.amplitude(i));
    CHECK(w1 > 1e-3);
    CHECK(w1 < 1.0 - 1e-3);
  }

  SUBCASE("non-unitary witness is rejected") {
    auto bad = ideal;
    MatrixC<double> m(2, 2);
    m << 1, 0, 0, 0;
    CHECK_THROWS_AS(bad.phase_witness = Operator<double>(m); kickback_stage(psi, bad),
                    std::invalid_argument);
  }
}

TEST_CASE("closed form equals the circuit composition") {
  SUBCASE("ideal sigma = Z matches the Pi_Z^+ Pi_Z^+ target") {
    const auto out = closed_form(bell_pair(), OperatorAssignment::ideal(), AliceAxis::Z, +1);
    // Q register should hold |00>, S junk |00>, R |0>: single basis amplitude.
    CHECK(std::abs(std::abs(out.amplitude(0)) - 1.0) < 1e-12);
  }

  SUBCASE("ideal sigma = X extracts 2 Pi_Z Pi_X |phi+> on Q up to phase") {
    const auto out = closed_form(bell_pair(), OperatorAssignment::ideal(), AliceAxis::X, +1);
    // Q_B marginal should be |+><+| exactly; Q_A pinned to |0>.
    const auto rho_qb = reduced_density(out, {3});
    CHECK(std::abs(rho_qb.entries()(0, 1).real() - 0.5) < 1e-12);
    const auto rho_qa = reduced_density(out, {2});
    CHECK(std::abs(rho_qa.entries()(0, 0).real() - 1.0) < 1e-12);
  }

  SUBCASE("random states and assignments, both outcomes") {
    RandomStream rng(41);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto assignment = random_assignment(rng);
      const auto psi = testutil::random_state(2, rng);
      const auto sigma = static_cast<AliceAxis>(rng.next_below(7));
      const int outcome = rng.next_bit() ? +1 : -1;
      if (projection_weight(psi, assignment, sigma, outcome) < 1e-4) continue;
      const auto formula = closed_form(psi, assignment, sigma, outcome);
      const auto circuit = isometry_output(psi, assignment, sigma, outcome);
      CHECK((formula.amplitudes() - circuit.amplitudes()).norm() < 1e-10);
      ++checked;
    }
    CHECK(checked > 25);
  }
}

TEST_CASE("extraction circuit preserves inner products") {
  RandomStream rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto assignment = random_assignment(rng);
    const auto u = testutil::random_state(2, rng);
    const auto v = testutil::random_state(2, rng);
    const auto fu = extraction_circuit(u, assignment, 0);
    const auto fv = extraction_circuit(v, assignment, 0);
    CHECK(std::abs(inner_product(fu, fv) - inner_product(u, v)) < 1e-10);
  }
}

TEST_CASE("branch norms reproduce the preparation weight in the ideal case") {
  // In the exact case the closed form's surviving branch carries
  // p_sigma = <phi+| Pi^a_Z Pi^a_sigma |phi+> = Tr(Pi_Z Pi_sigma)/2 before
  // renormalization; the projection weight equals the Born rule weight.
  const auto ideal = OperatorAssignment::ideal();
  for (int axis = 0; axis < 7; ++axis) {
    const auto sigma = static_cast<AliceAxis>(axis);
    for (int outcome : {+1, -1}) {
      const double born = projection_weight(bell_pair(), ideal, sigma, outcome);
      const auto sig = observable_matrix(sigma).entries();
      const double sgn = outcome;
      const MatrixC<double> pz =
          (MatrixC<double>::Identity(2, 2) + sgn * pauli_z().entries()) / 2.0;
      const MatrixC<double> ps = (MatrixC<double>::Identity(2, 2) + sgn * sig) / 2.0;
      const double p_sigma = (pz * ps).trace().real() / 2.0;
      CHECK(born == doctest::Approx(0.5).epsilon(1e-12));
      // Branch-0 target norm^2 built by hand: || Pi_Z (x) ... |phi+> ||^2.
      VectorC<double> phi = bell_pair().amplitudes();
      MatrixC<double> proj4 = MatrixC<double>::Zero(4, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              proj4(i * 2 + k, j * 2 + l) = pz(i, j) * ps(k, l);
      CHECK((proj4 * phi).squaredNorm() == doctest::Approx(p_sigma).epsilon(1e-12));
    }
  }
}

TEST_CASE("extraction distance vanishes on the ideal configuration") {
  const auto ideal = OperatorAssignment::ideal();
  for (int axis = 0; axis < 7; ++axis) {
    for (int outcome : {+1, -1}) {
      const auto res =
          extraction_distance(bell_pair(), ideal, static_cast<AliceAxis>(axis), outcome);
      CHECK(res.distance < 1e-10);
      CHECK(res.chi_actual < 1e-12);
      CHECK(res.extracted_state.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("Theorem-style bound holds on detuned states and rotated operators") {
  int small_chi_points = 0;
  for (double eta : {0.01, 0.05, 0.1, 0.15, 0.2, 0.3}) {
    for (double rot : {0.0, 0.02, 0.05}) {
      const auto state = detuned_bell(eta);
      const auto assignment = rotated_assignment(rot);
      const auto rows = extraction_sweep_point(state, assignment);
      for (const auto& row : rows) {
        CHECK(row.distance <= row.eps_tilde_bound + 1e-9);
        if (row.chi <= 0.05) ++small_chi_points;
      }
    }
  }
  CHECK(small_chi_points >= 50);
}

TEST_CASE("conjugated devices shift the R register to |1>") {
  // The complex-conjugated device pair: both sides apply the conjugates of
  // their ideal operators (correlations cannot tell the copies apart), and
  // the phase witness flips sign.
  auto conjugated = OperatorAssignment::ideal();
  for (int i = 0; i < 7; ++i)
    conjugated.alice[static_cast<std::size_t>(i)] =
        conjugated.alice[static_cast<std::size_t>(i)].conjugate();
  for (int i = 0; i < 3; ++i)
    conjugated.bob[static_cast<std::size_t>(i)] =
        conjugated.bob[static_cast<std::size_t>(i)].conjugate();
  conjugated.phase_witness = Operator<double>(-MatrixC<double>::Identity(2, 2));

  CHECK(chi_actual(bell_pair(), conjugated) < 1e-12);
  for (AliceAxis sigma : {AliceAxis::Y, AliceAxis::EPlus, AliceAxis::X}) {
    const auto res = extraction_distance(bell_pair(), conjugated, sigma, +1);
    const auto& out = res.extracted_state;
    const int rb = out.num_qubits() - 1;
    double w1 = 0;
    for (Eigen::Index i = 0; i < out.dim(); ++i)
      if (out.bit(i, rb) == 1) w1 += std::norm(out.amplitude(i));
    CHECK(w1 == doctest::Approx(1.0).epsilon(1e-10));
    // The conjugate branch of the target absorbs the extraction: still exact.
    CHECK(res.distance < 1e-10);
  }
}

TEST_CASE("commutation residuals") {
  const auto ideal = OperatorAssignment::ideal();

  SUBCASE("ideal Paulis give zero residuals") {
    const auto r = commutation_residuals(bell_pair(), ideal);
    CHECK(r.alice_anticommutator < 1e-10);
    CHECK(r.bob_anticommutator < 1e-10);
    CHECK(r.x_difference < 1e-10);
    CHECK(r.z_difference < 1e-10);
  }

  SUBCASE("rotated X_A residual matches direct matrix evaluation") {
    for (double eta : {0.05, 0.1, 0.2}) {
      const auto assignment = rotated_assignment(eta);
      const auto r = commutation_residuals(bell_pair(), assignment);
      // Brute force {X', Z} as a dense matrix on the full register.
      const MatrixC<double> xp = assignment.alice_observable(AliceAxis::X).entries();
      const MatrixC<double> z = pauli_z().entries();
      const MatrixC<double> anti = xp * z + z * xp;
      const MatrixC<double> big = testutil::embed(anti, 2, {0});
      const double direct = (big * bell_pair().amplitudes()).norm();
      CHECK(r.alice_anticommutator == doctest::Approx(direct).epsilon(1e-12));
      CHECK(direct == doctest::Approx(2.0 * std::abs(std::sin(eta))).epsilon(1e-10));

      const auto bounds = epsilon_bounds(chi_actual(bell_pair(), assignment));
      CHECK(r.alice_anticommutator <= 2 * bounds.eps1 + 1e-9);
      CHECK(r.bob_anticommutator <= 2 * bounds.eps1 - 4 * bounds.eps2 + 1e-9);
      CHECK(r.x_difference <= bounds.eps2 + 1e-9);
      CHECK(r.z_difference <= bounds.eps2 + 1e-9);
    }
  }

  SUBCASE("Werner noise saturates the eps2 bound") {
    const auto assignment = two_qubit_side_assignment();
    for (double q : {0.9, 0.95, 1.0}) {
      const auto psi = werner_purification(q);
      const double chi = chi_actual(psi, assignment);
      CHECK(chi == doctest::Approx(1.0 - q).epsilon(1e-9));
      const auto r = commutation_residuals(psi, assignment);
      const auto bounds = epsilon_bounds(chi);
      CHECK(r.x_difference == doctest::Approx(std::sqrt(2.0 * (1.0 - q))).epsilon(1e-9));
      CHECK(r.x_difference <= bounds.eps2 + 1e-9);
      CHECK(r.z_difference <= bounds.eps2 + 1e-9);
      CHECK(r.alice_anticommutator <= 2 * bounds.eps1 + 1e-9);
      CHECK(r.bob_anticommutator <= 2 * bounds.eps1 - 4 * bounds.eps2 + 1e-9);
    }
  }
}

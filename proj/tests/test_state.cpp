#include "vbqc/state.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace vbqc;
using testutil::random_state;

namespace {

Operator<double> zz() { return tensor(pauli_z(), pauli_z()); }

}  // namespace

TEST_CASE("bell pair amplitudes, norm, ZZ correlation") {
  const auto phi = bell_pair();
  CHECK(phi.num_qubits() == 2);
  CHECK(phi.amplitude(0).real() == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(std::abs(phi.amplitude(1)) == doctest::Approx(0.0));
  CHECK(std::abs(phi.amplitude(2)) == doctest::Approx(0.0));
  CHECK(phi.amplitude(3).real() == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expectation(phi, zz()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projective measurement basics") {
  RandomStream rng(7);

  SUBCASE("Z on |0> is deterministic") {
    const auto zero = basis_state(1, 0);
    const auto r = projective_measure(zero, pauli_z(), {0}, rng);
    CHECK(r.outcome == 1);
    CHECK(r.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vector_distance(r.post_state, zero) < 1e-12);
  }

  SUBCASE("X on |0> is unbiased") {
    const auto zero = basis_state(1, 0);
    const auto r = projective_measure(zero, pauli_x(), {0}, rng);
    CHECK((r.outcome == 1 || r.outcome == -1));
    CHECK(r.probability == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("Z on qubit A of a Bell pair, plus branch") {
    // Project (|00>+|11>)/sqrt2 onto Z_A=+1 by hand: amplitude (1/sqrt2, 0, 0, 0),
    // weight 1/2, renormalized |00>.
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      RandomStream local(seed);
      const auto r = projective_measure(bell_pair(), pauli_z(), {0}, local);
      CHECK(r.probability == doctest::Approx(0.5).epsilon(1e-12));
      if (r.outcome == 1) {
        CHECK(vector_distance(r.post_state, basis_state(2, 0)) < 1e-12);
        return;
      }
    }
    FAIL("plus branch never sampled across 32 seeds");
  }
}

TEST_CASE("projective measurement rejects bad inputs") {
  RandomStream rng(1);
  const auto zero = basis_state(1, 0);
  MatrixC<double> nh(2, 2);
  nh << ComplexT<double>{0, 0}, ComplexT<double>{1, 0}, ComplexT<double>{0, 0},
      ComplexT<double>{0, 0};
  CHECK_THROWS_AS(projective_measure(zero, Operator<double>(nh), {0}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(projective_measure(zero, pauli_z(), {1}, rng), std::invalid_argument);
  CHECK_THROWS_AS(projective_measure(bell_pair(), zz(), {0, 0}, rng),
                  std::invalid_argument);
}

TEST_CASE("expectation values") {
  const auto phi = bell_pair();
  CHECK(expectation(phi, tensor(pauli_x(), pauli_x())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expectation(basis_state(1, 0), pauli_x()) == doctest::Approx(0.0).epsilon(1e-12));
  const Operator<double> d(
      (pauli_x().entries() + pauli_z().entries()) / std::sqrt(2.0));
  CHECK(expectation(phi, tensor(d, pauli_x())) ==
        doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK_THROWS_AS(expectation(phi, pauli_x()), std::invalid_argument);
}

TEST_CASE("vector distance") {
  const auto zero = basis_state(1, 0);
  const auto one = basis_state(1, 1);
  const auto plus = plus_theta(0.0);
  CHECK(vector_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(vector_distance(zero, one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // sqrt(2 - sqrt2) by direct amplitude arithmetic.
  CHECK(vector_distance(zero, plus) ==
        doctest::Approx(0.7653668647301795).epsilon(1e-12));
  CHECK_THROWS_AS(vector_distance(zero, bell_pair()), std::invalid_argument);

  SUBCASE("triangle inequality on random triples") {
    RandomStream rng(11);
    for (int trial = 0; trial < 64; ++trial) {
      const auto a = random_state(2, rng);
      const auto b = random_state(2, rng);
      const auto c = random_state(2, rng);
      CHECK(vector_distance(a, c) <=
            vector_distance(a, b) + vector_distance(b, c) + 1e-12);
    }
  }
}

TEST_CASE("fidelity and trace distance") {
  const auto zero = basis_state(1, 0);
  const auto one = basis_state(1, 1);
  CHECK(fidelity(zero, DensityMatrix<double>::from_pure(zero)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(DensityMatrix<double>::from_pure(zero),
                       DensityMatrix<double>::from_pure(one)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  const DensityMatrix<double> maximally_mixed(MatrixC<double>::Identity(2, 2) / 2.0);
  CHECK(fidelity(zero, maximally_mixed) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("half trace distance <= sqrt(1 - fidelity) on random pure pairs") {
    RandomStream rng(13);
    for (int trial = 0; trial < 128; ++trial) {
      const auto a = random_state(2, rng);
      const auto b = random_state(2, rng);
      const double td = trace_distance(DensityMatrix<double>::from_pure(a),
                                       DensityMatrix<double>::from_pure(b));
      const double f = fidelity(a, DensityMatrix<double>::from_pure(b));
      CHECK(0.5 * td <= std::sqrt(std::max(0.0, 1.0 - f)) + 1e-10);
    }
  }

  SUBCASE("invalid density matrix is rejected") {
    MatrixC<double> bad = MatrixC<double>::Identity(2, 2);  // trace 2
    CHECK_THROWS_AS(DensityMatrix<double>{bad}, std::invalid_argument);
  }
}

TEST_CASE("tensor, apply, partial trace") {
  const auto zero = basis_state(1, 0);
  const auto one = basis_state(1, 1);
  CHECK(vector_distance(tensor(zero, one), basis_state(2, 1)) < 1e-15);
  CHECK(vector_distance(apply(pauli_x(), zero), one) < 1e-15);

  SUBCASE("Bob's half of a Bell pair is maximally mixed") {
    const auto rho = reduced_density(bell_pair(), {1});
    CHECK((rho.entries() - MatrixC<double>::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
          1e-12);
  }

  SUBCASE("partial trace undoes tensor") {
    RandomStream rng(17);
    const auto a = random_state(1, rng);
    const auto b = random_state(2, rng);
    const auto rho_a = DensityMatrix<double>::from_pure(a);
    const auto rho_b = DensityMatrix<double>::from_pure(b);
    const auto joint = tensor(rho_a, rho_b);
    const auto back = partial_trace(joint, {0});
    CHECK((back.entries() - rho_a.entries()).cwiseAbs().maxCoeff() < 1e-12);
    const auto back_b = partial_trace(joint, {1, 2});
    CHECK((back_b.entries() - rho_b.entries()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("partial trace preserves trace") {
    RandomStream rng(19);
    const auto s = random_state(3, rng);
    const auto rho = reduced_density(s, {0, 2});
    CHECK(std::abs(rho.entries().trace().real() - 1.0) < 1e-12);
  }

  SUBCASE("apply matches dense embedding on random ops") {
    RandomStream rng(23);
    for (int trial = 0; trial < 16; ++trial) {
      const auto s = random_state(3, rng);
      const auto op = testutil::random_involution(2, rng);
      const std::vector<int> targets = {2, 0};
      const auto fast = apply(op, s, targets);
      const MatrixC<double> big = testutil::embed(op.entries(), 3, targets);
      VectorC<double> ref = big * s.amplitudes();
      CHECK((fast.amplitudes() - ref).norm() < 1e-12);
    }
  }

  SUBCASE("dimension mismatch and overlap errors") {
    CHECK_THROWS_AS(apply(zz(), zero, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(apply(pauli_x(), zero, {3}), std::invalid_argument);
  }
}

TEST_CASE("measurement frequencies follow the Born rule") {
  // 1e5 seeded X-measurements of cos(pi/8)|0> + sin(pi/8)|1>:
  // P(+1) = |<+|psi>|^2 = (1 + sin(pi/4))/2.
  VectorC<double> amps(2);
  amps << std::cos(M_PI / 8), std::sin(M_PI / 8);
  const StateVector<double> psi(amps);
  const double p_plus = (1.0 + std::sin(M_PI / 4)) / 2.0;

  RandomStream rng(20240817);
  const int trials = 100000;
  int plus = 0;
  for (int t = 0; t < trials; ++t) {
    const auto r = projective_measure(psi, pauli_x(), {0}, rng);
    if (r.outcome == 1) ++plus;
    CHECK(r.post_state.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
  const double sigma = std::sqrt(p_plus * (1 - p_plus) * trials);
  CHECK(std::abs(plus - p_plus * trials) < 3.0 * sigma);
}

TEST_CASE("controlled operations") {
  // CZ phases exactly the |11> component.
  auto s = tensor(plus_theta(0.0), plus_theta(0.0));
  apply_cz_inplace(s, 0, 1);
  CHECK(s.amplitude(3).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s.amplitude(0).real() == doctest::Approx(0.5).epsilon(1e-12));

  // Controlled-X from qubit 0 onto qubit 1 maps |10> -> |11>.
  const auto flipped = apply_controlled(pauli_x(), basis_state(2, 2), 0, {1});
  CHECK(vector_distance(flipped.normalized(), basis_state(2, 3)) < 1e-12);
}

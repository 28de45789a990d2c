#pragma once

// Dense complex-statevector engine: states, operators, density matrices,
// tensor structure, projective +/-1 measurement and the distance/fidelity
// measures the rest of the library is built on. Big-endian register order:
// the first qubit label is the most significant amplitude-index bit.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vbqc/rng.hpp"

namespace vbqc {

// Tolerance hierarchy: algebraic identities sit at 1e-12, normalized
// quantities (norms, probabilities) at 1e-10 to absorb accumulation over
// up to 2^20 amplitudes in double precision.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

template <class Real = double>
using ComplexT = std::complex<Real>;

template <class Real = double>
using VectorC = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, 1>;

template <class Real = double>
using MatrixC = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline std::vector<std::string> default_labels(int num_qubits) {
  std::vector<std::string> labels(static_cast<std::size_t>(num_qubits));
  for (int q = 0; q < num_qubits; ++q) labels[q] = "q" + std::to_string(q);
  return labels;
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

inline int qubits_for_dim(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("empty amplitude vector");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim)
    throw std::invalid_argument("dimension is not a power of two");
  return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// StateVector

template <class Real = double>
class StateVector {
 public:
  using Complex = ComplexT<Real>;
  using Vector = VectorC<Real>;

  StateVector() = default;

  // |0...0> on num_qubits qubits.
  explicit StateVector(int num_qubits)
      : labels_(detail::default_labels(num_qubits)),
        amps_(Vector::Zero(Eigen::Index{1} << num_qubits)) {
    amps_able_check(num_qubits);
    amps_(0) = Complex{1, 0};
  }

  StateVector(Vector amplitudes, std::vector<std::string> labels,
              bool require_normalized = true)
      : labels_(std::move(labels)), amps_(std::move(amplitudes)) {
    validate(require_normalized);
  }

  explicit StateVector(Vector amplitudes, bool require_normalized = true)
      : labels_(detail::default_labels(detail::qubits_for_dim(amplitudes.size()))),
        amps_(std::move(amplitudes)) {
    validate(require_normalized);
  }

  int num_qubits() const { return detail::qubits_for_dim(amps_.size()); }
  Eigen::Index dim() const { return amps_.size(); }
  Real norm() const { return amps_.norm(); }

  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }
  Complex amplitude(Eigen::Index i) const { return amps_(i); }

  const std::vector<std::string>& labels() const { return labels_; }
  std::vector<std::string>& labels() { return labels_; }

  int index_of_label(const std::string& name) const {
    for (std::size_t q = 0; q < labels_.size(); ++q)
      if (labels_[q] == name) return static_cast<int>(q);
    throw std::invalid_argument("unknown qubit label: " + name);
  }

  // Bit of qubit q in amplitude index i (big-endian).
  int bit(Eigen::Index i, int q) const {
    return static_cast<int>((i >> (num_qubits() - 1 - q)) & 1);
  }

  StateVector normalized() const {
    const Real n = norm();
    if (n < kNormTol) throw std::invalid_argument("cannot normalize null vector");
    return StateVector(amps_ / n, labels_, false);
  }

 private:
  static void amps_able_check(int num_qubits) {
    if (num_qubits < 0 || num_qubits > 30)
      throw std::invalid_argument("unsupported qubit count");
  }

  void validate(bool require_normalized) const {
    const int n = detail::qubits_for_dim(amps_.size());
    if (static_cast<int>(labels_.size()) != n)
      throw std::invalid_argument("label count does not match qubit count");
    if (!detail::all_finite(amps_))
      throw std::invalid_argument("non-finite amplitude");
    if (require_normalized && std::abs(norm() - Real{1}) > kNormTol)
      throw std::invalid_argument("state vector is not normalized");
  }

  std::vector<std::string> labels_;
  Vector amps_;
};

// ---------------------------------------------------------------------------
// Operator

template <class Real = double>
class Operator {
 public:
  using Complex = ComplexT<Real>;
  using Matrix = MatrixC<Real>;

  Operator() = default;

  explicit Operator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
      throw std::invalid_argument("operator must be square");
    dim_qubits_ = detail::qubits_for_dim(entries_.rows());
    if (!detail::all_finite(entries_))
      throw std::invalid_argument("non-finite operator entry");
    hermitian_ = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= kAlgebraTol;
    unitary_ = (entries_ * entries_.adjoint() -
                Matrix::Identity(entries_.rows(), entries_.cols()))
                   .cwiseAbs()
                   .maxCoeff() <= kNormTol;
  }

  int dim_qubits() const { return dim_qubits_; }
  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  bool hermitian() const { return hermitian_; }
  bool unitary() const { return unitary_; }

  // Hermitian + unitary, i.e. an observable with a +/-1 spectrum.
  bool involution() const { return hermitian_ && unitary_; }

  Operator adjoint() const { return Operator(entries_.adjoint()); }
  Operator conjugate() const { return Operator(entries_.conjugate()); }

 private:
  int dim_qubits_ = 0;
  Matrix entries_;
  bool hermitian_ = false;
  bool unitary_ = false;
};

// ---------------------------------------------------------------------------
// DensityMatrix

template <class Real = double>
class DensityMatrix {
 public:
  using Complex = ComplexT<Real>;
  using Matrix = MatrixC<Real>;

  DensityMatrix() = default;

  explicit DensityMatrix(Matrix entries, bool validate = true)
      : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
      throw std::invalid_argument("density matrix must be square");
    dim_qubits_ = detail::qubits_for_dim(entries_.rows());
    if (!detail::all_finite(entries_))
      throw std::invalid_argument("non-finite density entry");
    if (validate) {
      if (std::abs(entries_.trace().real() - Real{1}) > kNormTol ||
          std::abs(entries_.trace().imag()) > kNormTol)
        throw std::invalid_argument("density matrix trace is not 1");
      if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol)
        throw std::invalid_argument("density matrix is not Hermitian");
      Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kNormTol)
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
  }

  static DensityMatrix from_pure(const StateVector<Real>& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), false);
  }

  template <class Pairs>
  static DensityMatrix from_mixture(const Pairs& weighted_states) {
    Matrix acc;
    for (const auto& [w, psi] : weighted_states) {
      Matrix term = w * (psi.amplitudes() * psi.amplitudes().adjoint());
      if (acc.size() == 0)
        acc = term;
      else
        acc += term;
    }
    return DensityMatrix(std::move(acc));
  }

  int dim_qubits() const { return dim_qubits_; }
  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }

 private:
  int dim_qubits_ = 0;
  Matrix entries_;
};

// ---------------------------------------------------------------------------
// Standard single-qubit constants

template <class Real = double>
Operator<Real> pauli_x() {
  MatrixC<Real> m(2, 2);
  m << ComplexT<Real>{0, 0}, ComplexT<Real>{1, 0}, ComplexT<Real>{1, 0},
      ComplexT<Real>{0, 0};
  return Operator<Real>(m);
}

template <class Real = double>
Operator<Real> pauli_y() {
  MatrixC<Real> m(2, 2);
  m << ComplexT<Real>{0, 0}, ComplexT<Real>{0, -1}, ComplexT<Real>{0, 1},
      ComplexT<Real>{0, 0};
  return Operator<Real>(m);
}

template <class Real = double>
Operator<Real> pauli_z() {
  MatrixC<Real> m(2, 2);
  m << ComplexT<Real>{1, 0}, ComplexT<Real>{0, 0}, ComplexT<Real>{0, 0},
      ComplexT<Real>{-1, 0};
  return Operator<Real>(m);
}

template <class Real = double>
Operator<Real> identity_op(int num_qubits = 1) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return Operator<Real>(MatrixC<Real>::Identity(d, d));
}

template <class Real = double>
Operator<Real> hadamard() {
  const Real s = Real{1} / std::sqrt(Real{2});
  MatrixC<Real> m(2, 2);
  m << ComplexT<Real>{s, 0}, ComplexT<Real>{s, 0}, ComplexT<Real>{s, 0},
      ComplexT<Real>{-s, 0};
  return Operator<Real>(m);
}

// Observable whose +1 eigenstate is |+_theta> = (|0> + e^{i theta}|1>)/sqrt(2):
// cos(theta) X + sin(theta) Y.
template <class Real = double>
Operator<Real> xy_plane_observable(Real theta) {
  MatrixC<Real> m(2, 2);
  m << ComplexT<Real>{0, 0}, std::exp(ComplexT<Real>{0, -theta}),
      std::exp(ComplexT<Real>{0, theta}), ComplexT<Real>{0, 0};
  return Operator<Real>(m);
}

// ---------------------------------------------------------------------------
// State constructors

template <class Real = double>
StateVector<Real> basis_state(int num_qubits, std::uint64_t index) {
  VectorC<Real> v = VectorC<Real>::Zero(Eigen::Index{1} << num_qubits);
  if (index >= static_cast<std::uint64_t>(v.size()))
    throw std::invalid_argument("basis index out of range");
  v(static_cast<Eigen::Index>(index)) = ComplexT<Real>{1, 0};
  return StateVector<Real>(std::move(v));
}

template <class Real = double>
StateVector<Real> plus_theta(Real theta) {
  VectorC<Real> v(2);
  const Real s = Real{1} / std::sqrt(Real{2});
  v << ComplexT<Real>{s, 0}, s * std::exp(ComplexT<Real>{0, theta});
  return StateVector<Real>(std::move(v));
}

// (|00> + |11>)/sqrt(2), labels {A, B}.
template <class Real = double>
StateVector<Real> bell_pair() {
  VectorC<Real> v = VectorC<Real>::Zero(4);
  const Real s = Real{1} / std::sqrt(Real{2});
  v(0) = ComplexT<Real>{s, 0};
  v(3) = ComplexT<Real>{s, 0};
  return StateVector<Real>(std::move(v), {"A", "B"});
}

// ---------------------------------------------------------------------------
// Tensor products

template <class Real>
StateVector<Real> tensor(const StateVector<Real>& a, const StateVector<Real>& b) {
  VectorC<Real> out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  std::vector<std::string> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return StateVector<Real>(std::move(out), std::move(labels), false);
}

template <class Real>
Operator<Real> tensor(const Operator<Real>& a, const Operator<Real>& b) {
  MatrixC<Real> out(a.dim() * b.dim(), a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    for (Eigen::Index j = 0; j < a.dim(); ++j)
      out.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) =
          a.entries()(i, j) * b.entries();
  return Operator<Real>(std::move(out));
}

template <class Real>
DensityMatrix<Real> tensor(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  MatrixC<Real> out(a.dim() * b.dim(), a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    for (Eigen::Index j = 0; j < a.dim(); ++j)
      out.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) =
          a.entries()(i, j) * b.entries();
  return DensityMatrix<Real>(std::move(out), false);
}

template <class T, class... Rest>
T tensor(const T& first, const T& second, const T& third, const Rest&... rest) {
  return tensor(tensor(first, second), third, rest...);
}

// ---------------------------------------------------------------------------
// Applying operators

namespace detail {

template <class Real>
void check_targets(const StateVector<Real>& state, const std::vector<int>& targets,
                   int op_qubits) {
  if (static_cast<int>(targets.size()) != op_qubits)
    throw std::invalid_argument("target count does not match operator arity");
  std::vector<bool> seen(static_cast<std::size_t>(state.num_qubits()), false);
  for (int t : targets) {
    if (t < 0 || t >= state.num_qubits())
      throw std::invalid_argument("target qubit out of range");
    if (seen[static_cast<std::size_t>(t)])
      throw std::invalid_argument("overlapping target qubits");
    seen[static_cast<std::size_t>(t)] = true;
  }
}

}  // namespace detail

// Applies op to the given qubits (first target = most significant operator
// bit). Result is not renormalized: linear maps stay linear so projectors
// and sums of terms can be formed.
template <class Real>
StateVector<Real> apply(const Operator<Real>& op, const StateVector<Real>& state,
                        const std::vector<int>& targets) {
  detail::check_targets(state, targets, op.dim_qubits());
  const int n = state.num_qubits();
  const int k = op.dim_qubits();
  const Eigen::Index dim = state.dim();
  const Eigen::Index block = Eigen::Index{1} << k;

  std::vector<int> shift(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) shift[static_cast<std::size_t>(j)] = n - 1 - targets[static_cast<std::size_t>(j)];

  Eigen::Index target_mask = 0;
  for (int j = 0; j < k; ++j) target_mask |= Eigen::Index{1} << shift[static_cast<std::size_t>(j)];

  VectorC<Real> out = VectorC<Real>::Zero(dim);
  VectorC<Real> in_block(block), out_block(block);
  for (Eigen::Index base = 0; base < dim; ++base) {
    if ((base & target_mask) != 0) continue;  // enumerate strata once
    for (Eigen::Index r = 0; r < block; ++r) {
      Eigen::Index idx = base;
      for (int j = 0; j < k; ++j)
        idx |= ((r >> (k - 1 - j)) & 1) << shift[static_cast<std::size_t>(j)];
      in_block(r) = state.amplitude(idx);
    }
    out_block.noalias() = op.entries() * in_block;
    for (Eigen::Index r = 0; r < block; ++r) {
      Eigen::Index idx = base;
      for (int j = 0; j < k; ++j)
        idx |= ((r >> (k - 1 - j)) & 1) << shift[static_cast<std::size_t>(j)];
      out(idx) = out_block(r);
    }
  }
  return StateVector<Real>(std::move(out), state.labels(), false);
}

template <class Real>
StateVector<Real> apply(const Operator<Real>& op, const StateVector<Real>& state) {
  std::vector<int> targets(static_cast<std::size_t>(state.num_qubits()));
  for (int q = 0; q < state.num_qubits(); ++q) targets[static_cast<std::size_t>(q)] = q;
  return apply(op, state, targets);
}

// Controlled-U with a single control qubit; identity on the control-0 stratum.
template <class Real>
StateVector<Real> apply_controlled(const Operator<Real>& op,
                                   const StateVector<Real>& state, int control,
                                   const std::vector<int>& targets) {
  for (int t : targets)
    if (t == control) throw std::invalid_argument("control overlaps target");
  detail::check_targets(state, targets, op.dim_qubits());
  if (control < 0 || control >= state.num_qubits())
    throw std::invalid_argument("control qubit out of range");

  const int n = state.num_qubits();
  const int k = op.dim_qubits();
  const Eigen::Index block = Eigen::Index{1} << k;
  const int cshift = n - 1 - control;

  std::vector<int> shift(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) shift[static_cast<std::size_t>(j)] = n - 1 - targets[static_cast<std::size_t>(j)];
  Eigen::Index target_mask = 0;
  for (int s : shift) target_mask |= Eigen::Index{1} << s;

  VectorC<Real> out = state.amplitudes();
  VectorC<Real> in_block(block), out_block(block);
  for (Eigen::Index base = 0; base < state.dim(); ++base) {
    if ((base & target_mask) != 0) continue;
    if (((base >> cshift) & 1) == 0) continue;
    for (Eigen::Index r = 0; r < block; ++r) {
      Eigen::Index idx = base;
      for (int j = 0; j < k; ++j)
        idx |= ((r >> (k - 1 - j)) & 1) << shift[static_cast<std::size_t>(j)];
      in_block(r) = state.amplitude(idx);
    }
    out_block.noalias() = op.entries() * in_block;
    for (Eigen::Index r = 0; r < block; ++r) {
      Eigen::Index idx = base;
      for (int j = 0; j < k; ++j)
        idx |= ((r >> (k - 1 - j)) & 1) << shift[static_cast<std::size_t>(j)];
      out(idx) = out_block(r);
    }
  }
  return StateVector<Real>(std::move(out), state.labels(), false);
}

// Controlled-Z: diagonal, sign flip where both bits are 1.
template <class Real>
void apply_cz_inplace(StateVector<Real>& state, int a, int b) {
  if (a == b) throw std::invalid_argument("controlled-Z needs distinct qubits");
  const int n = state.num_qubits();
  const Eigen::Index ma = Eigen::Index{1} << (n - 1 - a);
  const Eigen::Index mb = Eigen::Index{1} << (n - 1 - b);
  auto& amps = state.amplitudes();
  for (Eigen::Index i = 0; i < amps.size(); ++i)
    if ((i & ma) && (i & mb)) amps(i) = -amps(i);
}

// ---------------------------------------------------------------------------
// Inner products, expectation, measurement

template <class Real>
ComplexT<Real> inner_product(const StateVector<Real>& a, const StateVector<Real>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

template <class Real>
Real expectation(const StateVector<Real>& state, const Operator<Real>& obs,
                 const std::vector<int>& targets) {
  if (!obs.hermitian()) throw std::invalid_argument("observable must be Hermitian");
  const StateVector<Real> w = apply(obs, state, targets);
  const ComplexT<Real> val = inner_product(state, w);
  if (std::abs(val.imag()) > kNormTol)
    throw std::logic_error("expectation has non-negligible imaginary part");
  return val.real();
}

template <class Real>
Real expectation(const StateVector<Real>& state, const Operator<Real>& obs) {
  if (obs.dim() != state.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<int> targets(static_cast<std::size_t>(state.num_qubits()));
  for (int q = 0; q < state.num_qubits(); ++q) targets[static_cast<std::size_t>(q)] = q;
  return expectation(state, obs, targets);
}

template <class Real = double>
struct MeasureResult {
  int outcome = 0;  // +1 or -1
  StateVector<Real> post_state;
  Real probability = 0;  // Born probability of the reported outcome
};

// Projective measurement of a Hermitian involution (+/-1 spectrum) on the
// targeted qubits. Outcome sampled from the Born rule using one draw from rng.
template <class Real>
MeasureResult<Real> projective_measure(const StateVector<Real>& state,
                                       const Operator<Real>& obs,
                                       const std::vector<int>& targets,
                                       RandomStream& rng) {
  if (!obs.hermitian()) throw std::invalid_argument("observable must be Hermitian");
  if ((obs.entries() * obs.entries() -
       MatrixC<Real>::Identity(obs.dim(), obs.dim()))
          .cwiseAbs()
          .maxCoeff() > kNormTol)
    throw std::invalid_argument("observable spectrum is not +/-1");

  const StateVector<Real> w = apply(obs, state, targets);
  const ComplexT<Real> ev = inner_product(state, w);
  Real p_plus = (Real{1} + ev.real()) / Real{2};
  p_plus = std::min(Real{1}, std::max(Real{0}, p_plus));

  const int outcome = rng.next_real() < p_plus ? +1 : -1;
  const Real prob = outcome > 0 ? p_plus : Real{1} - p_plus;

  VectorC<Real> post = (state.amplitudes() + Real(outcome) * w.amplitudes()) / Real{2};
  const Real post_norm = post.norm();
  if (post_norm < kNormTol)
    throw std::logic_error("projection onto sampled outcome has zero weight");
  post /= post_norm;
  return MeasureResult<Real>{outcome, StateVector<Real>(std::move(post), state.labels(), false), prob};
}

// Projects qubit q onto the given single-qubit bra and removes it from the
// register. Returns the renormalized remainder and the projection weight.
template <class Real>
std::pair<StateVector<Real>, Real> project_and_remove(
    const StateVector<Real>& state, int q, const Eigen::Matrix<ComplexT<Real>, 2, 1>& onto) {
  const int n = state.num_qubits();
  if (q < 0 || q >= n) throw std::invalid_argument("qubit out of range");
  const int keep_bits = n - 1;
  VectorC<Real> out = VectorC<Real>::Zero(Eigen::Index{1} << keep_bits);
  const int shift = n - 1 - q;
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    const Eigen::Index bitval = (i >> shift) & 1;
    const Eigen::Index low = i & ((Eigen::Index{1} << shift) - 1);
    const Eigen::Index high = (i >> (shift + 1)) << shift;
    out(high | low) += std::conj(onto(bitval)) * state.amplitude(i);
  }
  const Real w = out.norm();
  std::vector<std::string> labels = state.labels();
  labels.erase(labels.begin() + q);
  if (w < kNormTol)
    return {StateVector<Real>(std::move(out), std::move(labels), false), Real{0}};
  out /= w;
  return {StateVector<Real>(std::move(out), std::move(labels), false), w * w};
}

// ---------------------------------------------------------------------------
// Distances and fidelity

// ||a> - |b>||_2, the plain 2-norm of the amplitude difference.
template <class Real>
Real vector_distance(const StateVector<Real>& a, const StateVector<Real>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  return (a.amplitudes() - b.amplitudes()).norm();
}

template <class Real>
Real fidelity(const StateVector<Real>& pure, const DensityMatrix<Real>& rho) {
  if (pure.dim() != rho.dim()) throw std::invalid_argument("dimension mismatch");
  const ComplexT<Real> val =
      (pure.amplitudes().adjoint() * rho.entries() * pure.amplitudes())(0);
  return std::min(Real{1}, std::max(Real{0}, val.real()));
}

// Unnormalized trace norm ||rho - sigma||_tr (orthogonal pure states give 2),
// so that (1/2)||.||_tr <= sqrt(1 - F) holds verbatim.
template <class Real>
Real trace_distance(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("dimension mismatch");
  MatrixC<Real> diff = rho.entries() - sigma.entries();
  Eigen::SelfAdjointEigenSolver<MatrixC<Real>> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Partial trace

template <class Real>
DensityMatrix<Real> partial_trace(const DensityMatrix<Real>& rho,
                                  const std::vector<int>& keep) {
  const int n = rho.dim_qubits();
  std::vector<bool> keep_mask(static_cast<std::size_t>(n), false);
  for (int q : keep) {
    if (q < 0 || q >= n) throw std::invalid_argument("kept qubit out of range");
    if (keep_mask[static_cast<std::size_t>(q)])
      throw std::invalid_argument("duplicate kept qubit");
    keep_mask[static_cast<std::size_t>(q)] = true;
  }
  const int k = static_cast<int>(keep.size());
  const int t = n - k;
  const Eigen::Index kd = Eigen::Index{1} << k;
  const Eigen::Index td = Eigen::Index{1} << t;

  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!keep_mask[static_cast<std::size_t>(q)]) traced.push_back(q);

  // Order of kept qubits in the output follows their order in `keep`.
  auto compose = [&](Eigen::Index kept_bits, Eigen::Index traced_bits) {
    Eigen::Index idx = 0;
    for (int j = 0; j < k; ++j) {
      const int q = keep[static_cast<std::size_t>(j)];
      idx |= ((kept_bits >> (k - 1 - j)) & 1) << (n - 1 - q);
    }
    for (int j = 0; j < t; ++j) {
      const int q = traced[static_cast<std::size_t>(j)];
      idx |= ((traced_bits >> (t - 1 - j)) & 1) << (n - 1 - q);
    }
    return idx;
  };

  MatrixC<Real> out = MatrixC<Real>::Zero(kd, kd);
  for (Eigen::Index i = 0; i < kd; ++i)
    for (Eigen::Index j = 0; j < kd; ++j)
      for (Eigen::Index m = 0; m < td; ++m)
        out(i, j) += rho.entries()(compose(i, m), compose(j, m));
  return DensityMatrix<Real>(std::move(out), false);
}

// Reduced density of a pure state, computed directly from amplitudes (never
// materializes the full outer product).
template <class Real>
DensityMatrix<Real> reduced_density(const StateVector<Real>& psi,
                                    const std::vector<int>& keep) {
  const int n = psi.num_qubits();
  std::vector<bool> keep_mask(static_cast<std::size_t>(n), false);
  for (int q : keep) {
    if (q < 0 || q >= n) throw std::invalid_argument("kept qubit out of range");
    if (keep_mask[static_cast<std::size_t>(q)])
      throw std::invalid_argument("duplicate kept qubit");
    keep_mask[static_cast<std::size_t>(q)] = true;
  }
  const int k = static_cast<int>(keep.size());
  const Eigen::Index kd = Eigen::Index{1} << k;
  MatrixC<Real> out = MatrixC<Real>::Zero(kd, kd);

  std::vector<Eigen::Index> kept_of(static_cast<std::size_t>(psi.dim()), 0);
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    Eigen::Index bits = 0;
    for (int j = 0; j < k; ++j)
      bits = (bits << 1) | ((i >> (n - 1 - keep[static_cast<std::size_t>(j)])) & 1);
    kept_of[static_cast<std::size_t>(i)] = bits;
  }
  // Group amplitudes by the traced-out bits: indices agreeing off `keep`.
  Eigen::Index traced_mask = 0;
  for (int q = 0; q < n; ++q)
    if (!keep_mask[static_cast<std::size_t>(q)]) traced_mask |= Eigen::Index{1} << (n - 1 - q);
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> group_of(static_cast<std::size_t>(psi.dim()));
  {
    std::vector<Eigen::Index> seen(static_cast<std::size_t>(psi.dim()), -1);
    for (Eigen::Index i = 0; i < psi.dim(); ++i) {
      const Eigen::Index key = i & traced_mask;
      if (seen[static_cast<std::size_t>(key)] < 0) {
        seen[static_cast<std::size_t>(key)] = static_cast<Eigen::Index>(groups.size());
        groups.emplace_back();
      }
      groups[static_cast<std::size_t>(seen[static_cast<std::size_t>(key)])].push_back(i);
    }
  }
  for (const auto& group : groups)
    for (Eigen::Index i : group)
      for (Eigen::Index j : group)
        out(kept_of[static_cast<std::size_t>(i)], kept_of[static_cast<std::size_t>(j)]) +=
            psi.amplitude(i) * std::conj(psi.amplitude(j));
  return DensityMatrix<Real>(std::move(out), false);
}

}  // namespace vbqc

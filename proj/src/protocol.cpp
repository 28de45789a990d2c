#include "vbqc/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vbqc/brickwork.hpp"
#include "vbqc/verification.hpp"

namespace vbqc {

namespace {

Eigen::Matrix<ComplexT<double>, 2, 1> xy_eigenvector(double theta, int outcome) {
  // +1 eigenvector of cos X + sin Y is |+_theta>; -1 is |+_{theta+pi}>.
  const double angle = outcome == 1 ? theta : theta + M_PI;
  Eigen::Matrix<ComplexT<double>, 2, 1> v;
  v << ComplexT<double>{1.0 / std::sqrt(2.0), 0.0},
      std::exp(ComplexT<double>{0, angle}) / std::sqrt(2.0);
  return v;
}

Eigen::Matrix<ComplexT<double>, 2, 1> z_eigenvector(int outcome) {
  Eigen::Matrix<ComplexT<double>, 2, 1> v;
  v << ComplexT<double>{outcome == 1 ? 1.0 : 0.0, 0.0},
      ComplexT<double>{outcome == 1 ? 0.0 : 1.0, 0.0};
  return v;
}

Operator<double> rz_conjugated(const Operator<double>& op, double eta) {
  MatrixC<double> rz(2, 2);
  rz << std::exp(ComplexT<double>{0, -eta / 2}), ComplexT<double>{0, 0},
      ComplexT<double>{0, 0}, std::exp(ComplexT<double>{0, eta / 2});
  return Operator<double>(rz * op.entries() * rz.adjoint());
}

const char* direction_of(Message::Kind kind, Message::Channel channel) {
  const bool to_alice = kind == Message::Kind::PairDelivered ||
                        kind == Message::Kind::OutcomeReport ||
                        kind == Message::Kind::ResultReport;
  if (channel == Message::Channel::AliceDevice)
    return to_alice ? "device_to_alice" : "alice_to_device";
  return to_alice ? "bob_to_alice" : "alice_to_bob";
}

const char* kind_name(Message::Kind kind) {
  switch (kind) {
    case Message::Kind::RequestPair: return "request_pair";
    case Message::Kind::PairDelivered: return "pair_delivered";
    case Message::Kind::MeasureInstruction: return "measure_instruction";
    case Message::Kind::OutcomeReport: return "outcome_report";
    case Message::Kind::AngleInstruction: return "angle_instruction";
    case Message::Kind::ResultReport: return "result_report";
    case Message::Kind::AbortNotice: return "abort";
    case Message::Kind::AcceptNotice: return "accept";
  }
  return "unknown";
}

}  // namespace

std::string Message::describe() const {
  std::ostringstream out;
  out << kind_name(kind) << "@" << round << " " << direction_of(kind, channel)
      << " payload=" << payload;
  return out.str();
}

void ProtocolTranscript::append(Message::Kind kind, Message::Channel channel, int round,
                                int payload) {
  messages.push_back(Message{kind, channel, round, payload});
}

std::string ProtocolTranscript::to_jsonl() const {
  std::ostringstream out;
  for (const auto& m : messages) {
    nlohmann::json j;
    j["round"] = m.round;
    j["direction"] = direction_of(m.kind, m.channel);
    j["payload"] = {{"type", kind_name(m.kind)}, {"value", m.payload}};
    out << j.dump() << "\n";
  }
  return out.str();
}

std::uint64_t ProtocolTranscript::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  const std::string text = to_jsonl();
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Strategies

StateVector<double> ProverStrategy::prepare_pair(RandomStream&) { return bell_pair(); }

int ProverStrategy::measure_alice(StateVector<double>& pair,
                                  const Operator<double>& requested, RandomStream& rng) {
  auto result = projective_measure(pair, requested, {0}, rng);
  pair = std::move(result.post_state);
  return result.outcome;
}

int ProverStrategy::measure_bob(StateVector<double>& pair,
                                const Operator<double>& requested, RandomStream& rng) {
  auto result = projective_measure(pair, requested, {1}, rng);
  pair = std::move(result.post_state);
  return result.outcome;
}

int ProverStrategy::compute_measure(MeasurementContext& ctx, RandomStream&) {
  return ctx.measure_instructed();
}

DepolarizingStrategy::DepolarizingStrategy(double q) : q_(q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
}

StateVector<double> DepolarizingStrategy::prepare_pair(RandomStream& rng) {
  // Werner pair as a per-round classical mixture over the Bell basis.
  const double u = rng.next_real();
  const double p_ideal = (1.0 + 3.0 * q_) / 4.0;
  VectorC<double> v = VectorC<double>::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  if (u < p_ideal) {
    v(0) = s;
    v(3) = s;  // phi+
  } else if (u < p_ideal + (1.0 - q_) / 4.0) {
    v(0) = s;
    v(3) = -s;  // phi-
  } else if (u < p_ideal + 2.0 * (1.0 - q_) / 4.0) {
    v(1) = s;
    v(2) = s;  // psi+
  } else {
    v(1) = s;
    v(2) = -s;  // psi-
  }
  return StateVector<double>(std::move(v), {"A", "B"});
}

MiscalibratedStrategy::MiscalibratedStrategy(double eta) : eta_(eta) {}

int MiscalibratedStrategy::measure_bob(StateVector<double>& pair,
                                       const Operator<double>& requested,
                                       RandomStream& rng) {
  return ProverStrategy::measure_bob(pair, rz_conjugated(requested, eta_), rng);
}

int MiscalibratedStrategy::compute_measure(MeasurementContext& ctx, RandomStream&) {
  return ctx.measure_at_radians(ctx.instructed().radians() + eta_);
}

StateVector<double> ClassicalCheatStrategy::prepare_pair(RandomStream&) {
  return StateVector<double>(basis_state<double>(2, 0).amplitudes(), {"A", "B"});
}

int ClassicalCheatStrategy::measure_bob(StateVector<double>&, const Operator<double>&,
                                        RandomStream&) {
  return 1;
}

int FlipAllStrategy::compute_measure(MeasurementContext& ctx, RandomStream&) {
  return 1 - ctx.measure_instructed();
}

int SingleVertexDeviateStrategy::compute_measure(MeasurementContext& ctx, RandomStream&) {
  const int bit = ctx.measure_instructed();
  return ctx.vertex() == target_ ? 1 - bit : bit;
}

// ---------------------------------------------------------------------------
// Phase one

namespace {

struct PrepOutcome {
  bool ok = true;
  std::string error;
  PreparedQubit qubit;
};

PrepOutcome prepare_from_pair(PrepKind kind, StateVector<double>& pair, int outcome,
                              AngleOctant theta) {
  PrepOutcome out;
  out.qubit.kind = kind;
  Eigen::Matrix<ComplexT<double>, 2, 1> collapsed;
  if (kind == PrepKind::Dummy) {
    out.qubit.dummy_bit = outcome == 1 ? 0 : 1;
    collapsed = z_eigenvector(outcome);
  } else {
    out.qubit.label_octant = (theta.k + (outcome == 1 ? 0 : 4)) % 8;
    collapsed = xy_eigenvector(theta.radians(), outcome);
  }
  auto [residual, weight] = project_and_remove(pair, 0, collapsed);
  if (std::abs(weight - 1.0) > 1e-9) {
    out.ok = false;
    out.error = "device post-state inconsistent with reported outcome";
    return out;
  }
  out.qubit.bob_residual = std::move(residual);
  return out;
}

}  // namespace

PreparedQubit remote_prepare_round(PrepKind kind, RandomStream& rng,
                                   const StateVector<double>& pair) {
  if (pair.num_qubits() != 2) throw std::invalid_argument("pair must be two qubits");
  StateVector<double> working = pair;
  AngleOctant theta;
  Operator<double> obs = pauli_z();
  if (kind != PrepKind::Dummy) {
    theta = uniform_octant(rng);
    obs = xy_plane_observable(theta.radians());
  }
  auto result = projective_measure(working, obs, {0}, rng);
  working = std::move(result.post_state);
  auto prep = prepare_from_pair(kind, working, result.outcome, theta);
  if (!prep.ok) throw std::logic_error(prep.error);
  return std::move(prep.qubit);
}

PhaseOneResult run_phase_one(const SecurityParams& params, ProverStrategy& alice_device,
                             ProverStrategy& bob, RandomStream& rng,
                             const std::vector<PrepKind>& prep_kinds,
                             ConfidenceConvention convention) {
  params.validate();
  if (static_cast<int>(prep_kinds.size()) != params.m)
    throw std::invalid_argument("prep_kinds must have one entry per prepared qubit");

  RandomStream alice = rng.split(0);
  RandomStream device = rng.split(1);
  RandomStream bob_rng = rng.split(2);

  const long long total = params.total_rounds();
  PhaseOneResult result;
  result.rounds_executed = total;

  // Hidden uniform interleaving: slots 0..m-1 are preparation rounds, the
  // rest are tests.
  std::vector<long long> role_of(static_cast<std::size_t>(total), -1);
  for (long long i = 0; i < params.m; ++i) role_of[static_cast<std::size_t>(i)] = i;
  for (long long i = total - 1; i > 0; --i) {
    const auto j = static_cast<long long>(alice.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(role_of[static_cast<std::size_t>(i)], role_of[static_cast<std::size_t>(j)]);
  }

  std::vector<PreparedQubit> prepared(prep_kinds.size());
  auto abort_with = [&](const std::string& why) {
    result.verdict = {Verdict::Code::ProtocolViolation, std::nullopt, why};
    result.transcript.append(Message::Kind::AbortNotice, Message::Channel::Bob,
                             static_cast<int>(total));
    return result;
  };

  for (long long round = 0; round < total; ++round) {
    const int r = static_cast<int>(round);
    result.transcript.append(Message::Kind::RequestPair, Message::Channel::Bob, r);
    auto pair = bob.prepare_pair(bob_rng);
    if (pair.num_qubits() != 2 || std::abs(pair.norm() - 1.0) > kNormTol)
      return abort_with("malformed pair from prover");
    result.transcript.append(Message::Kind::PairDelivered, Message::Channel::Bob, r);

    const long long slot = role_of[static_cast<std::size_t>(round)];
    if (slot < 0) {
      const auto& setting =
          all_settings()[static_cast<std::size_t>(alice.next_below(14))];
      result.transcript.append(Message::Kind::MeasureInstruction,
                               Message::Channel::AliceDevice, r,
                               static_cast<int>(setting.alpha));
      const int a = alice_device.measure_alice(
          pair, observable_matrix(setting.alpha), device);
      if (a != 1 && a != -1) return abort_with("device reported a non +-1 outcome");
      result.transcript.append(Message::Kind::OutcomeReport,
                               Message::Channel::AliceDevice, r, a);

      result.transcript.append(Message::Kind::MeasureInstruction, Message::Channel::Bob,
                               r, static_cast<int>(setting.beta));
      const int b = bob.measure_bob(pair, observable_matrix(setting.beta), bob_rng);
      if (b != 1 && b != -1) return abort_with("prover reported a non +-1 outcome");
      result.transcript.append(Message::Kind::OutcomeReport, Message::Channel::Bob, r, b);
      result.ledger.record(setting, a, b);
    } else {
      const PrepKind kind = prep_kinds[static_cast<std::size_t>(slot)];
      AngleOctant theta;
      Operator<double> obs = pauli_z();
      int basis_payload = 8;  // computational basis marker
      if (kind != PrepKind::Dummy) {
        theta = uniform_octant(alice);
        obs = xy_plane_observable(theta.radians());
        basis_payload = theta.k;
      }
      result.transcript.append(Message::Kind::MeasureInstruction,
                               Message::Channel::AliceDevice, r, basis_payload);
      const int a = alice_device.measure_alice(pair, obs, device);
      if (a != 1 && a != -1) return abort_with("device reported a non +-1 outcome");
      result.transcript.append(Message::Kind::OutcomeReport,
                               Message::Channel::AliceDevice, r, a);
      auto prep = prepare_from_pair(kind, pair, a, theta);
      if (!prep.ok) return abort_with(prep.error);
      prepared[static_cast<std::size_t>(slot)] = std::move(prep.qubit);
    }
  }

  result.verdict = acceptance_check(result.ledger, params, convention);
  result.transcript.append(result.verdict.accepted() ? Message::Kind::AcceptNotice
                                                     : Message::Kind::AbortNotice,
                           Message::Channel::Bob, static_cast<int>(total));
  if (result.verdict.accepted()) result.prepared = std::move(prepared);
  return result;
}

// ---------------------------------------------------------------------------
// Phase two

namespace {

VertexRole role_of_kind(PrepKind kind) {
  switch (kind) {
    case PrepKind::Computation: return VertexRole::Computation;
    case PrepKind::Trap: return VertexRole::Trap;
    case PrepKind::Dummy: return VertexRole::Dummy;
  }
  throw std::logic_error("bad prep kind");
}

class StrategyComputeProver : public ComputeProver {
 public:
  StrategyComputeProver(ProverStrategy& strategy, RandomStream& rng)
      : strategy_(strategy), rng_(rng) {}
  int on_compute_measure(MeasurementContext& ctx) override {
    return strategy_.compute_measure(ctx, rng_);
  }

 private:
  ProverStrategy& strategy_;
  RandomStream& rng_;
};

}  // namespace

BrickworkPattern pattern_from_prepared(const BrickworkGraph& graph,
                                       const TapeAssignment& tape,
                                       const std::vector<AngleOctant>& phi,
                                       const std::vector<PreparedQubit>& prepared,
                                       RandomStream& rng) {
  const auto roles = role_map(graph, tape);
  const auto n = static_cast<std::size_t>(graph.vertex_count());
  if (prepared.size() != n)
    throw std::invalid_argument("one prepared qubit per vertex required");

  std::vector<AngleOctant> theta(n);
  std::vector<int> r(n, 0), d(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (role_of_kind(prepared[i].kind) != roles[i])
      throw std::invalid_argument("prepared kinds do not match the tape");
    if (prepared[i].kind == PrepKind::Dummy) {
      d[i] = prepared[i].dummy_bit;
    } else {
      // Bob holds |+_{-label}>: the server-side angle is the negated label.
      theta[i] = AngleOctant(-prepared[i].label_octant);
      r[i] = rng.next_bit();
    }
  }
  return BrickworkPattern::assemble(graph, roles, phi, theta, r, d);
}

PhaseTwoResult run_phase_two(const std::vector<PreparedQubit>& prepared,
                             const BrickworkPattern& pattern, ProverStrategy& bob,
                             RandomStream& rng) {
  const auto n = static_cast<std::size_t>(pattern.vertex_count());
  if (prepared.size() != n)
    throw std::invalid_argument("one prepared qubit per vertex required");

  std::vector<StateVector<double>> inputs;
  inputs.reserve(n);
  for (const auto& q : prepared) inputs.push_back(q.bob_residual);

  RandomStream alice = rng.split(0);
  RandomStream bob_rng = rng.split(1);
  StrategyComputeProver adapter(bob, bob_rng);
  auto streamed = streaming_execute(pattern, inputs, adapter, alice, bob_rng);

  PhaseTwoResult result;
  result.verdict = verify_traps(streamed.transcript, pattern);
  result.output_bits = std::move(streamed.output_bits);
  result.transcript = std::move(streamed.transcript);
  result.transcript.verdict = result.verdict;
  return result;
}

// ---------------------------------------------------------------------------
// Blindness auditing

DensityMatrix<double> prep_round_view(PrepKind kind, AngleOctant theta) {
  const auto pair = bell_pair();
  std::vector<std::pair<double, StateVector<double>>> mixture;
  for (int outcome : {+1, -1}) {
    const auto collapsed = kind == PrepKind::Dummy
                               ? z_eigenvector(outcome)
                               : xy_eigenvector(theta.radians(), outcome);
    auto [residual, weight] = project_and_remove(pair, 0, collapsed);
    if (weight > 0) mixture.emplace_back(weight, std::move(residual));
  }
  return DensityMatrix<double>::from_mixture(mixture);
}

std::vector<DensityMatrix<double>> prep_views(const std::vector<PrepKind>& kinds,
                                              const std::vector<AngleOctant>& thetas) {
  if (kinds.size() != thetas.size())
    throw std::invalid_argument("kinds and secrets must align");
  std::vector<DensityMatrix<double>> views;
  views.reserve(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i)
    views.push_back(prep_round_view(kinds[i], thetas[i]));
  return views;
}

double blindness_audit(const std::vector<DensityMatrix<double>>& view_a,
                       const std::vector<DensityMatrix<double>>& view_b) {
  if (view_a.size() != view_b.size())
    throw std::invalid_argument("mismatched run shapes");
  double advantage = 0.0;
  for (std::size_t i = 0; i < view_a.size(); ++i)
    advantage = std::max(advantage, 0.5 * trace_distance(view_a[i], view_b[i]));
  return advantage;
}

// ---------------------------------------------------------------------------
// Full session

SessionResult run_full_session(const SessionConfig& config, ProverStrategy& alice_device,
                               ProverStrategy& bob, std::uint64_t seed) {
  config.params.validate();
  const auto graph = BrickworkGraph::cylinder(config.rows, config.cols);
  if (config.params.m != graph.vertex_count())
    throw std::invalid_argument("params.m must equal rows * cols");
  std::vector<AngleOctant> phi = config.phi;
  if (phi.empty()) phi.assign(static_cast<std::size_t>(graph.vertex_count()), AngleOctant(0));
  if (static_cast<int>(phi.size()) != graph.vertex_count())
    throw std::invalid_argument("phi must have one angle per vertex");

  RandomStream session(seed);
  RandomStream tape_rng = session.split(1);
  RandomStream p1_rng = session.split(2);
  RandomStream pattern_rng = session.split(3);
  RandomStream p2_rng = session.split(4);

  SessionResult result;
  result.tape = choose_tape(graph, config.params.delta_frac, tape_rng);
  const auto roles = role_map(graph, result.tape);
  std::vector<PrepKind> kinds;
  kinds.reserve(roles.size());
  for (auto role : roles)
    kinds.push_back(role == VertexRole::Computation ? PrepKind::Computation
                    : role == VertexRole::Trap      ? PrepKind::Trap
                                                    : PrepKind::Dummy);

  result.report = make_bound_report(config.params, config.convention);
  result.phase_one =
      run_phase_one(config.params, alice_device, bob, p1_rng, kinds, config.convention);
  if (!result.phase_one.verdict.accepted()) return result;

  const auto pattern = pattern_from_prepared(graph, result.tape, phi,
                                             *result.phase_one.prepared, pattern_rng);
  result.phase_two = run_phase_two(*result.phase_one.prepared, pattern, bob, p2_rng);
  return result;
}

}  // namespace vbqc

#pragma once

// The interacting machines: Alice (classical verifier), her untrusted
// measurement device and Bob, both modeled as strategy objects over a
// simulated message channel. Phase one interleaves self-testing rounds with
// remote state preparation; phase two hands the prepared qubits to the blind
// brickwork execution.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vbqc/pattern.hpp"
#include "vbqc/selftest.hpp"
#include "vbqc/state.hpp"
#include "vbqc/streaming.hpp"

namespace vbqc {

struct Message {
  enum class Kind {
    RequestPair,
    PairDelivered,
    MeasureInstruction,
    OutcomeReport,
    AngleInstruction,
    ResultReport,
    AbortNotice,
    AcceptNotice,
  };
  enum class Channel { AliceDevice, Bob };

  Kind kind = Kind::RequestPair;
  Channel channel = Channel::Bob;
  int round = 0;
  int payload = 0;  // basis index, +-1 outcome, octant, or bit

  std::string describe() const;
};

struct ProtocolTranscript {
  std::vector<Message> messages;

  void append(Message::Kind kind, Message::Channel channel, int round, int payload = 0);
  std::string to_jsonl() const;
  std::uint64_t hash() const;
};

// One half of the untrusted hardware. Alice's measuring device implements
// measure_alice; Bob implements the other three. Strategies may keep their
// own classical memory; the shared quantum state lives in the session and is
// passed in per call. A strategy never sees theta, r, roles or the tape.
class ProverStrategy {
 public:
  virtual ~ProverStrategy() = default;
  virtual std::string name() const = 0;

  // Bob: fresh 2-qubit state for this round; qubit 0 travels to Alice.
  virtual StateVector<double> prepare_pair(RandomStream& rng);
  // Alice's device: measure qubit 0 with the requested observable, +-1.
  virtual int measure_alice(StateVector<double>& pair, const Operator<double>& requested,
                            RandomStream& rng);
  // Bob: measure qubit 1 with the requested observable, +-1.
  virtual int measure_bob(StateVector<double>& pair, const Operator<double>& requested,
                          RandomStream& rng);
  // Bob in phase two: act on the live state through the context.
  virtual int compute_measure(MeasurementContext& ctx, RandomStream& rng);
};

// Faithful device on both roles.
class HonestStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "honest"; }
};

// Werner pairs: the ideal Bell pair with probability (1+3q)/4, one of the
// other Bell states otherwise. Measurements faithful.
class DepolarizingStrategy : public ProverStrategy {
 public:
  explicit DepolarizingStrategy(double q);
  std::string name() const override { return "depolarizing"; }
  StateVector<double> prepare_pair(RandomStream& rng) override;

 private:
  double q_;
};

// Bob's measurement bases rotated in the equatorial plane by eta.
class MiscalibratedStrategy : public ProverStrategy {
 public:
  explicit MiscalibratedStrategy(double eta);
  std::string name() const override { return "miscalibrated"; }
  int measure_bob(StateVector<double>& pair, const Operator<double>& requested,
                  RandomStream& rng) override;
  int compute_measure(MeasurementContext& ctx, RandomStream& rng) override;

 private:
  double eta_;
};

// No entanglement: delivers |00> and reports +1 for every test measurement.
class ClassicalCheatStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "classical-cheat"; }
  StateVector<double> prepare_pair(RandomStream& rng) override;
  int measure_bob(StateVector<double>& pair, const Operator<double>& requested,
                  RandomStream& rng) override;
};

// Phase-two adversaries: honest physics, lying reports.
class FlipAllStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "flip-all"; }
  int compute_measure(MeasurementContext& ctx, RandomStream& rng) override;
};

class SingleVertexDeviateStrategy : public ProverStrategy {
 public:
  explicit SingleVertexDeviateStrategy(VertexId v) : target_(v) {}
  std::string name() const override { return "single-vertex-deviate"; }
  int compute_measure(MeasurementContext& ctx, RandomStream& rng) override;

 private:
  VertexId target_;
};

// ---------------------------------------------------------------------------
// Phase one

enum class PrepKind { Computation, Trap, Dummy };

struct PreparedQubit {
  PrepKind kind = PrepKind::Computation;
  int label_octant = -1;  // theta label, outcome already folded in (+4 on minus)
  int dummy_bit = -1;
  StateVector<double> bob_residual;  // single qubit
};

struct PhaseOneResult {
  Verdict verdict;
  CorrelationLedger ledger;
  // Released only when the verdict accepts.
  std::optional<std::vector<PreparedQubit>> prepared;
  ProtocolTranscript transcript;
  long long rounds_executed = 0;
};

// Runs the N = m + 14 c n_tilde rounds with a hidden uniform interleaving of
// test and preparation roles. prep_kinds must have m entries (the role each
// prepared qubit will play, in vertex order). Party randomness is split off
// `rng`: child 0 drives Alice's choices, 1 the device, 2 Bob.
PhaseOneResult run_phase_one(const SecurityParams& params, ProverStrategy& alice_device,
                             ProverStrategy& bob, RandomStream& rng,
                             const std::vector<PrepKind>& prep_kinds,
                             ConfidenceConvention convention =
                                 ConfidenceConvention::PerSession);

// One remote-preparation round with an honest measuring device: measures
// Alice's half of `pair` in the theta (or computational) basis and returns
// the stored label plus Bob's residual qubit.
PreparedQubit remote_prepare_round(PrepKind kind, RandomStream& rng,
                                   const StateVector<double>& pair);

// ---------------------------------------------------------------------------
// Phase two

struct PhaseTwoResult {
  Verdict verdict;
  std::vector<int> output_bits;
  Transcript transcript;
};

// Assembles the blind pattern from phase-one outputs: server-side theta is
// the negated label, dummies carry their measured bit, r is drawn fresh.
BrickworkPattern pattern_from_prepared(const BrickworkGraph& graph,
                                       const TapeAssignment& tape,
                                       const std::vector<AngleOctant>& phi,
                                       const std::vector<PreparedQubit>& prepared,
                                       RandomStream& rng);

PhaseTwoResult run_phase_two(const std::vector<PreparedQubit>& prepared,
                             const BrickworkPattern& pattern, ProverStrategy& bob,
                             RandomStream& rng);

// ---------------------------------------------------------------------------
// Blindness auditing

// Bob's view of one preparation round with Alice's secret fixed: the residual
// density averaged over her hidden outcome, built by explicit enumeration on
// the honest pair.
DensityMatrix<double> prep_round_view(PrepKind kind, AngleOctant theta);
std::vector<DensityMatrix<double>> prep_views(const std::vector<PrepKind>& kinds,
                                              const std::vector<AngleOctant>& thetas);

// Largest per-round distinguishing advantage, max_j (1/2)||rho_a - rho_b||_tr.
double blindness_audit(const std::vector<DensityMatrix<double>>& view_a,
                       const std::vector<DensityMatrix<double>>& view_b);

// ---------------------------------------------------------------------------
// Full session glue

struct SessionConfig {
  SecurityParams params;
  int rows = 4;
  int cols = 9;
  std::vector<AngleOctant> phi;  // per vertex; empty means all zero
  ConfidenceConvention convention = ConfidenceConvention::PerSession;
};

struct SessionResult {
  PhaseOneResult phase_one;
  std::optional<PhaseTwoResult> phase_two;
  BoundReport report;
  TapeAssignment tape;
};

// Phase one, tape + pattern assembly, then phase two, under one session seed.
SessionResult run_full_session(const SessionConfig& config, ProverStrategy& alice_device,
                               ProverStrategy& bob, std::uint64_t seed);

}  // namespace vbqc

#pragma once

// Column-streaming execution of a blind brickwork pattern against a prover:
// only the active column pair is ever live, so memory stays at 2 rows of
// qubits. Also the transcript log and the trap acceptance check.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vbqc/pattern.hpp"
#include "vbqc/selftest.hpp"
#include "vbqc/state.hpp"

namespace vbqc {

struct TranscriptEntry {
  int round = 0;
  VertexId vertex = 0;
  AngleOctant delta;     // instruction sent to the prover
  int reported_bit = 0;  // bit the prover sent back
  // Simulation metadata (not wire content): what the honest measurement
  // produced and with which Born probability.
  int measured_bit = 0;
  double probability = 0;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::optional<Verdict> verdict;

  // JSON lines, one wire message per line: round, direction, payload.
  std::string to_jsonl() const;
  // FNV-1a over the wire messages; identical seeds give identical hashes.
  std::uint64_t hash() const;
};

// Handle the prover uses to act on the live quantum state for one round.
// The honest action is measure_instructed(); measure_at() lets a strategy
// deviate in basis. Exactly one measurement must be performed per round.
class MeasurementContext {
 public:
  VertexId vertex() const { return vertex_; }
  AngleOctant instructed() const { return instructed_; }

  int measure_instructed() { return measure_at_radians(instructed_.radians()); }
  int measure_at(AngleOctant angle) { return measure_at_radians(angle.radians()); }
  int measure_at_radians(double angle);

  bool measured() const { return measured_; }
  int measured_bit() const { return bit_; }
  double probability() const { return prob_; }

 private:
  friend class StreamingExecutor;
  MeasurementContext(VertexId v, AngleOctant delta, class StreamingExecutor* exec)
      : vertex_(v), instructed_(delta), executor_(exec) {}

  VertexId vertex_;
  AngleOctant instructed_;
  class StreamingExecutor* executor_;
  bool measured_ = false;
  int bit_ = 0;
  double prob_ = 0;
};

// Minimal prover surface for phase two; the protocol-level strategies
// implement it.
class ComputeProver {
 public:
  virtual ~ComputeProver() = default;
  virtual int on_compute_measure(MeasurementContext& ctx) = 0;
};

class HonestComputeProver : public ComputeProver {
 public:
  int on_compute_measure(MeasurementContext& ctx) override {
    return ctx.measure_instructed();
  }
};

struct StreamingResult {
  Transcript transcript;
  std::vector<int> corrected;    // s_i = b_i ^ r_i per vertex (-1 if dummy)
  std::vector<int> output_bits;  // corrected bits of output computation vertices
  int max_live_qubits = 0;
};

// Runs the pattern column by column. `inputs` holds one single-qubit state
// per vertex (the prover-side preparations); per round Alice computes delta,
// the prover acts through the context, and Alice records s = b ^ r.
// The prover's quantum state is owned here; its strategy only chooses how
// to act and what to report.
StreamingResult streaming_execute(const BrickworkPattern& pattern,
                                  const std::vector<StateVector<double>>& inputs,
                                  ComputeProver& prover, RandomStream& alice_rng,
                                  RandomStream& device_rng);

// Accept iff every trap's reported bit equals its flip bit. Throws if the
// pattern has no traps (configuration error, not a rejection).
Verdict verify_traps(const Transcript& transcript, const BrickworkPattern& pattern);

}  // namespace vbqc

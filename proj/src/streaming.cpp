#include "vbqc/streaming.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vbqc {

std::string Transcript::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    nlohmann::json tx;
    tx["round"] = e.round;
    tx["direction"] = "alice_to_bob";
    tx["payload"] = {{"type", "angle"}, {"vertex", e.vertex}, {"delta", e.delta.k}};
    out << tx.dump() << "\n";
    nlohmann::json rx;
    rx["round"] = e.round;
    rx["direction"] = "bob_to_alice";
    rx["payload"] = {{"type", "result"}, {"vertex", e.vertex}, {"bit", e.reported_bit}};
    out << rx.dump() << "\n";
  }
  if (verdict) {
    nlohmann::json v;
    v["round"] = static_cast<int>(entries.size());
    v["direction"] = "alice_to_bob";
    v["payload"] = {{"type", "verdict"}, {"accept", verdict->accepted()}};
    out << v.dump() << "\n";
  }
  return out.str();
}

std::uint64_t Transcript::hash() const {
  // FNV-1a over the serialized wire messages.
  std::uint64_t h = 14695981039346656037ull;
  const std::string text = to_jsonl();
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class StreamingExecutor {
 public:
  StreamingExecutor(const BrickworkPattern& pattern,
                    const std::vector<StateVector<double>>& inputs,
                    ComputeProver& prover, RandomStream& alice_rng,
                    RandomStream& device_rng)
      : pattern_(pattern),
        inputs_(inputs),
        prover_(prover),
        alice_rng_(alice_rng),
        device_rng_(device_rng) {}

  StreamingResult run() {
    const auto& graph = pattern_.graph();
    if (static_cast<int>(inputs_.size()) != graph.vertex_count())
      throw std::invalid_argument("one prepared input per vertex required");

    StreamingResult result;
    result.corrected.assign(static_cast<std::size_t>(graph.vertex_count()), -1);
    s_.assign(static_cast<std::size_t>(graph.vertex_count()), -1);

    introduce_column(1);
    int round = 0;
    for (int c = 1; c <= graph.cols(); ++c) {
      if (c < graph.cols()) introduce_column(c + 1);
      result.max_live_qubits = std::max(result.max_live_qubits, live_.num_qubits());
      for (int r = 1; r <= graph.rows(); ++r) {
        const VertexId v = graph.id(r, c);
        const AngleOctant delta = compute_delta(v, pattern_, s_, alice_rng_);

        MeasurementContext ctx(v, delta, this);
        const int reported = prover_.on_compute_measure(ctx);
        if (!ctx.measured())
          throw std::runtime_error("prover skipped the measurement");
        if (reported != 0 && reported != 1)
          throw std::runtime_error("prover returned a malformed bit");

        TranscriptEntry entry;
        entry.round = round++;
        entry.vertex = v;
        entry.delta = delta;
        entry.reported_bit = reported;
        entry.measured_bit = ctx.measured_bit();
        entry.probability = ctx.probability();
        result.transcript.entries.push_back(entry);

        const auto& vx = pattern_.vertex(v);
        if (vx.role == VertexRole::Dummy) {
          s_[static_cast<std::size_t>(v)] = 0;  // discarded; carries no signal
        } else {
          s_[static_cast<std::size_t>(v)] = reported ^ vx.r;
          result.corrected[static_cast<std::size_t>(v)] = reported ^ vx.r;
        }
      }
    }

    for (VertexId v : pattern_.output_computation_vertices())
      result.output_bits.push_back(result.corrected[static_cast<std::size_t>(v)]);
    return result;
  }

 private:
  friend class MeasurementContext;

  void introduce_column(int c) {
    const auto& graph = pattern_.graph();
    for (int r = 1; r <= graph.rows(); ++r) {
      const VertexId v = graph.id(r, c);
      const auto& input = inputs_[static_cast<std::size_t>(v)];
      if (input.num_qubits() != 1)
        throw std::invalid_argument("prepared inputs must be single qubits");
      live_ = tensor(live_, input);  // live_ starts as the trivial register
      live_ids_.push_back(v);
    }
    // Entangle every edge that just became live: verticals inside column c
    // and horizontals from column c-1.
    for (int r = 1; r <= graph.rows(); ++r) {
      const VertexId v = graph.id(r, c);
      for (VertexId u : graph.neighbours(v)) {
        const int uc = graph.col_of(u);
        if (uc == c && u < v)
          apply_cz_inplace(live_, live_index(u), live_index(v));
        else if (uc == c - 1)
          apply_cz_inplace(live_, live_index(u), live_index(v));
      }
    }
  }

  int live_index(VertexId v) const {
    for (std::size_t i = 0; i < live_ids_.size(); ++i)
      if (live_ids_[i] == v) return static_cast<int>(i);
    throw std::logic_error("vertex is not live");
  }

  // One Born draw per measurement; the measured qubit is contracted out.
  std::pair<int, double> measure_and_remove(VertexId v, double angle) {
    const int q = live_index(v);
    Eigen::Matrix<ComplexT<double>, 2, 1> plus;
    plus << ComplexT<double>{1.0 / std::sqrt(2.0), 0.0},
        std::exp(ComplexT<double>{0, angle}) / std::sqrt(2.0);

    auto [post_plus, p_plus] = project_and_remove(live_, q, plus);
    const double u = device_rng_.next_real();
    int bit;
    double prob;
    if (u < p_plus) {
      bit = 0;
      prob = p_plus;
      live_ = std::move(post_plus);
    } else {
      Eigen::Matrix<ComplexT<double>, 2, 1> minus;
      minus << plus(0), -plus(1);
      auto [post_minus, p_minus] = project_and_remove(live_, q, minus);
      if (p_minus < 1e-14)
        throw std::logic_error("sampled a zero-weight measurement branch");
      bit = 1;
      prob = p_minus;
      live_ = std::move(post_minus);
    }
    live_ids_.erase(live_ids_.begin() + q);
    return {bit, prob};
  }

  const BrickworkPattern& pattern_;
  const std::vector<StateVector<double>>& inputs_;
  ComputeProver& prover_;
  RandomStream& alice_rng_;
  RandomStream& device_rng_;
  StateVector<double> live_{0};
  std::vector<VertexId> live_ids_;
  std::vector<int> s_;
};

int MeasurementContext::measure_at_radians(double angle) {
  if (measured_) throw std::runtime_error("round already measured");
  auto [bit, prob] = executor_->measure_and_remove(vertex_, angle);
  measured_ = true;
  bit_ = bit;
  prob_ = prob;
  return bit;
}

StreamingResult streaming_execute(const BrickworkPattern& pattern,
                                  const std::vector<StateVector<double>>& inputs,
                                  ComputeProver& prover, RandomStream& alice_rng,
                                  RandomStream& device_rng) {
  return StreamingExecutor(pattern, inputs, prover, alice_rng, device_rng).run();
}

Verdict verify_traps(const Transcript& transcript, const BrickworkPattern& pattern) {
  const auto traps = pattern.trap_vertices();
  if (traps.empty())
    throw std::invalid_argument("pattern has no traps to verify");

  std::vector<int> reported(static_cast<std::size_t>(pattern.vertex_count()), -1);
  for (const auto& e : transcript.entries)
    reported[static_cast<std::size_t>(e.vertex)] = e.reported_bit;

  for (VertexId t : traps) {
    const int b = reported[static_cast<std::size_t>(t)];
    if (b < 0) throw std::invalid_argument("transcript is missing a trap round");
    if (b != pattern.vertex(t).r)
      return {Verdict::Code::TrapFailure, std::nullopt,
              "trap vertex " + std::to_string(t)};
  }
  return {Verdict::Code::Accept, std::nullopt, ""};
}

}  // namespace vbqc

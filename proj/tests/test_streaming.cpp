#include "vbqc/streaming.hpp"

#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace vbqc;

namespace {

struct FlipAllBits : ComputeProver {
  int on_compute_measure(MeasurementContext& ctx) override {
    return 1 - ctx.measure_instructed();
  }
};

struct FlipOneVertex : ComputeProver {
  explicit FlipOneVertex(VertexId v) : target(v) {}
  VertexId target;
  int on_compute_measure(MeasurementContext& ctx) override {
    const int b = ctx.measure_instructed();
    return ctx.vertex() == target ? 1 - b : b;
  }
};

struct SkipsMeasurement : ComputeProver {
  int on_compute_measure(MeasurementContext&) override { return 0; }
};

struct MalformedBit : ComputeProver {
  int on_compute_measure(MeasurementContext& ctx) override {
    ctx.measure_instructed();
    return 7;
  }
};

// All-computation pattern on a small non-strict graph with random angles.
BrickworkPattern random_small_pattern(int rows, int cols, RandomStream& rng) {
  const auto g = BrickworkGraph::make(rows, cols, true, false);
  TapeAssignment no_tape;
  no_tape.band_rows = 0;
  std::vector<AngleOctant> phi;
  for (int v = 0; v < g.vertex_count(); ++v) phi.push_back(uniform_octant(rng));
  return BrickworkPattern::build(g, no_tape, phi, rng);
}

BrickworkPattern taped_pattern(int rows, int cols, double delta_frac,
                               const std::vector<AngleOctant>& phi, RandomStream& rng) {
  const auto g = BrickworkGraph::cylinder(rows, cols);
  const auto tape = choose_tape(g, delta_frac, rng);
  return BrickworkPattern::build(g, tape, phi, rng);
}

}  // namespace

TEST_CASE("compute_delta octant arithmetic") {
  // A 2x3 wire pattern with explicit secrets.
  const auto g = BrickworkGraph::make(2, 3, false, false);
  std::vector<VertexRole> roles(6, VertexRole::Computation);
  std::vector<AngleOctant> phi(6), theta(6);
  std::vector<int> r(6, 0), d(6, 0);

  SUBCASE("no dependencies: delta = phi + theta") {
    phi[0] = AngleOctant(1);
    theta[0] = AngleOctant(2);
    const auto p = BrickworkPattern::assemble(g, roles, phi, theta, r, d);
    std::vector<int> s(6, -1);
    RandomStream rng(1);
    CHECK(compute_delta(g.id(1, 1), p, s, rng) == AngleOctant(3));
  }

  SUBCASE("an X signal flips the sign of phi") {
    phi[1] = AngleOctant(1);  // vertex (1,2), phi = pi/4
    const auto p = BrickworkPattern::assemble(g, roles, phi, theta, r, d);
    std::vector<int> s(6, -1);
    s[static_cast<std::size_t>(g.id(1, 1))] = 1;
    RandomStream rng(1);
    CHECK(compute_delta(g.id(1, 2), p, s, rng) == AngleOctant(7));  // 7 pi/4
  }

  SUBCASE("trap angle is theta + (r ^ x) pi") {
    roles[0] = VertexRole::Trap;
    roles[1] = VertexRole::Dummy;
    roles[3] = VertexRole::Dummy;  // vertex (2,1) under the wire
    theta[0] = AngleOctant(1);
    r[0] = 1;
    const auto p = BrickworkPattern::assemble(g, roles, phi, theta, r, d);
    std::vector<int> s(6, -1);
    RandomStream rng(1);
    CHECK(compute_delta(g.id(1, 1), p, s, rng) == AngleOctant(5));  // 5 pi/4

    // A dummy neighbour with d = 1 flips the pi term.
    std::vector<int> d2 = d;
    d2[1] = 1;
    const auto p2 = BrickworkPattern::assemble(g, roles, phi, theta, r, d2);
    CHECK(p2.vertex(g.id(1, 1)).x == 1);
    CHECK(compute_delta(g.id(1, 1), p2, s, rng) == AngleOctant(1));
  }

  SUBCASE("unmeasured dependency throws") {
    phi[1] = AngleOctant(1);
    const auto p = BrickworkPattern::assemble(g, roles, phi, theta, r, d);
    std::vector<int> s(6, -1);
    RandomStream rng(1);
    CHECK_THROWS_AS(compute_delta(g.id(1, 2), p, s, rng), std::logic_error);
  }
}

TEST_CASE("delta blinding histogram is uniform for any signals") {
  for (int phi_k = 0; phi_k < 8; ++phi_k)
    for (int sx = 0; sx < 2; ++sx)
      for (int sz = 0; sz < 2; ++sz)
        for (int x = 0; x < 2; ++x) {
          const auto counts = delta_blinding_histogram(AngleOctant(phi_k), sx, sz, x);
          for (int bin : counts) CHECK(bin == 2);
        }
}

TEST_CASE("z dependencies include the vertical brick couplings") {
  const auto g = BrickworkGraph::cylinder(4, 9);
  TapeAssignment no_tape;
  std::vector<AngleOctant> phi(36);
  RandomStream rng(5);
  const auto p = BrickworkPattern::build(g, no_tape, phi, rng);

  // (1,4): plain wire vertex, Z correction from (1,2) only.
  const auto z14 = p.z_dependencies(g.id(1, 4));
  REQUIRE(z14.size() == 1);
  CHECK(z14[0] == g.id(1, 2));

  // (1,3) has a vertical partner (2,3): corrections from (1,1) and (2,2).
  auto z13 = p.z_dependencies(g.id(1, 3));
  REQUIRE(z13.size() == 2);
  CHECK((z13[0] == g.id(1, 1) || z13[1] == g.id(1, 1)));
  CHECK((z13[0] == g.id(2, 2) || z13[1] == g.id(2, 2)));

  // X dependency is the left neighbour; none in the first column.
  CHECK(p.x_dependencies(g.id(2, 1)).empty());
  const auto x22 = p.x_dependencies(g.id(2, 2));
  REQUIRE(x22.size() == 1);
  CHECK(x22[0] == g.id(2, 1));
}

TEST_CASE("pattern JSON round trip") {
  RandomStream tape_rng(61);
  const auto g = BrickworkGraph::cylinder(6, 9);
  const auto tape = choose_tape(g, 0.25, tape_rng);
  std::vector<AngleOctant> phi;
  for (int v = 0; v < g.vertex_count(); ++v)
    phi.push_back(AngleOctant(v % 8));

  const std::uint64_t seed = 4242;
  RandomStream build_rng(seed);
  const auto pattern = BrickworkPattern::build(g, tape, phi, build_rng);
  const auto text = pattern_to_json(pattern, seed);
  const auto back = pattern_from_json(text);

  REQUIRE(back.vertex_count() == pattern.vertex_count());
  for (int v = 0; v < pattern.vertex_count(); ++v) {
    CHECK(back.vertex(v).role == pattern.vertex(v).role);
    CHECK(back.vertex(v).phi == pattern.vertex(v).phi);
    CHECK(back.vertex(v).theta == pattern.vertex(v).theta);
    CHECK(back.vertex(v).r == pattern.vertex(v).r);
    CHECK(back.vertex(v).d == pattern.vertex(v).d);
    CHECK(back.vertex(v).x == pattern.vertex(v).x);
  }
}

TEST_CASE("streaming equals the whole-graph oracle on 16-qubit instances") {
  RandomStream setup(71);
  for (int trial = 0; trial < 6; ++trial) {
    const auto pattern = random_small_pattern(4, 4, setup);
    const auto inputs = honest_inputs(pattern);
    const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(trial);

    RandomStream alice_a(seed, 1), device_a(seed, 2);
    HonestComputeProver honest;
    const auto streamed = streaming_execute(pattern, inputs, honest, alice_a, device_a);

    RandomStream alice_b(seed, 1), device_b(seed, 2);
    const auto dense = testutil::dense_execute(pattern, inputs, alice_b, device_b);

    CHECK(streamed.max_live_qubits <= 2 * pattern.graph().rows());
    for (const auto& e : streamed.transcript.entries) {
      CHECK(e.reported_bit == dense.reported[static_cast<std::size_t>(e.vertex)]);
      CHECK(std::abs(e.probability - dense.probability[static_cast<std::size_t>(e.vertex)]) <
            1e-10);
    }
    CHECK(streamed.output_bits == dense.output_bits);
  }
}

TEST_CASE("honest identity run on a taped cylinder accepts with all-zero output") {
  // 6 rows, Delta = 0.25: band 3 + two dummy rows leaves one computation row,
  // a plain wire. phi = 0 computes the identity on |+>, so every corrected
  // output bit is 0.
  std::vector<AngleOctant> phi(static_cast<std::size_t>(6 * 9));
  for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
    RandomStream rng(seed);
    const auto pattern = taped_pattern(6, 9, 0.25, phi, rng);
    const auto inputs = honest_inputs(pattern);
    RandomStream alice(seed, 1), device(seed, 2);
    HonestComputeProver honest;
    const auto result = streaming_execute(pattern, inputs, honest, alice, device);

    const auto verdict = verify_traps(result.transcript, pattern);
    CHECK(verdict.accepted());
    REQUIRE(result.output_bits.size() == 1);
    CHECK(result.output_bits[0] == 0);
    CHECK(result.max_live_qubits <= 12);

    // Trap rounds individually: b_t = r_t.
    for (const auto& e : result.transcript.entries)
      if (pattern.vertex(e.vertex).role == VertexRole::Trap)
        CHECK(e.reported_bit == pattern.vertex(e.vertex).r);
  }
}

TEST_CASE("transcript determinism and serialization") {
  std::vector<AngleOctant> phi(static_cast<std::size_t>(6 * 9));
  RandomStream rng_a(77), rng_b(77);
  const auto pat_a = taped_pattern(6, 9, 0.25, phi, rng_a);
  const auto pat_b = taped_pattern(6, 9, 0.25, phi, rng_b);
  HonestComputeProver honest;

  RandomStream alice_a(5, 1), device_a(5, 2);
  RandomStream alice_b(5, 1), device_b(5, 2);
  const auto run_a = streaming_execute(pat_a, honest_inputs(pat_a), honest, alice_a, device_a);
  const auto run_b = streaming_execute(pat_b, honest_inputs(pat_b), honest, alice_b, device_b);
  CHECK(run_a.transcript.hash() == run_b.transcript.hash());

  const auto jsonl = run_a.transcript.to_jsonl();
  CHECK(jsonl.find("\"direction\":\"alice_to_bob\"") != std::string::npos);
  CHECK(jsonl.find("\"direction\":\"bob_to_alice\"") != std::string::npos);
  CHECK(jsonl.find("\"round\":0") != std::string::npos);

  // A different seed gives a different transcript.
  RandomStream alice_c(6, 1), device_c(6, 2);
  const auto run_c = streaming_execute(pat_a, honest_inputs(pat_a), honest, alice_c, device_c);
  CHECK(run_a.transcript.hash() != run_c.transcript.hash());
}

TEST_CASE("flip-all adversary is always rejected") {
  std::vector<AngleOctant> phi(static_cast<std::size_t>(6 * 9));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed + 500);
    const auto pattern = taped_pattern(6, 9, 0.25, phi, rng);
    RandomStream alice(seed, 1), device(seed, 2);
    FlipAllBits flip;
    const auto result = streaming_execute(pattern, honest_inputs(pattern), flip, alice, device);
    const auto verdict = verify_traps(result.transcript, pattern);
    CHECK_FALSE(verdict.accepted());
    CHECK(verdict.code == Verdict::Code::TrapFailure);
  }
}

TEST_CASE("single-vertex deviation is caught exactly on traps") {
  std::vector<AngleOctant> phi(static_cast<std::size_t>(6 * 9));
  RandomStream rng(901);
  const auto pattern = taped_pattern(6, 9, 0.25, phi, rng);
  const auto traps = pattern.trap_vertices();
  REQUIRE(!traps.empty());

  // Deviating on a trap vertex: rejected. On a dummy: accepted.
  FlipOneVertex on_trap(traps[0]);
  RandomStream alice_a(3, 1), device_a(3, 2);
  const auto bad = streaming_execute(pattern, honest_inputs(pattern), on_trap, alice_a, device_a);
  CHECK_FALSE(verify_traps(bad.transcript, pattern).accepted());

  VertexId dummy = -1;
  for (int v = 0; v < pattern.vertex_count(); ++v)
    if (pattern.vertex(v).role == VertexRole::Dummy) dummy = v;
  REQUIRE(dummy >= 0);
  FlipOneVertex on_dummy(dummy);
  RandomStream alice_b(3, 1), device_b(3, 2);
  const auto ok = streaming_execute(pattern, honest_inputs(pattern), on_dummy, alice_b, device_b);
  CHECK(verify_traps(ok.transcript, pattern).accepted());
}

TEST_CASE("prover protocol violations surface as errors") {
  std::vector<AngleOctant> phi(static_cast<std::size_t>(6 * 9));
  RandomStream rng(902);
  const auto pattern = taped_pattern(6, 9, 0.25, phi, rng);
  RandomStream alice(4, 1), device(4, 2);

  SkipsMeasurement lazy;
  CHECK_THROWS_AS(streaming_execute(pattern, honest_inputs(pattern), lazy, alice, device),
                  std::runtime_error);
  MalformedBit malformed;
  CHECK_THROWS_AS(streaming_execute(pattern, honest_inputs(pattern), malformed, alice, device),
                  std::runtime_error);
}

TEST_CASE("verify_traps demands traps") {
  RandomStream rng(71);
  const auto pattern = random_small_pattern(4, 4, rng);
  Transcript empty;
  CHECK_THROWS_AS(verify_traps(empty, pattern), std::invalid_argument);
}

#pragma once

// Blind measurement patterns on brickwork graphs: per-vertex roles, angles,
// blinding parameters, the rightward-flow dependency structure, and the
// adaptive angle function sent to the prover.

#include <array>
#include <string>
#include <vector>

#include "vbqc/brickwork.hpp"
#include "vbqc/rng.hpp"
#include "vbqc/state.hpp"

namespace vbqc {

// Angle k pi/4 with exact mod-8 arithmetic.
struct AngleOctant {
  int k = 0;

  AngleOctant() = default;
  explicit AngleOctant(int value) : k(((value % 8) + 8) % 8) {}

  double radians() const;
  AngleOctant operator+(AngleOctant other) const { return AngleOctant(k + other.k); }
  AngleOctant negated() const { return AngleOctant(-k); }
  bool operator==(const AngleOctant&) const = default;
};

inline AngleOctant uniform_octant(RandomStream& rng) {
  return AngleOctant(static_cast<int>(rng.next_below(8)));
}

struct PatternVertex {
  VertexRole role = VertexRole::Computation;
  AngleOctant phi;    // computation angle; 0 for traps and dummies
  AngleOctant theta;  // blinding angle (computation and traps)
  int r = 0;          // result flip bit
  int d = 0;          // dummy preparation bit (dummies only)
  int x = 0;          // parity of dummy neighbours' d bits
  bool output = false;
};

class BrickworkPattern {
 public:
  // Draws theta, r and d from rng. phi is row-major per vertex and applies
  // to computation vertices only.
  static BrickworkPattern build(const BrickworkGraph& graph, const TapeAssignment& tape,
                                const std::vector<AngleOctant>& phi, RandomStream& rng);

  // Assembles a pattern from explicit secrets (phase-one hand-off path).
  static BrickworkPattern assemble(const BrickworkGraph& graph,
                                   const std::vector<VertexRole>& roles,
                                   const std::vector<AngleOctant>& phi,
                                   const std::vector<AngleOctant>& theta,
                                   const std::vector<int>& r, const std::vector<int>& d);

  const BrickworkGraph& graph() const { return graph_; }
  const PatternVertex& vertex(VertexId v) const {
    return vertices_.at(static_cast<std::size_t>(v));
  }
  int vertex_count() const { return graph_.vertex_count(); }

  // Rightward flow f(i) = right neighbour. X corrections come from f^{-1}(i);
  // Z corrections from every j with f(j) adjacent to i. Dummy and trap
  // sources are excluded: their reported bits carry no computation signal
  // (the static dummy effect is the x parity).
  std::vector<VertexId> x_dependencies(VertexId v) const;
  std::vector<VertexId> z_dependencies(VertexId v) const;

  // Column-major measurement order; all dependencies point backwards.
  const std::vector<VertexId>& measurement_order() const { return order_; }

  std::vector<VertexId> trap_vertices() const;
  std::vector<VertexId> output_computation_vertices() const;

 private:
  BrickworkGraph graph_;
  std::vector<PatternVertex> vertices_;
  std::vector<VertexId> order_;

  void finalize();
};

// The adaptive blind angle for vertex i given corrected results s (entries
// -1 while unmeasured):
//   computation/output: (-1)^{sX} phi + theta + (sZ ^ x ^ r) pi
//   trap:               theta + (r ^ x) pi
//   dummy:              uniform over the octants (draws from rng).
AngleOctant compute_delta(VertexId i, const BrickworkPattern& pattern,
                          const std::vector<int>& s, RandomStream& rng);

// Exhaustive histogram of delta over the 16 blinding choices (theta, r) for
// fixed dependency signals; blindness means every octant appears twice.
std::array<int, 8> delta_blinding_histogram(AngleOctant phi, int sx, int sz, int x);

// Server-side preparation states for an honest run of the pattern itself:
// |+_theta> for computation and traps, |d> for dummies.
// (Phase one instead hands over the prover-side residuals.)
std::vector<StateVector<double>> honest_inputs(const BrickworkPattern& pattern);

// Pattern file format: dims, roles, phi octants and the secret seed.
std::string pattern_to_json(const BrickworkPattern& pattern, std::uint64_t seed);
BrickworkPattern pattern_from_json(const std::string& text);

}  // namespace vbqc

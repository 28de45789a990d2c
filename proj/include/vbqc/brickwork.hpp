#pragma once

// Cylindrical brickwork graphs and the trap-tape selection: a band R of
// consecutive rows whose colour-C vertices become traps, padded above and
// below by all-dummy rows so the traps disconnect from the computation.

#include <utility>
#include <vector>

#include "vbqc/rng.hpp"

namespace vbqc {

using VertexId = int;

enum class VertexRole { Computation, Trap, Dummy };

class BrickworkGraph {
 public:
  // Strict builder: rows even >= 4, cols == 1 (mod 8) so whole bricks tile.
  static BrickworkGraph cylinder(int rows, int cols);
  // General builder for small test instances; the brick rule is the same.
  static BrickworkGraph make(int rows, int cols, bool cylindrical, bool strict);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool cylindrical() const { return cylindrical_; }
  int vertex_count() const { return rows_ * cols_; }

  VertexId id(int row, int col) const;  // 1-indexed row and column
  int row_of(VertexId v) const { return v / cols_ + 1; }
  int col_of(VertexId v) const { return v % cols_ + 1; }

  const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }
  const std::vector<VertexId>& neighbours(VertexId v) const;
  bool has_edge(VertexId a, VertexId b) const;

  // Proper 2-colouring (row + col) mod 2.
  int colour(VertexId v) const { return (row_of(v) + col_of(v)) % 2; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  bool cylindrical_ = true;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
};

struct TapeAssignment {
  int start_row = 1;  // first row of the band R (1-indexed)
  int band_rows = 1;  // |R| = round(2 Delta rows), at least 1
  int colour = 0;     // trap colour class C
  std::vector<VertexId> traps;
  std::vector<VertexId> dummies;

  bool row_in_band(int row, int total_rows) const;
};

// Uniformly random band start and colour; band width round(2 Delta n) with
// ties rounded up. Throws if the band plus its two dummy border rows exceed
// the cylinder.
TapeAssignment choose_tape(const BrickworkGraph& graph, double delta_frac,
                           RandomStream& rng);

// Per-vertex roles induced by a tape (row-major order).
std::vector<VertexRole> role_map(const BrickworkGraph& graph, const TapeAssignment& tape);

}  // namespace vbqc

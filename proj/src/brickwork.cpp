#include "vbqc/brickwork.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbqc {

BrickworkGraph BrickworkGraph::cylinder(int rows, int cols) {
  return make(rows, cols, true, true);
}

BrickworkGraph BrickworkGraph::make(int rows, int cols, bool cylindrical, bool strict) {
  if (rows < 2 || rows % 2 != 0)
    throw std::invalid_argument("row count must be even and at least 2");
  if (cols < 1) throw std::invalid_argument("column count must be positive");
  if (strict) {
    if (rows < 4) throw std::invalid_argument("cylinder needs at least 4 rows");
    if (cols % 8 != 1)
      throw std::invalid_argument("columns must be 1 (mod 8) for whole bricks");
  }

  BrickworkGraph g;
  g.rows_ = rows;
  g.cols_ = cols;
  g.cylindrical_ = cylindrical;
  g.adjacency_.assign(static_cast<std::size_t>(rows * cols), {});

  auto add_edge = [&g](VertexId a, VertexId b) {
    g.edges_.emplace_back(std::min(a, b), std::max(a, b));
    g.adjacency_[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency_[static_cast<std::size_t>(b)].push_back(a);
  };

  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c < cols; ++c) add_edge(g.id(r, c), g.id(r, c + 1));

  // Brick rule, 1-indexed: rows (2k-1, 2k) join at columns == 3 (mod 8),
  // rows (2k, 2k+1) at columns == 7 (mod 8); the cylinder closes the last
  // (rows, 1) pair.
  for (int c = 1; c <= cols; ++c) {
    if (c % 8 == 3) {
      for (int k = 1; 2 * k <= rows; ++k) add_edge(g.id(2 * k - 1, c), g.id(2 * k, c));
    } else if (c % 8 == 7) {
      for (int k = 1; 2 * k <= rows; ++k) {
        const int top = 2 * k;
        const int bottom = 2 * k + 1;
        if (bottom <= rows)
          add_edge(g.id(top, c), g.id(bottom, c));
        else if (cylindrical)
          add_edge(g.id(top, c), g.id(1, c));
      }
    }
  }
  return g;
}

VertexId BrickworkGraph::id(int row, int col) const {
  if (row < 1 || row > rows_ || col < 1 || col > cols_)
    throw std::out_of_range("vertex coordinates out of range");
  return (row - 1) * cols_ + (col - 1);
}

const std::vector<VertexId>& BrickworkGraph::neighbours(VertexId v) const {
  return adjacency_.at(static_cast<std::size_t>(v));
}

bool BrickworkGraph::has_edge(VertexId a, VertexId b) const {
  const auto& adj = neighbours(a);
  return std::find(adj.begin(), adj.end(), b) != adj.end();
}

bool TapeAssignment::row_in_band(int row, int total_rows) const {
  for (int i = 0; i < band_rows; ++i)
    if (row == (start_row - 1 + i) % total_rows + 1) return true;
  return false;
}

TapeAssignment choose_tape(const BrickworkGraph& graph, double delta_frac,
                           RandomStream& rng) {
  if (!(delta_frac > 0.0 && delta_frac < 0.5))
    throw std::invalid_argument("delta_frac must be in (0, 1/2)");
  const int n = graph.rows();
  const int band = std::max(1, static_cast<int>(std::floor(2.0 * delta_frac * n + 0.5)));
  if (band + 2 > n)
    throw std::invalid_argument("tape leaves no room on the cylinder");

  TapeAssignment tape;
  tape.band_rows = band;
  tape.start_row = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))) + 1;
  tape.colour = rng.next_bit();

  const int above = (tape.start_row - 2 + n) % n + 1;
  const int below = (tape.start_row - 1 + band) % n + 1;
  for (int r = 1; r <= n; ++r) {
    const bool in_band = tape.row_in_band(r, n);
    for (int c = 1; c <= graph.cols(); ++c) {
      const VertexId v = graph.id(r, c);
      if (in_band) {
        if (graph.colour(v) == tape.colour)
          tape.traps.push_back(v);
        else
          tape.dummies.push_back(v);
      } else if (r == above || r == below) {
        tape.dummies.push_back(v);
      }
    }
  }
  return tape;
}

std::vector<VertexRole> role_map(const BrickworkGraph& graph, const TapeAssignment& tape) {
  std::vector<VertexRole> roles(static_cast<std::size_t>(graph.vertex_count()),
                                VertexRole::Computation);
  for (VertexId v : tape.traps) roles[static_cast<std::size_t>(v)] = VertexRole::Trap;
  for (VertexId v : tape.dummies) roles[static_cast<std::size_t>(v)] = VertexRole::Dummy;
  return roles;
}

}  // namespace vbqc

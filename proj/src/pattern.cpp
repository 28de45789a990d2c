#include "vbqc/pattern.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "vbqc/state.hpp"

namespace vbqc {

double AngleOctant::radians() const { return k * M_PI / 4.0; }

BrickworkPattern BrickworkPattern::build(const BrickworkGraph& graph,
                                         const TapeAssignment& tape,
                                         const std::vector<AngleOctant>& phi,
                                         RandomStream& rng) {
  const auto roles = role_map(graph, tape);
  const int n = graph.vertex_count();
  std::vector<AngleOctant> theta(static_cast<std::size_t>(n));
  std::vector<int> r(static_cast<std::size_t>(n), 0);
  std::vector<int> d(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    const auto idx = static_cast<std::size_t>(v);
    if (roles[idx] == VertexRole::Dummy) {
      d[idx] = rng.next_bit();
    } else {
      theta[idx] = uniform_octant(rng);
      r[idx] = rng.next_bit();
    }
  }
  return assemble(graph, roles, phi, theta, r, d);
}

BrickworkPattern BrickworkPattern::assemble(const BrickworkGraph& graph,
                                            const std::vector<VertexRole>& roles,
                                            const std::vector<AngleOctant>& phi,
                                            const std::vector<AngleOctant>& theta,
                                            const std::vector<int>& r,
                                            const std::vector<int>& d) {
  const auto n = static_cast<std::size_t>(graph.vertex_count());
  if (roles.size() != n || phi.size() != n || theta.size() != n || r.size() != n ||
      d.size() != n)
    throw std::invalid_argument("pattern field sizes do not match the graph");

  BrickworkPattern p;
  p.graph_ = graph;
  p.vertices_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& vx = p.vertices_[i];
    vx.role = roles[i];
    vx.phi = vx.role == VertexRole::Computation ? phi[i] : AngleOctant(0);
    vx.theta = vx.role == VertexRole::Dummy ? AngleOctant(0) : theta[i];
    vx.r = vx.role == VertexRole::Dummy ? 0 : r[i];
    vx.d = vx.role == VertexRole::Dummy ? d[i] : 0;
  }
  p.finalize();
  return p;
}

void BrickworkPattern::finalize() {
  const int cols = graph_.cols();
  for (int v = 0; v < graph_.vertex_count(); ++v) {
    auto& vx = vertices_[static_cast<std::size_t>(v)];
    vx.output = graph_.col_of(v) == cols;
    int parity = 0;
    for (VertexId u : graph_.neighbours(v)) {
      const auto& nb = vertices_[static_cast<std::size_t>(u)];
      if (nb.role == VertexRole::Dummy) parity ^= nb.d;
    }
    vx.x = parity;
  }
  order_.clear();
  for (int c = 1; c <= cols; ++c)
    for (int r = 1; r <= graph_.rows(); ++r) order_.push_back(graph_.id(r, c));
}

std::vector<VertexId> BrickworkPattern::x_dependencies(VertexId v) const {
  std::vector<VertexId> deps;
  const int c = graph_.col_of(v);
  if (c > 1) {
    const VertexId left = graph_.id(graph_.row_of(v), c - 1);
    if (vertex(left).role == VertexRole::Computation) deps.push_back(left);
  }
  return deps;
}

std::vector<VertexId> BrickworkPattern::z_dependencies(VertexId v) const {
  // j contributes a Z correction to v when f(j) is a neighbour of v, i.e.
  // j is the left neighbour of some u in N(v).
  std::vector<VertexId> deps;
  for (VertexId u : graph_.neighbours(v)) {
    const int uc = graph_.col_of(u);
    if (uc <= 1) continue;
    const VertexId j = graph_.id(graph_.row_of(u), uc - 1);
    if (j == v) continue;
    if (vertex(j).role == VertexRole::Computation) deps.push_back(j);
  }
  return deps;
}

std::vector<VertexId> BrickworkPattern::trap_vertices() const {
  std::vector<VertexId> traps;
  for (int v = 0; v < vertex_count(); ++v)
    if (vertex(v).role == VertexRole::Trap) traps.push_back(v);
  return traps;
}

std::vector<VertexId> BrickworkPattern::output_computation_vertices() const {
  std::vector<VertexId> out;
  for (int r = 1; r <= graph_.rows(); ++r) {
    const VertexId v = graph_.id(r, graph_.cols());
    if (vertex(v).role == VertexRole::Computation) out.push_back(v);
  }
  return out;
}

namespace {

int xor_signals(const std::vector<VertexId>& deps, const std::vector<int>& s) {
  int acc = 0;
  for (VertexId j : deps) {
    const int sj = s.at(static_cast<std::size_t>(j));
    if (sj < 0) throw std::logic_error("dependency measured out of order");
    acc ^= sj;
  }
  return acc;
}

}  // namespace

AngleOctant compute_delta(VertexId i, const BrickworkPattern& pattern,
                          const std::vector<int>& s, RandomStream& rng) {
  const auto& vx = pattern.vertex(i);
  switch (vx.role) {
    case VertexRole::Dummy:
      return uniform_octant(rng);
    case VertexRole::Trap:
      // The dummy-induced Z^x on the isolated trap is folded into the flip
      // bit so acceptance stays the verbatim b_t = r_t.
      return vx.theta + AngleOctant(4 * (vx.r ^ vx.x));
    case VertexRole::Computation: {
      const int sx = xor_signals(pattern.x_dependencies(i), s);
      const int sz = xor_signals(pattern.z_dependencies(i), s);
      const AngleOctant signed_phi = sx ? vx.phi.negated() : vx.phi;
      return signed_phi + vx.theta + AngleOctant(4 * (sz ^ vx.x ^ vx.r));
    }
  }
  throw std::logic_error("bad vertex role");
}

std::array<int, 8> delta_blinding_histogram(AngleOctant phi, int sx, int sz, int x) {
  std::array<int, 8> counts{};
  for (int theta = 0; theta < 8; ++theta) {
    for (int r = 0; r < 2; ++r) {
      const AngleOctant signed_phi = sx ? phi.negated() : phi;
      const AngleOctant delta =
          signed_phi + AngleOctant(theta) + AngleOctant(4 * (sz ^ x ^ r));
      counts[static_cast<std::size_t>(delta.k)] += 1;
    }
  }
  return counts;
}

std::vector<StateVector<double>> honest_inputs(const BrickworkPattern& pattern) {
  std::vector<StateVector<double>> inputs;
  inputs.reserve(static_cast<std::size_t>(pattern.vertex_count()));
  for (int v = 0; v < pattern.vertex_count(); ++v) {
    const auto& vx = pattern.vertex(v);
    if (vx.role == VertexRole::Dummy)
      inputs.push_back(basis_state<double>(1, static_cast<std::uint64_t>(vx.d)));
    else
      inputs.push_back(plus_theta(vx.theta.radians()));
  }
  return inputs;
}

std::string pattern_to_json(const BrickworkPattern& pattern, std::uint64_t seed) {
  nlohmann::json j;
  j["schema"] = 1;
  j["rows"] = pattern.graph().rows();
  j["cols"] = pattern.graph().cols();
  j["cylindrical"] = pattern.graph().cylindrical();
  j["seed"] = seed;
  std::string roles;
  std::vector<int> phi;
  for (int v = 0; v < pattern.vertex_count(); ++v) {
    const auto& vx = pattern.vertex(v);
    roles.push_back(vx.role == VertexRole::Computation ? 'c'
                    : vx.role == VertexRole::Trap      ? 't'
                                                       : 'd');
    phi.push_back(vx.phi.k);
  }
  j["roles"] = roles;
  j["phi"] = phi;
  return j.dump();
}

BrickworkPattern pattern_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema").get<int>() != 1)
    throw std::invalid_argument("unsupported pattern schema");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto graph =
      BrickworkGraph::make(rows, cols, j.at("cylindrical").get<bool>(), false);
  const auto roles_text = j.at("roles").get<std::string>();
  const auto phi_k = j.at("phi").get<std::vector<int>>();
  if (static_cast<int>(roles_text.size()) != graph.vertex_count() ||
      static_cast<int>(phi_k.size()) != graph.vertex_count())
    throw std::invalid_argument("pattern fields do not match dimensions");

  std::vector<VertexRole> roles;
  std::vector<AngleOctant> phi;
  for (int v = 0; v < graph.vertex_count(); ++v) {
    const char r = roles_text[static_cast<std::size_t>(v)];
    roles.push_back(r == 'c' ? VertexRole::Computation
                    : r == 't' ? VertexRole::Trap
                               : VertexRole::Dummy);
    phi.push_back(AngleOctant(phi_k[static_cast<std::size_t>(v)]));
  }

  // Secrets are regenerated from the stored seed with the same row-major
  // drawing discipline as build().
  RandomStream rng(j.at("seed").get<std::uint64_t>());
  const auto n = static_cast<std::size_t>(graph.vertex_count());
  std::vector<AngleOctant> theta(n);
  std::vector<int> r(n, 0), d(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == VertexRole::Dummy) {
      d[i] = rng.next_bit();
    } else {
      theta[i] = uniform_octant(rng);
      r[i] = rng.next_bit();
    }
  }
  return BrickworkPattern::assemble(graph, roles, phi, theta, r, d);
}

}  // namespace vbqc

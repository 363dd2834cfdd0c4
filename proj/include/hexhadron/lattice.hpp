#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hexhadron/error.hpp"

namespace hexhadron {

enum class Sublattice { A, B };

inline char to_char(Sublattice s) { return s == Sublattice::A ? 'A' : 'B'; }

using SiteId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  SiteId b;  // degree-3 endpoint
  SiteId a;  // degree-2 endpoint
};

struct DirectedEdge {
  EdgeId edge;
  SiteId from;
  SiteId to;
};

/// Label of the virtual index a site tensor carries for a given edge.
inline std::string edge_label(EdgeId e) { return "e" + std::to_string(e); }

/// Generic bipartite heavy-hex graph: every edge joins an A site to a B site.
class HeavyHexGraph {
 public:
  HeavyHexGraph() = default;
  HeavyHexGraph(std::vector<Sublattice> sublattice, std::vector<Edge> edges)
      : sublattice_(std::move(sublattice)), edges_(std::move(edges)), incident_(sublattice_.size()) {
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const auto& [b, a] = edges_[e];
      if (b >= sublattice_.size() || a >= sublattice_.size()) {
        throw Error(ErrorKind::InvalidArgument, "edge endpoint out of range");
      }
      if (sublattice_[b] != Sublattice::B || sublattice_[a] != Sublattice::A) {
        throw Error(ErrorKind::InvalidArgument, "edge must join a B site to an A site");
      }
      incident_[b].push_back(e);
      incident_[a].push_back(e);
    }
  }

  std::size_t n_sites() const { return sublattice_.size(); }
  std::size_t n_edges() const { return edges_.size(); }
  Sublattice sublattice(SiteId s) const { return sublattice_.at(s); }
  const std::vector<Sublattice>& sublattices() const { return sublattice_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeId>& incident(SiteId s) const { return incident_.at(s); }
  std::size_t degree(SiteId s) const { return incident_.at(s).size(); }

  SiteId other(EdgeId e, SiteId s) const {
    const auto& [b, a] = edges_.at(e);
    return s == b ? a : b;
  }

  std::vector<SiteId> neighbors(SiteId s) const {
    std::vector<SiteId> out;
    for (EdgeId e : incident(s)) out.push_back(other(e, s));
    return out;
  }

  std::size_t count(Sublattice which) const {
    std::size_t n = 0;
    for (auto s : sublattice_) n += s == which ? 1 : 0;
    return n;
  }

  std::vector<SiteId> sites_of(Sublattice which) const {
    std::vector<SiteId> out;
    for (SiteId s = 0; s < n_sites(); ++s) {
      if (sublattice_[s] == which) out.push_back(s);
    }
    return out;
  }

  /// Full-scan structural check: bipartite, deg(A)=2, deg(B)=3, no repeated edges.
  bool is_valid_heavy_hex() const {
    for (SiteId s = 0; s < n_sites(); ++s) {
      const std::size_t want = sublattice_[s] == Sublattice::A ? 2 : 3;
      if (degree(s) != want) return false;
      auto nb = neighbors(s);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (sublattice_[nb[i]] == sublattice_[s]) return false;
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
          if (nb[i] == nb[j]) return false;
        }
      }
    }
    return 2 * count(Sublattice::A) == 3 * count(Sublattice::B);
  }

  /// Diagnostic dump: "site_id,sublattice,degree" lines then "edge_id,site_a,site_b" lines.
  void dump(std::ostream& os) const {
    for (SiteId s = 0; s < n_sites(); ++s) os << s << ',' << to_char(sublattice_[s]) << ',' << degree(s) << '\n';
    for (EdgeId e = 0; e < n_edges(); ++e) os << e << ',' << edges_[e].a << ',' << edges_[e].b << '\n';
  }

 private:
  std::vector<Sublattice> sublattice_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
};

/// The 5-site periodic cell: sites A1, A2, A3, B1, B2 (ids 0..4) and edges
/// B1-A1, B1-A2, B1-A3, B2-A1, B2-A2, B2-A3 (ids 0..5).
class HeavyHexUnitCell : public HeavyHexGraph {
 public:
  static constexpr SiteId kA1 = 0, kA2 = 1, kA3 = 2, kB1 = 3, kB2 = 4;

  HeavyHexUnitCell()
      : HeavyHexGraph({Sublattice::A, Sublattice::A, Sublattice::A, Sublattice::B, Sublattice::B},
                      {{kB1, kA1}, {kB1, kA2}, {kB1, kA3}, {kB2, kA1}, {kB2, kA2}, {kB2, kA3}}) {}

  /// Edge joining B site `b_slot` (0 or 1) with A site `a_slot` (0, 1 or 2).
  static EdgeId edge_between(std::size_t b_slot, std::size_t a_slot) { return 3 * b_slot + a_slot; }

  /// The 12 orientations; index 2e is B->A, 2e+1 is A->B.
  std::vector<DirectedEdge> directed_edges() const {
    std::vector<DirectedEdge> out;
    for (EdgeId e = 0; e < n_edges(); ++e) {
      out.push_back({e, edge(e).b, edge(e).a});
      out.push_back({e, edge(e).a, edge(e).b});
    }
    return out;
  }
};

inline HeavyHexUnitCell build_unit_cell() { return HeavyHexUnitCell{}; }

inline constexpr std::size_t kDefaultClusterCap = 20;

struct FiniteCluster {
  HeavyHexGraph graph;
  std::size_t cells_x = 1;
  std::size_t cells_y = 1;
  bool periodic = true;

  std::size_t n_sites() const { return graph.n_sites(); }
};

/// Periodic tiling of the unit cell on a cells_x x cells_y torus. In cell c the sites are
/// A1..A3, B1, B2 (ids 5c..5c+4); B1 takes A1, A2, A3 of its own cell, B2 takes A1 of its
/// own cell, A2 of the cell shifted in x and A3 of the cell shifted in y.
inline FiniteCluster build_finite_cluster(std::size_t cells_x, std::size_t cells_y,
                                          std::size_t cap = kDefaultClusterCap) {
  if (cells_x == 0 || cells_y == 0) throw Error(ErrorKind::InvalidArgument, "cell counts must be positive");
  const std::size_t n = 5 * cells_x * cells_y;
  if (n > cap) {
    throw Error(ErrorKind::SizeCapExceeded,
                std::to_string(n) + " sites exceeds the cap of " + std::to_string(cap));
  }
  auto cell = [&](std::size_t x, std::size_t y) { return (y % cells_y) * cells_x + (x % cells_x); };
  std::vector<Sublattice> sub(n);
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < cells_x * cells_y; ++c) {
    for (std::size_t k = 0; k < 3; ++k) sub[5 * c + k] = Sublattice::A;
    sub[5 * c + 3] = sub[5 * c + 4] = Sublattice::B;
  }
  for (std::size_t y = 0; y < cells_y; ++y) {
    for (std::size_t x = 0; x < cells_x; ++x) {
      const std::size_t c = cell(x, y);
      const SiteId b1 = 5 * c + 3, b2 = 5 * c + 4;
      edges.push_back({b1, 5 * c + 0});
      edges.push_back({b1, 5 * c + 1});
      edges.push_back({b1, 5 * c + 2});
      edges.push_back({b2, 5 * c + 0});
      edges.push_back({b2, 5 * cell(x + 1, y) + 1});
      edges.push_back({b2, 5 * cell(x, y + 1) + 2});
    }
  }
  return FiniteCluster{HeavyHexGraph(std::move(sub), std::move(edges)), cells_x, cells_y, true};
}

struct PathNode {
  SiteId site;  // unit-cell site playing this role
  Sublattice sublattice;
  std::vector<EdgeId> on_path;   // incident edges used by the path
  std::vector<EdgeId> off_path;  // incident edges broken by the path
};

/// A shortest path on the infinite lattice, expressed through unit-cell roles.
struct GeodesicPath {
  Sublattice start;
  std::size_t length = 0;  // number of edges
  std::vector<PathNode> nodes;
};

/// Zigzag geodesic of `d` edges. B-to-B hops alternate through the A directions
/// `first_dir` and `second_dir` (0, 1, 2 for A1, A2, A3); a zigzag line of the
/// underlying honeycomb is a shortest path. The canonical choice is (0, 1).
inline GeodesicPath geodesic(Sublattice start, std::size_t d, std::size_t first_dir = 0,
                             std::size_t second_dir = 1) {
  if (first_dir > 2 || second_dir > 2 || first_dir == second_dir) {
    throw Error(ErrorKind::InvalidArgument, "zigzag needs two distinct A directions");
  }
  const HeavyHexUnitCell cell;
  // Period-4 walk B1, A_p, B2, A_q, B1, ...; an A start begins at A_p.
  const std::array<SiteId, 4> walk = {HeavyHexUnitCell::kB1, first_dir, HeavyHexUnitCell::kB2, second_dir};
  const std::size_t offset = start == Sublattice::B ? 0 : 1;
  GeodesicPath path{start, d, {}};
  std::vector<SiteId> sites;
  for (std::size_t k = 0; k <= d; ++k) sites.push_back(walk[(offset + k) % 4]);
  auto edge_of = [&](SiteId u, SiteId v) {
    for (EdgeId e : cell.incident(u)) {
      if (cell.other(e, u) == v) return e;
    }
    throw Error(ErrorKind::InvalidArgument, "sites not adjacent");
  };
  for (std::size_t k = 0; k <= d; ++k) {
    PathNode node{sites[k], cell.sublattice(sites[k]), {}, {}};
    if (k > 0) node.on_path.push_back(edge_of(sites[k], sites[k - 1]));
    if (k < d) node.on_path.push_back(edge_of(sites[k], sites[k + 1]));
    for (EdgeId e : cell.incident(sites[k])) {
      if (std::find(node.on_path.begin(), node.on_path.end(), e) == node.on_path.end()) node.off_path.push_back(e);
    }
    path.nodes.push_back(std::move(node));
  }
  return path;
}

}  // namespace hexhadron

// Graph jump inversion: every ordered pair of vertices (a, b) gets a block
// carrying S_{a,1} when {a, b} is an edge and S_{a,0} otherwise.  Recovery
// runs theta on each block; assembly puts inverted graphs at several levels
// side by side with marker components.
#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spectra/coding.hpp"
#include "spectra/pairs.hpp"

namespace spectra {

class MalformedStructure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symmetric adjacency of a graph; loops and repeated edges are tolerated.
inline std::vector<std::vector<bool>> adjacency(const Graph& g) {
  std::vector<std::vector<bool>> adj(g.vertices, std::vector<bool>(g.vertices, false));
  for (auto [a, b] : g.edges) {
    if (a >= g.vertices || b >= g.vertices) throw std::out_of_range("edge endpoint out of range");
    adj[a][b] = adj[b][a] = true;
  }
  return adj;
}

/// A graph with edges listed once, as (a, b) with a <= b, sorted.
inline Graph canonical_graph(const Graph& g) {
  std::set<std::pair<std::size_t, std::size_t>> e;
  for (auto [a, b] : g.edges) e.insert(std::minmax(a, b));
  return Graph{g.vertices, {e.begin(), e.end()}};
}

inline std::string graph_to_dot(const Graph& g, const std::string& name = "G") {
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (std::size_t v = 0; v < g.vertices; ++v) out << "  " << v << ";\n";
  for (auto [a, b] : canonical_graph(g).edges) out << "  " << a << " -- " << b << ";\n";
  out << "}\n";
  return out.str();
}

struct Block {
  std::size_t a = 0, b = 0;
  int bit = 0;
  TreePair pair;
};

/// V-part: vertices 0..n-1.  Block part: one D(a, b, -) class per ordered
/// pair, including a = b.  At level 0 the structure is the graph itself.
class InvertedStructure {
 public:
  InvertedStructure(LevelNotation level, Graph g) : level_(std::move(level)), graph_(canonical_graph(g)) {
    if (is_plain()) return;
    n_ = graph_.vertices;
    auto adj = adjacency(graph_);
    bits_.assign(n_ * n_, 0);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) bits_[a * n_ + b] = adj[a][b];
    pairs_[0] = tree_pair(level_, 0);
    pairs_[1] = tree_pair(level_, 1);
  }

  const LevelNotation& level() const { return level_; }
  bool is_marker() const { return std::holds_alternative<IllFoundedMarker>(level_); }
  bool is_plain() const { return !is_marker() && std::get<Ordinal>(level_) == Ordinal::finite(0); }

  /// The underlying graph at level 0.
  const Graph& plain_graph() const {
    if (!is_plain()) throw std::logic_error("only a level-0 structure is a plain graph");
    return graph_;
  }

  std::size_t vertices() const { return is_plain() ? graph_.vertices : n_; }
  std::size_t block_count() const { return n_ * n_; }

  Block block(std::size_t a, std::size_t b) const {
    if (a >= n_ || b >= n_) throw std::out_of_range("no block for that pair");
    int bit = bits_[a * n_ + b];
    return {a, b, bit, pairs_[bit]};
  }

 private:
  LevelNotation level_;
  Graph graph_;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
  TreePair pairs_[2] = {{root_only(), root_only(), ""}, {root_only(), root_only(), ""}};
};

inline InvertedStructure invert(const Graph& g, const LevelNotation& alpha) { return InvertedStructure(alpha, g); }

// ---------------------------------------------------------------------------
// A finite slice of the structure as one relational universe.

struct StructureSlice {
  std::size_t vertices = 0;                  // elements 0..vertices-1 satisfy V
  std::vector<std::pair<std::size_t, std::size_t>> block_of;  // per non-V element: its D class (a, b)
  std::vector<std::size_t> parent;           // tree order inside blocks, over non-V elements
  std::vector<bool> left;                    // left-tree predicate, over non-V elements
};

inline StructureSlice slice(const InvertedStructure& s, const Truncation& t, std::size_t depth) {
  StructureSlice out;
  out.vertices = s.vertices();
  if (s.is_plain()) return out;
  for (std::size_t a = 0; a < s.vertices(); ++a)
    for (std::size_t b = 0; b < s.vertices(); ++b) {
      PairSlice p = materialize_pair(s.block(a, b).pair, t, depth);
      std::size_t base = out.parent.size();
      for (std::size_t v = 0; v < p.parent.size(); ++v) {
        out.block_of.emplace_back(a, b);
        out.parent.push_back(base + p.parent[v]);
        out.left.push_back(p.left[v]);
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Recovery.

struct RecoveredGraph {
  std::size_t vertices = 0;
  std::set<std::pair<std::size_t, std::size_t>> edges;       // a <= b
  std::set<std::pair<std::size_t, std::size_t>> unresolved;  // a <= b

  Graph graph() const { return Graph{vertices, {edges.begin(), edges.end()}}; }
  bool complete() const { return unresolved.empty(); }
};

/// {a, b} is an edge when theta gives 1 on both ordered blocks, a non-edge
/// when it gives 0 on both; an unknown verdict leaves the pair unresolved.
inline RecoveredGraph recover(const InvertedStructure& s, int alpha, const SnapshotProvider& snaps, Natural budget) {
  RecoveredGraph out;
  out.vertices = s.vertices();
  if (alpha == 0) {
    if (!s.is_plain()) throw MalformedStructure("a level-0 recovery needs a plain graph");
    for (auto e : s.plain_graph().edges) out.edges.insert(std::minmax(e.first, e.second));
    return out;
  }
  if (s.is_marker()) throw MalformedStructure("marker blocks carry no edge information");
  if (s.is_plain() || std::get<Ordinal>(s.level()) != Ordinal::finite(static_cast<std::uint64_t>(alpha)))
    throw MalformedStructure("structure level " + to_string(s.level()) + " does not match " + std::to_string(alpha));
  std::size_t n = s.vertices();
  std::vector<std::optional<int>> verdict(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Block blk = s.block(a, b);
      if (blk.a != a || blk.b != b) throw MalformedStructure("block partition is not indexed by its pair");
      verdict[a * n + b] = theta(blk.pair, alpha, snaps, budget).value;
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      auto x = verdict[a * n + b], y = verdict[b * n + a];
      if (!x || !y) {
        out.unresolved.emplace(a, b);
        continue;
      }
      if (*x != *y) throw MalformedStructure("blocks (a, b) and (b, a) disagree");
      if (*x == 1) out.edges.emplace(a, b);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly.

struct SpectrumComponent {
  LevelNotation level;
  InvertedStructure structure;
};

/// The disjoint union of the components; the equivalence classes are the
/// components themselves.
struct SpectrumAssembly {
  std::vector<SpectrumComponent> components;

  /// One component id per element of the concatenated slices.
  std::vector<std::size_t> equivalence(const Truncation& t, std::size_t depth) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < components.size(); ++i) {
      StructureSlice s = slice(components[i].structure, t, depth);
      out.insert(out.end(), s.vertices + s.parent.size(), i);
    }
    return out;
  }
};

/// Marker components use as many vertices as the largest listed graph, or
/// one when none is listed; their blocks ignore the edges.
inline SpectrumAssembly assemble_spectrum(const std::vector<std::pair<int, Graph>>& levels, std::size_t limit_copies) {
  SpectrumAssembly out;
  std::size_t n = 1;
  for (const auto& [alpha, g] : levels) {
    if (alpha < 0) throw std::invalid_argument("negative level");
    LevelNotation lv = Ordinal::finite(static_cast<std::uint64_t>(alpha));
    out.components.push_back({lv, invert(g, lv)});
    n = std::max(n, g.vertices);
  }
  for (std::size_t i = 0; i < limit_copies; ++i)
    out.components.push_back({IllFoundedMarker{}, invert(Graph{n, {}}, IllFoundedMarker{})});
  return out;
}

}  // namespace spectra

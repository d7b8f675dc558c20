// Flower graphs: a finite set F becomes a center with one cycle of length
// n + 3 for each n in F.  Families of sets become disjoint unions of flowers,
// and staged enumerations become staged graph presentations.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spectra/machines.hpp"

namespace spectra {

struct Graph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t add_vertex() { return vertices++; }
  void add_edge(std::size_t a, std::size_t b) { edges.emplace_back(a, b); }
};

struct FlowerGraph {
  Graph graph;
  std::size_t center = 0;
};

inline std::size_t add_cycle(Graph& g, std::size_t center, Natural n) {
  std::size_t prev = center;
  for (Natural i = 0; i < n + 2; ++i) {
    std::size_t v = g.add_vertex();
    g.add_edge(prev, v);
    prev = v;
  }
  g.add_edge(prev, center);
  return n + 2;
}

inline FlowerGraph flower(const FiniteSet& f) {
  FlowerGraph fg;
  fg.center = fg.graph.add_vertex();
  for (Natural n : f) add_cycle(fg.graph, fg.center, n);
  return fg;
}

class MalformedGraph : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The components of a disjoint union of flowers.  A lone vertex counts as
/// isolated (it is also the flower of the empty set) and a lone cycle of
/// length l as the flower of {l - 3}.
struct DecodedFamily {
  std::multiset<FiniteSet> sets;
  std::size_t isolated = 0;
  friend bool operator==(const DecodedFamily&, const DecodedFamily&) = default;
};

inline DecodedFamily decode(const Graph& g) {
  std::vector<std::vector<std::size_t>> adj(g.vertices);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : g.edges) {
    if (a >= g.vertices || b >= g.vertices) throw MalformedGraph("edge endpoint out of range");
    if (a == b) throw MalformedGraph("self loop at " + std::to_string(a));
    if (!seen.insert(std::minmax(a, b)).second) throw MalformedGraph("repeated edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  DecodedFamily out;
  std::vector<bool> done(g.vertices, false);
  for (std::size_t s = 0; s < g.vertices; ++s) {
    if (done[s]) continue;
    std::vector<std::size_t> comp{s};
    done[s] = true;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t w : adj[comp[i]])
        if (!done[w]) done[w] = true, comp.push_back(w);
    if (comp.size() == 1) {
      ++out.isolated;
      continue;
    }
    std::vector<std::size_t> hubs;
    for (std::size_t v : comp) {
      if (adj[v].size() < 2) throw MalformedGraph("vertex " + std::to_string(v) + " has degree " + std::to_string(adj[v].size()));
      if (adj[v].size() > 2) hubs.push_back(v);
    }
    if (hubs.size() > 1) throw MalformedGraph("component has several vertices of degree at least 3");
    // Connected with every degree 2: a single cycle.
    if (hubs.empty()) {
      if (comp.size() < 3) throw MalformedGraph("cycle shorter than 3");
      out.sets.insert(FiniteSet{comp.size() - 3});
      continue;
    }
    // Walk each petal from the hub back to the hub.
    std::size_t hub = hubs[0];
    FiniteSet petals;
    std::set<std::size_t> used;
    for (std::size_t start : adj[hub]) {
      if (used.count(start)) continue;
      std::size_t prev = hub, cur = start, length = 1;
      while (cur != hub) {
        used.insert(cur);
        std::size_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
        prev = cur;
        cur = next;
        ++length;
      }
      if (length < 3) throw MalformedGraph("petal shorter than 3");
      if (!petals.insert(length - 3).second) throw MalformedGraph("two petals of length " + std::to_string(length));
    }
    out.sets.insert(petals);
  }
  return out;
}

/// decode of a single flower, reading a lone vertex as the empty set.
inline FiniteSet decode_flower(const Graph& g) {
  DecodedFamily d = decode(g);
  if (d.isolated == 1 && d.sets.empty()) return {};
  if (d.isolated != 0 || d.sets.size() != 1) throw MalformedGraph("not a single flower");
  return *d.sets.begin();
}

// ---------------------------------------------------------------------------
// Staged encoder.

/// A staged enumeration of columns A^[0], ..., A^[columns-1]; column(n, s) is
/// A^[n] at stage s and must grow with s.
struct StagedColumns {
  std::size_t columns = 0;
  std::function<FiniteSet(std::size_t, Natural)> column;
};

struct GraphDelta {
  Natural stage = 0;
  std::size_t new_vertices = 0;  // vertices are numbered in order of creation
  std::vector<std::pair<std::size_t, std::size_t>> new_edges;
};

/// A staged graph presentation as a log of additions.
struct StagedGraph {
  std::vector<GraphDelta> log;

  Graph at(Natural stage) const {
    Graph g;
    for (const auto& d : log) {
      if (d.stage > stage) break;
      g.vertices += d.new_vertices;
      g.edges.insert(g.edges.end(), d.new_edges.begin(), d.new_edges.end());
    }
    return g;
  }
};

/// Stage 0 creates `copies` centers per column and `copies` isolated
/// vertices; at stage s every copy of column n gains a cycle of length x + 3
/// for each x that entered A^[n] at s.
inline StagedGraph encode_enumeration(const StagedColumns& src, Natural stages, std::size_t copies) {
  StagedGraph out;
  std::size_t next_vertex = 0;
  std::vector<std::size_t> centers;
  GraphDelta first{0, 0, {}};
  for (std::size_t n = 0; n < src.columns; ++n)
    for (std::size_t c = 0; c < copies; ++c) centers.push_back(next_vertex++);
  next_vertex += copies;  // isolated vertices
  first.new_vertices = next_vertex;
  std::vector<FiniteSet> current(src.columns);
  for (Natural s = 0; s <= stages; ++s) {
    GraphDelta d = s == 0 ? first : GraphDelta{s, 0, {}};
    for (std::size_t n = 0; n < src.columns; ++n) {
      FiniteSet now = src.column(n, s);
      if (!std::includes(now.begin(), now.end(), current[n].begin(), current[n].end()))
        throw std::invalid_argument("column " + std::to_string(n) + " shrank at stage " + std::to_string(s));
      for (Natural x : now) {
        if (current[n].count(x)) continue;
        for (std::size_t c = 0; c < copies; ++c) {
          std::size_t prev = centers[n * copies + c];
          for (Natural i = 0; i < x + 2; ++i) {
            std::size_t v = next_vertex++;
            ++d.new_vertices;
            d.new_edges.emplace_back(prev, v);
            prev = v;
          }
          d.new_edges.emplace_back(prev, centers[n * copies + c]);
        }
      }
      current[n] = std::move(now);
    }
    if (s == 0 || d.new_vertices > 0) out.log.push_back(std::move(d));
  }
  return out;
}

/// What decode(encode_enumeration(src)[stage]) should be.
inline DecodedFamily expected_family(const StagedColumns& src, Natural stage, std::size_t copies) {
  DecodedFamily out;
  out.isolated = copies;
  for (std::size_t n = 0; n < src.columns; ++n) {
    FiniteSet col = src.column(n, stage);
    for (std::size_t c = 0; c < copies; ++c) {
      if (col.empty()) ++out.isolated;
      else out.sets.insert(col);
    }
  }
  return out;
}

}  // namespace spectra

#include <gtest/gtest.h>

#include <random>

#include "spectra/coding.hpp"

using namespace spectra;

namespace {

FiniteSet random_set(std::mt19937_64& rng, Natural max_element) {
  FiniteSet f;
  std::size_t n = rng() % 8;
  for (std::size_t i = 0; i < n; ++i) f.insert(rng() % (max_element + 1));
  return f;
}

// Petal lengths by brute force: delete the center; each remaining component
// of k vertices closes with the center into a cycle of length k + 1.
std::multiset<std::size_t> petal_lengths(const FlowerGraph& fg) {
  std::vector<std::vector<std::size_t>> adj(fg.graph.vertices);
  for (auto [a, b] : fg.graph.edges) adj[a].push_back(b), adj[b].push_back(a);
  std::multiset<std::size_t> out;
  std::vector<bool> seen(fg.graph.vertices, false);
  seen[fg.center] = true;
  for (std::size_t v = 0; v < fg.graph.vertices; ++v) {
    if (seen[v]) continue;
    std::vector<std::size_t> comp{v};
    seen[v] = true;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t w : adj[comp[i]])
        if (!seen[w]) seen[w] = true, comp.push_back(w);
    out.insert(comp.size() + 1);
  }
  return out;
}

}  // namespace

TEST(Flower, Examples) {
  EXPECT_EQ(flower({}).graph.vertices, 1u);
  EXPECT_TRUE(flower({}).graph.edges.empty());
  FlowerGraph tri = flower({0});
  EXPECT_EQ(tri.graph.vertices, 3u);
  EXPECT_EQ(tri.graph.edges.size(), 3u);
  FlowerGraph f02 = flower({0, 2});
  EXPECT_EQ(f02.graph.vertices, 7u);
  EXPECT_EQ(petal_lengths(f02), (std::multiset<std::size_t>{3, 5}));
}

TEST(Flower, VertexCountAndPetals) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    FiniteSet f = random_set(rng, 30);
    FlowerGraph fg = flower(f);
    std::size_t expected = 1;
    std::multiset<std::size_t> lengths;
    for (Natural n : f) expected += n + 2, lengths.insert(n + 3);
    EXPECT_EQ(fg.graph.vertices, expected);
    EXPECT_EQ(petal_lengths(fg), lengths);
  }
}

TEST(Decode, Examples) {
  EXPECT_EQ(decode_flower(flower({1, 4}).graph), (FiniteSet{1, 4}));
  Graph lone;
  lone.add_vertex();
  EXPECT_EQ(decode(lone).isolated, 1u);
  EXPECT_EQ(decode_flower(lone), FiniteSet{});
  // two triangles sharing an edge: 0-1-2-0 and 0-1-3-0
  Graph bad{4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 0}}};
  EXPECT_THROW(decode(bad), MalformedGraph);
}

TEST(Decode, RejectsNonFlowers) {
  EXPECT_THROW(decode(Graph{2, {{0, 1}}}), MalformedGraph);                  // an edge
  EXPECT_THROW(decode(Graph{3, {{0, 1}, {1, 2}}}), MalformedGraph);          // a path
  EXPECT_THROW(decode(Graph{2, {{0, 0}}}), MalformedGraph);                  // a loop
  EXPECT_THROW(decode(Graph{3, {{0, 1}, {1, 0}, {1, 2}}}), MalformedGraph);  // a double edge
  // two petals of the same length
  Graph twin = flower({0}).graph;
  add_cycle(twin, 0, 0);
  EXPECT_THROW(decode(twin), MalformedGraph);
}

TEST(Decode, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    FiniteSet f = random_set(rng, 30);
    EXPECT_EQ(decode_flower(flower(f).graph), f);
  }
}

TEST(Decode, DisjointUnions) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Graph g;
    DecodedFamily expected;
    std::size_t parts = 1 + rng() % 5;
    for (std::size_t p = 0; p < parts; ++p) {
      FiniteSet f = random_set(rng, 10);
      FlowerGraph fg = flower(f);
      std::size_t base = g.vertices;
      g.vertices += fg.graph.vertices;
      for (auto [a, b] : fg.graph.edges) g.add_edge(base + a, base + b);
      if (f.empty()) ++expected.isolated;
      else expected.sets.insert(f);
    }
    EXPECT_EQ(decode(g), expected);
  }
}

TEST(Encoder, Examples) {
  StagedColumns one{1, [](std::size_t, Natural s) { return s >= 2 ? FiniteSet{0} : FiniteSet{}; }};
  StagedGraph g = encode_enumeration(one, 5, 1);
  Graph at1 = g.at(1);
  EXPECT_TRUE(at1.edges.empty());
  Graph at3 = g.at(3);
  EXPECT_EQ(decode(at3).sets, (std::multiset<FiniteSet>{{0}}));
  EXPECT_EQ(at3.edges.size(), 3u);

  StagedColumns none{3, [](std::size_t, Natural) { return FiniteSet{}; }};
  Graph empty = encode_enumeration(none, 10, 2).at(10);
  EXPECT_TRUE(empty.edges.empty());
  EXPECT_EQ(decode(empty).isolated, 8u);

  StagedColumns twins{2, [](std::size_t, Natural s) { return s >= 1 ? FiniteSet{1, 3} : FiniteSet{}; }};
  DecodedFamily d = decode(encode_enumeration(twins, 4, 2).at(4));
  EXPECT_EQ(d.sets.count(FiniteSet{1, 3}), 4u);
}

TEST(Encoder, CoherentWithDecoderOnRandomEnumerations) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    // entry stage of each element of each column, or never
    std::size_t columns = 1 + rng() % 5;
    std::vector<std::map<Natural, Natural>> entry(columns);
    for (auto& col : entry)
      for (Natural x = 0; x < 12; ++x)
        if (rng() % 3 == 0) col[x] = rng() % 20;
    StagedColumns src{columns, [entry](std::size_t n, Natural s) {
                        FiniteSet f;
                        for (auto [x, t] : entry[n])
                          if (t <= s) f.insert(x);
                        return f;
                      }};
    std::size_t copies = 1 + trial % 3;
    StagedGraph g = encode_enumeration(src, 25, copies);
    for (Natural s = 0; s <= 25; ++s) EXPECT_EQ(decode(g.at(s)), expected_family(src, s, copies)) << "stage " << s;
  }
}

TEST(Encoder, RejectsShrinkingColumns) {
  StagedColumns bad{1, [](std::size_t, Natural s) { return s == 1 ? FiniteSet{1} : FiniteSet{}; }};
  EXPECT_THROW(encode_enumeration(bad, 3, 1), std::invalid_argument);
}

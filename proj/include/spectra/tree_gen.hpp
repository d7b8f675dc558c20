// Random finite trees and symbolic fat trees, with brute-force rank oracles
// for property checks.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "spectra/trees.hpp"

namespace spectra::gen {

/// Random recursive tree: node v > 0 picks a parent uniformly below it.
inline FiniteTree random_tree(std::mt19937_64& rng, std::size_t nodes) {
  std::vector<std::size_t> parent{0};
  for (std::size_t v = 1; v < nodes; ++v) parent.push_back(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng));
  return FiniteTree(std::move(parent));
}

/// A random tree whose rank is exactly r: a path of length r with random
/// extra nodes hung off the path at heights that keep the rank.
inline FiniteTree random_tree_of_rank(std::mt19937_64& rng, std::uint64_t r, std::size_t extra) {
  std::vector<std::size_t> parent{0};
  std::vector<std::uint64_t> depth{0};
  for (std::uint64_t i = 1; i <= r; ++i) {
    parent.push_back(i - 1);
    depth.push_back(i);
  }
  for (std::size_t e = 0; e < extra; ++e) {
    std::size_t p = std::uniform_int_distribution<std::size_t>(0, parent.size() - 1)(rng);
    if (depth[p] + 1 > r) continue;
    parent.push_back(p);
    depth.push_back(depth[p] + 1);
  }
  return FiniteTree(std::move(parent));
}

/// Height by walking up from every node: an oracle for rank_finite.
inline std::uint64_t height_by_parent_walk(const FiniteTree& t) {
  std::uint64_t best = 0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    std::uint64_t d = 0;
    for (std::size_t u = v; u != 0; u = t.parent(u)) ++d;
    best = std::max(best, d);
  }
  return best;
}

/// A fat symbolic tree of the given finite rank, built in one of several ways.
inline SymbolicTree random_fat_tree(std::mt19937_64& rng, std::uint64_t r) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return fat_tree(Ordinal::finite(r));
    case 1: return fatten(finite_tree(random_tree_of_rank(rng, r, 6)));
    case 2: {
      // sup of trees whose ranks top out at r
      std::vector<SymbolicTree> parts{finite_tree(random_tree_of_rank(rng, r, 3))};
      for (int i = 0; i < 2; ++i)
        parts.push_back(finite_tree(random_tree_of_rank(rng, std::uniform_int_distribution<std::uint64_t>(0, r)(rng), 3)));
      std::shuffle(parts.begin(), parts.end(), rng);
      return sup_trees(TreeFamily::of(std::move(parts)));
    }
    default: {
      // mini of (r + 1, r - 1) has rank min(r + 1, r - 1 + 1) = r
      if (r == 0) return fatten(root_only());
      std::vector<SymbolicTree> parts{finite_tree(random_tree_of_rank(rng, r + 1, 3)),
                                      finite_tree(random_tree_of_rank(rng, r - 1, 3))};
      return mini_trees(TreeFamily::of(std::move(parts)));
    }
  }
}

// Explicit construction of sup's string tree from finite trees.
inline FiniteTree explicit_sup(const std::vector<FiniteTree>& ts) {
  std::vector<std::size_t> parent{0};
  for (const auto& t : ts) {
    std::size_t base = parent.size() - 1;  // node v > 0 of t becomes base + v
    for (std::size_t v = 1; v < t.size(); ++v) parent.push_back(t.parent(v) == 0 ? 0 : base + t.parent(v));
  }
  return FiniteTree(std::move(parent));
}

// Rank of mini's string tree by exhaustive expansion straight from the
// definition: a node is the last tuple (x_0..x_k); children move every x_i to
// any proper descendant and append the root of the next tree.  The list is
// extended by repeating its last tree.
inline std::uint64_t explicit_mini_rank(const std::vector<FiniteTree>& ts) {
  auto tree = [&](std::size_t i) -> const FiniteTree& { return ts[std::min(i, ts.size() - 1)]; };
  auto descendants = [&](std::size_t i, std::size_t x) {
    std::vector<std::size_t> out;
    const FiniteTree& t = tree(i);
    for (std::size_t v = 0; v < t.size(); ++v)
      for (std::size_t u = v; u != 0;) {
        u = t.parent(u);
        if (u == x) {
          out.push_back(v);
          break;
        }
      }
    return out;
  };
  std::map<std::vector<std::size_t>, std::uint64_t> memo;
  std::function<std::uint64_t(const std::vector<std::size_t>&)> go = [&](const std::vector<std::size_t>& tuple) {
    if (auto it = memo.find(tuple); it != memo.end()) return it->second;
    std::vector<std::vector<std::size_t>> opts;
    for (std::size_t i = 0; i < tuple.size(); ++i) opts.push_back(descendants(i, tuple[i]));
    std::uint64_t r = 0;
    bool any = std::all_of(opts.begin(), opts.end(), [](const auto& o) { return !o.empty(); });
    if (any) {
      std::vector<std::size_t> pick(opts.size(), 0);
      while (true) {
        std::vector<std::size_t> child;
        for (std::size_t i = 0; i < opts.size(); ++i) child.push_back(opts[i][pick[i]]);
        child.push_back(0);
        r = std::max(r, go(child) + 1);
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == opts[i].size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
    memo[tuple] = r;
    return r;
  };
  return go({0});
}

}  // namespace spectra::gen

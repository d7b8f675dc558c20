// Tree pairs S_{a,0} = (T_{wa}, T_{wa+1}) and S_{a,1} = (T_{wa+1}, T_{wa}),
// the distinguisher theta, the staged trees T^b_g(m) with their exit
// function f, hardness presentations and the truth-table selector.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spectra/clopen.hpp"
#include "spectra/machines.hpp"
#include "spectra/trees.hpp"

namespace spectra {

struct IllFoundedMarker {
  friend bool operator==(IllFoundedMarker, IllFoundedMarker) { return true; }
};

/// A level: a standard ordinal or the marker for an ill-founded one.
using LevelNotation = std::variant<Ordinal, IllFoundedMarker>;

inline std::string to_string(const LevelNotation& a) {
  if (auto o = std::get_if<Ordinal>(&a)) return o->to_string();
  return "marker";
}

struct TreePair {
  SymbolicTree left;
  SymbolicTree right;
  std::string tag;
};

inline TreePair tree_pair(const LevelNotation& alpha, int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("pair bit must be 0 or 1");
  if (std::holds_alternative<IllFoundedMarker>(alpha))
    return {t_infinity(), t_infinity(), "S(marker," + std::to_string(bit) + ")"};
  const Ordinal& a = std::get<Ordinal>(alpha);
  if (a == Ordinal::finite(0)) throw std::invalid_argument("pair needs a level of at least 1");
  Ordinal wa = omega_times(a);
  SymbolicTree lo = fat_tree(wa), hi = fat_tree(wa + 1);
  std::string tag = "S(" + a.to_string() + "," + std::to_string(bit) + ")";
  return bit == 0 ? TreePair{lo, hi, tag} : TreePair{hi, lo, tag};
}

/// A finite slice of a pair as one structure: two trees on a shared universe
/// with a unary predicate marking the left one.
struct PairSlice {
  std::vector<std::size_t> parent;  // roots are their own parents
  std::vector<bool> left;
  std::vector<std::string> labels;
};

inline PairSlice materialize_pair(const TreePair& p, const Truncation& t, std::size_t depth) {
  PairSlice out;
  for (int side = 0; side < 2; ++side) {
    auto [tree, labels] = materialize(side == 0 ? p.left : p.right, t, depth);
    std::size_t base = out.parent.size();
    for (std::size_t v = 0; v < tree.size(); ++v) {
      out.parent.push_back(base + tree.parent(v));
      out.left.push_back(side == 0);
      out.labels.push_back(std::move(labels[v]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// theta.

/// Answers "rk(v) >= threshold" from jump snapshots certified up to a level.
struct SnapshotProvider {
  int certified_level = 0;
  std::function<std::optional<bool>(const NodePtr&, const Ordinal&, const Truncation&)> at_least;
};

/// Finite thresholds by a chain in the current truncation; infinite ones
/// from the exact rank the snapshots certify.
inline SnapshotProvider certified_snapshots(int level) {
  return {level, [](const NodePtr& v, const Ordinal& threshold, const Truncation& t) -> std::optional<bool> {
            if (threshold.is_finite()) {
              if (truncation_rank(SymbolicTree(v, ""), t) >= threshold.as_finite()) return true;
            }
            auto r = v->rank();
            if (!r) return std::nullopt;
            return !(*r < Rank(threshold));
          }};
}

/// Snapshots that never settle anything.
inline SnapshotProvider starved_snapshots(int level) {
  return {level, [](const NodePtr&, const Ordinal&, const Truncation&) -> std::optional<bool> { return std::nullopt; }};
}

struct ThetaResult {
  std::optional<int> value;
  Natural stage = 0;  // stage of the decision, or stages spent
};

/// Races the two sides of the pair: at stage s the root children in the
/// stage-s truncation (width s) are tested for rank >= wa, left side first.  The
/// first hit on the left gives 1, on the right 0.
inline ThetaResult theta(const TreePair& p, int alpha, const SnapshotProvider& snaps, Natural budget) {
  if (alpha < 1) throw std::invalid_argument("theta needs a level of at least 1");
  if (snaps.certified_level < 2 * alpha)
    throw std::invalid_argument("snapshots are certified to level " + std::to_string(snaps.certified_level) +
                                ", theta at level " + std::to_string(alpha) + " needs " + std::to_string(2 * alpha));
  Ordinal threshold = omega_times(Ordinal::finite(static_cast<std::uint64_t>(alpha)));
  // Nothing is enumerated at stage 0.
  for (Natural s = 1; s < budget; ++s) {
    Truncation t{static_cast<std::size_t>(s), s};
    for (int side = 0; side < 2; ++side) {
      std::set<std::string> asked;
      for (const auto& c : (side == 0 ? p.left : p.right).root()->children(t).nodes) {
        if (!asked.insert(c->label()).second) continue;
        auto hit = snaps.at_least(c, threshold, t);
        if (hit && *hit) return {side == 0 ? 1 : 0, s};
      }
    }
  }
  return {std::nullopt, budget};
}

// ---------------------------------------------------------------------------
// The exit function f and the trees T^b_g(m).

class UncertifiedDecision : public std::runtime_error {
 public:
  UncertifiedDecision(int level, Natural n)
      : std::runtime_error("membership of " + std::to_string(n) + " at jump level " + std::to_string(level) +
                           " is not certified"),
        level(level), n(n) {}
  int level;
  Natural n;
};

inline Decision certified_decision(const Hierarchy& h, int level, Natural n) {
  Decision d = h.decide(level, n);
  if (d.verdict == Verdict::Unknown) throw UncertifiedDecision(level, n);
  return d;
}

/// Stage from which m counts as having left, when m is in Z_(level): its
/// halting time, but never before 2m.
inline std::optional<Natural> exit_stage(const Hierarchy& h, int level, Natural m) {
  Decision d = certified_decision(h, level, m);
  if (d.verdict == Verdict::Out) return std::nullopt;
  return std::max(d.steps, 2 * m);
}

/// f(a, m, s): a padded copy of the halting program while m has not exited
/// Z_(a), of the looping program afterwards.  Lies in Z_(a-1) exactly until
/// the exit, and f(a, m, s) >= s.
inline Natural f_witness(const Hierarchy& h, int alpha, Natural m, Natural s) {
  if (alpha < 2) throw std::invalid_argument("f is defined for levels of at least 2");
  auto e = exit_stage(h, alpha, m);
  bool exited = e && s >= *e;
  return (exited ? Suite::kLoopId : Suite::kHaltId) + h.suite().size() * s;
}

struct FWitnessRow {
  int alpha = 0;
  Natural m = 0, s = 0, value = 0;
  Verdict below = Verdict::Unknown;  // value in Z_(alpha-1)?
};

inline std::vector<FWitnessRow> f_witness_table(const Hierarchy& h, const std::vector<int>& alphas, Natural m_bound,
                                                Natural s_bound) {
  std::vector<FWitnessRow> rows;
  for (int a : alphas)
    for (Natural m = 0; m < m_bound; ++m)
      for (Natural s = 0; s < s_bound; ++s) {
        Natural v = f_witness(h, a, m, s);
        rows.push_back({a, m, s, v, h.decide(a - 1, v).verdict});
      }
  return rows;
}

/// T^b_g(m) for 1 <= g <= the hierarchy's top level:
///   g = 1: a root until m enters Z', then T_b;
///   g even: mini_{s >= m} T^b_{g-1}(f(g, m, s));
///   g odd: sup_s T^b_{g-1}(f(g, m, s)).
/// The hierarchy must outlive the tree.
inline SymbolicTree t_tree(const Hierarchy& h, const Ordinal& beta, int gamma, Natural m) {
  if (gamma < 1 || gamma > h.max_level())
    throw std::out_of_range("tree level " + std::to_string(gamma) + " outside 1.." + std::to_string(h.max_level()));
  std::string name = "T^" + beta.to_string() + "_" + std::to_string(gamma) + "(" + std::to_string(m) + ")";
  if (gamma == 1) {
    Decision d = certified_decision(h, 1, m);
    std::optional<std::uint64_t> enter;
    if (d.verdict == Verdict::In) enter = d.steps;
    SymbolicTree g = graft(enter, true, fat_tree(beta));
    return SymbolicTree(g.root(), name);
  }
  auto e = exit_stage(h, gamma, m);
  const Hierarchy* hp = &h;
  TreeFamily fam;
  auto cache = std::make_shared<std::pair<std::mutex, std::map<std::uint64_t, SymbolicTree>>>();
  fam.generator = [hp, beta, gamma, m, cache](std::uint64_t s) {
    std::lock_guard lock(cache->first);
    auto it = cache->second.find(s);
    if (it == cache->second.end())
      it = cache->second.emplace(s, t_tree(*hp, beta, gamma - 1, f_witness(*hp, gamma, m, s))).first;
    return it->second;
  };
  if (gamma % 2 == 0) {
    fam.tail = StableTail{e ? std::max(*e, m) : m};
    return SymbolicTree(mini_trees(std::move(fam), m).root(), name);
  }
  if (e) {
    fam.tail = StableTail{*e};
  } else if (beta.is_finite()) {
    // Members have rank min(b, P s) here, constant once P s >= b.
    fam.tail = StableTail{beta.as_finite() + 1};
  } else {
    fam.tail = UnboundedFiniteTail{0};
  }
  return SymbolicTree(sup_trees(std::move(fam)).root(), name);
}

// ---------------------------------------------------------------------------
// Hardness presentations.

/// Per-n reduction targets: g sends A to Z_(2a+1), h sends the complement.
struct ReductionTables {
  std::vector<Natural> g, h;
};

/// N_n = (T^{wa+1}_{2a+1}(g(n)), T^{wa+1}_{2a+1}(h(n))).
inline TreePair hardness_pair(const Hierarchy& hier, int alpha, Natural n, const ReductionTables& r) {
  if (alpha < 1) throw std::invalid_argument("hardness needs a level of at least 1");
  if (n >= r.g.size() || n >= r.h.size()) throw std::out_of_range("reduction tables do not cover " + std::to_string(n));
  int gamma = 2 * alpha + 1;
  Verdict vg = certified_decision(hier, gamma, r.g[n]).verdict;
  Verdict vh = certified_decision(hier, gamma, r.h[n]).verdict;
  if (vg == vh)
    throw std::invalid_argument("reductions disagree at " + std::to_string(n) + ": both sides " + to_string(vg));
  Ordinal beta = omega_times(Ordinal::finite(static_cast<std::uint64_t>(alpha))) + 1;
  return {t_tree(hier, beta, gamma, r.g[n]), t_tree(hier, beta, gamma, r.h[n]), "N(" + std::to_string(n) + ")"};
}

// ---------------------------------------------------------------------------
// Truth tables.

/// Phi(X, Y, n) = 1 iff X in C_n and Y in D_n.
struct TruthTablePair {
  std::vector<Clopen> c, d;
};

inline int tt_apply(const TruthTablePair& tt, const std::string& x_prefix, const std::string& y_prefix, Natural n) {
  if (n >= tt.c.size() || n >= tt.d.size()) throw std::out_of_range("truth table has no entry " + std::to_string(n));
  if (!tt.c[n].contains(x_prefix)) return 0;
  return tt.d[n].contains(y_prefix) ? 1 : 0;
}

/// S_{a,0} when X misses C_n; otherwise the hardness presentation for
/// {n : Z_(2a) in D_n}, whose reductions the caller supplies.
inline TreePair psi_select(const TruthTablePair& tt, const std::string& x_prefix, int alpha, Natural n,
                           const Hierarchy& hier, const ReductionTables& r) {
  if (n >= tt.c.size()) throw std::out_of_range("truth table has no entry " + std::to_string(n));
  if (!tt.c[n].contains(x_prefix)) return tree_pair(Ordinal::finite(static_cast<std::uint64_t>(alpha)), 0);
  return hardness_pair(hier, alpha, n, r);
}

/// Two programs beyond halt and loop: one that halts after a short countdown,
/// one that halts iff its input is outside the oracle.
inline std::shared_ptr<const Suite> pairs_demo_suite() {
  return std::make_shared<Suite>(
      std::vector<NamedProgram>{
          {"slow-halt", parse_program("SET r1 2; DEC r1; JZ r1 4; JMP 1; HALT")},
          {"ask-own-input", parse_program("ORACLE r1 r0; JZ r1 3; HALT; JMP 3")},
      },
      "pairs-demo");
}

}  // namespace spectra

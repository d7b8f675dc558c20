// Rooted trees: explicit finite trees, symbolic tree terms (descending
// sequences, fattening, sup, mini, grafts, the ill-founded tree) with their
// rank calculus, width-bounded truncations and bounded back-and-forth.
//
// Symbolic trees are never built in full.  A node hands out a child list for
// a given truncation, tagged with how much of the real child set it covers:
//   Exact         the real children, all of them;
//   TypeComplete  every real child is isomorphic to a listed one, and every
//                 listed one occurs infinitely often among the real children;
//   Partial       some real children, nothing more is promised.
// Only Exact and TypeComplete lists can refute an isomorphism or embedding.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "spectra/ordinals.hpp"

namespace spectra {

// ---------------------------------------------------------------------------
// Ranks: an ordinal, or infinite for ill-founded trees.

class Rank {
 public:
  Rank(Ordinal value) : value_(std::move(value)) {}  // NOLINT: implicit on purpose
  static Rank infinite() { return Rank(); }
  static Rank finite(std::uint64_t n) { return Rank(Ordinal::finite(n)); }

  bool is_infinite() const { return !value_; }
  const Ordinal& ordinal() const {
    if (!value_) throw std::domain_error("infinite rank has no ordinal value");
    return *value_;
  }
  std::string to_string() const { return value_ ? value_->to_string() : "inf"; }

  friend std::strong_ordering operator<=>(const Rank& a, const Rank& b) {
    if (!a.value_ || !b.value_) return !a.value_ <=> !b.value_;
    return *a.value_ <=> *b.value_;
  }
  friend bool operator==(const Rank& a, const Rank& b) { return (a <=> b) == 0; }
  friend Rank operator+(const Rank& a, std::uint64_t n) { return a.value_ ? Rank(*a.value_ + n) : a; }

 private:
  Rank() = default;
  std::optional<Ordinal> value_;
};

// ---------------------------------------------------------------------------
// Finite trees.

class FiniteTree {
 public:
  /// Node 0 is the root and parent[0] must be 0.
  explicit FiniteTree(std::vector<std::size_t> parent = {0}) : parent_(std::move(parent)) {
    if (parent_.empty() || parent_[0] != 0) throw std::invalid_argument("finite tree: node 0 must be the root");
    children_.resize(parent_.size());
    for (std::size_t v = 1; v < parent_.size(); ++v) {
      if (parent_[v] >= parent_.size()) throw std::invalid_argument("finite tree: parent out of range");
      children_[parent_[v]].push_back(v);
    }
    // Every node must reach the root: walk down from the root.
    std::vector<std::size_t> order{0};
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t c : children_[order[i]]) order.push_back(c);
    if (order.size() != parent_.size()) throw std::invalid_argument("finite tree: parent function has a cycle");
    rank_.assign(parent_.size(), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      if (*it != 0) rank_[parent_[*it]] = std::max(rank_[parent_[*it]], rank_[*it] + 1);
  }

  static FiniteTree path(std::size_t edges) {
    std::vector<std::size_t> p{0};
    for (std::size_t i = 1; i <= edges; ++i) p.push_back(i - 1);
    return FiniteTree(std::move(p));
  }

  std::size_t size() const { return parent_.size(); }
  std::size_t parent(std::size_t v) const { return parent_.at(v); }
  const std::vector<std::size_t>& parents() const { return parent_; }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_.at(v); }
  /// rk(v): least upper bound of rk(c) + 1 over children c.
  std::uint64_t rank(std::size_t v = 0) const { return rank_.at(v); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::uint64_t> rank_;
};

inline std::uint64_t rank_finite(const FiniteTree& t) { return t.rank(0); }

inline std::string to_dot(const FiniteTree& t, const std::vector<std::string>& labels = {}) {
  std::string out = "digraph tree {\n";
  for (std::size_t v = 0; v < t.size(); ++v) {
    out += "  n" + std::to_string(v);
    if (v < labels.size()) {
      std::string esc;
      for (char c : labels[v]) esc += (c == '"' ? std::string("\\\"") : std::string(1, c));
      out += " [label=\"" + esc + "\"]";
    }
    out += ";\n";
  }
  for (std::size_t v = 1; v < t.size(); ++v)
    out += "  n" + std::to_string(t.parent(v)) + " -> n" + std::to_string(v) + ";\n";
  return out + "}\n";
}

// ---------------------------------------------------------------------------
// Nodes and child lists.

struct Truncation {
  std::size_t width = 3;
  std::uint64_t stage = std::numeric_limits<std::uint64_t>::max();
};

enum class ListKind { Exact, TypeComplete, Partial };

class Node;
using NodePtr = std::shared_ptr<const Node>;

struct ChildList {
  ListKind kind = ListKind::Exact;
  std::vector<NodePtr> nodes;
};

class Node {
 public:
  virtual ~Node() = default;
  virtual ChildList children(const Truncation& t) const = 0;
  /// Rank of the subtree below this node, when the calculus knows it.
  virtual std::optional<Rank> rank() const = 0;
  /// Nodes with equal labels have isomorphic subtrees.
  virtual std::string label() const = 0;
  /// All subtrees strictly below are isomorphic to this one.
  virtual bool homogeneous() const { return false; }
};

namespace detail {

inline std::uint64_t next_term_id() {
  static std::atomic<std::uint64_t> counter{0};
  return counter++;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Symbolic trees.

class SymbolicTree;

struct StableTail {
  std::uint64_t from = 0;  // rk(T_i) = rk(T_from) for all i >= from
};
struct UnboundedFiniteTail {
  std::uint64_t from = 0;  // rk(T_i) finite for i >= from, and unbounded
};
using TailCertificate = std::variant<std::monostate, StableTail, UnboundedFiniteTail>;

/// A uniformly computable sequence of trees.  A finite list is extended by
/// repeating its last tree.
struct TreeFamily {
  std::function<SymbolicTree(std::uint64_t)> generator;
  std::optional<std::uint64_t> listed;
  TailCertificate tail;

  static TreeFamily of(std::vector<SymbolicTree> trees);
  SymbolicTree at(std::uint64_t i) const;
};

class SymbolicTree {
 public:
  explicit SymbolicTree(NodePtr root, std::string description)
      : root_(std::move(root)), description_(std::move(description)) {}

  const NodePtr& root() const { return root_; }
  std::optional<Rank> rank() const { return root_->rank(); }
  const std::string& describe() const { return description_; }

 private:
  NodePtr root_;
  std::string description_;
};

inline TreeFamily TreeFamily::of(std::vector<SymbolicTree> trees) {
  if (trees.empty()) throw std::invalid_argument("tree family must be nonempty");
  auto shared = std::make_shared<std::vector<SymbolicTree>>(std::move(trees));
  TreeFamily f;
  f.listed = shared->size();
  f.generator = [shared](std::uint64_t i) { return (*shared)[std::min<std::uint64_t>(i, shared->size() - 1)]; };
  f.tail = StableTail{shared->size() - 1};
  return f;
}

inline SymbolicTree TreeFamily::at(std::uint64_t i) const {
  if (listed && i >= *listed) i = *listed - 1;
  return generator(i);
}

namespace detail {

inline std::uint64_t tail_start(const TailCertificate& c) {
  if (auto s = std::get_if<StableTail>(&c)) return s->from;
  if (auto u = std::get_if<UnboundedFiniteTail>(&c)) return u->from;
  return 0;
}

/// sup_{i >= 0} rk(T_i).
inline std::optional<Rank> family_sup(const TreeFamily& f) {
  if (std::holds_alternative<std::monostate>(f.tail)) return std::nullopt;
  std::uint64_t from = tail_start(f.tail);
  std::optional<Rank> best;
  for (std::uint64_t i = 0; i <= from; ++i) {
    auto r = f.at(i).rank();
    if (!r) return std::nullopt;
    if (!best || *r > *best) best = r;
  }
  if (std::holds_alternative<UnboundedFiniteTail>(f.tail) && *best < Rank(Ordinal::omega())) best = Ordinal::omega();
  return best;
}

/// min_{i >= j} (rk(T_{start+i}) + (i - k)), for j > k.
inline std::optional<Rank> family_tail_min(const TreeFamily& f, std::uint64_t start, std::uint64_t j,
                                           std::uint64_t k) {
  if (std::holds_alternative<std::monostate>(f.tail)) return std::nullopt;
  std::uint64_t from = tail_start(f.tail);
  bool unbounded = std::holds_alternative<UnboundedFiniteTail>(f.tail);
  std::optional<Rank> best;
  for (std::uint64_t i = j;; ++i) {
    bool past_tail = start + i > from;
    if (past_tail && !unbounded && best) break;
    // In an unbounded finite tail rk + (i - k) >= i - k, so stop once that
    // alone reaches the best value found.
    if (past_tail && best && !(Rank::finite(i - k) < *best)) break;
    if (i - j > 100000) return std::nullopt;
    auto r = f.at(start + i).rank();
    if (!r) return std::nullopt;
    Rank v = *r + (i - k);
    if (!best || v < *best) best = v;
  }
  return best;
}

struct Descendants {
  std::vector<NodePtr> nodes;  // distinct by label
  bool complete = true;        // every descendant type is represented
};

inline constexpr std::size_t kDescendantCap = 256;

/// Proper descendants of x, one per label, breadth first.
inline Descendants collect_descendants(const NodePtr& x, const Truncation& t) {
  Descendants out;
  std::set<std::string> seen;
  std::vector<NodePtr> frontier{x};
  while (!frontier.empty()) {
    std::vector<NodePtr> next;
    for (const auto& v : frontier) {
      ChildList cl = v->children(t);
      if (cl.kind == ListKind::Partial) out.complete = false;
      for (auto& c : cl.nodes) {
        if (!seen.insert(c->label()).second) continue;
        if (out.nodes.size() >= kDescendantCap) {
          out.complete = false;
          return out;
        }
        out.nodes.push_back(c);
        next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

/// Keeps one node per rank when every rank is known; otherwise unchanged.
inline std::vector<NodePtr> one_per_rank(const std::vector<NodePtr>& nodes) {
  std::vector<NodePtr> out;
  std::vector<Rank> ranks;
  for (const auto& n : nodes) {
    auto r = n->rank();
    if (!r) return nodes;
    if (std::find(ranks.begin(), ranks.end(), *r) == ranks.end()) {
      ranks.push_back(*r);
      out.push_back(n);
    }
  }
  return out;
}

// -- finite ---------------------------------------------------------------

class FiniteNode final : public Node {
 public:
  FiniteNode(std::shared_ptr<const FiniteTree> t, std::size_t v, std::uint64_t id) : t_(std::move(t)), v_(v), id_(id) {}
  ChildList children(const Truncation&) const override {
    ChildList cl{ListKind::Exact, {}};
    for (std::size_t c : t_->children(v_)) cl.nodes.push_back(std::make_shared<FiniteNode>(t_, c, id_));
    return cl;
  }
  std::optional<Rank> rank() const override { return Rank::finite(t_->rank(v_)); }
  std::string label() const override { return "F" + std::to_string(id_) + "." + std::to_string(v_); }

 private:
  std::shared_ptr<const FiniteTree> t_;
  std::size_t v_;
  std::uint64_t id_;
};

// -- root only ------------------------------------------------------------

class RootOnlyNode final : public Node {
 public:
  ChildList children(const Truncation&) const override { return {ListKind::Exact, {}}; }
  std::optional<Rank> rank() const override { return Rank::finite(0); }
  std::string label() const override { return "R"; }
};

// -- descending sequences -------------------------------------------------

/// The node of S_alpha reached by a sequence ending in gamma; its subtree is S_gamma.
class DescNode final : public Node {
 public:
  explicit DescNode(Ordinal gamma) : gamma_(std::move(gamma)) {}
  ChildList children(const Truncation& t) const override {
    ChildList cl;
    if (gamma_.is_finite()) {
      cl.kind = ListKind::Exact;
      for (std::uint64_t d = gamma_.as_finite(); d-- > 0;) cl.nodes.push_back(std::make_shared<DescNode>(Ordinal::finite(d)));
      return cl;
    }
    cl.kind = ListKind::Partial;
    if (gamma_.is_successor()) {
      // The immediate predecessor carries the rank; a few finite ones keep
      // the truncation broad.
      cl.nodes.push_back(std::make_shared<DescNode>(predecessor(gamma_)));
      for (std::uint64_t d = 0; d + 1 < t.width; ++d) cl.nodes.push_back(std::make_shared<DescNode>(Ordinal::finite(d)));
    } else {
      for (std::uint64_t s = 0; s < t.width; ++s) cl.nodes.push_back(std::make_shared<DescNode>(fund_seq(gamma_, s)));
    }
    return cl;
  }
  std::optional<Rank> rank() const override { return Rank(gamma_); }
  std::string label() const override { return "S(" + gamma_.to_string() + ")"; }

 private:
  Ordinal gamma_;
};

// -- ill-founded core -----------------------------------------------------

class IllFoundedNode final : public Node {
 public:
  ChildList children(const Truncation& t) const override {
    ChildList cl{ListKind::Partial, {}};
    for (std::size_t i = 0; i < std::max<std::size_t>(t.width, 1); ++i) cl.nodes.push_back(std::make_shared<IllFoundedNode>());
    return cl;
  }
  std::optional<Rank> rank() const override { return Rank::infinite(); }
  std::string label() const override { return "W"; }
  bool homogeneous() const override { return true; }
};

// -- fattening ------------------------------------------------------------

/// Node of fat(T) whose chain ends in x.  Its subtree depends only on x.
class FatNode final : public Node {
 public:
  FatNode(NodePtr x, std::uint64_t id) : x_(std::move(x)), id_(id) {}
  ChildList children(const Truncation& t) const override {
    ChildList cl;
    std::vector<NodePtr> reps;
    if (x_->homogeneous()) {
      auto direct = x_->children(t);
      if (!direct.nodes.empty()) reps.push_back(direct.nodes.front());
      cl.kind = ListKind::TypeComplete;
    } else {
      Descendants d = collect_descendants(x_, t);
      reps = d.nodes.size() > 64 ? one_per_rank(d.nodes) : d.nodes;
      cl.kind = d.complete ? ListKind::TypeComplete : ListKind::Partial;
    }
    std::size_t copies = std::max<std::size_t>(t.width, 1);
    for (const auto& r : reps)
      for (std::size_t n = 0; n < copies; ++n) cl.nodes.push_back(std::make_shared<FatNode>(r, id_));
    return cl;
  }
  std::optional<Rank> rank() const override { return x_->rank(); }
  std::string label() const override { return "f" + std::to_string(id_) + "(" + x_->label() + ")"; }
  bool homogeneous() const override { return x_->homogeneous(); }

 private:
  NodePtr x_;
  std::uint64_t id_;
};

// -- sup: disjoint union with roots identified -----------------------------

class SupNode final : public Node {
 public:
  SupNode(TreeFamily f, std::uint64_t id) : f_(std::move(f)), id_(id) {}
  ChildList children(const Truncation& t) const override {
    ChildList cl{f_.listed ? ListKind::Exact : ListKind::Partial, {}};
    std::uint64_t members = f_.listed ? *f_.listed : std::max<std::uint64_t>(t.width, 1);
    bool exact = false, type_complete = false;
    for (std::uint64_t i = 0; i < members; ++i) {
      ChildList m = f_.at(i).root()->children(t);
      if (m.kind == ListKind::Partial) cl.kind = ListKind::Partial;
      if (!m.nodes.empty()) (m.kind == ListKind::TypeComplete ? type_complete : exact) = true;
      for (auto& n : m.nodes) cl.nodes.push_back(std::move(n));
    }
    // Exact and TypeComplete pieces together give neither guarantee.
    if (cl.kind != ListKind::Partial && type_complete) cl.kind = exact ? ListKind::Partial : ListKind::TypeComplete;
    return cl;
  }
  std::optional<Rank> rank() const override { return family_sup(f_); }
  std::string label() const override { return "U" + std::to_string(id_); }

 private:
  TreeFamily f_;
  std::uint64_t id_;
};

// -- mini -----------------------------------------------------------------

/// Node of mini's string tree at height k: the last tuple (x_0, ..., x_k) with
/// x_i in T_{start+i}.  Children extend every component to a proper
/// descendant and append the root of T_{start+k+1}.
class MiniNode final : public Node {
 public:
  MiniNode(TreeFamily f, std::uint64_t start, std::vector<NodePtr> comps, std::uint64_t id)
      : f_(std::move(f)), start_(start), comps_(std::move(comps)), id_(id) {}

  ChildList children(const Truncation& t) const override {
    ChildList cl{ListKind::Exact, {}};
    std::vector<std::vector<NodePtr>> options;
    for (const auto& c : comps_) {
      Descendants d = collect_descendants(c, t);
      if (!d.complete) cl.kind = ListKind::Partial;
      options.push_back(one_per_rank(d.nodes));
      if (options.back().empty()) return cl;
    }
    // Representatives per rank only preserve rank, not isomorphism type.
    if (cl.kind == ListKind::Exact && !all_singletons(options)) cl.kind = ListKind::Partial;
    NodePtr next_root = f_.at(start_ + comps_.size()).root();
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      std::vector<NodePtr> child;
      for (std::size_t i = 0; i < options.size(); ++i) child.push_back(options[i][pick[i]]);
      child.push_back(next_root);
      cl.nodes.push_back(std::make_shared<MiniNode>(f_, start_, std::move(child), id_));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    return cl;
  }

  std::optional<Rank> rank() const override {
    std::uint64_t k = comps_.size() - 1;
    auto best = family_tail_min(f_, start_, k + 1, k);
    if (!best) return std::nullopt;
    for (const auto& c : comps_) {
      auto r = c->rank();
      if (!r) return std::nullopt;
      if (*r < *best) best = r;
    }
    return best;
  }

  std::string label() const override {
    std::string s = "M" + std::to_string(id_) + "(";
    for (const auto& c : comps_) s += c->label() + ";";
    return s + ")";
  }

 private:
  static bool all_singletons(const std::vector<std::vector<NodePtr>>& options) {
    return std::all_of(options.begin(), options.end(), [](const auto& o) { return o.size() == 1; });
  }

  TreeFamily f_;
  std::uint64_t start_;
  std::vector<NodePtr> comps_;
  std::uint64_t id_;
};

// -- graft ----------------------------------------------------------------

/// Root only until stage `enter`, then the target's root.  Without an entry
/// stage the tree stays a root; `certified` says that is final.
class GraftNode final : public Node {
 public:
  GraftNode(std::optional<std::uint64_t> enter, bool certified, SymbolicTree target, std::uint64_t id)
      : enter_(enter), certified_(certified), target_(std::move(target)), id_(id) {}
  ChildList children(const Truncation& t) const override {
    if (enter_ && t.stage >= *enter_) return target_.root()->children(t);
    return {certified_ || enter_ ? ListKind::Exact : ListKind::Partial, {}};
  }
  std::optional<Rank> rank() const override {
    if (enter_) return target_.rank();
    if (certified_) return Rank::finite(0);
    return std::nullopt;
  }
  std::string label() const override { return "G" + std::to_string(id_); }

 private:
  std::optional<std::uint64_t> enter_;
  bool certified_;
  SymbolicTree target_;
  std::uint64_t id_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Term constructors.

inline SymbolicTree root_only() { return SymbolicTree(std::make_shared<detail::RootOnlyNode>(), "root"); }

inline SymbolicTree finite_tree(FiniteTree t) {
  auto id = detail::next_term_id();
  auto shared = std::make_shared<const FiniteTree>(std::move(t));
  return SymbolicTree(std::make_shared<detail::FiniteNode>(shared, 0, id),
                      "finite(" + std::to_string(shared->size()) + " nodes)");
}

/// S_alpha: strictly descending sequences of ordinals below alpha.
inline SymbolicTree desc_seq_tree(const Ordinal& alpha) {
  return SymbolicTree(std::make_shared<detail::DescNode>(alpha), "S(" + alpha.to_string() + ")");
}

inline SymbolicTree fatten(const SymbolicTree& t) {
  return SymbolicTree(std::make_shared<detail::FatNode>(t.root(), detail::next_term_id()), "fat(" + t.describe() + ")");
}

/// T_alpha = fat(S_alpha).
inline SymbolicTree fat_tree(const Ordinal& alpha) { return fatten(desc_seq_tree(alpha)); }

/// The ill-founded tree w^{<w}.
inline SymbolicTree ill_founded_core() { return SymbolicTree(std::make_shared<detail::IllFoundedNode>(), "w^<w"); }

/// T_inf = fat(w^{<w}).
inline SymbolicTree t_infinity() { return fatten(ill_founded_core()); }

/// Roots of the family identified, without the outer fattening.
inline SymbolicTree sup_raw(TreeFamily f) {
  std::string d = "sup";
  if (f.listed) d += "[" + std::to_string(*f.listed) + "]";
  return SymbolicTree(std::make_shared<detail::SupNode>(std::move(f), detail::next_term_id()), d);
}

/// The string tree of mini_{i >= start} T_i, without the outer fattening.
inline SymbolicTree mini_raw(TreeFamily f, std::uint64_t start = 0) {
  std::string d = "mini[start=" + std::to_string(start) + "]";
  NodePtr root0 = f.at(start).root();
  return SymbolicTree(std::make_shared<detail::MiniNode>(std::move(f), start, std::vector<NodePtr>{root0},
                                                         detail::next_term_id()),
                      d);
}

inline SymbolicTree sup_trees(TreeFamily f) { return fatten(sup_raw(std::move(f))); }
inline SymbolicTree mini_trees(TreeFamily f, std::uint64_t start = 0) { return fatten(mini_raw(std::move(f), start)); }

inline SymbolicTree graft(std::optional<std::uint64_t> enter, bool certified, SymbolicTree target) {
  std::string d = "graft(" + (enter ? "@" + std::to_string(*enter) : std::string(certified ? "never" : "?")) + ", " +
                  target.describe() + ")";
  return SymbolicTree(std::make_shared<detail::GraftNode>(enter, certified, std::move(target), detail::next_term_id()),
                      d);
}

// ---------------------------------------------------------------------------
// Term syntax.

class TreeTermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

/// Splits "head(a, b(c, d))" into head and top-level arguments.
inline std::pair<std::string, std::vector<std::string_view>> split_call(std::string_view text) {
  text = trim(text);
  std::size_t open = text.find('(');
  if (open == std::string_view::npos) return {std::string(text), {}};
  if (text.back() != ')') throw TreeTermError("tree term: missing ')' in '" + std::string(text) + "'");
  std::vector<std::string_view> args;
  int depth = 0;
  std::size_t from = open + 1;
  for (std::size_t i = open + 1; i + 1 < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth < 0) throw TreeTermError("tree term: unbalanced ')' in '" + std::string(text) + "'");
    if (text[i] == ',' && depth == 0) {
      args.push_back(trim(text.substr(from, i - from)));
      from = i + 1;
    }
  }
  if (depth != 0) throw TreeTermError("tree term: unbalanced '(' in '" + std::string(text) + "'");
  args.push_back(trim(text.substr(from, text.size() - 1 - from)));
  return {std::string(trim(text.substr(0, open))), args};
}

}  // namespace detail

/// Tree terms: root, path(n), S(a), T(a), core, Tinf, fat(t), sup(t, ...),
/// mini(t, ...), with a an ordinal such as "w*2 + 1".  sup and mini fatten.
inline SymbolicTree parse_tree_term(std::string_view text) {
  auto call = detail::split_call(text);
  const std::string& head = call.first;
  const std::vector<std::string_view>& args = call.second;
  auto arity = [&](std::size_t n) {
    if (args.size() != n)
      throw TreeTermError("tree term: " + head + " takes " + std::to_string(n) + " argument(s), got " +
                          std::to_string(args.size()));
  };
  auto family = [&] {
    std::vector<SymbolicTree> parts;
    for (auto a : args) parts.push_back(parse_tree_term(a));
    if (parts.empty()) throw TreeTermError("tree term: empty family");
    return TreeFamily::of(std::move(parts));
  };
  if (head == "root" || head == "core" || head == "Tinf") {
    if (text.find('(') != std::string_view::npos) throw TreeTermError("tree term: " + head + " takes no arguments");
    return head == "root" ? root_only() : head == "core" ? ill_founded_core() : t_infinity();
  }
  if (head == "path") {
    arity(1);
    std::size_t n = 0;
    try {
      n = std::stoul(std::string(args[0]));
    } catch (const std::exception&) {
      throw TreeTermError("tree term: path length must be a natural number");
    }
    std::vector<std::size_t> parent{0};
    for (std::size_t v = 1; v <= n; ++v) parent.push_back(v - 1);
    return finite_tree(FiniteTree(std::move(parent)));
  }
  if (head == "S" || head == "T") {
    arity(1);
    Ordinal a = parse_ordinal(args[0]);
    return head == "S" ? desc_seq_tree(a) : fat_tree(a);
  }
  if (head == "fat") {
    arity(1);
    return fatten(parse_tree_term(args[0]));
  }
  if (head == "sup") return sup_trees(family());
  if (head == "mini") return mini_trees(family());
  throw TreeTermError("tree term: unknown constructor '" + head + "'");
}

// ---------------------------------------------------------------------------
// Truncations.

inline constexpr std::size_t kDefaultNodeCap = 200000;

/// Rank of the truncated tree, computed bottom-up over the truncation's child
/// lists (memoised on labels).  Throws if the truncation does not bottom out
/// within `node_cap` distinct labels.
inline std::uint64_t truncation_rank(const SymbolicTree& tree, const Truncation& t, std::size_t node_cap = kDefaultNodeCap) {
  std::unordered_map<std::string, std::uint64_t> memo;
  std::set<std::string> open;
  std::function<std::uint64_t(const NodePtr&)> go = [&](const NodePtr& v) -> std::uint64_t {
    std::string key = v->label();
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (!open.insert(key).second) throw std::runtime_error("truncation is not well-founded");
    if (memo.size() + open.size() > node_cap) throw std::length_error("truncation exceeds the node cap");
    std::uint64_t r = 0;
    for (const auto& c : v->children(t).nodes) r = std::max(r, go(c) + 1);
    open.erase(key);
    memo.emplace(key, r);
    return r;
  };
  return go(tree.root());
}

/// Expands the truncation to depth `depth` as an explicit tree, with node labels.
inline std::pair<FiniteTree, std::vector<std::string>> materialize(const SymbolicTree& tree, const Truncation& t,
                                                                   std::size_t depth, std::size_t node_cap = 20000) {
  std::vector<std::size_t> parent{0};
  std::vector<std::string> labels{tree.root()->label()};
  std::vector<std::pair<NodePtr, std::size_t>> frontier{{tree.root(), 0}};
  for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<std::pair<NodePtr, std::size_t>> next;
    for (const auto& [v, id] : frontier)
      for (const auto& c : v->children(t).nodes) {
        if (parent.size() >= node_cap) throw std::length_error("materialize: node cap exceeded");
        parent.push_back(id);
        labels.push_back(c->label());
        next.emplace_back(c, parent.size() - 1);
      }
    frontier = std::move(next);
  }
  return {FiniteTree(std::move(parent)), std::move(labels)};
}

// ---------------------------------------------------------------------------
// Bounded back-and-forth.

enum class BoundedVerdict { IsomorphicToBound, Distinguished, Inconclusive };

inline const char* to_string(BoundedVerdict v) {
  switch (v) {
    case BoundedVerdict::IsomorphicToBound: return "isomorphic-to-bound";
    case BoundedVerdict::Distinguished: return "distinguished";
    case BoundedVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct BoundedOptions {
  std::size_t depth = 4;
  std::size_t width = 5;
  /// Refute as soon as symbolic ranks differ.  Off, the search relies on
  /// structure alone.
  bool use_ranks = true;
  std::uint64_t stage = std::numeric_limits<std::uint64_t>::max();
};

namespace detail {

enum class Tri { Yes, No, Maybe };

/// Kuhn's augmenting paths; edge(i, j) says whether i may be matched to j.
inline bool has_injective_matching(std::size_t n, std::size_t m, const std::function<bool(std::size_t, std::size_t)>& edge) {
  if (n > m) return false;
  std::vector<std::ptrdiff_t> owner(m, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(m, false);
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
      for (std::size_t j = 0; j < m; ++j) {
        if (seen[j] || !edge(u, j)) continue;
        seen[j] = true;
        if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]))) {
          owner[j] = static_cast<std::ptrdiff_t>(u);
          return true;
        }
      }
      return false;
    };
    if (!augment(i)) return false;
  }
  return true;
}

inline std::vector<NodePtr> distinct_labels(const std::vector<NodePtr>& v) {
  std::vector<NodePtr> out;
  std::set<std::string> seen;
  for (const auto& n : v)
    if (seen.insert(n->label()).second) out.push_back(n);
  return out;
}

class BackAndForth {
 public:
  BackAndForth(const BoundedOptions& o, bool embed) : opt_(o), embed_(embed) {}

  Tri run(const NodePtr& x, const NodePtr& y, std::size_t depth) {
    std::string key = x->label() + "|" + y->label() + "|" + std::to_string(depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Tri r = compute(x, y, depth);
    memo_[key] = r;
    return r;
  }

 private:
  Tri compute(const NodePtr& x, const NodePtr& y, std::size_t depth) {
    if (opt_.use_ranks) {
      auto rx = x->rank(), ry = y->rank();
      if (rx && ry && (embed_ ? *rx > *ry : *rx != *ry)) return Tri::No;
    }
    if (depth == 0) return Tri::Yes;
    Truncation t{opt_.width, opt_.stage};
    ChildList cx = x->children(t), cy = y->children(t);
    auto sub = [&](const NodePtr& a, const NodePtr& b) { return run(a, b, depth - 1); };
    if (embed_) return forth(cx, cy, sub);
    Tri f = forth(cx, cy, sub);
    if (f == Tri::No) return Tri::No;
    Tri b = forth(cy, cx, [&](const NodePtr& a, const NodePtr& c) { return run(c, a, depth - 1); });
    if (b == Tri::No) return Tri::No;
    if (cx.kind == ListKind::Exact && cy.kind == ListKind::Exact && f == Tri::Yes) {
      // Exact lists also need a bijection.
      return exact_bijection(cx.nodes, cy.nodes, sub);
    }
    return (f == Tri::Yes && b == Tri::Yes) ? Tri::Yes : Tri::Maybe;
  }

  // Can the children of a be sent to children of b (injectively where b's
  // list is finite)?  No is only returned when it is a proof.
  Tri forth(const ChildList& a, const ChildList& b, const std::function<Tri(const NodePtr&, const NodePtr&)>& sub) {
    bool can_refute = b.kind != ListKind::Partial;
    if (a.nodes.empty()) return Tri::Yes;
    if (b.kind == ListKind::Exact && a.kind == ListKind::TypeComplete) return Tri::No;  // infinitely many into finitely many
    if (b.kind == ListKind::Exact && !embed_ && a.kind == ListKind::Exact && a.nodes.size() != b.nodes.size())
      return Tri::No;
    auto matches = [&](bool strict) {
      if (b.kind == ListKind::Exact) {
        return has_injective_matching(a.nodes.size(), b.nodes.size(), [&](std::size_t i, std::size_t j) {
          Tri r = sub(a.nodes[i], b.nodes[j]);
          return strict ? r == Tri::Yes : r != Tri::No;
        });
      }
      // Targets occur infinitely often (TypeComplete) or nothing can be
      // refuted anyway (Partial): match each type on its own.  Listing a
      // TypeComplete source by type is enough for the same reason.
      for (const auto& u : distinct_labels(a.nodes)) {
        bool found = false;
        for (const auto& v : distinct_labels(b.nodes)) {
          Tri r = sub(u, v);
          if (strict ? r == Tri::Yes : r != Tri::No) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      return true;
    };
    if (matches(true)) return Tri::Yes;
    if (!matches(false)) return can_refute ? Tri::No : Tri::Maybe;
    return Tri::Maybe;
  }

  Tri exact_bijection(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b,
                      const std::function<Tri(const NodePtr&, const NodePtr&)>& sub) {
    if (a.size() != b.size()) return Tri::No;
    auto strict = [&](std::size_t i, std::size_t j) { return sub(a[i], b[j]) == Tri::Yes; };
    if (has_injective_matching(a.size(), b.size(), strict)) return Tri::Yes;
    auto loose = [&](std::size_t i, std::size_t j) { return sub(a[i], b[j]) != Tri::No; };
    return has_injective_matching(a.size(), b.size(), loose) ? Tri::Maybe : Tri::No;
  }

  BoundedOptions opt_;
  bool embed_;
  std::unordered_map<std::string, Tri> memo_;
};

inline BoundedVerdict to_verdict(Tri t) {
  return t == Tri::Yes ? BoundedVerdict::IsomorphicToBound : t == Tri::No ? BoundedVerdict::Distinguished
                                                                          : BoundedVerdict::Inconclusive;
}

}  // namespace detail

/// Back-and-forth between truncations of a and b to the given depth.
/// Distinguished is a proof of non-isomorphism; IsomorphicToBound only
/// speaks about the truncations.
inline BoundedVerdict bounded_iso(const SymbolicTree& a, const SymbolicTree& b, const BoundedOptions& opt = {}) {
  if (opt.use_ranks) {
    auto ra = a.rank(), rb = b.rank();
    if (ra && rb && *ra != *rb) return BoundedVerdict::Distinguished;
  }
  return detail::to_verdict(detail::BackAndForth(opt, false).run(a.root(), b.root(), opt.depth));
}

/// Forth-only variant: does s embed into t?  IsomorphicToBound reads
/// "embeds to bound", Distinguished "cannot embed".
inline BoundedVerdict bounded_embed(const SymbolicTree& s, const SymbolicTree& t, const BoundedOptions& opt = {}) {
  return detail::to_verdict(detail::BackAndForth(opt, true).run(s.root(), t.root(), opt.depth));
}

}  // namespace spectra

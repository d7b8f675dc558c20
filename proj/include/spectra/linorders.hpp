// Linear order terms with sampling and comparison: finite chains, ordinals,
// the rationals, w*, sums, products, powers w^L, supplied orders and the
// ill-founded marker.
#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spectra/clopen.hpp"
#include "spectra/ordinals.hpp"

namespace spectra {

class MalformedTerm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LinearOrderTerm;
using TermPtr = std::shared_ptr<const LinearOrderTerm>;

namespace lo {

struct FiniteChain { std::uint64_t n = 0; };
struct OrdinalOrder { Ordinal alpha; };
struct Rationals {};
struct OmegaStar {};
struct Sum { std::vector<TermPtr> parts; };
/// b copies of a.
struct Product { TermPtr a, b; };
struct OmegaPower { TermPtr base; };
/// An order handed over by a black-box supplier, with its presentation.
struct ExternalSupplier {
  std::string tag;
  TermPtr presentation;
};
/// Stands in for an ill-founded ordinal notation; sampled as w*.
struct Marker {};

}  // namespace lo

class LinearOrderTerm {
 public:
  using Node = std::variant<lo::FiniteChain, lo::OrdinalOrder, lo::Rationals, lo::OmegaStar, lo::Sum, lo::Product,
                            lo::OmegaPower, lo::ExternalSupplier, lo::Marker>;
  explicit LinearOrderTerm(Node n) : node(std::move(n)) {}
  Node node;
};

namespace lo {

inline TermPtr chain(std::uint64_t n) { return std::make_shared<LinearOrderTerm>(FiniteChain{n}); }
inline TermPtr ordinal(Ordinal a) { return std::make_shared<LinearOrderTerm>(OrdinalOrder{std::move(a)}); }
inline TermPtr rationals() { return std::make_shared<LinearOrderTerm>(Rationals{}); }
inline TermPtr omega_star() { return std::make_shared<LinearOrderTerm>(OmegaStar{}); }
inline TermPtr sum(std::vector<TermPtr> parts) { return std::make_shared<LinearOrderTerm>(Sum{std::move(parts)}); }
inline TermPtr product(TermPtr a, TermPtr b) { return std::make_shared<LinearOrderTerm>(Product{std::move(a), std::move(b)}); }
inline TermPtr power(TermPtr base) { return std::make_shared<LinearOrderTerm>(OmegaPower{std::move(base)}); }
inline TermPtr external(std::string tag, TermPtr p) {
  return std::make_shared<LinearOrderTerm>(ExternalSupplier{std::move(tag), std::move(p)});
}
inline TermPtr marker() { return std::make_shared<LinearOrderTerm>(Marker{}); }

}  // namespace lo

/// An element of some term.  Chains and w* use `n` (w* element n is -n),
/// ordinals `ord`, rationals `q`; sums keep the summand in `n` and the
/// element in kids[0]; products keep (a, b) in kids; powers keep their
/// support in kids, greatest first, with nonzero coefficients in `coeffs`.
struct Elem {
  enum class Kind { Nat, Ord, Rat, Sum, Pair, Power };
  Kind kind = Kind::Nat;
  std::uint64_t n = 0;
  Ordinal ord;
  Dyadic q;
  std::vector<Elem> kids;
  std::vector<std::uint64_t> coeffs;

  static Elem nat(std::uint64_t n) { return {Kind::Nat, n, {}, {}, {}, {}}; }
  static Elem of_ordinal(Ordinal o) { return {Kind::Ord, 0, std::move(o), {}, {}, {}}; }
  static Elem rat(Dyadic q) { return {Kind::Rat, 0, {}, q, {}, {}}; }
  static Elem in_sum(std::size_t part, Elem x) { return {Kind::Sum, part, {}, {}, {std::move(x)}, {}}; }
  static Elem pair(Elem a, Elem b) { return {Kind::Pair, 0, {}, {}, {std::move(a), std::move(b)}, {}}; }
  static Elem zero_map() { return {Kind::Power, 0, {}, {}, {}, {}}; }

  friend bool operator==(const Elem&, const Elem&) = default;
};

namespace detail {

[[noreturn]] inline void foreign(const char* what) {
  throw MalformedTerm(std::string("element does not belong to ") + what);
}

inline void expect_kind(const Elem& x, Elem::Kind k, const char* what) {
  if (x.kind != k) foreign(what);
}

}  // namespace detail

inline std::strong_ordering compare(const TermPtr& t, const Elem& x, const Elem& y);

/// Coefficient of the power element f at the point x of L.
inline std::uint64_t power_at(const TermPtr& l, const Elem& f, const Elem& x) {
  for (std::size_t i = 0; i < f.kids.size(); ++i)
    if (compare(l, f.kids[i], x) == 0) return f.coeffs[i];
  return 0;
}

/// f < g iff f(x) < g(x) at the L-greatest x where they differ.
inline std::strong_ordering compare_power(const TermPtr& l, const Elem& f, const Elem& g) {
  detail::expect_kind(f, Elem::Kind::Power, "w^L");
  detail::expect_kind(g, Elem::Kind::Power, "w^L");
  std::size_t i = 0, j = 0;
  while (i < f.kids.size() || j < g.kids.size()) {
    if (j == g.kids.size()) return std::strong_ordering::greater;
    if (i == f.kids.size()) return std::strong_ordering::less;
    auto c = compare(l, f.kids[i], g.kids[j]);
    if (c > 0) return std::strong_ordering::greater;  // f is nonzero where g is 0
    if (c < 0) return std::strong_ordering::less;
    if (f.coeffs[i] != g.coeffs[j]) return f.coeffs[i] <=> g.coeffs[j];
    ++i, ++j;
  }
  return std::strong_ordering::equal;
}

inline std::strong_ordering compare(const TermPtr& t, const Elem& x, const Elem& y) {
  using K = Elem::Kind;
  return std::visit(
      [&](const auto& node) -> std::strong_ordering {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) {
          detail::expect_kind(x, K::Nat, "a finite chain");
          detail::expect_kind(y, K::Nat, "a finite chain");
          if (x.n >= node.n || y.n >= node.n) detail::foreign("a finite chain");
          return x.n <=> y.n;
        } else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) {
          detail::expect_kind(x, K::Ord, "an ordinal");
          detail::expect_kind(y, K::Ord, "an ordinal");
          if (!(x.ord < node.alpha) || !(y.ord < node.alpha)) detail::foreign("an ordinal");
          return x.ord <=> y.ord;
        } else if constexpr (std::is_same_v<N, lo::Rationals>) {
          detail::expect_kind(x, K::Rat, "the rationals");
          detail::expect_kind(y, K::Rat, "the rationals");
          return x.q <=> y.q;
        } else if constexpr (std::is_same_v<N, lo::OmegaStar> || std::is_same_v<N, lo::Marker>) {
          detail::expect_kind(x, K::Nat, "w*");
          detail::expect_kind(y, K::Nat, "w*");
          if (x.n == 0 || y.n == 0) detail::foreign("w*");
          return y.n <=> x.n;
        } else if constexpr (std::is_same_v<N, lo::Sum>) {
          detail::expect_kind(x, K::Sum, "a sum");
          detail::expect_kind(y, K::Sum, "a sum");
          if (x.n >= node.parts.size() || y.n >= node.parts.size()) detail::foreign("a sum");
          if (x.n != y.n) return x.n <=> y.n;
          return compare(node.parts[x.n], x.kids[0], y.kids[0]);
        } else if constexpr (std::is_same_v<N, lo::Product>) {
          detail::expect_kind(x, K::Pair, "a product");
          detail::expect_kind(y, K::Pair, "a product");
          auto c = compare(node.b, x.kids[1], y.kids[1]);
          return c != 0 ? c : compare(node.a, x.kids[0], y.kids[0]);
        } else if constexpr (std::is_same_v<N, lo::OmegaPower>) {
          return compare_power(node.base, x, y);
        } else {
          return compare(node.presentation, x, y);
        }
      },
      t->node);
}

inline bool less(const TermPtr& t, const Elem& x, const Elem& y) { return compare(t, x, y) < 0; }

/// The power element with the given coefficients, normalised: support sorted
/// greatest first, repeated points merged, zeros dropped.
inline Elem make_power(const TermPtr& l, std::vector<std::pair<Elem, std::uint64_t>> entries) {
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) { return less(l, b.first, a.first); });
  Elem f = Elem::zero_map();
  for (auto& [x, c] : entries) {
    if (!f.kids.empty() && compare(l, f.kids.back(), x) == 0) {
      f.coeffs.back() += c;
      continue;
    }
    f.kids.push_back(std::move(x));
    f.coeffs.push_back(c);
  }
  for (std::size_t i = f.kids.size(); i-- > 0;)
    if (f.coeffs[i] == 0) f.kids.erase(f.kids.begin() + i), f.coeffs.erase(f.coeffs.begin() + i);
  return f;
}

// ---------------------------------------------------------------------------
// Least elements.

inline bool is_empty(const TermPtr& t);

inline std::optional<Elem> least(const TermPtr& t) {
  return std::visit(
      [&](const auto& node) -> std::optional<Elem> {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) {
          if (node.n == 0) return std::nullopt;
          return Elem::nat(0);
        } else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) {
          if (node.alpha.is_zero()) return std::nullopt;
          return Elem::of_ordinal(Ordinal());
        } else if constexpr (std::is_same_v<N, lo::Rationals> || std::is_same_v<N, lo::OmegaStar> ||
                             std::is_same_v<N, lo::Marker>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<N, lo::Sum>) {
          for (std::size_t i = 0; i < node.parts.size(); ++i) {
            if (is_empty(node.parts[i])) continue;
            auto l = least(node.parts[i]);
            if (!l) return std::nullopt;
            return Elem::in_sum(i, *l);
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<N, lo::Product>) {
          auto a = least(node.a), b = least(node.b);
          if (!a || !b) return std::nullopt;
          return Elem::pair(*a, *b);
        } else if constexpr (std::is_same_v<N, lo::OmegaPower>) {
          return Elem::zero_map();
        } else {
          return least(node.presentation);
        }
      },
      t->node);
}

inline bool is_empty(const TermPtr& t) {
  return std::visit(
      [&](const auto& node) -> bool {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) return node.n == 0;
        else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) return node.alpha.is_zero();
        else if constexpr (std::is_same_v<N, lo::Sum>)
          return std::all_of(node.parts.begin(), node.parts.end(), [](const TermPtr& p) { return is_empty(p); });
        else if constexpr (std::is_same_v<N, lo::Product>) return is_empty(node.a) || is_empty(node.b);
        else if constexpr (std::is_same_v<N, lo::ExternalSupplier>) return is_empty(node.presentation);
        else return false;
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Sampling.

namespace detail {

inline Ordinal sample_below_power(std::mt19937_64& rng, const Ordinal& e, int depth);

/// A random ordinal below a.
inline Ordinal sample_below(std::mt19937_64& rng, const Ordinal& a, int depth = 0) {
  if (a.is_zero()) throw MalformedTerm("no ordinal below 0");
  if (a.is_finite()) return Ordinal::finite(rng() % a.as_finite());
  const auto& terms = a.terms();
  // keep the leading terms of a, then go below one of them
  std::size_t keep = rng() % terms.size();
  Ordinal prefix;
  for (std::size_t i = 0; i < keep; ++i) prefix = prefix + Ordinal::omega_power(terms[i].exponent, terms[i].coefficient);
  const auto& t = terms[keep];
  Ordinal head = Ordinal::omega_power(t.exponent, rng() % t.coefficient);
  return prefix + head + sample_below_power(rng, t.exponent, depth + 1);
}

/// A random ordinal below w^e.
inline Ordinal sample_below_power(std::mt19937_64& rng, const Ordinal& e, int depth) {
  if (e.is_zero() || depth > 4 || rng() % 4 == 0) return Ordinal();
  Ordinal e2 = sample_below(rng, e, depth + 1);
  return Ordinal::omega_power(e2, 1 + rng() % 3) + sample_below_power(rng, e2, depth + 1);
}

}  // namespace detail

inline Elem sample(const TermPtr& t, std::mt19937_64& rng) {
  return std::visit(
      [&](const auto& node) -> Elem {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) {
          if (node.n == 0) throw MalformedTerm("cannot sample the empty chain");
          return Elem::nat(rng() % node.n);
        } else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) {
          return Elem::of_ordinal(detail::sample_below(rng, node.alpha));
        } else if constexpr (std::is_same_v<N, lo::Rationals>) {
          std::int64_t num = static_cast<std::int64_t>(rng() % 2001) - 1000;
          return Elem::rat(Dyadic(num, static_cast<unsigned>(rng() % 6)));
        } else if constexpr (std::is_same_v<N, lo::OmegaStar> || std::is_same_v<N, lo::Marker>) {
          return Elem::nat(1 + rng() % 20);
        } else if constexpr (std::is_same_v<N, lo::Sum>) {
          std::vector<std::size_t> live;
          for (std::size_t i = 0; i < node.parts.size(); ++i)
            if (!is_empty(node.parts[i])) live.push_back(i);
          if (live.empty()) throw MalformedTerm("cannot sample an empty sum");
          std::size_t i = live[rng() % live.size()];
          return Elem::in_sum(i, sample(node.parts[i], rng));
        } else if constexpr (std::is_same_v<N, lo::Product>) {
          Elem a = sample(node.a, rng);
          return Elem::pair(std::move(a), sample(node.b, rng));
        } else if constexpr (std::is_same_v<N, lo::OmegaPower>) {
          std::vector<std::pair<Elem, std::uint64_t>> entries;
          if (!is_empty(node.base))
            for (std::size_t k = rng() % 4; k > 0; --k) entries.emplace_back(sample(node.base, rng), 1 + rng() % 64);
          return make_power(node.base, std::move(entries));
        } else {
          return sample(node.presentation, rng);
        }
      },
      t->node);
}

/// Distinct sampled elements, sorted.
inline std::vector<Elem> sample_fragment(const TermPtr& t, std::size_t n, std::uint64_t seed, std::size_t max_tries = 0) {
  std::mt19937_64 rng(seed);
  std::vector<Elem> out;
  if (max_tries == 0) max_tries = 20 * n + 20;
  for (std::size_t tries = 0; out.size() < n && tries < max_tries; ++tries) {
    Elem x = sample(t, rng);
    auto it = std::lower_bound(out.begin(), out.end(), x, [&](const Elem& a, const Elem& b) { return less(t, a, b); });
    if (it != out.end() && compare(t, *it, x) == 0) continue;
    out.insert(it, std::move(x));
  }
  return out;
}

/// Some element strictly below x, when the term has one.
inline std::optional<Elem> below(const TermPtr& t, const Elem& x) {
  return std::visit(
      [&](const auto& node) -> std::optional<Elem> {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) {
          if (x.n == 0) return std::nullopt;
          return Elem::nat(x.n - 1);
        } else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) {
          if (x.ord.is_zero()) return std::nullopt;
          return Elem::of_ordinal(Ordinal());
        } else if constexpr (std::is_same_v<N, lo::Rationals>) {
          return Elem::rat(x.q - Dyadic(1));
        } else if constexpr (std::is_same_v<N, lo::OmegaStar> || std::is_same_v<N, lo::Marker>) {
          return Elem::nat(x.n + 1);
        } else if constexpr (std::is_same_v<N, lo::Sum>) {
          if (auto b = below(node.parts[x.n], x.kids[0])) return Elem::in_sum(x.n, *b);
          for (std::size_t i = x.n; i-- > 0;) {
            if (is_empty(node.parts[i])) continue;
            std::mt19937_64 rng(i);
            return Elem::in_sum(i, sample(node.parts[i], rng));
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<N, lo::Product>) {
          if (auto b = below(node.a, x.kids[0])) return Elem::pair(*b, x.kids[1]);
          if (auto b = below(node.b, x.kids[1])) return Elem::pair(x.kids[0], *b);
          return std::nullopt;
        } else if constexpr (std::is_same_v<N, lo::OmegaPower>) {
          if (x.kids.empty()) return std::nullopt;
          return Elem::zero_map();
        } else {
          return below(node.presentation, x);
        }
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Density in w^L.

/// For f < g in w^L: h = f + e_y for some y below the greatest point where f
/// and g differ, so f < h < g.  Needs such a y to exist.
inline Elem density_witness(const TermPtr& l, const Elem& f, const Elem& g) {
  if (compare_power(l, f, g) >= 0) throw std::invalid_argument("density witness needs f < g");
  // the greatest point where they differ; there f is the smaller
  std::optional<Elem> x;
  for (std::size_t i = 0, j = 0; !x; ++i, ++j) {
    if (i == f.kids.size() || less(l, f.kids[i], g.kids[j])) {
      x = g.kids[j];
    } else if (f.coeffs[i] != g.coeffs[j]) {
      x = f.kids[i];
    }
  }
  auto y = below(l, *x);
  if (!y) throw std::invalid_argument("no point of L below the critical difference");
  std::vector<std::pair<Elem, std::uint64_t>> entries;
  for (std::size_t k = 0; k < f.kids.size(); ++k) entries.emplace_back(f.kids[k], f.coeffs[k]);
  entries.emplace_back(*y, 1);
  return make_power(l, std::move(entries));
}

// ---------------------------------------------------------------------------
// Power rule.

struct PowerRuleReport {
  bool pass = true;
  std::size_t elements = 0;
  std::size_t pairs_checked = 0;
  std::string first_failure;
};

using ElemComparator = std::function<std::strong_ordering(const Elem&, const Elem&)>;

/// w^{L+K} -> w^L * w^K, f |-> (f|L, f|K), checked to preserve order on a
/// sampled fragment of n elements.  `rhs` replaces the comparison of the
/// right-hand side.
inline PowerRuleReport power_rule_check(const TermPtr& l, const TermPtr& k, std::size_t n, std::uint64_t seed = 1,
                                        const ElemComparator& rhs = {}) {
  TermPtr lk = lo::sum({l, k});
  TermPtr lhs = lo::power(lk);
  TermPtr product = lo::product(lo::power(l), lo::power(k));
  ElemComparator cmp = rhs ? rhs : ElemComparator([&](const Elem& a, const Elem& b) { return compare(product, a, b); });
  auto split = [&](const Elem& f) {
    std::vector<std::pair<Elem, std::uint64_t>> fl, fk;
    for (std::size_t i = 0; i < f.kids.size(); ++i) (f.kids[i].n == 0 ? fl : fk).emplace_back(f.kids[i].kids[0], f.coeffs[i]);
    return Elem::pair(make_power(l, std::move(fl)), make_power(k, std::move(fk)));
  };
  std::vector<Elem> frag = sample_fragment(lhs, n, seed);
  PowerRuleReport rep;
  rep.elements = frag.size();
  std::vector<Elem> image;
  for (const auto& f : frag) image.push_back(split(f));
  for (std::size_t i = 0; i < frag.size(); ++i)
    for (std::size_t j = 0; j < frag.size(); ++j) {
      ++rep.pairs_checked;
      if (compare(lhs, frag[i], frag[j]) != cmp(image[i], image[j])) {
        rep.pass = false;
        if (rep.first_failure.empty())
          rep.first_failure = "order differs at fragment positions " + std::to_string(i) + ", " + std::to_string(j);
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// The order K: sum over the levels of w^a * L_a, then the tail.

/// w^a * L is L copies of w^a.  Every supplied L must have a least element.
inline TermPtr assemble_K(const std::vector<std::pair<Ordinal, TermPtr>>& levels, const TermPtr& tail) {
  std::vector<TermPtr> parts;
  for (const auto& [alpha, supplier] : levels) {
    if (!least(supplier)) throw MalformedTerm("supplied order at level " + alpha.to_string() + " has no least element");
    parts.push_back(lo::product(lo::ordinal(omega_pow(alpha)), supplier));
  }
  parts.push_back(tail);
  return lo::sum(std::move(parts));
}

/// The default tail: w^{marker} * Q, a dense surrogate for the ill-founded
/// limit of the summands.
inline TermPtr default_tail() { return lo::product(lo::power(lo::marker()), lo::rationals()); }

// ---------------------------------------------------------------------------
// Text syntax.

inline std::string to_string(const TermPtr& t) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) return "chain(" + std::to_string(node.n) + ")";
        else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) return "ord(" + node.alpha.to_string() + ")";
        else if constexpr (std::is_same_v<N, lo::Rationals>) return "Q";
        else if constexpr (std::is_same_v<N, lo::OmegaStar>) return "w*";
        else if constexpr (std::is_same_v<N, lo::Marker>) return "marker";
        else if constexpr (std::is_same_v<N, lo::Sum>) {
          std::string s = "sum(";
          for (std::size_t i = 0; i < node.parts.size(); ++i) s += (i ? ", " : "") + to_string(node.parts[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<N, lo::Product>) return "prod(" + to_string(node.a) + ", " + to_string(node.b) + ")";
        else if constexpr (std::is_same_v<N, lo::OmegaPower>) return "pow(" + to_string(node.base) + ")";
        else return "ext(" + node.tag + ": " + to_string(node.presentation) + ")";
      },
      t->node);
}

inline std::string to_string(const TermPtr& t, const Elem& x) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, lo::FiniteChain>) return std::to_string(x.n);
        else if constexpr (std::is_same_v<N, lo::OrdinalOrder>) return x.ord.to_string();
        else if constexpr (std::is_same_v<N, lo::Rationals>) return x.q.to_string();
        else if constexpr (std::is_same_v<N, lo::OmegaStar> || std::is_same_v<N, lo::Marker>) return "-" + std::to_string(x.n);
        else if constexpr (std::is_same_v<N, lo::Sum>) return std::to_string(x.n) + ":" + to_string(node.parts[x.n], x.kids[0]);
        else if constexpr (std::is_same_v<N, lo::Product>)
          return "(" + to_string(node.a, x.kids[0]) + ", " + to_string(node.b, x.kids[1]) + ")";
        else if constexpr (std::is_same_v<N, lo::OmegaPower>) {
          std::string s = "{";
          for (std::size_t i = 0; i < x.kids.size(); ++i)
            s += (i ? ", " : "") + to_string(node.base, x.kids[i]) + "->" + std::to_string(x.coeffs[i]);
          return s + "}";
        } else return to_string(node.presentation, x);
      },
      t->node);
}

namespace detail {

class TermParser {
 public:
  explicit TermParser(std::string_view s) : s_(s) {}

  TermPtr parse_all() {
    TermPtr t = term();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw MalformedTerm("order term: " + why + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }
  void need(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }
  /// Text up to the ')' matching an already consumed '('.
  std::string_view balanced() {
    std::size_t start = pos_;
    int depth = 1;
    for (; pos_ < s_.size(); ++pos_) {
      if (s_[pos_] == '(') ++depth;
      if (s_[pos_] == ')' && --depth == 0) return s_.substr(start, pos_++ - start);
    }
    fail("unbalanced parentheses");
  }

  TermPtr term() {
    if (eat("chain(")) {
      std::string_view body = balanced();
      try {
        return lo::chain(std::stoull(std::string(body)));
      } catch (const std::logic_error&) {
        fail("bad chain length");
      }
    }
    if (eat("ord(")) return lo::ordinal(parse_ordinal(balanced()));
    if (eat("sum(")) {
      std::vector<TermPtr> parts{term()};
      while (eat(",")) parts.push_back(term());
      need(")");
      return lo::sum(std::move(parts));
    }
    if (eat("prod(")) {
      TermPtr a = term();
      need(",");
      TermPtr b = term();
      need(")");
      return lo::product(a, b);
    }
    if (eat("pow(")) {
      TermPtr b = term();
      need(")");
      return lo::power(b);
    }
    if (eat("ext(")) {
      skip();
      std::size_t colon = s_.find(':', pos_);
      if (colon == std::string_view::npos) fail("expected ':' after supplier tag");
      std::string tag(s_.substr(pos_, colon - pos_));
      pos_ = colon + 1;
      TermPtr p = term();
      need(")");
      return lo::external(tag, p);
    }
    if (eat("w*")) return lo::omega_star();
    if (eat("Q")) return lo::rationals();
    if (eat("marker")) return lo::marker();
    fail("unknown term");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TermPtr parse_term(std::string_view text) { return detail::TermParser(text).parse_all(); }

}  // namespace spectra

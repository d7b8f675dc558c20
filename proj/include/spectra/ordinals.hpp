// Ordinal notations below epsilon_0 in Cantor normal form.
//
// An Ordinal is a strictly decreasing list of (exponent, coefficient) terms,
// w^e1*c1 + w^e2*c2 + ... with e1 > e2 > ... and every ci >= 1.  The empty
// list is 0.  Values are immutable once built and all operations return
// canonical forms, so structural equality is ordinal equality.
#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spectra {

class Ordinal {
 public:
  struct Term;

  /// Maximum nesting depth of exponents accepted by the arithmetic.
  static constexpr int kMaxNesting = 24;

  Ordinal() = default;

  static Ordinal finite(std::uint64_t n);
  static Ordinal omega() { return omega_power(finite(1)); }
  static Ordinal omega_power(const Ordinal& exponent, std::uint64_t coefficient = 1);
  /// Builds from raw terms, validating canonical form.
  static Ordinal from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  bool is_successor() const;
  bool is_limit() const { return !is_zero() && !is_successor(); }
  /// Finite value; throws std::domain_error for infinite ordinals.
  std::uint64_t as_finite() const;
  /// The n in lambda + n.
  std::uint64_t finite_part() const;
  /// The lambda in lambda + n (limit or zero).
  Ordinal limit_part() const;
  int nesting() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b);
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

struct Ordinal::Term {
  Ordinal exponent;
  std::uint64_t coefficient = 1;
};

class OrdinalParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b)
    throw std::overflow_error("ordinal coefficient overflow");
  return a + b;
}

inline void check_nesting(const Ordinal& a) {
  if (a.nesting() > Ordinal::kMaxNesting)
    throw std::overflow_error("ordinal notation exceeds the nesting bound");
}

}  // namespace detail

inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  const auto& x = a.terms_;
  const auto& y = b.terms_;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (auto c = x[i].exponent <=> y[i].exponent; c != 0) return c;
    if (auto c = x[i].coefficient <=> y[i].coefficient; c != 0) return c;
  }
  return x.size() <=> y.size();
}

inline bool operator==(const Ordinal& a, const Ordinal& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

inline Ordinal Ordinal::finite(std::uint64_t n) {
  Ordinal r;
  if (n > 0) r.terms_.push_back(Term{Ordinal{}, n});
  return r;
}

inline Ordinal Ordinal::omega_power(const Ordinal& exponent, std::uint64_t coefficient) {
  if (coefficient == 0) return Ordinal{};
  Ordinal r;
  r.terms_.push_back(Term{exponent, coefficient});
  detail::check_nesting(r);
  return r;
}

inline Ordinal Ordinal::from_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0)
      throw std::invalid_argument("ordinal term with zero coefficient");
    if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent))
      throw std::invalid_argument("ordinal exponents must strictly decrease");
  }
  Ordinal r;
  r.terms_ = std::move(terms);
  detail::check_nesting(r);
  return r;
}

inline bool Ordinal::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline bool Ordinal::is_successor() const {
  return !terms_.empty() && terms_.back().exponent.is_zero();
}

inline std::uint64_t Ordinal::as_finite() const {
  if (!is_finite()) throw std::domain_error("ordinal " + to_string() + " is not finite");
  return terms_.empty() ? 0 : terms_[0].coefficient;
}

inline std::uint64_t Ordinal::finite_part() const {
  return is_successor() ? terms_.back().coefficient : 0;
}

inline Ordinal Ordinal::limit_part() const {
  Ordinal r = *this;
  if (r.is_successor()) r.terms_.pop_back();
  return r;
}

inline int Ordinal::nesting() const {
  int depth = 0;
  for (const auto& t : terms_) depth = std::max(depth, 1 + t.exponent.nesting());
  return depth;
}

/// Ordinal sum a + b (left terms of a smaller than b's leading exponent are absorbed).
inline Ordinal operator+(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const auto& lead = b.terms().front();
  std::vector<Ordinal::Term> out;
  for (const auto& t : a.terms()) {
    if (t.exponent > lead.exponent) {
      out.push_back(t);
    } else if (t.exponent == lead.exponent) {
      out.push_back(Ordinal::Term{t.exponent, detail::checked_add(t.coefficient, lead.coefficient)});
      break;
    } else {
      break;
    }
  }
  bool merged = !out.empty() && out.back().exponent == lead.exponent;
  for (std::size_t i = merged ? 1 : 0; i < b.terms().size(); ++i) out.push_back(b.terms()[i]);
  return Ordinal::from_terms(std::move(out));
}

inline Ordinal operator+(const Ordinal& a, std::uint64_t n) { return a + Ordinal::finite(n); }

/// w * a.
inline Ordinal omega_times(const Ordinal& a) {
  std::vector<Ordinal::Term> out;
  out.reserve(a.terms().size());
  for (const auto& t : a.terms()) {
    // 1 + e: finite exponents shift by one, infinite ones absorb the 1.
    Ordinal e = t.exponent.is_finite() ? Ordinal::finite(detail::checked_add(t.exponent.as_finite(), 1))
                                       : t.exponent;
    out.push_back(Ordinal::Term{std::move(e), t.coefficient});
  }
  return Ordinal::from_terms(std::move(out));
}

/// w^a.
inline Ordinal omega_pow(const Ordinal& a) { return Ordinal::omega_power(a); }

/// lambda + n  |->  lambda + 2n.
inline Ordinal twice(const Ordinal& a) {
  std::uint64_t n = a.finite_part();
  return a.limit_part() + detail::checked_add(n, n);
}

struct HalfFloor {
  Ordinal half;
  bool odd = false;
  friend bool operator==(const HalfFloor&, const HalfFloor&) = default;
};

/// lambda + n  |->  (lambda + floor(n/2), n mod 2).
inline HalfFloor half_floor(const Ordinal& a) {
  std::uint64_t n = a.finite_part();
  return HalfFloor{a.limit_part() + n / 2, (n % 2) == 1};
}

inline bool is_odd(const Ordinal& a) { return a.finite_part() % 2 == 1; }

/// a - 1 for successor a.
inline Ordinal predecessor(const Ordinal& a) {
  if (!a.is_successor()) throw std::domain_error("predecessor of a non-successor " + a.to_string());
  auto terms = a.terms();
  if (--terms.back().coefficient == 0) terms.pop_back();
  return Ordinal::from_terms(std::move(terms));
}

/// Fundamental sequence.  Successors: a - 1 for every s.  Limits: an increasing
/// sequence cofinal in a whose members all have odd finite part:
///   beta + w          -> beta + 2s + 1
///   beta + w^(e+1)    -> beta + w^e * s + 1      (e > 0)
///   beta + w^e, e lim -> beta + w^(e[s]) + 1
inline Ordinal fund_seq(const Ordinal& a, std::uint64_t s) {
  if (a.is_zero()) throw std::domain_error("fundamental sequence of 0");
  if (a.is_successor()) return predecessor(a);

  auto terms = a.terms();
  Ordinal exponent = terms.back().exponent;
  if (--terms.back().coefficient == 0) terms.pop_back();
  Ordinal base = Ordinal::from_terms(std::move(terms));

  if (exponent.is_successor()) {
    Ordinal lower = predecessor(exponent);
    if (lower.is_zero()) return base + detail::checked_add(detail::checked_add(s, s), 1);
    return base + Ordinal::omega_power(lower, s) + 1;
  }
  return base + Ordinal::omega_power(fund_seq(exponent, s)) + 1;
}

namespace detail {

class OrdinalParser {
 public:
  explicit OrdinalParser(std::string_view text) : text_(text) {}

  Ordinal parse_all() {
    Ordinal r = sum();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return r;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw OrdinalParseError("ordinal parse error at " + std::to_string(pos_) + ": " + what + " in '" +
                            std::string(text_) + "'");
  }

  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool eat_omega() { return eat("w") || eat("ω"); }

  std::optional<std::uint64_t> number() {
    skip();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      std::uint64_t d = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) fail("number too large");
      v = v * 10 + d;
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return v;
  }

  Ordinal sum() {
    Ordinal r = term();
    while (eat("+")) r = r + term();
    return r;
  }

  Ordinal term() {
    if (auto n = number()) return Ordinal::finite(*n);
    if (!eat_omega()) fail("expected number or w");
    Ordinal exponent = Ordinal::finite(1);
    if (eat("^")) {
      if (auto n = number()) {
        exponent = Ordinal::finite(*n);
      } else if (eat("(")) {
        exponent = sum();
        if (!eat(")")) fail("expected )");
      } else if (eat_omega()) {
        exponent = Ordinal::omega();
      } else {
        fail("bad exponent");
      }
    }
    std::uint64_t c = 1;
    if (eat("*")) {
      auto n = number();
      if (!n) fail("expected coefficient");
      c = *n;
    }
    return Ordinal::omega_power(exponent, c);
  }
};

}  // namespace detail

inline Ordinal parse_ordinal(std::string_view text) { return detail::OrdinalParser(text).parse_all(); }

inline std::string Ordinal::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    if (t.exponent.is_zero()) {
      out += std::to_string(t.coefficient);
      continue;
    }
    out += "w";
    if (!(t.exponent == Ordinal::finite(1))) {
      if (t.exponent.is_finite() || t.exponent == Ordinal::omega())
        out += "^" + t.exponent.to_string();
      else
        out += "^(" + t.exponent.to_string() + ")";
    }
    if (t.coefficient != 1) out += "*" + std::to_string(t.coefficient);
  }
  return out;
}

}  // namespace spectra

// Dyadic rationals and clopen subsets of Cantor space given by finite lists
// of basic cylinders.
#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectra {

/// num / 2^exp, kept in lowest terms.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(std::int64_t num, unsigned exp = 0) : num_(num), exp_(exp) { normalize(); }  // NOLINT

  static Dyadic pow2_neg(unsigned k) { return Dyadic(1, k); }

  std::int64_t numerator() const { return num_; }
  unsigned exponent() const { return exp_; }
  std::string to_string() const { return std::to_string(num_) + "/2^" + std::to_string(exp_); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(std::uint64_t{1} << exp_); }

  friend Dyadic operator+(Dyadic a, Dyadic b) {
    unsigned e = std::max(a.exp_, b.exp_);
    return Dyadic(scaled(a, e) + scaled(b, e), e);
  }
  friend Dyadic operator-(Dyadic a, Dyadic b) { return a + Dyadic(-b.num_, b.exp_); }
  friend Dyadic operator*(Dyadic a, Dyadic b) {
    std::int64_t n;
    if (__builtin_mul_overflow(a.num_, b.num_, &n)) throw std::overflow_error("dyadic product overflows");
    return Dyadic(n, a.exp_ + b.exp_);
  }
  Dyadic& operator+=(Dyadic o) { return *this = *this + o; }
  Dyadic& operator-=(Dyadic o) { return *this = *this - o; }

  friend std::strong_ordering operator<=>(Dyadic a, Dyadic b) {
    unsigned e = std::max(a.exp_, b.exp_);
    return scaled(a, e) <=> scaled(b, e);
  }
  friend bool operator==(Dyadic a, Dyadic b) { return a.num_ == b.num_ && a.exp_ == b.exp_; }

 private:
  static std::int64_t scaled(Dyadic d, unsigned e) {
    unsigned shift = e - d.exp_;
    if (shift >= 63 || (d.num_ != 0 && std::abs(d.num_) > (INT64_MAX >> shift)))
      throw std::overflow_error("dyadic exponent too large");
    return d.num_ * (std::int64_t{1} << shift);
  }
  void normalize() {
    if (exp_ > 62) throw std::overflow_error("dyadic exponent too large");
    if (num_ == 0) exp_ = 0;
    while (exp_ > 0 && num_ % 2 == 0) num_ /= 2, --exp_;
  }

  std::int64_t num_ = 0;
  unsigned exp_ = 0;
};

class PrefixTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite union of cylinders [sigma], stored as a sorted antichain of
/// binary strings.
class Clopen {
 public:
  Clopen() = default;
  explicit Clopen(std::vector<std::string> cylinders) {
    for (const auto& s : cylinders)
      if (s.find_first_not_of("01") != std::string::npos) throw std::invalid_argument("not a binary string: " + s);
    std::sort(cylinders.begin(), cylinders.end(),
              [](const std::string& a, const std::string& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
    for (auto& s : cylinders)
      if (!covers(s)) strings_.push_back(std::move(s));
    std::sort(strings_.begin(), strings_.end());
  }

  static Clopen whole() { return Clopen({""}); }
  static Clopen cylinder(std::string sigma) { return Clopen({std::move(sigma)}); }

  const std::vector<std::string>& strings() const { return strings_; }
  bool empty() const { return strings_.empty(); }

  /// Whether [sigma] is inside the set.
  bool covers(const std::string& sigma) const {
    return std::any_of(strings_.begin(), strings_.end(), [&](const std::string& c) { return sigma.starts_with(c); });
  }

  /// Membership of every X extending the prefix, if the prefix decides it.
  std::optional<bool> decide(const std::string& prefix) const {
    if (covers(prefix)) return true;
    bool compatible = std::any_of(strings_.begin(), strings_.end(), [&](const std::string& c) { return c.starts_with(prefix); });
    if (!compatible) return false;
    return std::nullopt;
  }

  bool contains(const std::string& prefix) const {
    auto d = decide(prefix);
    if (!d) throw PrefixTooShort("prefix '" + prefix + "' does not decide membership");
    return *d;
  }

  Dyadic measure() const {
    Dyadic m;
    for (const auto& s : strings_) m += Dyadic::pow2_neg(static_cast<unsigned>(s.size()));
    return m;
  }

  std::size_t max_length() const {
    std::size_t n = 0;
    for (const auto& s : strings_) n = std::max(n, s.size());
    return n;
  }

  Clopen complement() const { return combine(*this, Clopen(), [](bool a, bool) { return !a; }); }
  friend Clopen intersection(const Clopen& a, const Clopen& b) {
    return combine(a, b, [](bool x, bool y) { return x && y; });
  }
  friend Clopen set_union(const Clopen& a, const Clopen& b) {
    return combine(a, b, [](bool x, bool y) { return x || y; });
  }

  friend bool operator==(const Clopen&, const Clopen&) = default;

 private:
  // Walks the binary tree until both operands are decided below a prefix.
  template <class Op>
  static Clopen combine(const Clopen& a, const Clopen& b, Op op) {
    std::vector<std::string> out;
    std::vector<std::string> todo{""};
    while (!todo.empty()) {
      std::string p = std::move(todo.back());
      todo.pop_back();
      auto x = a.decide(p), y = b.decide(p);
      if (x && y) {
        if (op(*x, *y)) out.push_back(p);
        continue;
      }
      todo.push_back(p + "1");
      todo.push_back(p + "0");
    }
    Clopen c;
    c.strings_ = merge_siblings(std::move(out));
    return c;
  }

  // Replaces sibling pairs s0, s1 by s until none are left.
  static std::vector<std::string> merge_siblings(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::string> next;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string& s = v[i];
        if (i + 1 < v.size() && !s.empty() && s.back() == '0' && v[i + 1].size() == s.size() &&
            v[i + 1].compare(0, s.size() - 1, s, 0, s.size() - 1) == 0 && v[i + 1].back() == '1') {
          next.push_back(s.substr(0, s.size() - 1));
          ++i;
          changed = true;
        } else {
          next.push_back(s);
        }
      }
      std::sort(next.begin(), next.end());
      v = std::move(next);
    }
    return v;
  }

  std::vector<std::string> strings_;
};

}  // namespace spectra

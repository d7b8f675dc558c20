// A family of sets enumerated by every member of a positive-measure class
// but by no sufficiently generic oracle.  For each requirement (e, sigma)
// the construction watches an operator Psi for points x_k in blocks I_k,
// builds the enumeration Lambda(X) column by column, and throws away the
// clopen sets C_{x_k,k} from the class P.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectra/clopen.hpp"
#include "spectra/machines.hpp"

namespace spectra {

using BigNatural = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Plan: epsilon per requirement code, then delta_k, n_k and the blocks I_k.

struct PlanParams {
  unsigned epsilon_offset = 2;  // eps_i = 2^-(i + epsilon_offset)
  unsigned delta_offset = 2;    // delta_k = eps * 2^-(k + delta_offset)
};

class EpsilonPlan {
 public:
  explicit EpsilonPlan(PlanParams p = {}) : p_(p) {
    if (p.epsilon_offset < 2) throw std::invalid_argument("epsilon offset below 2 makes the sum reach 1");
    if (p.delta_offset < 2) throw std::invalid_argument("delta offset below 2 makes the sum reach epsilon");
  }

  const PlanParams& params() const { return p_; }

  Dyadic epsilon(Natural code) const { return Dyadic::pow2_neg(exp(code, 0) - p_.delta_offset); }
  /// Sum of epsilon over codes 0..n-1.
  Dyadic epsilon_sum(Natural n) const {
    Dyadic s;
    for (Natural i = 0; i < n; ++i) s += epsilon(i);
    return s;
  }

  /// log2 n_k: delta_k = 2^-cylinder_length(code, k).
  unsigned cylinder_length(Natural code, Natural k) const { return exp(code, k); }
  Dyadic delta(Natural code, Natural k) const { return Dyadic::pow2_neg(exp(code, k)); }
  Natural block_size(Natural code, Natural k) const { return Natural{1} << exp(code, k); }
  /// Sum of delta_j for j < k.
  Dyadic delta_sum(Natural code, Natural k) const {
    Dyadic s;
    for (Natural j = 0; j < k; ++j) s += delta(code, j);
    return s;
  }

  /// I_k = [block_start(k), block_start(k + 1)).
  Natural block_start(Natural code, Natural k) const {
    unsigned base = exp(code, 0);
    if (base + k > 62) throw std::overflow_error("block I_k beyond 64-bit range");
    return (Natural{1} << base) * ((Natural{1} << k) - 1);
  }
  Natural block_end(Natural code, Natural k) const { return block_start(code, k + 1); }
  Natural level_of(Natural code, Natural x) const {
    Natural k = 0;
    while (x >= block_end(code, k)) ++k;
    return k;
  }

 private:
  unsigned exp(Natural code, Natural k) const {
    Natural e = code + p_.epsilon_offset + k + p_.delta_offset;
    if (e > 62) throw std::overflow_error("delta_k too small for exact dyadic arithmetic");
    return static_cast<unsigned>(e);
  }

  PlanParams p_;
};

inline EpsilonPlan plan(PlanParams p = {}) { return EpsilonPlan(p); }

/// The k-th binary string in length-lexicographic order ("" is the 0-th).
inline std::string length_lex(Natural k) {
  std::string s;
  Natural n = k + 1;
  while (n > 1) {
    s.insert(s.begin(), static_cast<char>('0' + (n & 1)));
    n >>= 1;
  }
  return s;
}

inline Natural length_lex_index(const std::string& s) {
  Natural n = 1;
  for (char c : s) n = 2 * n + static_cast<Natural>(c - '0');
  return n - 1;
}

/// tau_k: the k-th extension of sigma.
inline std::string tau(const std::string& sigma, Natural k) { return sigma + length_lex(k); }

/// Psi for one requirement, given directly as an operator program run on
/// input 0.
struct RandomInstance {
  std::string name;
  Natural code = 0;
  std::string sigma;
  Program psi;
};

// ---------------------------------------------------------------------------
// Partitions of Cantor space into the cylinders of one length.  Cylinders
// outside the removed region R come first, in lexicographic order, then
// those inside R.

namespace detail {

inline Natural cylinder_value(const std::string& s) {
  Natural v = 0;
  for (char c : s) v = 2 * v + static_cast<Natural>(c - '0');
  return v;
}

inline std::string cylinder_string(Natural v, unsigned len) {
  std::string s(len, '0');
  for (unsigned i = 0; i < len; ++i)
    if ((v >> (len - 1 - i)) & 1) s[i] = '1';
  return s;
}

/// Number of length-len cylinders inside r with value < v.
inline Natural covered_below(const Clopen& r, unsigned len, Natural v) {
  Natural n = 0;
  for (const auto& s : r.strings()) {
    if (s.size() > len) throw std::invalid_argument("removed region is finer than the partition");
    unsigned shift = len - static_cast<unsigned>(s.size());
    Natural lo = cylinder_value(s) << shift, hi = (cylinder_value(s) + 1) << shift;
    if (v > lo) n += std::min(v, hi) - lo;
  }
  return n;
}

}  // namespace detail

/// Which piece of the length-len partition contains the cylinder c.
inline Natural piece_index(const Clopen& removed, unsigned len, const std::string& c) {
  if (c.size() < len) throw PrefixTooShort("oracle prefix shorter than the partition");
  std::string cyl = c.substr(0, len);
  Natural v = detail::cylinder_value(cyl);
  Natural below = detail::covered_below(removed, len, v);
  if (!removed.covers(cyl)) return v - below;
  Natural outside = (Natural{1} << len) - detail::covered_below(removed, len, Natural{1} << len);
  return outside + below;
}

/// The cylinder of piece i.
inline std::string piece_cylinder(const Clopen& removed, unsigned len, Natural i) {
  Natural total = Natural{1} << len;
  Natural inside = detail::covered_below(removed, len, total);
  Natural outside = total - inside;
  if (i >= total) throw std::out_of_range("no such piece");
  bool want_inside = i >= outside;
  Natural rank = want_inside ? i - outside : i;
  // smallest v whose count of wanted cylinders in [0, v] exceeds rank
  Natural lo = 0, hi = total - 1;
  while (lo < hi) {
    Natural mid = lo + (hi - lo) / 2;
    Natural in = detail::covered_below(removed, len, mid + 1);
    Natural count = want_inside ? in : mid + 1 - in;
    if (count > rank) hi = mid;
    else lo = mid + 1;
  }
  return detail::cylinder_string(lo, len);
}

// ---------------------------------------------------------------------------
// Searching for x_k.

struct SearchBounds {
  Natural max_steps = 4096;         // steps per run of Psi on one rho
  std::size_t max_extension = 3;    // |rho| - |tau_k|
  std::size_t certify_nodes = 20000;
};

struct XkHit {
  Natural x = 0;
  std::string rho;
  Natural step = 0;  // the stage of the search at which x shows up
};

/// First discovery: least step, then rho in length-lex order, then least x.
inline std::optional<XkHit> find_xk(const EpsilonPlan& pl, const RandomInstance& inst, Natural k,
                                    const SearchBounds& b) {
  std::string t = tau(inst.sigma, k);
  Natural lo = pl.block_start(inst.code, k), hi = pl.block_end(inst.code, k);
  std::optional<XkHit> best;
  Natural count = (Natural{2} << b.max_extension) - 1;
  for (Natural i = 0; i < count; ++i) {
    std::string rho = t + length_lex(i);
    RunResult r = run_program(inst.psi, PrefixOracle(rho), {0, b.max_steps, false});
    std::optional<Natural> step;
    for (const auto& e : r.outputs)
      if (e.value >= lo && e.value < hi) {
        step = e.step;
        break;
      }
    if (!step || (best && best->step <= *step)) continue;
    Natural x = hi;
    for (const auto& e : r.outputs)
      if (e.step <= *step && e.value >= lo && e.value < hi) x = std::min(x, e.value);
    best = XkHit{x, rho, *step};
  }
  return best;
}

enum class Certificate { Empty, Refuted, Inconclusive };

inline const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::Empty: return "empty";
    case Certificate::Refuted: return "refuted";
    case Certificate::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace detail {

struct BranchExplorer {
  const Program& p;
  const std::string& prefix;
  Natural lo, hi;
  std::size_t budget;
  std::size_t nodes = 0;
  bool hit = false, exhausted = false;

  // Runs one branch; oracle bits beyond the prefix are split both ways.
  // A configuration repeated on a branch means that branch loops without
  // new output, since every query in between already had its answer.
  void explore(Config c, std::map<Natural, bool> answers, std::unordered_set<Config, ConfigHash> seen) {
    while (!hit && !exhausted) {
      if (c.pc >= p.code.size()) return;
      if (!seen.insert(c).second) return;
      if (++nodes > budget) {
        exhausted = true;
        return;
      }
      const Instruction& ins = p.code[c.pc];
      Natural next = c.pc + 1;
      Natural& reg = c.r[ins.reg];
      switch (ins.op) {
        case Opcode::Halt: return;
        case Opcode::Nop: break;
        case Opcode::Inc: ++reg; break;
        case Opcode::Dec: reg = reg == 0 ? 0 : reg - 1; break;
        case Opcode::Set: reg = ins.arg; break;
        case Opcode::Jz:
          if (reg == 0) next = ins.arg;
          break;
        case Opcode::Jmp: next = ins.arg; break;
        case Opcode::Out:
          if (reg >= lo && reg < hi) hit = true;
          break;
        case Opcode::Oracle: {
          Natural q = c.r[ins.arg % kRegisters];
          if (q < prefix.size()) {
            reg = prefix[q] == '1';
          } else if (auto it = answers.find(q); it != answers.end()) {
            reg = it->second;
          } else {
            for (bool bit : {false, true}) {
              Config d = c;
              d.r[ins.reg] = bit;
              d.pc = next;
              auto a = answers;
              a[q] = bit;
              explore(d, std::move(a), seen);
            }
            return;
          }
          break;
        }
      }
      c.pc = next;
    }
  }
};

}  // namespace detail

/// Whether I_k meets Psi(rho) for no rho extending tau_k, by running Psi
/// on every oracle branch above tau_k.
inline Certificate certify_no_xk(const EpsilonPlan& pl, const RandomInstance& inst, Natural k, const SearchBounds& b) {
  std::string t = tau(inst.sigma, k);
  detail::BranchExplorer ex{inst.psi, t, pl.block_start(inst.code, k), pl.block_end(inst.code, k), b.certify_nodes};
  ex.explore(detail::Config{0, {0, 0, 0, 0}}, {}, {});
  if (ex.hit) return Certificate::Refuted;
  if (ex.exhausted) return Certificate::Inconclusive;
  return Certificate::Empty;
}

// ---------------------------------------------------------------------------
// The construction of Lambda, stage by stage.

struct KStar {
  bool certified = false;
  Natural value = 0;  // k* when certified, else the number of x_k found so far

  std::string to_string() const {
    return certified ? std::to_string(value) : "omega-so-far(" + std::to_string(value) + ")";
  }
};

struct LevelRecord {
  Natural k = 0;
  Natural opened = 0;                // s_{k-1}
  Clopen removed_before;             // R when the level-k partition was laid
  std::optional<XkHit> search;       // first discovery within the search bounds
  bool searched = false;
  std::optional<Natural> observed;   // s_k
  Certificate certificate = Certificate::Inconclusive;
  bool certify_tried = false;

  bool found() const { return observed.has_value(); }
  Natural x() const { return search->x; }
};

enum class StageKind { Rules, Padding, Idle };

struct StageEvent {
  Natural stage = 0;
  StageKind kind = StageKind::Idle;
  Natural level = 0;  // the level k opened by the rules
};

/// Q_k as one run of consecutive indices: (x, F) sits at
/// base + (x - min I_k) * 2^{min I_k} + bits(F).
struct ColumnBlock {
  Natural k = 0;
  Natural stage = 0;
  std::optional<BigNatural> base;  // absent once indices outgrow kMaxIndexBits
};

inline constexpr Natural kMaxIndexBits = 1u << 14;

struct ColumnKey {
  Natural k = 0;
  Natural x = 0;
  FiniteSet f;
  friend bool operator==(const ColumnKey&, const ColumnKey&) = default;
};

struct CopyOf {
  BigNatural index;
};

struct Unassociated {};

using IndexMeaning = std::variant<ColumnKey, CopyOf, Unassociated>;

struct ConstructionState {
  EpsilonPlan plan;
  RandomInstance instance;
  SearchBounds bounds;
  /// Enumerate the level-k point into level-k columns too.
  bool second_rule_includes_k = false;

  std::optional<Natural> stage;
  std::vector<LevelRecord> levels;
  std::optional<Natural> kstar_certified;
  std::vector<ColumnBlock> blocks;
  std::vector<Natural> copies;
  std::optional<BigNatural> next_fresh = BigNatural(0);
  std::vector<StageEvent> log;

  ConstructionState(EpsilonPlan pl, RandomInstance inst, SearchBounds b = {})
      : plan(pl), instance(std::move(inst)), bounds(b) {}

  Natural code() const { return instance.code; }
  Natural found_count() const {
    Natural n = 0;
    while (n < levels.size() && levels[n].found()) ++n;
    return n;
  }
  KStar kstar() const { return kstar_certified ? KStar{true, *kstar_certified} : KStar{false, found_count()}; }

  /// C_{x_j,j}, for a found level j >= 1.
  Clopen removed_piece(Natural j) const {
    const LevelRecord& l = levels.at(j);
    if (j == 0 || !l.found()) throw std::logic_error("no removal at that level");
    unsigned len = plan.cylinder_length(code(), j);
    return Clopen::cylinder(piece_cylinder(l.removed_before, len, l.x() - plan.block_start(code(), j)));
  }

  Clopen removed() const {
    Clopen r;
    for (Natural j = 1; j < levels.size(); ++j)
      if (levels[j].found()) r = set_union(r, removed_piece(j));
    return r;
  }

  /// The piece C_{y,j} holding X, as y.
  Natural owner(Natural j, const std::string& x) const {
    const LevelRecord& l = levels.at(j);
    return plan.block_start(code(), j) + piece_index(l.removed_before, plan.cylinder_length(code(), j), x);
  }

  BigNatural q_size(Natural k) const {
    return BigNatural(plan.block_size(code(), k)) << static_cast<unsigned>(plan.block_start(code(), k));
  }

  BigNatural column_index(const ColumnKey& key) const {
    if (key.k >= blocks.size()) throw std::out_of_range("level not opened");
    const ColumnBlock& b = blocks[key.k];
    if (!b.base) throw std::overflow_error("column index beyond the representable range");
    Natural start = plan.block_start(code(), key.k);
    if (key.x < start || key.x >= plan.block_end(code(), key.k)) throw std::out_of_range("x outside I_k");
    BigNatural bits = 0;
    for (Natural v : key.f) {
      if (v >= start) throw std::out_of_range("F outside the lower blocks");
      bit_set(bits, static_cast<unsigned>(v));
    }
    return *b.base + (BigNatural(key.x - start) << static_cast<unsigned>(start)) + bits;
  }

  IndexMeaning resolve(const BigNatural& n) const {
    for (Natural c : copies)
      if (n == c) return CopyOf{n - 1};
    for (const auto& b : blocks) {
      if (!b.base || n < *b.base || n >= *b.base + q_size(b.k)) continue;
      Natural start = plan.block_start(code(), b.k);
      BigNatural off = n - *b.base;
      ColumnKey key{b.k, start + static_cast<Natural>(off >> static_cast<unsigned>(start)), {}};
      for (Natural v = 0; v < start; ++v)
        if (bit_test(off, static_cast<unsigned>(v))) key.f.insert(v);
      return key;
    }
    return Unassociated{};
  }
};

namespace detail {

inline void open_level(ConstructionState& st, Natural k, Natural s) {
  LevelRecord l;
  l.k = k;
  l.opened = s;
  if (k >= 1) l.removed_before = st.removed();
  st.levels.push_back(std::move(l));
  st.blocks.push_back({k, s, st.next_fresh});
  if (st.next_fresh && st.plan.block_start(st.code(), k) <= kMaxIndexBits) *st.next_fresh += st.q_size(k);
  else st.next_fresh.reset();
  st.log.push_back({s, StageKind::Rules, k});
}

}  // namespace detail

/// Runs stage s.  Stage 0 is s_{-1} and opens level 0; a stage at which
/// x_k is observed is s_k and opens level k + 1; other stages apply the
/// padding rule.
inline ConstructionState lambda_step(ConstructionState st, Natural s) {
  Natural expected = st.stage ? *st.stage + 1 : 0;
  if (s != expected) throw std::invalid_argument("stage " + std::to_string(s) + " out of order");
  st.stage = s;
  if (s == 0) {
    detail::open_level(st, 0, 0);
    return st;
  }
  bool fired = false;
  LevelRecord& top = st.levels.back();
  if (!top.found() && !st.kstar_certified) {
    if (!top.searched) {
      top.search = find_xk(st.plan, st.instance, top.k, st.bounds);
      top.searched = true;
    }
    if (top.search && top.search->step <= s - top.opened) {
      top.observed = s;
      detail::open_level(st, top.k + 1, s);
      fired = true;
    } else if (!top.search && !top.certify_tried) {
      top.certify_tried = true;
      top.certificate = certify_no_xk(st.plan, st.instance, top.k, st.bounds);
      if (top.certificate == Certificate::Empty) st.kstar_certified = top.k;
    }
  }
  if (!fired) {
    if (st.next_fresh && *st.next_fresh <= s) {
      st.copies.push_back(s);
      st.next_fresh = BigNatural(s + 1);
      st.log.push_back({s, StageKind::Padding, 0});
    } else {
      st.log.push_back({s, StageKind::Idle, 0});
    }
  }
  return st;
}

inline ConstructionState run_construction(ConstructionState st, Natural stages) {
  Natural from = st.stage ? *st.stage + 1 : 0;
  for (Natural s = from; s < from + stages; ++s) st = lambda_step(std::move(st), s);
  return st;
}

// ---------------------------------------------------------------------------
// The class P.

struct Pi01Report {
  Clopen p;
  Dyadic measure;
  Dyadic removed_delta;  // sum of delta_k over the removed pieces
  Dyadic epsilon;
  bool ledger_exact = false;  // measure + removed_delta == 1
  bool above_bound = false;   // measure >= 1 - epsilon
};

inline Pi01Report pi01_class(const ConstructionState& st) {
  Pi01Report r;
  r.p = st.removed().complement();
  r.measure = r.p.measure();
  for (Natural j = 1; j < st.levels.size(); ++j)
    if (st.levels[j].found()) r.removed_delta += st.plan.delta(st.code(), j);
  r.epsilon = st.plan.epsilon(st.code());
  r.ledger_exact = r.measure + r.removed_delta == Dyadic(1);
  r.above_bound = r.measure >= Dyadic(1) - r.epsilon;
  return r;
}

// ---------------------------------------------------------------------------
// Columns A_{k,x,F}(X), replayed from the stage log.

class NotInClass : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A_{k,x,F}(X) restricted to the blocks I_0..I_horizon.
inline FiniteSet column_content(const ConstructionState& st, const ColumnKey& key, const std::string& x,
                                Natural horizon) {
  if (key.k >= st.levels.size()) throw std::out_of_range("level not opened");
  const Natural code = st.code();
  Natural limit = st.plan.block_end(code, horizon);
  FiniteSet a;
  auto add = [&](Natural v) {
    if (v < limit) a.insert(v);
  };
  for (const auto& ev : st.log) {
    if (ev.kind != StageKind::Rules) continue;
    Natural k = ev.level;
    if (k == key.k) {
      for (Natural v : key.f) add(v);
      add(key.x);
    }
    bool second = st.second_rule_includes_k ? key.k <= k : key.k < k;
    if (k >= 1 && second && k <= horizon) add(st.owner(k, x));
    if (k >= 2) {
      Natural m = k - 1;
      if (key.k < m && m <= horizon && !st.removed_piece(m).contains(x)) {
        for (Natural v = st.plan.block_start(code, m); v < st.plan.block_end(code, m); ++v)
          if (v != st.levels[m].x()) add(v);
      }
    }
  }
  return a;
}

enum class ShapeClause { Omega, Finite };

inline const char* to_string(ShapeClause c) { return c == ShapeClause::Omega ? "k*=omega" : "k*<omega"; }

struct ColumnMismatch {
  ColumnKey key;
  Natural level = 0;
  std::string expected;
  FiniteSet actual;
};

struct ColumnReport {
  ShapeClause clause = ShapeClause::Omega;
  std::size_t columns = 0;
  std::vector<ColumnMismatch> mismatches;
};

namespace detail {

inline FiniteSet within(const FiniteSet& a, Natural lo, Natural hi) {
  return FiniteSet(a.lower_bound(lo), a.lower_bound(hi));
}

inline std::string describe(const FiniteSet& s) {
  std::string out = "{";
  for (Natural v : s) out += (out.size() > 1 ? "," : "") + std::to_string(v);
  return out + "}";
}

}  // namespace detail

/// Checks sampled columns against the two shapes: below its own level a
/// column is F, at its level {x}, then I_j minus x_j on every level whose
/// x_j is known, one point on the last opened level, nothing above.
inline ColumnReport verify_columns(const ConstructionState& st, const std::string& x, Natural horizon,
                                   std::size_t samples = 2, std::uint64_t seed = 1) {
  auto in_removed = st.removed().decide(x);
  if (!in_removed) throw PrefixTooShort("oracle prefix does not decide membership in P");
  if (*in_removed) throw NotInClass("oracle lies in a removed piece");
  if (st.levels.empty()) throw std::logic_error("construction not started");
  const Natural code = st.code();
  ColumnReport rep;
  rep.clause = st.kstar_certified ? ShapeClause::Finite : ShapeClause::Omega;
  Natural top = st.levels.size() - 1;
  Natural upto = std::min(top, horizon);
  std::mt19937_64 rng(seed);
  for (Natural k = 0; k <= upto; ++k) {
    Natural start = st.plan.block_start(code, k);
    std::vector<FiniteSet> fs{{}};
    if (k > 0) {
      FiniteSet full;
      for (Natural v = 0; v < start; ++v) full.insert(v);
      fs.push_back(full);
      for (std::size_t i = 0; i < samples; ++i) {
        FiniteSet f;
        for (Natural v = 0; v < start; ++v)
          if (rng() & 1) f.insert(v);
        fs.push_back(f);
      }
    }
    for (Natural xv = start; xv < st.plan.block_end(code, k); ++xv)
      for (const auto& f : fs) {
        ColumnKey key{k, xv, f};
        FiniteSet a = column_content(st, key, x, horizon);
        ++rep.columns;
        for (Natural j = 0; j <= horizon; ++j) {
          Natural lo = st.plan.block_start(code, j), hi = st.plan.block_end(code, j);
          FiniteSet got = detail::within(a, lo, hi);
          std::optional<FiniteSet> want;
          std::string desc;
          bool bad = false;
          if (j < k) {
            want = detail::within(f, lo, hi);
          } else if (j == k) {
            want = FiniteSet{xv};
          } else if (j > top) {
            want = FiniteSet{};
          } else if (st.levels[j].found()) {
            want = FiniteSet{};
            for (Natural v = lo; v < hi; ++v)
              if (v != st.levels[j].x()) want->insert(v);
            desc = "I_" + std::to_string(j) + " minus " + std::to_string(st.levels[j].x());
          } else {
            bad = got.size() != 1;
            desc = "one point of I_" + std::to_string(j);
          }
          if (want) {
            bad = got != *want;
            if (desc.empty()) desc = detail::describe(*want);
          }
          if (bad) rep.mismatches.push_back({key, j, desc, got});
        }
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The family S_{e,sigma}.

/// A set given exactly on I_0..I_horizon, with a uniform pattern above.
struct SetDescriptor {
  enum class Tail { Empty, AllButX, FirstPoints };
  FiniteSet head;
  Natural horizon = 0;
  Tail tail = Tail::Empty;
  Natural tail_count = 0;  // for FirstPoints
};

class HorizonTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// xs holds x_0, x_1, ... as far as known.
inline bool family_membership(const EpsilonPlan& pl, Natural code, const KStar& ks, const std::vector<Natural>& xs,
                              const SetDescriptor& a) {
  using Tail = SetDescriptor::Tail;
  if (!a.head.empty() && *a.head.rbegin() >= pl.block_end(code, a.horizon))
    throw std::invalid_argument("head reaches above the horizon");
  auto level = [&](Natural j) { return detail::within(a.head, pl.block_start(code, j), pl.block_end(code, j)); };
  bool tail_empty = a.tail == Tail::Empty || (a.tail == Tail::FirstPoints && a.tail_count == 0);
  if (ks.certified) {
    if (a.horizon < ks.value) throw HorizonTooShort("descriptor stops below I_{k*}");
    if (level(ks.value).size() != 1 || !tail_empty) return false;
    for (Natural j = ks.value + 1; j <= a.horizon; ++j)
      if (!level(j).empty()) return false;
    return true;
  }
  if (a.horizon >= xs.size()) throw HorizonTooShort("x_j unknown on part of the descriptor");
  if (a.tail != Tail::AllButX) return false;
  for (Natural k = 0; k <= a.horizon; ++k) {
    if (level(k).size() != 1) continue;
    bool ok = true;
    for (Natural j = k + 1; j <= a.horizon && ok; ++j) {
      FiniteSet want;
      for (Natural v = pl.block_start(code, j); v < pl.block_end(code, j); ++v)
        if (v != xs[j]) want.insert(v);
      ok = level(j) == want;
    }
    if (ok) return true;
  }
  return false;
}

inline bool family_membership(const ConstructionState& st, const SetDescriptor& a) {
  std::vector<Natural> xs;
  for (Natural j = 0; j < st.found_count(); ++j) xs.push_back(st.levels[j].x());
  return family_membership(st.plan, st.code(), st.kstar(), xs, a);
}

// ---------------------------------------------------------------------------
// Playing a generic against Psi.

/// Given the current prefix and an extension offered by a dense set,
/// returns a prefix extending the current one, or nothing to refuse.
using ExtensionStrategy = std::function<std::optional<std::string>(const std::string&, const std::string&)>;

inline ExtensionStrategy cooperative_strategy() {
  return [](const std::string&, const std::string& offer) { return std::optional<std::string>(offer); };
}

inline ExtensionStrategy refusing_strategy() {
  return [](const std::string&, const std::string&) { return std::optional<std::string>(); };
}

enum class GameClause { Omega, Finite, Inconclusive };

inline const char* to_string(GameClause c) {
  switch (c) {
    case GameClause::Omega: return "k*=omega";
    case GameClause::Finite: return "k*<omega";
    case GameClause::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct GameReport {
  GameClause clause = GameClause::Inconclusive;
  std::string g;                                   // the prefix built
  std::vector<std::pair<Natural, Natural>> hits;   // (k, x_k) with x_k in Psi(g)
  std::string evidence;
};

inline GameReport generic_game(const ConstructionState& st, const ExtensionStrategy& strategy, Natural budget,
                               std::size_t required_hits = 3) {
  GameReport rep;
  const std::string& sigma = st.instance.sigma;
  auto extend = [&](const std::string& cur, const std::string& offer) -> std::optional<std::string> {
    auto e = strategy(cur, offer);
    if (e && !e->starts_with(cur)) throw std::invalid_argument("strategy answered with a non-extension");
    return e;
  };
  auto psi_of = [&](const std::string& g) {
    return run_program(st.instance.psi, PrefixOracle(g), {0, st.bounds.max_steps, false}).output_set();
  };

  if (st.kstar_certified) {
    Natural ks = *st.kstar_certified;
    std::string cur = tau(sigma, ks);
    for (Natural r = 0; r < budget; ++r) {
      auto e = extend(cur, cur + "0");
      if (!e) {
        rep.g = cur;
        rep.evidence = "strategy refused to extend tau_{k*}";
        return rep;
      }
      cur = *e;
    }
    rep.g = cur;
    FiniteSet out = psi_of(cur);
    Natural lo = st.plan.block_start(st.code(), ks), hi = st.plan.block_end(st.code(), ks);
    FiniteSet meet = detail::within(out, lo, hi);
    if (!meet.empty()) {
      rep.evidence = "Psi(G) meets I_{k*} despite the certificate";
      return rep;
    }
    rep.clause = GameClause::Finite;
    rep.evidence = "I_" + std::to_string(ks) + " and Psi(G) are disjoint on every branch above tau_" +
                   std::to_string(ks) + "; every member of the family meets I_" + std::to_string(ks);
    return rep;
  }

  std::string cur = sigma;
  std::vector<std::pair<Natural, Natural>> offered;
  for (Natural r = 0; r < budget; ++r) {
    Natural k = length_lex_index(cur.substr(sigma.size()));
    std::string offer = cur + "0";
    std::optional<std::string> rho;
    if (k < st.levels.size() && st.levels[k].found()) {
      rho = st.levels[k].search->rho;
      if (rho->size() > cur.size()) offer = *rho;
    }
    auto e = extend(cur, offer);
    if (!e) {
      rep.g = cur;
      rep.evidence = "strategy refused an extension";
      return rep;
    }
    if (rho && e->starts_with(*rho)) offered.emplace_back(k, st.levels[k].x());
    cur = *e;
  }
  rep.g = cur;
  FiniteSet out = psi_of(cur);
  for (auto [k, xk] : offered)
    if (out.count(xk)) rep.hits.emplace_back(k, xk);
  if (rep.hits.size() >= required_hits) {
    rep.clause = GameClause::Omega;
    rep.evidence = std::to_string(rep.hits.size()) + " points x_k in Psi(G); a family member holds only finitely many";
  } else {
    rep.evidence = "only " + std::to_string(rep.hits.size()) + " points x_k confirmed within the budget";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Demo operators.

inline std::vector<RandomInstance> random_demo_instances() {
  return {
      {"count-up", 0, "", parse_program("SET r1 0; OUT r1; INC r1; JMP 1")},
      {"first-point", 0, "", parse_program("SET r1 0; OUT r1; HALT")},
      {"two-points", 0, "", parse_program("SET r1 0; OUT r1; SET r1 16; OUT r1; HALT")},
      {"far-bit", 0, "", parse_program("SET r1 0; OUT r1; SET r2 9; ORACLE r3 r2; JZ r3 7; SET r1 16; OUT r1; HALT")},
      {"staircase", 0, "",
       parse_program("SET r1 0; OUT r1; SET r1 16; OUT r1; SET r1 48; OUT r1; SET r1 112; OUT r1; SET r1 240; OUT r1; "
                     "SET r1 496; OUT r1; SET r1 1008; OUT r1; HALT")},
  };
}

inline RandomInstance random_demo_instance(const std::string& name) {
  for (auto& i : random_demo_instances())
    if (i.name == name) return i;
  throw std::out_of_range("no demo operator named " + name);
}

}  // namespace spectra

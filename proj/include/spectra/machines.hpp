// Toy oracle register machines, staged c.e. sets and a certified, desk-scale
// jump hierarchy.
//
// Programs run on four unbounded registers.  r0 holds the input.  The single
// oracle instruction writes [reg(a) in X] into a register, so every run is a
// deterministic function of the oracle answers it receives.  Because of that a
// repeated machine configuration is a proof of divergence, which is what the
// certificates in this file are made of.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace spectra {

using Natural = std::uint64_t;
using FiniteSet = std::set<Natural>;

// ---------------------------------------------------------------------------
// Coding of pairs, triples and finite sets.

inline Natural pair(Natural a, Natural b) {
  Natural s = a + b;
  if (s < a || s > 6'000'000'000ULL) throw std::overflow_error("pair: arguments too large");
  return s * (s + 1) / 2 + b;
}

inline std::pair<Natural, Natural> unpair(Natural n) {
  // largest w with w(w+1)/2 <= n
  Natural w = static_cast<Natural>((std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > n) --w;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  Natural b = n - w * (w + 1) / 2;
  return {w - b, b};
}

inline Natural triple(Natural a, Natural b, Natural c) { return pair(a, pair(b, c)); }

struct Triple {
  Natural first, second, third;
  friend bool operator==(const Triple&, const Triple&) = default;
};

inline Triple untriple(Natural n) {
  auto [a, bc] = unpair(n);
  auto [b, c] = unpair(bc);
  return {a, b, c};
}

/// D_u: the set whose characteristic bits are the binary digits of u.
inline FiniteSet canonical_finite_set(Natural u) {
  FiniteSet out;
  for (Natural bit = 0; u != 0; ++bit, u >>= 1)
    if (u & 1) out.insert(bit);
  return out;
}

inline Natural canonical_index(const FiniteSet& set) {
  Natural u = 0;
  for (Natural x : set) {
    if (x >= 64) throw std::overflow_error("canonical_index: element too large");
    u |= Natural{1} << x;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Programs.

enum class Opcode : std::uint8_t { Halt, Nop, Inc, Dec, Set, Jz, Jmp, Oracle, Out };
inline constexpr int kOpcodeCount = 9;
inline constexpr int kRegisters = 4;
inline constexpr int kOperandRange = 16;

struct Instruction {
  Opcode op = Opcode::Halt;
  int reg = 0;        // register operand
  Natural arg = 0;    // second register, jump target or immediate
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Program {
  std::vector<Instruction> code;
  friend bool operator==(const Program&, const Program&) = default;
};

class ProgramParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Halt: return "HALT";
    case Opcode::Nop: return "NOP";
    case Opcode::Inc: return "INC";
    case Opcode::Dec: return "DEC";
    case Opcode::Set: return "SET";
    case Opcode::Jz: return "JZ";
    case Opcode::Jmp: return "JMP";
    case Opcode::Oracle: return "ORACLE";
    case Opcode::Out: return "OUT";
  }
  return "?";
}

inline int parse_register(const std::string& tok, int line) {
  if (tok.size() != 2 || tok[0] != 'r' || tok[1] < '0' || tok[1] >= '0' + kRegisters)
    throw ProgramParseError("line " + std::to_string(line) + ": bad register '" + tok + "'");
  return tok[1] - '0';
}

inline Natural parse_natural(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ProgramParseError("line " + std::to_string(line) + ": bad number '" + tok + "'");
  }
}

}  // namespace detail

/// Assembly text: one instruction per line, '#' starts a comment, ';' also
/// separates instructions.  Mnemonics:
///   HALT | NOP | INC rX | DEC rX | SET rX k | JZ rX t | JMP t |
///   ORACLE rX rY  (rX := [rY in oracle]) | OUT rX
inline Program parse_program(const std::string& text) {
  Program p;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ';', '\n');
  std::istringstream lines(normalized);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    std::string m = tok[0];
    std::transform(m.begin(), m.end(), m.begin(), ::toupper);
    auto want = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw ProgramParseError("line " + std::to_string(lineno) + ": " + m + " takes " + std::to_string(n) +
                                " operands");
    };
    Instruction ins;
    if (m == "HALT") {
      want(0);
      ins.op = Opcode::Halt;
    } else if (m == "NOP") {
      want(0);
      ins.op = Opcode::Nop;
    } else if (m == "INC" || m == "DEC" || m == "OUT") {
      want(1);
      ins.op = m == "INC" ? Opcode::Inc : m == "DEC" ? Opcode::Dec : Opcode::Out;
      ins.reg = detail::parse_register(tok[1], lineno);
    } else if (m == "SET" || m == "JZ") {
      want(2);
      ins.op = m == "SET" ? Opcode::Set : Opcode::Jz;
      ins.reg = detail::parse_register(tok[1], lineno);
      ins.arg = detail::parse_natural(tok[2], lineno);
    } else if (m == "JMP") {
      want(1);
      ins.op = Opcode::Jmp;
      ins.arg = detail::parse_natural(tok[1], lineno);
    } else if (m == "ORACLE") {
      want(2);
      ins.op = Opcode::Oracle;
      ins.reg = detail::parse_register(tok[1], lineno);
      ins.arg = static_cast<Natural>(detail::parse_register(tok[2], lineno));
    } else {
      throw ProgramParseError("line " + std::to_string(lineno) + ": unknown mnemonic '" + tok[0] + "'");
    }
    p.code.push_back(ins);
  }
  return p;
}

inline std::string to_assembly(const Program& p) {
  std::string out;
  for (const auto& ins : p.code) {
    out += detail::opcode_name(ins.op);
    switch (ins.op) {
      case Opcode::Inc:
      case Opcode::Dec:
      case Opcode::Out: out += " r" + std::to_string(ins.reg); break;
      case Opcode::Set:
      case Opcode::Jz: out += " r" + std::to_string(ins.reg) + " " + std::to_string(ins.arg); break;
      case Opcode::Jmp: out += " " + std::to_string(ins.arg); break;
      case Opcode::Oracle: out += " r" + std::to_string(ins.reg) + " r" + std::to_string(ins.arg); break;
      default: break;
    }
    out += "\n";
  }
  return out;
}

// Goedel numbering: bijective base-K numerals whose digits are instruction
// codes.  Every natural decodes to a program, and encoding accepts exactly
// the programs whose operands are below kOperandRange.
inline constexpr Natural kInstructionCodes = kOpcodeCount * kRegisters * kOperandRange;

inline Instruction decode_instruction(Natural code) {
  Instruction ins;
  ins.op = static_cast<Opcode>(code % kOpcodeCount);
  code /= kOpcodeCount;
  ins.reg = static_cast<int>(code % kRegisters);
  ins.arg = code / kRegisters;
  return ins;
}

inline Natural encode_instruction(const Instruction& ins) {
  if (ins.arg >= kOperandRange) throw std::overflow_error("operand too large for the Goedel numbering");
  return static_cast<Natural>(ins.op) +
         kOpcodeCount * (static_cast<Natural>(ins.reg) + kRegisters * ins.arg);
}

inline Program decode_program(Natural e) {
  Program p;
  while (e > 0) {
    --e;
    p.code.push_back(decode_instruction(e % kInstructionCodes));
    e /= kInstructionCodes;
  }
  return p;
}

inline Natural encode_program(const Program& p) {
  Natural e = 0;
  for (auto it = p.code.rbegin(); it != p.code.rend(); ++it) {
    Natural digit = encode_instruction(*it) + 1;
    if (e > (std::numeric_limits<Natural>::max() - digit) / kInstructionCodes)
      throw std::overflow_error("program too long for a 64-bit index");
    e = e * kInstructionCodes + digit;
  }
  return e;
}

/// An index computing the same staged sets as e: the program with a NOP appended.
inline Natural pad_index(Natural e) {
  Program p = decode_program(e);
  p.code.push_back(Instruction{Opcode::Nop, 0, 0});
  return encode_program(p);
}

// ---------------------------------------------------------------------------
// Oracles.

class OracleUndefined : public std::runtime_error {
 public:
  explicit OracleUndefined(Natural n)
      : std::runtime_error("oracle undefined at " + std::to_string(n)), where(n) {}
  Natural where;
};

/// Membership queries.  nullopt means the source cannot answer (a lazily
/// bounded source was exhausted or a certificate is missing).
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::optional<bool> query(Natural n) const = 0;
  virtual std::string id() const = 0;
};

/// Explicit finite set, optionally answering `fallback` at and above `bound`.
class SetOracle final : public Oracle {
 public:
  explicit SetOracle(FiniteSet members, std::optional<Natural> bound = std::nullopt,
                     std::optional<bool> fallback = false, std::string name = "")
      : members_(std::move(members)), bound_(bound), fallback_(fallback), name_(std::move(name)) {}

  std::optional<bool> query(Natural n) const override {
    if (bound_ && n >= *bound_) return fallback_;
    return members_.count(n) > 0;
  }
  std::string id() const override {
    if (!name_.empty()) return name_;
    std::string s = "set{";
    for (Natural x : members_) s += std::to_string(x) + ",";
    return s + "}";
  }

 private:
  FiniteSet members_;
  std::optional<Natural> bound_;
  std::optional<bool> fallback_;
  std::string name_;
};

inline const SetOracle& empty_oracle() {
  static const SetOracle empty(FiniteSet{}, std::nullopt, false, "empty");
  return empty;
}

/// Lazily evaluated characteristic function.
class FunctionOracle final : public Oracle {
 public:
  FunctionOracle(std::function<std::optional<bool>(Natural)> fn, std::string name)
      : fn_(std::move(fn)), name_(std::move(name)) {}
  std::optional<bool> query(Natural n) const override { return fn_(n); }
  std::string id() const override { return name_; }

 private:
  std::function<std::optional<bool>(Natural)> fn_;
  std::string name_;
};

/// A binary string read as an initial segment of an oracle; undefined beyond it.
class PrefixOracle final : public Oracle {
 public:
  explicit PrefixOracle(std::string bits) : bits_(std::move(bits)) {}
  std::optional<bool> query(Natural n) const override {
    if (n >= bits_.size()) return std::nullopt;
    return bits_[n] == '1';
  }
  std::string id() const override { return "prefix:" + bits_; }

 private:
  std::string bits_;
};

// ---------------------------------------------------------------------------
// Interpreter.

enum class RunStatus { Halted, Cycled, OutOfSteps, OracleUndefined };

struct Emission {
  Natural value;
  Natural step;  // steps executed before the OUT completed
};

struct RunResult {
  RunStatus status = RunStatus::OutOfSteps;
  Natural steps = 0;
  std::vector<Emission> outputs;
  std::optional<Natural> undefined_query;

  bool finished() const { return status == RunStatus::Halted || status == RunStatus::Cycled; }
  FiniteSet output_set() const {
    FiniteSet s;
    for (const auto& e : outputs) s.insert(e.value);
    return s;
  }
};

struct RunOptions {
  Natural input = 0;
  Natural max_steps = 1000;
  bool detect_cycles = true;
};

namespace detail {

struct Config {
  Natural pc;
  Natural r[kRegisters];
  bool operator==(const Config& o) const {
    return pc == o.pc && std::equal(std::begin(r), std::end(r), std::begin(o.r));
  }
};

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    std::size_t h = std::hash<Natural>{}(c.pc);
    for (Natural v : c.r) h = h * 1000003u ^ std::hash<Natural>{}(v);
    return h;
  }
};

}  // namespace detail

/// Runs `p` with the given oracle.  A repeated configuration is reported as
/// Cycled: the machine is deterministic given its oracle answers, so it
/// diverges.  Falling off the end of the code halts.
inline RunResult run_program(const Program& p, const Oracle& oracle, const RunOptions& opt = {}) {
  RunResult res;
  detail::Config c{0, {opt.input, 0, 0, 0}};
  std::unordered_set<detail::Config, detail::ConfigHash> seen;
  while (true) {
    if (c.pc >= p.code.size()) {
      res.status = RunStatus::Halted;
      return res;
    }
    if (opt.detect_cycles && !seen.insert(c).second) {
      res.status = RunStatus::Cycled;
      return res;
    }
    if (res.steps >= opt.max_steps) {
      res.status = RunStatus::OutOfSteps;
      return res;
    }
    const Instruction& ins = p.code[c.pc];
    ++res.steps;
    Natural next = c.pc + 1;
    Natural& reg = c.r[ins.reg];
    switch (ins.op) {
      case Opcode::Halt: res.status = RunStatus::Halted; return res;
      case Opcode::Nop: break;
      case Opcode::Inc: ++reg; break;
      case Opcode::Dec: reg = reg == 0 ? 0 : reg - 1; break;
      case Opcode::Set: reg = ins.arg; break;
      case Opcode::Jz:
        if (reg == 0) next = ins.arg;
        break;
      case Opcode::Jmp: next = ins.arg; break;
      case Opcode::Oracle: {
        Natural q = c.r[ins.arg % kRegisters];
        auto a = oracle.query(q);
        if (!a) {
          res.status = RunStatus::OracleUndefined;
          res.undefined_query = q;
          return res;
        }
        reg = *a ? 1 : 0;
        break;
      }
      case Opcode::Out: res.outputs.push_back({reg, res.steps}); break;
    }
    c.pc = next;
  }
}

/// W_e^X[stage]: everything `p` enumerates (input 0) within `stage` steps.
inline FiniteSet run_staged(const Program& p, const Oracle& oracle, Natural stage) {
  RunResult r = run_program(p, oracle, {0, stage, false});
  if (r.status == RunStatus::OracleUndefined) throw OracleUndefined(*r.undefined_query);
  return r.output_set();
}

inline FiniteSet run_staged(Natural e, const Oracle& oracle, Natural stage) {
  return run_staged(decode_program(e), oracle, stage);
}

// ---------------------------------------------------------------------------
// Curated suites.

struct NamedProgram {
  std::string name;
  Program program;
};

/// A finite program family standing in for the enumeration of all programs.
/// Number n names program n mod size(), so every program has infinitely many
/// names (n, n + size(), ...), which is the padding used by witnesses.
/// Ids 0 and 1 are always the trivially halting and trivially looping programs.
class Suite {
 public:
  static constexpr Natural kHaltId = 0;
  static constexpr Natural kLoopId = 1;

  explicit Suite(std::vector<NamedProgram> programs = {}, std::string name = "suite") : name_(std::move(name)) {
    programs_.push_back({"halt", parse_program("HALT")});
    programs_.push_back({"loop", parse_program("JMP 0")});
    for (auto& p : programs) programs_.push_back(std::move(p));
  }

  Natural size() const { return programs_.size(); }
  const std::string& name() const { return name_; }
  const NamedProgram& entry(Natural n) const { return programs_[n % programs_.size()]; }
  const Program& program(Natural n) const { return entry(n).program; }

  Natural id_of(const std::string& name) const {
    for (Natural i = 0; i < programs_.size(); ++i)
      if (programs_[i].name == name) return i;
    throw std::out_of_range("no program named " + name + " in suite " + name_);
  }

  /// Smallest name of program id that is >= at_least.
  Natural padded(Natural id, Natural at_least) const {
    Natural k = at_least <= id ? 0 : (at_least - id + size() - 1) / size();
    return id + k * size();
  }

 private:
  std::vector<NamedProgram> programs_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Certified jump hierarchy.

enum class Verdict { In, Out, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::In: return "in";
    case Verdict::Out: return "out";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct Decision {
  Verdict verdict = Verdict::Unknown;
  Natural steps = 0;  // halting time when In
};

struct JumpSnapshot {
  int level = 0;
  Natural stage = 0;
  Natural universe = 0;  // approximation covers [0, universe)
  FiniteSet approximation;
  /// Stage from which the approximation is exact on [0, universe); present
  /// only when every member of the universe is decided.
  std::optional<Natural> certified_from;

  bool exact() const { return certified_from && stage >= *certified_from; }
};

/// Z_(n) for n <= max_level over a suite: m in Z_(n) iff program m (of the
/// suite) halts on input m with oracle Z_(n-1), and Z_(0) = Z.  Halting is
/// decided by running to a halt or to a repeated configuration within the
/// step budget; anything else stays Unknown.
class Hierarchy {
 public:
  Hierarchy(std::shared_ptr<const Suite> suite, std::shared_ptr<const Oracle> base, Natural budget = 4096,
            int max_level = 3)
      : suite_(std::move(suite)), base_(std::move(base)), budget_(budget), max_level_(max_level) {}

  const Suite& suite() const { return *suite_; }
  const Oracle& base() const { return *base_; }
  Natural budget() const { return budget_; }
  int max_level() const { return max_level_; }

  Decision decide(int level, Natural n) const {
    if (level < 0 || level > max_level_)
      throw std::out_of_range("jump level " + std::to_string(level) + " beyond configured bound");
    if (level == 0) {
      auto a = base_->query(n);
      return {a ? (*a ? Verdict::In : Verdict::Out) : Verdict::Unknown, 0};
    }
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(level, n);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    LevelOracle below(*this, level - 1);
    RunResult r = run_program(suite_->program(n), below, {n, budget_, true});
    Decision d;
    if (r.status == RunStatus::Halted) d = {Verdict::In, r.steps};
    else if (r.status == RunStatus::Cycled) d = {Verdict::Out, 0};
    cache_[key] = d;
    return d;
  }

  /// An oracle view of Z_(level); Unknown answers are undefined.
  std::shared_ptr<const Oracle> level_oracle(int level) const {
    return std::make_shared<LevelOracle>(*this, level);
  }

  JumpSnapshot snapshot(int level, Natural stage, Natural universe) const {
    JumpSnapshot snap;
    snap.level = level;
    snap.stage = stage;
    snap.universe = universe;
    bool all_decided = true;
    Natural cert = 0;
    for (Natural n = 0; n < universe; ++n) {
      Decision d = decide(level, n);
      if (d.verdict == Verdict::Unknown) all_decided = false;
      if (d.verdict == Verdict::In) {
        cert = std::max(cert, d.steps);
        if (level == 0 || d.steps <= stage) snap.approximation.insert(n);
      }
    }
    if (all_decided) snap.certified_from = cert;
    return snap;
  }

 private:
  class LevelOracle final : public Oracle {
   public:
    LevelOracle(const Hierarchy& h, int level) : h_(h), level_(level) {}
    std::optional<bool> query(Natural n) const override {
      Decision d = h_.decide(level_, n);
      if (d.verdict == Verdict::Unknown) return std::nullopt;
      return d.verdict == Verdict::In;
    }
    std::string id() const override { return h_.base().id() + "_(" + std::to_string(level_) + ")"; }

   private:
    const Hierarchy& h_;
    int level_;
  };

  std::shared_ptr<const Suite> suite_;
  std::shared_ptr<const Oracle> base_;
  Natural budget_;
  int max_level_;
  mutable std::recursive_mutex mutex_;
  mutable std::map<std::pair<int, Natural>, Decision> cache_;
};

/// jump_snapshot over a hierarchy built on `oracle`.
inline JumpSnapshot jump_snapshot(const Hierarchy& h, int level, Natural stage, Natural universe) {
  return h.snapshot(level, stage, universe);
}

// ---------------------------------------------------------------------------
// Sigma^0_n-indexed sets.

struct SigmaIndexedSet {
  int level = 1;
  Natural index = 0;  // suite name of the enumerating program
};

/// Three-valued membership of m in W_{e,level} relative to the hierarchy's
/// base oracle.  W_{e,1} is what program e enumerates; W_{e,a} for a > 1 is
/// the union of the complements of W_{i,b} over codes pair(i,b) enumerated
/// by e with 1 <= b < a.
inline Verdict sigma_eval(const Hierarchy& h, const SigmaIndexedSet& set, Natural m, Natural budget) {
  if (set.level <= 0) throw std::invalid_argument("sigma_eval: level must be at least 1");
  RunResult r = run_program(h.suite().program(set.index), h.base(), {0, budget, true});
  if (set.level == 1) {
    for (const auto& e : r.outputs)
      if (e.value == m) return Verdict::In;
    return r.finished() ? Verdict::Out : Verdict::Unknown;
  }
  bool unknown = !r.finished();
  for (const auto& e : r.outputs) {
    auto [i, b] = unpair(e.value);
    if (b < 1 || b >= static_cast<Natural>(set.level)) continue;
    Verdict v = sigma_eval(h, {static_cast<int>(b), i}, m, budget);
    if (v == Verdict::Out) return Verdict::In;
    if (v == Verdict::Unknown) unknown = true;
  }
  return unknown ? Verdict::Unknown : Verdict::Out;
}

}  // namespace spectra

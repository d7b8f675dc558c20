// The relativised Wehner family F_X = { {e}+F : F finite, F != W_e^X } and
// the column operator V(Y, X) that enumerates it when Y is not computable
// from X, run over a machine suite.
#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectra/machines.hpp"

namespace spectra {

/// {e} + F = {2e} u {2x+1 : x in F}.
inline FiniteSet join_code(Natural e, const FiniteSet& f) {
  FiniteSet out{2 * e};
  for (Natural x : f) out.insert(2 * x + 1);
  return out;
}

/// The odd part of a code, decoded.
inline FiniteSet odd_part(const FiniteSet& code) {
  FiniteSet out;
  for (Natural c : code)
    if (c % 2 == 1) out.insert(c / 2);
  return out;
}

/// W_e^X[s] for every suite program e below a bound, from one run each.
class StagedEnumerations {
 public:
  StagedEnumerations(std::shared_ptr<const Suite> suite, std::shared_ptr<const Oracle> x, Natural e_bound,
                     Natural horizon)
      : suite_(std::move(suite)), x_(std::move(x)) {
    for (Natural e = 0; e < e_bound; ++e) {
      RunResult r = run_program(suite_->program(e), *x_, {0, horizon, true});
      if (r.status == RunStatus::OracleUndefined) throw OracleUndefined(*r.undefined_query);
      runs_.push_back(std::move(r));
    }
  }

  std::string oracle_id() const { return x_->id(); }
  const Suite& suite() const { return *suite_; }
  Natural e_bound() const { return runs_.size(); }

  FiniteSet at(Natural e, Natural s) const {
    FiniteSet out;
    for (const auto& em : run(e).outputs)
      if (em.step <= s) out.insert(em.value);
    return out;
  }

  /// Stage from which W_e^X[s] is the whole of W_e^X, when known.
  std::optional<Natural> final_from(Natural e) const {
    const RunResult& r = run(e);
    if (!r.finished()) return std::nullopt;
    return r.steps;
  }

 private:
  const RunResult& run(Natural e) const {
    if (e >= runs_.size()) throw std::out_of_range("index " + std::to_string(e) + " outside the enumerated bound");
    return runs_[e];
  }

  std::shared_ptr<const Suite> suite_;
  std::shared_ptr<const Oracle> x_;
  std::vector<RunResult> runs_;
};

// ---------------------------------------------------------------------------
// The family.

enum class MemberVerdict { Confirmed, Provisional, Excluded };

inline const char* to_string(MemberVerdict v) {
  switch (v) {
    case MemberVerdict::Confirmed: return "confirmed";
    case MemberVerdict::Provisional: return "provisional";
    case MemberVerdict::Excluded: return "excluded";
  }
  return "?";
}

/// Is {e}+F in F_X, judged at stage s?  F != W_e^X is certified when W_e^X[s]
/// already has an element outside F (W only grows), or when W_e^X is final
/// and differs from F.
inline MemberVerdict member_verdict(const StagedEnumerations& w, Natural e, const FiniteSet& f, Natural s) {
  FiniteSet ws = w.at(e, s);
  if (!std::includes(f.begin(), f.end(), ws.begin(), ws.end())) return MemberVerdict::Confirmed;
  auto fin = w.final_from(e);
  if (fin && *fin <= s) return ws == f ? MemberVerdict::Excluded : MemberVerdict::Confirmed;
  return MemberVerdict::Provisional;
}

struct WehnerBounds {
  Natural e_bound = 4;   // indices e < e_bound
  Natural u_bound = 16;  // finite sets D_u, u < u_bound
  Natural s0_bound = 32; // column start stages s0 < s0_bound
};

struct FamilyEntry {
  Natural e = 0;
  Natural u = 0;
  FiniteSet f;
  MemberVerdict verdict = MemberVerdict::Provisional;
};

struct WehnerFamilyApprox {
  std::string oracle_id;
  Natural stage = 0;
  std::vector<FamilyEntry> members;
};

inline WehnerFamilyApprox wehner_family(const StagedEnumerations& w, Natural stage, const WehnerBounds& b) {
  WehnerFamilyApprox out{w.oracle_id(), stage, {}};
  for (Natural e = 0; e < std::min(b.e_bound, w.e_bound()); ++e)
    for (Natural u = 0; u < b.u_bound; ++u) {
      FiniteSet f = canonical_finite_set(u);
      out.members.push_back({e, u, f, member_verdict(w, e, f, stage)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// The operator V(Y, X).

struct VColumn {
  Natural e = 0, u = 0, s0 = 0;
  Natural index = 0;  // triple(e, u, s0)
  bool live = false;
  FiniteSet content;
};

struct Growth {
  Natural stage = 0;
  Natural column = 0;   // position in VColumns::columns
  Natural element = 0;  // the odd code added
};

struct VColumns {
  std::string x_id, y_id;
  Natural stage = 0;  // columns hold V_stage
  std::vector<VColumn> columns;
  std::vector<Growth> log;
};

inline VColumns v_columns_init(const WehnerBounds& b, std::string x_id, std::string y_id) {
  VColumns v{std::move(x_id), std::move(y_id), 0, {}, {}};
  for (Natural e = 0; e < b.e_bound; ++e)
    for (Natural u = 0; u < b.u_bound; ++u)
      for (Natural s0 = 0; s0 < b.s0_bound; ++s0) v.columns.push_back({e, u, s0, triple(e, u, s0), false, {}});
  return v;
}

/// Least x in Y + co-Y with 2x+1 not in `content`.
inline Natural least_fresh_join_element(const Oracle& y, const FiniteSet& content) {
  for (Natural x = 0;; ++x) {
    auto in = y.query(x / 2);
    if (!in) throw OracleUndefined(x / 2);
    bool member = (x % 2 == 0) ? *in : !*in;
    if (member && !content.count(2 * x + 1)) return x;
  }
}

/// Moves the columns from V_s to V_{s+1}.  Columns with s0 = s start as
/// {e}+D_u; older columns equal to {e}+W_e^X[s] gain 2x+1 for the least fresh
/// x in Y + co-Y.
inline void v_operator_step(const Oracle& y, const StagedEnumerations& w, VColumns& v) {
  if (w.oracle_id() != v.x_id) throw std::invalid_argument("columns were built for another X");
  Natural s = v.stage;
  for (Natural i = 0; i < v.columns.size(); ++i) {
    VColumn& c = v.columns[i];
    if (c.s0 == s) {
      c.live = true;
      c.content = join_code(c.e, canonical_finite_set(c.u));
      continue;
    }
    if (!c.live) continue;
    if (c.content == join_code(c.e, w.at(c.e, s))) {
      Natural x = least_fresh_join_element(y, c.content);
      c.content.insert(2 * x + 1);
      v.log.push_back({s, i, 2 * x + 1});
    }
  }
  v.stage = s + 1;
}

inline VColumns v_run(const Oracle& y, const StagedEnumerations& w, const WehnerBounds& b, Natural stages) {
  VColumns v = v_columns_init(b, w.oracle_id(), y.id());
  while (v.stage < stages) v_operator_step(y, w, v);
  return v;
}

/// A column is settled when it can provably never match {e}+W_e^X again:
/// W_e^X[s] has an element outside it, or W_e^X is final and differs.
inline bool column_settled(const VColumn& c, const StagedEnumerations& w, Natural s) {
  if (!c.live) return false;
  FiniteSet f = odd_part(c.content);
  FiniteSet ws = w.at(c.e, s);
  if (!std::includes(f.begin(), f.end(), ws.begin(), ws.end())) return true;
  auto fin = w.final_from(c.e);
  return fin && *fin <= s && c.content != join_code(c.e, ws);
}

struct AuditDiscrepancy {
  std::string kind;  // "missing-member" or "excluded-column"
  Natural e = 0;
  FiniteSet f;
};

struct AuditReport {
  Natural stage = 0;
  std::size_t confirmed_members = 0;
  std::size_t settled_columns = 0;
  std::size_t unsettled_columns = 0;
  std::vector<AuditDiscrepancy> discrepancies;
};

/// (a) every confirmed member is the content of a settled column;
/// (b) no settled column is an excluded member.
inline AuditReport v_column_audit(const VColumns& v, const WehnerFamilyApprox& fam, const StagedEnumerations& w) {
  if (v.x_id != fam.oracle_id || w.oracle_id() != fam.oracle_id)
    throw std::invalid_argument("audit inputs were built for different oracles X");
  AuditReport rep;
  rep.stage = v.stage;
  Natural s = v.stage == 0 ? 0 : v.stage - 1;
  std::set<FiniteSet> settled;
  for (const auto& c : v.columns) {
    if (!c.live) continue;
    if (!column_settled(c, w, s)) {
      ++rep.unsettled_columns;
      continue;
    }
    ++rep.settled_columns;
    settled.insert(c.content);
    FiniteSet f = odd_part(c.content);
    if (member_verdict(w, c.e, f, s) == MemberVerdict::Excluded) rep.discrepancies.push_back({"excluded-column", c.e, f});
  }
  for (const auto& m : fam.members) {
    if (m.verdict != MemberVerdict::Confirmed) continue;
    ++rep.confirmed_members;
    if (!settled.count(join_code(m.e, m.f))) rep.discrepancies.push_back({"missing-member", m.e, m.f});
  }
  return rep;
}

/// Column growth stages, for spotting columns that keep growing.
inline std::vector<Natural> growth_stages(const VColumns& v, Natural column) {
  std::vector<Natural> out;
  for (const auto& g : v.log)
    if (g.column == column) out.push_back(g.stage);
  return out;
}

/// A small suite for the Wehner construction: a finite enumerator, an
/// unbounded counter, and a program enumerating X + co-X.
inline std::shared_ptr<const Suite> wehner_demo_suite() {
  return std::make_shared<Suite>(
      std::vector<NamedProgram>{
          {"one", parse_program("SET r1 1; OUT r1; HALT")},
          {"evens-to-6", parse_program("OUT r1; SET r1 2; OUT r1; SET r1 4; OUT r1; SET r1 6; OUT r1")},
          {"join-of-oracle", parse_program(R"(
              ORACLE r2 r1
              JZ r2 5
              OUT r3
              INC r3
              JMP 7
              INC r3
              OUT r3
              INC r3
              INC r1
              JMP 0
          )")},
          {"counter", parse_program("OUT r1; INC r1; JMP 0")},
      },
      "wehner-demo");
}

}  // namespace spectra

#include <gtest/gtest.h>

#include <random>

#include "spectra/randomness.hpp"

using namespace spectra;

namespace {

std::vector<std::string> strings_of_length(unsigned n) {
  std::vector<std::string> out;
  for (Natural v = 0; v < (Natural{1} << n); ++v) out.push_back(detail::cylinder_string(v, n));
  return out;
}

Clopen random_clopen(std::mt19937_64& rng, unsigned max_len) {
  std::vector<std::string> v;
  int n = static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    unsigned len = static_cast<unsigned>(rng() % (max_len + 1));
    v.push_back(detail::cylinder_string(rng() % (Natural{1} << len), len));
  }
  return Clopen(v);
}

std::string random_bits(std::mt19937_64& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (rng() & 1) ? '1' : '0';
  return s;
}

// Stage-major search straight from the definition: rerun every rho at
// every step budget.
std::optional<std::pair<Natural, std::string>> brute_xk(const EpsilonPlan& pl, const RandomInstance& inst, Natural k,
                                                        Natural max_steps, std::size_t ext) {
  std::string t = tau(inst.sigma, k);
  Natural lo = pl.block_start(inst.code, k), hi = pl.block_end(inst.code, k);
  std::vector<std::string> rhos;
  for (std::size_t len = 0; len <= ext; ++len)
    for (const auto& e : strings_of_length(static_cast<unsigned>(len))) rhos.push_back(t + e);
  for (Natural steps = 1; steps <= max_steps; ++steps)
    for (const auto& rho : rhos) {
      FiniteSet out = run_program(inst.psi, PrefixOracle(rho), {0, steps, false}).output_set();
      auto it = out.lower_bound(lo);
      if (it != out.end() && *it < hi) return std::pair{*it, rho};
    }
  return std::nullopt;
}

ConstructionState run(const std::string& name, Natural stages, SearchBounds b = {}) {
  return run_construction(ConstructionState(plan(), random_demo_instance(name), b), stages);
}

std::string sample_in_p(const ConstructionState& st, std::mt19937_64& rng, std::size_t len) {
  Clopen r = st.removed();
  while (true) {
    std::string x = random_bits(rng, len);
    if (!r.contains(x)) return x;
  }
}

FiniteSet block(const ConstructionState& st, Natural k) {
  FiniteSet s;
  for (Natural v = st.plan.block_start(0, k); v < st.plan.block_end(0, k); ++v) s.insert(v);
  return s;
}

// count-up finds x_0..x_5 well within this many stages
constexpr Natural kOmegaStages = 3000;

const ConstructionState& omega_run() {
  static const ConstructionState st = run("count-up", kOmegaStages);
  return st;
}

}  // namespace

TEST(Plan, SumsAndBlocks) {
  EpsilonPlan p = plan();
  EXPECT_EQ(p.epsilon(0), Dyadic(1, 2));
  EXPECT_EQ(p.epsilon(1), Dyadic(1, 3));
  EXPECT_LT(p.epsilon_sum(40), Dyadic(1, 1));
  EXPECT_EQ(p.delta(1, 0), Dyadic(1, 5));
  for (Natural code = 0; code < 4; ++code) {
    EXPECT_LT(p.delta_sum(code, 40), p.epsilon(code));
    for (Natural k = 0; k < 10; ++k) {
      Natural n = p.block_size(code, k);
      EXPECT_EQ(n & (n - 1), 0u);
      EXPECT_EQ(p.delta(code, k) * Dyadic(static_cast<std::int64_t>(n)), Dyadic(1));
      EXPECT_EQ(p.block_end(code, k) - p.block_start(code, k), n);
      EXPECT_EQ(p.level_of(code, p.block_start(code, k)), k);
      EXPECT_EQ(p.level_of(code, p.block_end(code, k) - 1), k);
    }
    EXPECT_EQ(p.block_start(code, 0), 0u);
  }
  EXPECT_THROW(plan({1, 2}), std::invalid_argument);
  EXPECT_THROW(plan({2, 1}), std::invalid_argument);
}

TEST(Plan, LengthLexOrder) {
  std::vector<std::string> all;
  for (unsigned len = 0; len <= 6; ++len)
    for (const auto& s : strings_of_length(len)) all.push_back(s);
  for (Natural i = 0; i < all.size(); ++i) {
    EXPECT_EQ(length_lex(i), all[i]);
    EXPECT_EQ(length_lex_index(all[i]), i);
  }
  EXPECT_EQ(tau("01", 4), "0101");
}

TEST(ClopenAlgebra, MatchesPointwiseOracle) {
  std::mt19937_64 rng(31);
  auto points = strings_of_length(6);
  for (int i = 0; i < 300; ++i) {
    Clopen a = random_clopen(rng, 5), b = random_clopen(rng, 5);
    Clopen c = a.complement(), n = intersection(a, b), u = set_union(a, b);
    int count_a = 0;
    for (const auto& x : points) {
      bool in_a = a.contains(x), in_b = b.contains(x);
      count_a += in_a;
      EXPECT_EQ(c.contains(x), !in_a);
      EXPECT_EQ(n.contains(x), in_a && in_b);
      EXPECT_EQ(u.contains(x), in_a || in_b);
    }
    EXPECT_EQ(a.measure(), Dyadic(count_a, 6));
    EXPECT_EQ(a.measure() + c.measure(), Dyadic(1));
    EXPECT_EQ(n.measure() + u.measure(), a.measure() + b.measure());
  }
  EXPECT_EQ(Clopen::whole().complement(), Clopen());
  EXPECT_EQ(set_union(Clopen::cylinder("0"), Clopen::cylinder("1")), Clopen::whole());
}

TEST(ClopenAlgebra, MeasureExamples) {
  EXPECT_EQ(Clopen::cylinder("0110").complement().measure(), Dyadic(15, 4));
  Clopen p = intersection(Clopen::cylinder("0000").complement(), Clopen::cylinder("11111").complement());
  EXPECT_EQ(p.measure(), Dyadic(29, 5));
  EXPECT_GE(p.measure(), Dyadic(1) - Dyadic(3, 5));
}

TEST(Partition, ExactAndOutsideFirst) {
  std::mt19937_64 rng(32);
  for (unsigned len = 1; len <= 7; ++len)
    for (int i = 0; i < 20; ++i) {
      Clopen r = len > 1 ? random_clopen(rng, len - 1) : Clopen();
      auto cyls = strings_of_length(len);
      std::set<Natural> seen;
      Natural outside = 0;
      for (const auto& c : cyls) outside += !r.covers(c);
      Dyadic total;
      for (const auto& c : cyls) {
        Natural idx = piece_index(r, len, c + "01");
        EXPECT_TRUE(seen.insert(idx).second);
        EXPECT_EQ(piece_cylinder(r, len, idx), c);
        EXPECT_EQ(idx < outside, !r.covers(c)) << c;
        Clopen piece = Clopen::cylinder(piece_cylinder(r, len, idx));
        EXPECT_EQ(piece.measure(), Dyadic::pow2_neg(len));
        total += piece.measure();
      }
      EXPECT_EQ(seen.size(), cyls.size());
      EXPECT_EQ(*seen.rbegin(), cyls.size() - 1);
      EXPECT_EQ(total, Dyadic(1));
    }
  EXPECT_THROW(piece_index(Clopen(), 4, "01"), PrefixTooShort);
}

TEST(FindXk, Examples) {
  EpsilonPlan p = plan();
  SearchBounds b;
  auto hit = find_xk(p, random_demo_instance("count-up"), 0, b);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->x, 0u);
  EXPECT_EQ(hit->step, 2u);
  auto one = find_xk(p, random_demo_instance("count-up"), 1, b);
  ASSERT_TRUE(one);
  EXPECT_EQ(one->x, 16u);
  EXPECT_EQ(one->rho, "0");

  RandomInstance nothing{"nothing", 0, "", parse_program("HALT")};
  for (Natural k = 0; k < 4; ++k) EXPECT_FALSE(find_xk(p, nothing, k, b));

  // bit 0 = 0 prints 5, bit 0 = 1 prints 3, both at step 4
  RandomInstance tie{"tie", 0, "", parse_program("ORACLE r3 r0; JZ r3 5; SET r1 3; OUT r1; HALT; SET r1 5; OUT r1; HALT")};
  auto t = find_xk(p, tie, 0, b);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->rho, "0");
  EXPECT_EQ(t->x, 5u);
}

TEST(FindXk, MatchesStageMajorBruteForce) {
  EpsilonPlan p = plan();
  std::vector<RandomInstance> cases = random_demo_instances();
  cases.push_back({"tie", 0, "1", parse_program("ORACLE r3 r0; JZ r3 5; SET r1 3; OUT r1; HALT; SET r1 5; OUT r1; HALT")});
  cases.push_back({"bit-two", 0, "", parse_program("SET r2 2; ORACLE r3 r2; JZ r3 6; SET r1 17; OUT r1; HALT; SET r1 40; OUT r1; HALT")});
  SearchBounds b{200, 2, 1000};
  for (const auto& inst : cases)
    for (Natural k = 0; k < 3; ++k) {
      auto fast = find_xk(p, inst, k, b);
      auto slow = brute_xk(p, inst, k, b.max_steps, b.max_extension);
      ASSERT_EQ(fast.has_value(), slow.has_value()) << inst.name << " k=" << k;
      if (fast) {
        EXPECT_EQ(fast->x, slow->first) << inst.name << " k=" << k;
        EXPECT_EQ(fast->rho, slow->second) << inst.name << " k=" << k;
      }
    }
}

TEST(Certify, Examples) {
  EpsilonPlan p = plan();
  SearchBounds b;
  EXPECT_EQ(certify_no_xk(p, random_demo_instance("first-point"), 1, b), Certificate::Empty);
  EXPECT_EQ(certify_no_xk(p, random_demo_instance("far-bit"), 1, b), Certificate::Refuted);
  EXPECT_EQ(certify_no_xk(p, random_demo_instance("count-up"), 2, b), Certificate::Refuted);
  EXPECT_EQ(certify_no_xk(p, {"loop", 0, "", parse_program("JMP 0")}, 0, b), Certificate::Empty);
  EXPECT_EQ(certify_no_xk(p, {"grow", 0, "", parse_program("INC r1; JMP 0")}, 0, b), Certificate::Inconclusive);
  // reads its oracle forever, never printing
  RandomInstance reader{"reader", 0, "", parse_program("ORACLE r2 r1; INC r1; JMP 0")};
  EXPECT_EQ(certify_no_xk(p, reader, 0, {4096, 3, 500}), Certificate::Inconclusive);
}

TEST(LambdaStep, StageZeroAndTwo) {
  ConstructionState st(plan(), random_demo_instance("count-up"));
  EXPECT_THROW(lambda_step(st, 1), std::invalid_argument);
  st = lambda_step(st, 0);
  ASSERT_EQ(st.levels.size(), 1u);
  std::mt19937_64 rng(33);
  for (int i = 0; i < 10; ++i) {
    std::string x = random_bits(rng, 8);
    for (Natural v = 0; v < 16; ++v) EXPECT_EQ(column_content(st, {0, v, {}}, x, 3), FiniteSet{v});
  }
  st = lambda_step(st, 1);
  EXPECT_EQ(st.levels.size(), 1u);
  st = lambda_step(st, 2);
  ASSERT_EQ(st.levels.size(), 2u);
  EXPECT_EQ(*st.levels[0].observed, 2u);
  EXPECT_EQ(st.levels[1].opened, 2u);
  // each length-5 cylinder is one piece C_{y,1}; nothing removed yet
  std::set<Natural> owners;
  for (const auto& c : strings_of_length(5)) {
    Natural y = st.owner(1, c);
    owners.insert(y);
    for (Natural v : {Natural{0}, Natural{7}}) EXPECT_EQ(column_content(st, {0, v, {}}, c, 3), (FiniteSet{v, y}));
    EXPECT_EQ(column_content(st, {1, 20, {3}}, c, 3), (FiniteSet{3, 20}));
  }
  EXPECT_EQ(owners, block(st, 1));
  EXPECT_EQ(pi01_class(st).measure, Dyadic(1));
}

TEST(LambdaStep, PaddingCopiesPreviousColumn) {
  // x_0 shows up only after the sixteen level-0 indices are used
  RandomInstance slow{"slow", 0, "", parse_program("SET r2 20; DEC r2; JZ r2 4; JMP 1; SET r1 0; OUT r1; HALT")};
  ConstructionState st = run_construction(ConstructionState(plan(), slow), 100);
  ASSERT_TRUE(st.levels[0].found());
  Natural s0 = *st.levels[0].observed;
  ASSERT_GT(s0, 17u);
  std::vector<Natural> want;
  for (Natural s = 16; s < s0; ++s) want.push_back(s);
  EXPECT_EQ(st.copies, want);
  auto m = st.resolve(BigNatural(16));
  ASSERT_TRUE(std::holds_alternative<CopyOf>(m));
  EXPECT_EQ(std::get<CopyOf>(m).index, BigNatural(15));
  EXPECT_EQ(std::get<ColumnKey>(st.resolve(BigNatural(15))), (ColumnKey{0, 15, {}}));
  EXPECT_EQ(*st.blocks[1].base, BigNatural(s0));
  EXPECT_TRUE(std::holds_alternative<Unassociated>(st.resolve(*st.next_fresh)));
}

TEST(LambdaStep, ColumnIndicesAreFreshAndDecode) {
  const ConstructionState& st = omega_run();
  std::mt19937_64 rng(34);
  std::set<BigNatural> seen;
  for (int i = 0; i < 400; ++i) {
    Natural k = rng() % 3;
    Natural start = st.plan.block_start(0, k);
    ColumnKey key{k, start + rng() % st.plan.block_size(0, k), {}};
    for (Natural v = 0; v < start; ++v)
      if (rng() % 5 == 0) key.f.insert(v);
    BigNatural n = st.column_index(key);
    EXPECT_EQ(std::get<ColumnKey>(st.resolve(n)), key);
    seen.insert(n);
  }
  for (std::size_t k = 1; k < st.blocks.size() && st.blocks[k].base; ++k)
    EXPECT_EQ(*st.blocks[k].base, *st.blocks[k - 1].base + st.q_size(k - 1));
  EXPECT_THROW(st.column_index({0, 16, {}}), std::out_of_range);
}

TEST(Pi01, LedgerAtEveryStage) {
  for (const char* name : {"count-up", "first-point", "two-points", "far-bit"}) {
    ConstructionState st(plan(), random_demo_instance(name));
    for (Natural s = 0; s < 1600; ++s) {
      st = lambda_step(std::move(st), s);
      Pi01Report r = pi01_class(st);
      ASSERT_TRUE(r.ledger_exact) << name << " stage " << s;
      ASSERT_TRUE(r.above_bound) << name << " stage " << s;
      EXPECT_EQ(r.removed_delta, st.plan.delta_sum(0, st.found_count()) - (st.found_count() ? st.plan.delta(0, 0) : Dyadic()));
    }
  }
  Pi01Report fresh = pi01_class(run("count-up", 1));
  EXPECT_EQ(fresh.p, Clopen::whole());
  EXPECT_EQ(fresh.measure, Dyadic(1));
}

TEST(Pi01, RemovedPiecesAreDisjoint) {
  const ConstructionState& st = omega_run();
  ASSERT_GE(st.found_count(), 6u);
  for (Natural i = 1; i < st.found_count(); ++i)
    for (Natural j = i + 1; j < st.found_count(); ++j)
      EXPECT_TRUE(intersection(st.removed_piece(i), st.removed_piece(j)).empty());
}

TEST(VerifyColumns, OmegaFixture) {
  const ConstructionState& st = omega_run();
  EXPECT_FALSE(st.kstar().certified);
  std::mt19937_64 rng(35);
  for (int i = 0; i < 10; ++i) {
    std::string x = sample_in_p(st, rng, 14);
    ColumnReport r = verify_columns(st, x, 4, 2, static_cast<std::uint64_t>(i));
    EXPECT_EQ(r.clause, ShapeClause::Omega);
    EXPECT_GT(r.columns, 400u);
    EXPECT_TRUE(r.mismatches.empty()) << "first at level " << r.mismatches[0].level;
  }
}

TEST(VerifyColumns, FiniteFixtures) {
  std::mt19937_64 rng(36);
  for (auto [name, kstar] : {std::pair{"first-point", 1u}, std::pair{"two-points", 2u}}) {
    ConstructionState st = run(name, 200);
    ASSERT_TRUE(st.kstar().certified) << name;
    EXPECT_EQ(st.kstar().value, kstar);
    for (int i = 0; i < 5; ++i) {
      std::string x = sample_in_p(st, rng, 12);
      ColumnReport r = verify_columns(st, x, 4);
      EXPECT_EQ(r.clause, ShapeClause::Finite);
      EXPECT_TRUE(r.mismatches.empty()) << name;
      // every column has one point on I_{k*} and nothing above
      for (Natural k = 0; k <= kstar; ++k) {
        Natural start = st.plan.block_start(0, k);
        for (Natural v = start; v < st.plan.block_end(0, k); v += 5) {
          FiniteSet a = column_content(st, {k, v, {}}, x, 4);
          FiniteSet top = detail::within(a, st.plan.block_start(0, kstar), st.plan.block_end(0, kstar));
          EXPECT_EQ(top.size(), 1u);
          EXPECT_LT(*a.rbegin(), st.plan.block_end(0, kstar));
        }
      }
    }
  }
}

TEST(VerifyColumns, CollapseOntoTheTopLevel) {
  ConstructionState st = run("two-points", 200);
  std::mt19937_64 rng(37);
  std::string x = sample_in_p(st, rng, 12);
  for (Natural v = 0; v < 48; v += 3) {
    Natural k = v < 16 ? 0 : 1;
    FiniteSet f = k == 1 ? FiniteSet{2, 9} : FiniteSet{};
    FiniteSet a = column_content(st, {k, v, f}, x, 4);
    Natural y = *detail::within(a, 48, 112).begin();
    FiniteSet b = a;
    b.erase(y);
    EXPECT_EQ(column_content(st, {2, y, b}, x, 4), a);
  }
}

TEST(VerifyColumns, DistinctColumnsOnTheOmegaFixture) {
  const ConstructionState& st = omega_run();
  std::mt19937_64 rng(38);
  std::string x = sample_in_p(st, rng, 14);
  std::map<FiniteSet, std::size_t> seen;
  std::size_t n = 0;
  for (Natural k = 0; k <= 2; ++k)
    for (Natural v = st.plan.block_start(0, k); v < st.plan.block_end(0, k); ++v)
      for (FiniteSet f : {FiniteSet{}, FiniteSet{v % 16}}) {
        if (k == 0 && !f.empty()) continue;
        seen[column_content(st, {k, v, f}, x, 4)]++;
        ++n;
      }
  EXPECT_EQ(seen.size(), n);
}

TEST(VerifyColumns, LiteralSecondRuleBreaksTheShape) {
  ConstructionState st(plan(), random_demo_instance("count-up"));
  st.second_rule_includes_k = true;
  st = run_construction(std::move(st), 600);
  std::mt19937_64 rng(39);
  ColumnReport r = verify_columns(st, sample_in_p(st, rng, 12), 3);
  EXPECT_FALSE(r.mismatches.empty());
}

TEST(VerifyColumns, Contracts) {
  const ConstructionState& st = omega_run();
  std::string bad = st.removed_piece(1).strings()[0] + "0000000";
  EXPECT_THROW(verify_columns(st, bad, 4), NotInClass);
  EXPECT_THROW(verify_columns(st, "0", 4), PrefixTooShort);
}

TEST(Family, Examples) {
  EpsilonPlan p = plan();
  KStar two{true, 2};
  EXPECT_TRUE(family_membership(p, 0, two, {0, 16}, {{50}, 3, SetDescriptor::Tail::Empty, 0}));
  EXPECT_TRUE(family_membership(p, 0, two, {0, 16}, {{1, 2, 20, 50}, 2, SetDescriptor::Tail::Empty, 0}));
  EXPECT_FALSE(family_membership(p, 0, two, {0, 16}, {{50, 120}, 3, SetDescriptor::Tail::Empty, 0}));
  EXPECT_FALSE(family_membership(p, 0, two, {0, 16}, {{50}, 3, SetDescriptor::Tail::FirstPoints, 1}));
  EXPECT_FALSE(family_membership(p, 0, two, {0, 16}, {{50, 51}, 2, SetDescriptor::Tail::Empty, 0}));
  EXPECT_THROW(family_membership(p, 0, two, {0, 16}, {{3}, 1, SetDescriptor::Tail::Empty, 0}), HorizonTooShort);

  KStar omega{false, 4};
  std::vector<Natural> xs{0, 16, 48, 112};
  FiniteSet two_each;
  for (Natural k = 0; k < 3; ++k) two_each.insert({p.block_start(0, k), p.block_start(0, k) + 1});
  EXPECT_FALSE(family_membership(p, 0, omega, xs, {two_each, 2, SetDescriptor::Tail::FirstPoints, 2}));
  FiniteSet good{3, 7, 20};
  for (Natural v = 49; v < 112; ++v) good.insert(v);
  EXPECT_TRUE(family_membership(p, 0, omega, xs, {good, 2, SetDescriptor::Tail::AllButX, 0}));
  EXPECT_FALSE(family_membership(p, 0, omega, xs, {good, 2, SetDescriptor::Tail::Empty, 0}));
  good.insert(48);
  EXPECT_FALSE(family_membership(p, 0, omega, xs, {good, 2, SetDescriptor::Tail::AllButX, 0}));
  EXPECT_THROW(family_membership(p, 0, omega, xs, {{}, 4, SetDescriptor::Tail::AllButX, 0}), HorizonTooShort);
}

TEST(Family, ColumnsOfPAreMembers) {
  std::mt19937_64 rng(40);
  const ConstructionState& om = omega_run();
  std::string x = sample_in_p(om, rng, 14);
  for (Natural k = 0; k <= 3; ++k) {
    FiniteSet a = column_content(om, {k, om.plan.block_start(0, k) + 1, {}}, x, 4);
    EXPECT_TRUE(family_membership(om, {a, 4, SetDescriptor::Tail::AllButX, 0})) << k;
  }
  ConstructionState fin = run("first-point", 100);
  std::string y = sample_in_p(fin, rng, 12);
  for (Natural v : {Natural{0}, Natural{9}, Natural{20}}) {
    FiniteSet a = column_content(fin, {v < 16 ? 0u : 1u, v, {}}, y, 3);
    EXPECT_TRUE(family_membership(fin, {a, 3, SetDescriptor::Tail::Empty, 0})) << v;
  }
}

TEST(GenericGame, BothClausesAndRefusal) {
  const ConstructionState& om = omega_run();
  GameReport g = generic_game(om, cooperative_strategy(), 4);
  EXPECT_EQ(g.clause, GameClause::Omega) << g.evidence;
  EXPECT_GE(g.hits.size(), 3u);
  std::set<Natural> ks;
  for (auto [k, x] : g.hits) ks.insert(k);
  EXPECT_EQ(ks.size(), g.hits.size());
  EXPECT_EQ(generic_game(om, refusing_strategy(), 4).clause, GameClause::Inconclusive);

  ConstructionState fin = run("first-point", 100);
  GameReport f = generic_game(fin, cooperative_strategy(), 3);
  EXPECT_EQ(f.clause, GameClause::Finite) << f.evidence;
  EXPECT_TRUE(f.g.starts_with(tau("", 1)));
  EXPECT_EQ(generic_game(fin, refusing_strategy(), 3).clause, GameClause::Inconclusive);

  // only x_0 ever shows up within the bounds, and k* is not certified
  ConstructionState far = run("far-bit", 300);
  EXPECT_FALSE(far.kstar().certified);
  EXPECT_EQ(far.levels[1].certificate, Certificate::Refuted);
  EXPECT_EQ(generic_game(far, cooperative_strategy(), 4).clause, GameClause::Inconclusive);
}

#include <gtest/gtest.h>

#include <random>

#include "spectra/machines.hpp"

using namespace spectra;

namespace {

const char* kNothing = "HALT";
const char* kCounter = "OUT r1; INC r1; JMP 0";
const char* kEchoOracle = R"(
  SET r1 0
  ORACLE r2 r1   # 1
  JZ r2 4
  OUT r1
  INC r1         # 4
  JMP 1
)";

// Reference semantics for kCounter: one OUT every 3 steps.
FiniteSet counter_oracle_free(Natural stage) {
  FiniteSet s;
  for (Natural k = 0; 3 * k + 1 <= stage; ++k) s.insert(k);
  return s;
}

std::shared_ptr<const Suite> small_suite() {
  return std::make_shared<Suite>(std::vector<NamedProgram>{
      {"count-down-then-loop", parse_program("SET r1 3; DEC r1; JZ r1 4; JMP 1; JMP 4")},
      {"echo-input", parse_program("ORACLE r1 r0; JZ r1 3; OUT r0; HALT")},
      {"ask-next", parse_program("INC r0; ORACLE r1 r0; JZ r1 4; HALT; JMP 4")},
      {"slow-halt", parse_program("SET r1 5; DEC r1; JZ r1 4; JMP 1; HALT")},
      {"ask-own-input", parse_program("ORACLE r1 r0; JZ r1 3; HALT; JMP 3")},
  });
}

Program random_program(std::mt19937_64& rng, int len) {
  Program p;
  std::uniform_int_distribution<Natural> code(0, kInstructionCodes - 1);
  for (int i = 0; i < len; ++i) {
    Instruction ins = decode_instruction(code(rng));
    ins.arg %= static_cast<Natural>(len + 1);
    p.code.push_back(ins);
  }
  return p;
}

}  // namespace

TEST(Coding, CanonicalFiniteSets) {
  EXPECT_EQ(canonical_finite_set(0), FiniteSet{});
  EXPECT_EQ(canonical_finite_set(5), (FiniteSet{0, 2}));
  for (Natural u = 0; u < 4096; ++u) EXPECT_EQ(canonical_index(canonical_finite_set(u)), u);
}

TEST(Coding, PairingIsABijectionOnAnInitialSegment) {
  EXPECT_EQ(unpair(pair(7, 9)), std::make_pair(Natural{7}, Natural{9}));
  // Brute force: enumerate the diagonals and compare with the closed form.
  Natural n = 0;
  for (Natural d = 0; d < 200; ++d)
    for (Natural b = 0; b <= d; ++b, ++n) {
      ASSERT_EQ(pair(d - b, b), n);
      ASSERT_EQ(unpair(n), std::make_pair(d - b, b));
    }
  EXPECT_EQ(untriple(triple(3, 1, 4)), (Triple{3, 1, 4}));
  Natural big = Natural{1} << 62;
  auto [a, b] = unpair(big);
  EXPECT_EQ(pair(a, b), big);
}

TEST(Programs, AssemblyRoundTrip) {
  Program p = parse_program(kEchoOracle);
  EXPECT_EQ(p.code.size(), 6u);
  EXPECT_EQ(parse_program(to_assembly(p)), p);
  EXPECT_THROW(parse_program("FROB r1"), ProgramParseError);
  EXPECT_THROW(parse_program("INC r7"), ProgramParseError);
  EXPECT_THROW(parse_program("JZ r1"), ProgramParseError);
}

TEST(Programs, GoedelNumberingIsTotal) {
  for (Natural e = 0; e < 5000; ++e) EXPECT_EQ(encode_program(decode_program(e)), e);
  EXPECT_TRUE(decode_program(0).code.empty());
  Program echo = parse_program(kEchoOracle);
  EXPECT_EQ(decode_program(encode_program(echo)), echo);
  EXPECT_THROW(encode_program(parse_program("SET r1 99")), std::overflow_error);
}

TEST(Programs, PaddingGivesAnotherIndexWithTheSameStagedSets) {
  std::mt19937_64 rng(7);
  SetOracle x({1, 3, 4});
  for (int trial = 0; trial < 100; ++trial) {
    Program p = random_program(rng, 1 + trial % 5);
    Natural e = encode_program(p);
    Natural e2 = pad_index(e);
    EXPECT_NE(e, e2);
    for (Natural s : {0, 1, 5, 20, 60})
      EXPECT_EQ(run_staged(e, x, s), run_staged(e2, x, s)) << to_assembly(p);
  }
}

TEST(RunStaged, Examples) {
  EXPECT_EQ(run_staged(parse_program(kNothing), empty_oracle(), 100), FiniteSet{});
  for (Natural s : {0, 1, 3, 4, 50, 301}) EXPECT_EQ(run_staged(parse_program(kCounter), empty_oracle(), s), counter_oracle_free(s));
  EXPECT_EQ(run_staged(parse_program(kEchoOracle), SetOracle({2}, Natural{100}), 1000), FiniteSet{2});
}

TEST(RunStaged, UndefinedOracleIsAnError) {
  PrefixOracle pre("0010");
  EXPECT_THROW(run_staged(parse_program(kEchoOracle), pre, 1000), OracleUndefined);
  EXPECT_EQ(run_staged(parse_program(kEchoOracle), pre, 12), FiniteSet{2});
}

TEST(RunStaged, MonotoneInStage) {
  std::mt19937_64 rng(11);
  SetOracle x({0, 2, 5, 9});
  for (int trial = 0; trial < 200; ++trial) {
    Program p = random_program(rng, 2 + trial % 6);
    Natural s = rng() % 80;
    FiniteSet a = run_staged(p, x, s), b = run_staged(p, x, s + 1);
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end())) << to_assembly(p);
  }
}

TEST(Interpreter, CycleDetectionIsSound) {
  // A cycle verdict must never be contradicted by a long plain run.
  std::mt19937_64 rng(3);
  SetOracle x({1, 2});
  for (int trial = 0; trial < 300; ++trial) {
    Program p = random_program(rng, 1 + trial % 7);
    RunResult r = run_program(p, x, {0, 2000, true});
    RunResult plain = run_program(p, x, {0, 20000, false});
    if (r.status == RunStatus::Cycled) { EXPECT_NE(plain.status, RunStatus::Halted); }
    if (r.status == RunStatus::Halted) { EXPECT_EQ(plain.steps, r.steps); }
  }
}

TEST(Hierarchy, LevelOneExamples) {
  auto suite = small_suite();
  Hierarchy h(suite, std::make_shared<SetOracle>(FiniteSet{}));
  Natural halt = Suite::kHaltId, loop = Suite::kLoopId, slow = suite->id_of("slow-halt");
  for (Natural s = 0; s < 40; ++s) {
    JumpSnapshot snap = jump_snapshot(h, 1, s, suite->size());
    EXPECT_FALSE(snap.approximation.count(loop));
    EXPECT_EQ(snap.approximation.count(halt), s >= 1 ? 1u : 0u);
    EXPECT_TRUE(snap.certified_from.has_value());
  }
  Decision d = h.decide(1, slow);
  ASSERT_EQ(d.verdict, Verdict::In);
  EXPECT_TRUE(jump_snapshot(h, 1, d.steps, suite->size()).approximation.count(slow));
  EXPECT_FALSE(jump_snapshot(h, 1, d.steps - 1, suite->size()).approximation.count(slow));
}

TEST(Hierarchy, LevelZeroIsTheOracle) {
  auto suite = small_suite();
  Hierarchy h(suite, std::make_shared<SetOracle>(FiniteSet{1, 4}));
  EXPECT_EQ(jump_snapshot(h, 0, 0, 8).approximation, (FiniteSet{1, 4}));
}

TEST(Hierarchy, LevelBoundIsEnforced) {
  Hierarchy h(small_suite(), std::make_shared<SetOracle>(FiniteSet{}), 512, 3);
  EXPECT_THROW(jump_snapshot(h, 4, 0, 4), std::out_of_range);
}

TEST(Hierarchy, SnapshotsAgreeWithDirectSimulation) {
  // n is in Z_(k) iff the program halts on n when every oracle question is
  // answered by membership in Z_(k-1), computed level by level.
  auto suite = small_suite();
  for (FiniteSet z : {FiniteSet{}, FiniteSet{3, 6, 9}, FiniteSet{0, 1, 2, 3, 4, 5}}) {
    Hierarchy h(suite, std::make_shared<SetOracle>(z));
    const Natural universe = 3 * suite->size();
    FiniteSet below = z;
    for (int level = 1; level <= 3; ++level) {
      SetOracle exact(below, universe, std::nullopt);
      FiniteSet here;
      for (Natural n = 0; n < universe; ++n) {
        RunResult r = run_program(suite->program(n), exact, {n, 100000, false});
        if (r.status == RunStatus::Halted) here.insert(n);
      }
      JumpSnapshot snap = jump_snapshot(h, level, 100000, universe);
      ASSERT_TRUE(snap.exact());
      EXPECT_EQ(snap.approximation, here) << "level " << level;
      below = here;
    }
  }
}

TEST(Hierarchy, SnapshotsAreMonotoneInStage) {
  auto suite = small_suite();
  Hierarchy h(suite, std::make_shared<SetOracle>(FiniteSet{2}));
  for (int level = 1; level <= 3; ++level) {
    FiniteSet prev;
    for (Natural s = 0; s < 60; ++s) {
      FiniteSet cur = jump_snapshot(h, level, s, 2 * suite->size()).approximation;
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST(SigmaEval, Examples) {
  // Program 2 enumerates {3}; program 3 enumerates pair(2, 1) = 7, so its
  // level-2 set is the complement of {3}.
  Suite patched({{"enum-3", parse_program("SET r1 3; OUT r1; HALT")},
                 {"complement", parse_program("SET r1 7; OUT r1; HALT")},
                 {"forever", parse_program("OUT r1; INC r1; JMP 0")}});
  Natural enum3 = patched.id_of("enum-3");
  ASSERT_EQ(pair(enum3, 1), 7u);
  Hierarchy h(std::make_shared<Suite>(patched), std::make_shared<SetOracle>(FiniteSet{}));
  EXPECT_EQ(sigma_eval(h, {1, Suite::kHaltId}, 17, 100), Verdict::Out);
  EXPECT_EQ(sigma_eval(h, {1, enum3}, 3, 100), Verdict::In);
  Natural comp = patched.id_of("complement");
  EXPECT_EQ(sigma_eval(h, {2, comp}, 3, 100), Verdict::Out);
  EXPECT_EQ(sigma_eval(h, {2, comp}, 4, 100), Verdict::In);
  EXPECT_EQ(sigma_eval(h, {1, patched.id_of("forever")}, 1u << 20, 100), Verdict::Unknown);
  EXPECT_THROW(sigma_eval(h, {0, comp}, 1, 100), std::invalid_argument);
}

TEST(Suite, NamesArePeriodic) {
  auto suite = small_suite();
  for (Natural id = 0; id < suite->size(); ++id)
    for (Natural at : {0, 3, 17, 100}) {
      Natural n = suite->padded(id, at);
      EXPECT_GE(n, at);
      EXPECT_LT(n, at + suite->size());
      EXPECT_EQ(n % suite->size(), id);
    }
}

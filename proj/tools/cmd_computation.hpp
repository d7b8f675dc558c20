// Commands that run stage machines: Wehner columns, theta, linear orders, the
// measure construction, and the acceptance checks.
#pragma once

#include <random>

#include "cmd_structures.hpp"
#include "spectra/acceptance.hpp"
#include "spectra/linorders.hpp"
#include "spectra/randomness.hpp"

namespace cli {

// ---------------------------------------------------------------------------
// wehner

inline spectra::WehnerBounds parse_bounds(const std::string& text) {
  std::vector<Natural> v;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      v.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("bounds are e,u or e,u,s0");
    }
  }
  if (v.size() < 2 || v.size() > 3 || v[0] == 0 || v[1] == 0) throw UsageError("bounds are e,u or e,u,s0, positive");
  spectra::WehnerBounds b{v[0], v[1]};
  if (v.size() == 3) b.s0_bound = v[2];
  return b;
}

inline int wehner_run(const Config& c, const std::string& bounds, const std::string& y_choice) {
  Manifest m = load_manifest(c.suite, "wehner-demo");
  spectra::WehnerBounds b = parse_bounds(bounds);
  Natural stages = c.stages_or(500);
  auto x = m.oracle();
  spectra::StagedEnumerations w(m.suite, x, b.e_bound, stages);
  auto h = std::make_shared<spectra::Hierarchy>(m.suite, x, m.budget, m.max_level);
  spectra::FunctionOracle jump(
      [h](Natural n) -> std::optional<bool> {
        spectra::Decision d = h->decide(1, n);
        if (d.verdict == spectra::Verdict::Unknown) return std::nullopt;
        return d.verdict == spectra::Verdict::In;
      },
      "Y=X'");
  if (y_choice != "jump" && y_choice != "x") throw UsageError("--y is jump or x");
  const spectra::Oracle& y = y_choice == "jump" ? static_cast<const spectra::Oracle&>(jump) : *x;
  spectra::VColumns v = spectra::v_run(y, w, b, stages);
  spectra::AuditReport a = spectra::v_column_audit(v, spectra::wehner_family(w, stages - 1, b), w);

  json r = report("wehner run");
  r["suite"] = m.name;
  r["x"] = x->id();
  r["y"] = y.id();
  r["stages"] = stages;
  r["bounds"] = {{"e", b.e_bound}, {"u", b.u_bound}, {"s0", b.s0_bound}};
  json disc = json::array();
  for (const auto& d : a.discrepancies) disc.push_back({{"kind", d.kind}, {"e", d.e}, {"f", set_json(d.f)}});
  r["audit"] = {{"confirmed_members", a.confirmed_members},
                {"settled_columns", a.settled_columns},
                {"unsettled_columns", a.unsettled_columns},
                {"discrepancies", disc}};
  std::size_t most = 0, growing = 0;
  for (Natural i = 0; i < v.columns.size(); ++i) {
    std::size_t n = spectra::growth_stages(v, i).size();
    most = std::max(most, n);
    growing += n > 0;
  }
  r["growth"] = {{"events", v.log.size()}, {"growing_columns", growing}, {"most_growth_stages", most}};
  if (y_choice == "jump") r["pass"] = a.discrepancies.empty();
  return emit(r, c.fmt());
}

// ---------------------------------------------------------------------------
// pair

inline void check_pair_level(const spectra::Hierarchy& h, int alpha) {
  if (alpha < 1 || 2 * alpha + 1 > h.max_level())
    throw UsageError("pairs at level " + std::to_string(alpha) + " need jump level " + std::to_string(2 * alpha + 1) +
                     ", the manifest stops at " + std::to_string(h.max_level()));
}

inline spectra::ReductionTables reductions(const spectra::Hierarchy& h, int alpha, Natural count,
                                           std::vector<int>* truth = nullptr) {
  spectra::ReductionTables red;
  for (Natural n = 0; n < count; ++n) {
    spectra::Decision d = h.decide(alpha, n);
    if (d.verdict == spectra::Verdict::Unknown)
      throw UsageError("membership of " + std::to_string(n) + " at level " + std::to_string(alpha) + " is not certified");
    bool in = d.verdict == spectra::Verdict::In;
    if (truth) truth->push_back(in);
    red.g.push_back(in ? spectra::Suite::kHaltId : spectra::Suite::kLoopId);
    red.h.push_back(in ? spectra::Suite::kLoopId : spectra::Suite::kHaltId);
  }
  return red;
}

inline int pair_theta(const Config& c, int alpha, std::optional<Natural> index, std::optional<int> bit, bool starved) {
  if (index.has_value() == bit.has_value()) throw UsageError("give exactly one of --index and --bit");
  Manifest m = load_manifest(c.suite, "pairs-demo");
  spectra::Hierarchy h = m.hierarchy();
  check_pair_level(h, alpha);
  auto snaps = starved ? spectra::starved_snapshots(2 * alpha) : spectra::certified_snapshots(2 * alpha);
  json r = report("pair theta");
  r["suite"] = m.name;
  r["level"] = alpha;
  r["snapshots"] = starved ? "starved" : "certified";
  std::optional<int> expected;
  spectra::TreePair p = [&] {
    if (index) {
      std::vector<int> truth;
      spectra::ReductionTables red = reductions(h, alpha, *index + 1, &truth);
      expected = truth.back();
      return spectra::hardness_pair(h, alpha, *index, red);
    }
    if (*bit != 0 && *bit != 1) throw UsageError("--bit is 0 or 1");
    expected = *bit;
    return spectra::tree_pair(spectra::Ordinal::finite(static_cast<std::uint64_t>(alpha)), *bit);
  }();
  spectra::ThetaResult t = spectra::theta(p, alpha, snaps, c.stages_or(starved ? 8 : 40));
  r["pair"] = p.tag;
  r["value"] = t.value ? json(*t.value) : json(nullptr);
  r["stage"] = t.stage;
  r["expected"] = *expected;
  r["pass"] = t.value ? *t.value == *expected : starved;
  return emit(r, c.fmt());
}

inline int pair_hardness(const Config& c, int alpha, Natural count) {
  Manifest m = load_manifest(c.suite, "pairs-demo");
  spectra::Hierarchy h = m.hierarchy();
  check_pair_level(h, alpha);
  std::vector<int> truth;
  spectra::ReductionTables red = reductions(h, alpha, count, &truth);
  json rows = json::array();
  for (Natural n = 0; n < count; ++n) {
    spectra::TreePair p = spectra::hardness_pair(h, alpha, n, red);
    rows.push_back({{"n", n},
                    {"in_set", truth[n] == 1},
                    {"g", red.g[n]},
                    {"h", red.h[n]},
                    {"pair", p.tag},
                    {"left_rank", p.left.rank()->to_string()},
                    {"right_rank", p.right.rank()->to_string()}});
  }
  json r = report("pair hardness");
  r["suite"] = m.name;
  r["level"] = alpha;
  r["reductions"] = rows;
  return emit(r, c.fmt());
}

// ---------------------------------------------------------------------------
// linord

inline spectra::TermPtr order_term(const std::string& text) {
  try {
    return spectra::parse_term(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline int linord_sample(const Config& c, const std::string& term, std::size_t count) {
  spectra::TermPtr t = order_term(term);
  std::mt19937_64 rng(c.seed);
  std::vector<spectra::Elem> xs;
  for (std::size_t i = 0; i < count; ++i) xs.push_back(spectra::sample(t, rng));
  std::vector<spectra::Elem> sorted = xs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const spectra::Elem& a, const spectra::Elem& b) { return spectra::less(t, a, b); });
  json r = report("linord sample");
  r["term"] = spectra::to_string(t);
  r["seed"] = c.seed;
  json a = json::array(), s = json::array();
  for (const auto& x : xs) a.push_back(spectra::to_string(t, x));
  for (const auto& x : sorted) s.push_back(spectra::to_string(t, x));
  r["samples"] = a;
  r["sorted"] = s;
  return emit(r, c.fmt());
}

inline int linord_density(const Config& c, const std::string& term, std::size_t pairs) {
  spectra::TermPtr l = order_term(term);
  spectra::TermPtr p = spectra::lo::power(l);
  std::mt19937_64 rng(c.seed);
  std::size_t found = 0, failed = 0, tries = 0;
  std::string first;
  while (found + failed < pairs && tries++ < 100 * pairs) {
    spectra::Elem f = spectra::sample(p, rng), g = spectra::sample(p, rng);
    auto cmp = spectra::compare_power(l, f, g);
    if (cmp == 0) continue;
    if (cmp > 0) std::swap(f, g);
    try {
      spectra::Elem h = spectra::density_witness(l, f, g);
      if (spectra::compare_power(l, f, h) < 0 && spectra::compare_power(l, h, g) < 0) {
        ++found;
        continue;
      }
    } catch (const std::invalid_argument&) {
    }
    if (failed++ == 0) first = spectra::to_string(p, f) + " < " + spectra::to_string(p, g);
  }
  json r = report("linord check-density");
  r["term"] = spectra::to_string(p);
  r["seed"] = c.seed;
  r["pairs"] = found + failed;
  r["witnessed"] = found;
  if (failed) r["first_failure"] = first;
  r["pass"] = failed == 0 && found == pairs;
  return emit(r, c.fmt());
}

inline int linord_power(const Config& c, const std::string& left, const std::string& right, std::size_t elements) {
  spectra::PowerRuleReport pr = spectra::power_rule_check(order_term(left), order_term(right), elements, c.seed);
  json r = report("linord check-power");
  r["left"] = left;
  r["right"] = right;
  r["seed"] = c.seed;
  r["elements"] = pr.elements;
  r["pairs_checked"] = pr.pairs_checked;
  if (!pr.pass) r["first_failure"] = pr.first_failure;
  r["pass"] = pr.pass;
  return emit(r, c.fmt());
}

// ---------------------------------------------------------------------------
// random

struct RandomPlan {
  spectra::PlanParams params;
  spectra::SearchBounds bounds;
  std::vector<std::string> instances;
};

inline RandomPlan load_plan(const std::string& spec) {
  RandomPlan p;
  for (const auto& inst : spectra::random_demo_instances()) p.instances.push_back(inst.name);
  if (spec == "default") return p;
  std::ifstream in(spec);
  if (!in) throw UsageError("cannot read plan '" + spec + "'");
  try {
    json j = json::parse(in);
    if (j.value("schema", kSchemaVersion) != kSchemaVersion) throw UsageError(spec + ": unsupported schema");
    p.params.epsilon_offset = j.value("epsilon_offset", p.params.epsilon_offset);
    p.params.delta_offset = j.value("delta_offset", p.params.delta_offset);
    if (j.contains("search")) {
      const json& s = j["search"];
      p.bounds.max_steps = s.value("max_steps", p.bounds.max_steps);
      p.bounds.max_extension = s.value("max_extension", p.bounds.max_extension);
      p.bounds.certify_nodes = s.value("certify_nodes", p.bounds.certify_nodes);
    }
    if (j.contains("instances")) p.instances = j["instances"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw UsageError(spec + ": malformed plan: " + e.what());
  }
  return p;
}

inline json levels_json(const spectra::ConstructionState& st) {
  json out = json::array();
  for (const auto& l : st.levels) {
    json e{{"k", l.k}, {"opened", l.opened}};
    if (l.found()) {
      e["x"] = l.x();
      e["rho"] = l.search->rho;
      e["observed"] = *l.observed;
    } else if (l.certify_tried) {
      e["certificate"] = spectra::to_string(l.certificate);
    }
    out.push_back(e);
  }
  return out;
}

inline std::string sample_outside(const spectra::Clopen& removed, std::mt19937_64& rng, std::size_t len) {
  while (true) {
    std::string x;
    for (std::size_t i = 0; i < len; ++i) x += (rng() & 1) ? '1' : '0';
    if (!removed.contains(x)) return x;
  }
}

inline int random_run(const Config& c, const std::string& plan_spec, const std::string& only, bool claims) {
  RandomPlan plan = load_plan(plan_spec);
  if (!only.empty()) plan.instances = {only};
  Natural stages = c.stages_or(50);
  std::mt19937_64 rng(c.seed);
  bool all_pass = true;
  json runs = json::array();
  for (const auto& name : plan.instances) {
    spectra::RandomInstance inst;
    try {
      inst = spectra::random_demo_instance(name);
    } catch (const std::exception&) {
      throw UsageError("no demo instance named '" + name + "'");
    }
    spectra::ConstructionState st(spectra::plan(plan.params), inst, plan.bounds);
    bool ledger = true;
    for (Natural s = 0; s < stages; ++s) {
      st = spectra::lambda_step(std::move(st), s);
      if (claims) {
        spectra::Pi01Report p = spectra::pi01_class(st);
        ledger = ledger && p.ledger_exact && p.above_bound;
      }
    }
    spectra::Pi01Report p = spectra::pi01_class(st);
    json run{{"instance", name}, {"code", inst.code}, {"sigma", inst.sigma}, {"stages", stages},
             {"kstar", st.kstar().to_string()}, {"levels", levels_json(st)}};
    run["measure"] = p.measure.to_string();
    run["removed_delta"] = p.removed_delta.to_string();
    run["epsilon"] = p.epsilon.to_string();
    run["ledger_exact"] = p.ledger_exact;
    run["above_bound"] = p.above_bound;
    if (claims) {
      spectra::ShapeClause want = st.kstar().certified ? spectra::ShapeClause::Finite : spectra::ShapeClause::Omega;
      json cols = json::array();
      bool shapes = true;
      for (int i = 0; i < 2; ++i) {
        std::string x = sample_outside(st.removed(), rng, 16);
        spectra::ColumnReport rep = spectra::verify_columns(st, x, 4, 2, c.seed + static_cast<std::uint64_t>(i));
        shapes = shapes && rep.mismatches.empty() && rep.clause == want;
        cols.push_back({{"x", x}, {"clause", spectra::to_string(rep.clause)}, {"columns", rep.columns},
                        {"mismatches", rep.mismatches.size()}});
      }
      spectra::GameReport g = spectra::generic_game(st, spectra::cooperative_strategy(), 4);
      bool game = g.clause == spectra::GameClause::Inconclusive ||
                  (g.clause == spectra::GameClause::Finite) == st.kstar().certified;
      run["claims"] = {{"ledger_every_stage", ledger},
                       {"columns", cols},
                       {"game", {{"clause", spectra::to_string(g.clause)}, {"evidence", g.evidence}}},
                       {"pass", ledger && shapes && game}};
      all_pass = all_pass && ledger && shapes && game;
    }
    runs.push_back(run);
  }
  json r = report("random run");
  r["plan"] = {{"epsilon_offset", plan.params.epsilon_offset}, {"delta_offset", plan.params.delta_offset}};
  r["runs"] = runs;
  if (claims) r["pass"] = all_pass;
  return emit(r, c.fmt());
}

// ---------------------------------------------------------------------------
// check

inline int check_cmd(const Config& c, const std::string& criterion, bool timing) {
  namespace acc = spectra::acceptance;
  std::vector<int> ids;
  if (criterion == "all") {
    for (const auto& e : acc::checks()) ids.push_back(e.id);
  } else {
    try {
      ids.push_back(std::stoi(criterion));
    } catch (const std::exception&) {
      throw UsageError("--criterion is a number or 'all'");
    }
  }
  json r = report("check");
  json results = json::array();
  bool all = true;
  for (int id : ids) {
    acc::CheckResult res;
    try {
      res = acc::run_check(id);
    } catch (const std::out_of_range& e) {
      throw UsageError(e.what());
    }
    json e{{"id", res.id}, {"name", res.name}, {"pass", res.pass}, {"detail", res.detail}};
    if (timing) e["seconds"] = res.seconds;
    results.push_back(e);
    all = all && res.pass;
  }
  r["results"] = results;
  r["pass"] = all;
  if (c.fmt() == Format::Text) {
    for (const auto& e : results) {
      std::cout << (e["pass"].get<bool>() ? "PASS" : "FAIL") << " [" << e["id"].get<int>() << "] "
                << e["name"].get<std::string>() << " (" << e["detail"].get<std::string>() << ")";
      if (timing) std::cout << " " << e["seconds"].get<double>() << " s";
      std::cout << "\n";
    }
    return all ? 0 : 1;
  }
  return emit(r, c.fmt());
}

}  // namespace cli

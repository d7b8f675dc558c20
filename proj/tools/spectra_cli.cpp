// spectra: command-line front end.  Run `spectra --help` for the commands.
#include <iostream>

#include "CLI11.hpp"
#include "cmd_computation.hpp"

int main(int argc, char** argv) {
  using namespace cli;
  Config cfg;
  CLI::App app{"Workbench for fat trees, flower graphs, jump inversion, linear orders and the measure construction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", cfg.format, "Output format: json, text or dot")
      ->check(CLI::IsMember({"json", "text", "dot"}));
  app.add_option("--suite", cfg.suite, "Suite manifest: a JSON path or a built-in name (pairs-demo, wehner-demo)");
  app.add_option("--stages", cfg.stages, "Stage budget")->check(CLI::PositiveNumber);
  app.add_option("--width", cfg.width, "Truncation width")->check(CLI::PositiveNumber);
  app.add_option("--depth", cfg.depth, "Expansion depth")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Random seed");

  std::function<int()> action;

  // tree
  auto* tree = app.add_subcommand("tree", "Symbolic trees")->require_subcommand(1);
  std::string term, left, right;
  auto* tree_rank_cmd = tree->add_subcommand("rank", "Symbolic rank and the rank of a truncation");
  tree_rank_cmd->add_option("--term", term, "Tree term, e.g. \"fat(S(3))\"")->required();
  tree_rank_cmd->callback([&] { action = [&] { return tree_rank(cfg, term); }; });
  auto* tree_iso_cmd = tree->add_subcommand("iso", "Bounded back-and-forth between two trees");
  tree_iso_cmd->add_option("--left", left)->required();
  tree_iso_cmd->add_option("--right", right)->required();
  tree_iso_cmd->callback([&] { action = [&] { return tree_iso(cfg, left, right); }; });

  // graph
  auto* graph = app.add_subcommand("graph", "Flower-graph coding")->require_subcommand(1);
  std::string family;
  auto* roundtrip = graph->add_subcommand("roundtrip", "Encode a family of finite sets and decode it again");
  roundtrip->add_option("--family", family, "Sets separated by ';', e.g. \"{1,4};{0}\"")->required();
  roundtrip->callback([&] { action = [&] { return graph_roundtrip(cfg, family); }; });

  // wehner
  auto* wehner = app.add_subcommand("wehner", "Wehner column operator")->require_subcommand(1);
  std::string bounds = "6,16,24", y_choice = "jump";
  auto* wrun = wehner->add_subcommand("run", "Run the columns and audit them against the family");
  wrun->add_option("--bounds", bounds, "e,u[,s0] bounds")->capture_default_str();
  wrun->add_option("--y", y_choice, "Y: jump (X') or x (Y = X)")->capture_default_str();
  wrun->callback([&] { action = [&] { return wehner_run(cfg, bounds, y_choice); }; });

  // pair
  auto* pair = app.add_subcommand("pair", "Tree pairs and theta")->require_subcommand(1);
  int alpha = 1;
  std::optional<Natural> index;
  std::optional<int> bit;
  bool starved = false;
  Natural count = 8;
  auto* theta = pair->add_subcommand("theta", "Run theta on a standard pair or a hardness pair");
  theta->add_option("--level", alpha, "alpha")->capture_default_str();
  theta->add_option("--index", index, "Hardness pair N_n");
  theta->add_option("--bit", bit, "Standard pair S(alpha, bit)");
  theta->add_flag("--starved", starved, "Withhold snapshot certificates");
  theta->callback([&] { action = [&] { return pair_theta(cfg, alpha, index, bit, starved); }; });
  auto* hardness = pair->add_subcommand("hardness", "Reduction tables and hardness pairs");
  hardness->add_option("--level", alpha, "alpha")->capture_default_str();
  hardness->add_option("--count", count, "Indices 0..count-1")->capture_default_str()->check(CLI::PositiveNumber);
  hardness->callback([&] { action = [&] { return pair_hardness(cfg, alpha, count); }; });

  // invert / recover / assemble
  std::string graph_text, level = "1", components;
  std::size_t markers = 1;
  auto* invert = app.add_subcommand("invert", "Jump-invert a graph");
  invert->add_option("--graph", graph_text, "n:a-b,c-d")->required();
  invert->add_option("--level", level, "An ordinal or 'marker'")->capture_default_str();
  invert->callback([&] { action = [&] { return invert_cmd(cfg, graph_text, level); }; });
  auto* recover = app.add_subcommand("recover", "Invert a graph and recover it through theta");
  recover->add_option("--graph", graph_text, "n:a-b,c-d")->required();
  recover->add_option("--level", level, "A finite level")->capture_default_str();
  recover->add_flag("--starved", starved, "Withhold snapshot certificates");
  recover->callback([&] { action = [&] { return recover_cmd(cfg, graph_text, level, starved); }; });
  auto* assemble = app.add_subcommand("assemble", "Disjoint union of inverted structures and marker copies");
  assemble->add_option("--components", components, "level=graph items separated by ';'")->required();
  assemble->add_option("--markers", markers, "Marker copies")->capture_default_str();
  assemble->callback([&] { action = [&] { return assemble_cmd(cfg, components, markers); }; });

  // linord
  auto* linord = app.add_subcommand("linord", "Linear-order terms")->require_subcommand(1);
  std::string sample_term = "pow(w*)", density_term = "w*", power_left = "chain(1)", power_right = "w*";
  std::size_t samples = 20, pairs = 500, elements = 200;
  auto* sample = linord->add_subcommand("sample", "Sample elements of a term");
  sample->add_option("--term", sample_term)->capture_default_str();
  sample->add_option("--count", samples)->capture_default_str()->check(CLI::PositiveNumber);
  sample->callback([&] { action = [&] { return linord_sample(cfg, sample_term, samples); }; });
  auto* density = linord->add_subcommand("check-density", "Density witnesses in w^L");
  density->add_option("--term", density_term, "L")->capture_default_str();
  density->add_option("--pairs", pairs)->capture_default_str()->check(CLI::PositiveNumber);
  density->callback([&] { action = [&] { return linord_density(cfg, density_term, pairs); }; });
  auto* power = linord->add_subcommand("check-power", "The power rule w^(L+K) = w^L * w^K on a fragment");
  power->add_option("--left", power_left, "L")->capture_default_str();
  power->add_option("--right", power_right, "K")->capture_default_str();
  power->add_option("--elements", elements)->capture_default_str()->check(CLI::PositiveNumber);
  power->callback([&] { action = [&] { return linord_power(cfg, power_left, power_right, elements); }; });

  // random
  auto* random = app.add_subcommand("random", "The measure construction")->require_subcommand(1);
  std::string plan = "default", instance;
  bool claims = false;
  auto* rrun = random->add_subcommand("run", "Run the construction on the demo instances");
  rrun->add_option("--plan", plan, "'default' or a plan JSON path")->capture_default_str();
  rrun->add_option("--instance", instance, "Only this instance");
  rrun->add_flag("--claims", claims, "Check the ledger, column shapes and the generic game");
  rrun->callback([&] { action = [&] { return random_run(cfg, plan, instance, claims); }; });

  // check
  std::string criterion = "all";
  bool timing = false;
  auto* check = app.add_subcommand("check", "Acceptance checks");
  check->add_option("--criterion", criterion, "A check number or 'all'")->capture_default_str();
  check->add_flag("--timing", timing, "Include timings (reports are then not reproducible)");
  check->callback([&] { action = [&] { return check_cmd(cfg, criterion, timing); }; });

  CLI11_PARSE(app, argc, argv);
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "spectra: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spectra: error: " << e.what() << "\n";
    return 2;
  }
}

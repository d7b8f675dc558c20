// Commands over explicit structures: trees, flower graphs, inverted
// structures.
#pragma once

#include "cli_support.hpp"
#include "spectra/inversion.hpp"
#include "spectra/trees.hpp"

namespace cli {

struct Config {
  std::string format = "json";
  std::string suite;
  Natural stages = 0;  // 0: the command's own default
  std::size_t width = 0, depth = 0;
  std::uint64_t seed = 1;

  Format fmt() const { return parse_format(format); }
  Natural stages_or(Natural d) const { return stages ? stages : d; }
  std::size_t width_or(std::size_t d) const { return width ? width : d; }
  std::size_t depth_or(std::size_t d) const { return depth ? depth : d; }
};

inline spectra::SymbolicTree tree_term(const std::string& text) {
  try {
    return spectra::parse_tree_term(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline int tree_rank(const Config& c, const std::string& term) {
  spectra::SymbolicTree tree = tree_term(term);
  spectra::Truncation t{c.width_or(4), c.stages ? c.stages : spectra::Truncation{}.stage};
  json r = report("tree rank");
  r["term"] = term;
  r["width"] = t.width;
  auto rk = tree.rank();
  r["rank"] = rk ? rk->to_string() : "unknown";
  try {
    std::uint64_t brute = spectra::truncation_rank(tree, t);
    r["truncation_rank"] = brute;
    if (rk && !rk->is_infinite() && rk->ordinal().is_finite()) r["pass"] = brute == rk->ordinal().as_finite();
  } catch (const std::exception& e) {
    r["truncation_rank"] = nullptr;
    r["truncation_error"] = e.what();
  }
  std::string dot;
  if (c.fmt() == Format::Dot) {
    auto [ft, labels] = spectra::materialize(tree, t, c.depth_or(4));
    dot = spectra::to_dot(ft, labels);
  }
  return emit(r, c.fmt(), dot);
}

inline int tree_iso(const Config& c, const std::string& left, const std::string& right) {
  spectra::BoundedOptions o{c.depth_or(4), c.width_or(5)};
  json r = report("tree iso");
  r["left"] = left;
  r["right"] = right;
  r["depth"] = o.depth;
  r["width"] = o.width;
  r["verdict"] = spectra::to_string(spectra::bounded_iso(tree_term(left), tree_term(right), o));
  return emit(r, c.fmt());
}

inline json decoded_json(const spectra::DecodedFamily& d) {
  json sets = json::array();
  for (const auto& s : d.sets) sets.push_back(set_json(s));
  return {{"sets", sets}, {"isolated", d.isolated}};
}

inline int graph_roundtrip(const Config& c, const std::string& family_text) {
  std::vector<FiniteSet> family = parse_family(family_text);
  spectra::StagedColumns src{family.size(), [&family](std::size_t n, Natural) { return family[n]; }};
  spectra::StagedGraph staged = spectra::encode_enumeration(src, 0, 1);
  spectra::Graph g = staged.at(0);
  spectra::DecodedFamily got = spectra::decode(g), want = spectra::expected_family(src, 0, 1);
  bool flowers = std::all_of(family.begin(), family.end(),
                             [](const FiniteSet& f) { return spectra::decode_flower(spectra::flower(f).graph) == f; });
  json r = report("graph roundtrip");
  r["family"] = family_text;
  r["vertices"] = g.vertices;
  r["edges"] = g.edges.size();
  r["decoded"] = decoded_json(got);
  r["expected"] = decoded_json(want);
  r["flowers_round_trip"] = flowers;
  r["pass"] = flowers && got == want;
  return emit(r, c.fmt(), spectra::graph_to_dot(g, "flowers"));
}

inline spectra::LevelNotation parse_level(const std::string& text) {
  if (text == "marker") return spectra::IllFoundedMarker{};
  try {
    return spectra::parse_ordinal(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("level: ") + e.what());
  }
}

inline int finite_level(const spectra::LevelNotation& l) {
  auto o = std::get_if<spectra::Ordinal>(&l);
  if (!o || !o->is_finite() || o->as_finite() > 8) throw UsageError("recovery needs a finite level of at most 8");
  return static_cast<int>(o->as_finite());
}

inline json structure_json(const spectra::InvertedStructure& s, const spectra::Truncation& t, std::size_t depth) {
  json r;
  r["level"] = spectra::to_string(s.level());
  r["vertices"] = s.vertices();
  if (s.is_plain()) {
    json edges = json::array();
    for (auto [a, b] : s.plain_graph().edges) edges.push_back({a, b});
    r["edges"] = edges;
    return r;
  }
  json blocks = json::array();
  for (std::size_t a = 0; a < s.vertices(); ++a)
    for (std::size_t b = 0; b < s.vertices(); ++b) {
      spectra::Block blk = s.block(a, b);
      blocks.push_back({{"a", a}, {"b", b}, {"bit", blk.bit}, {"pair", blk.pair.tag}});
    }
  r["blocks"] = blocks;
  spectra::StructureSlice sl = spectra::slice(s, t, depth);
  r["slice"] = {{"width", t.width}, {"depth", depth}, {"block_elements", sl.parent.size()}};
  return r;
}

inline int invert_cmd(const Config& c, const std::string& graph, const std::string& level) {
  spectra::Graph g = parse_graph(graph);
  spectra::InvertedStructure s = spectra::invert(g, parse_level(level));
  json r = report("invert");
  r["graph"] = graph;
  r["structure"] = structure_json(s, {c.width_or(2)}, c.depth_or(2));
  return emit(r, c.fmt(), spectra::graph_to_dot(spectra::canonical_graph(g), "V"));
}

inline int recover_cmd(const Config& c, const std::string& graph, const std::string& level, bool starved) {
  spectra::Graph g = parse_graph(graph);
  spectra::LevelNotation lv = parse_level(level);
  int alpha = finite_level(lv);
  auto snaps = starved ? spectra::starved_snapshots(2 * alpha) : spectra::certified_snapshots(2 * alpha);
  spectra::RecoveredGraph rec = spectra::recover(spectra::invert(g, lv), alpha, snaps, c.stages_or(20));
  std::set<std::pair<std::size_t, std::size_t>> want;
  for (auto [a, b] : g.edges) want.insert(std::minmax(a, b));
  json r = report("recover");
  r["graph"] = graph;
  r["level"] = alpha;
  r["snapshots"] = starved ? "starved" : "certified";
  r["vertices"] = rec.vertices;
  r["edges"] = edges_json(rec.edges);
  r["unresolved"] = edges_json(rec.unresolved);
  // Unresolved pairs are reported, not failed: they mean missing certificates.
  bool agrees = std::includes(want.begin(), want.end(), rec.edges.begin(), rec.edges.end());
  for (auto e : want) agrees = agrees && (rec.edges.count(e) || rec.unresolved.count(e));
  r["complete"] = rec.complete();
  r["pass"] = rec.vertices == g.vertices && agrees;
  return emit(r, c.fmt(), spectra::graph_to_dot(rec.graph(), "recovered"));
}

/// Components as "level=graph" separated by ';', e.g. "0=3:0-1;1=2:0-1".
inline int assemble_cmd(const Config& c, const std::string& components, std::size_t markers) {
  std::vector<std::pair<int, spectra::Graph>> levels;
  std::stringstream in(components);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("component '" + item + "' is not of the form level=graph");
    levels.emplace_back(finite_level(parse_level(item.substr(0, eq))), parse_graph(item.substr(eq + 1)));
  }
  spectra::SpectrumAssembly a = spectra::assemble_spectrum(levels, markers);
  spectra::Truncation t{c.width_or(2)};
  std::size_t depth = c.depth_or(2);
  json r = report("assemble");
  json comps = json::array();
  for (const auto& comp : a.components) comps.push_back(structure_json(comp.structure, t, depth));
  r["components"] = comps;
  r["elements"] = a.equivalence(t, depth).size();
  return emit(r, c.fmt());
}

}  // namespace cli

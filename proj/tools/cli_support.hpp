// Plumbing for the command-line front end: suite manifests, graph and family
// syntax, and report output.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spectra/coding.hpp"
#include "spectra/machines.hpp"
#include "spectra/pairs.hpp"
#include "spectra/wehner.hpp"

namespace cli {

using json = nlohmann::ordered_json;
using spectra::FiniteSet;
using spectra::Graph;
using spectra::Natural;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kSuiteDirEnv = "SPECTRA_SUITE_DIR";

/// Bad user input; reported on stderr with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Suite manifests.

struct Manifest {
  std::string name;
  std::shared_ptr<const spectra::Suite> suite;
  FiniteSet base;  // the oracle X, as a finite set
  Natural budget = 4096;
  int max_level = 3;

  std::shared_ptr<const spectra::SetOracle> oracle() const {
    return std::make_shared<spectra::SetOracle>(base, std::nullopt, false, "X=" + name);
  }
  spectra::Hierarchy hierarchy() const { return spectra::Hierarchy(suite, oracle(), budget, max_level); }
};

inline Manifest builtin_manifest(const std::string& name) {
  Manifest m;
  m.name = name;
  if (name == "pairs-demo") {
    m.suite = spectra::pairs_demo_suite();
    m.base = {3, 8, 13};
  } else if (name == "wehner-demo") {
    m.suite = spectra::wehner_demo_suite();
  } else {
    throw UsageError("no built-in suite named '" + name + "'");
  }
  return m;
}

inline Manifest parse_manifest(const json& j, const std::string& where) {
  try {
    if (j.value("schema", kSchemaVersion) != kSchemaVersion)
      throw UsageError(where + ": unsupported schema " + j.at("schema").dump());
    Manifest m;
    m.name = j.value("name", std::filesystem::path(where).stem().string());
    std::vector<spectra::NamedProgram> programs;
    for (const auto& p : j.value("programs", json::array()))
      programs.push_back({p.at("name").get<std::string>(), spectra::parse_program(p.at("code").get<std::string>())});
    m.suite = std::make_shared<spectra::Suite>(std::move(programs), m.name);
    for (const auto& x : j.value("base", json::array())) m.base.insert(x.get<Natural>());
    m.budget = j.value("budget", m.budget);
    m.max_level = j.value("max_level", m.max_level);
    if (m.budget == 0) throw UsageError(where + ": budget must be positive");
    return m;
  } catch (const json::exception& e) {
    throw UsageError(where + ": malformed manifest: " + e.what());
  } catch (const spectra::ProgramParseError& e) {
    throw UsageError(where + ": " + e.what());
  }
}

/// A built-in name, a path, or a path relative to $SPECTRA_SUITE_DIR.
inline Manifest load_manifest(const std::string& spec, const std::string& fallback) {
  std::string name = spec.empty() ? fallback : spec;
  if (name == "pairs-demo" || name == "wehner-demo") return builtin_manifest(name);
  std::filesystem::path path(name);
  if (!std::filesystem::exists(path) && path.is_relative()) {
    if (const char* dir = std::getenv(kSuiteDirEnv)) path = std::filesystem::path(dir) / path;
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read suite manifest '" + name + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return parse_manifest(j, path.string());
}

// ---------------------------------------------------------------------------
// Text syntax for sets, families and graphs.

/// "{1,4}" or "1,4"; "{}" is empty.
inline FiniteSet parse_set(std::string text) {
  FiniteSet out;
  std::erase_if(text, [](char c) { return c == '{' || c == '}' || c == ' '; });
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.insert(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a natural number: '" + item + "'");
    }
  }
  return out;
}

/// Sets separated by ';', as in "{1,4};{0}".
inline std::vector<FiniteSet> parse_family(const std::string& text) {
  std::vector<FiniteSet> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) out.push_back(parse_set(item));
  if (out.empty()) throw UsageError("empty family");
  return out;
}

/// "n:a-b,c-d": n vertices and undirected edges.
inline Graph parse_graph(const std::string& text) {
  Graph g;
  auto colon = text.find(':');
  try {
    g.vertices = std::stoul(text.substr(0, colon));
  } catch (const std::exception&) {
    throw UsageError("graph needs a vertex count, as in 3:0-1,1-2");
  }
  if (colon == std::string::npos) return g;
  std::stringstream in(text.substr(colon + 1));
  std::string edge;
  while (std::getline(in, edge, ',')) {
    if (edge.empty()) continue;
    auto dash = edge.find('-');
    if (dash == std::string::npos) throw UsageError("edge '" + edge + "' is not of the form a-b");
    std::size_t a = 0, b = 0;
    try {
      a = std::stoul(edge.substr(0, dash));
      b = std::stoul(edge.substr(dash + 1));
    } catch (const std::exception&) {
      throw UsageError("edge '" + edge + "' is not of the form a-b");
    }
    if (a >= g.vertices || b >= g.vertices || a == b) throw UsageError("edge '" + edge + "' is not between two vertices");
    g.add_edge(a, b);
  }
  return g;
}

inline json set_json(const FiniteSet& s) { return json(std::vector<Natural>(s.begin(), s.end())); }

inline json edges_json(const std::set<std::pair<std::size_t, std::size_t>>& edges) {
  json out = json::array();
  for (auto [a, b] : edges) out.push_back({a, b});
  return out;
}

// ---------------------------------------------------------------------------
// Output.

enum class Format { Json, Text, Dot };

inline Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "text") return Format::Text;
  if (f == "dot") return Format::Dot;
  throw UsageError("unknown format '" + f + "' (json, text or dot)");
}

inline json report(const std::string& command) {
  json r;
  r["schema"] = kSchemaVersion;
  r["command"] = command;
  return r;
}

inline void write_text(std::ostream& out, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) write_text(out, v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const json& v) { return v.is_structured(); })) {
    for (std::size_t i = 0; i < j.size(); ++i) write_text(out, j[i], prefix + "[" + std::to_string(i) + "]");
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

/// Prints the report; `dot` is used only for the dot format.  The exit status
/// is 1 when the report carries "pass": false.
inline int emit(const json& r, Format f, const std::string& dot = "") {
  if (f == Format::Dot) {
    if (dot.empty()) throw UsageError("this command has no dot output");
    std::cout << dot;
  } else if (f == Format::Json) {
    std::cout << r.dump(2) << "\n";
  } else {
    write_text(std::cout, r, "");
  }
  return r.contains("pass") && !r["pass"].get<bool>() ? 1 : 0;
}

}  // namespace cli

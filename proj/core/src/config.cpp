#include "fracstar/config.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

#include "json.hpp"

namespace fracstar {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field, message);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> known) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : known) ok = ok || item.key() == key;
    if (!ok) {
      fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const json* value = find(obj, key);
  if (!value) {
    fail(path.empty() ? key : path + "." + key, "missing required field");
  }
  return *value;
}

double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::size_t read_size(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) {
    fail(path, "must be nonnegative");
  }
  return j.get<std::size_t>();
}

ConfigExpr read_expr(const json& j, const std::string& path,
                     const std::set<std::string>& allowed) {
  if (!j.is_string()) fail(path, "expected an expression string");
  const std::string text = j.get<std::string>();
  Expression parsed = [&]() -> Expression {
    try {
      return Expression::parse(text);
    } catch (const ExpressionError& e) {
      fail(path, e.what());
    }
  }();
  for (const std::string& name : parsed.variables()) {
    if (!allowed.count(name)) {
      std::string vars;
      for (const std::string& a : allowed) {
        if (!vars.empty()) vars += ", ";
        vars += a;
      }
      fail(path, "variable '" + name + "' is not available here (allowed: " +
                     vars + ")");
    }
  }
  return ConfigExpr{text, std::move(parsed)};
}

Table read_table(const json& j, const std::string& path) {
  if (!j.is_array()) {
    fail(path, "expected an expression string or a table of [arg, value] rows");
  }
  Table table;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const json& row = j[i];
    if (!row.is_array() || row.size() != 2) fail(row_path, "expected [arg, value]");
    const double arg = read_double(row[0], row_path);
    const double value = read_double(row[1], row_path);
    if (!std::isfinite(arg) || !std::isfinite(value)) {
      fail(row_path, "entries must be finite");
    }
    table.emplace_back(arg, value);
  }
  if (table.size() < 2) fail(path, "table needs at least two rows");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].first > table[i - 1].first)) {
      fail(path + "[" + std::to_string(i) + "]",
           "arguments must be strictly increasing");
    }
  }
  return table;
}

EdgeConfig read_edge(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"length", "nodes", "gamma"});

  EdgeConfig edge;
  edge.length = read_double(require(j, "length", path), path + ".length");
  if (!std::isfinite(edge.length) || edge.length <= 0.0) {
    fail(path + ".length", "must be positive and finite");
  }
  edge.nodes = read_size(require(j, "nodes", path), path + ".nodes");
  if (edge.nodes < 3) fail(path + ".nodes", "needs at least 3 grid points");

  const json& gamma = require(j, "gamma", path);
  if (gamma.is_string()) {
    edge.gamma = read_expr(gamma, path + ".gamma", {"x", "k"});
  } else {
    edge.gamma_table = read_table(gamma, path + ".gamma");
    for (std::size_t i = 0; i < edge.gamma_table.size(); ++i) {
      if (!(edge.gamma_table[i].second > 0.0)) {
        fail(path + ".gamma[" + std::to_string(i) + "]",
             "coefficient values must be positive");
      }
    }
  }
  return edge;
}

ordered_json table_json(const Table& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& [arg, value] : table) {
    rows.push_back(ordered_json::array({arg, value}));
  }
  return rows;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error("config: " + field + ": " + message),
      field_(std::move(field)) {}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("(document)", e.what());  // message carries the byte position
  }
  if (!doc.is_object()) fail("(document)", "expected a top-level object");
  reject_unknown_keys(doc, "",
                      {"alpha", "beta", "T", "time_steps", "edges", "sources",
                       "eta", "psi", "f_true", "sigma", "tol", "max_iter",
                       "out_dir", "levels", "seed", "snapshots"});

  Config cfg;

  cfg.alpha = read_double(require(doc, "alpha", ""), "alpha");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha", "must lie in (0, 1)");

  cfg.beta = read_double(require(doc, "beta", ""), "beta");
  if (!(cfg.beta > 0.5 && cfg.beta < 1.0)) fail("beta", "must lie in (1/2, 1)");

  cfg.T = read_double(require(doc, "T", ""), "T");
  if (!std::isfinite(cfg.T) || cfg.T <= 0.0) fail("T", "must be positive and finite");

  cfg.time_steps = read_size(require(doc, "time_steps", ""), "time_steps");
  if (cfg.time_steps < 2) fail("time_steps", "needs at least 2 steps");

  const json& edges = require(doc, "edges", "");
  if (!edges.is_array()) fail("edges", "expected an array of edge objects");
  if (edges.size() < 2) fail("edges", "a star graph needs at least two edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    cfg.edges.push_back(read_edge(edges[i], "edges[" + std::to_string(i) + "]"));
  }

  if (const json* sources = find(doc, "sources")) {
    if (!sources->is_object()) fail("sources", "expected an object");
    reject_unknown_keys(*sources, "sources", {"h", "g"});
    if (const json* h = find(*sources, "h")) {
      cfg.source_h = read_expr(*h, "sources.h", {"x", "t", "k"});
    }
    if (const json* g = find(*sources, "g")) {
      cfg.source_g = read_expr(*g, "sources.g", {"x", "t", "k"});
    }
  }

  if (const json* eta = find(doc, "eta")) {
    if (!eta->is_object()) fail("eta", "expected an object");
    reject_unknown_keys(*eta, "eta", {"b", "phi"});
    cfg.eta_b = read_double(require(*eta, "b", "eta"), "eta.b");
    if (!std::isfinite(*cfg.eta_b)) fail("eta.b", "must be finite");
    cfg.eta_phi = read_expr(require(*eta, "phi", "eta"), "eta.phi", {"x", "k"});
  }

  if (const json* psi = find(doc, "psi")) {
    if (psi->is_string()) {
      cfg.psi = read_expr(*psi, "psi", {"t"});
    } else {
      cfg.psi_table = read_table(*psi, "psi");
    }
  }

  if (const json* f_true = find(doc, "f_true")) {
    cfg.f_true = read_expr(*f_true, "f_true", {"t"});
  }

  if (const json* sigma = find(doc, "sigma")) {
    cfg.sigma = read_double(*sigma, "sigma");
    if (!std::isfinite(cfg.sigma) || cfg.sigma < 2.0) {
      fail("sigma", "must be at least 2");
    }
  }

  if (const json* tol = find(doc, "tol")) {
    cfg.tol = read_double(*tol, "tol");
    if (!std::isfinite(cfg.tol) || cfg.tol <= 0.0) {
      fail("tol", "must be positive and finite");
    }
  }

  if (const json* max_iter = find(doc, "max_iter")) {
    cfg.max_iter = read_size(*max_iter, "max_iter");
    if (cfg.max_iter < 1) fail("max_iter", "needs at least one iteration");
  }

  if (const json* out_dir = find(doc, "out_dir")) {
    if (!out_dir->is_string()) fail("out_dir", "expected a string");
    cfg.out_dir = out_dir->get<std::string>();
    if (cfg.out_dir.empty()) fail("out_dir", "must not be empty");
  }

  if (const json* levels = find(doc, "levels")) {
    if (!levels->is_array()) fail("levels", "expected an array of [N, M] pairs");
    for (std::size_t i = 0; i < levels->size(); ++i) {
      const std::string row_path = "levels[" + std::to_string(i) + "]";
      const json& row = (*levels)[i];
      if (!row.is_array() || row.size() != 2) fail(row_path, "expected [N, M]");
      const std::size_t intervals = read_size(row[0], row_path);
      const std::size_t steps = read_size(row[1], row_path);
      if (intervals < 2 || steps < 2) fail(row_path, "grid sizes must be at least 2");
      cfg.levels.emplace_back(intervals, steps);
    }
  }

  if (const json* seed = find(doc, "seed")) {
    if (!seed->is_number_integer()) fail("seed", "expected an integer");
    if (!seed->is_number_unsigned() && seed->get<std::int64_t>() < 0) {
      fail("seed", "must be nonnegative");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }

  if (const json* snapshots = find(doc, "snapshots")) {
    if (!snapshots->is_array()) fail("snapshots", "expected an array of time indices");
    for (std::size_t i = 0; i < snapshots->size(); ++i) {
      const std::string item_path = "snapshots[" + std::to_string(i) + "]";
      const std::size_t index = read_size((*snapshots)[i], item_path);
      if (index > cfg.time_steps) fail(item_path, "index exceeds time_steps");
      cfg.snapshots.push_back(index);
    }
  }

  return cfg;
}

std::string serialize_config(const Config& config) {
  ordered_json doc;
  doc["alpha"] = config.alpha;
  doc["beta"] = config.beta;
  doc["T"] = config.T;
  doc["time_steps"] = config.time_steps;

  ordered_json edges = ordered_json::array();
  for (const EdgeConfig& edge : config.edges) {
    ordered_json e;
    e["length"] = edge.length;
    e["nodes"] = edge.nodes;
    if (edge.gamma) {
      e["gamma"] = edge.gamma->text;
    } else {
      e["gamma"] = table_json(edge.gamma_table);
    }
    edges.push_back(std::move(e));
  }
  doc["edges"] = std::move(edges);

  if (config.source_h || config.source_g) {
    ordered_json sources = ordered_json::object();
    if (config.source_h) sources["h"] = config.source_h->text;
    if (config.source_g) sources["g"] = config.source_g->text;
    doc["sources"] = std::move(sources);
  }

  if (config.eta_b && config.eta_phi) {
    ordered_json eta;
    eta["b"] = *config.eta_b;
    eta["phi"] = config.eta_phi->text;
    doc["eta"] = std::move(eta);
  }

  if (config.psi) {
    doc["psi"] = config.psi->text;
  } else if (!config.psi_table.empty()) {
    doc["psi"] = table_json(config.psi_table);
  }

  if (config.f_true) doc["f_true"] = config.f_true->text;

  doc["sigma"] = config.sigma;
  doc["tol"] = config.tol;
  doc["max_iter"] = config.max_iter;
  doc["out_dir"] = config.out_dir;

  if (!config.levels.empty()) {
    ordered_json levels = ordered_json::array();
    for (const auto& [intervals, steps] : config.levels) {
      levels.push_back(ordered_json::array({intervals, steps}));
    }
    doc["levels"] = std::move(levels);
  }

  doc["seed"] = config.seed;

  if (!config.snapshots.empty()) doc["snapshots"] = config.snapshots;

  return doc.dump(2) + "\n";
}

}  // namespace fracstar

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracstar/expression.hpp"

namespace fracstar {

/// Configuration parsing or validation failure. field() is the path of the
/// offending entry, e.g. "edges[1].gamma" or "sources.h".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An expression together with its source text. Serialization writes the
/// original text back out, which keeps parse -> serialize -> parse stable.
struct ConfigExpr {
  std::string text;
  Expression parsed;

  friend bool operator==(const ConfigExpr& a, const ConfigExpr& b) {
    return a.text == b.text;
  }
};

/// Sampled function: (argument, value) pairs with strictly increasing
/// arguments, interpreted piecewise linearly.
using Table = std::vector<std::pair<double, double>>;

struct EdgeConfig {
  double length = 1.0;
  std::size_t nodes = 3;            // grid points, both endpoints included
  std::optional<ConfigExpr> gamma;  // diffusion coefficient, variables x, k
  Table gamma_table;                // used when no expression is given

  friend bool operator==(const EdgeConfig&, const EdgeConfig&) = default;
};

struct Config {
  double alpha = 0.5;
  double beta = 0.75;
  double T = 1.0;
  std::size_t time_steps = 2;
  std::vector<EdgeConfig> edges;

  std::optional<ConfigExpr> source_h;  // known interior source h(x, t, k)
  std::optional<ConfigExpr> source_g;  // factor g(x, t, k) of the unknown f
  std::optional<double> eta_b;         // vertex coefficient of eta
  std::optional<ConfigExpr> eta_phi;   // density of eta, variables x, k
  std::optional<ConfigExpr> psi;       // observation psi(t) ...
  Table psi_table;                     // ... or as a sampled table
  std::optional<ConfigExpr> f_true;    // reference source for manufactured runs

  double sigma = 2.0;  // temporal profile exponent for manufactured runs
  double tol = 1e-8;
  std::size_t max_iter = 200;
  std::string out_dir = "out";
  std::vector<std::pair<std::size_t, std::size_t>> levels;  // (N, M) pairs
  std::uint64_t seed = 1;
  std::vector<std::size_t> snapshots;  // time indices for field snapshots

  friend bool operator==(const Config&, const Config&) = default;
};

/// Parses and validates a JSON configuration document. Unknown keys are
/// rejected and all numeric ranges are checked here, so commands can assume
/// a sane Config. Throws ConfigError.
Config parse_config(const std::string& text);

/// Canonical JSON form: stable key order and shortest round-trip numbers,
/// so equal configs serialize to identical bytes and parse(serialize(c)) == c.
std::string serialize_config(const Config& config);

}  // namespace fracstar

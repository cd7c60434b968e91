#include <string>

#include "doctest.h"
#include "fracstar/config.hpp"

using fracstar::Config;
using fracstar::ConfigError;
using fracstar::parse_config;
using fracstar::serialize_config;

namespace {

const char* kMinimal = R"json({
  "alpha": 0.5,
  "beta": 0.75,
  "T": 1.0,
  "time_steps": 4,
  "edges": [
    {"length": 1.0, "nodes": 9, "gamma": "1"},
    {"length": 0.8, "nodes": 9, "gamma": "1 + 0.5*sin(pi*x)"}
  ]
})json";

std::string with(const std::string& key, const std::string& value) {
  std::string text(kMinimal);
  text.insert(text.rfind('}'), ",\n  \"" + key + "\": " + value + "\n");
  return text;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const Config cfg = parse_config(kMinimal);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.beta == 0.75);
  CHECK(cfg.edges.size() == 2);
  CHECK(cfg.edges[1].nodes == 9);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.max_iter == 200);
  CHECK(cfg.sigma == 2.0);
  CHECK(cfg.out_dir == "out");
  // gamma expression evaluates; sin(0) = 0
  CHECK(cfg.edges[1].gamma->parsed.eval({{"x", 0.0}, {"k", 1.0}}) == 1.0);
}

TEST_CASE("range violations name the offending field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("(no error)");
  };

  std::string text(kMinimal);
  auto swap = [&](const std::string& from, const std::string& to) {
    std::string t(kMinimal);
    t.replace(t.find(from), from.size(), to);
    return t;
  };

  CHECK(field_of(swap("\"alpha\": 0.5", "\"alpha\": 1.5")) == "alpha");
  CHECK(field_of(swap("\"beta\": 0.75", "\"beta\": 0.4")) == "beta");
  CHECK(field_of(swap("\"T\": 1.0", "\"T\": -2")) == "T");
  CHECK(field_of(swap("\"time_steps\": 4", "\"time_steps\": 1")) == "time_steps");
  CHECK(field_of(swap("\"nodes\": 9, \"gamma\": \"1\"",
                      "\"nodes\": 2, \"gamma\": \"1\"")) == "edges[0].nodes");
  CHECK(field_of(swap("\"length\": 0.8", "\"length\": 0")) == "edges[1].length");
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config(with("verbosity", "3")), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"alpha": 0.5})"), ConfigError);  // missing keys
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("expressions are validated against their variable sets") {
  // gamma may use x and k but not t
  std::string text(kMinimal);
  text.replace(text.find("\"1 + 0.5*sin(pi*x)\""), 20, "\"1 + t\"");
  CHECK_THROWS_AS(parse_config(text), ConfigError);
  // psi is a function of t only
  CHECK_THROWS_AS(parse_config(with("psi", "\"x + 1\"")), ConfigError);
  CHECK_NOTHROW(parse_config(with("psi", "\"t*t\"")));
}

TEST_CASE("tables are accepted where expressions are optional") {
  const Config cfg = parse_config(with("psi", "[[0, 0], [0.5, 0.2], [1, 0.4]]"));
  CHECK(cfg.psi_table.size() == 3);
  CHECK(cfg.psi_table[1].second == 0.2);
  // non-increasing arguments rejected
  CHECK_THROWS_AS(parse_config(with("psi", "[[0, 0], [0, 1]]")), ConfigError);
}

TEST_CASE("sources, eta, and manufactured knobs parse") {
  std::string text = with("sources", R"({"h": "x*t", "g": "1 + x + k"})");
  text = text.substr(0, text.rfind('}'));
  text += R"(,
  "eta": {"b": 1.0, "phi": "x - 1"},
  "f_true": "1 + t^2",
  "sigma": 2.5,
  "seed": 7,
  "snapshots": [0, 4],
  "levels": [[8, 4], [16, 8]]
})";
  const Config cfg = parse_config(text);
  CHECK(cfg.source_h.has_value());
  CHECK(cfg.source_g.has_value());
  CHECK(cfg.eta_b == 1.0);
  CHECK(cfg.f_true->parsed.eval({{"t", 2.0}}) == 5.0);
  CHECK(cfg.sigma == 2.5);
  CHECK(cfg.seed == 7);
  CHECK(cfg.snapshots == std::vector<std::size_t>{0, 4});
  CHECK(cfg.levels.size() == 2);
  CHECK(cfg.levels[1] == std::pair<std::size_t, std::size_t>{16, 8});
}

TEST_CASE("serialize then parse is the identity") {
  const Config a = parse_config(with("psi", "[[0, 0], [1, 0.4]]"));
  const std::string text = serialize_config(a);
  const Config b = parse_config(text);
  CHECK(a == b);
  CHECK(serialize_config(b) == text);  // canonical form is a fixed point
}

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "spectral_limits/config.hpp"
#include "spectral_limits/errors.hpp"

using namespace spectral_limits;

TEST(ParseKeyValues, SectionsCommentsAndTypes) {
  const auto kv = parse_key_values(R"(# leading comment
name = "circle"   # trailing comment
count = 12
ratio = -2.5e-1
flag = true
list = [1, 2.5, "x", inf]

[part]
key = false
)");
  EXPECT_EQ(std::get<std::string>(kv.at("name")), "circle");
  EXPECT_EQ(std::get<double>(kv.at("count")), 12.0);
  EXPECT_EQ(std::get<double>(kv.at("ratio")), -0.25);
  EXPECT_TRUE(std::get<bool>(kv.at("flag")));
  EXPECT_FALSE(std::get<bool>(kv.at("part.key")));
  const auto& list = std::get<std::vector<ConfigScalar>>(kv.at("list"));
  ASSERT_EQ(list.size(), 4U);
  EXPECT_EQ(std::get<std::string>(list[2]), "x");
  EXPECT_TRUE(std::isinf(std::get<double>(list[3])));
}

TEST(ParseKeyValues, RejectsMalformedLines) {
  EXPECT_THROW(parse_key_values("just words\n"), ConfigError);
  EXPECT_THROW(parse_key_values("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_key_values("a = [1, 2\n"), ConfigError);
  EXPECT_THROW(parse_key_values("a = \"open\n"), ConfigError);
}

TEST(ParseConfig, FullExample) {
  const auto cfg = parse_config(R"(
manifold = "sphere"
radius = 1.0
density = "uniform"
n = [1000, 3000]
seeds = [1, 2, 3]
graph = "gamma_m"
metric = "geodesic"
k_max = 8
reports = ["spectrum", "alignment"]
threads = 2

[alignment]
cluster = [1, 3]

[regularity]
sigma = 2.0
moser_p = [2, inf]

[distortion]
n_mc = 5000
)");
  EXPECT_EQ(cfg.manifold, "sphere");
  EXPECT_EQ(cfg.n, (std::vector<std::size_t>{1000, 3000}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(cfg.graph, GraphKind::gamma_m);
  EXPECT_EQ(cfg.metric, DistanceMetric::geodesic);
  EXPECT_EQ(cfg.k_max, 8);
  EXPECT_EQ(cfg.reports, (std::vector<Report>{Report::spectrum, Report::alignment}));
  EXPECT_EQ(cfg.threads, 2U);
  EXPECT_EQ(cfg.align_k, 1);
  EXPECT_EQ(cfg.align_l, 3);
  EXPECT_EQ(cfg.sigma, 2.0);
  ASSERT_EQ(cfg.moser_p.size(), 2U);
  EXPECT_TRUE(std::isinf(cfg.moser_p[1]));
  EXPECT_EQ(cfg.distortion_n_mc, 5000U);
  EXPECT_EQ(cfg.make_manifold().dim(), 2);
  EXPECT_NEAR(cfg.epsilon(3000), 0.2273, 1e-4);
}

TEST(ParseConfig, Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.manifold, "circle");
  EXPECT_EQ(cfg.graph, GraphKind::gamma_N);
  EXPECT_TRUE(cfg.reports.empty());
  EXPECT_EQ(cfg.moser_p.size(), 4U);
  EXPECT_EQ(cfg.make_manifold().dim(), 1);
  EXPECT_EQ(parse_config("manifold = \"spindle\"").make_manifold().dim(), 3);
}

TEST(ParseConfig, FixedEpsilon) {
  const auto cfg = parse_config("eps_rule = \"fixed\"\neps = 0.25\n");
  EXPECT_EQ(cfg.epsilon(1000), 0.25);
  EXPECT_NEAR(parse_config("eps_scale = 2.0").epsilon(4000), 0.2550345, 1e-6);
}

TEST(ParseConfig, Invariants) {
  EXPECT_THROW(parse_config("n = [15]"), ConfigError);
  EXPECT_THROW(parse_config("seeds = []"), ConfigError);
  EXPECT_THROW(parse_config("eps_rule = \"fixed\""), ConfigError);
  EXPECT_THROW(parse_config("unknown_key = 1"), ConfigError);
  EXPECT_THROW(parse_config("[regularity]\nbogus = 1"), ConfigError);
  EXPECT_THROW(parse_config("reports = [\"spectrum\", \"spectrum\"]"), ConfigError);
  EXPECT_THROW(parse_config("reports = [\"plots\"]"), ConfigError);
  EXPECT_THROW(parse_config("manifold = \"torus3\""), ConfigError);
  EXPECT_THROW(parse_config("n = \"many\""), ConfigError);
  EXPECT_THROW(parse_config("density = \"cosine_tilt\"\namplitude = 0.9"), ConfigError);
  EXPECT_THROW(parse_config("manifold = \"sphere\"\ndensity = \"cosine_tilt\"\namplitude = 0.1"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.toml"), ConfigError);
}

TEST(ParseConfig, SourceKeptForHashing) {
  const std::string text = "n = [100]\n";
  EXPECT_EQ(parse_config(text).source, text);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Report, NamesRoundTrip) {
  for (auto r : {Report::spectrum, Report::alignment, Report::regularity, Report::distortion, Report::energy,
                 Report::moser}) {
    EXPECT_EQ(report_from_string(to_string(r)), r);
  }
}

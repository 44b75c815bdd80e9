// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "phyfea/config.hpp"
#include "phyfea/gradcheck.hpp"
#include "phyfea/io.hpp"
#include "phyfea/loss.hpp"
#include "support.hpp"

using namespace phyfea;

namespace {

Tensor<double> fixture_scores(FixtureKind kind, std::size_t gap = 1) {
  FixtureSpec spec;
  spec.kind = kind;
  spec.gap = gap;
  spec.with_scores = true;
  return tensor_cast<double>(*gen_fixture(spec).scores);
}

Tensor<double> normal_scores(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<double> s(Dims{c, h, w});
  for (auto& v : s.data()) v = 2.0 * rng.normal();
  return s;
}

EngineConfig grad_config() {
  EngineConfig cfg;
  cfg.with_grad = true;
  return cfg;
}

}  // namespace

TEST_CASE("penalty arithmetic") {
  CHECK(penalty_value(1e-5, 2.0, 0.5) == doctest::Approx(1.5e-5).epsilon(1e-12));
  CHECK(penalty_value(1e-5, 0.5, 2.0) == penalty_value(1e-5, 2.0, 0.5));
  CHECK(penalty_value(0.3, 1.25, 1.25) == 0.0);
  CHECK(combine_total(1.5e-5, 0.7) == doctest::Approx(0.700015).epsilon(1e-14));
  CHECK(combine_total(0.0, 0.7) == 0.7);
  CHECK(combine_total(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(combine_total(0.1, -0.2), ContractError);
}

TEST_CASE("config validation") {
  EngineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EngineConfig{};
  set_losses(cfg, "none");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(cfg.validate(false));
  set_losses(cfg, "opening");
  CHECK(cfg.use_opening);
  CHECK_FALSE(cfg.use_dilation);
  CHECK(losses_name(cfg) == "opening");
  set_losses(cfg, "opening,dilation");
  CHECK(losses_name(cfg) == "both");
  CHECK_THROWS_AS(set_losses(cfg, "erosion"), ConfigError);
  cfg.connectivity = 6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(compute_penalty(normal_scores(3, 4, 4, 1), EngineConfig{.alpha = 2.0}),
                  ConfigError);
}

TEST_CASE("clean map has zero penalty and zero gradient") {
  const auto report = compute_penalty(fixture_scores(FixtureKind::clean), grad_config());
  CHECK(report.l_opening == 0.0);
  CHECK(report.l_dilation == 0.0);
  CHECK(report.penalty == 0.0);
  REQUIRE(report.grad);
  for (auto v : report.grad->data()) CHECK(v == 0.0);
  CHECK(report.channels == 6);
  CHECK(report.iterations == 3);
}

TEST_CASE("enclosure fixture drives the opening loss") {
  const auto report = compute_penalty(fixture_scores(FixtureKind::enclosure), grad_config());
  CHECK(report.l_opening > 0.0);
  CHECK(report.penalty ==
        doctest::Approx(1e-5 * std::abs(report.l_opening - report.l_dilation)).epsilon(1e-9));
  double mass = 0;
  for (const auto& [pair, m] : report.opening_mass) mass += m;
  CHECK(mass == doctest::Approx(report.l_opening).epsilon(1e-9));
}

TEST_CASE("ablation toggles drop the disabled term") {
  const auto scores = fixture_scores(FixtureKind::broken_bar);
  EngineConfig both;
  const auto full = compute_penalty(scores, both);

  EngineConfig open_only;
  set_losses(open_only, "opening");
  const auto o = compute_penalty(scores, open_only);
  CHECK(o.l_dilation == 0.0);
  CHECK(o.dilation_mass.empty());
  CHECK(o.l_opening == full.l_opening);
  CHECK(o.penalty == doctest::Approx(1e-5 * o.l_opening).epsilon(1e-12));

  EngineConfig dil_only;
  set_losses(dil_only, "dilation");
  const auto d = compute_penalty(scores, dil_only);
  CHECK(d.l_opening == 0.0);
  CHECK(d.opening_mass.empty());
  CHECK(d.l_dilation == full.l_dilation);
  CHECK(d.l_dilation > 0.0);
}

TEST_CASE("deduplicated evaluation agrees with the all-pairs graph") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto s = normal_scores(3 + seed % 3, 7, 8, seed);
    EngineConfig cfg = grad_config();
    const auto report = compute_penalty(s, cfg);
    Tape<double> tape;
    auto x = tape.leaf(s);
    auto p = penalty_graph(x, cfg);
    CHECK(p.value().item() == doctest::Approx(report.penalty).epsilon(1e-10));
    const auto g = tape.backward(p).wrt(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(testing::close((*report.grad)[i], g[i], 1e-9, 1e-20));
    }
  }
}

TEST_CASE("full penalty gradient matches finite differences in double") {
  EngineConfig cfg;
  cfg.alpha = 0.5;
  ScalarFn<double> f = [&](const Var<double>& x) { return penalty_graph(x, cfg); };
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GradCheckOptions opts;
    opts.probes = 16;
    opts.step = 1e-4;
    opts.seed = seed;
    const auto report = vjp_check(f, normal_scores(3, 8, 8, seed + 100), opts);
    CAPTURE(seed);
    CHECK(report.passed);
    CHECK(report.max_rel_error < 1e-6);
    checked += report.probes_used;
  }
  CHECK(checked == 80);
}

TEST_CASE("full penalty gradient in single precision") {
  EngineConfig cfg;
  cfg.alpha = 0.5;
  ScalarFn<float> f = [&](const Var<float>& x) { return penalty_graph(x, cfg); };
  ScalarFn<double> ref = [&](const Var<double>& x) { return penalty_graph(x, cfg); };
  GradCheckOptions opts;
  opts.probes = 16;
  opts.step = 1e-4;
  opts.tolerance = 1e-3;
  const auto report = vjp_check(f, tensor_cast<float>(normal_scores(3, 8, 8, 7)), opts, ref);
  CHECK(report.passed);
  CHECK(report.max_rel_error < 1e-3);
}

TEST_CASE("results do not depend on worker count or precision beyond rounding") {
  const auto s = normal_scores(5, 12, 12, 42);
  EngineConfig one = grad_config();
  one.workers = 1;
  EngineConfig many = grad_config();
  many.workers = 4;
  const auto a = compute_penalty(s, one);
  const auto b = compute_penalty(s, many);
  CHECK(a.l_opening == b.l_opening);
  CHECK(a.l_dilation == b.l_dilation);
  CHECK(*a.grad == *b.grad);

  const auto f = compute_penalty(tensor_cast<float>(s), one);
  CHECK(f.l_opening == doctest::Approx(a.l_opening).epsilon(1e-4));
  CHECK(f.l_dilation == doctest::Approx(a.l_dilation).epsilon(1e-3));
}

TEST_CASE("infeasible_only mode needs a catalog and uses only its pairs") {
  const auto s = fixture_scores(FixtureKind::enclosure);
  EngineConfig cfg;
  cfg.pair_mode = PairMode::infeasible_only;
  CHECK_THROWS_AS(compute_penalty(s, cfg), CatalogError);

  ConstraintCatalog cat;
  cat.num_classes = 3;
  for (const auto& pair : ordered_pairs(3)) cat.records.push_back(PairRecord{pair});
  const auto none = compute_penalty(s, cfg, &cat);
  CHECK(none.channels == 0);
  CHECK(none.penalty == 0.0);

  cat.records[pair_position({1, 2}, 3)].verdict = Verdict::infeasible;
  cat.records[pair_position({1, 2}, 3)].occurrence_count = 1;
  const auto one = compute_penalty(s, cfg, &cat);
  CHECK(one.channels == 1);
  CHECK(one.opening_mass.size() == 1);
  CHECK(one.opening_mass[0].first == ClassPair{1, 2});
}

TEST_CASE("nan scores are rejected") {
  auto s = normal_scores(3, 4, 4, 1);
  s[5] = NAN;
  CHECK_THROWS_AS(compute_penalty(s, EngineConfig{}), ContractError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "t2nav/term.hpp"

using namespace t2nav;

namespace {

SceneNode node(std::string id, std::string label, Vec3 p, std::vector<double> f = {1.0, 0.0, 0.0}) {
  return {std::move(id), p, std::move(f), std::move(label)};
}

SceneGraphSnapshot snap(Timestep t, std::vector<SceneNode> nodes) {
  SceneGraphSnapshot g;
  g.timestep = t;
  g.nodes = std::move(nodes);
  return g;
}

}  // namespace

TEST(Similarity, Examples) {
  const auto a = node("a", "chair", {0, 0, 0});
  EXPECT_DOUBLE_EQ(similarity(a, a, 0.3, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(similarity(a, node("b", "table", {0, 0, 0}), 0.5, 1.0), 0.5);
  // 0.5 + 0.5 * e^-1
  EXPECT_NEAR(similarity(a, node("b", "chair", {1, 0, 0}), 0.5, 1.0), 0.6839397205857212, 1e-12);
  EXPECT_THROW(similarity(a, a, 0.5, 0.0), ValidationError);
}

TEST(Similarity, SymmetricExactly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5), w(0, 1);
  const char* labels[] = {"chair", "table", "bed"};
  for (int i = 0; i < 1000; ++i) {
    const auto a = node("a", labels[rng() % 3], {u(rng), u(rng), u(rng)});
    const auto b = node("b", labels[rng() % 3], {u(rng), u(rng), u(rng)});
    const double alpha = w(rng), sigma = 0.1 + w(rng);
    ASSERT_EQ(similarity(a, b, alpha, sigma), similarity(b, a, alpha, sigma));
  }
}

TEST(PushSnapshot, Examples) {
  TemporalMemory mem{Config{}};
  EXPECT_EQ(mem.push_snapshot(snap(0, {node("c0", "chair", {0, 0, 0})})), 0u);
  EXPECT_EQ(mem.push_snapshot(snap(1, {node("c1", "chair", {0.1, 0, 0})})), 1u);
  ASSERT_EQ(mem.temporal_edges().size(), 1u);
  EXPECT_DOUBLE_EQ(mem.temporal_edges()[0].weight, 0.95);

  TemporalMemory other{Config{}};
  other.push_snapshot(snap(0, {node("c", "chair", {0, 0, 0})}));
  EXPECT_EQ(other.push_snapshot(snap(1, {node("t", "table", {5, 0, 0})})), 0u);
}

TEST(PushSnapshot, RejectsStaleTimestep) {
  TemporalMemory mem{Config{}};
  mem.push_snapshot(snap(4, {}));
  EXPECT_THROW(mem.push_snapshot(snap(4, {})), OrderingError);
  EXPECT_THROW(mem.push_snapshot(snap(2, {})), OrderingError);
}

TEST(Velocity, Examples) {
  TemporalMemory mem{Config{}};
  mem.push_snapshot(snap(0, {node("c", "chair", {0, 0, 0})}));
  EXPECT_FALSE(mem.estimate_velocity("chair"));
  mem.push_snapshot(snap(1, {node("c", "chair", {1, 0, 0})}));
  const auto v = mem.estimate_velocity("chair");
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, (Vec3{1, 0, 0}));
  EXPECT_FALSE(mem.estimate_velocity("table"));

  TemporalMemory slow{Config{}};
  slow.push_snapshot(snap(0, {node("c", "chair", {2, 2, 0})}));
  slow.push_snapshot(snap(2, {node("c", "chair", {1, 0, 0})}));
  const auto v2 = slow.estimate_velocity("chair");
  ASSERT_TRUE(v2);
  EXPECT_DOUBLE_EQ((*v2)[0], -0.5);
  EXPECT_DOUBLE_EQ((*v2)[1], -1.0);
  EXPECT_DOUBLE_EQ((*v2)[2], 0.0);
}

TEST(Predict, Examples) {
  TemporalMemory mem{Config{}};
  const auto still = node("s", "plant", {3, 4, 0});
  EXPECT_EQ(mem.predict_position(still, 5), still.position);
  EXPECT_THROW(mem.predict_position(still, 0), PreconditionError);

  mem.push_snapshot(snap(0, {node("c", "chair", {0, 0, 0})}));
  mem.push_snapshot(snap(1, {node("c", "chair", {1, 0, 0})}));
  EXPECT_EQ(mem.predict_position(node("c", "chair", {1, 0, 0}), 3), (Vec3{4, 0, 0}));

  TemporalMemory diag{Config{}};
  diag.push_snapshot(snap(0, {node("c", "chair", {-0.5, 0.5, 0})}));
  diag.push_snapshot(snap(1, {node("c", "chair", {0, 0, 0})}));
  const Vec3 p = diag.predict_position(node("c", "chair", {0, 0, 0}), 4);
  EXPECT_NEAR(p[0], 2.0, 1e-12);
  EXPECT_NEAR(p[1], -2.0, 1e-12);
}

TEST(QueryHistory, Examples) {
  TemporalMemory mem{Config{}};
  EXPECT_TRUE(mem.query_history("chair", 0, 10).empty());
  mem.push_snapshot(snap(3, {node("c", "chair", {0, 0, 0})}));
  mem.push_snapshot(snap(7, {node("c", "chair", {1, 0, 0})}));
  auto h = mem.query_history("chair", 0, 10);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].first, 3);
  EXPECT_EQ(h[1].first, 7);
  mem.push_snapshot(snap(12, {node("c", "chair", {2, 0, 0})}));
  h = mem.query_history("chair", 5, 10);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].first, 7);
  EXPECT_EQ(h[0].second, (Vec3{1, 0, 0}));
  EXPECT_THROW(mem.query_history("chair", 10, 5), PreconditionError);
}

namespace {

SceneGraphSnapshot random_snapshot(std::mt19937_64& rng, Timestep t) {
  std::uniform_real_distribution<double> u(-3, 3), f(-1, 1);
  const char* labels[] = {"chair", "table", "bed", "plant"};
  SceneGraphSnapshot g;
  g.timestep = t;
  const int n = static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i)
    g.nodes.push_back(node("n" + std::to_string(i), labels[rng() % 4], {u(rng), u(rng), 0}, {f(rng), f(rng), f(rng), f(rng)}));
  return g;
}

}  // namespace

TEST(TemporalMemoryProperties, EdgeWeightsRecomputeAndWindowBound) {
  Config cfg;
  std::mt19937_64 rng(17);
  TemporalMemory mem(cfg);
  for (int t = 0; t < 1000; ++t) {
    mem.push_snapshot(random_snapshot(rng, t));
    ASSERT_LE(mem.window().size(), static_cast<std::size_t>(cfg.K));
  }
  const Timestep oldest = mem.window().front().timestep;
  ASSERT_FALSE(mem.temporal_edges().empty());
  for (const auto& e : mem.temporal_edges()) {
    ASSERT_GE(e.from.timestep, oldest);
    const SceneGraphSnapshot* a = nullptr;
    const SceneGraphSnapshot* b = nullptr;
    for (const auto& g : mem.window()) {
      if (g.timestep == e.from.timestep) a = &g;
      if (g.timestep == e.to.timestep) b = &g;
    }
    ASSERT_TRUE(a && b);
    const auto* u = a->find(e.from.id);
    const auto* v = b->find(e.to.id);
    double d2 = 0.0;
    for (std::size_t i = 0; i < u->features.size(); ++i) d2 += (u->features[i] - v->features[i]) * (u->features[i] - v->features[i]);
    const double expected = cfg.gamma * std::exp(-cfg.lambda * std::sqrt(d2));
    ASSERT_NEAR(e.weight, expected, 1e-12 * expected);
  }
}

TEST(TemporalMemoryProperties, RaisingTauNeverAddsEdges) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_snapshot(rng, 0), b = random_snapshot(rng, 1);
    std::size_t prev = SIZE_MAX;
    for (double tau : {0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0}) {
      Config cfg;
      cfg.tau = tau;
      TemporalMemory mem(cfg);
      mem.push_snapshot(a);
      const std::size_t n = mem.push_snapshot(b);
      ASSERT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(TemporalMemoryProperties, ConstantVelocityPredictionIsExact) {
  const Vec3 v{0.3, -0.2, 0.0};
  const Vec3 p0{1.0, 2.0, 0.0};
  TemporalMemory mem{Config{}};
  for (Timestep t = 0; t < 40; ++t) {
    mem.push_snapshot(snap(t, {node("c", "chair", p0 + static_cast<double>(t) * v)}));
    if (t == 0) continue;
    const auto now = node("c", "chair", p0 + static_cast<double>(t) * v);
    for (Timestep k = 1; k <= 10; ++k) {
      const Vec3 truth = p0 + static_cast<double>(t + k) * v;
      const Vec3 p = mem.predict_position(now, k);
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(p[i], truth[i], 1e-9);
    }
  }
}

TEST(TemporalMemoryProperties, VelocityRetainedWhenLabelDropsOut) {
  TemporalMemory mem{Config{}};
  mem.push_snapshot(snap(0, {node("c", "chair", {0, 0, 0})}));
  mem.push_snapshot(snap(1, {node("c", "chair", {0.5, 0, 0})}));
  mem.push_snapshot(snap(2, {}));
  EXPECT_FALSE(mem.estimate_velocity("chair"));
  ASSERT_TRUE(mem.velocities().contains("chair"));
  EXPECT_EQ(mem.velocities().at("chair"), (Vec3{0.5, 0, 0}));
}

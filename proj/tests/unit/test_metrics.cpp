#include <gtest/gtest.h>

#include <random>

#include "oarseg/errors.hpp"
#include "oarseg/metrics/overlap.hpp"
#include "oarseg/metrics/report.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace oarseg;

namespace {

LabelMap as_map(Grid3<Label> g, int classes) {
  LabelMap m{std::move(g), {"background"}};
  for (int c = 1; c < classes; ++c) m.class_names.push_back("c" + std::to_string(c));
  return m;
}

}  // namespace

TEST(Dice, MatchesSetCountingOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Shape3 s{1 + static_cast<std::int64_t>(rng() % 12), 1 + static_cast<std::int64_t>(rng() % 12),
                   1 + static_cast<std::int64_t>(rng() % 12)};
    const auto p = oracle::random_labels(s, 4, rng);
    const auto r = oracle::random_labels(s, 4, rng);
    for (Label c = 1; c < 4; ++c) EXPECT_EQ(dice_score(p, r, c), oracle::dice(p, r, c));
  }
}

TEST(Dice, EdgeCases) {
  Grid3<Label> empty(Shape3{3, 3, 3});
  EXPECT_EQ(dice_score(empty, empty, 1), 1.0);
  auto one = empty;
  one(1, 1, 1) = 1;
  EXPECT_EQ(dice_score(one, empty, 1), 0.0);
  EXPECT_EQ(dice_score(one, one, 1), 1.0);
  EXPECT_THROW(dice_score(one, Grid3<Label>(Shape3{3, 3, 2}), 1), ShapeMismatch);
}

TEST(Dice, SymmetricAndBounded) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_labels(Shape3{6, 7, 5}, 3, rng);
    const auto r = oracle::random_labels(Shape3{6, 7, 5}, 3, rng);
    const double d = dice_score(p, r, 1);
    EXPECT_EQ(d, dice_score(r, p, 1));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Boundary, MatchesOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_labels(Shape3{5, 6, 7}, 3, rng);
    const auto b = boundary(g, 1);
    std::int64_t count = 0;
    for (Label v : b.values()) count += v;
    EXPECT_EQ(count, static_cast<std::int64_t>(oracle::surface(g, 1).size()));
    for (const auto& v : oracle::surface(g, 1)) EXPECT_EQ(b(v.z, v.y, v.x), 1);
  }
}

TEST(DistanceTransform, MatchesBruteForce) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> sp(0.3, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Shape3 s{1 + static_cast<std::int64_t>(rng() % 9), 1 + static_cast<std::int64_t>(rng() % 9),
                   1 + static_cast<std::int64_t>(rng() % 9)};
    Grid3<Label> mask(s);
    for (auto& v : mask.values()) v = (rng() % 9 == 0) ? 1 : 0;
    const Spacing spacing{sp(rng), sp(rng), sp(rng)};
    const auto dt = distance_to(mask, spacing);
    const auto fg = oracle::members(mask, 1);
    for (std::int64_t z = 0; z < s.d; ++z)
      for (std::int64_t y = 0; y < s.h; ++y)
        for (std::int64_t x = 0; x < s.w; ++x) {
          double best = std::numeric_limits<double>::infinity();
          for (const auto& v : fg) {
            const double dz = (z - v.z) * spacing[0], dy = (y - v.y) * spacing[1], dx = (x - v.x) * spacing[2];
            best = std::min(best, std::sqrt(dz * dz + dy * dy + dx * dx));
          }
          if (std::isinf(best)) {
            EXPECT_TRUE(std::isinf(dt(z, y, x)));
          } else {
            EXPECT_NEAR(dt(z, y, x), best, 1e-9);
          }
        }
  }
}

TEST(Hd95, MatchesAllPairsOracle) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> sp(0.4, 3.5);
  for (int trial = 0; trial < 120; ++trial) {
    const Shape3 s{1 + static_cast<std::int64_t>(rng() % 12), 1 + static_cast<std::int64_t>(rng() % 12),
                   1 + static_cast<std::int64_t>(rng() % 12)};
    const Spacing spacing{sp(rng), sp(rng), sp(rng)};
    const auto p = oracle::random_labels(s, 3, rng);
    const auto r = oracle::random_labels(s, 3, rng);
    for (Label c = 1; c < 3; ++c) {
      const auto got = hd95(p, r, c, spacing);
      const auto want = oracle::hd95(p, r, c, spacing);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (want) EXPECT_NEAR(*got, *want, 1e-9);
    }
  }
}

TEST(Hd95, KnownConfigurations) {
  Grid3<Label> a(Shape3{1, 1, 10}), b(Shape3{1, 1, 10});
  a(0, 0, 2) = 1;
  b(0, 0, 7) = 1;
  EXPECT_NEAR(*hd95(a, b, 1, {1.0, 1.0, 2.5}), 12.5, 1e-12);
  EXPECT_EQ(*hd95(a, a, 1, {1.0, 1.0, 1.0}), 0.0);
  EXPECT_FALSE(hd95(a, Grid3<Label>(Shape3{1, 1, 10}), 1, {1, 1, 1}).has_value());
}

TEST(Hd95, SymmetricAndTranslationScaled) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = oracle::random_labels(Shape3{8, 8, 8}, 2, rng);
    const auto r = oracle::random_labels(Shape3{8, 8, 8}, 2, rng);
    const auto ab = hd95(p, r, 1, {2.0, 1.0, 0.5});
    const auto ba = hd95(r, p, 1, {2.0, 1.0, 0.5});
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (!ab) continue;
    EXPECT_NEAR(*ab, *ba, 1e-12);
    EXPECT_GE(*ab, 0.0);
    const auto doubled = hd95(p, r, 1, {4.0, 2.0, 1.0});
    EXPECT_NEAR(*doubled, 2.0 * *ab, 1e-9);
  }
}

TEST(Percentile, LinearInterpolation) {
  std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(percentile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.5), 2.5);
  std::vector<double> w{0, 10};
  EXPECT_DOUBLE_EQ(percentile(w, 0.95), 9.5);
}

TEST(Report, EvaluateCaseAndAggregate) {
  Grid3<Label> ref(Shape3{1, 4, 4}), pred(Shape3{1, 4, 4});
  ref(0, 0, 0) = ref(0, 0, 1) = 1;
  pred(0, 0, 0) = 1;
  ref(0, 3, 3) = 2;
  const auto rec = evaluate_case(as_map(pred, 3), as_map(ref, 3), {1, 1, 1});
  ASSERT_EQ(rec.size(), 2u);
  EXPECT_EQ(rec[0].organ, "c1");
  EXPECT_NEAR(rec[0].dice, 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(rec[0].hd95_mm.has_value());
  EXPECT_EQ(rec[1].dice, 0.0);
  EXPECT_FALSE(rec[1].hd95_mm.has_value());

  auto perfect = rec;
  perfect[0] = {"c1", 1.0, 0.0};
  perfect[1] = {"c2", 1.0, 2.0};
  const auto r = aggregate({rec, perfect});
  EXPECT_EQ(r.n_cases, 2u);
  EXPECT_NEAR(r.at("c1").dice, (2.0 / 3.0 + 1.0) / 2, 1e-15);
  EXPECT_NEAR(*r.at("c2").hd95_mm, 2.0, 1e-15);  // absent entry excluded
  EXPECT_EQ(r.at("c2").hd95_cases, 1u);
  EXPECT_NEAR(r.overall_dice, (r.at("c1").dice + r.at("c2").dice) / 2, 1e-15);
  EXPECT_THROW(aggregate({}), EmptyInput);
  EXPECT_THROW(evaluate_case(as_map(pred, 3), as_map(ref, 2), {1, 1, 1}), ClassMismatch);
}

TEST(Report, TableLayoutAndRoundTrip) {
  MetricsReport r;
  r.organs = {"Lung R", "Spinal Cord"};
  r.per_class["Lung R"] = {0.974, 4.159, 2};
  r.per_class["Spinal Cord"] = {0.9, std::nullopt, 0};
  r.overall_dice = 0.937;
  r.overall_hd95_mm = 4.159;
  r.n_cases = 2;
  EXPECT_EQ(to_csv(r), "Organ,DICE,HD95\nLung R,0.97,4.16\nSpinal Cord,0.90,NA\nOverall,0.94,4.16\n");
  const auto back = report_from_json(to_json(r));
  EXPECT_EQ(back.organs, r.organs);
  EXPECT_EQ(back.at("Lung R").dice, 0.974);
  EXPECT_FALSE(back.at("Spinal Cord").hd95_mm.has_value());
  const auto flipped = reorder(r, {"Spinal Cord", "Lung R"});
  EXPECT_EQ(flipped.organs.front(), "Spinal Cord");
}

/* Copyright 2026 The segkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>

#include "segkit/disk_benchmark.hpp"
#include "segkit/error.hpp"
#include "segkit/feature_grid.hpp"
#include "segkit/point_head.hpp"
#include "segkit/point_head_trainer.hpp"
#include "segkit/rng.hpp"
#include "segkit/subdivision.hpp"
#include "support/oracles.hpp"

namespace segkit {
namespace {

ProbabilityMask random_prob(Rng& rng, int w, int h) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (double& x : v) x = rng.uniform();
  return ProbabilityMask(w, h, v);
}

FeatureGrid random_grid(Rng& rng, int c, int w, int h) {
  std::vector<double> v(static_cast<std::size_t>(c) * w * h);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return FeatureGrid(c, w, h, v);
}

TEST(FeatureGridTest, Validation) {
  EXPECT_THROW(FeatureGrid(0, 2, 2), DimensionError);
  EXPECT_THROW(FeatureGrid(1, 2, 2, {1, 2, 3}), DimensionError);
  EXPECT_THROW(FeatureGrid(1, 1, 1, {std::nan("")}), InputError);
}

TEST(BilinearSampleTest, Examples) {
  const FeatureGrid g(1, 2, 2, {0, 1, 2, 3});
  const PointSet pts{{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  const auto v = bilinear_sample(g, pts);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_DOUBLE_EQ(v[1], 1.5);
  EXPECT_EQ(v[2], 1.0);
  EXPECT_EQ(v[3], 2.0);
  EXPECT_EQ(v[4], 3.0);

  const FeatureGrid constant(2, 5, 3, std::vector<double>(30, 0.25));
  Rng rng(1);
  PointSet random_pts;
  for (int i = 0; i < 50; ++i) random_pts.push_back({rng.uniform(), rng.uniform()});
  for (double x : bilinear_sample(constant, random_pts)) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(BilinearSampleTest, CellPointsReturnCellValues) {
  Rng rng(2);
  const FeatureGrid g = random_grid(rng, 3, 7, 5);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 7; ++c) {
      const PointSet p{cell_point(r, c, 7, 5)};
      const auto v = bilinear_sample(g, p);
      for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(v[ch], g.at(ch, r, c));
    }
  }
}

TEST(BilinearSampleTest, MatchesHandFormula) {
  Rng rng(3);
  const FeatureGrid g = random_grid(rng, 2, 6, 4);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    const double x = u * 5, y = v * 3;
    const int x0 = std::min(static_cast<int>(x), 4), y0 = std::min(static_cast<int>(y), 2);
    const double fx = x - x0, fy = y - y0;
    const PointSet p{{u, v}};
    const auto s = bilinear_sample(g, p);
    for (int ch = 0; ch < 2; ++ch) {
      const double want = g.at(ch, y0, x0) * (1 - fx) * (1 - fy) +
                          g.at(ch, y0, x0 + 1) * fx * (1 - fy) +
                          g.at(ch, y0 + 1, x0) * (1 - fx) * fy +
                          g.at(ch, y0 + 1, x0 + 1) * fx * fy;
      EXPECT_NEAR(s[ch], want, 1e-12);
    }
  }
}

TEST(FeatureGridJsonTest, RoundTrip) {
  Rng rng(4);
  const FeatureGrid g = random_grid(rng, 2, 3, 4);
  const auto j = feature_grid_to_json(g, 17);
  EXPECT_EQ(j.at("instance_id"), 17);
  EXPECT_EQ(feature_grid_from_json(j), g);
}

TEST(UncertainPointsTest, Examples) {
  const ProbabilityMask p(2, 2, std::vector<double>{0.1, 0.45, 0.9, 0.55});
  EXPECT_EQ(uncertain_cells(p, 2), (std::vector<std::size_t>{1, 3}));
  const PointSet pts = uncertain_points(p, 2);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], (NormalizedPoint{1.0, 0.0}));
  EXPECT_EQ(pts[1], (NormalizedPoint{1.0, 1.0}));

  const ProbabilityMask half(3, 3, 0.5);
  EXPECT_EQ(uncertain_cells(half, 3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(uncertain_cells(p, 10).size(), 4u);
  EXPECT_THROW(uncertain_cells(p, 0), std::invalid_argument);
}

TEST(UncertainPointsTest, AgreesWithFullSort) {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const int w = 1 + static_cast<int>(rng.index(16));
    const int h = 1 + static_cast<int>(rng.index(16));
    // Coarse quantization forces ties.
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (double& x : v) x = std::round(rng.uniform() * 8) / 8;
    const ProbabilityMask p(w, h, v);
    const int n = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(w * h + 5)));
    const auto got = uncertain_cells(p, n);
    ASSERT_EQ(got, testing::brute_force_uncertain(p, n));
    for (std::size_t k = 1; k < got.size(); ++k) {
      ASSERT_LE(std::abs(p[got[k - 1]] - 0.5), std::abs(p[got[k]] - 0.5));
    }
  }
}

TEST(PointHeadTest, ZeroModelGivesHalf) {
  const PointHeadModel zero(4, {8, 8});
  Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> f{rng.normal(), rng.normal(), rng.normal()};
    EXPECT_EQ(point_head_forward(zero, f, rng.uniform()), 0.5);
  }
}

TEST(PointHeadTest, MatchesReferenceForward) {
  const PointHeadModel model = PointHeadModel::random(4, default_hidden_widths(), 42);
  EXPECT_EQ(model.parameter_count(), 4u * 64 + 64 + 64 * 64 + 64 + 64 * 64 + 64 + 64 + 1);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> f{rng.normal(), rng.normal(), rng.normal()};
    const double p = rng.uniform();
    const double got = point_head_forward(model, f, p);
    EXPECT_NEAR(got, testing::reference_forward(model, f, p), 1e-13);
    EXPECT_GT(got, 0.0);
    EXPECT_LT(got, 1.0);
  }
  const std::vector<double> wrong{1.0};
  EXPECT_THROW(point_head_forward(model, wrong, 0.5), DimensionError);
}

TEST(PointHeadTest, SeededInitIsDeterministic) {
  EXPECT_EQ(PointHeadModel::random(3, {5, 6}, 9), PointHeadModel::random(3, {5, 6}, 9));
  EXPECT_NE(PointHeadModel::random(3, {5, 6}, 9), PointHeadModel::random(3, {5, 6}, 10));
}

TEST(PointHeadTest, JsonRoundTripExact) {
  const PointHeadModel model = PointHeadModel::random(3, {7, 5}, 3);
  const auto j = point_head_to_json(model);
  EXPECT_EQ(j.at("in_dim"), 3);
  EXPECT_EQ(point_head_from_json(nlohmann::json::parse(j.dump())), model);
}

TEST(PointHeadTest, RejectsMalformedLayers) {
  auto j = point_head_to_json(PointHeadModel::random(3, {4}, 1));
  j["layers"][0]["b"].push_back(0.0);
  EXPECT_THROW(point_head_from_json(j), Error);
}

// Relative error with a floor so that vanishing gradients compare absolutely.
double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

TEST(PointHeadTest, LogitGradientMatchesFiniteDifferences) {
  PointHeadModel model = PointHeadModel::random(3, {6, 5}, 11);
  const std::vector<double> f{0.3, -0.7};
  const double p = 0.4;
  auto grad = zero_gradient(model);
  point_head_backward(model, f, p, 1.0, grad);
  double worst = 0.0;
  auto& layers = model.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t k = 0; k < layers[l].weights.size(); ++k) {
      double& w = layers[l].weights[k];
      const double keep = w, h = 1e-6;
      w = keep + h;
      const double up = point_head_logit(model, f, p);
      w = keep - h;
      const double down = point_head_logit(model, f, p);
      w = keep;
      worst = std::max(worst, rel_err((up - down) / (2 * h), grad[l].weights[k]));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(PointLossTest, ChainGradientMatchesFiniteDifferences) {
  Rng rng(12);
  FocalLossParams loss;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    PointHeadModel model = PointHeadModel::random(4, {8, 8}, 100 + trial);
    std::vector<std::vector<double>> feats;
    std::vector<double> coarse;
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) {
      feats.push_back({rng.normal(), rng.normal(), rng.normal()});
      coarse.push_back(rng.uniform());
      labels.push_back(static_cast<int>(rng.index(2)));
    }
    auto batch_loss = [&]() {
      double s = 0.0;
      for (std::size_t i = 0; i < feats.size(); ++i) {
        s += point_loss(model, feats[i], coarse[i], labels[i], loss);
      }
      return s / static_cast<double>(feats.size());
    };
    auto grad = zero_gradient(model);
    for (std::size_t i = 0; i < feats.size(); ++i) {
      point_loss_backward(model, feats[i], coarse[i], labels[i], loss,
                          1.0 / static_cast<double>(feats.size()), grad);
    }
    auto& layers = model.mutable_layers();
    const double h = 1e-4;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
        for (std::size_t k = 0; k < params.size(); ++k) {
          const double keep = params[k];
          params[k] = keep + h;
          const double up = batch_loss();
          params[k] = keep - h;
          const double down = batch_loss();
          params[k] = keep;
          worst = std::max(worst, rel_err((up - down) / (2 * h), analytic[k]));
        }
      };
      check(layers[l].weights, grad[l].weights);
      check(layers[l].bias, grad[l].bias);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(SubdivisionTest, OutputSizeAndIdentityPredictor) {
  Rng rng(13);
  const SubdivisionConfig cfg;
  const ProbabilityMask coarse = random_prob(rng, 7, 7);
  const FeatureGrid grid = random_grid(rng, 2, 28, 28);
  const PointPredictor echo = [](std::span<const double>, double p) { return p; };
  const ProbabilityMask out = subdivision_refine(echo, coarse, grid, cfg);
  EXPECT_EQ(out.width(), 28);
  EXPECT_EQ(out.height(), 28);
  EXPECT_EQ(out, bilinear_chain(coarse, 2));
}

TEST(SubdivisionTest, MatchesStepByStepReconstruction) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    SubdivisionConfig cfg;
    cfg.coarse_size = 2 + static_cast<int>(rng.index(6));
    cfg.steps = 1 + static_cast<int>(rng.index(3));
    cfg.points_per_step = 1 + static_cast<int>(rng.index(60));
    const ProbabilityMask coarse = random_prob(rng, cfg.coarse_size, cfg.coarse_size);
    const FeatureGrid grid = random_grid(rng, 1, 11, 9);
    // Depends on both inputs; stays inside [0, 1].
    const PointPredictor pred = [](std::span<const double> f, double p) {
      return 0.5 * p + 0.25 * (f[0] + 1.0);
    };
    ProbabilityMask want = coarse;
    for (int s = 0; s < cfg.steps; ++s) {
      want = resize_prob(want, want.width() * 2, want.height() * 2);
      const ProbabilityMask before = want;
      for (std::size_t cell : testing::brute_force_uncertain(before, cfg.points_per_step)) {
        const int r = static_cast<int>(cell) / before.width();
        const int c = static_cast<int>(cell) % before.width();
        const PointSet pt{cell_point(r, c, before.width(), before.height())};
        const auto f = bilinear_sample(grid, pt);
        want.set_index(cell, pred(f, before[cell]));
      }
    }
    const ProbabilityMask got = subdivision_refine(pred, coarse, grid, cfg);
    ASSERT_EQ(got.width(), cfg.coarse_size << cfg.steps);
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_EQ(got[i], want[i]);
  }
}

TEST(SubdivisionTest, UnselectedCellsKeepBilinearValues) {
  Rng rng(15);
  SubdivisionConfig cfg;
  cfg.points_per_step = 10;
  const ProbabilityMask coarse = random_prob(rng, 7, 7);
  const FeatureGrid grid = random_grid(rng, 3, 14, 14);
  const PointHeadModel model = PointHeadModel::random(4, {8}, 1);
  const ProbabilityMask refined = subdivision_refine(model, coarse, grid, cfg);
  const ProbabilityMask chain = bilinear_chain(coarse, cfg.steps);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < refined.size(); ++i) {
    ASSERT_GE(refined[i], 0.0);
    ASSERT_LE(refined[i], 1.0);
    differing += refined[i] != chain[i];
  }
  // Each step rewrites at most 10 cells. A cell rewritten at step one feeds
  // the interpolation of at most 5 x 5 cells at step two.
  EXPECT_GT(differing, 0u);
  EXPECT_LE(differing, 10u * 25u + 10u);
}

TEST(SubdivisionTest, ShapeErrors) {
  const SubdivisionConfig cfg;
  const FeatureGrid grid(2, 4, 4);
  EXPECT_THROW(subdivision_refine(PointHeadModel(3, {4}), ProbabilityMask(6, 7), grid, cfg),
               DimensionError);
  EXPECT_THROW(subdivision_refine(PointHeadModel(5, {4}), ProbabilityMask(7, 7), grid, cfg),
               DimensionError);
}

TEST(DiskTest, RasterizerAgreesWithGeometry) {
  const DiskInstance disk{0.5, 0.5, 0.3};
  const BinaryMask m = rasterize_disk(disk, 21, 21);
  EXPECT_TRUE(m.at(10, 10));
  EXPECT_FALSE(m.at(0, 0));
  for (int r = 0; r < 21; ++r) {
    for (int c = 0; c < 21; ++c) {
      const double u = c / 20.0 - 0.5, v = r / 20.0 - 0.5;
      ASSERT_EQ(m.at(r, c), u * u + v * v <= 0.09) << r << "," << c;
    }
  }
}

TEST(DiskTest, DatasetIsSeeded) {
  const DiskBenchmarkConfig cfg;
  const auto a = make_disk_dataset(3, cfg, 5);
  const auto b = make_disk_dataset(3, cfg, 5);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].coarse, b[i].coarse);
    EXPECT_EQ(a[i].ground_truth, b[i].ground_truth);
  }
  EXPECT_EQ(a[0].features.channels(), kDiskFeatureChannels);
  EXPECT_EQ(a[0].coarse.width(), cfg.coarse_size);
  EXPECT_EQ(a[0].ground_truth.width(), cfg.output_size());
}

TEST(TrainingTest, ZeroLearningRateKeepsModel) {
  const auto data = make_disk_dataset(4, DiskBenchmarkConfig{}, 1);
  TrainingOptions opts;
  opts.learning_rate = 0.0;
  opts.epochs = 3;
  opts.hidden_widths = {8, 8};
  const PointHeadModel init = PointHeadModel::random(kDiskFeatureChannels + 1, {8, 8}, 3);
  const TrainingResult r = train_point_head(init, data, opts);
  EXPECT_EQ(r.model, init);
  EXPECT_EQ(r.epoch_loss.size(), 3u);
}

TEST(TrainingTest, SingleExampleLossDecreases) {
  const auto data = make_disk_dataset(1, DiskBenchmarkConfig{}, 2);
  TrainingOptions opts;
  opts.epochs = 200;
  opts.hidden_widths = {16, 16};
  opts.points_per_example = 64;
  const TrainingResult r = train_point_head(data, opts);
  ASSERT_EQ(r.epoch_loss.size(), 200u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(TrainingTest, DeterministicForSeed) {
  const auto data = make_disk_dataset(6, DiskBenchmarkConfig{}, 3);
  TrainingOptions opts;
  opts.epochs = 2;
  opts.hidden_widths = {8};
  opts.batch_size = 4;
  const TrainingResult a = train_point_head(data, opts);
  const TrainingResult b = train_point_head(data, opts);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

TEST(TrainingTest, NonFiniteLossReportsEpoch) {
  const auto data = make_disk_dataset(2, DiskBenchmarkConfig{}, 4);
  // Finite weights whose activations overflow: the first layer saturates to
  // +inf in both units and the output computes inf - inf.
  const int in = kDiskFeatureChannels + 1;
  std::vector<DenseLayer> layers{
      DenseLayer{in, 2, std::vector<double>(2 * in, 1e308), {1e308, 1e308}},
      DenseLayer{2, 1, {1.0, -1.0}, {0.0}}};
  const PointHeadModel init(in, {2}, layers);
  TrainingOptions opts;
  opts.epochs = 3;
  opts.hidden_widths = {2};
  try {
    train_point_head(init, data, opts);
    FAIL() << "expected a TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.epoch(), 0);
  }
}

TEST(TrainingTest, OptionValidation) {
  const auto data = make_disk_dataset(1, DiskBenchmarkConfig{}, 4);
  TrainingOptions opts;
  opts.batch_size = 0;
  EXPECT_THROW(train_point_head(data, opts), std::invalid_argument);
  EXPECT_THROW(train_point_head(std::span<const TrainingExample>{}, TrainingOptions{}),
               std::invalid_argument);
}

TEST(UpsampleTest, DoublesThenResizes) {
  Rng rng(16);
  const ProbabilityMask c = random_prob(rng, 7, 7);
  EXPECT_EQ(upsample_to(c, 28, 28), bilinear_chain(c, 2));
  const ProbabilityMask odd = upsample_to(c, 30, 20);
  EXPECT_EQ(odd.width(), 30);
  EXPECT_EQ(odd.height(), 20);
}

}  // namespace
}  // namespace segkit

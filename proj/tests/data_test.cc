// Copyright 2026 The skillret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

#include "skillret/data/sampling.h"
#include "skillret/data/trajectory.h"
#include "skillret/errors.h"
#include "skillret/numcore/rng.h"
#include "test_util.h"

namespace skillret {
namespace {

namespace fs = std::filesystem;

// Values rounded through float so the f32 file format round-trips exactly.
Trajectory RandomTrajectory(Rng& rng, int length, int obs_dim, int act_dim, std::int64_t id) {
  Trajectory t;
  t.id = id;
  t.observations.resize(length + 1, obs_dim);
  t.actions.resize(length, act_dim);
  for (Eigen::Index i = 0; i < t.observations.size(); ++i) {
    t.observations.data()[i] = static_cast<float>(rng.Uniform(-2.0, 2.0));
  }
  for (Eigen::Index i = 0; i < t.actions.size(); ++i) {
    t.actions.data()[i] = static_cast<float>(rng.Uniform(-1.0, 1.0));
  }
  return t;
}

TrajectoryDataset RandomDataset(Rng& rng, const std::vector<int>& lengths, int obs_dim = 3,
                                int act_dim = 2) {
  TrajectoryDataset d;
  d.obs_dim = obs_dim;
  d.act_dim = act_dim;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    d.trajectories.push_back(RandomTrajectory(rng, lengths[i], obs_dim, act_dim, 100 + i));
  }
  return d;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("skillret_data_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(ExtractSample, StartOfTrajectoryPadsFrameStack) {
  Rng rng(1);
  const TrajectoryDataset d = RandomDataset(rng, {200});
  const Trajectory& t = d.trajectories[0];
  const SubTrajectorySample s = ExtractSample(d, {0, t.id, 0}, 10, 10);
  EXPECT_EQ(s.window_obs, t.observations.topRows(11));
  EXPECT_EQ(s.window_actions, t.actions.topRows(10));
  for (int k = 0; k < 10; ++k) EXPECT_EQ(s.frame_stack.row(k), t.observations.row(0));
}

TEST(ExtractSample, EndOfTrajectoryPadsWindow) {
  Rng rng(2);
  const TrajectoryDataset d = RandomDataset(rng, {200});
  const Trajectory& t = d.trajectories[0];
  const SubTrajectorySample s = ExtractSample(d, {0, t.id, 195}, 10, 4);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(s.window_obs.row(k), t.observations.row(195 + k));
    EXPECT_EQ(s.window_actions.row(k), t.actions.row(195 + k));
  }
  for (int k = 5; k <= 10; ++k) EXPECT_EQ(s.window_obs.row(k), t.observations.row(200));
  for (int k = 5; k < 10; ++k) EXPECT_EQ(s.window_actions.row(k), Matrix::Zero(1, 2));
  EXPECT_EQ(s.frame_stack, t.observations.middleRows(192, 4));
}

TEST(ExtractSample, StaleSourceIsIntegrityError) {
  Rng rng(3);
  const TrajectoryDataset d = RandomDataset(rng, {20});
  EXPECT_THROW(ExtractSample(d, {1, 100, 0}, 5, 2), IntegrityError);
  EXPECT_THROW(ExtractSample(d, {0, 999, 0}, 5, 2), IntegrityError);
  EXPECT_THROW(ExtractSample(d, {0, 100, 20}, 5, 2), IntegrityError);
}

TEST(SampleStream, EveryStartHasExactShapesAndPadding) {
  Rng rng(4);
  const TrajectoryDataset d = RandomDataset(rng, {12, 7, 30});
  const int h = 10, f = 6;
  const SampleStream stream(d, h);
  EXPECT_EQ(stream.size(), 12 + 30);  // the 7-step trajectory is skipped
  for (std::int64_t p = 0; p < stream.size(); ++p) {
    const SampleSource src = stream.At(p);
    const Trajectory& t = d.trajectories[src.trajectory];
    const SubTrajectorySample s = ExtractSample(d, src, h, f);
    ASSERT_EQ(s.window_obs.rows(), h + 1);
    ASSERT_EQ(s.window_actions.rows(), h);
    ASSERT_EQ(s.frame_stack.rows(), f);
    for (int k = 0; k <= h; ++k) {
      EXPECT_EQ(s.window_obs.row(k), t.observations.row(std::min(src.start + k, t.length())));
    }
    for (int k = 0; k < h; ++k) {
      const Matrix expected = src.start + k < t.length() ? Matrix(t.actions.row(src.start + k))
                                                         : Matrix::Zero(1, d.act_dim);
      EXPECT_EQ(s.window_actions.row(k), expected);
    }
    EXPECT_EQ(s.frame_stack.row(f - 1), t.observations.row(src.start));
  }
}

TEST(SampleStream, AllTooShortIsUsageError) {
  Rng rng(5);
  const TrajectoryDataset d = RandomDataset(rng, {3, 4});
  EXPECT_THROW(SampleStream(d, 10), UsageError);
  EXPECT_THROW(SampleStream(TrajectoryDataset{}, 10), UsageError);
}

TEST(SampleStream, StartsAreUniformOverTheStream) {
  Rng rng(6);
  const TrajectoryDataset d = RandomDataset(rng, {40, 25});
  const SampleStream stream(d, 10);
  std::vector<long> counts(stream.size(), 0);
  Rng draw(7);
  for (int i = 0; i < 100000; ++i) {
    const SampleSource s = stream.Draw(draw);
    ++counts[(s.trajectory == 0 ? 0 : 40) + s.start];
  }
  EXPECT_LT(testing::ChiSquareUniform(counts),
            testing::ChiSquareCritical001(static_cast<int>(counts.size()) - 1));
  const double expected = 100000.0 / counts.size();
  const double sd = std::sqrt(expected * (1.0 - 1.0 / counts.size()));
  for (long c : counts) EXPECT_LE(std::abs(c - expected), 4.0 * sd);
}

TEST(SampleStream, SameSeedSameStream) {
  Rng rng(8);
  const TrajectoryDataset d = RandomDataset(rng, {50, 60});
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(SampleSubtrajectory(d, 10, 3, a).window_obs,
              SampleSubtrajectory(d, 10, 3, b).window_obs);
  }
}

TEST(TemporalPair, OffsetIsActualStartDifference) {
  Rng rng(10);
  const TrajectoryDataset d = RandomDataset(rng, {80, 120});
  const SampleStream stream(d, 10);
  Rng draw(11);
  for (int i = 0; i < 2000; ++i) {
    const TemporalPair p = SampleTemporalPair(stream, d, 10, 50, draw);
    EXPECT_EQ(p.first.source.trajectory, p.second.source.trajectory);
    EXPECT_EQ(p.offset, p.second.source.start - p.first.source.start);
    EXPECT_LE(std::abs(p.offset), 50);
    if (p.offset == 0) {
      EXPECT_EQ(p.first.window_obs, p.second.window_obs);
    }
  }
}

TEST(TemporalPair, ClampsAtTrajectoryStart) {
  // A single-start stream: H equals the trajectory length, so the only
  // eligible first window sits at 0 and any negative draw clamps to 0.
  Rng rng(12);
  const TrajectoryDataset d = RandomDataset(rng, {1});
  const SampleStream stream(d, 1);
  Rng draw(13);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(SampleTemporalPair(stream, d, 1, 50, draw).offset, 0);
}

TEST(TemporalPair, OffsetsUniformOnLongTrajectories) {
  Rng rng(14);
  const TrajectoryDataset d = RandomDataset(rng, {400000}, 1, 1);
  const SampleStream stream(d, 10);
  Rng draw(15);
  std::vector<long> counts(101, 0);
  for (int i = 0; i < 100000; ++i) ++counts[SampleTemporalPair(stream, d, 10, 50, draw).offset + 50];
  EXPECT_LT(testing::ChiSquareUniform(counts), testing::ChiSquareCritical001(100));
}

TEST(TemporalPair, RejectsNonPositiveMaxOffset) {
  Rng rng(16);
  const TrajectoryDataset d = RandomDataset(rng, {30});
  const SampleStream stream(d, 10);
  EXPECT_THROW(SampleTemporalPair(stream, d, 10, 0, rng), UsageError);
}

TEST(Dataset, RoundTripIsBitExact) {
  Rng rng(17);
  TrajectoryDataset d = RandomDataset(rng, {5, 9, 3});
  d.role = DatasetRole::kTarget;
  const fs::path dir = TempDir("roundtrip");
  WriteDataset(d, dir);
  const TrajectoryDataset back = LoadDataset(dir);
  EXPECT_EQ(back.role, DatasetRole::kTarget);
  ASSERT_EQ(back.trajectories.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.trajectories[i].id, d.trajectories[i].id);
    EXPECT_EQ(back.trajectories[i].observations, d.trajectories[i].observations);
    EXPECT_EQ(back.trajectories[i].actions, d.trajectories[i].actions);
  }
  EXPECT_EQ(back.total_transitions(), 17);
  fs::remove_all(dir);
}

TEST(Dataset, ManifestLengthMismatchIsFormatError) {
  Rng rng(18);
  const fs::path dir = TempDir("mismatch");
  WriteDataset(RandomDataset(rng, {100}), dir);
  nlohmann::json manifest;
  std::ifstream(dir / "manifest.json") >> manifest;
  manifest["trajectories"][0]["length"] = 99;
  std::ofstream(dir / "manifest.json", std::ios::trunc) << manifest.dump();
  try {
    LoadDataset(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("traj_"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(Dataset, BadMagicIsFormatError) {
  Rng rng(19);
  const fs::path dir = TempDir("magic");
  WriteDataset(RandomDataset(rng, {4}), dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".bin") {
      std::fstream f(entry.path(), std::ios::in | std::ios::out | std::ios::binary);
      f.put('Z');
    }
  }
  EXPECT_THROW(LoadDataset(dir), FormatError);
  fs::remove_all(dir);
}

TEST(Dataset, TakeFirstAndFraction) {
  Rng rng(20);
  const TrajectoryDataset d = RandomDataset(rng, {3, 3, 3, 3});
  EXPECT_EQ(TakeFirst(d, 2).trajectories.size(), 2u);
  EXPECT_EQ(TakeFraction(d, 0.25).trajectories.size(), 1u);
  EXPECT_EQ(TakeFraction(d, 0.5).trajectories.size(), 2u);
  EXPECT_EQ(TakeFraction(d, 1.0).trajectories.size(), 4u);
  EXPECT_THROW(TakeFraction(d, 0.0), UsageError);
}

TEST(Normalizer, ConstantDimensionNormalizesToZero) {
  Rng rng(21);
  TrajectoryDataset d = RandomDataset(rng, {20, 30});
  for (auto& t : d.trajectories) t.observations.col(1).setConstant(4.0);
  const Normalizer n = Normalizer::Fit(d);
  const TrajectoryDataset out = n.Apply(d);
  for (const auto& t : out.trajectories) EXPECT_TRUE((t.observations.col(1).array() == 0.0).all());
}

TEST(Normalizer, InvertUndoesApply) {
  Rng rng(22);
  const TrajectoryDataset d = RandomDataset(rng, {50});
  const Normalizer n = Normalizer::Fit(d);
  const Matrix x = d.trajectories[0].observations;
  EXPECT_LE((n.InvertObs(n.ApplyObs(x)) - x).cwiseAbs().maxCoeff(), 1e-9);
  const Matrix a = d.trajectories[0].actions;
  EXPECT_LE((n.InvertAct(n.ApplyAct(a)) - a).cwiseAbs().maxCoeff(), 1e-9);
  const Normalizer back = Normalizer::FromJson(n.ToJson());
  EXPECT_EQ(back.obs_mean, n.obs_mean);
  EXPECT_EQ(back.act_std, n.act_std);
}

TEST(Normalizer, NormalizedStatisticsAreStandard) {
  Rng rng(23);
  const TrajectoryDataset raw = RandomDataset(rng, {40, 70});
  const TrajectoryDataset d = Normalizer::Fit(raw).Apply(raw);
  Vector sum = Vector::Zero(3), sq = Vector::Zero(3);
  double n = 0;
  for (const auto& t : d.trajectories) {
    for (Eigen::Index r = 0; r < t.observations.rows(); ++r) {
      const Vector o = t.observations.row(r).transpose();
      sum += o;
      sq += o.cwiseProduct(o);
      n += 1;
    }
  }
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / n;
    EXPECT_LE(std::abs(mean), 1e-6);
    EXPECT_LE(std::abs(std::sqrt(sq[j] / n - mean * mean) - 1.0), 1e-6);
  }
}

}  // namespace
}  // namespace skillret

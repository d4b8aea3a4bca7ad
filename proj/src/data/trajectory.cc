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

#include "skillret/data/trajectory.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skillret/errors.h"

namespace skillret {
namespace {

std::string TrajectoryFileName(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "traj_%06zu.bin", index);
  return buf;
}

void AppendFloats(std::string& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const float f = static_cast<float>(m.data()[i]);
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
  }
}

Matrix ReadFloats(const std::string& bytes, std::size_t offset, int rows, int cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    float f;
    std::memcpy(&f, bytes.data() + offset + 4 * i, 4);
    m.data()[i] = f;
  }
  return m;
}

Vector ColumnMean(const std::vector<const Matrix*>& blocks, int dim) {
  Vector sum = Vector::Zero(dim);
  double n = 0;
  for (const Matrix* b : blocks) {
    sum += b->colwise().sum().transpose();
    n += static_cast<double>(b->rows());
  }
  return sum / n;
}

Vector ColumnStd(const std::vector<const Matrix*>& blocks, const Vector& mean) {
  Vector sq = Vector::Zero(mean.size());
  double n = 0;
  for (const Matrix* b : blocks) {
    sq += (b->rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
    n += static_cast<double>(b->rows());
  }
  Vector std = (sq / n).array().sqrt().matrix();
  return std.cwiseMax(Normalizer::kMinStd);
}

}  // namespace

std::string RoleName(DatasetRole role) {
  return role == DatasetRole::kPrior ? "prior" : "target";
}

DatasetRole ParseRole(const std::string& name) {
  if (name == "prior") return DatasetRole::kPrior;
  if (name == "target") return DatasetRole::kTarget;
  throw FormatError("unknown dataset role: " + name);
}

std::int64_t TrajectoryDataset::total_transitions() const {
  std::int64_t n = 0;
  for (const auto& t : trajectories) n += t.length();
  return n;
}

void TrajectoryDataset::Validate() const {
  if (trajectories.empty()) throw UsageError("dataset is empty");
  for (const auto& t : trajectories) {
    const std::string where = "trajectory " + std::to_string(t.id);
    if (t.length() < 1) throw FormatError(where + ": needs at least one action");
    if (t.observations.rows() != t.actions.rows() + 1) {
      throw FormatError(where + ": observation count must be action count + 1");
    }
    if (t.observations.cols() != obs_dim || t.actions.cols() != act_dim) {
      throw FormatError(where + ": dimensions differ from dataset");
    }
    if (!t.observations.allFinite() || !t.actions.allFinite()) {
      throw FormatError(where + ": non-finite values");
    }
  }
}

TrajectoryDataset TakeFirst(const TrajectoryDataset& dataset, std::size_t count) {
  TrajectoryDataset out;
  out.role = dataset.role;
  out.obs_dim = dataset.obs_dim;
  out.act_dim = dataset.act_dim;
  count = std::clamp<std::size_t>(count, 1, dataset.trajectories.size());
  out.trajectories.assign(dataset.trajectories.begin(), dataset.trajectories.begin() + count);
  return out;
}

TrajectoryDataset TakeFraction(const TrajectoryDataset& dataset, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("dataset fraction must lie in (0, 1]");
  }
  const auto n = static_cast<double>(dataset.trajectories.size());
  return TakeFirst(dataset, static_cast<std::size_t>(std::ceil(fraction * n - 1e-9)));
}

void WriteDataset(const TrajectoryDataset& dataset, const std::filesystem::path& dir) {
  dataset.Validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["version"] = kDatasetVersion;
  manifest["role"] = RoleName(dataset.role);
  manifest["obs_dim"] = dataset.obs_dim;
  manifest["act_dim"] = dataset.act_dim;
  manifest["trajectories"] = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& t = dataset.trajectories[i];
    const std::string file = TrajectoryFileName(i);
    manifest["trajectories"].push_back({{"id", t.id}, {"file", file}, {"length", t.length()}});
    std::string bytes(kTrajectoryMagic, 4);
    const std::uint32_t len = static_cast<std::uint32_t>(t.length());
    char buf[4];
    std::memcpy(buf, &len, 4);
    bytes.append(buf, 4);
    AppendFloats(bytes, t.observations);
    AppendFloats(bytes, t.actions);
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + (dir / file).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw UsageError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

TrajectoryDataset LoadDataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw FormatError(manifest_path.string() + ": cannot open manifest");
  TrajectoryDataset dataset;
  nlohmann::json manifest;
  std::vector<std::tuple<std::int64_t, std::string, int>> entries;
  try {
    manifest = nlohmann::json::parse(in);
    if (manifest.at("version").get<int>() != kDatasetVersion) {
      throw FormatError(manifest_path.string() + ": unsupported version");
    }
    dataset.role = ParseRole(manifest.at("role").get<std::string>());
    dataset.obs_dim = manifest.at("obs_dim").get<int>();
    dataset.act_dim = manifest.at("act_dim").get<int>();
    for (const auto& e : manifest.at("trajectories")) {
      entries.emplace_back(e.at("id").get<std::int64_t>(), e.at("file").get<std::string>(),
                           e.at("length").get<int>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  if (dataset.obs_dim <= 0 || dataset.act_dim <= 0) {
    throw FormatError(manifest_path.string() + ": dimensions must be positive");
  }

  for (const auto& [id, file, length] : entries) {
    const auto path = dir / file;
    std::ifstream tin(path, std::ios::binary);
    if (!tin) throw FormatError(path.string() + ": cannot open trajectory file");
    std::ostringstream ss;
    ss << tin.rdbuf();
    const std::string bytes = ss.str();
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kTrajectoryMagic, 4) != 0) {
      throw FormatError(path.string() + ": bad trajectory magic");
    }
    std::uint32_t stored_len;
    std::memcpy(&stored_len, bytes.data() + 4, 4);
    if (length < 1 || static_cast<int>(stored_len) != length) {
      throw FormatError(path.string() + ": manifest declares T=" + std::to_string(length) +
                        " but file header says T=" + std::to_string(stored_len));
    }
    const std::size_t obs_count = static_cast<std::size_t>(length + 1) * dataset.obs_dim;
    const std::size_t act_count = static_cast<std::size_t>(length) * dataset.act_dim;
    const std::size_t expected = 8 + 4 * (obs_count + act_count);
    if (bytes.size() != expected) {
      throw FormatError(path.string() + ": payload holds " + std::to_string(bytes.size()) +
                        " bytes, T=" + std::to_string(length) + " requires " +
                        std::to_string(expected));
    }
    Trajectory t;
    t.id = id;
    t.observations = ReadFloats(bytes, 8, length + 1, dataset.obs_dim);
    t.actions = ReadFloats(bytes, 8 + 4 * obs_count, length, dataset.act_dim);
    dataset.trajectories.push_back(std::move(t));
  }
  try {
    dataset.Validate();
  } catch (const std::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  return dataset;
}

Normalizer Normalizer::Fit(const TrajectoryDataset& dataset) {
  dataset.Validate();
  std::vector<const Matrix*> obs;
  std::vector<const Matrix*> act;
  for (const auto& t : dataset.trajectories) {
    obs.push_back(&t.observations);
    act.push_back(&t.actions);
  }
  Normalizer n;
  n.obs_mean = ColumnMean(obs, dataset.obs_dim);
  n.obs_std = ColumnStd(obs, n.obs_mean);
  n.act_mean = ColumnMean(act, dataset.act_dim);
  n.act_std = ColumnStd(act, n.act_mean);
  return n;
}

Normalizer Normalizer::Identity(int obs_dim, int act_dim) {
  return {Vector::Zero(obs_dim), Vector::Ones(obs_dim), Vector::Zero(act_dim),
          Vector::Ones(act_dim)};
}

Matrix Normalizer::ApplyObs(const Matrix& rows) const {
  return ((rows.rowwise() - obs_mean.transpose()).array().rowwise() /
          obs_std.transpose().array())
      .matrix();
}

Matrix Normalizer::InvertObs(const Matrix& rows) const {
  return ((rows.array().rowwise() * obs_std.transpose().array()).matrix().rowwise() +
          obs_mean.transpose());
}

Matrix Normalizer::ApplyAct(const Matrix& rows) const {
  return ((rows.rowwise() - act_mean.transpose()).array().rowwise() /
          act_std.transpose().array())
      .matrix();
}

Matrix Normalizer::InvertAct(const Matrix& rows) const {
  return ((rows.array().rowwise() * act_std.transpose().array()).matrix().rowwise() +
          act_mean.transpose());
}

TrajectoryDataset Normalizer::Apply(const TrajectoryDataset& dataset) const {
  if (dataset.obs_dim != obs_mean.size() || dataset.act_dim != act_mean.size()) {
    throw ConfigError("normalizer dimensions do not match dataset");
  }
  TrajectoryDataset out = dataset;
  for (auto& t : out.trajectories) {
    t.observations = ApplyObs(t.observations);
    t.actions = ApplyAct(t.actions);
  }
  return out;
}

namespace {

nlohmann::json VecJson(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector JsonVec(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json Normalizer::ToJson() const {
  return {{"obs_mean", VecJson(obs_mean)},
          {"obs_std", VecJson(obs_std)},
          {"act_mean", VecJson(act_mean)},
          {"act_std", VecJson(act_std)}};
}

Normalizer Normalizer::FromJson(const nlohmann::json& j) {
  try {
    return {JsonVec(j.at("obs_mean")), JsonVec(j.at("obs_std")), JsonVec(j.at("act_mean")),
            JsonVec(j.at("act_std"))};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed normalizer: ") + e.what());
  }
}

}  // namespace skillret

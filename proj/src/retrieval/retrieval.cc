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


#include "skillret/retrieval/retrieval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "skillret/errors.h"

namespace skillret {
namespace {

constexpr int kEncodeChunk = 256;

// Encodes sources chunk by chunk so large sets never hold every window.
EmbeddingSet EncodeSources(const SkillModel& model, const TrajectoryDataset& normalized,
                           const std::vector<SampleSource>& sources) {
  EmbeddingSet out;
  out.origin = normalized.role;
  out.entries.reserve(sources.size());
  const int horizon = model.config().horizon;
  std::vector<SubTrajectorySample> windows;
  std::vector<const SubTrajectorySample*> ptrs;
  for (std::size_t begin = 0; begin < sources.size(); begin += kEncodeChunk) {
    const std::size_t end = std::min(sources.size(), begin + kEncodeChunk);
    windows.clear();
    for (std::size_t i = begin; i < end; ++i) {
      windows.push_back(ExtractSample(normalized, sources[i], horizon, 0));
    }
    ptrs.clear();
    for (const auto& w : windows) ptrs.push_back(&w);
    auto qs = model.EncodeAll(ptrs, kEncodeChunk);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      out.entries.push_back({std::move(qs[i]), sources[begin + i]});
    }
  }
  return out;
}

void RequireSameDim(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.size() == 0 || b.size() == 0) return;
  if (a.entries[0].q.dim() != b.entries[0].q.dim()) {
    throw ConfigError("embedding sets have different latent dimensions");
  }
}

double Quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::llround(q * static_cast<double>(v.size() - 1)));
  return v[k];
}

nlohmann::json Quantiles(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return {{"min", Quantile(v, 0.0)}, {"q25", Quantile(v, 0.25)}, {"median", Quantile(v, 0.5)},
          {"q75", Quantile(v, 0.75)}, {"max", Quantile(v, 1.0)}};
}

}  // namespace

std::string RetrievalModeName(RetrievalMode mode) {
  switch (mode) {
    case RetrievalMode::kL2: return "l2";
    case RetrievalMode::kKl: return "kl";
    case RetrievalMode::kRandom: return "random";
    case RetrievalMode::kNone: return "none";
    case RetrievalMode::kAll: return "all";
  }
  return "?";
}

RetrievalMode ParseRetrievalMode(std::string_view name) {
  for (auto m : {RetrievalMode::kL2, RetrievalMode::kKl, RetrievalMode::kRandom,
                 RetrievalMode::kNone, RetrievalMode::kAll}) {
    if (RetrievalModeName(m) == name) return m;
  }
  throw UsageError("unknown retrieval mode '" + std::string(name) +
                   "' (expected l2, kl, random, none or all)");
}

EmbeddingSet EmbedSamples(const SkillModel& model, const TrajectoryDataset& normalized,
                          int count, Rng& rng) {
  if (count < 1) throw UsageError("embed_samples: count must be >= 1");
  const SampleStream stream(normalized, model.config().horizon);
  if (stream.size() == 0) throw UsageError("embed_samples: dataset has no usable windows");
  const std::int64_t n = std::min<std::int64_t>(count, stream.size());
  std::set<SampleSource> seen;
  std::vector<SampleSource> sources;
  sources.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const SampleSource s = stream.Draw(rng);
    if (seen.insert(s).second) sources.push_back(s);
  }
  return EncodeSources(model, normalized, sources);
}

EmbeddingSet EmbedAll(const SkillModel& model, const TrajectoryDataset& normalized) {
  const SampleStream stream(normalized, model.config().horizon);
  if (stream.size() == 0) throw UsageError("embed_samples: dataset has no usable windows");
  std::vector<SampleSource> sources;
  sources.reserve(static_cast<std::size_t>(stream.size()));
  for (std::int64_t i = 0; i < stream.size(); ++i) sources.push_back(stream.At(i));
  return EncodeSources(model, normalized, sources);
}

Matrix PairwiseL2(const EmbeddingSet& prior, const EmbeddingSet& target) {
  RequireSameDim(prior, target);
  const auto n = static_cast<Eigen::Index>(prior.size());
  const auto m = static_cast<Eigen::Index>(target.size());
  Matrix d(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& a = prior.entries[i].q.mean;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Vector& b = target.entries[j].q.mean;
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d(i, j) = std::sqrt(s);
    }
  }
  return d;
}

Matrix PairwiseSymmetricKl(const EmbeddingSet& prior, const EmbeddingSet& target) {
  RequireSameDim(prior, target);
  const auto n = static_cast<Eigen::Index>(prior.size());
  const auto m = static_cast<Eigen::Index>(target.size());
  Matrix d(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      d(i, j) = SymmetricKlDistance(prior.entries[i].q, target.entries[j].q);
    }
  }
  return d;
}

int RetainedCount(double fraction, int n) {
  return static_cast<int>(std::floor(fraction * static_cast<double>(n)));
}

std::vector<RankedPrior> RetrieveTop(const Matrix& distances, int num_prior, double fraction,
                                     RetrievalMode mode, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw UsageError("retrieval fraction must be in [0, 1], got " + std::to_string(fraction));
  }
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<RankedPrior> out;
  switch (mode) {
    case RetrievalMode::kNone:
      return out;
    case RetrievalMode::kAll:
      for (int i = 0; i < num_prior; ++i) out.push_back({i, kNaN});
      return out;
    case RetrievalMode::kRandom: {
      // Partial Fisher-Yates: the first k slots are a uniform k-subset in
      // draw order.
      const int k = RetainedCount(fraction, num_prior);
      std::vector<int> idx(static_cast<std::size_t>(num_prior));
      std::iota(idx.begin(), idx.end(), 0);
      for (int i = 0; i < k; ++i) {
        const auto j = static_cast<int>(rng.UniformInt(i, num_prior - 1));
        std::swap(idx[i], idx[j]);
        out.push_back({idx[i], kNaN});
      }
      return out;
    }
    case RetrievalMode::kL2:
    case RetrievalMode::kKl:
      break;
  }
  const int n = static_cast<int>(distances.rows());
  if (n > 0 && distances.cols() == 0) throw UsageError("retrieval needs at least one target");
  std::vector<RankedPrior> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[i] = {i, distances.row(i).minCoeff()};
  std::stable_sort(all.begin(), all.end(), [](const RankedPrior& a, const RankedPrior& b) {
    return a.distance < b.distance;
  });
  all.resize(static_cast<std::size_t>(RetainedCount(fraction, n)));
  return all;
}

RetrievalSet Retrieve(const SkillModel& model, const TrajectoryDataset& prior_normalized,
                      const TrajectoryDataset& target_normalized,
                      const RetrievalOptions& options, Rng& rng) {
  RetrievalSet set;
  set.mode = options.mode;
  set.fraction = options.fraction;
  if (!(options.fraction >= 0.0 && options.fraction <= 1.0)) {
    throw UsageError("retrieval fraction must be in [0, 1], got " +
                     std::to_string(options.fraction));
  }
  if (options.mode == RetrievalMode::kNone) return set;

  const EmbeddingSet prior = options.mode == RetrievalMode::kAll
                                 ? EmbedAll(model, prior_normalized)
                                 : EmbedSamples(model, prior_normalized, options.num_prior, rng);
  set.num_prior = static_cast<int>(prior.size());
  Matrix distances;
  if (options.mode == RetrievalMode::kL2 || options.mode == RetrievalMode::kKl) {
    const EmbeddingSet target = EmbedSamples(model, target_normalized, options.num_target, rng);
    set.num_target = static_cast<int>(target.size());
    distances = options.mode == RetrievalMode::kL2 ? PairwiseL2(prior, target)
                                                   : PairwiseSymmetricKl(prior, target);
    set.nearest.resize(prior.size());
    for (Eigen::Index i = 0; i < distances.rows(); ++i) set.nearest[i] = distances.row(i).minCoeff();
  }
  set.ranked = RetrieveTop(distances, set.num_prior, options.fraction, options.mode, rng);
  for (const auto& r : set.ranked) {
    set.sources.push_back(prior.entries[r.index].source);
    set.embeddings.push_back(prior.entries[r.index].q.mean);
  }
  return set;
}

nlohmann::json RetrievalSet::ReportJson() const {
  nlohmann::json selected = nlohmann::json::array();
  std::vector<double> kept;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    nlohmann::json e = {{"trajectory_id", sources[i].trajectory_id},
                        {"start", sources[i].start}};
    if (std::isfinite(ranked[i].distance)) {
      e["distance"] = ranked[i].distance;
      kept.push_back(ranked[i].distance);
    }
    selected.push_back(std::move(e));
  }
  return {{"schema_version", 1},
          {"mode", RetrievalModeName(mode)},
          {"fraction", fraction},
          {"num_prior", num_prior},
          {"num_target", num_target},
          {"num_selected", ranked.size()},
          {"nearest_distance_quantiles", Quantiles(nearest)},
          {"selected_distance_quantiles", Quantiles(kept)},
          {"selected", std::move(selected)}};
}

std::vector<PolicyExample> BuildRetrievalDataset(const TrajectoryDataset& prior_normalized,
                                                 const RetrievalSet& set, int frames) {
  if (set.sources.size() != set.embeddings.size()) {
    throw IntegrityError("retrieval set sources and embeddings differ in length");
  }
  // Only the frame stack is needed; a one-step window keeps extraction cheap
  // while still validating the source against the dataset.
  std::vector<PolicyExample> out;
  out.reserve(set.sources.size());
  for (std::size_t i = 0; i < set.sources.size(); ++i) {
    SubTrajectorySample s = ExtractSample(prior_normalized, set.sources[i], 1, frames);
    out.push_back({std::move(s.frame_stack), set.embeddings[i], 1, set.sources[i]});
  }
  return out;
}

}  // namespace skillret

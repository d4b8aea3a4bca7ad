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


#ifndef SKILLRET_RETRIEVAL_RETRIEVAL_H_
#define SKILLRET_RETRIEVAL_RETRIEVAL_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skillret/data/sampling.h"
#include "skillret/data/trajectory.h"
#include "skillret/numcore/gaussian.h"
#include "skillret/numcore/rng.h"
#include "skillret/skill/skill_model.h"

namespace skillret {

enum class RetrievalMode { kL2, kKl, kRandom, kNone, kAll };

std::string RetrievalModeName(RetrievalMode mode);
// Throws UsageError for an unknown name.
RetrievalMode ParseRetrievalMode(std::string_view name);

struct Embedding {
  DiagGaussian q;
  SampleSource source;
};

struct EmbeddingSet {
  std::vector<Embedding> entries;
  DatasetRole origin = DatasetRole::kPrior;

  std::size_t size() const { return entries.size(); }
};

// Draws min(count, available windows) starts from the dataset's stream,
// drops repeated sources (first draw wins) and encodes the rest. The
// dataset must already be normalized.
EmbeddingSet EmbedSamples(const SkillModel& model, const TrajectoryDataset& normalized,
                          int count, Rng& rng);
// Every window of the stream, in stream order.
EmbeddingSet EmbedAll(const SkillModel& model, const TrajectoryDataset& normalized);

// D[i][j] = ||mu_i - mu_j||, accumulated in dimension order.
Matrix PairwiseL2(const EmbeddingSet& prior, const EmbeddingSet& target);
// D[i][j] = symmetric KL between the full distributions.
Matrix PairwiseSymmetricKl(const EmbeddingSet& prior, const EmbeddingSet& target);

struct RankedPrior {
  int index = 0;  // row of the distance matrix / prior embedding index
  double distance = 0.0;  // closest-target distance; NaN when not computed
};

// Number of prior entries kept for fraction r out of n: floor(r * n).
int RetainedCount(double fraction, int n);

// The ranking step. For l2/kl, `distances` is N x M and entries are ordered
// by their per-row minimum, ties broken by row index. random draws
// floor(r*N) distinct rows; all keeps every row in index order; none keeps
// nothing. `num_prior` is used when `distances` is empty (random/all/none).
// Throws UsageError if r is outside [0, 1].
std::vector<RankedPrior> RetrieveTop(const Matrix& distances, int num_prior, double fraction,
                                     RetrievalMode mode, Rng& rng);

struct RetrievalSet {
  RetrievalMode mode = RetrievalMode::kL2;
  double fraction = 0.0;
  int num_prior = 0;   // N after capping and deduplication
  int num_target = 0;  // M
  std::vector<RankedPrior> ranked;
  std::vector<SampleSource> sources;  // parallel to ranked
  std::vector<Vector> embeddings;     // stored prior means, parallel to ranked
  std::vector<double> nearest;        // per-prior min distance (l2/kl only)

  nlohmann::json ReportJson() const;
};

struct RetrievalOptions {
  RetrievalMode mode = RetrievalMode::kL2;
  double fraction = 0.1;
  int num_prior = 20000;
  int num_target = 1000;
};

// Embeds prior and target windows and ranks the prior ones. Modes none,
// random and all skip the target side; all enumerates every prior window.
RetrievalSet Retrieve(const SkillModel& model, const TrajectoryDataset& prior_normalized,
                      const TrajectoryDataset& target_normalized,
                      const RetrievalOptions& options, Rng& rng);

// A policy training example: F-frame history, supervision latent and the
// dataset id (0 target, 1 retrieved).
struct PolicyExample {
  Matrix frame_stack;  // F x obs_dim
  Vector z;
  int dataset_id = 0;
  SampleSource source;
};

// Pairs each retained source's stored mean with its re-extracted frame
// stack. Throws IntegrityError if a source no longer fits the dataset.
std::vector<PolicyExample> BuildRetrievalDataset(const TrajectoryDataset& prior_normalized,
                                                 const RetrievalSet& set, int frames);

}  // namespace skillret

#endif  // SKILLRET_RETRIEVAL_RETRIEVAL_H_

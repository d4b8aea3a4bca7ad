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


// Acceptance suite: prints one PASS/FAIL line per criterion. Criteria named
// with --known-failure are still run and reported but do not affect the
// exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.h"
#include "json.hpp"
#include "retrieval_oracle.h"
#include "skillret/cli/commands.h"
#include "skillret/cli/config.h"
#include "skillret/env/rollout.h"
#include "skillret/env/scripted.h"
#include "skillret/errors.h"
#include "skillret/numcore/gaussian.h"
#include "skillret/policy/agents.h"
#include "skillret/policy/train.h"
#include "skillret/skill/pretrain.h"
#include "test_util.h"

namespace skillret::acceptance {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::set<int> only;
  std::set<int> known_failures;
  fs::path workdir;
  std::string cli;
  fs::path report;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. Gradients of the skill and policy losses against central differences.

Outcome GradientCriterion() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  std::ostringstream detail;

  const SkillModelConfig sc = testing::TinySkillConfig();
  SkillModel skill(sc);
  Rng rng(101);
  skill.Initialize(rng);
  const TrajectoryDataset data = testing::RandomNormalDataset(rng, {30, 40}, 3, 2);
  const SkillBatch batch = testing::RandomSkillBatch(sc, data, 6, 8, rng);
  double encoder_tp = 0.0;
  for (const auto& [beta, alpha] : std::vector<std::pair<double, double>>{{0.1, 0.01}, {0.0, 1.0}}) {
    SkillLossWeights w;
    w.beta = beta;
    w.alpha = alpha;
    skill.params().ZeroGrad();
    Tape tape;
    tape.Backward(skill.Loss(tape, batch, w).total);
    const std::vector<double> analytic = skill.params().FlatGrads();
    const auto check = testing::CheckGradients(
        skill.params(), [&] { return skill.Loss(batch, w).total; }, analytic);
    worst = std::max(worst, check.max_error);
    checked += check.checked;
    if (alpha == 1.0) {
      // The TP-only gradient must reach the encoder for the check above to
      // cover that path.
      w.alpha = 0.0;
      skill.params().ZeroGrad();
      Tape t0;
      t0.Backward(skill.Loss(t0, batch, w).total);
      const std::vector<double> without = skill.params().FlatGrads();
      std::size_t flat = 0;
      for (std::size_t t = 0; t < skill.params().num_tensors(); ++t) {
        const ParamTensor& p = skill.params().tensor(t);
        for (std::size_t i = 0; i < p.size(); ++i, ++flat) {
          if (p.name.rfind("encoder.", 0) == 0) {
            encoder_tp = std::max(encoder_tp, std::abs(analytic[flat] - without[flat]));
          }
        }
      }
    }
  }
  const std::size_t skill_params = skill.params().num_values();

  SkillPolicyConfig pc;
  pc.obs_dim = 3;
  pc.latent_dim = 2;
  pc.frames = 4;
  pc.rnn_hidden = 5;
  pc.rnn_layers = 2;
  SkillPolicy policy(pc);
  policy.Initialize(rng);
  std::vector<Matrix> target_stacks, retrieved_stacks;
  for (int i = 0; i < 4; ++i) {
    target_stacks.push_back(rng.NormalMatrix(4, 3));
    retrieved_stacks.push_back(rng.NormalMatrix(4, 3));
  }
  const auto pointers = [](const std::vector<Matrix>& v) {
    std::vector<const Matrix*> out;
    for (const Matrix& m : v) out.push_back(&m);
    return out;
  };
  const Matrix z = rng.NormalMatrix(4, 2), zr = rng.NormalMatrix(4, 2);
  const auto policy_loss = [&](Tape& tape) {
    const Var a = policy.Forward(tape, FrameBatch::FromStacks(pointers(target_stacks)), {0, 0, 0, 0});
    const Var b = policy.Forward(tape, FrameBatch::FromStacks(pointers(retrieved_stacks)), {1, 1, 1, 1});
    return PolicyLoss(a, tape.Constant(z), b, tape.Constant(zr), 0.7);
  };
  policy.params().ZeroGrad();
  {
    Tape tape;
    tape.Backward(policy_loss(tape));
  }
  const auto pcheck = testing::CheckGradients(
      policy.params(), [&] { Tape t; return policy_loss(t).value()(0, 0); },
      policy.params().FlatGrads());
  worst = std::max(worst, pcheck.max_error);
  checked += pcheck.checked;

  const double seconds = Seconds(start);
  const bool small = skill_params <= 2000 && policy.params().num_values() <= 2000;
  detail << "max rel err " << Fmt(worst, 3) << " over " << checked << " values (skill "
         << skill_params << " params, policy " << policy.params().num_values()
         << "), TP encoder grad " << Fmt(encoder_tp, 3) << ", " << Fmt(seconds, 3) << " s";
  return {worst <= 1e-4 && small && encoder_tp > 0.0 && seconds < 60.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. Retrieval against the exhaustive oracle.

Outcome RetrievalCriterion() {
  const auto start = std::chrono::steady_clock::now();
  Rng gen(202);
  int mismatches = 0, compared = 0, max_n = 0, max_m = 0;
  for (int instance = 0; instance < 100; ++instance) {
    // Every tenth instance is at the full size.
    const int n = instance % 10 == 0 ? 5000 : static_cast<int>(gen.UniformInt(1, 5000));
    const int m = instance % 10 == 0 ? 200 : static_cast<int>(gen.UniformInt(1, 200));
    const int d = static_cast<int>(gen.UniformInt(1, 16));
    const bool grid = instance % 2 == 1;
    const double r = instance % 10 == 5 ? 1.0 : gen.Uniform();
    max_n = std::max(max_n, n);
    max_m = std::max(max_m, m);
    const EmbeddingSet prior = testing::RandomEmbeddings(gen, n, d, grid, DatasetRole::kPrior);
    const EmbeddingSet target = testing::RandomEmbeddings(gen, m, d, grid, DatasetRole::kTarget);
    for (RetrievalMode mode : {RetrievalMode::kL2, RetrievalMode::kKl, RetrievalMode::kRandom,
                               RetrievalMode::kNone, RetrievalMode::kAll}) {
      Rng lib_rng(1000 + instance), ref_rng(1000 + instance);
      ++compared;
      if (!testing::SameRetrieval(testing::LibraryRetrieve(prior, target, r, mode, lib_rng),
                                  testing::OracleRetrieve(prior, target, r, mode, ref_rng))) {
        ++mismatches;
      }
    }
  }
  const double seconds = Seconds(start);
  std::ostringstream detail;
  detail << mismatches << "/" << compared << " mismatches over 100 instances (N <= " << max_n
         << ", M <= " << max_m << "), " << Fmt(seconds, 3) << " s";
  return {mismatches == 0 && seconds < 60.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 3. Gaussian identities and Monte-Carlo agreement.

double LogDensityRatio(const Vector& z, const DiagGaussian& q, const DiagGaussian& p) {
  double s = 0.0;
  for (int j = 0; j < z.size(); ++j) {
    const double uq = (z[j] - q.mean[j]) * std::exp(-q.log_std[j]);
    const double up = (z[j] - p.mean[j]) * std::exp(-p.log_std[j]);
    s += p.log_std[j] - q.log_std[j] - 0.5 * uq * uq + 0.5 * up * up;
  }
  return s;
}

double MonteCarloKl(const DiagGaussian& q, const DiagGaussian& p, int samples, Rng& rng) {
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    sum += LogDensityRatio(ReparamSample(q, rng.NormalVector(q.dim())), q, p);
  }
  return sum / samples;
}

DiagGaussian RandomGaussian(Rng& rng, int d) {
  DiagGaussian g{Vector(d), Vector(d)};
  for (int j = 0; j < d; ++j) {
    g.mean[j] = 0.5 * rng.Normal();
    g.log_std[j] = rng.Uniform(-0.4, 0.4);
  }
  return g;
}

Outcome GaussianCriterion() {
  Rng rng(303);
  double self_kl = 0.0, asym = 0.0, worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const int d = static_cast<int>(rng.UniformInt(1, 4));
    const DiagGaussian a = RandomGaussian(rng, d), b = RandomGaussian(rng, d);
    self_kl = std::max({self_kl, std::abs(GaussianKl(a, a)), std::abs(GaussianKl(b, b))});
    asym = std::max(asym, std::abs(SymmetricKlDistance(a, b) - SymmetricKlDistance(b, a)));
    const double ab = MonteCarloKl(a, b, 1000000, rng);
    const double ba = MonteCarloKl(b, a, 1000000, rng);
    worst = std::max({worst, std::abs(ab - GaussianKl(a, b)), std::abs(ba - GaussianKl(b, a)),
                      std::abs(0.5 * (ab + ba) - SymmetricKlDistance(a, b))});
  }
  std::ostringstream detail;
  detail << "max |KL(q,q)| " << self_kl << ", max asymmetry " << asym
         << ", max |closed form - MC(1e6)| " << Fmt(worst, 3) << " over 20 pairs";
  return {self_kl == 0.0 && asym == 0.0 && worst <= 1e-2, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Sub-trajectory sampling invariants and start uniformity.

Outcome SamplingCriterion() {
  constexpr int kH = 10, kF = 10, kDraws = 100000;
  Rng rng(404);
  // Boundary-heavy lengths; 5 and 9 are shorter than H and never drawn.
  const std::vector<int> lengths = {10, 11, 5, 13, 20, 9, 31, 47};
  const TrajectoryDataset data = testing::RandomNormalDataset(rng, lengths, 2, 2);
  std::vector<std::int64_t> offset(lengths.size(), -1);
  std::int64_t bins = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] >= kH) {
      offset[i] = bins;
      bins += lengths[i];
    }
  }
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  int violations = 0;
  Rng draw(405);
  for (int i = 0; i < kDraws; ++i) {
    const SubTrajectorySample s = SampleSubtrajectory(data, kH, kF, draw);
    const int tr = s.source.trajectory;
    const Trajectory& t = data.trajectories[tr];
    const int start = s.source.start;
    bool ok = offset[tr] >= 0 && start >= 0 && start < t.length() && s.window_obs.rows() == kH + 1 &&
              s.window_actions.rows() == kH && s.frame_stack.rows() == kF;
    for (int k = 0; ok && k <= kH; ++k) {
      ok = s.window_obs.row(k) == t.observations.row(std::min(start + k, t.length()));
    }
    for (int k = 0; ok && k < kH; ++k) {
      ok = start + k < t.length() ? s.window_actions.row(k) == t.actions.row(start + k)
                                  : s.window_actions.row(k).isZero(0.0);
    }
    for (int k = 0; ok && k < kF; ++k) {
      ok = s.frame_stack.row(kF - 1 - k) == t.observations.row(std::max(0, start - k));
    }
    if (!ok) {
      ++violations;
      continue;
    }
    ++counts[static_cast<std::size_t>(offset[tr] + start)];
  }
  const double chi2 = testing::ChiSquareUniform(counts);
  const double critical = testing::ChiSquareCritical001(static_cast<int>(bins) - 1);
  const long empty = std::count(counts.begin(), counts.end(), 0L);
  std::ostringstream detail;
  detail << kDraws << " draws, " << violations << " violations, " << empty
         << " unvisited starts; chi2 " << Fmt(chi2) << " < " << Fmt(critical) << " (df "
         << bins - 1 << ", p = 0.001)";
  return {violations == 0 && empty == 0 && chi2 < critical, detail.str()};
}

// ---------------------------------------------------------------------------
// Shared pretraining for criteria 5 and 7.

struct World {
  TrajectoryDataset prior;
  std::map<std::uint64_t, Checkpoint> skills;
  std::map<std::uint64_t, double> pretrain_seconds;
};

cli::ExperimentConfig DeskConfig(std::uint64_t seed) {
  cli::ExperimentConfig c = cli::Preset("desk");
  c.seed = seed;
  return c;
}

const TrajectoryDataset& PriorData(World& world) {
  if (world.prior.trajectories.empty()) {
    const cli::ExperimentConfig c = DeskConfig(0);
    world.prior = env::GeneratePlayDataset(0, c.data.play_trajectories, c.data.play_steps);
  }
  return world.prior;
}

const Checkpoint& PretrainedSkill(World& world, std::uint64_t seed) {
  if (!world.skills.contains(seed)) {
    const cli::ExperimentConfig c = DeskConfig(seed);
    const TrajectoryDataset& prior = PriorData(world);
    const auto start = std::chrono::steady_clock::now();
    const PretrainResult r = Pretrain(c.skill_model, c.skill_train, prior, seed);
    world.pretrain_seconds[seed] = Seconds(start);
    if (r.diverged) throw TrainingError("pretraining diverged: " + r.error);
    // The f32 file round trip, as in runs that go through disk.
    world.skills[seed] = DecodeCheckpoint(EncodeCheckpoint(r.checkpoint, Dtype::kF32));
    std::cerr << "pretrained seed " << seed << " in " << Fmt(world.pretrain_seconds[seed]) << " s\n";
  }
  return world.skills.at(seed);
}

// ---------------------------------------------------------------------------
// 5. Held-out reconstruction and temporal prediction after pretraining.

Outcome SkillLearningCriterion(World& world) {
  const cli::ExperimentConfig c = DeskConfig(0);
  const TrajectoryDataset& prior = PriorData(world);
  SkillTrainConfig zero = c.skill_train;
  zero.steps = 0;
  const LoadedSkill initial = LoadSkillCheckpoint(Pretrain(c.skill_model, zero, prior, 0).checkpoint);
  const LoadedSkill trained = LoadSkillCheckpoint(PretrainedSkill(world, 0));
  // Fresh play trajectories from an unrelated seed.
  const TrajectoryDataset held_out =
      trained.normalizer.Apply(env::GeneratePlayDataset(9001, 20, c.data.play_steps));
  const int max_offset = c.skill_train.max_offset;
  const SkillEvaluation before = EvaluateSkillModel(*initial.model, held_out, 5000, max_offset, 77);
  const SkillEvaluation after = EvaluateSkillModel(*trained.model, held_out, 5000, max_offset, 77);
  const double recon_ratio = after.recon_mse / before.recon_mse;
  const double tp_ratio = after.tp_mae / after.tp_baseline_mae;
  const double seconds = world.pretrain_seconds.at(0);
  std::ostringstream detail;
  detail << "recon MSE " << Fmt(before.recon_mse) << " -> " << Fmt(after.recon_mse) << " (ratio "
         << Fmt(recon_ratio, 3) << " <= 0.2: " << (recon_ratio <= 0.2 ? "yes" : "no")
         << "); TP MAE " << Fmt(after.tp_mae) << " vs baseline " << Fmt(after.tp_baseline_mae)
         << " (ratio " << Fmt(tp_ratio, 3) << " <= 0.5: " << (tp_ratio <= 0.5 ? "yes" : "no")
         << "); pretraining " << Fmt(seconds) << " s";
  return {recon_ratio <= 0.2 && tp_ratio <= 0.5 && seconds <= 20 * 60.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Ablation identities.

Outcome AblationIdentityCriterion(World& world) {
  bool ok = true;
  std::ostringstream detail;
  // alpha = 0 against the TP-free objective, on desk-sized networks.
  const cli::ExperimentConfig c = DeskConfig(0);
  const TrajectoryDataset prior = TakeFirst(PriorData(world), 20);
  SkillModel model(c.skill_model);
  Rng init(606);
  model.Initialize(init);
  const TrajectoryDataset normalized = Normalizer::Fit(prior).Apply(prior);
  const SampleStream stream(normalized, c.skill_model.horizon);
  SkillTrainConfig tc = c.skill_train;
  SkillTrainer trainer(model, tc);
  Rng sample_rng(607), noise_rng(608);
  int loss_mismatch = 0;
  for (int i = 0; i < 20; ++i) {
    const SkillBatch batch = trainer.SampleBatch(stream, normalized, sample_rng, noise_rng);
    SkillLossWeights w = tc.weights;
    w.alpha = 0.0;
    const SkillLossBreakdown l = model.Loss(batch, w);
    if (l.total != l.recon + w.beta * l.kl) ++loss_mismatch;
  }
  detail << "alpha=0: " << loss_mismatch << "/20 batches differ from recon + beta*kl; ";
  ok = ok && loss_mismatch == 0;

  // none with gamma = 0 against target-only training.
  const auto trajectory = [&](bool target_only) {
    cli::ExperimentConfig e = c;
    e.phase2.steps = 60;
    e.phase2.checkpoint_interval = 10;
    e.phase2.retrieval.num_prior = 2000;
    e.phase2.retrieval.num_target = 200;
    if (target_only) {
      e.phase2.target_only = true;
    } else {
      e.phase2.retrieval.mode = RetrievalMode::kNone;
      e.phase2.gamma = 0.0;
    }
    TrajectoryDataset target =
        TakeFirst(env::GenerateDemoDataset(env::MakeTask(env::TaskName::kSettingUp), 0, 3), 3);
    target.role = DatasetRole::kTarget;
    std::vector<std::string> states;
    for (const cli::RunCheckpoint& r :
         cli::TrainSkillPolicyRun(e, prior, target, PretrainedSkill(world, 0), 5)) {
      states.push_back(EncodeCheckpoint(r.policy, Dtype::kF64) + EncodeCheckpoint(*r.skill, Dtype::kF64));
    }
    return states;
  };
  const std::vector<std::string> a = trajectory(false), b = trajectory(true);
  int differing = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) differing += a[i] != b[i];
  detail << "none/gamma=0 vs target-only: " << differing << " of " << a.size()
         << " checkpoints differ";
  ok = ok && a.size() == b.size() && a.size() == 6 && differing == 0;
  return {ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 7. End-to-end ordering on both tasks.

Outcome EndToEndCriterion(World& world) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::uint64_t> seeds = {0, 1, 2};
  double pretrain_seconds = 0.0;
  for (std::uint64_t s : seeds) {
    PretrainedSkill(world, s);
    pretrain_seconds += world.pretrain_seconds.at(s);
  }
  const TrajectoryDataset& prior = PriorData(world);
  bool ok = true;
  std::ostringstream detail;
  for (env::TaskName task : {env::TaskName::kSettingUp, env::TaskName::kCleaningUp}) {
    cli::ExperimentConfig base = DeskConfig(0);
    base.task = env::TaskString(task);
    TrajectoryDataset target = TakeFirst(
        env::GenerateDemoDataset(env::MakeTask(task), 0, base.data.demos_per_task),
        static_cast<std::size_t>(base.data.target_demos));
    target.role = DatasetRole::kTarget;
    std::map<std::string, std::vector<double>> rates;
    for (std::uint64_t seed : seeds) {
      cli::ExperimentConfig c = base;
      c.seed = seed;
      const Checkpoint& skill = PretrainedSkill(world, seed);
      for (const std::string mode : {"full", "none"}) {
        cli::ExperimentConfig m = c;
        if (mode == "none") m.phase2.retrieval.mode = RetrievalMode::kNone;
        const env::EvalReport r =
            cli::EvaluateRun(cli::TrainSkillPolicyRun(m, prior, target, skill, seed), m);
        rates[mode].push_back(r.best);
        std::cerr << base.task << " " << mode << " seed " << seed << ": " << r.best << "\n";
      }
      const env::EvalReport bc = cli::EvaluateRun(cli::TrainBcRun(c, target, nullptr, seed), c);
      rates["bc"].push_back(bc.best);
      std::cerr << base.task << " bc seed " << seed << ": " << bc.best << "\n";
    }
    const auto mean = [&](const std::string& k) {
      double s = 0.0;
      for (double v : rates[k]) s += v;
      return s / static_cast<double>(rates[k].size());
    };
    const double full = mean("full"), none = mean("none"), bc = mean("bc");
    const bool task_ok = full >= none && full >= bc && full >= 0.6;
    ok = ok && task_ok;
    detail << base.task << ": full " << Fmt(full, 3) << ", no-retrieval " << Fmt(none, 3)
           << ", bc " << Fmt(bc, 3) << (task_ok ? "" : " [fails]") << "; ";
  }
  const double seconds = Seconds(start) + pretrain_seconds;
  detail << "total " << Fmt(seconds / 60.0, 3) << " min";
  return {ok && seconds <= 2 * 3600.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Rollout protocol.

// Forwards to another controller and records the actions between queries.
class Instrumented : public env::Controller {
 public:
  explicit Instrumented(env::Controller& inner) : inner_(inner) {}
  int horizon() const override { return inner_.horizon(); }
  void BeginEpisode() override {
    segments_.clear();
    inner_.BeginEpisode();
  }
  void SelectSkill(std::span<const Vector> history) override {
    segments_.push_back(0);
    inner_.SelectSkill(history);
  }
  Vector Act(const Vector& observation) override {
    if (!segments_.empty()) ++segments_.back();
    return inner_.Act(observation);
  }
  const std::vector<int>& segments() const { return segments_; }

 private:
  env::Controller& inner_;
  std::vector<int> segments_;
};

Outcome RolloutCriterion(World&) {
  const cli::ExperimentConfig c = DeskConfig(0);
  SkillModel skill(c.skill_model);
  Rng init(808);
  skill.Initialize(init);
  SkillPolicyConfig pc = c.phase2.policy;
  pc.obs_dim = c.skill_model.obs_dim;
  pc.latent_dim = c.skill_model.latent_dim;
  SkillPolicy policy(pc);
  policy.Initialize(init);
  const int h = c.skill_model.horizon;
  int bad = 0, successes = 0, queries = 0;
  for (int e = 0; e < 100; ++e) {
    const env::TaskSpec task = env::MakeTask(e % 2 == 0 ? env::TaskName::kSettingUp
                                                        : env::TaskName::kCleaningUp);
    // Half the episodes use the scripted solver, which succeeds part-way
    // through a skill; the rest run an untrained skill agent to the budget.
    SkillAgent agent(policy, skill, Normalizer::Identity(env::kObsDim, env::kActDim));
    env::ScriptedController scripted(task, 5000 + e, h);
    env::Controller& inner = e < 50 ? static_cast<env::Controller&>(scripted) : agent;
    Instrumented probe(inner);
    Rng rng(env::EpisodeSeed(88, e));
    env::RolloutTrace trace;
    const env::EpisodeResult r = env::Rollout(probe, task, rng, task.budget, &trace);
    successes += r.success;
    queries += r.policy_queries;
    bool ok = r.policy_queries == (r.steps + h - 1) / h &&
              static_cast<int>(probe.segments().size()) == r.policy_queries;
    for (int q = 0; ok && q < r.policy_queries; ++q) {
      const int expected = std::min(h, r.steps - q * h);
      ok = probe.segments()[q] == expected && trace.query_steps[q] == q * h;
    }
    bad += !ok;
  }
  std::ostringstream detail;
  detail << bad << "/100 episodes violate queries = ceil(steps/H) or skill atomicity ("
         << successes << " early successes, " << queries << " queries)";
  return {bad == 0 && successes > 0 && successes < 100, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Determinism of every command.

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() != ".log") {
      out[fs::relative(e.path(), root).string()] = ReadFile(e.path());
    }
  }
  return out;
}

Outcome DeterminismCriterion(const Options& options) {
  if (options.cli.empty()) return {false, "no CLI binary given (--cli or SKILLRET_CLI)"};
  const nlohmann::json tiny = {
      {"data", {{"play_trajectories", 6}, {"play_steps", 300}, {"demos_per_task", 4},
                {"target_demos", 3}}},
      {"skill_model", {{"latent_dim", 4}, {"rnn_hidden", 12}, {"mlp_hidden", {12}},
                       {"prior_hidden", {12}}, {"tp_hidden", {12}}}},
      {"skill_train", {{"steps", 40}, {"log_interval", 10}, {"checkpoint_interval", 20}}},
      {"phase2", {{"steps", 30}, {"checkpoint_interval", 10}, {"log_interval", 10},
                  {"policy", {{"rnn_hidden", 12}}},
                  {"retrieval", {{"num_prior", 500}, {"num_target", 50}}}}},
      {"bc", {{"steps", 20}, {"prior_steps", 20}, {"checkpoint_interval", 10},
              {"policy", {{"rnn_hidden", 12}}}}},
      {"eval", {{"episodes", 3}, {"every", 1}}},
      {"ablate", {{"seeds", {0, 1}}}}};
  const std::vector<std::string> commands = {
      "gen-data --out data",
      "skill-pretrain --data data --out skill",
      "skill-pretrain --data data --no-tp --out skill_notp",
      "retrieve --data data --skill skill/skill.ckpt --retrieval-mode kl --out retrieve",
      "policy-train --data data --skill skill/skill.ckpt --out policy",
      "policy-train --data data --skill skill/skill.ckpt --retrieval-mode random --out policy_random",
      "bc-train --data data --ft --out bc",
      "eval --run policy --out eval_policy",
      "eval --run bc --out eval_bc",
      "eval --scripted --task cleaning_up --out eval_scripted",
      "ablate --data data --retrieval-mode l2 none --with-bc --out ablate"};
  std::vector<std::map<std::string, std::string>> trees;
  for (const std::string run : {"a", "b"}) {
    const fs::path dir = options.workdir / "determinism" / run;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "tiny.json") << tiny.dump();
    for (const std::string& cmd : commands) {
      const std::string line = "cd '" + dir.string() + "' && '" + options.cli + "' " +
                               cmd.substr(0, cmd.find(' ')) + " --config tiny.json --seed 3" +
                               cmd.substr(cmd.find(' ')) + " >>commands.log 2>&1";
      if (std::system(line.c_str()) != 0) {
        return {false, "command failed: skillret " + cmd + " (see " + (dir / "commands.log").string() + ")"};
      }
    }
    trees.push_back(Tree(dir));
  }
  int differing = 0;
  std::string first;
  for (const auto& [name, content] : trees[0]) {
    const auto it = trees[1].find(name);
    if (it == trees[1].end() || it->second != content) {
      if (differing++ == 0) first = name;
    }
  }
  const bool same_set = trees[0].size() == trees[1].size();
  std::ostringstream detail;
  detail << commands.size() << " commands run twice, " << trees[0].size() << " output files, "
         << differing << " differ" << (first.empty() ? "" : " (first: " + first + ")");
  return {same_set && differing == 0 && trees[0].size() > 20, detail.str()};
}

}  // namespace
}  // namespace skillret::acceptance

int main(int argc, char** argv) {
  using namespace skillret::acceptance;
  Options options;
  std::vector<int> only, known;
  std::string workdir = (std::filesystem::temp_directory_path() / "skillret_acceptance").string();
  std::string report;
  CLI::App app{"acceptance suite"};
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--known-failure", known, "criteria reported but excluded from the exit status");
  app.add_option("--workdir", workdir, "scratch directory");
  app.add_option("--cli", options.cli, "skillret binary (default: $SKILLRET_CLI)");
  app.add_option("--report", report, "write results as JSON");
  CLI11_PARSE(app, argc, argv);
  options.only = {only.begin(), only.end()};
  options.known_failures = {known.begin(), known.end()};
  options.workdir = workdir;
  if (options.cli.empty() && std::getenv("SKILLRET_CLI") != nullptr) {
    options.cli = std::getenv("SKILLRET_CLI");
  }
  if (!options.cli.empty()) options.cli = std::filesystem::absolute(options.cli).string();
  options.workdir = std::filesystem::absolute(options.workdir);
  std::filesystem::create_directories(options.workdir);

  World world;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", [] { return GradientCriterion(); }},
      {"retrieval oracle equivalence", [] { return RetrievalCriterion(); }},
      {"gaussian identities", [] { return GaussianCriterion(); }},
      {"sampling and padding invariants", [] { return SamplingCriterion(); }},
      {"skill model learning signal", [&] { return SkillLearningCriterion(world); }},
      {"ablation identities", [&] { return AblationIdentityCriterion(world); }},
      {"end-to-end ordering", [&] { return EndToEndCriterion(world); }},
      {"rollout protocol", [&] { return RolloutCriterion(world); }},
      {"determinism", [&] { return DeterminismCriterion(options); }},
  };
  bool all_ok = true;
  nlohmann::json results = nlohmann::json::array();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() && !options.only.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool known_failure = options.known_failures.contains(id);
    if (!o.pass && !known_failure) all_ok = false;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " "
              << criteria[i].first << ": " << o.detail << " [" << Fmt(Seconds(start), 4) << " s]"
              << (known_failure ? (o.pass ? " (listed as known failure)" : " (known failure)") : "")
              << std::endl;
    results.push_back({{"criterion", id}, {"name", criteria[i].first}, {"pass", o.pass},
                       {"known_failure", known_failure}, {"detail", o.detail},
                       {"seconds", Seconds(start)}});
  }
  if (!report.empty()) std::ofstream(report) << results.dump(2) << "\n";
  return all_ok ? 0 : 1;
}

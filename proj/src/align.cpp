#include "lmap/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lmap/random.hpp"

namespace lmap {

AlignmentProblem::AlignmentProblem(std::vector<Observation> observations,
                                   RelatednessMatrix relatedness,
                                   std::vector<std::string> recording_ids)
    : observations_(std::move(observations)),
      relatedness_(std::move(relatedness)),
      recording_ids_(std::move(recording_ids)) {
  if (relatedness_.size() != observations_.size()) {
    throw InputError("alignment problem: relatedness is " + std::to_string(relatedness_.size()) +
                     " wide for " + std::to_string(observations_.size()) + " observations");
  }
  if (recording_ids_.empty()) recording_ids_ = recording_ids_of(observations_);

  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < recording_ids_.size(); ++r) {
    if (!index.emplace(recording_ids_[r], r).second) {
      throw InputError("alignment problem: repeated recording id '" + recording_ids_[r] + "'");
    }
  }
  recording_index_.reserve(observations_.size());
  for (const auto& o : observations_) {
    auto it = index.find(o.recording_id);
    if (it == index.end()) {
      throw InputError("alignment problem: observation from unknown recording '" +
                       o.recording_id + "'");
    }
    recording_index_.push_back(it->second);
  }

  linked_.assign(recording_ids_.size(), 0);
  for (const auto& e : relatedness_.nonzero_entries()) {
    const std::size_t ri = recording_index_[e.i], rj = recording_index_[e.j];
    pairs_.push_back({e.i, e.j, ri, rj, e.score});
    if (ri != rj) linked_[ri] = linked_[rj] = 1;
  }
}

bool AlignmentProblem::has_cross_recording_relatedness() const {
  return std::any_of(linked_.begin(), linked_.end(), [](char c) { return c != 0; });
}

std::vector<RigidTransform2d> AlignmentProblem::dense(const TransformMap& transforms) const {
  std::vector<RigidTransform2d> out;
  out.reserve(recording_ids_.size());
  for (const auto& id : recording_ids_) {
    auto it = transforms.find(id);
    if (it == transforms.end()) throw InputError("missing transform for recording '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

TransformMap AlignmentProblem::to_map(std::span<const RigidTransform2d> transforms) const {
  TransformMap out;
  for (std::size_t r = 0; r < recording_ids_.size(); ++r) out[recording_ids_[r]] = transforms[r];
  return out;
}

double objective(const AlignmentProblem& problem, const TransformMap& transforms) {
  const auto dense = problem.dense(transforms);
  return objective<double>(problem, dense);
}

Eigen::MatrixX3d gradient(const AlignmentProblem& problem, const TransformMap& transforms) {
  const auto dense = problem.dense(transforms);
  return gradient<double>(problem, dense);
}

void AlignmentConfig::validate() const {
  if (!(learning_rate > 0)) throw InputError("alignment: learning_rate must be positive");
  if (!(rel_tol > 0)) throw InputError("alignment: rel_tol must be positive");
  if (restarts < 1) throw InputError("alignment: restarts must be at least 1");
  if (!(restart_translation_scale >= 0)) {
    throw InputError("alignment: restart_translation_scale must be non-negative");
  }
  if (!(min_step > 0)) throw InputError("alignment: min_step must be positive");
}

DescentTrace run_descent(const AlignmentProblem& problem, std::vector<RigidTransform2d> initial,
                         const AlignmentConfig& config) {
  const std::size_t m = problem.num_recordings();
  if (initial.size() != m) throw InputError("run_descent: one initial transform per recording");

  DescentTrace trace;
  trace.transforms = std::move(initial);
  if (m > 0) trace.transforms[0] = RigidTransform2d::identity();
  double current = objective<double>(problem, trace.transforms);
  trace.accepted.push_back(current);

  std::vector<RigidTransform2d> candidate(m);
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    if (current <= 0) break;
    Eigen::MatrixX3d grad = gradient<double>(problem, trace.transforms);
    grad.row(0).setZero();  // gauge
    for (std::size_t r = 0; r < m; ++r) {
      if (!problem.linked()[r]) grad.row(static_cast<Eigen::Index>(r)).setZero();
    }
    if (grad.squaredNorm() == 0) break;

    double step = config.learning_rate;
    double trial = std::numeric_limits<double>::infinity();
    while (step >= config.min_step) {
      for (std::size_t r = 0; r < m; ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        const auto& t = trace.transforms[r];
        candidate[r] = RigidTransform2d(t.theta - step * grad(row, 0),
                                        t.tx() - step * grad(row, 1),
                                        t.ty() - step * grad(row, 2));
      }
      trial = objective<double>(problem, candidate);
      if (trial <= current) break;
      step *= 0.5;
    }
    if (!(trial <= current)) break;  // no descent above the step floor

    trace.transforms.swap(candidate);
    const double previous = current;
    current = trial;
    trace.accepted.push_back(current);
    trace.iterations = iter + 1;
    if ((previous - current) / previous < config.rel_tol) break;
  }
  trace.objective = current;
  return trace;
}

std::vector<RigidTransform2d> restart_initialization(const AlignmentProblem& problem,
                                                     const AlignmentConfig& config,
                                                     std::size_t restart_index) {
  std::vector<RigidTransform2d> init(problem.num_recordings());
  if (restart_index == 0) return init;
  auto rng = derive_rng(config.seed, {0xa11617ull, restart_index});
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> offset(-config.restart_translation_scale,
                                                config.restart_translation_scale);
  for (std::size_t r = 1; r < init.size(); ++r) {
    const double theta = angle(rng);
    const double tx = offset(rng);
    const double ty = offset(rng);
    if (problem.linked()[r]) init[r] = RigidTransform2d(theta, tx, ty);
  }
  return init;
}

AlignmentResult optimize(const AlignmentProblem& problem, const AlignmentConfig& config) {
  config.validate();
  if (problem.num_recordings() == 0) throw InputError("optimize: no recordings");

  const std::vector<RigidTransform2d> identity(problem.num_recordings());
  AlignmentResult result;
  if (problem.num_recordings() == 1 || !problem.has_cross_recording_relatedness()) {
    result.transforms = problem.to_map(identity);
    result.objective = objective<double>(problem, identity);
    result.accepted = {result.objective};
    result.degenerate = problem.num_recordings() > 1;
    return result;
  }

  DescentTrace best;
  std::size_t best_index = 0;
  for (std::size_t k = 0; k < config.restarts; ++k) {
    DescentTrace trace = run_descent(problem, restart_initialization(problem, config, k), config);
    if (k == 0 || trace.objective < best.objective) {
      best = std::move(trace);
      best_index = k;
    }
  }
  result.transforms = problem.to_map(best.transforms);
  result.objective = best.objective;
  result.iterations = best.iterations;
  result.restart_index = best_index;
  result.accepted = std::move(best.accepted);
  return result;
}

}  // namespace lmap

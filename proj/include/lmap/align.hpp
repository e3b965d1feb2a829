#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmap/core.hpp"
#include "lmap/relatedness.hpp"

namespace lmap {

using TransformMap = std::map<std::string, RigidTransform2d>;

/// Observations, their relatedness, and the recording index space. The first
/// entry of recording_ids() is the gauge recording that defines the shared
/// frame.
class AlignmentProblem {
 public:
  struct Pair {
    std::size_t i, j;      // observation indices, i < j
    std::size_t ri, rj;    // recording indices
    double score;
  };

  /// recording_ids defaults to first-appearance order. Throws InputError if
  /// the matrix size disagrees with the observations or an observation names
  /// a recording outside recording_ids.
  AlignmentProblem(std::vector<Observation> observations, RelatednessMatrix relatedness,
                   std::vector<std::string> recording_ids = {});

  const std::vector<Observation>& observations() const { return observations_; }
  const RelatednessMatrix& relatedness() const { return relatedness_; }
  const std::vector<std::string>& recording_ids() const { return recording_ids_; }
  std::size_t num_recordings() const { return recording_ids_.size(); }
  std::size_t recording_of(std::size_t obs) const { return recording_index_[obs]; }
  const std::vector<Pair>& pairs() const { return pairs_; }

  /// True for recordings with at least one nonzero entry against another recording.
  const std::vector<char>& linked() const { return linked_; }
  bool has_cross_recording_relatedness() const;

  /// Dense per-recording vector from a map; throws InputError on a missing id.
  std::vector<RigidTransform2d> dense(const TransformMap& transforms) const;
  TransformMap to_map(std::span<const RigidTransform2d> transforms) const;

 private:
  std::vector<Observation> observations_;
  RelatednessMatrix relatedness_;
  std::vector<std::string> recording_ids_;
  std::vector<std::size_t> recording_index_;
  std::vector<Pair> pairs_;
  std::vector<char> linked_;
};

/// Sum over ordered pairs i != j of S_ij |q_i - q_j|^2 with
/// q_i = R(theta_r) p_i + t_r for observation i's recording r.
template <typename Scalar>
Scalar objective(const AlignmentProblem& problem,
                 std::span<const RigidTransform2<Scalar>> transforms) {
  if (transforms.size() != problem.num_recordings()) {
    throw InputError("objective: expected one transform per recording");
  }
  std::vector<Rotation2<Scalar>> rotations(transforms.size());
  for (std::size_t r = 0; r < transforms.size(); ++r) rotations[r] = transforms[r].rotation();

  const auto& obs = problem.observations();
  Scalar total(0);
  for (const auto& pair : problem.pairs()) {
    const Point2<Scalar> qi =
        rotations[pair.ri] * obs[pair.i].position.template cast<Scalar>() +
        transforms[pair.ri].translation;
    const Point2<Scalar> qj =
        rotations[pair.rj] * obs[pair.j].position.template cast<Scalar>() +
        transforms[pair.rj].translation;
    total += Scalar(pair.score) * (qi - qj).squaredNorm();
  }
  return 2 * total;
}

/// Per-recording (dL/dtheta, dL/dtx, dL/dty), one row per recording.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 3> gradient(
    const AlignmentProblem& problem, std::span<const RigidTransform2<Scalar>> transforms) {
  if (transforms.size() != problem.num_recordings()) {
    throw InputError("gradient: expected one transform per recording");
  }
  const auto m = static_cast<Eigen::Index>(transforms.size());
  std::vector<Rotation2<Scalar>> rotations(transforms.size()), derivatives(transforms.size());
  for (std::size_t r = 0; r < transforms.size(); ++r) {
    rotations[r] = transforms[r].rotation();
    derivatives[r] = rotation_matrix_derivative(transforms[r].theta);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 3> grad =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 3>::Zero(m, 3);
  const auto& obs = problem.observations();
  for (const auto& pair : problem.pairs()) {
    const Point2<Scalar> pi = obs[pair.i].position.template cast<Scalar>();
    const Point2<Scalar> pj = obs[pair.j].position.template cast<Scalar>();
    const Point2<Scalar> qi = rotations[pair.ri] * pi + transforms[pair.ri].translation;
    const Point2<Scalar> qj = rotations[pair.rj] * pj + transforms[pair.rj].translation;
    // Both ordered pairs contribute 2 S (q_i - q_j) . (dq_i - dq_j).
    const Point2<Scalar> w = Scalar(4 * pair.score) * (qi - qj);
    const auto ri = static_cast<Eigen::Index>(pair.ri);
    const auto rj = static_cast<Eigen::Index>(pair.rj);
    grad(ri, 0) += w.dot(derivatives[pair.ri] * pi);
    grad(ri, 1) += w.x();
    grad(ri, 2) += w.y();
    grad(rj, 0) -= w.dot(derivatives[pair.rj] * pj);
    grad(rj, 1) -= w.x();
    grad(rj, 2) -= w.y();
  }
  return grad;
}

double objective(const AlignmentProblem& problem, const TransformMap& transforms);
Eigen::MatrixX3d gradient(const AlignmentProblem& problem, const TransformMap& transforms);

struct AlignmentConfig {
  double learning_rate = 0.05;
  std::size_t max_iters = 10000;
  double rel_tol = 1e-8;
  std::size_t restarts = 8;
  double restart_translation_scale = 5.0;
  std::uint64_t seed = 0;
  double min_step = 1e-12;

  void validate() const;
};

/// One gradient-descent run from a fixed start.
struct DescentTrace {
  std::vector<RigidTransform2d> transforms;
  double objective = 0;
  std::size_t iterations = 0;
  std::vector<double> accepted;  // objective after start and after every accepted step
};

DescentTrace run_descent(const AlignmentProblem& problem,
                         std::vector<RigidTransform2d> initial, const AlignmentConfig& config);

/// Start for a restart: identity for restart 0, otherwise random angle and
/// translation for every linked non-gauge recording. Unlinked recordings and
/// the gauge stay at identity.
std::vector<RigidTransform2d> restart_initialization(const AlignmentProblem& problem,
                                                     const AlignmentConfig& config,
                                                     std::size_t restart_index);

struct AlignmentResult {
  TransformMap transforms;
  double objective = 0;
  std::size_t iterations = 0;
  std::size_t restart_index = 0;
  /// Two or more recordings but no cross-recording relatedness: transforms
  /// are left at identity.
  bool degenerate = false;
  std::vector<double> accepted;  // winning restart's accepted objective sequence

  bool operator==(const AlignmentResult&) const = default;
};

/// Gradient descent with backtracking over every non-gauge recording's
/// (theta, tx, ty), repeated over config.restarts starts. The lowest final
/// objective wins, ties to the lower restart index.
AlignmentResult optimize(const AlignmentProblem& problem, const AlignmentConfig& config = {});

}  // namespace lmap

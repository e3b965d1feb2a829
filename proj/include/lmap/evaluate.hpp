#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "lmap/aggregate.hpp"
#include "lmap/core.hpp"

namespace lmap {

struct GroundTruthLandmark {
  std::string id;
  Point2d position{Point2d::Zero()};
};

struct GroundTruth {
  std::vector<GroundTruthLandmark> landmarks;
};

/// x -> scale * R(theta) x + t.
template <typename Scalar>
struct Similarity2 {
  Scalar scale{1};
  RigidTransform2<Scalar> transform;

  Point2<Scalar> operator()(const Point2<Scalar>& p) const {
    return scale * (transform.rotation() * p) + transform.translation;
  }
};
using Similarity2d = Similarity2<double>;

/// Least-squares similarity taking the columns of `src` onto those of `dst`
/// (Umeyama 1991). The rotation is kept proper: a reflection in the SVD is
/// undone by flipping the sign of the smallest singular direction.
///
/// Throws InputError for fewer than two pairs, mismatched sizes or a source
/// set with no spread.
template <typename DerivedSrc, typename DerivedDst>
Similarity2<typename DerivedSrc::Scalar> umeyama_similarity(
    const Eigen::MatrixBase<DerivedSrc>& src, const Eigen::MatrixBase<DerivedDst>& dst) {
  using Scalar = typename DerivedSrc::Scalar;
  using Vec = Point2<Scalar>;
  using Mat = Rotation2<Scalar>;
  static_assert(DerivedSrc::RowsAtCompileTime == 2 || DerivedSrc::RowsAtCompileTime == Eigen::Dynamic);

  if (src.rows() != 2 || dst.rows() != 2 || src.cols() != dst.cols()) {
    throw InputError("umeyama_similarity: expected two 2xN point sets of equal size");
  }
  const auto n = src.cols();
  if (n < 2) throw InputError("umeyama_similarity: at least two point pairs are required");

  const Vec src_mean = src.rowwise().mean();
  const Vec dst_mean = dst.rowwise().mean();
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> src_c = src.colwise() - src_mean;
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> dst_c = dst.colwise() - dst_mean;

  const Scalar src_var = src_c.squaredNorm() / Scalar(n);
  using std::abs;
  const Scalar extent = src.cwiseAbs().maxCoeff();
  if (!(src_var > Eigen::NumTraits<Scalar>::epsilon() * (1 + extent * extent))) {
    throw InputError("umeyama_similarity: source points are all coincident");
  }

  const Mat sigma = dst_c * src_c.transpose() / Scalar(n);
  Eigen::JacobiSVD<Mat> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec d = Vec::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) d(1) = -1;

  const Mat rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  const Scalar scale = svd.singularValues().dot(d) / src_var;
  const Vec translation = dst_mean - scale * rotation * src_mean;

  using std::atan2;
  return {scale, RigidTransform2<Scalar>(atan2(rotation(1, 0), rotation(0, 0)), translation)};
}

Similarity2d umeyama_similarity(std::span<const Point2d> src, std::span<const Point2d> dst);

struct EvalReport {
  double positional_error = 0;    // mean distance after similarity alignment, meters
  std::size_t coverage = 0;       // distinct ground-truth ids covered by some cluster
  std::size_t matched_pairs = 0;  // anchor pairs plus duplicated-id matches
  std::size_t anchor_pairs = 0;   // unique-id pairs used to fit the similarity
  std::size_t cluster_count = 0;
  double scale = 1;
  RigidTransform2d applied_transform;
};

/// Correspondence by label: clusters whose label names a unique ground-truth
/// id (and no other cluster carries it) anchor a similarity fit; clusters with
/// duplicated ids are then paired with the nearest same-id landmark. Throws
/// DegenerateError when fewer than two anchors exist or they coincide.
EvalReport positional_error(const SemanticLandmarkMap& map, const GroundTruth& truth);

}  // namespace lmap

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lmap {

// Error taxonomy shared by every module. The CLI maps these onto exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfRangeError : InputError {
  using InputError::InputError;
};
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
using Point2d = Point2<double>;

template <typename Scalar>
using Rotation2 = Eigen::Matrix<Scalar, 2, 2>;

/// Wraps an angle into [-pi, pi).
template <typename Scalar>
Scalar normalize_angle(Scalar theta) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar two_pi = 2 * pi;
  if (theta >= -pi && theta < pi) return theta;
  Scalar wrapped = std::fmod(theta + pi, two_pi);
  if (wrapped < 0) wrapped += two_pi;
  wrapped -= pi;
  // fmod can land exactly on +pi after the shift for inputs like 3*pi.
  if (wrapped >= pi) wrapped -= two_pi;
  return wrapped;
}

template <typename Scalar>
Rotation2<Scalar> rotation_matrix(Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta), s = sin(theta);
  Rotation2<Scalar> r;
  r << c, -s, s, c;
  return r;
}

/// d/dtheta of rotation_matrix(theta).
template <typename Scalar>
Rotation2<Scalar> rotation_matrix_derivative(Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta), s = sin(theta);
  Rotation2<Scalar> r;
  r << -s, -c, c, -s;
  return r;
}

/// Planar rigid motion x -> R(theta) x + t. The angle is stored as a scalar so
/// the rotation stays exactly orthonormal; the matrix is formed on demand.
template <typename Scalar>
struct RigidTransform2 {
  Scalar theta{0};
  Point2<Scalar> translation{Point2<Scalar>::Zero()};

  RigidTransform2() = default;
  RigidTransform2(Scalar theta_, Scalar tx, Scalar ty)
      : theta(normalize_angle(theta_)), translation(tx, ty) {}
  RigidTransform2(Scalar theta_, const Point2<Scalar>& t)
      : theta(normalize_angle(theta_)), translation(t) {}

  static RigidTransform2 identity() { return {}; }

  Scalar tx() const { return translation.x(); }
  Scalar ty() const { return translation.y(); }
  Rotation2<Scalar> rotation() const { return rotation_matrix(theta); }

  bool operator==(const RigidTransform2& other) const {
    return theta == other.theta && translation == other.translation;
  }
};
using RigidTransform2d = RigidTransform2<double>;

template <typename Scalar>
Point2<Scalar> apply(const RigidTransform2<Scalar>& transform,
                     const Point2<Scalar>& p) {
  return transform.rotation() * p + transform.translation;
}

template <typename Scalar>
RigidTransform2<Scalar> inverse(const RigidTransform2<Scalar>& transform) {
  // R^T (p - t) = R(-theta) p - R(-theta) t
  const Point2<Scalar> t = -(rotation_matrix(-transform.theta) * transform.translation);
  return RigidTransform2<Scalar>(-transform.theta, t);
}

/// a after b: x -> a(b(x)).
template <typename Scalar>
RigidTransform2<Scalar> compose(const RigidTransform2<Scalar>& a,
                                const RigidTransform2<Scalar>& b) {
  return RigidTransform2<Scalar>(a.theta + b.theta,
                                 a.rotation() * b.translation + a.translation);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

struct TrajectorySample {
  double t{0};  // seconds since recording start
  double x{0};
  double y{0};
};

/// One landmark sighting, positioned in its recording's private frame.
struct Observation {
  std::string recording_id;
  std::size_t obs_index{0};
  std::string label;
  Point2d position{Point2d::Zero()};
  std::string note;
  double timestamp{0};  // seconds since the Unix epoch, UTC
  bool labeled{true};   // false when no label provider matched the note
};

struct Recording {
  std::string recording_id;
  std::vector<Observation> observations;
  std::optional<std::vector<TrajectorySample>> trajectory;
};

/// Ordered distinct recording ids in first-appearance order.
std::vector<std::string> recording_ids_of(const std::vector<Observation>& observations);

}  // namespace lmap

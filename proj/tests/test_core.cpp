#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lmap/core.hpp"
#include "lmap/timestamp.hpp"

using namespace lmap;
using std::numbers::pi;

namespace {

// Plain array matrix product, independent of Eigen and of rotation_matrix().
Point2d brute_apply(double theta, double tx, double ty, double x, double y) {
  const double m[2][2] = {{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
  const double in[2] = {x, y};
  double out[2] = {0, 0};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out[r] += m[r][c] * in[c];
  }
  return {out[0] + tx, out[1] + ty};
}

}  // namespace

TEST_CASE("apply: identity, quarter turn, quarter turn plus shift") {
  const Point2d a = apply(RigidTransform2d(0, 0, 0), Point2d(3, 4));
  CHECK(a.x() == 3.0);
  CHECK(a.y() == 4.0);

  const Point2d b = apply(RigidTransform2d(pi / 2, 0, 0), Point2d(1, 0));
  CHECK(std::abs(b.x()) < 1e-15);
  CHECK(b.y() == doctest::Approx(1.0));

  const Point2d c = apply(RigidTransform2d(pi / 2, 2, -1), Point2d(1, 0));
  const Point2d oracle = brute_apply(pi / 2, 2, -1, 1, 0);
  CHECK((c - Point2d(2, 0)).norm() < 1e-15);
  CHECK((c - oracle).norm() < 1e-15);
}

TEST_CASE("inverse examples") {
  const auto id = inverse(RigidTransform2d(0, 0, 0));
  CHECK(id.theta == 0.0);
  CHECK(id.translation.norm() == 0.0);

  const auto quarter = inverse(RigidTransform2d(pi / 2, 0, 0));
  CHECK(quarter.theta == doctest::Approx(-pi / 2));
  CHECK(quarter.translation.norm() < 1e-15);

  // R^-1 (p - t) = R(-pi/2) p - R(-pi/2) (2, -1) = R(-pi/2) p + (1, 2).
  const RigidTransform2d t(pi / 2, 2, -1);
  const auto inv = inverse(t);
  CHECK(inv.theta == doctest::Approx(-pi / 2));
  CHECK((inv.translation - Point2d(1, 2)).norm() < 1e-15);
  CHECK((apply(inv, apply(t, Point2d(1, 0))) - Point2d(1, 0)).norm() < 1e-15);
  CHECK((apply(inv, Point2d(2, 0)) - Point2d(1, 0)).norm() < 1e-15);
}

TEST_CASE("property: inverse round trip and rigidity over 1000 random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-10.0, 10.0), coord(-100.0, 100.0);
  for (int k = 0; k < 1000; ++k) {
    const double theta = angle(rng), tx = coord(rng), ty = coord(rng);
    const RigidTransform2d t(theta, tx, ty);
    const Point2d p(coord(rng), coord(rng));
    const Point2d q(coord(rng), coord(rng));
    CHECK((apply(inverse(t), apply(t, p)) - p).norm() < 1e-12);
    CHECK(std::abs((apply(t, p) - apply(t, q)).norm() - (p - q).norm()) < 1e-12);
    CHECK((apply(t, p) - brute_apply(theta, tx, ty, p.x(), p.y())).norm() < 1e-12);
  }
}

TEST_CASE("normalize_angle lands in [-pi, pi) and is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-100.0, 100.0);
  for (double theta : {pi, -pi, 3 * pi, -3 * pi, 0.0, 2 * pi, 1e-300}) {
    const double n = normalize_angle(theta);
    CHECK(n >= -pi);
    CHECK(n < pi);
    CHECK(normalize_angle(n) == n);
  }
  CHECK(normalize_angle(pi) == -pi);
  for (int k = 0; k < 1000; ++k) {
    const double theta = angle(rng);
    const double n = normalize_angle(theta);
    CHECK(n >= -pi);
    CHECK(n < pi);
    CHECK(normalize_angle(n) == n);
    CHECK(std::abs(std::remainder(theta - n, 2 * pi)) < 1e-12);
  }
}

TEST_CASE("compose matches sequential application; transforms work in long double") {
  const RigidTransform2d a(0.3, 1, 2), b(-1.2, -4, 0.5);
  const Point2d p(0.7, -3);
  CHECK((apply(compose(a, b), p) - apply(a, apply(b, p))).norm() < 1e-12);

  const RigidTransform2<long double> tl(0.5L, 1.0L, -1.0L);
  const Point2<long double> pl(2.0L, 3.0L);
  CHECK((apply(inverse(tl), apply(tl, pl)) - pl).norm() < 1e-17L);
}

TEST_CASE("ISO-8601 timestamps") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0.0);
  CHECK(parse_iso8601("2025-01-17T11:36:37Z") == 1737113797.0);
  CHECK(parse_iso8601("2025-01-17 11:36:37") == 1737113797.0);
  CHECK(parse_iso8601("2025-01-17T20:36:37+09:00") == 1737113797.0);
  CHECK(parse_iso8601("2025-01-17T11:36:37.25Z") == doctest::Approx(1737113797.25));
  CHECK(format_iso8601(1737113797.0) == "2025-01-17T11:36:37Z");
  CHECK(format_iso8601(1737113797.5) == "2025-01-17T11:36:37.500000Z");
  CHECK(format_iso8601(-1.0) == "1969-12-31T23:59:59Z");
  CHECK_THROWS_AS(parse_iso8601("2025-13-01T00:00:00Z"), InputError);
  CHECK_THROWS_AS(parse_iso8601("yesterday"), InputError);
  CHECK_THROWS_AS(parse_iso8601("2025-01-17T11:36:37Q"), InputError);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long long> secs(-2000000000LL, 4000000000LL);
  for (int k = 0; k < 200; ++k) {
    const double t = static_cast<double>(secs(rng));
    CHECK(parse_iso8601(format_iso8601(t)) == t);
  }
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/geometry.hpp"

#include <algorithm>

#include "risisac/core.hpp"

namespace risisac {

Vec2 unit(Vec2 a) {
  const double n = norm(a);
  if (n == 0) throw Error(Errc::CoincidentPositions, "zero-length direction");
  return {a.x / n, a.y / n};
}

double spatial_dir(Vec2 node, Vec2 q, Vec2 target) {
  return cross(unit(target - node), q);
}

Vec2 from_bs(double r, double theta) {
  return {r * theta, r * std::sqrt(std::max(0.0, 1 - theta * theta))};
}

Vec2 rotate_sin(Vec2 v, double s) {
  const double c = std::sqrt(std::max(0.0, 1 - s * s));
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

std::vector<Vec2> circle_circle_intersect(Vec2 c1, double r1, Vec2 c2, double r2) {
  if (!(r1 > 0) || !(r2 > 0)) throw Error(Errc::InvalidDimension, "circle radius must be positive");
  const double d = dist(c1, c2);
  const double scale = std::max({1.0, r1, r2});
  const double tol = 1e-9 * scale;
  if (d < tol) {
    if (std::abs(r1 - r2) < tol) throw Error(Errc::DegenerateInfinite, "coincident circles");
    return {};
  }
  if (d > r1 + r2 + tol || d < std::abs(r1 - r2) - tol) return {};
  const Vec2 u = (1.0 / d) * (c2 - c1);
  const double a = (d * d + r1 * r1 - r2 * r2) / (2 * d);
  const double h2 = r1 * r1 - a * a;
  const Vec2 m = c1 + a * u;
  if (h2 <= tol * tol) return {m};
  const double h = std::sqrt(h2);
  const Vec2 perp{-u.y, u.x};
  return {m + h * perp, m - h * perp};
}

std::vector<Vec2> ellipse_line_intersect(Vec2 f1, Vec2 f2, double S, Vec2 u) {
  if (!(S > dist(f1, f2))) throw Error(Errc::InvalidEllipse, "sum of distances must exceed the focal distance");
  u = unit(u);
  // |t u - f2| = alpha + beta t after eliminating |t u - f1|, then square
  const double alpha = (S * S - dot(f1, f1) + dot(f2, f2)) / (2 * S);
  const double beta = dot(u, f1 - f2) / S;
  const double a = 1 - beta * beta;
  const double b = -2 * (dot(u, f2) + alpha * beta);
  const double c = dot(f2, f2) - alpha * alpha;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return {};
  const double sq = std::sqrt(disc);
  // numerically stable pair
  const double qv = -0.5 * (b + (b >= 0 ? sq : -sq));
  double t1, t2;
  if (qv != 0) {
    t1 = qv / a;
    t2 = c / qv;
  } else {
    t1 = t2 = 0;
  }
  if (t1 > t2) std::swap(t1, t2);
  if (sq <= 1e-12 * std::max(1.0, std::abs(b))) return {0.5 * (t1 + t2) * u};
  return {t2 * u, t1 * u};
}

}  // namespace risisac

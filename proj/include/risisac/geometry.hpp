// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <cmath>
#include <vector>

namespace risisac {

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
Vec2 unit(Vec2 a);

struct Pose {
  Vec2 p;
  Vec2 q{0, 1};
};

// Spatial direction seen from an array at `node` with normal `q`, toward `target`.
double spatial_dir(Vec2 node, Vec2 q, Vec2 target);

// Point at range r along BS spatial direction theta (BS normal is +y).
Vec2 from_bs(double r, double theta);

// Rotation by the angle whose sine is s (cosine taken nonnegative).
Vec2 rotate_sin(Vec2 v, double s);

std::vector<Vec2> circle_circle_intersect(Vec2 c1, double r1, Vec2 c2, double r2);

// Points x = t * line_dir with |x - f1| + |x - f2| = sum_dist.
std::vector<Vec2> ellipse_line_intersect(Vec2 f1, Vec2 f2, double sum_dist, Vec2 line_dir);

}  // namespace risisac

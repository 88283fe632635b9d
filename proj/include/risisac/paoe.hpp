// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <vector>

#include "risisac/core.hpp"
#include "risisac/geometry.hpp"

namespace risisac {

struct PoseEstimate {
  Vec2 p;
  Vec2 q{0, 1};
  double cost = 0;
};

// LoS path from the BS: p = r [theta, sqrt(1 - theta^2)], q = rotation of -p/|p| by the far-end angle phi.
// Throws PositioningFailure if r <= 0.
PoseEstimate los_pose(double r, double theta, double phi);

struct OrientationFit {
  Vec2 q;
  double residual = 0;
};

// Solves cross(l_u, q) = phi_u for the two anchors (l_u = unit(s_u - ris)), normalizes q and returns
// sum_u w_u (phi_u - cross(l_u, q))^2. Throws DegenerateAnchors if l_1 and l_2 are parallel.
OrientationFit solve_ris_orientation(Vec2 s1, Vec2 s2, Vec2 ris, double phi1, double phi2, double w1 = 1,
                                     double w2 = 1);

// One estimated NLoS path for TDFS. phi holds one or two far-end angle candidates.
struct TdfsPath {
  double theta = 0;  // BS side
  std::vector<double> phi;
  double range = 0;  // total path length
  double weight = 1;
};

struct TdfsCell {
  double cost = 0;  // +inf if infeasible
  Vec2 p;
  Vec2 q{0, 1};
  std::vector<Vec2> scatterers;
  long long tests = 0;
};

// Cost of one grid cell with anchor scatterers at BS distances d1 and d2 along paths 0 and 1.
TdfsCell tdfs_cell(const std::vector<TdfsPath>& paths, double d1, double d2);

struct TdfsResult {
  PoseEstimate pose;
  std::vector<Vec2> scatterers;
  std::vector<double> cost_history;  // best-so-far after each iteration
  long long tests = 0;
};

struct TdfsOptions {
  int starts = 4;     // local minima of the first grid that get refined
  int halfwidth = 5;  // refined bracket spans +-halfwidth cells around the current best
};

// Bracketed B x B search over the two anchor ranges, I iterations. The first iteration scans the full ranges;
// each later one refines every start on a B/sqrt(starts) grid. The pose with the lowest cost seen so far is
// kept. Throws InvalidDimension for fewer than 2 paths, B < 3 or I < 1, PositioningFailure if no cell is
// feasible.
TdfsResult tdfs(const std::vector<TdfsPath>& paths, int B, int I, Exec ex = Exec::parallel,
                const TdfsOptions& opt = {});

}  // namespace risisac

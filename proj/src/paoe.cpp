// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/paoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risisac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PoseEstimate los_pose(double r, double theta, double phi) {
  if (!(r > 0)) throw Error(Errc::PositioningFailure, "LoS range must be positive");
  PoseEstimate e;
  e.p = from_bs(r, theta);
  e.q = rotate_sin(unit(-1.0 * e.p), phi);
  return e;
}

OrientationFit solve_ris_orientation(Vec2 s1, Vec2 s2, Vec2 ris, double phi1, double phi2, double w1,
                                     double w2) {
  const Vec2 l1 = unit(s1 - ris);
  const Vec2 l2 = unit(s2 - ris);
  // cross(l, q) = l.x q.y - l.y q.x
  const double det = cross(l1, l2);
  if (std::abs(det) < 1e-12) throw Error(Errc::DegenerateAnchors, "anchor directions are parallel");
  Vec2 q{(l2.x * phi1 - l1.x * phi2) / det, (l2.y * phi1 - l1.y * phi2) / det};
  const double n = norm(q);
  if (!(n > 0)) throw Error(Errc::DegenerateAnchors, "orientation solve returned zero");
  q = (1.0 / n) * q;
  const double e1 = phi1 - cross(l1, q);
  const double e2 = phi2 - cross(l2, q);
  return {q, w1 * e1 * e1 + w2 * e2 * e2};
}

TdfsCell tdfs_cell(const std::vector<TdfsPath>& paths, double d1, double d2) {
  TdfsCell cell;
  cell.cost = kInf;
  const TdfsPath& a = paths[0];
  const TdfsPath& b = paths[1];
  const double r1 = a.range - d1, r2 = b.range - d2;
  if (!(r1 > 0) || !(r2 > 0)) return cell;
  const Vec2 s1 = from_bs(d1, a.theta);
  const Vec2 s2 = from_bs(d2, b.theta);
  std::vector<Vec2> xs;
  try {
    xs = circle_circle_intersect(s1, r1, s2, r2);
  } catch (const Error&) {
    return cell;
  }

  // Each RIS candidate gets its best anchor fit, then the remaining paths decide between candidates.
  for (const Vec2& R : xs) {
    double h = kInf;
    Vec2 q;
    for (double pa : a.phi)
      for (double pb : b.phi) {
        ++cell.tests;
        OrientationFit f;
        try {
          f = solve_ris_orientation(s1, s2, R, pa, pb, a.weight, b.weight);
        } catch (const Error&) {
          continue;
        }
        if (f.residual < h) {
          h = f.residual;
          q = f.q;
        }
      }
    if (h == kInf) continue;

    double cost = h;
    std::vector<Vec2> sc{s1, s2};
    for (std::size_t u = 2; u < paths.size(); ++u) {
      const TdfsPath& pu = paths[u];
      const Vec2 dir = from_bs(1, pu.theta);
      std::vector<Vec2> pts;
      try {
        pts = ellipse_line_intersect({0, 0}, R, pu.range, dir);
      } catch (const Error&) {
      }
      double hu = kInf;
      Vec2 su{kNaN, kNaN};
      for (const Vec2& x : pts) {
        // The BS is a focus, so only the forward root lies on the path's ray.
        if (dot(x, dir) <= 0) continue;
        const Vec2 l = x - R;
        if (norm(l) == 0) continue;
        for (double ph : pu.phi) {
          ++cell.tests;
          const double e = ph - cross(unit(l), q);
          const double c = pu.weight * e * e;
          if (c < hu) {
            hu = c;
            su = x;
          }
        }
      }
      cost += hu == kInf ? 4 * pu.weight : hu;
      sc.push_back(su);
    }
    if (cost < cell.cost) {
      cell.cost = cost;
      cell.p = R;
      cell.q = q;
      cell.scatterers = std::move(sc);
    }
  }
  return cell;
}

namespace {

struct Bracket {
  double lo1, hi1, lo2, hi2;
};

struct Grid {
  int B = 0;
  std::vector<double> g1, g2, cost;
};

// Evaluates every cell of a B x B grid over the bracket; adds the candidate tests to `tests`.
Grid grid_pass(const std::vector<TdfsPath>& paths, const Bracket& br, int B, Exec ex, long long& tests) {
  Grid g;
  g.B = B;
  g.g1.resize(B);
  g.g2.resize(B);
  for (int k = 0; k < B; ++k) {
    g.g1[k] = br.lo1 + k * (br.hi1 - br.lo1) / (B - 1);
    g.g2[k] = br.lo2 + k * (br.hi2 - br.lo2) / (B - 1);
  }
  const long long n = static_cast<long long>(B) * B;
  g.cost.assign(n, kInf);
  std::vector<long long> t(n);
#pragma omp parallel for schedule(static) if (ex == Exec::parallel)
  for (long long idx = 0; idx < n; ++idx) {
    const TdfsCell c = tdfs_cell(paths, g.g1[idx / B], g.g2[idx % B]);
    g.cost[idx] = c.cost;
    t[idx] = c.tests;
  }
  for (long long v : t) tests += v;
  return g;
}

Bracket around(const Grid& g, long long idx, int hw) {
  const int b = static_cast<int>(idx / g.B), d = static_cast<int>(idx % g.B);
  return {g.g1[std::max(b - hw, 0)], g.g1[std::min(b + hw, g.B - 1)], g.g2[std::max(d - hw, 0)],
          g.g2[std::min(d + hw, g.B - 1)]};
}

long long argmin(const Grid& g) {
  long long arg = -1;
  for (long long i = 0; i < static_cast<long long>(g.cost.size()); ++i)
    if (g.cost[i] < kInf && (arg < 0 || g.cost[i] < g.cost[arg])) arg = i;
  return arg;
}

// Finite cells no larger than any of their 8 neighbors, cheapest first, at most k.
std::vector<long long> local_minima(const Grid& g, int k) {
  std::vector<long long> out;
  const int B = g.B;
  for (int b = 0; b < B; ++b)
    for (int d = 0; d < B; ++d) {
      const double v = g.cost[static_cast<long long>(b) * B + d];
      if (v == kInf) continue;
      bool lm = true;
      for (int db = -1; db <= 1 && lm; ++db)
        for (int dd = -1; dd <= 1; ++dd) {
          const int bb = b + db, ee = d + dd;
          if ((db || dd) && bb >= 0 && bb < B && ee >= 0 && ee < B && g.cost[static_cast<long long>(bb) * B + ee] < v) {
            lm = false;
            break;
          }
        }
      if (lm) out.push_back(static_cast<long long>(b) * B + d);
    }
  std::stable_sort(out.begin(), out.end(), [&](long long a, long long b) { return g.cost[a] < g.cost[b]; });
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

}  // namespace

TdfsResult tdfs(const std::vector<TdfsPath>& paths, int B, int I, Exec ex, const TdfsOptions& opt) {
  if (paths.size() < 2) throw Error(Errc::InvalidDimension, "TDFS needs at least two paths");
  if (B < 3 || I < 1) throw Error(Errc::InvalidDimension, "TDFS needs B >= 3 and I >= 1");
  if (opt.starts < 1 || opt.halfwidth < 1) throw Error(Errc::InvalidDimension, "TDFS options must be positive");
  TdfsResult res;
  TdfsCell best;
  best.cost = kInf;
  auto keep = [&](const Grid& g, long long idx) {
    if (idx >= 0 && g.cost[idx] < best.cost) best = tdfs_cell(paths, g.g1[idx / g.B], g.g2[idx % g.B]);
  };

  const Grid first = grid_pass(paths, {0, paths[0].range, 0, paths[1].range}, B, ex, res.tests);
  keep(first, argmin(first));
  if (best.cost == kInf) throw Error(Errc::PositioningFailure, "no feasible TDFS cell");
  res.cost_history.push_back(best.cost);

  const std::vector<long long> seeds = local_minima(first, opt.starts);
  // Refinement grids shrink so all starts together stay within the single-start test budget.
  const int Bk = std::max(3, static_cast<int>(B / std::sqrt(static_cast<double>(seeds.size()))));
  std::vector<Bracket> brackets;
  for (long long s : seeds) brackets.push_back(around(first, s, opt.halfwidth));
  for (int it = 1; it < I; ++it) {
    for (Bracket& br : brackets) {
      const Grid g = grid_pass(paths, br, Bk, ex, res.tests);
      const long long a = argmin(g);
      if (a < 0) continue;
      keep(g, a);
      br = around(g, a, opt.halfwidth);
    }
    res.cost_history.push_back(best.cost);
  }
  res.pose = {best.p, best.q, best.cost};
  res.scatterers = best.scatterers;
  return res;
}

}  // namespace risisac

#include "frontex/planning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace frontex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Log-odds threshold for "free": probability strictly below 0.5.
constexpr float kFreeThreshold = 0.0f;

struct SphereShape {
  Vec3 center;
  double radius;
  Aabb bounds() const { return {center.array() - radius, center.array() + radius}; }
  bool intersects(const Vec3& lo, const Vec3& hi) const {
    const Vec3 q = center.cwiseMax(lo).cwiseMin(hi);
    return (q - center).squaredNorm() <= radius * radius;
  }
};

struct CapsuleShape {
  Vec3 a;
  Vec3 b;
  double radius;
  Aabb bounds() const {
    return {a.cwiseMin(b).array() - radius, a.cwiseMax(b).array() + radius};
  }
  bool intersects(const Vec3& lo, const Vec3& hi) const {
    return segment_box_distance_sq(a, b, lo, hi) <= radius * radius;
  }
};

struct Node {
  Vec3 position;
  int parent = -1;
  double cost = 0.0;
  std::vector<int> children;
};

Vec3 sample_unit_ball(Rng& rng) {
  while (true) {
    const Vec3 v(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (v.squaredNorm() <= 1.0) return v;
  }
}

// Orthonormal frame whose first axis is `axis` (unit).
Eigen::Matrix3d frame_from_axis(const Vec3& axis) {
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e2 = axis.cross(helper).normalized();
  const Vec3 e3 = axis.cross(e2);
  Eigen::Matrix3d m;
  m.col(0) = axis;
  m.col(1) = e2;
  m.col(2) = e3;
  return m;
}

void propagate_cost(std::vector<Node>& nodes, int root) {
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (const int c : nodes[n].children) {
      nodes[c].cost = nodes[n].cost + (nodes[c].position - nodes[n].position).norm();
      stack.push_back(c);
    }
  }
}

void drop_duplicate_waypoints(std::vector<Vec3>& w) {
  constexpr double kMinSeparation = 1e-9;
  std::vector<Vec3> out;
  out.reserve(w.size());
  for (const auto& p : w) {
    if (out.empty() || (p - out.back()).norm() > kMinSeparation) out.push_back(p);
  }
  w.swap(out);
}

std::vector<Vec3> reduce_vertices(const OccupancyOctree& map, const std::vector<Vec3>& w,
                                  double radius) {
  if (w.size() <= 2) return w;
  std::vector<Vec3> out{w.front()};
  std::size_t i = 0;
  while (i + 1 < w.size()) {
    std::size_t j = w.size() - 1;
    while (j > i + 1 && !collision_free_segment(map, w[i], w[j], radius)) --j;
    out.push_back(w[j]);
    i = j;
  }
  return out;
}

}  // namespace

double Path::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += (waypoints[i] - waypoints[i - 1]).norm();
  }
  return total;
}

void PlannerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid planner config: ") + what);
  };
  require(step > 0.0, "step");
  require(!goal_tolerance || *goal_tolerance > 0.0, "goal_tolerance");
  require(!near_tolerance || *near_tolerance > 0.0, "near_tolerance");
  require(max_iterations > 0, "max_iterations");
  require(iterations_after_solution > 0, "iterations_after_solution");
  require(rewire_radius > 0.0, "rewire_radius");
  require(simplify_passes >= 0, "simplify_passes");
  require(goal_bias >= 0.0 && goal_bias < 0.5, "goal_bias");
}

double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi) {
  const Vec3 d = b - a;
  // The squared distance is a convex piecewise quadratic in t; its pieces
  // change only where a coordinate crosses a slab bound.
  std::array<double, 8> breaks{};
  int count = 0;
  breaks[count++] = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) continue;
    for (const double bound : {lo[axis], hi[axis]}) {
      const double t = (bound - a[axis]) / d[axis];
      if (t > 0.0 && t < 1.0) breaks[count++] = t;
    }
  }
  breaks[count++] = 1.0;
  std::sort(breaks.begin(), breaks.begin() + count);

  double best = kInf;
  for (int k = 0; k + 1 < count; ++k) {
    const double t0 = breaks[k];
    const double t1 = breaks[k + 1];
    const double tm = 0.5 * (t0 + t1);
    double qa = 0.0;
    double qb = 0.0;
    std::array<double, 3> offset{};
    std::array<bool, 3> active{};
    for (int axis = 0; axis < 3; ++axis) {
      const double x = a[axis] + tm * d[axis];
      if (x < lo[axis]) {
        offset[axis] = a[axis] - lo[axis];
      } else if (x > hi[axis]) {
        offset[axis] = a[axis] - hi[axis];
      } else {
        continue;
      }
      active[axis] = true;
      qa += d[axis] * d[axis];
      qb += offset[axis] * d[axis];
    }
    double t = qa > 0.0 ? std::clamp(-qb / qa, t0, t1) : t0;
    double value = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      if (!active[axis]) continue;
      const double e = offset[axis] + t * d[axis];
      value += e * e;
    }
    best = std::min(best, value);
    if (best == 0.0) break;
  }
  return best;
}

bool collision_free_point(const OccupancyOctree& map, const Vec3& p, double radius) {
  return map.all_below(SphereShape{p, radius}, kFreeThreshold);
}

bool collision_free_segment(const OccupancyOctree& map, const Vec3& a, const Vec3& b,
                            double radius) {
  if (a == b) return collision_free_point(map, a, radius);
  return map.all_below(CapsuleShape{a, b, radius}, kFreeThreshold);
}

PlanResult plan_path(const OccupancyOctree& map, const Vec3& start, const Vec3& goal,
                     double radius, const PlannerConfig& config, Rng& rng, const Aabb& limits) {
  config.validate();
  PlanResult result;
  if (!collision_free_point(map, start, radius)) {
    result.status = PlanStatus::kStartInCollision;
    return result;
  }
  const double goal_tol = config.goal_tolerance.value_or(map.resolution());
  const double near_tol = config.near_tolerance.value_or(2.0 * radius);
  const double min_step = map.resolution();

  auto finish = [&](std::vector<Vec3> waypoints, PlanStatus status) {
    Path path{std::move(waypoints), {}};
    path = simplify_path(map, path, radius, rng, config.simplify_passes);
    for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
      if (!collision_free_segment(map, path.waypoints[i - 1], path.waypoints[i], radius)) {
        result.status = PlanStatus::kUnreachable;
        return;
      }
    }
    result.path = std::move(path);
    result.status = status;
  };

  if ((goal - start).norm() <= goal_tol) {
    finish({start}, PlanStatus::kReached);
    return result;
  }
  if (collision_free_segment(map, start, goal, radius)) {
    finish({start, goal}, PlanStatus::kReached);
    return result;
  }

  // Sampling domain: known free space (inflated by the radius) within limits.
  Aabb domain = limits;
  if (const auto fb = map.free_voxel_bounds()) {
    const Aabb free_box(map.voxel_min_corner(fb->first),
                        map.voxel_min_corner(fb->second.array() + 1));
    const Aabb inflated = free_box.inflated(radius);
    domain.min = domain.min.cwiseMax(inflated.min);
    domain.max = domain.max.cwiseMin(inflated.max);
  }
  if (!domain.valid()) {
    result.status = PlanStatus::kUnreachable;
    return result;
  }
  const double gamma =
      2.0 * std::cbrt(1.0 + 1.0 / 3.0) *
      std::cbrt(domain.volume() / (4.0 / 3.0 * std::numbers::pi));

  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
  nodes.push_back({start, -1, 0.0, {}});
  std::vector<int> solutions;  // nodes within near_tol of the goal

  const double c_min = (goal - start).norm();
  const Vec3 ellipse_center = 0.5 * (start + goal);
  const Eigen::Matrix3d ellipse_frame = frame_from_axis((goal - start) / c_min);

  auto best_solution_cost = [&] {
    double best = kInf;
    for (const int s : solutions) {
      best = std::min(best, nodes[s].cost + (nodes[s].position - goal).norm());
    }
    return best;
  };

  auto sample = [&]() -> Vec3 {
    const double c_best = best_solution_cost();
    if (std::isfinite(c_best) && c_best > c_min) {
      const double r1 = 0.5 * c_best;
      const double r2 = 0.5 * std::sqrt(c_best * c_best - c_min * c_min);
      for (int attempt = 0; attempt < 32; ++attempt) {
        const Vec3 ball = sample_unit_ball(rng);
        const Vec3 x = ellipse_center + ellipse_frame * Vec3(r1 * ball.x(), r2 * ball.y(),
                                                             r2 * ball.z());
        if (domain.contains(x)) return x;
      }
    }
    const double u = rng.uniform();
    if (u < config.goal_bias) return goal;
    if (u < 2.0 * config.goal_bias) return goal + near_tol * sample_unit_ball(rng);
    return {rng.uniform(domain.min.x(), domain.max.x()), rng.uniform(domain.min.y(), domain.max.y()),
            rng.uniform(domain.min.z(), domain.max.z())};
  };

  int first_solution_iteration = -1;
  int iteration = 0;
  std::vector<int> near;
  for (; iteration < config.max_iterations; ++iteration) {
    if (first_solution_iteration >= 0 &&
        iteration - first_solution_iteration >= config.iterations_after_solution) {
      break;
    }
    const Vec3 target = sample();

    int nearest = 0;
    double nearest_d2 = kInf;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d2 = (nodes[i].position - target).squaredNorm();
      if (d2 < nearest_d2) {
        nearest_d2 = d2;
        nearest = static_cast<int>(i);
      }
    }
    const double dist = std::sqrt(nearest_d2);
    if (dist < 1e-9) continue;
    const Vec3 dir = (target - nodes[nearest].position) / dist;

    // Extend as far as possible up to one step, halving on collision.
    double len = std::min(config.step, dist);
    Vec3 candidate;
    bool extended = false;
    while (len >= std::min(min_step, dist) * 0.999) {
      candidate = nodes[nearest].position + len * dir;
      if (collision_free_segment(map, nodes[nearest].position, candidate, radius)) {
        extended = true;
        break;
      }
      len *= 0.5;
    }
    if (!extended) continue;

    const double n = static_cast<double>(nodes.size());
    const double near_radius =
        std::min(config.rewire_radius, gamma * std::cbrt(std::log(n + 1.0) / (n + 1.0)));
    near.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if ((nodes[i].position - candidate).squaredNorm() <= near_radius * near_radius) {
        near.push_back(static_cast<int>(i));
      }
    }

    int parent = nearest;
    double parent_cost = nodes[nearest].cost + (candidate - nodes[nearest].position).norm();
    for (const int q : near) {
      if (q == nearest) continue;
      const double c = nodes[q].cost + (candidate - nodes[q].position).norm();
      if (c + 1e-12 < parent_cost &&
          collision_free_segment(map, nodes[q].position, candidate, radius)) {
        parent = q;
        parent_cost = c;
      }
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({candidate, parent, parent_cost, {}});
    nodes[parent].children.push_back(id);

    for (const int q : near) {
      if (q == parent) continue;
      const double c = parent_cost + (nodes[q].position - candidate).norm();
      if (c + 1e-12 < nodes[q].cost &&
          collision_free_segment(map, candidate, nodes[q].position, radius)) {
        auto& siblings = nodes[nodes[q].parent].children;
        siblings.erase(std::find(siblings.begin(), siblings.end(), q));
        nodes[q].parent = id;
        nodes[q].cost = c;
        nodes[id].children.push_back(q);
        propagate_cost(nodes, q);
      }
    }

    if ((candidate - goal).norm() <= near_tol) {
      solutions.push_back(id);
      if (first_solution_iteration < 0) first_solution_iteration = iteration;
    }
  }
  result.iterations = iteration;
  result.tree_size = nodes.size();

  // Prefer the cheapest node that reached the goal, else the closest node
  // within the near tolerance.
  int chosen = -1;
  PlanStatus status = PlanStatus::kUnreachable;
  double chosen_key = kInf;
  for (const int s : solutions) {
    if ((nodes[s].position - goal).norm() <= goal_tol && nodes[s].cost < chosen_key) {
      chosen = s;
      chosen_key = nodes[s].cost;
      status = PlanStatus::kReached;
    }
  }
  if (chosen < 0) {
    for (const int s : solutions) {
      const double d = (nodes[s].position - goal).norm();
      if (d < chosen_key) {
        chosen = s;
        chosen_key = d;
        status = PlanStatus::kTruncated;
      }
    }
  }
  if (chosen < 0) {
    result.status = PlanStatus::kUnreachable;
    return result;
  }
  std::vector<Vec3> waypoints;
  for (int n = chosen; n >= 0; n = nodes[n].parent) waypoints.push_back(nodes[n].position);
  std::reverse(waypoints.begin(), waypoints.end());
  finish(std::move(waypoints), status);
  return result;
}

Path simplify_path(const OccupancyOctree& map, const Path& path, double radius, Rng& rng,
                   int passes) {
  std::vector<Vec3> w = path.waypoints;
  drop_duplicate_waypoints(w);
  w = reduce_vertices(map, w, radius);

  for (int pass = 0; pass < passes && w.size() > 2; ++pass) {
    std::vector<double> cumulative(w.size(), 0.0);
    for (std::size_t i = 1; i < w.size(); ++i) {
      cumulative[i] = cumulative[i - 1] + (w[i] - w[i - 1]).norm();
    }
    const double total = cumulative.back();
    double s1 = rng.uniform(0.0, total);
    double s2 = rng.uniform(0.0, total);
    if (s1 > s2) std::swap(s1, s2);
    auto segment_of = [&](double s) {
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
      return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()) - 1,
                                   w.size() - 2);
    };
    const std::size_t i1 = segment_of(s1);
    const std::size_t i2 = segment_of(s2);
    if (i1 == i2) continue;
    auto point_at = [&](std::size_t seg, double s) {
      const double seg_len = cumulative[seg + 1] - cumulative[seg];
      const double f = seg_len > 0.0 ? (s - cumulative[seg]) / seg_len : 0.0;
      return Vec3(w[seg] + f * (w[seg + 1] - w[seg]));
    };
    const Vec3 p1 = point_at(i1, s1);
    const Vec3 p2 = point_at(i2, s2);
    if ((p2 - p1).norm() >= (s2 - s1) - 1e-9) continue;
    if (!collision_free_segment(map, p1, p2, radius)) continue;
    std::vector<Vec3> next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    next.push_back(p1);
    next.push_back(p2);
    next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i2) + 1, w.end());
    drop_duplicate_waypoints(next);
    w.swap(next);
  }
  w = reduce_vertices(map, w, radius);

  Path out;
  out.waypoints = std::move(w);
  return out;
}

}  // namespace frontex

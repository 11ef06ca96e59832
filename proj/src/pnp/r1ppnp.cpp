#include "stereoscan/pnp/r1ppnp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stereoscan/core/geometry.hpp"

namespace stereoscan::pnp {

namespace {

constexpr double kMinScale = 1e-12;

double reprojection_error(const RigidPose& pose, const CameraIntrinsics& k,
                          const Vec3& world, const Vec2& observed) {
  const Vec3 p = pose.apply(world);
  if (!(p.z() > 0.0)) return std::numeric_limits<double>::infinity();
  const Vec2 predicted(k.cx + k.fx * p.x() / p.z(), k.cy + k.fy * p.y() / p.z());
  return (predicted - observed).norm();
}

void check_world_rank(const std::vector<Vec3>& world, int control_index) {
  Mat3 scatter = Mat3::Zero();
  const Vec3& origin = world[control_index];
  for (size_t i = 0; i < world.size(); ++i) {
    if (static_cast<int>(i) == control_index) continue;
    const Vec3 s = world[i] - origin;
    scatter += s * s.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  if (eig.eigenvalues()(1) <= 1e-10 * std::max(eig.eigenvalues()(2), 1e-300)) {
    throw Error("r1ppnp: rank-deficient world configuration (points collinear)");
  }
}

double initial_scale(const PnPProblem& problem, const CameraIntrinsics& k) {
  std::vector<double> depths;
  depths.reserve(problem.size());
  for (const Vec3& p : problem.world_points) {
    if (p.z() > 0.0) depths.push_back(p.z());
  }
  if (depths.empty()) return 1.0;
  std::nth_element(depths.begin(), depths.begin() + depths.size() / 2, depths.end());
  return k.fx / depths[depths.size() / 2];
}

}  // namespace

double reprojection_weight(double error_px, double inlier_threshold) {
  if (error_px <= inlier_threshold) return 1.0;
  return inlier_threshold / error_px;
}

std::optional<double> candidate_weight(double error_px, double inlier_threshold,
                                       double eta) {
  if (!(error_px < eta * inlier_threshold)) return std::nullopt;
  return std::min(inlier_threshold / error_px, 1.0);
}

double candidate_damping(int iteration, int first_seen, int warmup_iters) {
  const double ramp = static_cast<double>(iteration - first_seen) / warmup_iters;
  return std::clamp(ramp, 0.0, 1.0);
}

Vec3 homogeneous_image(const Vec2& pixel, const CameraIntrinsics& k) {
  return Vec3(pixel.x() - k.cx, (pixel.y() - k.cy) * (k.fx / k.fy), k.fx);
}

double SolverState::cost() const {
  double total = 0.0;
  for (const SolverTerm& t : terms) {
    total += t.weight * (t.lambda * t.x - x_control - mu * (rotation * t.s)).squaredNorm();
  }
  return total;
}

void SolverState::update_lambdas() {
  for (SolverTerm& t : terms) {
    t.lambda = t.x.dot(x_control + mu * (rotation * t.s)) / t.x.squaredNorm();
  }
}

void SolverState::update_rotation() {
  Mat3 m = Mat3::Zero();
  for (const SolverTerm& t : terms) {
    const Vec3 a = t.lambda * t.x - x_control;
    m += t.weight * a * t.s.transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  rotation = svd.matrixU() * d * svd.matrixV().transpose();
}

void SolverState::update_scale() {
  double numerator = 0.0;
  double denominator = 0.0;
  for (const SolverTerm& t : terms) {
    const Vec3 a = t.lambda * t.x - x_control;
    numerator += t.weight * a.dot(rotation * t.s);
    denominator += t.weight * t.s.squaredNorm();
  }
  if (denominator > 0.0) mu = numerator / denominator;
  if (!(mu > kMinScale)) mu = kMinScale;
}

RigidPose SolverState::pose() const {
  RigidPose p;
  p.rotation = Quat(rotation).normalized();
  p.translation = x_control / mu - rotation * control_world;
  return p;
}

namespace {

struct HypothesisResult {
  SolverState state;
  RigidPose pose;
  bool converged = false;
  DynamicMatchState dynamic;
  bool dynamic_ran = false;
};

// Phase 1: alternation over the original matches with re-weighting between
// sweeps, until the pose settles or max_iters is reached.
HypothesisResult run_core(const PnPProblem& problem, int control_index,
                          const PnPParams& params) {
  const CameraIntrinsics& k = problem.intrinsics;
  const size_t n = problem.size();

  HypothesisResult result;
  SolverState& st = result.state;
  st.x_control = homogeneous_image(problem.image_points[control_index], k);
  st.control_world = problem.world_points[control_index];
  st.rotation = Mat3::Identity();
  st.mu = initial_scale(problem, k);
  st.terms.reserve(n - 1);
  std::vector<int> term_match;  // term index -> match index
  for (size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == control_index) continue;
    SolverTerm t;
    t.x = homogeneous_image(problem.image_points[i], k);
    t.s = problem.world_points[i] - st.control_world;
    t.weight = problem.weights.empty() ? 1.0 : problem.weights[i];
    st.terms.push_back(t);
    term_match.push_back(static_cast<int>(i));
  }

  RigidPose prev = st.pose();
  for (int iter = 0; iter < params.max_iters; ++iter) {
    st.update_lambdas();
    st.update_rotation();
    st.update_scale();
    const RigidPose current = st.pose();

    for (size_t ti = 0; ti < st.terms.size(); ++ti) {
      const int mi = term_match[ti];
      const double e = reprojection_error(current, k, problem.world_points[mi],
                                          problem.image_points[mi]);
      const double base = problem.weights.empty() ? 1.0 : problem.weights[mi];
      st.terms[ti].weight = base * reprojection_weight(e, params.inlier_threshold_px);
    }

    const double change = (current.translation - prev.translation).norm() +
                          rotation_angle_between(current, prev);
    prev = current;
    if (iter > 0 && change < params.tol) {
      result.converged = true;
      break;
    }
  }
  result.pose = prev;
  return result;
}

}  // namespace

PnPSolution r1ppnp_core(const PnPProblem& problem, int control_index,
                        const PnPParams& params) {
  if (problem.size() < 6) {
    throw std::invalid_argument("r1ppnp_core: at least 6 matches required");
  }
  if (control_index < 0 || control_index >= static_cast<int>(problem.size())) {
    throw std::invalid_argument("r1ppnp_core: control index out of range");
  }
  check_world_rank(problem.world_points, control_index);

  HypothesisResult hyp = run_core(problem, control_index, params);

  PnPSolution sol;
  sol.pose = hyp.pose;
  sol.scale_mu = hyp.state.mu;
  sol.converged = hyp.converged;
  sol.control_index = control_index;
  const CameraIntrinsics& k = problem.intrinsics;
  const size_t n = problem.size();
  sol.errors_px.resize(n);
  sol.inlier.resize(n);
  sol.lambdas.assign(n, 1.0);
  sol.match_weights.assign(n, 1.0);
  size_t ti = 0;
  for (size_t i = 0; i < n; ++i) {
    sol.errors_px[i] = reprojection_error(sol.pose, k, problem.world_points[i],
                                          problem.image_points[i]);
    sol.inlier[i] = sol.errors_px[i] < params.inlier_threshold_px ? 1 : 0;
    sol.inlier_count += sol.inlier[i];
    if (static_cast<int>(i) != control_index) {
      sol.lambdas[i] = hyp.state.terms[ti].lambda;
      sol.match_weights[i] = hyp.state.terms[ti].weight;
      ++ti;
    }
  }
  return sol;
}

void dynamic_match_update(const PnPProblem& problem, const RigidPose& pose,
                          int iteration, const PnPParams& params,
                          DynamicMatchState* state) {
  const CameraIntrinsics& k = problem.intrinsics;
  const double gate = params.candidate_gate_eta * params.inlier_threshold_px;
  const size_t n_matches = problem.size();

  // Re-weight the original matches under the current pose.
  state->original_weights.assign(n_matches, 0.0);
  for (size_t m = 0; m < n_matches; ++m) {
    const double e = reprojection_error(pose, k, problem.world_points[m],
                                        problem.image_points[m]);
    const double base = problem.weights.empty() ? 1.0 : problem.weights[m];
    state->original_weights[m] = base * reprojection_weight(e, params.inlier_threshold_px);
  }

  state->candidates.clear();
  if (problem.stored_points.empty() || problem.frame_features.empty()) return;

  // Bucket the visible stored-point reprojections into gate-sized cells so
  // each feature only checks its 3x3 cell neighborhood.
  struct Projected {
    int stored;
    Vec2 pixel;
  };
  std::unordered_map<int64_t, std::vector<Projected>> grid;
  auto cell_key = [gate](double u, double v) {
    const int64_t cu = static_cast<int64_t>(std::floor(u / gate));
    const int64_t cv = static_cast<int64_t>(std::floor(v / gate));
    return (cu << 32) ^ (cv & 0xffffffffll);
  };
  for (size_t j = 0; j < problem.stored_points.size(); ++j) {
    const Vec3 p = pose.apply(problem.stored_points[j]);
    if (!(p.z() > 0.0)) continue;
    const Vec2 px(k.cx + k.fx * p.x() / p.z(), k.cy + k.fy * p.y() / p.z());
    grid[cell_key(px.x(), px.y())].push_back({static_cast<int>(j), px});
  }

  // Map feature -> original match (for row normalization and dedup).
  std::unordered_map<int, int> match_of_feature;
  if (!problem.match_feature_index.empty()) {
    for (size_t m = 0; m < n_matches; ++m) {
      const int fi = problem.match_feature_index[m];
      if (fi >= 0) match_of_feature[fi] = static_cast<int>(m);
    }
  }

  for (size_t fi = 0; fi < problem.frame_features.size(); ++fi) {
    const Vec2& feat = problem.frame_features[fi];
    int original_match = -1;
    int original_stored = -1;
    if (const auto it = match_of_feature.find(static_cast<int>(fi));
        it != match_of_feature.end()) {
      original_match = it->second;
      if (!problem.match_stored_index.empty()) {
        original_stored = problem.match_stored_index[original_match];
      }
    }

    const size_t row_begin = state->candidates.size();
    const int64_t cu = static_cast<int64_t>(std::floor(feat.x() / gate));
    const int64_t cv = static_cast<int64_t>(std::floor(feat.y() / gate));
    for (int64_t dv = -1; dv <= 1; ++dv) {
      for (int64_t du = -1; du <= 1; ++du) {
        const auto it = grid.find(((cu + du) << 32) ^ ((cv + dv) & 0xffffffffll));
        if (it == grid.end()) continue;
        for (const Projected& pr : it->second) {
          if (pr.stored == original_stored) continue;  // duplicates the original
          const double e = (pr.pixel - feat).norm();
          const auto w = candidate_weight(e, params.inlier_threshold_px,
                                          params.candidate_gate_eta);
          if (!w) continue;
          const int64_t key = (static_cast<int64_t>(fi) << 32) | pr.stored;
          const auto [seen, inserted] = state->first_seen.try_emplace(key, iteration);
          DynamicCandidate cand;
          cand.feature = static_cast<int>(fi);
          cand.stored = pr.stored;
          cand.first_seen = seen->second;
          cand.weight = *w * candidate_damping(iteration, seen->second,
                                               params.candidate_warmup_iters);
          state->candidates.push_back(cand);
        }
      }
    }

    // Row normalization: candidates plus the original weight sum to 1.
    const size_t row_end = state->candidates.size();
    if (row_end == row_begin) continue;
    double row_sum = 0.0;
    for (size_t c = row_begin; c < row_end; ++c) row_sum += state->candidates[c].weight;
    if (original_match >= 0) row_sum += state->original_weights[original_match];
    if (row_sum <= 0.0) continue;
    for (size_t c = row_begin; c < row_end; ++c) state->candidates[c].weight /= row_sum;
    if (original_match >= 0) state->original_weights[original_match] /= row_sum;
  }
}

PnPSolution dynamic_r1ppnp(const PnPProblem& problem, const PnPParams& params) {
  if (problem.size() == 0) {
    throw std::invalid_argument("dynamic_r1ppnp: empty problem");
  }
  if (problem.size() < 6) {
    throw std::invalid_argument("dynamic_r1ppnp: at least 6 matches required");
  }
  const CameraIntrinsics& k = problem.intrinsics;

  std::vector<int> order = problem.priority;
  if (order.empty()) {
    order.resize(problem.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  }

  const bool dynamic_enabled =
      !problem.stored_points.empty() && !problem.frame_features.empty();

  PnPSolution best;
  best.inlier_count = -1;
  int trials = 0;
  for (int control : order) {
    if (trials >= params.max_control_trials) break;
    ++trials;

    PnPSolution sol = r1ppnp_core(problem, control, params);

    if (dynamic_enabled) {
      // Interleave candidate updating with single alternation sweeps.
      DynamicMatchState dyn;
      SolverState st;
      st.x_control = homogeneous_image(problem.image_points[control], k);
      st.control_world = problem.world_points[control];
      st.rotation = sol.pose.matrix();
      st.mu = sol.scale_mu;
      RigidPose prev = sol.pose;
      bool converged = false;
      std::vector<double> lambdas(problem.size(), 1.0);

      for (int iter = 1; iter <= params.max_iters; ++iter) {
        dynamic_match_update(problem, prev, iter, params, &dyn);

        st.terms.clear();
        std::vector<int> term_match;
        for (size_t m = 0; m < problem.size(); ++m) {
          if (static_cast<int>(m) == control) continue;
          SolverTerm t;
          t.x = homogeneous_image(problem.image_points[m], k);
          t.s = problem.world_points[m] - st.control_world;
          t.weight = dyn.original_weights[m];
          st.terms.push_back(t);
          term_match.push_back(static_cast<int>(m));
        }
        for (const DynamicCandidate& cand : dyn.candidates) {
          if (cand.weight <= 0.0) continue;
          SolverTerm t;
          t.x = homogeneous_image(problem.frame_features[cand.feature], k);
          t.s = problem.stored_points[cand.stored] - st.control_world;
          t.weight = cand.weight;
          st.terms.push_back(t);
          term_match.push_back(-1);
        }

        st.update_lambdas();
        st.update_rotation();
        st.update_scale();
        const RigidPose current = st.pose();
        for (size_t ti = 0; ti < st.terms.size(); ++ti) {
          if (term_match[ti] >= 0) lambdas[term_match[ti]] = st.terms[ti].lambda;
        }

        const double change = (current.translation - prev.translation).norm() +
                              rotation_angle_between(current, prev);
        prev = current;
        if (change < params.tol) {
          converged = true;
          break;
        }
      }

      sol.pose = prev;
      sol.scale_mu = st.mu;
      sol.converged = converged;
      sol.candidates = dyn.candidates;
      sol.match_weights = dyn.original_weights;
      sol.lambdas = lambdas;
      sol.inlier_count = 0;
      for (size_t m = 0; m < problem.size(); ++m) {
        sol.errors_px[m] = reprojection_error(sol.pose, k, problem.world_points[m],
                                              problem.image_points[m]);
        sol.inlier[m] = sol.errors_px[m] < params.inlier_threshold_px ? 1 : 0;
        sol.inlier_count += sol.inlier[m];
      }
    }

    if (sol.inlier_count >= params.min_inlier_count) {
      sol.tracking_failure = false;
      return sol;
    }
    if (sol.inlier_count > best.inlier_count) best = sol;
  }

  best.tracking_failure = true;
  return best;
}

}  // namespace stereoscan::pnp

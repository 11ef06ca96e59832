#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "stereoscan/core/types.hpp"

namespace stereoscan::pnp {

struct PnPParams {
  double inlier_threshold_px = 5.0;  // H: reprojection gate for inliers
  double candidate_gate_eta = 2.0;   // eta: dynamic candidates accepted below eta*H
  int candidate_warmup_iters = 5;    // T: iterations for a candidate to reach full weight
  int max_iters = 100;
  double tol = 1e-6;                 // pose-change convergence threshold
  int max_control_trials = 20;
  int min_inlier_count = 20;
};

// 3D-2D matches plus the substrate for dynamic correspondence updating.
// stored_points and world_points share one frame (the caller's reference
// frame); the solved pose maps that frame into the current camera.
struct PnPProblem {
  CameraIntrinsics intrinsics;
  std::vector<Vec3> world_points;   // per match
  std::vector<Vec2> image_points;   // per match, pixels
  std::vector<double> weights;      // initial match weights; empty = all 1
  std::vector<int> priority;        // control-point order; empty = input order

  // Dynamic-update substrate (all optional; empty disables the dynamic phase).
  std::vector<Vec3> stored_points;
  std::vector<Vec2> frame_features;
  std::vector<int> match_feature_index;  // per match -> frame_features, -1 unknown
  std::vector<int> match_stored_index;   // per match -> stored_points, -1 unknown

  size_t size() const { return world_points.size(); }
};

struct DynamicCandidate {
  int feature = -1;
  int stored = -1;
  double weight = 0.0;  // after damping and row normalization
  int first_seen = 0;
};

struct PnPSolution {
  RigidPose pose;
  double scale_mu = 0.0;
  std::vector<double> lambdas;    // per original match
  std::vector<double> errors_px;  // per original match
  std::vector<uint8_t> inlier;    // exactly errors_px < H
  int inlier_count = 0;
  bool converged = false;
  bool tracking_failure = false;
  int control_index = -1;
  std::vector<double> match_weights;        // final per-match weights
  std::vector<DynamicCandidate> candidates; // final dynamic candidates
};

// Re-weighting rule: 1 when e <= H, else H / e.
double reprojection_weight(double error_px, double inlier_threshold);

// Candidate weight before damping: min(H/e, 1) when e < eta*H, otherwise none.
std::optional<double> candidate_weight(double error_px, double inlier_threshold,
                                       double eta);

// Warm-up damping for newly observed candidates: min((k - k0)/T, 1).
double candidate_damping(int iteration, int first_seen, int warmup_iters);

// One weighted correspondence of the block-coordinate solver.
struct SolverTerm {
  Vec3 x;            // homogeneous image vector [u - cx, (v - cy) fx/fy, fx]
  Vec3 s;            // world point relative to the control point
  double weight = 1.0;
  double lambda = 1.0;
};

// Block-coordinate state for minimizing
//   f(R, mu, lambda) = sum_i w_i || lambda_i x_i - x_o - mu R S_i ||^2.
// Each update_* is the exact minimizer of its block given the others, so
// cost() is non-increasing across updates while weights stay fixed.
struct SolverState {
  Vec3 x_control;
  Vec3 control_world;
  Mat3 rotation = Mat3::Identity();
  double mu = 1.0;
  std::vector<SolverTerm> terms;

  double cost() const;
  void update_lambdas();
  void update_rotation();
  void update_scale();
  RigidPose pose() const;  // t = (1/mu) x_o - R X_o
};

// Homogeneous image vector for the pin-hole model used by the solver.
Vec3 homogeneous_image(const Vec2& pixel, const CameraIntrinsics& k);

// Robust pose from one control-point hypothesis: alternating exact block
// updates with the re-weighting rule applied between sweeps. Throws Error
// when the world configuration is rank-deficient (all points collinear);
// requires >= 6 matches.
PnPSolution r1ppnp_core(const PnPProblem& problem, int control_index,
                        const PnPParams& params);

// Registry and output of the dynamic correspondence update.
struct DynamicMatchState {
  std::unordered_map<int64_t, int> first_seen;  // (feature, stored) -> iteration
  std::vector<DynamicCandidate> candidates;     // latest update, normalized
  std::vector<double> original_weights;         // per match, latest update
};

// Regenerates candidate correspondences under the current pose estimate and
// refreshes all weights: originals by the re-weighting rule, candidates by
// the gated weight with warm-up damping, then rows (candidates plus the
// original weight of the same feature) normalized to sum to 1. Features
// without candidates keep their re-weighted original weight.
void dynamic_match_update(const PnPProblem& problem, const RigidPose& pose,
                          int iteration, const PnPParams& params,
                          DynamicMatchState* state);

// Full tracker: control-point hypotheses in priority order, each solved by
// r1ppnp_core then refined with dynamic match updating interleaved per
// iteration. Accepts the first hypothesis reaching min_inlier_count;
// otherwise returns the best solution flagged tracking_failure.
PnPSolution dynamic_r1ppnp(const PnPProblem& problem, const PnPParams& params);

}  // namespace stereoscan::pnp

#pragma once

#include <array>

#include "plidar/box_geometry.hpp"
#include "plidar/camera_geometry.hpp"
#include "plidar/differential_evolution.hpp"
#include "plidar/types.hpp"

namespace plidar {

struct SmoothL1 {
  double value = 0.0;
  double derivative = 0.0;
};

/// Fast R-CNN smooth L1: quadratic inside |x| < beta, linear outside.
SmoothL1 smooth_l1(double x, double beta = 1.0);

/// Residuals (t^e - t^p) for the tuple (x, y, w, h), where t^e is the MBR of
/// the projected box corners and t^p the proposal.
std::array<double, 4> bbc_residuals(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr);

/// 2D-3D box consistency loss: sum of smooth L1 over the four residuals.
/// Propagates BehindCameraError when a corner is not in front of the camera.
double bbc_loss(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr, double beta = 1.0);

/// Analytic gradient of bbc_loss w.r.t. (x, y, z, h, w, l, theta).
///
/// The MBR's min/max are taken at single corners; on ties the lowest corner
/// index is used, which yields a valid subgradient.
std::array<double, 7> bbc_gradient(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr,
                                   double beta = 1.0);

/// Search box for the refinement, per parameter (x, y, z, h, w, l, theta).
struct ParamBounds {
  std::array<double, 7> low{};
  std::array<double, 7> high{};

  bool contains(const std::array<double, 7>& p) const;
};

/// Half-width of parameter p is a[p] + b[p] * depth.
struct BoundCoefficients {
  std::array<double, 7> a{0.5, 0.5, 0.5, 0.2, 0.2, 0.4, 0.2};
  std::array<double, 7> b{0.05, 0.02, 0.10, 0.0, 0.0, 0.0, 0.0};
};

/// Bounds centered on `init` whose widths grow linearly with init.z. The
/// heading half-width is capped at pi and size lower bounds at 0.
/// Throws InvalidInputError unless init.z > 0.
ParamBounds depth_linear_bounds(const Box3D& init, const BoundCoefficients& coeffs = {});

DEResult differential_evolution(const Objective& objective, const ParamBounds& bounds, const DEConfig& cfg,
                                const std::array<double, 7>& init);

struct BbcoResult {
  Box3D box;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool improved = false;  ///< false when the initial box was kept
  DEResult search;
};

/// Weight of the pull toward the initial box in refine_bbco, in loss units
/// per metre (per radian for theta). bbc_loss alone leaves a family of
/// equally consistent boxes (e.g. scaling about the camera); the pull picks
/// the one nearest the initial estimate. Being linear, it stops drift driven
/// by sub-pixel residuals without holding back multi-pixel corrections.
inline constexpr double kBbcoProximalWeight = 10.0;

/// Test-time refinement: minimizes
///   bbc_loss(box) + proximal_weight * sum_i |p_i - init_i|
/// with differential evolution over depth_linear_bounds(init). Candidates with
/// a corner at or behind the camera score +inf. The returned box is the
/// optimum if its bbc_loss is strictly below init's, otherwise init, so
/// bbc_loss never increases.
BbcoResult refine_bbco(const Box3D& init, const Rect& proposal, const CameraIntrinsics& intr,
                       const DEConfig& cfg = {}, const BoundCoefficients& coeffs = {},
                       double proximal_weight = kBbcoProximalWeight);

}  // namespace plidar

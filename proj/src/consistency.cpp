#include "plidar/consistency.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "plidar/error.hpp"

namespace plidar {

SmoothL1 smooth_l1(double x, double beta) {
  if (std::abs(x) < beta) return {0.5 * x * x / beta, x / beta};
  return {std::abs(x) - 0.5 * beta, x > 0.0 ? 1.0 : -1.0};
}

namespace {

struct Extremes {
  std::size_t umin = 0, umax = 0, vmin = 0, vmax = 0;
};

// Strict comparisons keep the lowest index among tied corners.
Extremes mbr_achievers(const std::array<PixelCoord, 8>& px) {
  Extremes e;
  for (std::size_t i = 1; i < 8; ++i) {
    if (px[i].u < px[e.umin].u) e.umin = i;
    if (px[i].u > px[e.umax].u) e.umax = i;
    if (px[i].v < px[e.vmin].v) e.vmin = i;
    if (px[i].v > px[e.vmax].v) e.vmax = i;
  }
  return e;
}

}  // namespace

std::array<double, 4> bbc_residuals(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr) {
  const auto px = project_box(box, intr);
  const Rect est = mbr(px);
  return {est.x - proposal.x, est.y - proposal.y, est.w - proposal.w, est.h - proposal.h};
}

double bbc_loss(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr, double beta) {
  double loss = 0.0;
  for (double r : bbc_residuals(box, proposal, intr)) loss += smooth_l1(r, beta).value;
  return loss;
}

std::array<double, 7> bbc_gradient(const Box3D& box, const Rect& proposal, const CameraIntrinsics& intr,
                                   double beta) {
  using Vec7 = Eigen::Matrix<double, 7, 1>;
  const auto pts = corners(box);
  const auto px = project_box(box, intr);
  const Eigen::Matrix3d rot = rot_y(box.theta);
  const double c = std::cos(box.theta), s = std::sin(box.theta);
  Eigen::Matrix3d drot;
  drot << -s, 0.0, c,
          0.0, 0.0, 0.0,
          -c, 0.0, -s;

  // d(pixel)/d(params) for one corner, through d(corner)/d(params).
  auto jacobians = [&](std::size_t n, Vec7& du, Vec7& dv) {
    const auto& sg = kCornerSigns[n];
    Eigen::Matrix<double, 3, 7> dp = Eigen::Matrix<double, 3, 7>::Zero();
    dp.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
    dp.col(3) = Eigen::Vector3d(0.0, 0.5 * sg[1], 0.0);
    dp.col(4) = 0.5 * sg[2] * rot.col(2);
    dp.col(5) = 0.5 * sg[0] * rot.col(0);
    const Eigen::Vector3d local(0.5 * sg[0] * box.l, 0.5 * sg[1] * box.h, 0.5 * sg[2] * box.w);
    dp.col(6) = drot * local;

    const Point3& p = pts[n];
    const double iz = 1.0 / p.z();
    const Eigen::RowVector3d du_dp(intr.fx * iz, 0.0, -intr.fx * (p.x() + intr.bx) * iz * iz);
    const Eigen::RowVector3d dv_dp(0.0, intr.fy * iz, -intr.fy * (p.y() + intr.by) * iz * iz);
    du = (du_dp * dp).transpose();
    dv = (dv_dp * dp).transpose();
  };

  const Extremes e = mbr_achievers(px);
  Vec7 du_min, dv_unused, du_max, dv_min, dv_max, du_unused;
  jacobians(e.umin, du_min, dv_unused);
  jacobians(e.umax, du_max, dv_unused);
  jacobians(e.vmin, du_unused, dv_min);
  jacobians(e.vmax, du_unused, dv_max);

  const Rect est = mbr(px);
  const double gx = smooth_l1(est.x - proposal.x, beta).derivative;
  const double gy = smooth_l1(est.y - proposal.y, beta).derivative;
  const double gw = smooth_l1(est.w - proposal.w, beta).derivative;
  const double gh = smooth_l1(est.h - proposal.h, beta).derivative;

  const Vec7 g = gx * du_min + gy * dv_min + gw * (du_max - du_min) + gh * (dv_max - dv_min);
  std::array<double, 7> out;
  for (int i = 0; i < 7; ++i) out[std::size_t(i)] = g[i];
  return out;
}

bool ParamBounds::contains(const std::array<double, 7>& p) const {
  for (std::size_t i = 0; i < 7; ++i) {
    if (!(p[i] >= low[i] && p[i] <= high[i])) return false;
  }
  return true;
}

ParamBounds depth_linear_bounds(const Box3D& init, const BoundCoefficients& coeffs) {
  if (!(init.z > 0.0)) throw InvalidInputError("depth_linear_bounds: init box must have z > 0");
  const auto p = init.params();
  ParamBounds out;
  for (std::size_t i = 0; i < 7; ++i) {
    double half = coeffs.a[i] + coeffs.b[i] * init.z;
    if (i == 6) half = std::min(half, std::numbers::pi);
    out.low[i] = p[i] - half;
    out.high[i] = p[i] + half;
  }
  for (std::size_t i = 3; i < 6; ++i) out.low[i] = std::max(0.0, out.low[i]);
  return out;
}

DEResult differential_evolution(const Objective& objective, const ParamBounds& bounds, const DEConfig& cfg,
                                const std::array<double, 7>& init) {
  return differential_evolution(objective, bounds.low, bounds.high, cfg, init);
}

BbcoResult refine_bbco(const Box3D& init, const Rect& proposal, const CameraIntrinsics& intr, const DEConfig& cfg,
                       const BoundCoefficients& coeffs, double proximal_weight) {
  if (!(proximal_weight >= 0.0) || !std::isfinite(proximal_weight)) {
    throw InvalidInputError("refine_bbco: proximal_weight must be finite and >= 0");
  }
  init.validate();
  intr.validate();
  BbcoResult result;
  result.initial_loss = bbc_loss(init, proposal, intr);

  const ParamBounds bounds = depth_linear_bounds(init, coeffs);
  const auto start = init.params();
  const Objective objective = [&](std::span<const double> p) {
    const Box3D box = Box3D::from_params(std::span<const double, 7>(p.data(), 7));
    for (const auto& c : corners(box)) {
      if (!(c.z() > 0.0)) return std::numeric_limits<double>::infinity();
    }
    double drift = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      drift += std::abs(p[i] - start[i]);
    }
    return bbc_loss(box, proposal, intr) + proximal_weight * drift;
  };
  result.search = differential_evolution(objective, bounds, cfg, init.params());

  if (std::isfinite(result.search.value)) {
    result.box = Box3D::from_params(std::span<const double, 7>(result.search.best.data(), 7));
    result.box.theta = normalize_angle(result.box.theta);
    result.final_loss = bbc_loss(result.box, proposal, intr);
    result.improved = result.final_loss < result.initial_loss;
  }
  if (!result.improved) {
    result.box = init;
    result.final_loss = result.initial_loss;
    result.improved = false;
  }
  return result;
}

}  // namespace plidar

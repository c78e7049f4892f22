#pragma once

#include "plidar/box_geometry.hpp"
#include "plidar/types.hpp"

namespace plidar {

/// Candidates whose footprint area is within this relative margin of the
/// minimum are treated as tied and separated by boundary closeness.
inline constexpr double kFootprintAreaTieTolerance = 0.05;

/// Fits an oriented box to a frustum cloud.
///
/// The footprint is the minimum-area rectangle enclosing the convex hull of
/// the (x, z) points, searched over hull-edge-flush orientations (rotating
/// calipers). Near-ties in area, typical for L-shaped clouds where only two
/// faces are visible, go to the rectangle whose edges lie closest to the
/// points. The vertical extent is [min y, max y]. The result has l >= w
/// with theta along the length axis, in (-pi/2, pi/2].
///
/// Throws DegenerateInputError for fewer than 3 points or a collinear footprint.
Box3D fit_box_baseline(const PointCloud& cloud);

/// Class mean dimensions used to complete partially observed footprints
/// (defaults: KITTI Car averages).
struct SizePrior {
  double h = 1.53;
  double w = 1.63;
  double l = 3.88;
};

/// A footprint side shorter than this fraction of the prior counts as unobserved.
inline constexpr double kPartialExtentFraction = 0.6;

/// Completes a box fitted to a single visible face or a face plus a sliver.
///
/// If w < kPartialExtentFraction * prior.w the footprint is one face seen
/// edge-on: a face at least as long as the prior's mean of w and l becomes a
/// long side (w := prior.w), a shorter one a short side (l := prior.l). If only
/// l < kPartialExtentFraction * prior.l, the axis closer to the viewing
/// direction is extended to prior.l. In every case the face nearest
/// `viewpoint` stays in place and the box grows away from it. Boxes with
/// both extents plausible are returned unchanged.
Box3D complete_with_prior(const Box3D& fit, const SizePrior& prior, const Point3& viewpoint);

/// fit_box_baseline followed by complete_with_prior. A collinear footprint
/// (a single face viewed straight on) becomes a zero-width box along the
/// segment before completion. Throws DegenerateInputError only when the cloud
/// has fewer than 3 points or a single BEV location.
Box3D fit_box_with_prior(const PointCloud& cloud, const SizePrior& prior, const Point3& viewpoint);

/// Depth-based tail trimming.
///
/// Removes up to floor(k * N) points on each side of the median depth,
/// farthest first, never touching points within 1e-9 of the median. On a
/// cloud with distinct depths the result has N - 2 floor(k * N) points.
/// Surviving points keep their input order. Requires 0 <= k < 0.5 and a
/// non-empty cloud (InvalidInputError otherwise).
PointCloud trim_outliers(const PointCloud& cloud, double k);

}  // namespace plidar

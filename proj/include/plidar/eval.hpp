#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "plidar/box_geometry.hpp"
#include "plidar/kitti_io.hpp"
#include "plidar/types.hpp"

namespace plidar::eval {

struct Detection {
  Box3D box3d;
  Rect box2d;
  double score = 0.0;
  std::string class_name;
};

struct GroundTruthObj {
  Box3D box3d;
  Rect box2d;
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
};

enum class Metric { Box2D, Bev, Box3D };

/// `All` keeps every ground truth of the evaluated class regardless of size,
/// occlusion or truncation.
enum class Difficulty { Easy, Moderate, Hard, All };

enum class Assigned { Easy, Moderate, Hard, Ignored };

struct EvalConfig {
  Metric metric = Metric::Box3D;
  double iou_threshold = 0.7;
  Difficulty difficulty = Difficulty::Moderate;
  std::size_t ap_points = 11;
  /// Drop recall 0 from the grid (KITTI R40 style when ap_points = 41).
  bool skip_zero_recall = false;
  std::string class_name = "Car";

  void validate() const;
};

std::string_view to_string(Metric m);
std::string_view to_string(Difficulty d);

/// Easiest KITTI bucket the object qualifies for (min box height 40/25/25 px,
/// max occlusion 0/1/2, max truncation 0.15/0.30/0.50), else Ignored.
Assigned assign_difficulty(const GroundTruthObj& gt);

/// True when an object of bucket `a` is evaluated at difficulty `d`.
bool counts_at(Assigned a, Difficulty d);

enum class Outcome { TruePositive, FalsePositive, Ignored };

struct ImageMatch {
  std::vector<Outcome> outcomes;  ///< per input detection
  std::vector<int> matched_gt;    ///< gt index per detection, -1 if none
  std::size_t false_negatives = 0;
  std::size_t valid_gts = 0;
};

/// Greedy one-to-one matching in descending score order (stable: earlier
/// index first on ties). Each detection takes the unmatched valid ground
/// truth with the highest IoU >= threshold. Failing that, a detection that
/// overlaps an ignored ground truth (wrong difficulty, or a neighbouring
/// class: Van for Car, Person_sitting for Pedestrian) at the threshold, or a
/// DontCare region at 2D IoU >= 0.5, is ignored. Everything else is a false
/// positive. All detections must have class cfg.class_name
/// (InvalidInputError otherwise); ground truth may hold any class.
ImageMatch match_image(const std::vector<Detection>& dets, const std::vector<GroundTruthObj>& gts,
                       const EvalConfig& cfg);

struct ScoredOutcome {
  double score = 0.0;
  Outcome outcome = Outcome::FalsePositive;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// One point per non-ignored detection, in descending score order.
/// Throws UndefinedRecallError when valid_gts == 0.
std::vector<PrPoint> precision_recall(std::vector<ScoredOutcome> outcomes, std::size_t valid_gts);

/// Interpolated AP: mean over the recall grid of the best precision at
/// recall >= r (0 when unreachable). The grid is {0, 1/(N-1), ..., 1}, or
/// {1/(N-1), ..., 1} with skip_zero_recall.
double average_precision(const std::vector<PrPoint>& curve, std::size_t n_points, bool skip_zero_recall = false);

using PerImage = std::map<std::string, std::vector<Detection>>;
using PerImageGt = std::map<std::string, std::vector<GroundTruthObj>>;

struct EvalResult {
  double ap = 0.0;
  std::vector<PrPoint> curve;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t valid_gts = 0;
};

/// Runs match_image per image, pools the outcomes and computes AP. Images
/// are keyed by id; a detection key with no ground-truth entry is an
/// InvalidInputError. Detections of other classes are skipped.
EvalResult evaluate(const PerImage& dets, const PerImageGt& gts, const EvalConfig& cfg);

Detection detection_from_label(const kitti::LabelRecord& rec);
GroundTruthObj ground_truth_from_label(const kitti::LabelRecord& rec);

}  // namespace plidar::eval

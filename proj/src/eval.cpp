#include "plidar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plidar/error.hpp"

namespace plidar::eval {

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw InvalidInputError("iou_threshold must be in (0, 1]");
  if (ap_points < 2) throw InvalidInputError("ap_points must be >= 2");
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Box2D: return "2d";
    case Metric::Bev: return "bev";
    case Metric::Box3D: return "3d";
  }
  return "?";
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
    case Difficulty::All: return "all";
  }
  return "?";
}

Assigned assign_difficulty(const GroundTruthObj& gt) {
  const double h = gt.box2d.h;
  if (h >= 40.0 && gt.occlusion <= 0 && gt.truncation <= 0.15) return Assigned::Easy;
  if (h >= 25.0 && gt.occlusion <= 1 && gt.truncation <= 0.30) return Assigned::Moderate;
  if (h >= 25.0 && gt.occlusion <= 2 && gt.truncation <= 0.50) return Assigned::Hard;
  return Assigned::Ignored;
}

bool counts_at(Assigned a, Difficulty d) {
  switch (d) {
    case Difficulty::All: return true;
    case Difficulty::Easy: return a == Assigned::Easy;
    case Difficulty::Moderate: return a == Assigned::Easy || a == Assigned::Moderate;
    case Difficulty::Hard: return a != Assigned::Ignored;
  }
  return false;
}

namespace {

bool is_neighbor_class(std::string_view evaluated, std::string_view other) {
  return (evaluated == "Car" && other == "Van") || (evaluated == "Pedestrian" && other == "Person_sitting");
}

double overlap(const Detection& d, const GroundTruthObj& g, Metric m) {
  switch (m) {
    case Metric::Box2D: return iou2d(d.box2d, g.box2d);
    case Metric::Bev: return iou_bev(d.box3d, g.box3d);
    case Metric::Box3D: return iou3d(d.box3d, g.box3d);
  }
  return 0.0;
}

std::vector<std::size_t> by_descending_score(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

ImageMatch match_image(const std::vector<Detection>& dets, const std::vector<GroundTruthObj>& gts,
                       const EvalConfig& cfg) {
  cfg.validate();
  enum class Role { Valid, Ignored, DontCare, Other };
  std::vector<Role> role(gts.size(), Role::Other);
  ImageMatch result;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const auto& gt = gts[g];
    if (gt.class_name == "DontCare") {
      role[g] = Role::DontCare;
    } else if (gt.class_name == cfg.class_name) {
      role[g] = counts_at(assign_difficulty(gt), cfg.difficulty) ? Role::Valid : Role::Ignored;
    } else if (is_neighbor_class(cfg.class_name, gt.class_name)) {
      role[g] = Role::Ignored;
    }
    if (role[g] == Role::Valid) ++result.valid_gts;
  }

  std::vector<double> scores;
  scores.reserve(dets.size());
  for (const auto& d : dets) {
    if (d.class_name != cfg.class_name) {
      throw InvalidInputError("match_image: detection class '" + d.class_name + "' differs from '" + cfg.class_name + "'");
    }
    scores.push_back(d.score);
  }

  result.outcomes.assign(dets.size(), Outcome::FalsePositive);
  result.matched_gt.assign(dets.size(), -1);
  std::vector<std::uint8_t> taken(gts.size(), 0);
  for (std::size_t di : by_descending_score(scores)) {
    const Detection& det = dets[di];
    int best_valid = -1, best_ignored = -1;
    double best_valid_iou = -1.0, best_ignored_iou = -1.0;
    bool in_dontcare = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (role[g] == Role::DontCare) {
        in_dontcare = in_dontcare || iou2d(det.box2d, gts[g].box2d) >= 0.5;
        continue;
      }
      if (role[g] == Role::Other || taken[g]) continue;
      const double iou = overlap(det, gts[g], cfg.metric);
      if (iou < cfg.iou_threshold) continue;
      if (role[g] == Role::Valid && iou > best_valid_iou) {
        best_valid_iou = iou;
        best_valid = int(g);
      } else if (role[g] == Role::Ignored && iou > best_ignored_iou) {
        best_ignored_iou = iou;
        best_ignored = int(g);
      }
    }
    if (best_valid >= 0) {
      taken[std::size_t(best_valid)] = 1;
      result.outcomes[di] = Outcome::TruePositive;
      result.matched_gt[di] = best_valid;
    } else if (best_ignored >= 0) {
      taken[std::size_t(best_ignored)] = 1;
      result.outcomes[di] = Outcome::Ignored;
      result.matched_gt[di] = best_ignored;
    } else if (in_dontcare) {
      result.outcomes[di] = Outcome::Ignored;
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (role[g] == Role::Valid && !taken[g]) ++result.false_negatives;
  }
  return result;
}

std::vector<PrPoint> precision_recall(std::vector<ScoredOutcome> outcomes, std::size_t valid_gts) {
  if (valid_gts == 0) throw UndefinedRecallError("precision_recall: no valid ground truth");
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const ScoredOutcome& a, const ScoredOutcome& b) { return a.score > b.score; });
  std::vector<PrPoint> curve;
  std::size_t tp = 0, fp = 0;
  for (const auto& o : outcomes) {
    if (o.outcome == Outcome::Ignored) continue;
    if (o.outcome == Outcome::TruePositive) {
      ++tp;
    } else {
      ++fp;
    }
    curve.push_back({double(tp) / double(valid_gts), double(tp) / double(tp + fp)});
  }
  return curve;
}

double average_precision(const std::vector<PrPoint>& curve, std::size_t n_points, bool skip_zero_recall) {
  if (n_points < 2) throw InvalidInputError("average_precision: n_points must be >= 2");
  // Suffix maximum of precision, so each grid level is one lookup.
  std::vector<double> best_after(curve.size() + 1, 0.0);
  for (std::size_t i = curve.size(); i-- > 0;) best_after[i] = std::max(best_after[i + 1], curve[i].precision);

  const std::size_t first = skip_zero_recall ? 1 : 0;
  double sum = 0.0;
  for (std::size_t k = first; k < n_points; ++k) {
    const double r = double(k) / double(n_points - 1);
    std::size_t i = 0;
    while (i < curve.size() && curve[i].recall < r - 1e-12) ++i;
    sum += best_after[i];
  }
  return sum / double(n_points - first);
}

EvalResult evaluate(const PerImage& dets, const PerImageGt& gts, const EvalConfig& cfg) {
  cfg.validate();
  for (const auto& [key, _] : dets) {
    if (!gts.contains(key)) throw InvalidInputError("evaluate: detections for unknown image '" + key + "'");
  }
  EvalResult result;
  std::vector<ScoredOutcome> pooled;
  static const std::vector<Detection> kNone;
  for (const auto& [key, image_gts] : gts) {
    const auto it = dets.find(key);
    std::vector<Detection> image_dets;
    for (const auto& d : it == dets.end() ? kNone : it->second) {
      if (d.class_name == cfg.class_name) image_dets.push_back(d);
    }
    const ImageMatch m = match_image(image_dets, image_gts, cfg);
    for (std::size_t i = 0; i < image_dets.size(); ++i) {
      pooled.push_back({image_dets[i].score, m.outcomes[i]});
      if (m.outcomes[i] == Outcome::TruePositive) ++result.true_positives;
      if (m.outcomes[i] == Outcome::FalsePositive) ++result.false_positives;
    }
    result.false_negatives += m.false_negatives;
    result.valid_gts += m.valid_gts;
  }
  result.curve = precision_recall(std::move(pooled), result.valid_gts);
  result.ap = average_precision(result.curve, cfg.ap_points, cfg.skip_zero_recall);
  return result;
}

Detection detection_from_label(const kitti::LabelRecord& rec) {
  return {kitti::label_to_box3d(rec), rec.bbox2d, rec.score.value_or(1.0), rec.class_name};
}

GroundTruthObj ground_truth_from_label(const kitti::LabelRecord& rec) {
  return {kitti::label_to_box3d(rec), rec.bbox2d, rec.class_name, rec.truncation, rec.occlusion};
}

}  // namespace plidar::eval

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "plidar/cli.hpp"
#include "plidar/error.hpp"
#include "plidar/eval.hpp"
#include "plidar/pseudolidar.hpp"
#include "plidar/random.hpp"
#include "plidar/synth.hpp"

namespace plidar::cli {

namespace fs = std::filesystem;

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {
    const char* env = std::getenv("PLIDAR_LOG");
    const std::string v = env ? env : "";
    if (v == "quiet" || v == "error") level_ = Level::Error;
    if (v == "warn") level_ = Level::Warn;
    if (v == "debug") level_ = Level::Debug;
  }
  void log(Level lvl, const std::string& msg) {
    static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
    if (lvl > level_) return;
    std::lock_guard lock(mu_);
    err_ << "[" << kNames[int(lvl)] << "] " << msg << "\n";
  }
  void error(const std::string& m) { log(Level::Error, m); }
  void warn(const std::string& m) { log(Level::Warn, m); }
  void info(const std::string& m) { log(Level::Info, m); }

 private:
  std::ostream& err_;
  Level level_ = Level::Info;
  std::mutex mu_;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write only to
// slot i of preallocated output, so results do not depend on scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

struct FrameStatus {
  std::vector<std::string> warnings;
  std::string error;
  std::string summary;
};

CameraIntrinsics load_intrinsics(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return kitti::intrinsics_from_calib(kitti::parse_calib({reinterpret_cast<const char*>(bytes.data()), bytes.size()}));
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template <class T, class F>
T with_path(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const NotFoundError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<kitti::LabelRecord> load_labels(const fs::path& path, kitti::ParseMode mode, std::vector<std::string>& warnings) {
  const auto bytes = read_file(path);
  std::vector<std::string> w;
  auto labels = with_path<std::vector<kitti::LabelRecord>>(path, [&] {
    return kitti::parse_labels({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, mode, &w);
  });
  for (auto& s : w) warnings.push_back(path.string() + ": " + s);
  return labels;
}

void require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw NotFoundError("directory not found: " + dir.string());
}

std::vector<std::string> select_frames(const fs::path& dir, const std::string& ext, const std::vector<std::string>& wanted) {
  if (!wanted.empty()) return wanted;
  return list_frames(dir, ext);
}

// Reports per-frame results in frame order and returns the exit code.
int report(Logger& log, std::ostream& out, const std::vector<std::string>& frames, const std::vector<FrameStatus>& status,
           bool strict) {
  bool warned = false, failed = false;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (const auto& w : status[i].warnings) {
      log.warn("frame " + frames[i] + ": " + w);
      warned = true;
    }
    if (!status[i].error.empty()) {
      log.error("frame " + frames[i] + ": " + status[i].error);
      failed = true;
    }
    if (!status[i].summary.empty()) out << status[i].summary << "\n";
  }
  if (failed && strict) return kInputError;
  return (failed || warned) ? kWarnings : kOk;
}

void add_de_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--de-population", cfg.de.population_size, "DE population size")->capture_default_str();
  app->add_option("--de-f", cfg.de.weight_f, "DE differential weight")->capture_default_str();
  app->add_option("--de-cr", cfg.de.crossover_cr, "DE crossover probability")->capture_default_str();
  app->add_option("--de-generations", cfg.de.max_generations, "DE generation limit")->capture_default_str();
  app->add_option("--de-tol", cfg.de.tol, "DE convergence tolerance on the fitness spread")->capture_default_str();
  app->add_option("--proximal-weight", cfg.proximal_weight, "pull toward the initial box during refinement")
      ->capture_default_str();
  app->add_option("--bound-a", cfg.bounds.a, "constant slack for x y z h w l theta")->capture_default_str();
  app->add_option("--bound-b", cfg.bounds.b, "slack per metre of depth for x y z h w l theta")->capture_default_str();
}

void add_config(CLI::App* app, std::string& path) {
  app->add_option("--config", path, "flat key = value file; command-line flags override it");
}

// Applies `key = value` lines to options of `app` that were not given on the
// command line. Keys are long option names without the leading dashes.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  if (!fs::is_regular_file(path)) throw NotFoundError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw FormatError(path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    CLI::Option* opt = app->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") throw FormatError(path + ": unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw FormatError(path + ": bad value for '" + item.name + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------

struct LiftArgs {
  std::string data, out, format = "bin";
  std::optional<double> min_depth, max_depth;
  std::vector<std::string> frames;
  std::size_t workers = 1;
};

int cmd_lift(const LiftArgs& a, Logger& log, std::ostream& out) {
  const fs::path root(a.data);
  require_dir(root / "calib");
  require_dir(root / "depth");
  fs::create_directories(a.out);
  const auto frames = select_frames(root / "depth", ".png", a.frames);
  const auto fmt = a.format == "ply" ? kitti::CloudFormat::Ply : kitti::CloudFormat::Bin;
  LiftOptions opts;
  opts.min_depth = a.min_depth;
  opts.max_depth = a.max_depth;

  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), a.workers, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const auto intr = load_intrinsics(root / "calib" / (f + ".txt"));
      const fs::path dpath = root / "depth" / (f + ".png");
      const auto dbytes = read_file(dpath);
      const auto depth = with_path<DepthMap>(dpath, [&] { return kitti::read_depth_png(dbytes); });
      const auto cloud = generate_pseudolidar(depth, intr, std::nullopt, opts);
      const auto bytes = kitti::write_pointcloud(cloud, fmt);
      write_file(fs::path(a.out) / (f + "." + a.format), bytes.data(), bytes.size());
      status[i].summary = f + " " + std::to_string(cloud.size());
    } catch (const Error& e) {
      status[i].error = e.what();
    }
  });
  return report(log, out, frames, status, true);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t n = 3;
  std::size_t boxes = 4;
  std::uint64_t seed = 0;
  bool no_noise = false;
  synth::NoiseModel noise;
  double depth_min = 10.0, depth_max = 45.0;
  std::size_t workers = 1;
};

std::string frame_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

int cmd_synth(const SynthArgs& a, Logger& log, std::ostream& out) {
  const fs::path root(a.out);
  for (const char* sub : {"calib", "label_2", "depth", "mask"}) fs::create_directories(root / sub);
  std::vector<std::string> frames;
  for (std::size_t i = 0; i < a.n; ++i) frames.push_back(frame_name(i));

  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), a.workers, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      synth::SceneSpec spec;
      spec.n_boxes = a.boxes;
      spec.depth = {a.depth_min, a.depth_max};
      spec.seed = derive_seed(a.seed, i, 0);
      const auto scene = synth::generate_scene(spec);
      auto rendering = synth::render_depth(scene);
      const auto labels = synth::scene_labels(scene, rendering);
      synth::NoiseModel noise = a.no_noise ? synth::NoiseModel::none() : a.noise;
      noise.seed = derive_seed(a.seed, i, 1);
      const DepthMap depth = synth::corrupt_depth(rendering.depth, rendering.mask, noise);

      write_file(root / "calib" / (f + ".txt"), kitti::write_calib(kitti::calib_from_intrinsics(scene.camera)));
      write_file(root / "label_2" / (f + ".txt"), kitti::write_labels(labels));
      const auto dpng = kitti::write_depth_png(depth);
      write_file(root / "depth" / (f + ".png"), dpng.data(), dpng.size());
      const auto mpng = kitti::write_instance_mask(rendering.mask);
      write_file(root / "mask" / (f + ".png"), mpng.data(), mpng.size());
      status[i].summary = f + " " + std::to_string(scene.objects.size());
    } catch (const Error& e) {
      status[i].error = e.what();
    }
  });
  return report(log, out, frames, status, true);
}

// ---------------------------------------------------------------------------

struct PipelineArgs {
  std::string data, out;
  bool no_bbco = false, no_size_prior = false, strict = false;
  std::vector<double> prior{1.53, 1.63, 3.88};
  std::vector<std::string> frames;
  std::size_t workers = 1;
  PipelineConfig cfg;
};

int cmd_pipeline(PipelineArgs a, Logger& log, std::ostream& out) {
  const fs::path root(a.data);
  for (const char* sub : {"calib", "depth", "mask"}) require_dir(root / sub);
  a.cfg.use_bbco = !a.no_bbco;
  a.cfg.use_size_prior = !a.no_size_prior;
  a.cfg.size_prior = {a.prior[0], a.prior[1], a.prior[2]};
  if (!(a.prior[0] > 0.0 && a.prior[1] > 0.0 && a.prior[2] > 0.0)) throw InvalidInputError("--prior-size must be positive");
  a.cfg.de.workers = 1;
  a.cfg.de.validate();
  if (!(a.cfg.trim_k >= 0.0 && a.cfg.trim_k < 0.5)) throw InvalidInputError("--trim-k must be in [0, 0.5)");
  if (a.cfg.sample_n == 0) throw InvalidInputError("--sample-n must be positive");
  fs::create_directories(a.out);
  const auto frames = select_frames(root / "depth", ".png", a.frames);

  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), a.workers, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const auto intr = load_intrinsics(root / "calib" / (f + ".txt"));
      const fs::path dpath = root / "depth" / (f + ".png");
      const fs::path mpath = root / "mask" / (f + ".png");
      const auto dbytes = read_file(dpath);
      const auto mbytes = read_file(mpath);
      const auto depth = with_path<DepthMap>(dpath, [&] { return kitti::read_depth_png(dbytes); });
      const auto mask = with_path<kitti::DecodedMask>(mpath, [&] { return kitti::read_instance_mask(mbytes); });
      if (mask.map.width != depth.width || mask.map.height != depth.height) {
        throw InvalidInputError("mask and depth sizes differ");
      }
      auto det = detect_frame(depth, mask.map, intr, a.cfg, frame_seed(a.cfg.seed, f));
      write_file(fs::path(a.out) / (f + ".txt"), kitti::write_labels(det.labels));
      status[i].warnings = std::move(det.warnings);
      status[i].summary = f + " " + std::to_string(det.labels.size());
    } catch (const Error& e) {
      status[i].error = e.what();
    }
  });
  return report(log, out, frames, status, a.strict);
}

// ---------------------------------------------------------------------------

struct RefineArgs {
  std::string data, dets, out;
  bool strict = false;
  std::vector<std::string> frames;
  std::size_t workers = 1;
  PipelineConfig cfg;
};

int cmd_refine(RefineArgs a, Logger& log, std::ostream& out) {
  const fs::path root(a.data);
  require_dir(root / "calib");
  require_dir(a.dets);
  a.cfg.de.workers = 1;
  a.cfg.de.validate();
  fs::create_directories(a.out);
  const auto frames = select_frames(a.dets, ".txt", a.frames);
  const auto mode = a.strict ? kitti::ParseMode::Strict : kitti::ParseMode::Permissive;

  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), a.workers, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const auto intr = load_intrinsics(root / "calib" / (f + ".txt"));
      auto labels = load_labels(fs::path(a.dets) / (f + ".txt"), mode, status[i].warnings);
      const std::uint64_t seed = frame_seed(a.cfg.seed, f);
      std::size_t refined = 0;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        auto& rec = labels[k];
        if (rec.class_name != a.cfg.class_name) continue;
        DEConfig de = a.cfg.de;
        de.seed = derive_seed(seed, k, 1);
        try {
          const auto res = refine_bbco(kitti::label_to_box3d(rec), rec.bbox2d, intr, de, a.cfg.bounds, a.cfg.proximal_weight);
          rec = kitti::box3d_to_label(res.box, rec);
          rec.alpha = kitti::observation_angle(rec.rotation_y, rec.location);
          ++refined;
        } catch (const Error& e) {
          status[i].warnings.push_back("object " + std::to_string(k) + ": " + e.what());
        }
      }
      write_file(fs::path(a.out) / (f + ".txt"), kitti::write_labels(labels));
      status[i].summary = f + " " + std::to_string(refined);
    } catch (const Error& e) {
      status[i].error = e.what();
    }
  });
  return report(log, out, frames, status, a.strict);
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string gt, dets, out_csv, class_name = "Car";
  std::vector<std::string> metrics{"bev", "3d"};
  std::vector<double> thresholds{0.5, 0.7};
  std::vector<std::string> difficulties{"easy", "moderate", "hard"};
  std::size_t ap_points = 11;
  bool skip_zero = false, strict = false;
};

eval::Metric parse_metric(const std::string& s) {
  if (s == "2d") return eval::Metric::Box2D;
  if (s == "bev") return eval::Metric::Bev;
  if (s == "3d") return eval::Metric::Box3D;
  throw InvalidInputError("unknown metric '" + s + "'");
}

eval::Difficulty parse_difficulty(const std::string& s) {
  if (s == "easy") return eval::Difficulty::Easy;
  if (s == "moderate") return eval::Difficulty::Moderate;
  if (s == "hard") return eval::Difficulty::Hard;
  if (s == "all") return eval::Difficulty::All;
  throw InvalidInputError("unknown difficulty '" + s + "'");
}

int cmd_eval(const EvalArgs& a, Logger& log, std::ostream& out) {
  require_dir(a.gt);
  require_dir(a.dets);
  const auto mode = a.strict ? kitti::ParseMode::Strict : kitti::ParseMode::Permissive;
  std::vector<std::string> warnings;

  eval::PerImageGt gts;
  for (const auto& f : list_frames(a.gt, ".txt")) {
    auto& v = gts[f];
    for (const auto& rec : load_labels(fs::path(a.gt) / (f + ".txt"), mode, warnings)) {
      v.push_back(eval::ground_truth_from_label(rec));
    }
  }
  eval::PerImage dets;
  for (const auto& f : list_frames(a.dets, ".txt")) {
    if (!gts.contains(f)) throw InvalidInputError("detections for " + f + " have no ground truth in " + a.gt);
    auto& v = dets[f];
    for (const auto& rec : load_labels(fs::path(a.dets) / (f + ".txt"), mode, warnings)) {
      if (rec.class_name == a.class_name) v.push_back(eval::detection_from_label(rec));
    }
  }

  std::ostringstream csv;
  csv << "metric,class,difficulty,threshold,ap\n";
  for (const auto& m : a.metrics) {
    for (double thr : a.thresholds) {
      for (const auto& d : a.difficulties) {
        eval::EvalConfig cfg;
        cfg.metric = parse_metric(m);
        cfg.iou_threshold = thr;
        cfg.difficulty = parse_difficulty(d);
        cfg.ap_points = a.ap_points;
        cfg.skip_zero_recall = a.skip_zero;
        cfg.class_name = a.class_name;
        char line[160];
        try {
          const auto res = eval::evaluate(dets, gts, cfg);
          std::snprintf(line, sizeof line, "%s,%s,%s,%.2f,%.6f\n", m.c_str(), a.class_name.c_str(), d.c_str(), thr,
                        res.ap);
        } catch (const UndefinedRecallError&) {
          warnings.push_back("no " + d + " ground truth; AP undefined for " + m + " at " + std::to_string(thr));
          std::snprintf(line, sizeof line, "%s,%s,%s,%.2f,nan\n", m.c_str(), a.class_name.c_str(), d.c_str(), thr);
        }
        csv << line;
      }
    }
  }
  out << csv.str();
  if (!a.out_csv.empty()) write_file(a.out_csv, csv.str());
  for (const auto& w : warnings) log.warn(w);
  return warnings.empty() ? kOk : kWarnings;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Logger log(err);
  CLI::App app("Pseudo-LiDAR monocular 3D detection toolkit", "plidar");
  app.require_subcommand(1);

  LiftArgs lift;
  auto* lift_cmd = app.add_subcommand("lift", "unproject depth maps into pseudo-LiDAR point clouds");
  std::string config_path;
  add_config(lift_cmd, config_path);
  lift_cmd->add_option("--data", lift.data, "dataset root with calib/ and depth/")->required();
  lift_cmd->add_option("--out", lift.out, "output directory")->required();
  lift_cmd->add_option("--format", lift.format, "bin or ply")
      ->check(CLI::IsMember({"bin", "ply"}))
      ->capture_default_str();
  lift_cmd->add_option("--min-depth", lift.min_depth, "drop points closer than this (m)");
  lift_cmd->add_option("--max-depth", lift.max_depth, "drop points farther than this (m)");
  lift_cmd->add_option("--frame", lift.frames, "frames to process (default: all)");
  lift_cmd->add_option("--workers", lift.workers, "frame worker threads")->capture_default_str();

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset in KITTI layout");
  add_config(synth_cmd, config_path);
  synth_cmd->add_option("--out", syn.out, "dataset root to create")->required();
  synth_cmd->add_option("-n,--scenes", syn.n, "number of scenes")->capture_default_str();
  synth_cmd->add_option("--boxes", syn.boxes, "cars per scene")->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--depth-min", syn.depth_min, "nearest car depth (m)")->capture_default_str();
  synth_cmd->add_option("--depth-max", syn.depth_max, "farthest car depth (m)")->capture_default_str();
  synth_cmd->add_flag("--no-noise", syn.no_noise, "write clean rendered depth");
  synth_cmd->add_option("--bias", syn.noise.misalignment_bias, "per-object depth scale bias")->capture_default_str();
  synth_cmd->add_option("--jitter", syn.noise.misalignment_jitter, "per-object depth scale std")->capture_default_str();
  synth_cmd->add_option("--tail-width", syn.noise.tail_width, "boundary band radius (px)")->capture_default_str();
  synth_cmd->add_option("--tail-stretch", syn.noise.tail_stretch, "max boundary depth stretch")->capture_default_str();
  synth_cmd->add_option("--workers", syn.workers, "frame worker threads")->capture_default_str();

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "detect cars from depth and instance masks");
  add_config(pipe_cmd, config_path);
  pipe_cmd->add_option("--data", pipe.data, "dataset root with calib/, depth/ and mask/")->required();
  pipe_cmd->add_option("--out", pipe.out, "output directory for detection labels")->required();
  pipe_cmd->add_flag("--no-bbco", pipe.no_bbco, "skip 2D-3D consistency refinement");
  pipe_cmd->add_flag("--no-size-prior", pipe.no_size_prior, "do not complete partially seen footprints");
  pipe_cmd->add_option("--prior-size", pipe.prior, "class mean h w l used for completion")->expected(3)->capture_default_str();
  pipe_cmd->add_flag("--strict", pipe.strict, "abort on the first failed frame");
  pipe_cmd->add_option("--sample-n", pipe.cfg.sample_n, "points sampled per frustum")->capture_default_str();
  pipe_cmd->add_option("--trim-k", pipe.cfg.trim_k, "outlier trim fraction per side")->capture_default_str();
  pipe_cmd->add_option("--seed", pipe.cfg.seed, "random seed")->capture_default_str();
  pipe_cmd->add_option("--frame", pipe.frames, "frames to process (default: all)");
  pipe_cmd->add_option("--workers", pipe.workers, "frame worker threads")->capture_default_str();
  add_de_options(pipe_cmd, pipe.cfg);

  RefineArgs ref;
  auto* ref_cmd = app.add_subcommand("refine", "refine existing detections against their 2D boxes");
  add_config(ref_cmd, config_path);
  ref_cmd->add_option("--data", ref.data, "dataset root with calib/")->required();
  ref_cmd->add_option("--dets", ref.dets, "directory of detection label files")->required();
  ref_cmd->add_option("--out", ref.out, "output directory")->required();
  ref_cmd->add_flag("--strict", ref.strict, "strict label parsing and abort on failure");
  ref_cmd->add_option("--seed", ref.cfg.seed, "random seed")->capture_default_str();
  ref_cmd->add_option("--class", ref.cfg.class_name, "class to refine")->capture_default_str();
  ref_cmd->add_option("--frame", ref.frames, "frames to process (default: all)");
  ref_cmd->add_option("--workers", ref.workers, "frame worker threads")->capture_default_str();
  add_de_options(ref_cmd, ref.cfg);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "compute AP tables");
  add_config(eval_cmd, config_path);
  eval_cmd->add_option("--gt", ev.gt, "ground-truth label directory")->required();
  eval_cmd->add_option("--dets", ev.dets, "detection label directory")->required();
  eval_cmd->add_option("--out", ev.out_csv, "also write the CSV table here");
  eval_cmd->add_option("--class", ev.class_name, "evaluated class")->capture_default_str();
  eval_cmd->add_option("--metric", ev.metrics, "2d, bev, 3d")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--threshold", ev.thresholds, "IoU thresholds")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--difficulty", ev.difficulties, "easy, moderate, hard, all")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--ap-points", ev.ap_points, "recall grid size")->capture_default_str();
  eval_cmd->add_flag("--skip-zero-recall", ev.skip_zero, "drop recall 0 from the grid (use with --ap-points 41)");
  eval_cmd->add_flag("--strict", ev.strict, "strict label parsing");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub, config_path);
    if (*lift_cmd) return cmd_lift(lift, log, out);
    if (*synth_cmd) return cmd_synth(syn, log, out);
    if (*pipe_cmd) return cmd_pipeline(pipe, log, out);
    if (*ref_cmd) return cmd_refine(ref, log, out);
    if (*eval_cmd) return cmd_eval(ev, log, out);
  } catch (const Error& e) {
    log.error(e.what());
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    log.error(e.what());
    return kInputError;
  }
  return kInputError;
}

}  // namespace plidar::cli

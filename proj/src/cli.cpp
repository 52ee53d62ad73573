// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "obbkit/codec.hpp"
#include "obbkit/error.hpp"
#include "obbkit/eval.hpp"
#include "obbkit/fit.hpp"
#include "obbkit/image.hpp"
#include "obbkit/patch.hpp"
#include "obbkit/piou.hpp"
#include "obbkit/records.hpp"
#include "obbkit/render.hpp"
#include "obbkit/synth.hpp"

namespace obbkit {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kAngleNote =
    "Boxes are cx,cy,w,h,theta with theta in degrees; all files store degrees.";

// Writes to --out when given, otherwise to the command's stdout stream.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path + " for writing");
  file << text;
  if (!file) throw DataError("failed writing " + path);
}

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output path ('-' or omitted: stdout)");
  if (with_format) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
  }
}

// --- iou -------------------------------------------------------------------

struct IouArgs {
  Common common;
  std::string a, b;
  double step = 0.0;
  double k = SoftKernelParams{}.k;
};

void run_iou(const IouArgs& args, std::ostream& out) {
  const OrientedBox a = parse_box(args.a);
  const OrientedBox b = parse_box(args.b);
  const double step =
      args.step > 0.0 ? args.step : 0.02 * std::min({a.w, a.h, b.w, b.h});
  const RasterSpec raster{step};
  const SoftKernelParams kp{args.k};
  const double skew = skew_iou(a, b);
  const double hard = piou_hard(a, b, raster);
  const double soft_log = piou_soft_log(a, b, raster, kp);

  if (args.common.format == "text") {
    std::ostringstream s;
    s.precision(10);
    s << "skew_iou  " << skew << "\npiou_hard " << hard << "\npiou_soft "
      << std::exp(soft_log) << "\nstep      " << step << "\nk         "
      << args.k << '\n';
    emit(args.common.out, out, s.str());
    return;
  }
  ordered_json j;
  j["skew_iou"] = skew;
  j["piou_hard"] = hard;
  j["piou_soft"] = std::exp(soft_log);
  j["piou_soft_log"] = soft_log;
  j["hbb_iou"] = hbb_iou(a, b);
  j["step"] = step;
  j["k"] = args.k;
  emit(args.common.out, out, j.dump(2) + "\n");
}

// --- nms -------------------------------------------------------------------

struct NmsArgs {
  Common common;
  std::string in;
  double iou = 0.3;
  bool class_agnostic = false;
};

void run_nms(const NmsArgs& args, std::ostream& out) {
  const auto dets = read_detections_file(args.in);
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    groups[{dets[i].image_id, args.class_agnostic ? "" : dets[i].class_label}]
        .push_back(i);
  }
  std::vector<DetectionRecord> kept;
  for (const auto& [key, members] : groups) {
    std::vector<ScoredBox> boxes;
    for (std::size_t i : members) boxes.push_back({dets[i].box, dets[i].score});
    for (std::size_t k : rotated_nms(boxes, args.iou)) {
      kept.push_back(dets[members[k]]);
    }
  }
  std::ostringstream s;
  write_detections(s, kept);
  emit(args.common.out, out, s.str());
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::size_t images = 1;
  SceneConfig scene;
  std::string layout = "sparse";
  bool no_images = false;
};

std::string image_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%04zu", i);
  return buf;
}

void run_synth(SynthArgs args, std::ostream& out) {
  if (args.common.out.empty() || args.common.out == "-") {
    throw DataError("synth needs --out DIR");
  }
  const fs::path dir(args.common.out);
  fs::create_directories(dir);
  args.scene.layout =
      args.layout == "harbor" ? SceneLayout::kHarborRows : SceneLayout::kSparse;
  args.scene.render = !args.no_images;

  const Rng root(args.common.seed);
  std::vector<GroundTruthRecord> all;
  for (std::size_t i = 0; i < args.images; ++i) {
    SceneConfig cfg = args.scene;
    cfg.image_id = image_name(i);
    cfg.seed = root.split(i).next_u64();
    Scene scene = gen_scene(cfg);
    if (!args.no_images) write_image(dir / (cfg.image_id + ".ppm"), scene.image);
    all.insert(all.end(), scene.records.begin(), scene.records.end());
  }
  std::ostringstream s;
  write_ground_truth(s, all);
  emit((dir / "gt.jsonl").string(), out, s.str());
  out << "wrote " << all.size() << " ground-truth boxes over " << args.images
      << " image(s) to " << dir.string() << '\n';
}

// --- corrupt ---------------------------------------------------------------

struct CorruptArgs {
  Common common;
  std::string gt;
  CorruptionConfig config;
  double noise = 1.0;
  double angle_std_deg = rad_to_deg(CorruptionConfig{}.angle_std);
};

void run_corrupt(CorruptArgs args, std::ostream& out) {
  const auto gts = read_ground_truth_file(args.gt);
  CorruptionConfig cfg = args.config;
  cfg.seed = args.common.seed;
  cfg.angle_std = deg_to_rad(args.angle_std_deg);
  cfg.center_std *= args.noise;
  cfg.angle_std *= args.noise;
  cfg.size_std *= args.noise;
  std::ostringstream s;
  write_detections(s, corrupt(gts, cfg));
  emit(args.common.out, out, s.str());
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string gt;
  std::vector<std::string> dets;
  std::vector<std::string> labels;
  double iou = 0.5;
  std::string ap = "all";
  std::string iou_fn = "skew";
  double piou_step = 0.5;
  bool lenient = false;
  unsigned threads = 1;
};

void run_eval(const EvalArgs& args, std::ostream& out) {
  if (!args.labels.empty() && args.labels.size() != args.dets.size()) {
    throw CLI::ValidationError("--label", "give one label per --dets file");
  }
  const auto gts = read_ground_truth_file(args.gt);
  EvalConfig cfg;
  cfg.iou_thresh = args.iou;
  cfg.ap_mode = args.ap == "11" ? ApMode::kElevenPoint : ApMode::kAllPoints;
  cfg.strict = !args.lenient;
  cfg.threads = args.threads;
  if (args.iou_fn == "piou") {
    const RasterSpec raster{args.piou_step};
    cfg.iou_fn = [raster](const OrientedBox& a, const OrientedBox& b) {
      // Disjoint hulls would only enlarge the grid to count zero overlap.
      return hbb_iou(a, b) > 0.0 ? piou_hard(a, b, raster) : 0.0;
    };
  }

  std::vector<std::pair<std::string, EvalReport>> runs;
  for (std::size_t i = 0; i < args.dets.size(); ++i) {
    const auto dets = read_detections_file(args.dets[i]);
    const std::string label =
        args.labels.empty() ? fs::path(args.dets[i]).stem().string() : args.labels[i];
    runs.emplace_back(label, evaluate(dets, gts, cfg));
  }

  std::string text;
  if (args.common.format == "text") {
    for (const auto& [label, report] : runs) {
      if (runs.size() > 1) text += label + "\n";
      text += report_table(report);
    }
    if (runs.size() > 1) text += "\n" + ablation_table(runs);
  } else if (runs.size() == 1) {
    text = report_json(runs.front().second);
  } else {
    ordered_json all = ordered_json::array();
    for (const auto& [label, report] : runs) {
      ordered_json entry;
      entry["label"] = label;
      entry["report"] = ordered_json::parse(report_json(report));
      all.push_back(std::move(entry));
    }
    text = all.dump(2) + "\n";
  }
  emit(args.common.out, out, text);
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string target, init;
  OptimizerConfig cfg;
  double k = SoftKernelParams{}.k;
};

void run_fit(const FitArgs& args, std::ostream& out) {
  const FitTrajectory traj =
      fit_box(parse_box(args.init), parse_box(args.target), args.cfg,
              SoftKernelParams{args.k});
  std::ostringstream s;
  write_trajectory_csv(s, traj);
  emit(args.common.out, out, s.str());
}

// --- patch -----------------------------------------------------------------

struct PatchArgs {
  Common common;
  std::string image;
  std::string box;
  PatchSpec spec;
};

void run_patch(const PatchArgs& args, std::ostream& out) {
  if (args.common.out.empty() || args.common.out == "-") {
    throw DataError("patch needs --out FILE.ppm or FILE.obbr");
  }
  const ImageRaster src = read_image(args.image);
  const ImageRaster patch = extract_patch(src, parse_box(args.box), args.spec);
  write_image(args.common.out, patch);
  out << "wrote " << patch.height() << "x" << patch.width() << "x"
      << patch.channels() << " patch to " << args.common.out << '\n';
}

// --- render ----------------------------------------------------------------

struct RenderArgs {
  Common common;
  std::string gt;
  std::string dets;
  std::string image_id;
  double width = 800.0;
  double height = 800.0;
  double stroke = 2.0;
  bool no_labels = false;
  bool no_scores = false;
};

void run_render(const RenderArgs& args, std::ostream& out) {
  if (args.gt.empty() == args.dets.empty()) {
    throw CLI::ValidationError("render", "give exactly one of --gt or --dets");
  }
  std::vector<RenderItem> items;
  const auto keep = [&](const std::string& id) {
    return args.image_id.empty() || id == args.image_id;
  };
  if (!args.gt.empty()) {
    for (const auto& r : read_ground_truth_file(args.gt)) {
      if (keep(r.image_id)) items.push_back({r.box, r.class_label, std::nullopt});
    }
  } else {
    for (const auto& r : read_detections_file(args.dets)) {
      if (keep(r.image_id)) items.push_back({r.box, r.class_label, r.score});
    }
  }
  RenderStyle style;
  style.stroke_width = args.stroke;
  style.show_labels = !args.no_labels;
  style.show_scores = !args.no_scores;
  emit(args.common.out, out, render_svg(items, args.width, args.height, style));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Oriented bounding box toolkit. " + std::string(kAngleNote),
               "obbkit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  IouArgs iou;
  auto* iou_cmd = app.add_subcommand("iou", "Skew, hard-PIoU and soft-PIoU of two boxes");
  add_common(iou_cmd, iou.common);
  iou_cmd->add_option("--a", iou.a, "First box cx,cy,w,h,theta_deg")->required();
  iou_cmd->add_option("--b", iou.b, "Second box cx,cy,w,h,theta_deg")->required();
  iou_cmd->add_option("--step", iou.step,
                      "PIoU sample spacing in px (default 0.02 * smallest extent)");
  iou_cmd->add_option("--k", iou.k, "Soft kernel steepness per px");

  NmsArgs nms;
  auto* nms_cmd = app.add_subcommand("nms", "Rotated NMS over detection JSONL");
  add_common(nms_cmd, nms.common, false);
  nms_cmd->add_option("--in", nms.in, "Detections JSONL")->required();
  nms_cmd->add_option("--iou", nms.iou, "Suppression IoU threshold");
  nms_cmd->add_flag("--class-agnostic", nms.class_agnostic,
                    "Suppress across classes within an image");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic ship scenes");
  add_common(synth_cmd, synth.common, false);
  synth_cmd->add_option("--images", synth.images, "Number of scenes");
  synth_cmd->add_option("--width", synth.scene.image_w, "Image width");
  synth_cmd->add_option("--height", synth.scene.image_h, "Image height");
  synth_cmd->add_option("--ships", synth.scene.ship_count, "Ships per scene");
  synth_cmd->add_option("--aspect", synth.scene.aspect_mean, "Mean length:beam ratio");
  synth_cmd->add_option("--aspect-jitter", synth.scene.aspect_jitter,
                        "Relative std of the aspect ratio");
  synth_cmd->add_option("--length-min", synth.scene.length_min, "Shortest ship (px)");
  synth_cmd->add_option("--length-max", synth.scene.length_max, "Longest ship (px)");
  synth_cmd->add_option("--classes", synth.scene.class_count, "Classes used (1-7)");
  synth_cmd->add_option("--layout", synth.layout, "sparse or harbor")
      ->check(CLI::IsMember({"sparse", "harbor"}));
  synth_cmd->add_flag("--no-images", synth.no_images, "Only write gt.jsonl");

  CorruptArgs corrupt_args;
  auto* corrupt_cmd =
      app.add_subcommand("corrupt", "Simulate detector output from ground truth");
  add_common(corrupt_cmd, corrupt_args.common, false);
  corrupt_cmd->add_option("--gt", corrupt_args.gt, "Ground-truth JSONL")->required();
  corrupt_cmd->add_option("--fn-rate", corrupt_args.config.fn_rate, "Miss probability");
  corrupt_cmd->add_option("--fp-rate", corrupt_args.config.fp_rate,
                          "Spurious detections per ground truth");
  corrupt_cmd->add_option("--noise", corrupt_args.noise,
                          "Multiplier on every jitter std (0 disables jitter)");
  corrupt_cmd->add_option("--center-std", corrupt_args.config.center_std,
                          "Center jitter std (px)");
  corrupt_cmd->add_option("--angle-std", corrupt_args.angle_std_deg,
                          "Angle jitter std (degrees)");
  corrupt_cmd->add_option("--size-std", corrupt_args.config.size_std,
                          "Log-extent jitter std");
  corrupt_cmd->add_option("--width", corrupt_args.config.image_w,
                          "Image width for spurious boxes");
  corrupt_cmd->add_option("--height", corrupt_args.config.image_h,
                          "Image height for spurious boxes");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Per-class AP and mAP");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth JSONL")->required();
  eval_cmd->add_option("--dets", eval.dets, "Detections JSONL (repeat for ablations)")
      ->required();
  eval_cmd->add_option("--label", eval.labels, "Run label per --dets file");
  eval_cmd->add_option("--iou", eval.iou, "Match IoU threshold");
  eval_cmd->add_option("--ap", eval.ap, "AP protocol: all or 11")
      ->check(CLI::IsMember({"all", "11"}));
  eval_cmd->add_option("--iou-fn", eval.iou_fn, "Matching IoU: skew or piou")
      ->check(CLI::IsMember({"skew", "piou"}));
  eval_cmd->add_option("--piou-step", eval.piou_step, "Sample spacing for --iou-fn piou");
  eval_cmd->add_flag("--lenient", eval.lenient,
                     "Count detections on unknown images as false positives");
  eval_cmd->add_option("--threads", eval.threads, "Matching threads")
      ->check(CLI::Range(1u, 256u));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a box to a target by PIoU descent");
  add_common(fit_cmd, fit.common, false);
  fit_cmd->add_option("--target", fit.target, "Target box")->required();
  fit_cmd->add_option("--init", fit.init, "Initial box")->required();
  fit_cmd->add_option("--steps", fit.cfg.max_steps, "Maximum steps");
  fit_cmd->add_option("--lr", fit.cfg.base_lr, "Base learning rate");
  fit_cmd->add_option("--momentum", fit.cfg.momentum, "Momentum");
  fit_cmd->add_option("--warmup", fit.cfg.warmup_steps, "Warm-up steps");
  fit_cmd->add_option("--weight-decay", fit.cfg.weight_decay, "Weight decay");
  fit_cmd->add_option("--stop-iou", fit.cfg.stop_iou, "Stop at this skew IoU");
  fit_cmd->add_option("--step", fit.cfg.raster.step, "PIoU sample spacing (px)");
  fit_cmd->add_option("--k", fit.k, "Soft kernel steepness per px");

  PatchArgs patch;
  auto* patch_cmd = app.add_subcommand("patch", "Extract an oriented patch");
  add_common(patch_cmd, patch.common, false);
  patch_cmd->add_option("--image", patch.image, "Source .ppm or .obbr")->required();
  patch_cmd->add_option("--box", patch.box, "Box cx,cy,w,h,theta_deg")->required();
  patch_cmd->add_option("--long", patch.spec.out_long, "Output columns (long axis)");
  patch_cmd->add_option("--short", patch.spec.out_short, "Output rows (short axis)");
  patch_cmd->add_option("--fill", patch.spec.fill, "Value outside the image");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "SVG overlay of boxes");
  add_common(render_cmd, render.common, false);
  render_cmd->add_option("--gt", render.gt, "Ground-truth JSONL");
  render_cmd->add_option("--dets", render.dets, "Detections JSONL");
  render_cmd->add_option("--image-id", render.image_id, "Only boxes of this image");
  render_cmd->add_option("--width", render.width, "Canvas width");
  render_cmd->add_option("--height", render.height, "Canvas height");
  render_cmd->add_option("--stroke", render.stroke, "Stroke width");
  render_cmd->add_flag("--no-labels", render.no_labels, "Omit labels");
  render_cmd->add_flag("--no-scores", render.no_scores, "Omit scores in labels");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (iou_cmd->parsed()) run_iou(iou, out);
    if (nms_cmd->parsed()) run_nms(nms, out);
    if (synth_cmd->parsed()) run_synth(synth, out);
    if (corrupt_cmd->parsed()) run_corrupt(corrupt_args, out);
    if (eval_cmd->parsed()) run_eval(eval, out);
    if (fit_cmd->parsed()) run_fit(fit, out);
    if (patch_cmd->parsed()) run_patch(patch, out);
    if (render_cmd->parsed()) run_render(render, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace obbkit

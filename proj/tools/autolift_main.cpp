// Copyright 2026 The autolift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autolift/aggregate.hpp"
#include "autolift/error.hpp"
#include "autolift/eval.hpp"
#include "autolift/ingest.hpp"
#include "autolift/json_util.hpp"
#include "autolift/parallel.hpp"
#include "autolift/pipeline.hpp"
#include "autolift/prior.hpp"
#include "autolift/score.hpp"
#include "autolift/synth.hpp"

namespace
{

using json = nlohmann::json;
using namespace autolift;

struct CommonOptions
{
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::string config_path;
};

void add_common(CLI::App * cmd, CommonOptions & opts, bool with_config = true)
{
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--seed", opts.seed, "Random seed");
  if (with_config) {
    cmd->add_option("--config", opts.config_path, "Pipeline config JSON")->check(
      CLI::ExistingFile);
  }
}

// Flag > AUTOLIFT_THREADS > config file.
pipeline::PipelineConfig load_config(const CommonOptions & opts)
{
  pipeline::PipelineConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = pipeline::PipelineConfig::from_json(json_util::read_json_file(opts.config_path));
  }
  if (const char * env = std::getenv("AUTOLIFT_THREADS"); env != nullptr && *env != '\0') {
    char * end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) {
      throw Error(ErrorKind::invalid_argument, "AUTOLIFT_THREADS must be a non-negative integer");
    }
    cfg.threads = static_cast<std::size_t>(v);
  }
  if (opts.threads) {
    cfg.threads = *opts.threads;
  }
  if (opts.seed) {
    cfg.seed = *opts.seed;
  }
  return cfg;
}

int exit_code(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::io: return 3;
    case ErrorKind::format: return 4;
    case ErrorKind::unknown_class:
    case ErrorKind::unknown_camera: return 5;
    case ErrorKind::empty_input: return 6;
    case ErrorKind::invalid_argument: break;
  }
  return 2;
}

void print_error(const std::string & kind, const std::string & message)
{
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

void log(const std::string & line)
{
  std::cerr << "[autolift] " << line << "\n";
}

std::map<std::string, geom::Vec2> ego_positions(const ingest::SceneManifest & m)
{
  std::map<std::string, geom::Vec2> out;
  for (const auto & s : m.sweeps) {
    out[s.frame_id] = s.ego_pose.translation.head<2>();
  }
  return out;
}

int run_annotate(
  const CommonOptions & opts, const std::string & scene_path, const std::string & dets_path,
  const std::string & expert_path, const std::string & out_path)
{
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = load_config(opts);
  const auto scene = ingest::load_scene(scene_path, cfg.sweep_format);
  const auto dets = ingest::load_detections(dets_path, cfg.taxonomy);
  prior::ExpertIndex expert;
  if (!expert_path.empty()) {
    expert = prior::ExpertIndex(prior::load_expert_records(expert_path));
  }
  log("loaded " + std::to_string(scene.sweeps.size()) + " sweeps, " +
    std::to_string(dets.size()) + " detections, " + std::to_string(expert.size()) +
    " expert records");
  const auto result = pipeline::run_annotate(scene, dets, expert, cfg);
  ingest::write_annotations(result.annotations, out_path);
  json skipped = json::array();
  for (const auto & s : result.skipped) {
    skipped.push_back({{"detection", s.detection}, {"reason", s.reason}});
  }
  const double wall =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << json{{"annotations", result.annotations.size()},
    {"detections", dets.size()},
    {"skipped", skipped},
    {"per_instance_priors", result.per_instance_priors},
    {"class_average_priors", result.class_average_priors},
    {"threads", resolve_threads(cfg.threads)},
    {"seed", cfg.seed},
    {"wall_time_s", wall}}.dump() << "\n";
  log("wrote " + std::to_string(result.annotations.size()) + " annotations to " + out_path);
  return 0;
}

int run_eval(
  const CommonOptions & opts, const std::string & pred_path, const std::string & gt_path,
  bool stratify, const std::string & scene_path, bool table)
{
  const auto cfg = load_config(opts);
  const auto preds = ingest::load_annotations(pred_path);
  const auto gts = ingest::load_annotations(gt_path);
  const auto report = eval::evaluate(preds, gts, cfg.eval);
  json out = eval::to_json(report);
  if (stratify) {
    std::map<std::string, geom::Vec2> ego;
    if (!scene_path.empty()) {
      ego = ego_positions(ingest::load_manifest(scene_path));
    }
    json bands = json::array();
    for (const auto & b : eval::stratify_by_distance(preds, gts, cfg.eval, ego)) {
      bands.push_back({{"min_m", b.lo}, {"max_m", b.hi}, {"report", eval::to_json(b.report)}});
    }
    out["distance_bands"] = bands;
  }
  std::cout << out.dump() << "\n";
  if (table) {
    std::cerr << eval::to_table(report);
  }
  return 0;
}

int run_synth(const CommonOptions & opts, const std::string & spec_path, const std::string & dir)
{
  auto spec = synth::SceneSpec::from_json(json_util::read_json_file(spec_path));
  if (opts.seed) {
    spec.seed = *opts.seed;
  }
  const auto g = synth::generate_scene(spec);
  synth::write_scene(g, dir);
  std::cout << json{{"sweeps", g.scene.sweeps.size()}, {"objects", g.objects.size()},
    {"detections", g.detections.size()}, {"ground_truth", g.ground_truth.size()},
    {"seed", spec.seed}, {"out", dir}}.dump() << "\n";
  return 0;
}

int run_tune_alpha(
  const CommonOptions & opts, const std::string & pred_path, const std::string & gt_path,
  const std::vector<double> & candidates)
{
  const auto cfg = load_config(opts);
  const auto preds = ingest::load_annotations(pred_path);
  const auto gts = ingest::load_annotations(gt_path);
  const auto grid = candidates.empty() ? score::default_alpha_grid() : candidates;
  const double alpha = score::tune_alpha(preds, gts, grid, cfg.eval);
  std::cout << json{{"alpha", alpha}, {"candidates", grid.size()}}.dump() << "\n";
  return 0;
}

int run_aggregate_only(
  const CommonOptions & opts, const std::string & scene_path, const std::string & frame_id,
  const std::string & class_label, std::optional<int> past, std::optional<int> future,
  const std::string & out_path)
{
  const auto cfg = load_config(opts);
  const auto scene = ingest::load_scene(scene_path, cfg.sweep_format);
  const auto idx = scene.manifest.sweep_index(frame_id);
  if (!idx) {
    throw Error(ErrorKind::invalid_argument, "unknown frame '" + frame_id + "'");
  }
  AggregationStrategy strategy;
  if (!class_label.empty()) {
    strategy = aggregate::strategy_for_class(cfg.taxonomy, class_label);
  }
  strategy.past = past.value_or(strategy.past);
  strategy.future = future.value_or(strategy.future);
  const auto cloud = aggregate::aggregate_sweeps(scene.sweeps, *idx, strategy);
  std::vector<ingest::LidarPoint> pts;
  pts.reserve(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto & p = cloud.points[i];
    pts.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
        static_cast<float>(p.z()), cloud.intensity[i]});
  }
  ingest::write_sweep_points(pts, out_path, cfg.sweep_format);
  std::cout << json{{"frame_id", frame_id}, {"past", strategy.past},
    {"future", strategy.future}, {"points", pts.size()}, {"out", out_path}}.dump() << "\n";
  return 0;
}

int run_track_only(
  const CommonOptions & opts, const std::string & scene_path, const std::string & ann_path,
  const std::string & out_path)
{
  const auto cfg = load_config(opts);
  const auto manifest = ingest::load_manifest(scene_path);
  const auto anns = ingest::load_annotations(ann_path);
  const auto refined = pipeline::refine_annotations(anns, manifest, cfg.taxonomy);
  ingest::write_annotations(refined, out_path);
  std::int64_t tracks = 0;
  for (const auto & a : refined) {
    tracks = std::max(tracks, a.track_id.value_or(-1) + 1);
  }
  std::cout << json{{"annotations", refined.size()}, {"tracks", tracks}}.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Lift 2D detections into 3D cuboids on LiDAR sweeps"};
  app.require_subcommand(1);

  CommonOptions annotate_opts;
  std::string scene, dets, expert, out;
  auto * annotate = app.add_subcommand("annotate", "Generate cuboid annotations for a scene");
  annotate->add_option("--scene", scene, "Scene manifest")->required()->check(CLI::ExistingFile);
  annotate->add_option("--detections", dets, "2D detections NDJSON")->required()->check(
    CLI::ExistingFile);
  annotate->add_option("--expert", expert, "Expert record NDJSON")->check(CLI::ExistingFile);
  annotate->add_option("--out", out, "Output annotations NDJSON")->required();
  add_common(annotate, annotate_opts);

  CommonOptions eval_opts;
  std::string pred, gt, eval_scene;
  bool stratify = false;
  bool table = false;
  auto * eval_cmd = app.add_subcommand("eval", "Score annotations against ground truth");
  eval_cmd->add_option("--pred", pred, "Predicted annotations")->required()->check(
    CLI::ExistingFile);
  eval_cmd->add_option("--gt", gt, "Ground-truth annotations")->required()->check(
    CLI::ExistingFile);
  eval_cmd->add_flag("--stratify", stratify, "Add the distance-band breakdown");
  eval_cmd->add_option("--scene", eval_scene, "Manifest with ego poses for --stratify")->check(
    CLI::ExistingFile);
  eval_cmd->add_flag("--table", table, "Print a text table to stderr");
  add_common(eval_cmd, eval_opts);

  CommonOptions synth_opts;
  std::string spec_path, synth_out;
  auto * synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--spec", spec_path, "Scene spec JSON")->required()->check(
    CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  add_common(synth_cmd, synth_opts, false);

  CommonOptions tune_opts;
  std::string tune_pred, tune_gt;
  std::vector<double> candidates;
  auto * tune = app.add_subcommand("tune-alpha", "Pick the score fusion weight on validation data");
  tune->add_option("--pred", tune_pred, "Predictions with score_2d/score_3d")->required()->check(
    CLI::ExistingFile);
  tune->add_option("--gt", tune_gt, "Ground truth")->required()->check(CLI::ExistingFile);
  tune->add_option("--candidates", candidates, "Candidate weights (default 0:0.05:1)");
  add_common(tune, tune_opts);

  CommonOptions agg_opts;
  std::string agg_scene, agg_frame, agg_class, agg_out;
  std::optional<int> past, future;
  auto * agg = app.add_subcommand("aggregate-only", "Write the multi-sweep cloud of one frame");
  agg->add_option("--scene", agg_scene, "Scene manifest")->required()->check(CLI::ExistingFile);
  agg->add_option("--frame", agg_frame, "Frame id")->required();
  agg->add_option("--class", agg_class, "Use this class's sweep window");
  agg->add_option("--past", past, "Past sweeps")->check(CLI::NonNegativeNumber);
  agg->add_option("--future", future, "Future sweeps")->check(CLI::NonNegativeNumber);
  agg->add_option("--out", agg_out, "Output .bin")->required();
  add_common(agg, agg_opts);

  CommonOptions track_opts;
  std::string track_scene, track_in, track_out;
  auto * track = app.add_subcommand("track-only", "Associate annotations into tracks");
  track->add_option("--scene", track_scene, "Scene manifest")->required()->check(
    CLI::ExistingFile);
  track->add_option("--annotations", track_in, "Annotations NDJSON")->required()->check(
    CLI::ExistingFile);
  track->add_option("--out", track_out, "Output NDJSON")->required();
  add_common(track, track_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    print_error("usage", e.what());
    return 1;
  }

  std::string partial;
  try {
    if (*annotate) {
      partial = out;
      return run_annotate(annotate_opts, scene, dets, expert, out);
    }
    if (*eval_cmd) {
      return run_eval(eval_opts, pred, gt, stratify, eval_scene, table);
    }
    if (*synth_cmd) {
      return run_synth(synth_opts, spec_path, synth_out);
    }
    if (*tune) {
      return run_tune_alpha(tune_opts, tune_pred, tune_gt, candidates);
    }
    if (*agg) {
      partial = agg_out;
      return run_aggregate_only(agg_opts, agg_scene, agg_frame, agg_class, past, future, agg_out);
    }
    if (*track) {
      partial = track_out;
      return run_track_only(track_opts, track_scene, track_in, track_out);
    }
  } catch (const Error & e) {
    print_error(to_string(e.kind()), e.what());
    if (!partial.empty()) {
      std::error_code ec;
      std::filesystem::remove(partial + ".tmp", ec);
    }
    return exit_code(e.kind());
  } catch (const std::exception & e) {
    print_error("internal", e.what());
    return 70;
  }
  return 1;
}

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

#include "autolift/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "autolift/error.hpp"

namespace autolift::eval
{

void EvalConfig::validate() const
{
  if (dist_thresholds.empty()) {
    throw Error(ErrorKind::invalid_argument, "at least one distance threshold is required");
  }
  for (const double t : dist_thresholds) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorKind::invalid_argument, "distance thresholds must be positive");
    }
  }
  if (!(tp_threshold > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "tp_threshold must be positive");
  }
  if (!(min_recall >= 0.0 && min_recall < 1.0) || !(min_precision >= 0.0 && min_precision < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "min_recall and min_precision must lie in [0, 1)");
  }
}

double bev_distance(const ingest::ScoredAnnotation & a, const ingest::ScoredAnnotation & b)
{
  return std::hypot(
    a.cuboid.center.x() - b.cuboid.center.x(), a.cuboid.center.y() - b.cuboid.center.y());
}

MatchResult match_predictions(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts,
  const std::string & class_label, double threshold_m)
{
  MatchResult out;
  out.class_label = class_label;
  out.threshold = threshold_m;

  // Ground truth of this class, bucketed by frame.
  std::unordered_map<std::string, std::vector<std::size_t>> gt_by_frame;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].class_label == class_label) {
      gt_by_frame[gts[g].frame_id].push_back(g);
      ++out.num_gt;
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (preds[p].class_label == class_label) {
      order.push_back(p);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return preds[a].score > preds[b].score;
    });

  std::vector<bool> taken(gts.size(), false);
  out.entries.reserve(order.size());
  for (const std::size_t p : order) {
    MatchEntry e;
    e.pred_index = p;
    e.score = preds[p].score;
    const auto it = gt_by_frame.find(preds[p].frame_id);
    if (it != gt_by_frame.end()) {
      double best = std::numeric_limits<double>::infinity();
      std::optional<std::size_t> best_gt;
      for (const std::size_t g : it->second) {
        if (taken[g]) {
          continue;
        }
        const double d = bev_distance(preds[p], gts[g]);
        if (d < best) {
          best = d;
          best_gt = g;
        }
      }
      if (best_gt && best <= threshold_m) {
        taken[*best_gt] = true;
        e.is_tp = true;
        e.gt_index = best_gt;
      }
    }
    out.entries.push_back(e);
  }
  return out;
}

namespace
{

// numpy.interp(x, xp, fp, right=0) for non-decreasing xp.
double interp_right_zero(double x, const std::vector<double> & xp, const std::vector<double> & fp)
{
  if (xp.empty()) {
    return 0.0;
  }
  if (x < xp.front()) {
    return fp.front();
  }
  if (x > xp.back()) {
    return 0.0;
  }
  if (x == xp.back()) {
    return fp.back();
  }
  // Last j with xp[j] <= x; then xp[j] <= x < xp[j + 1].
  const auto upper = std::upper_bound(xp.begin(), xp.end(), x);
  const std::size_t j = static_cast<std::size_t>(upper - xp.begin()) - 1;
  const double slope = (fp[j + 1] - fp[j]) / (xp[j + 1] - xp[j]);
  return slope * (x - xp[j]) + fp[j];
}

// The devkit samples recall with numpy.linspace(0, 1, 101), whose points are
// i * 0.01 rather than i / 100.
double recall_sample(int i)
{
  return i == 100 ? 1.0 : static_cast<double>(i) * 0.01;
}

struct PrCurve
{
  std::vector<double> recall;
  std::vector<double> precision;
};

PrCurve pr_curve(const std::vector<bool> & tp_flags, std::size_t num_gt)
{
  PrCurve c;
  double tp = 0.0;
  double fp = 0.0;
  for (const bool is_tp : tp_flags) {
    (is_tp ? tp : fp) += 1.0;
    c.precision.push_back(tp / (tp + fp));
    c.recall.push_back(tp / static_cast<double>(num_gt));
  }
  return c;
}

}  // namespace

double average_precision(const MatchResult & match, double min_recall, double min_precision)
{
  if (match.num_gt == 0 || match.entries.empty()) {
    return 0.0;
  }
  std::vector<bool> flags;
  flags.reserve(match.entries.size());
  for (const auto & e : match.entries) {
    flags.push_back(e.is_tp);
  }
  const PrCurve curve = pr_curve(flags, match.num_gt);

  constexpr int kSamples = 101;
  const int first = static_cast<int>(std::lround(100.0 * min_recall)) + 1;
  double sum = 0.0;
  int count = 0;
  for (int i = first; i < kSamples; ++i) {
    const double r = recall_sample(i);
    const double p = interp_right_zero(r, curve.recall, curve.precision);
    sum += std::max(0.0, p - min_precision);
    ++count;
  }
  if (count == 0) {
    return 0.0;
  }
  return std::clamp((sum / count) / (1.0 - min_precision), 0.0, 1.0);
}

double aligned_scale_error(const geom::Vec3 & a, const geom::Vec3 & b)
{
  const double inter = std::min(a.x(), b.x()) * std::min(a.y(), b.y()) * std::min(a.z(), b.z());
  const double uni = a.prod() + b.prod() - inter;
  return uni > 0.0 ? 1.0 - inter / uni : 1.0;
}

TpErrors tp_errors(
  const MatchResult & match, const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts)
{
  TpErrors out;
  double ate = 0.0;
  double ase = 0.0;
  double aoe = 0.0;
  double ave = 0.0;
  std::size_t n = 0;
  std::size_t nv = 0;
  for (const auto & e : match.entries) {
    if (!e.is_tp) {
      continue;
    }
    const auto & p = preds[e.pred_index];
    const auto & g = gts[*e.gt_index];
    ate += bev_distance(p, g);
    ase += aligned_scale_error(p.cuboid.dims, g.cuboid.dims);
    aoe += geom::yaw_diff(p.cuboid.yaw, g.cuboid.yaw);
    if (p.velocity && g.velocity) {
      ave += (*p.velocity - *g.velocity).norm();
      ++nv;
    }
    ++n;
  }
  out.tp_count = n;
  if (n > 0) {
    out.ate = ate / n;
    out.ase = ase / n;
    out.aoe = aoe / n;
  }
  if (nv > 0) {
    out.ave = ave / nv;
  }
  return out;
}

double nds(double map, const std::array<double, 5> & tp_means)
{
  double sum = 5.0 * map;
  for (const double e : tp_means) {
    sum += 1.0 - std::min(1.0, e);
  }
  return sum / 10.0;
}

double adapted_nds(double map, double ate, double ase, double aoe)
{
  return (5.0 * map + (1.0 - std::min(1.0, ate)) + (1.0 - std::min(1.0, ase)) +
         (1.0 - std::min(1.0, aoe))) / 8.0;
}

double map2d(
  const std::vector<ingest::Detection2D> & preds, const std::vector<ingest::Detection2D> & gts,
  double iou_threshold)
{
  std::set<std::string> classes;
  for (const auto & g : gts) {
    classes.insert(g.class_label);
  }
  if (classes.empty()) {
    return 0.0;
  }
  using ImageKey = std::pair<std::string, std::string>;
  double total = 0.0;
  for (const auto & cls : classes) {
    std::map<ImageKey, std::vector<std::size_t>> gt_by_image;
    std::size_t num_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].class_label == cls) {
        gt_by_image[{gts[g].frame_id, gts[g].camera_id}].push_back(g);
        ++num_gt;
      }
    }
    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].class_label == cls) {
        order.push_back(p);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].score > preds[b].score;
      });
    std::vector<bool> taken(gts.size(), false);
    std::vector<bool> flags;
    for (const std::size_t p : order) {
      bool tp = false;
      const auto it = gt_by_image.find({preds[p].frame_id, preds[p].camera_id});
      if (it != gt_by_image.end()) {
        double best = iou_threshold;
        std::optional<std::size_t> best_gt;
        for (const std::size_t g : it->second) {
          if (taken[g]) {
            continue;
          }
          const double iou = geom::iou_2d(preds[p].box, gts[g].box);
          if (iou >= best && (!best_gt || iou > best)) {
            best = iou;
            best_gt = g;
          }
        }
        if (best_gt) {
          taken[*best_gt] = true;
          tp = true;
        }
      }
      flags.push_back(tp);
    }
    PrCurve curve = pr_curve(flags, num_gt);
    for (std::size_t i = curve.precision.size(); i-- > 1; ) {
      curve.precision[i - 1] = std::max(curve.precision[i - 1], curve.precision[i]);
    }
    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double r = recall_sample(i);
      const auto it = std::lower_bound(curve.recall.begin(), curve.recall.end(), r);
      if (it != curve.recall.end()) {
        sum += curve.precision[static_cast<std::size_t>(it - curve.recall.begin())];
      }
    }
    total += sum / 101.0;
  }
  return total / static_cast<double>(classes.size());
}

MetricsReport evaluate(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts, const EvalConfig & cfg)
{
  cfg.validate();
  std::vector<std::string> classes = cfg.classes;
  if (classes.empty()) {
    std::set<std::string> seen;
    for (const auto & g : gts) {
      seen.insert(g.class_label);
    }
    classes.assign(seen.begin(), seen.end());
  }

  MetricsReport report;
  bool any_velocity_pred = false;
  bool any_velocity_gt = false;
  for (const auto & p : preds) {
    any_velocity_pred = any_velocity_pred || p.velocity.has_value();
  }
  for (const auto & g : gts) {
    any_velocity_gt = any_velocity_gt || g.velocity.has_value();
  }
  const bool velocity = any_velocity_pred && any_velocity_gt;

  double sum_ap = 0.0;
  double sum_ate = 0.0;
  double sum_ase = 0.0;
  double sum_aoe = 0.0;
  double sum_ave = 0.0;
  for (const auto & cls : classes) {
    ClassMetrics cm;
    cm.class_label = cls;
    for (const auto & p : preds) {
      cm.num_pred += p.class_label == cls ? 1U : 0U;
    }
    double class_ap = 0.0;
    for (const double t : cfg.dist_thresholds) {
      const MatchResult m = match_predictions(preds, gts, cls, t);
      cm.num_gt = m.num_gt;
      const double ap = average_precision(m, cfg.min_recall, cfg.min_precision);
      cm.ap[t] = ap;
      class_ap += ap;
    }
    if (cm.num_gt == 0) {
      continue;
    }
    cm.mean_ap = class_ap / static_cast<double>(cfg.dist_thresholds.size());
    cm.errors = tp_errors(match_predictions(preds, gts, cls, cfg.tp_threshold), preds, gts);
    sum_ap += cm.mean_ap;
    sum_ate += cm.errors.ate;
    sum_ase += cm.errors.ase;
    sum_aoe += cm.errors.aoe;
    sum_ave += cm.errors.ave.value_or(1.0);
    report.per_class.push_back(std::move(cm));
  }
  const double n = static_cast<double>(report.per_class.size());
  if (n > 0) {
    report.map = sum_ap / n;
    report.mate = sum_ate / n;
    report.mase = sum_ase / n;
    report.maoe = sum_aoe / n;
    if (velocity) {
      report.mave = sum_ave / n;
    }
  }
  report.nds = nds(report.map, {report.mate, report.mase, report.maoe, report.mave.value_or(1.0),
      report.maae});
  report.adapted_nds = adapted_nds(report.map, report.mate, report.mase, report.maoe);
  return report;
}

std::vector<DistanceBand> stratify_by_distance(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts, const EvalConfig & cfg,
  const std::map<std::string, geom::Vec2> & ego_xy)
{
  const auto range = [&](const ingest::ScoredAnnotation & a) {
      const auto it = ego_xy.find(a.frame_id);
      const geom::Vec2 origin = it == ego_xy.end() ? geom::Vec2::Zero() : it->second;
      return (a.cuboid.center.head<2>() - origin).norm();
    };
  static constexpr std::array<std::pair<double, double>, 4> kBands{{
    {0.0, 10.0}, {10.0, 20.0}, {20.0, 30.0}, {0.0, 50.0}}};
  std::vector<DistanceBand> out;
  for (const auto & [lo, hi] : kBands) {
    std::vector<ingest::ScoredAnnotation> p;
    std::vector<ingest::ScoredAnnotation> g;
    for (const auto & a : preds) {
      const double r = range(a);
      if (r >= lo && r < hi) {
        p.push_back(a);
      }
    }
    for (const auto & a : gts) {
      const double r = range(a);
      if (r >= lo && r < hi) {
        g.push_back(a);
      }
    }
    out.push_back({lo, hi, evaluate(p, g, cfg)});
  }
  return out;
}

nlohmann::json to_json(const MetricsReport & report)
{
  nlohmann::json classes = nlohmann::json::array();
  for (const auto & c : report.per_class) {
    nlohmann::json ap = nlohmann::json::object();
    for (const auto & [t, v] : c.ap) {
      char key[32];
      std::snprintf(key, sizeof(key), "%g", t);
      ap[key] = v;
    }
    nlohmann::json j{
      {"class", c.class_label},
      {"num_gt", c.num_gt},
      {"num_pred", c.num_pred},
      {"ap", ap},
      {"mean_ap", c.mean_ap},
      {"ate", c.errors.ate},
      {"ase", c.errors.ase},
      {"aoe", c.errors.aoe},
      {"tp_count", c.errors.tp_count}};
    if (c.errors.ave) {
      j["ave"] = *c.errors.ave;
    }
    classes.push_back(j);
  }
  nlohmann::json j{
    {"map_3d", report.map},
    {"mate", report.mate},
    {"mase", report.mase},
    {"maoe", report.maoe},
    {"maae", report.maae},
    {"nds", report.nds},
    {"adapted_nds", report.adapted_nds},
    {"per_class", classes}};
  j["mave"] = report.mave ? nlohmann::json(*report.mave) : nlohmann::json(nullptr);
  if (report.map2d) {
    j["map_2d"] = *report.map2d;
  }
  return j;
}

std::string to_table(const MetricsReport & report)
{
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-22s %6s %6s %7s %7s %7s %7s\n",
    "class", "GT", "pred", "AP", "ATE", "ASE", "AOE");
  os << line;
  for (const auto & c : report.per_class) {
    std::snprintf(line, sizeof(line), "%-22s %6zu %6zu %7.4f %7.3f %7.3f %7.3f\n",
      c.class_label.c_str(), c.num_gt, c.num_pred, c.mean_ap, c.errors.ate, c.errors.ase,
      c.errors.aoe);
    os << line;
  }
  std::snprintf(line, sizeof(line),
    "mAP %.4f | mATE %.3f | mASE %.3f | mAOE %.3f | mAVE %s | mAAE %.3f\n",
    report.map, report.mate, report.mase, report.maoe,
    report.mave ? std::to_string(*report.mave).c_str() : "n/a", report.maae);
  os << line;
  std::snprintf(line, sizeof(line), "NDS %.4f | adapted NDS %.4f\n", report.nds,
    report.adapted_nds);
  os << line;
  if (report.map2d) {
    std::snprintf(line, sizeof(line), "mAP-2D %.4f\n", *report.map2d);
    os << line;
  }
  return os.str();
}

}  // namespace autolift::eval

// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

using GroupKey = std::pair<std::string, std::string>;  // (image_id, class)

struct Group {
  std::vector<std::size_t> dets;
  std::vector<std::size_t> gts;
};

// Greedy single-match assignment inside one (image, class) group.
void match_group(const Group& group, std::span<const DetectionRecord> dets,
                 std::span<const GroundTruthRecord> gts, double iou_thresh,
                 const IouFn& iou, std::vector<char>& flags) {
  std::vector<std::size_t> order = group.dets;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  std::vector<char> taken(group.gts.size(), 0);
  for (std::size_t d : order) {
    double best = -1.0;
    std::size_t best_slot = group.gts.size();
    for (std::size_t s = 0; s < group.gts.size(); ++s) {
      if (taken[s]) continue;
      const double v = iou(dets[d].box, gts[group.gts[s]].box);
      if (v > best) {
        best = v;
        best_slot = s;
      }
    }
    if (best_slot < group.gts.size() && best >= iou_thresh) {
      taken[best_slot] = 1;
      flags[d] = 1;
    }
  }
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
  return buf;
}

std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) line += " | ";
      line += rows[r][c];
      line.append(width[c] - rows[r][c].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < width.size(); ++c) {
        if (c > 0) rule += "-+-";
        rule.append(width[c], '-');
      }
      out << rule << '\n';
    }
  }
  return out.str();
}

const char* mode_name(ApMode mode) {
  return mode == ApMode::kAllPoints ? "all_points" : "11_point";
}

}  // namespace

std::vector<bool> match_detections(std::span<const DetectionRecord> dets,
                                   std::span<const GroundTruthRecord> gts,
                                   double iou_thresh, const IouFn& iou_fn) {
  const IouFn iou = iou_fn ? iou_fn : IouFn(skew_iou);
  std::map<GroupKey, Group> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    groups[{dets[i].image_id, dets[i].class_label}].dets.push_back(i);
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const auto it = groups.find({gts[i].image_id, gts[i].class_label});
    if (it != groups.end()) it->second.gts.push_back(i);
  }
  std::vector<char> flags(dets.size(), 0);
  for (const auto& [key, group] : groups) {
    match_group(group, dets, gts, iou_thresh, iou, flags);
  }
  return {flags.begin(), flags.end()};
}

double average_precision(std::span<const bool> flags_by_score,
                         std::size_t gt_count, ApMode mode) {
  if (gt_count == 0) return flags_by_score.empty() ? 1.0 : 0.0;
  const std::size_t n = flags_by_score.size();
  std::vector<double> precision(n);
  std::vector<std::size_t> tp_cum(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += flags_by_score[i] ? 1 : 0;
    tp_cum[i] = tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Envelope: best precision at this recall or beyond.
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }

  const double gt = static_cast<double>(gt_count);
  if (mode == ApMode::kAllPoints) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (flags_by_score[i]) sum += precision[i];
    }
    return std::clamp(sum / gt, 0.0, 1.0);
  }
  double sum = 0.0;
  for (std::size_t t = 0; t <= 10; ++t) {
    // First index whose recall reaches t/10; the envelope is non-increasing.
    for (std::size_t i = 0; i < n; ++i) {
      if (tp_cum[i] * 10 >= t * gt_count) {
        sum += precision[i];
        break;
      }
    }
  }
  return sum / 11.0;
}

const ClassResult* EvalReport::find(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

EvalReport evaluate(std::span<const DetectionRecord> dets,
                    std::span<const GroundTruthRecord> gts,
                    const EvalConfig& config) {
  if (!(config.iou_thresh >= 0.0 && config.iou_thresh <= 1.0)) {
    throw InvalidSpecError("IoU threshold must lie in [0, 1]");
  }
  const IouFn iou = config.iou_fn ? config.iou_fn : IouFn(skew_iou);

  EvalReport report;
  report.iou_thresh = config.iou_thresh;
  report.ap_mode = config.ap_mode;

  std::vector<std::string> class_names = config.classes;
  if (class_names.empty()) {
    std::set<std::string> seen;
    for (const auto& g : gts) seen.insert(g.class_label);
    for (const auto& d : dets) seen.insert(d.class_label);
    class_names.assign(seen.begin(), seen.end());
  }
  std::map<std::string, std::size_t> class_index;
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    class_index.emplace(class_names[i], i);
  }

  auto known_class = [&](const std::string& label) {
    if (class_index.count(label)) return true;
    if (config.strict) throw DataError("record has unlisted class '" + label + "'");
    ++report.skipped_records;
    return false;
  };

  std::set<std::string> images;
  for (const auto& g : gts) images.insert(g.image_id);

  std::vector<ClassResult> results(class_names.size());
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    results[i].name = class_names[i];
  }

  std::map<GroupKey, Group> groups;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!known_class(gts[i].class_label)) continue;
    groups[{gts[i].image_id, gts[i].class_label}].gts.push_back(i);
    ++results[class_index.at(gts[i].class_label)].gt_count;
  }
  std::vector<std::vector<std::size_t>> class_dets(class_names.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!known_class(dets[i].class_label)) continue;
    if (!images.count(dets[i].image_id)) {
      if (config.strict) {
        throw DataError("detection references unknown image_id '" +
                        dets[i].image_id + "'");
      }
      ++report.unknown_image_dets;
    } else {
      groups[{dets[i].image_id, dets[i].class_label}].dets.push_back(i);
    }
    class_dets[class_index.at(dets[i].class_label)].push_back(i);
  }

  // Groups write disjoint flag slots, so the split across workers cannot
  // change the result.
  std::vector<const Group*> work;
  work.reserve(groups.size());
  for (const auto& [key, group] : groups) work.push_back(&group);
  std::vector<char> flags(dets.size(), 0);
  const unsigned threads =
      std::max(1u, std::min<unsigned>(config.threads,
                                      static_cast<unsigned>(work.size())));
  if (threads <= 1) {
    for (const Group* g : work) {
      match_group(*g, dets, gts, config.iou_thresh, iou, flags);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
          match_group(*work[i], dets, gts, config.iou_thresh, iou, flags);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  double ap_sum = 0.0;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::size_t>& idx = class_dets[c];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].score > dets[b].score;
    });
    // std::vector<bool> is not contiguous, so spans need a plain array.
    std::unique_ptr<bool[]> ordered(new bool[idx.size() + 1]);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      ordered[i] = flags[idx[i]] != 0;
      tp += ordered[i] ? 1 : 0;
    }

    ClassResult& r = results[c];
    r.det_count = idx.size();
    r.tp = tp;
    r.fp = r.det_count - r.tp;
    r.fn = r.gt_count - r.tp;
    r.ap = average_precision(std::span<const bool>(ordered.get(), idx.size()),
                             r.gt_count, config.ap_mode);
    ap_sum += r.ap;
  }
  report.classes = std::move(results);
  report.map = class_names.empty()
                   ? 0.0
                   : ap_sum / static_cast<double>(class_names.size());
  return report;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["iou_threshold"] = report.iou_thresh;
  j["ap_mode"] = mode_name(report.ap_mode);
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : report.classes) {
    nlohmann::ordered_json row;
    row["name"] = c.name;
    row["ap"] = c.ap;
    row["gt"] = c.gt_count;
    row["detections"] = c.det_count;
    row["tp"] = c.tp;
    row["fp"] = c.fp;
    row["fn"] = c.fn;
    j["classes"].push_back(std::move(row));
  }
  j["map"] = report.map;
  j["unknown_image_detections"] = report.unknown_image_dets;
  j["skipped_records"] = report.skipped_records;
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  std::vector<std::string> header{"Class"};
  std::vector<std::string> values{"AP"};
  for (const auto& c : report.classes) {
    header.push_back(c.name);
    values.push_back(percent(c.ap));
  }
  header.push_back("mAP");
  values.push_back(percent(report.map));
  char note[96];
  std::snprintf(note, sizeof(note), "IoU threshold %.2f, %s AP\n",
                report.iou_thresh, mode_name(report.ap_mode));
  return render_rows({header, values}) + note;
}

std::string ablation_table(
    std::span<const std::pair<std::string, EvalReport>> runs) {
  std::vector<std::vector<std::string>> rows{{"Method", "mAP"}};
  for (const auto& [name, report] : runs) {
    rows.push_back({name, percent(report.map)});
  }
  return render_rows(rows);
}

}  // namespace obbkit

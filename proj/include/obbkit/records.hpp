// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "obbkit/geometry.hpp"

namespace obbkit {

/// The seven ship categories used for reports and rendering.
inline constexpr std::array<std::string_view, 7> kShipClasses = {
    "Aircraft Carriers", "Helicopter Destroyers", "Cruisers",
    "Dock Landing Ships", "Destroyers",           "Frigates",
    "Cargo Ships",
};

std::vector<std::string> default_class_names();

struct GroundTruthRecord {
  std::string image_id;
  std::string class_label;
  OrientedBox box;

  bool operator==(const GroundTruthRecord&) const = default;
};

struct DetectionRecord {
  std::string image_id;
  std::string class_label;
  OrientedBox box;
  double score = 0.0;

  bool operator==(const DetectionRecord&) const = default;
};

// JSON Lines, one record per line:
//   {"image_id": "...", "class": "...", "box": [cx, cy, w, h, theta_deg]}
// with an extra "score" field for detections (1 when absent). Angles are
// degrees on disk and radians in memory. Blank lines are skipped; any
// malformed line throws DataError naming its 1-based line number.

std::vector<GroundTruthRecord> read_ground_truth(std::istream& in);
std::vector<DetectionRecord> read_detections(std::istream& in);
void write_ground_truth(std::ostream& out,
                        const std::vector<GroundTruthRecord>& records);
void write_detections(std::ostream& out,
                      const std::vector<DetectionRecord>& records);

std::vector<GroundTruthRecord> read_ground_truth_file(const std::string& path);
std::vector<DetectionRecord> read_detections_file(const std::string& path);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Parses "cx,cy,w,h,theta_deg" into a validated box (theta in radians).
OrientedBox parse_box(std::string_view text);

}  // namespace obbkit

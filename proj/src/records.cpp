// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/records.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    fail(line, std::string("missing string field \"") + key + "\"");
  }
  std::string value = it->get<std::string>();
  if (value.empty()) fail(line, std::string("empty field \"") + key + "\"");
  return value;
}

double number_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    fail(line, std::string("missing numeric field \"") + key + "\"");
  }
  return it->get<double>();
}

OrientedBox box_field(const json& obj, std::size_t line) {
  const auto it = obj.find("box");
  if (it == obj.end() || !it->is_array() || it->size() != 5) {
    fail(line, "\"box\" must be an array [cx, cy, w, h, theta_deg]");
  }
  std::array<double, 5> v{};
  for (std::size_t i = 0; i < 5; ++i) {
    if (!(*it)[i].is_number()) fail(line, "\"box\" entries must be numbers");
    v[i] = (*it)[i].get<double>();
  }
  OrientedBox box{v[0], v[1], v[2], v[3], deg_to_rad(v[4])};
  try {
    validate(box);
  } catch (const InvalidBoxError& e) {
    fail(line, e.what());
  }
  return box;
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(line, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) fail(line, "record must be a JSON object");
    fn(obj, line);
  }
}

ordered_json box_json(const OrientedBox& b) {
  return ordered_json::array({b.cx, b.cy, b.w, b.h, rad_to_deg(b.theta)});
}

template <typename T, typename Reader>
std::vector<T> read_file(const std::string& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return reader(in);
}

}  // namespace

std::vector<std::string> default_class_names() {
  return {kShipClasses.begin(), kShipClasses.end()};
}

double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

std::vector<GroundTruthRecord> read_ground_truth(std::istream& in) {
  std::vector<GroundTruthRecord> out;
  for_each_record(in, [&](const json& obj, std::size_t line) {
    out.push_back({string_field(obj, "image_id", line),
                   string_field(obj, "class", line), box_field(obj, line)});
  });
  return out;
}

std::vector<DetectionRecord> read_detections(std::istream& in) {
  std::vector<DetectionRecord> out;
  for_each_record(in, [&](const json& obj, std::size_t line) {
    // A missing score reads as 1, so ground-truth files double as detections.
    const double score = obj.contains("score") ? number_field(obj, "score", line) : 1.0;
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
      fail(line, "\"score\" must lie in [0, 1]");
    }
    out.push_back({string_field(obj, "image_id", line),
                   string_field(obj, "class", line), box_field(obj, line),
                   score});
  });
  return out;
}

void write_ground_truth(std::ostream& out,
                        const std::vector<GroundTruthRecord>& records) {
  for (const auto& r : records) {
    ordered_json obj;
    obj["image_id"] = r.image_id;
    obj["class"] = r.class_label;
    obj["box"] = box_json(r.box);
    out << obj.dump() << '\n';
  }
}

void write_detections(std::ostream& out,
                      const std::vector<DetectionRecord>& records) {
  for (const auto& r : records) {
    ordered_json obj;
    obj["image_id"] = r.image_id;
    obj["class"] = r.class_label;
    obj["box"] = box_json(r.box);
    obj["score"] = r.score;
    out << obj.dump() << '\n';
  }
}

std::vector<GroundTruthRecord> read_ground_truth_file(const std::string& path) {
  return read_file<GroundTruthRecord>(
      path, [](std::istream& in) { return read_ground_truth(in); });
}

std::vector<DetectionRecord> read_detections_file(const std::string& path) {
  return read_file<DetectionRecord>(
      path, [](std::istream& in) { return read_detections(in); });
}

OrientedBox parse_box(std::string_view text) {
  const std::string expected = "malformed box \"" + std::string(text) +
                               "\"; expected cx,cy,w,h,theta_deg";
  std::vector<double> v;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = text.find(',', pos);
    const std::string part(text.substr(pos, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - pos));
    char* stop = nullptr;
    const double value = std::strtod(part.c_str(), &stop);
    if (part.empty() || stop != part.c_str() + part.size()) {
      throw DataError(expected);
    }
    v.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 5) throw DataError(expected);
  OrientedBox box{v[0], v[1], v[2], v[3], deg_to_rad(v[4])};
  try {
    validate(box);
  } catch (const InvalidBoxError& e) {
    throw DataError(e.what());
  }
  return box;
}

}  // namespace obbkit

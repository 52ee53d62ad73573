// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "obbkit/geometry.hpp"

namespace obbkit {

struct RenderStyle {
  /// Stroke color per class; the seven ship classes have defaults.
  std::map<std::string, std::string> colors;
  /// Used for any class missing from `colors`.
  std::string fallback_color = "#7f7f7f";
  double stroke_width = 2.0;
  bool show_labels = true;
  bool show_scores = true;
  bool show_legend = true;

  RenderStyle();
  const std::string& color_for(const std::string& class_label) const;
};

struct RenderItem {
  OrientedBox box;
  std::string class_label;
  std::optional<double> score;
};

/// Standalone SVG overlay: one <polygon> per item, an optional <text> label
/// per item and a legend listing the seven ship classes.
std::string render_svg(std::span<const RenderItem> items, double width,
                       double height, const RenderStyle& style = {});

}  // namespace obbkit

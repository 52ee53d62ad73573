// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/render.hpp"

#include <cstdio>
#include <sstream>

#include "obbkit/records.hpp"

namespace obbkit {

namespace {

constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
};

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

RenderStyle::RenderStyle() {
  for (std::size_t i = 0; i < kShipClasses.size(); ++i) {
    colors.emplace(std::string(kShipClasses[i]), kPalette[i]);
  }
}

const std::string& RenderStyle::color_for(const std::string& class_label) const {
  const auto it = colors.find(class_label);
  return it == colors.end() ? fallback_color : it->second;
}

std::string render_svg(std::span<const RenderItem> items, double width,
                       double height, const RenderStyle& style) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width)
      << ' ' << num(height) << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" fill=\"#101418\"/>\n"
      << "  <g id=\"boxes\" fill=\"none\" stroke-width=\""
      << num(style.stroke_width) << "\">\n";

  for (const RenderItem& item : items) {
    const ConvexPolygon poly = corners(item.box);
    const std::string& color = style.color_for(item.class_label);
    svg << "    <polygon points=\"";
    bool first = true;
    for (const Point& p : poly.vertices()) {
      if (!first) svg << ' ';
      svg << num(p.x) << ',' << num(p.y);
      first = false;
    }
    svg << "\" stroke=\"" << color << "\"/>\n";

    if (style.show_labels) {
      std::string label = item.class_label;
      if (style.show_scores && item.score) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), " %.2f", *item.score);
        label += buf;
      }
      // Anchor the label at the topmost corner.
      Point top = poly.vertices()[0];
      for (const Point& p : poly.vertices()) {
        if (p.y < top.y) top = p;
      }
      svg << "    <text x=\"" << num(top.x) << "\" y=\"" << num(top.y - 4.0)
          << "\" fill=\"" << color
          << "\" stroke=\"none\" font-family=\"sans-serif\" font-size=\"12\">"
          << escape_xml(label) << "</text>\n";
    }
  }
  svg << "  </g>\n";

  if (style.show_legend) {
    svg << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double y = 10.0;
    for (const auto name : kShipClasses) {
      const std::string label(name);
      svg << "    <rect x=\"10\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
          << style.color_for(label) << "\"/>\n"
          << "    <text x=\"28\" y=\"" << num(y + 10.0) << "\" fill=\"#ffffff\">"
          << escape_xml(label) << "</text>\n";
      y += 16.0;
    }
    svg << "  </g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace obbkit

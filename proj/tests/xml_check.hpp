// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal XML well-formedness checker for generated SVG: one root element,
// properly nested tags, quoted attributes and known entities. No DTDs.

#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

namespace obbkit::testing {

struct XmlSummary {
  bool ok = false;
  std::string error;
  std::map<std::string, int> element_counts;
  std::vector<std::string> texts;
};

inline XmlSummary check_xml(const std::string& doc) {
  XmlSummary r;
  std::vector<std::string> stack;
  int roots = 0;
  std::size_t i = 0;
  const auto fail = [&](const std::string& why) {
    r.error = why + " at offset " + std::to_string(i);
    r.ok = false;
    return r;
  };
  const auto name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           c == ':' || c == '.';
  };
  const auto check_entities = [](const std::string& s) {
    for (std::size_t p = s.find('&'); p != std::string::npos; p = s.find('&', p + 1)) {
      const std::size_t semi = s.find(';', p);
      if (semi == std::string::npos) return false;
      const std::string e = s.substr(p, semi - p + 1);
      if (e != "&amp;" && e != "&lt;" && e != "&gt;" && e != "&quot;" && e != "&apos;") {
        return false;
      }
    }
    return true;
  };
  if (doc.rfind("<?xml", 0) == 0) {
    i = doc.find("?>");
    if (i == std::string::npos) return fail("unterminated declaration");
    i += 2;
  }
  while (i < doc.size()) {
    if (doc[i] != '<') {
      const std::size_t next = doc.find('<', i);
      const std::string text = doc.substr(i, next == std::string::npos ? std::string::npos : next - i);
      if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
        if (stack.empty()) return fail("text outside root");
        if (!check_entities(text) || text.find('>') != std::string::npos) return fail("bad text");
        r.texts.push_back(text);
      }
      if (next == std::string::npos) break;
      i = next;
      continue;
    }
    const std::size_t close = doc.find('>', i);
    if (close == std::string::npos) return fail("unterminated tag");
    std::string tag = doc.substr(i + 1, close - i - 1);
    if (!tag.empty() && tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">");
      stack.pop_back();
      i = close + 1;
      continue;
    }
    const bool self_closing = !tag.empty() && tag.back() == '/';
    if (self_closing) tag.pop_back();
    std::size_t p = 0;
    while (p < tag.size() && name_char(tag[p])) ++p;
    const std::string name = tag.substr(0, p);
    if (name.empty()) return fail("empty tag name");
    // Attributes: name="value" pairs separated by whitespace.
    std::map<std::string, bool> seen;
    while (p < tag.size()) {
      if (!std::isspace(static_cast<unsigned char>(tag[p]))) return fail("expected space");
      while (p < tag.size() && std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
      if (p == tag.size()) break;
      const std::size_t a0 = p;
      while (p < tag.size() && name_char(tag[p])) ++p;
      const std::string attr = tag.substr(a0, p - a0);
      if (attr.empty() || p + 1 >= tag.size() || tag[p] != '=') return fail("bad attribute");
      const char q = tag[p + 1];
      if (q != '"' && q != '\'') return fail("unquoted attribute");
      const std::size_t end = tag.find(q, p + 2);
      if (end == std::string::npos) return fail("unterminated attribute");
      const std::string value = tag.substr(p + 2, end - p - 2);
      if (value.find('<') != std::string::npos || !check_entities(value)) {
        return fail("bad attribute value");
      }
      if (seen[attr]) return fail("duplicate attribute " + attr);
      seen[attr] = true;
      p = end + 1;
    }
    if (stack.empty()) {
      if (++roots > 1) return fail("second root element");
    }
    ++r.element_counts[name];
    if (!self_closing) stack.push_back(name);
    i = close + 1;
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
  if (roots != 1) return fail("no root element");
  r.ok = true;
  return r;
}

}  // namespace obbkit::testing

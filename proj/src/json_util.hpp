// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <cmath>
#include <string>
#include <string_view>

#include "roi/error.hpp"
#include "roi/geometry.hpp"

namespace roi::jsonutil {

using nlohmann::json;

inline json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::MalformedJson, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json aabb(const Aabb& box) { return {{"min", vec3(box.min)}, {"max", vec3(box.max)}}; }

inline Aabb aabb(const json& j) {
  const Vec3 lo = vec3(j.at("min")), hi = vec3(j.at("max"));
  if (!(lo.array() <= hi.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "aabb min must not exceed max");
  }
  return {lo, hi};
}

/// Non-finite values become strings ("inf", "-inf", "nan") so documents stay valid JSON.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw Error(ErrorCode::MalformedJson, "unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

inline json parse(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

inline void expect_schema(const json& doc, std::string_view schema) {
  if (!doc.is_object() || !doc.contains("schema")) {
    throw Error(ErrorCode::MalformedJson, "missing schema tag");
  }
  if (doc["schema"] != schema) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                "expected '" + std::string(schema) + "', got " + doc["schema"].dump());
  }
}

}  // namespace roi::jsonutil

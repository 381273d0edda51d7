#include "browkit/landmark_io.hpp"

#include "browkit/error.hpp"
#include "browkit/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

namespace browkit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

double estimate_fps(const std::vector<LandmarkFrame>& frames, double fallback) {
  std::vector<double> dts;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const double dt = frames[i].time_s - frames[i - 1].time_s;
    if (dt > 0.0) dts.push_back(dt);
  }
  if (dts.empty()) return fallback;
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  return 1.0 / dts[dts.size() / 2];
}

}  // namespace

// ---------------------------------------------------------------------------
// OpenFace CSV

LandmarkSequence parse_openface_csv(const std::filesystem::path& path,
                                    const LandmarkSchema& schema,
                                    const OpenFaceOptions& options) {
  return parse_openface_csv_text(text::read_file(path), schema, options);
}

LandmarkSequence parse_openface_csv_text(std::string_view content, const LandmarkSchema& schema,
                                         const OpenFaceOptions& options) {
  schema.validate();
  auto lines = split_lines(content);
  while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("OpenFace CSV is empty");

  const auto header = text::split_csv_line(lines[0]);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

  auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw SchemaError("OpenFace CSV is missing required column '" + name + "'");
    return it->second;
  };
  auto optional_col = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };

  const auto c_conf = require("confidence");
  const auto c_rx = require("pose_Rx");
  const auto c_ry = require("pose_Ry");
  const auto c_rz = require("pose_Rz");
  const auto c_frame = optional_col("frame");
  const auto c_time = optional_col("timestamp");
  const auto c_success = optional_col("success");

  struct LandmarkCols {
    int index;
    std::size_t x, y, z;
  };
  std::vector<LandmarkCols> lm_cols;
  for (int idx : schema.referenced_indices()) {
    const auto s = std::to_string(idx);
    lm_cols.push_back({idx, require("X_" + s), require("Y_" + s), require("Z_" + s)});
  }
  // Keep every other 3D landmark the file carries as well.
  for (int idx = 0;; ++idx) {
    const auto s = std::to_string(idx);
    auto x = optional_col("X_" + s), y = optional_col("Y_" + s), z = optional_col("Z_" + s);
    if (!x || !y || !z) break;
    if (std::none_of(lm_cols.begin(), lm_cols.end(), [&](const auto& c) { return c.index == idx; })) {
      lm_cols.push_back({idx, *x, *y, *z});
    }
  }

  LandmarkSequence seq;
  seq.schema = schema;
  seq.meta = options.meta;
  seq.meta.tracker = Tracker::openface;
  if (seq.meta.units.empty()) seq.meta.units = "mm";

  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (text::trim(lines[row]).empty()) continue;
    const auto cells = text::split_csv_line(lines[row]);
    auto number = [&](std::size_t c) {
      if (c >= cells.size()) {
        throw ParseError("row " + std::to_string(row + 1) + ": missing cell for column '" +
                         header[c] + "'");
      }
      auto v = text::parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("row " + std::to_string(row + 1) + ", column '" + header[c] +
                         "': cannot parse '" + cells[c] + "'");
      }
      return *v;
    };

    LandmarkFrame f;
    f.frame_index = c_frame ? static_cast<std::int64_t>(std::llround(number(*c_frame)))
                            : static_cast<std::int64_t>(seq.frames.size());
    f.time_s = c_time ? number(*c_time) : static_cast<double>(seq.frames.size()) / options.fallback_fps;
    f.confidence = std::clamp(number(c_conf), 0.0, 1.0);
    const bool success = c_success ? number(*c_success) != 0.0 : true;
    f.present = success && *f.confidence >= options.confidence_threshold;
    if (f.present) {
      f.pose = HeadPose{number(c_rx), number(c_ry), number(c_rz)};
      for (const auto& lc : lm_cols) {
        f.landmarks[lc.index] = Point3(number(lc.x), number(lc.y), number(lc.z));
      }
      resolve_roles(f, schema);
    }
    seq.frames.push_back(std::move(f));
  }
  if (seq.frames.empty()) throw ParseError("OpenFace CSV has a header but no data rows");
  seq.meta.fps = c_time ? estimate_fps(seq.frames, options.fallback_fps) : options.fallback_fps;
  seq.validate();
  return seq;
}

// ---------------------------------------------------------------------------
// Schema JSON

ordered_json schema_to_json(const LandmarkSchema& schema) {
  ordered_json roles = ordered_json::object();
  for (Role role : kAllRoles) {
    auto it = schema.roles.find(role);
    if (it != schema.roles.end()) roles[std::string(to_string(role))] = it->second;
  }
  return ordered_json{{"tracker", to_string(schema.tracker)}, {"roles", roles}};
}

LandmarkSchema schema_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("schema must be a JSON object");
  LandmarkSchema s;
  if (j.contains("tracker")) s.tracker = tracker_from_string(j.at("tracker").get<std::string>());
  if (!j.contains("roles") || !j.at("roles").is_object()) {
    throw SchemaError("schema is missing field 'roles'");
  }
  for (const auto& [name, indices] : j.at("roles").items()) {
    const Role role = role_from_string(name);
    if (indices.is_number_integer()) {
      s.roles[role] = {indices.get<int>()};
    } else if (indices.is_array()) {
      s.roles[role] = indices.get<std::vector<int>>();
    } else {
      throw SchemaError("role '" + name + "' must map to an index or index list");
    }
  }
  s.validate();
  return s;
}

LandmarkSchema load_schema(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(text::read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("schema file '" + path.string() + "': " + e.what());
  }
  return schema_from_json(j);
}

LandmarkSchema default_schema(Tracker tracker) {
  if (const char* dir = std::getenv("BROWKIT_SCHEMA_DIR"); dir && *dir) {
    const auto candidate = std::filesystem::path(dir) / (std::string(to_string(tracker)) + ".json");
    if (std::filesystem::exists(candidate)) return load_schema(candidate);
  }
  switch (tracker) {
    case Tracker::openface:
      return LandmarkSchema::openface68();
    case Tracker::mediapipe:
      return LandmarkSchema::mediapipe468();
    case Tracker::custom:
      break;
  }
  throw SchemaError("no default schema for tracker 'custom'; pass a schema file");
}

// ---------------------------------------------------------------------------
// Interchange JSON-Lines

namespace {

const json& field(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw SchemaError("line " + std::to_string(line) + ": missing field '" + name + "'");
  }
  return *it;
}

ordered_json header_json(const LandmarkSequence& seq) {
  ordered_json h;
  h["version"] = kInterchangeVersion;
  h["tracker"] = to_string(seq.meta.tracker);
  h["fps"] = seq.meta.fps;
  h["camera_distance"] = to_string(seq.meta.camera_distance);
  h["condition"] = to_string(seq.meta.condition);
  h["eyebrows_raised"] = seq.meta.eyebrows_raised ? ordered_json(*seq.meta.eyebrows_raised) : ordered_json(nullptr);
  h["subject"] = seq.meta.subject;
  if (!seq.meta.units.empty()) h["units"] = seq.meta.units;
  h["schema"] = schema_to_json(seq.schema);
  return h;
}

ordered_json frame_json(const LandmarkFrame& f) {
  ordered_json o;
  o["frame"] = f.frame_index;
  o["t"] = f.time_s;
  o["conf"] = f.confidence ? ordered_json(*f.confidence) : ordered_json(nullptr);
  o["present"] = f.present;
  ordered_json pts = ordered_json::object();
  for (const auto& [idx, p] : f.landmarks) pts[std::to_string(idx)] = {p.x(), p.y(), p.z()};
  o["pts"] = std::move(pts);
  if (f.pose) o["pose"] = {f.pose->pitch, f.pose->yaw, f.pose->roll};
  return o;
}

double finite_number(const json& v, const char* what, std::size_t line) {
  if (!v.is_number()) {
    throw ParseError("line " + std::to_string(line) + ": '" + what + "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ParseError("line " + std::to_string(line) + ": '" + what + "' is not finite");
  }
  return d;
}

}  // namespace

std::string interchange_text(const LandmarkSequence& seq) {
  seq.validate();
  std::string out = header_json(seq).dump();
  out.push_back('\n');
  for (const auto& f : seq.frames) {
    out += frame_json(f).dump();
    out.push_back('\n');
  }
  return out;
}

void write_interchange(const LandmarkSequence& seq, const std::filesystem::path& path) {
  text::atomic_write(path, interchange_text(seq));
}

LandmarkSequence parse_interchange(const std::filesystem::path& path) {
  return parse_interchange_text(text::read_file(path));
}

LandmarkSequence parse_interchange_text(std::string_view content) {
  const auto lines = split_lines(content);
  LandmarkSequence seq;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected a JSON object");
    }
    try {
      if (!have_header) {
        const auto& version = field(obj, "version", line_no);
        if (!version.is_string() || version.get<std::string>() != kInterchangeVersion) {
          throw UnsupportedVersionError("unsupported interchange version " + version.dump() +
                                        " (expected \"" + std::string(kInterchangeVersion) + "\")");
        }
        auto& m = seq.meta;
        m.tracker = tracker_from_string(field(obj, "tracker", line_no).get<std::string>());
        m.fps = finite_number(field(obj, "fps", line_no), "fps", line_no);
        m.camera_distance =
            camera_distance_from_string(field(obj, "camera_distance", line_no).get<std::string>());
        m.condition = condition_from_string(field(obj, "condition", line_no).get<std::string>());
        const auto& raised = field(obj, "eyebrows_raised", line_no);
        if (!raised.is_null()) m.eyebrows_raised = raised.get<bool>();
        m.subject = field(obj, "subject", line_no).get<std::string>();
        if (obj.contains("units")) m.units = obj.at("units").get<std::string>();
        seq.schema = schema_from_json(field(obj, "schema", line_no));
        have_header = true;
        continue;
      }

      LandmarkFrame f;
      const auto& frame = field(obj, "frame", line_no);
      if (!frame.is_number_integer()) {
        throw ParseError("line " + std::to_string(line_no) + ": 'frame' must be an integer");
      }
      f.frame_index = frame.get<std::int64_t>();
      f.time_s = finite_number(field(obj, "t", line_no), "t", line_no);
      if (auto it = obj.find("conf"); it != obj.end() && !it->is_null()) {
        f.confidence = finite_number(*it, "conf", line_no);
      }
      f.present = field(obj, "present", line_no).get<bool>();
      const auto& pts = field(obj, "pts", line_no);
      if (!pts.is_object()) {
        throw ParseError("line " + std::to_string(line_no) + ": 'pts' must be an object");
      }
      for (const auto& [key, xyz] : pts.items()) {
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(line_no) + ": bad landmark key '" + key + "'");
        }
        if (!xyz.is_array() || xyz.size() != 3) {
          throw ParseError("line " + std::to_string(line_no) + ": landmark " + key +
                           " must be [x,y,z]");
        }
        f.landmarks[idx] = Point3(finite_number(xyz[0], "x", line_no),
                                  finite_number(xyz[1], "y", line_no),
                                  finite_number(xyz[2], "z", line_no));
      }
      if (auto it = obj.find("pose"); it != obj.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 3) {
          throw ParseError("line " + std::to_string(line_no) + ": 'pose' must be [pitch,yaw,roll]");
        }
        f.pose = HeadPose{finite_number((*it)[0], "pitch", line_no),
                          finite_number((*it)[1], "yaw", line_no),
                          finite_number((*it)[2], "roll", line_no)};
      }
      if (!f.present && !f.landmarks.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": dropout frame carries points");
      }
      resolve_roles(f, seq.schema);
      seq.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("interchange file is empty");
  try {
    seq.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("interchange file violates sequence invariants: ") + e.what());
  }
  return seq;
}

}  // namespace browkit

#pragma once

#include "browkit/landmarks.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace browkit {

inline constexpr std::string_view kInterchangeVersion = "browkit/1";

struct OpenFaceOptions {
  /// Rows with confidence strictly below this are dropouts.
  double confidence_threshold = 0.75;
  /// Used when the timestamps cannot determine a frame rate.
  double fallback_fps = 30.0;
  /// Recording metadata the CSV itself does not carry. The tracker field is
  /// forced to openface.
  SequenceMeta meta;
};

/// Reads the CSV written by the OpenFace 2.x FeatureExtraction binary.
/// Uses the 3D landmark columns X_i/Y_i/Z_i (millimetres, camera space) and
/// the pose_Rx/Ry/Rz columns as pitch/yaw/roll.
LandmarkSequence parse_openface_csv(const std::filesystem::path& path,
                                    const LandmarkSchema& schema,
                                    const OpenFaceOptions& options = {});
LandmarkSequence parse_openface_csv_text(std::string_view content, const LandmarkSchema& schema,
                                         const OpenFaceOptions& options = {});

/// JSON-Lines interchange: a header object followed by one object per frame.
LandmarkSequence parse_interchange(const std::filesystem::path& path);
LandmarkSequence parse_interchange_text(std::string_view content);
void write_interchange(const LandmarkSequence& seq, const std::filesystem::path& path);
std::string interchange_text(const LandmarkSequence& seq);

nlohmann::ordered_json schema_to_json(const LandmarkSchema& schema);
LandmarkSchema schema_from_json(const nlohmann::json& j);
LandmarkSchema load_schema(const std::filesystem::path& path);

/// Schema for a tracker: `<tracker>.json` inside the directory named by the
/// BROWKIT_SCHEMA_DIR environment variable when that file exists, otherwise
/// the built-in defaults.
LandmarkSchema default_schema(Tracker tracker);

}  // namespace browkit

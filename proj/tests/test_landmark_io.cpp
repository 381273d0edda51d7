#include "browkit/error.hpp"
#include "browkit/landmark_io.hpp"
#include "browkit/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace browkit;

namespace {

const std::filesystem::path kData = BROWKIT_TEST_DATA_DIR;

// Header and rows for a CSV that only carries the landmarks the default
// OpenFace schema needs.
std::string small_csv(const std::vector<std::pair<double, Point3>>& rows) {
  const auto idx = LandmarkSchema::openface68().referenced_indices();
  std::ostringstream out;
  out << "frame, timestamp, confidence, success, pose_Rx, pose_Ry, pose_Rz";
  for (char axis : {'X', 'Y', 'Z'})
    for (int i : idx) out << ", " << axis << "_" << i;
  out << "\n";
  int frame = 1;
  for (const auto& [conf, p] : rows) {
    out << frame << ", " << (frame - 1) / 30.0 << ", " << conf << ", 1, 0.1, 0.2, 0.3";
    for (int axis = 0; axis < 3; ++axis)
      for (int i : idx) out << ", " << p(axis) + i;
    out << "\n";
    ++frame;
  }
  return out.str();
}

LandmarkSequence random_sequence(testing::Gen& g) {
  LandmarkSequence s;
  s.schema = LandmarkSchema::mediapipe468();
  s.meta.tracker = Tracker::mediapipe;
  s.meta.camera_distance = CameraDistance::far;
  s.meta.condition = Condition::polar_q;
  s.meta.eyebrows_raised = g.coin() ? std::optional<bool>(g.coin()) : std::nullopt;
  s.meta.fps = g.uniform(10, 60);
  s.meta.subject = "subj \"q\" " + std::to_string(g.integer(0, 99));
  s.meta.units = "normalized";
  const int n = g.integer(1, 12);
  for (int i = 0; i < n; ++i) {
    LandmarkFrame f;
    f.frame_index = i * 2;
    f.time_s = i / s.meta.fps;
    f.present = !g.coin(0.25);
    if (g.coin()) f.confidence = g.uniform(0, 1);
    if (f.present) {
      for (int idx : s.schema.referenced_indices()) f.landmarks[idx] = g.point(1.0) * g.uniform(1e-6, 1e3);
      if (g.coin()) f.pose = g.pose();
      resolve_roles(f, s.schema);
    }
    s.frames.push_back(f);
  }
  return s;
}

}  // namespace

TEST_CASE("openface: constant rows give identical present frames") {
  const auto seq = parse_openface_csv_text(
      small_csv({{0.98, {1, 2, 3}}, {0.98, {1, 2, 3}}, {0.98, {1, 2, 3}}}), LandmarkSchema::openface68());
  REQUIRE(seq.frames.size() == 3);
  for (const auto& f : seq.frames) {
    CHECK(f.present);
    CHECK(f.points == seq.frames[0].points);
    REQUIRE(f.pose);
    CHECK(f.pose->pitch == doctest::Approx(0.1));
    CHECK(f.pose->yaw == doctest::Approx(0.2));
    CHECK(f.pose->roll == doctest::Approx(0.3));
  }
  CHECK(seq.meta.tracker == Tracker::openface);
  CHECK(seq.meta.fps == doctest::Approx(30.0).epsilon(1e-3));
}

TEST_CASE("openface: low confidence and failed rows are dropouts, never deleted") {
  const auto seq = parse_openface_csv_text(small_csv({{0.98, {0, 0, 0}}, {0.1, {0, 0, 0}}, {0.75, {0, 0, 0}}}),
                                           LandmarkSchema::openface68());
  REQUIRE(seq.frames.size() == 3);
  CHECK(seq.frames[0].present);
  CHECK_FALSE(seq.frames[1].present);
  CHECK(seq.frames[1].points.empty());
  CHECK(seq.frames[1].landmarks.empty());
  CHECK(seq.frames[2].present);  // threshold is inclusive

  OpenFaceOptions strict;
  strict.confidence_threshold = 0.99;
  const auto all_out = parse_openface_csv_text(small_csv({{0.98, {0, 0, 0}}}), LandmarkSchema::openface68(), strict);
  CHECK_FALSE(all_out.frames[0].present);
}

TEST_CASE("openface: golden fixture reads landmark 39 as written") {
  const auto seq = parse_openface_csv(kData / "openface_small.csv", LandmarkSchema::openface68());
  REQUIRE(seq.frames.size() == 6);
  const Point3 eye = seq.frames[0].at(Role::inner_eye_L);
  CHECK(eye.x() == 10.0);
  CHECK(eye.y() == 20.0);
  CHECK(eye.z() == 500.0);
  CHECK_FALSE(seq.frames[2].present);  // confidence 0.10
  CHECK_FALSE(seq.frames[4].present);  // success 0
  CHECK(seq.frames[0].landmarks.size() == 68);
}

TEST_CASE("openface: errors name the problem") {
  const auto schema = LandmarkSchema::openface68();
  auto csv = small_csv({{0.9, {0, 0, 0}}});
  SUBCASE("missing column") {
    auto bad = csv;
    bad.replace(bad.find("Z_27"), 4, "Q_27");
    try {
      parse_openface_csv_text(bad, schema);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("Z_27") != std::string::npos);
    }
  }
  SUBCASE("missing pose") {
    auto bad = csv;
    bad.replace(bad.find("pose_Ry"), 7, "pose_Qy");
    CHECK_THROWS_AS(parse_openface_csv_text(bad, schema), SchemaError);
  }
  SUBCASE("bad cell") {
    auto bad = csv;
    const auto row_start = bad.find('\n') + 1;
    bad.replace(bad.find("0.9", row_start), 3, "abc");
    try {
      parse_openface_csv_text(bad, schema);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("confidence") != std::string::npos);
      CHECK(msg.find("row") != std::string::npos);
    }
  }
  SUBCASE("empty") { CHECK_THROWS_AS(parse_openface_csv_text("", schema), ParseError); }
}

TEST_CASE("openface: multi-index roles average their landmarks") {
  LandmarkSchema schema = LandmarkSchema::openface68();
  schema.roles[Role::inner_brow_L] = {19, 20, 21};
  const auto seq = parse_openface_csv(kData / "openface_small.csv", schema);
  const auto& f = seq.frames[1];
  const Point3 expected = (f.landmarks.at(19) + f.landmarks.at(20) + f.landmarks.at(21)) / 3.0;
  CHECK((f.at(Role::inner_brow_L) - expected).norm() < 1e-12);
}

TEST_CASE("interchange: committed fixture") {
  const auto seq = parse_interchange(kData / "mediapipe_small.jsonl");
  REQUIRE(seq.frames.size() == 4);
  CHECK(seq.meta.tracker == Tracker::mediapipe);
  CHECK(seq.meta.camera_distance == CameraDistance::close);
  CHECK(seq.meta.condition == Condition::pitch_down);
  CHECK(seq.meta.eyebrows_raised == false);
  CHECK(seq.meta.subject == "s01");
  CHECK_FALSE(seq.frames[2].present);
  CHECK(seq.frames[2].points.empty());
  const auto& f = seq.frames[0];
  const Point3 expect = (f.landmarks.at(55) + f.landmarks.at(107)) / 2.0;
  CHECK((f.at(Role::inner_brow_L) - expect).norm() < 1e-15);
}

TEST_CASE("interchange: round trip of random sequences") {
  testing::Gen g(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_sequence(g);
    const auto text = interchange_text(s);
    const auto r = parse_interchange_text(text);
    REQUIRE(r.frames.size() == s.frames.size());
    CHECK(r.meta.tracker == s.meta.tracker);
    CHECK(r.meta.camera_distance == s.meta.camera_distance);
    CHECK(r.meta.condition == s.meta.condition);
    CHECK(r.meta.eyebrows_raised == s.meta.eyebrows_raised);
    CHECK(r.meta.subject == s.meta.subject);
    CHECK(r.meta.units == s.meta.units);
    CHECK(r.meta.fps == s.meta.fps);
    CHECK(r.schema.roles == s.schema.roles);
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      const auto& a = s.frames[i];
      const auto& b = r.frames[i];
      CHECK(a.frame_index == b.frame_index);
      CHECK(a.time_s == b.time_s);
      CHECK(a.present == b.present);
      CHECK(a.confidence == b.confidence);
      CHECK(a.pose == b.pose);
      REQUIRE(a.landmarks.size() == b.landmarks.size());
      for (const auto& [idx, p] : a.landmarks) CHECK((b.landmarks.at(idx) - p).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(interchange_text(r) == text);
  }
}

TEST_CASE("interchange: format details") {
  LandmarkSequence s;
  s.schema = LandmarkSchema::openface68();
  LandmarkFrame f;
  for (int idx : s.schema.referenced_indices()) f.landmarks[idx] = Point3(idx, 1, 2);
  resolve_roles(f, s.schema);
  s.frames.push_back(f);
  auto text = interchange_text(s);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  s.frames.clear();
  CHECK_THROWS_AS(interchange_text(s), InvalidArgument);

  LandmarkFrame drop;
  drop.present = false;
  s.frames.push_back(drop);
  text = interchange_text(s);
  CHECK(text.find("\"present\":false") != std::string::npos);
  const auto back = parse_interchange_text(text);
  CHECK_FALSE(back.frames[0].present);
}

TEST_CASE("interchange: header and line errors") {
  const auto good = text::read_file(kData / "mediapipe_small.jsonl");
  const auto nl = good.find('\n');
  auto header = nlohmann::json::parse(good.substr(0, nl));
  const auto rest = good.substr(nl);

  SUBCASE("missing fps") {
    header.erase("fps");
    try {
      parse_interchange_text(header.dump() + rest);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("fps") != std::string::npos);
    }
  }
  SUBCASE("version") {
    header["version"] = "browkit/2";
    CHECK_THROWS_AS(parse_interchange_text(header.dump() + rest), UnsupportedVersionError);
  }
  SUBCASE("malformed line") {
    try {
      parse_interchange_text(good + "{\"frame\": 9, \n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
  }
  SUBCASE("unwritable path") {
    const auto seq = parse_interchange_text(good);
    CHECK_THROWS_AS(write_interchange(seq, "/nonexistent-dir/x/y.jsonl"), IoError);
  }
}

TEST_CASE("schema: defaults, files and environment override") {
  const auto of = LandmarkSchema::openface68();
  CHECK(of.roles.at(Role::inner_eye_L) == std::vector<int>{39});
  CHECK(of.roles.at(Role::inner_eye_R) == std::vector<int>{42});
  CHECK(of.roles.at(Role::upper_nose) == std::vector<int>{27});

  LandmarkSchema bad = of;
  bad.roles.erase(Role::upper_nose);
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  bad = of;
  bad.roles[Role::upper_nose] = {27, 27};
  CHECK_THROWS_AS(bad.validate(), SchemaError);

  const auto shipped = load_schema(std::filesystem::path(BROWKIT_SCHEMA_DIR) / "mediapipe.json");
  CHECK(shipped.roles == LandmarkSchema::mediapipe468().roles);

  testing::TempDir dir("schema");
  LandmarkSchema custom = of;
  custom.roles[Role::upper_nose] = {28};
  text::atomic_write(dir / "openface.json", schema_to_json(custom).dump());
  ::setenv("BROWKIT_SCHEMA_DIR", dir.path().c_str(), 1);
  CHECK(default_schema(Tracker::openface).roles.at(Role::upper_nose) == std::vector<int>{28});
  CHECK(default_schema(Tracker::mediapipe).roles == LandmarkSchema::mediapipe468().roles);
  ::unsetenv("BROWKIT_SCHEMA_DIR");
  CHECK(default_schema(Tracker::openface).roles == of.roles);
}

#include "browkit/error.hpp"
#include "browkit/report.hpp"
#include "browkit/text.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace browkit;
using testing::make_trace;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(text::split_csv_line(line));
  return rows;
}

BrowTrace tagged(std::vector<std::optional<double>> v, Tracker tracker, CameraDistance dist, std::string video) {
  auto t = make_trace(v);
  t.meta.tracker = tracker;
  t.meta.camera_distance = dist;
  t.meta.condition = Condition::pitch_up;
  t.meta.eyebrows_raised = false;
  t.meta.subject = "s1";
  t.video = std::move(video);
  for (std::size_t i = 0; i < t.records.size(); ++i)
    if (t.records[i].sample) t.records[i].sample->pose.pitch = -0.01 * static_cast<double>(i);
  return t;
}

}  // namespace

TEST_CASE("trace CSV round trip with sidecar") {
  auto t = tagged({1.5, std::nullopt, 2.25, 3.0}, Tracker::mediapipe, CameraDistance::far, "v1");
  t.meta.fps = 25.0;
  const auto csv = trace_csv(t);
  const auto rows = csv_rows(csv);
  CHECK(rows[0] == std::vector<std::string>{"frame", "t", "inner", "outer", "pitch", "yaw", "roll", "present"});
  CHECK(rows[2][2].empty());
  CHECK(rows[2][7] == "0");
  CHECK(rows[1][7] == "1");

  testing::TempDir dir("trace");
  write_trace(t, dir / "v1.trace.csv");
  CHECK(trace_meta_path(dir / "v1.trace.csv") == dir / "v1.trace.meta.json");
  const auto back = read_trace(dir / "v1.trace.csv");
  CHECK(back.meta.tracker == Tracker::mediapipe);
  CHECK(back.meta.camera_distance == CameraDistance::far);
  CHECK(back.meta.eyebrows_raised == false);
  CHECK(back.meta.fps == 25.0);
  CHECK(back.video == "v1");
  REQUIRE(back.records.size() == 4);
  CHECK_FALSE(back.records[1].present());
  CHECK(back.records[2].sample->inner == 2.25);
  CHECK(back.records[3].sample->pose.pitch == doctest::Approx(-0.03).epsilon(1e-12));

  CHECK_THROWS_AS(parse_trace_csv("frame,t,inner\n1,0,2\n"), SchemaError);
  CHECK_THROWS_AS(parse_trace_csv("frame,t,inner,outer,pitch,yaw,roll,present\n1,0,x,1,0,0,0,1\n"), ParseError);
}

TEST_CASE("deviation report rows and pairwise comparisons") {
  std::vector<BrowTrace> traces{
      tagged({0.1, 0.2, 0.4, 0.3, 0.2}, Tracker::openface, CameraDistance::close, "of_close"),
      tagged({0.5, 0.1, 0.9, 0.7, 0.6}, Tracker::openface, CameraDistance::close, "of_close2"),
      tagged({0.2, 0.25, 0.3, 0.1, 0.2}, Tracker::mediapipe, CameraDistance::close, "mph_close"),
      tagged({0.7, 0.2, 0.3, 0.1, 0.9}, Tracker::mediapipe, CameraDistance::close, "mph_close2"),
  };
  traces[1].meta.subject = "s2";
  traces[3].meta.subject = "s2";
  const auto report = build_deviation_report(traces);
  // Four videos x two kinds plus two pairs x two kinds.
  CHECK(report.rows.size() == 12);
  int pairs = 0;
  for (const auto& r : report.rows) {
    CHECK(r.deviation >= -1.0);
    if (r.tracker.find("_vs_") != std::string::npos) {
      ++pairs;
      CHECK(r.tracker == "mediapipe_vs_openface");
      REQUIRE(r.test);
      CHECK(r.test->n2 > 0);
    } else {
      CHECK(r.deviation >= 0.0);
      CHECK(r.deviation <= 1.0);
      CHECK(r.n == 5);
    }
  }
  CHECK(pairs == 4);

  const auto csv = deviation_csv(report);
  const auto rows = csv_rows(csv);
  CHECK(rows[0][0] == "video");
  CHECK(rows[0][5] == "deviation");
  CHECK(rows[0][7] == "t_stat");
  CHECK(rows[0][9] == "p_value");
  CHECK(rows.size() == 13);

  traces[0].meta.camera_distance = CameraDistance::unknown;
  CHECK_THROWS_AS(build_deviation_report(traces), InvalidArgument);
}

TEST_CASE("deviation report handles flat groups") {
  std::vector<BrowTrace> traces{tagged({0.3, 0.3, 0.3}, Tracker::custom, CameraDistance::middle, "flat")};
  const auto report = build_deviation_report(traces);
  REQUIRE(report.rows.size() == 2);
  for (const auto& r : report.rows) {
    CHECK(r.deviation == 0.0);
    CHECK_FALSE(r.test.has_value());
  }
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("aggregate CSV") {
  const std::vector<BrowTrace> pair{make_trace({0.0, 0.0}), make_trace({1.0, std::nullopt})};
  const auto a = aggregate_condition(pair, BrowKind::inner, "polar_q");
  const auto rows = csv_rows(aggregate_csv({a}));
  CHECK(rows[0] == std::vector<std::string>{"group", "brow_kind", "x", "mean", "sd", "n"});
  CHECK(rows[1][0] == "polar_q");
  CHECK(rows[1][3] == "0.5");
  CHECK(rows[2][3] == "0");
  CHECK(rows[2][5] == "1");
}

TEST_CASE("plot output") {
  PlotSeries a{"a", {0, 1, 2, 3, 4}, {1.0, 2.0, std::nullopt, 3.0, 2.0}};
  PlotSeries b{"b", {0, 1, 2}, {0.5, 0.6, 0.7}};
  const auto csv = plot_long_csv({a, b});
  const auto rows = csv_rows(csv);
  CHECK(rows.size() == 1 + 5 + 3);
  CHECK(rows[3][2].empty());

  const auto svg = plot_svg({b}, "one");
  CHECK(svg.rfind("<svg", 0) == 0);
  auto count = [](const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count(svg, "<polyline") == 1);
  CHECK(count(plot_svg({a, b}, "two"), "<polyline") == 3);  // the gap splits a
  PlotSeries c{"c", {0, 1}, {1.0, 2.0}};
  CHECK(count(plot_svg({b, c}, "two"), "<polyline") == 2);
}

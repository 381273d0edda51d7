// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include "browkit/commands.hpp"
#include "browkit/error.hpp"
#include "browkit/geometry.hpp"
#include "browkit/report.hpp"
#include "browkit/stats.hpp"
#include "browkit/synth.hpp"
#include "browkit/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

using namespace browkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::skip, std::move(d)}; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Closest point on the line by coarse grid then repeated local refinement.
double grid_distance(const Point3& p, const Point3& a, const Point3& b) {
  const Eigen::Vector3d d = b - a;
  auto dist = [&](double t) { return (a + t * d - p).norm(); };
  double best_t = 0.0;
  double best = dist(0.0);
  for (int i = -2000; i <= 2000; ++i) {
    const double t = i * 0.01;
    if (dist(t) < best) {
      best = dist(t);
      best_t = t;
    }
  }
  double step = 0.01;
  while (step > 1e-13) {
    for (int i = -10; i <= 10; ++i) {
      const double t = best_t + i * step;
      if (dist(t) < best) {
        best = dist(t);
        best_t = t;
      }
    }
    step /= 10.0;
  }
  return best;
}

Outcome geometry_oracle() {
  testing::Gen g(1001);
  std::vector<std::array<Point3, 3>> triples;
  while (triples.size() < 1000) {
    Point3 a = g.point(), b = g.point();
    if ((b - a).norm() < 0.5) continue;
    // Keep the foot of the perpendicular inside the coarse grid span.
    const double t = g.uniform(-15.0, 15.0);
    Eigen::Vector3d off = g.point();
    off -= off.dot(b - a) / (b - a).squaredNorm() * (b - a);
    triples.push_back({a + t * (b - a) + off, a, b});
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> got;
  for (const auto& [p, a, b] : triples) got.push_back(point_to_line_distance(p, a, b));
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& [p, a, b] = triples[i];
    worst = std::max(worst, std::abs(got[i] - grid_distance(p, a, b)));
  }
  const std::string d = "max |err| " + fmt(worst) + ", " + fmt(elapsed) + " s for 1000 triples";
  return worst <= 1e-6 && elapsed < 1.0 ? pass(d) : fail(d);
}

LandmarkFrame random_face(testing::Gen& g) {
  std::map<Role, Point3> pts;
  for (auto r : kAllRoles) pts[r] = g.point(5.0);
  return testing::role_frame(pts);
}

LandmarkFrame moved(const LandmarkFrame& f, const RotationMatrix& r, const Eigen::Vector3d& t) {
  LandmarkFrame out = f;
  for (auto& [role, p] : out.points) p = r * p + t;
  for (auto& [i, p] : out.landmarks) p = r * p + t;
  return out;
}

Outcome rotation_round_trip() {
  testing::Gen g(2002);
  double worst_derotate = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto local = random_face(g);
    const auto pose = g.pose(1.5);
    const auto posed = moved(local, euler_to_matrix(pose), g.point(50.0));
    const auto back = derotate_and_center(posed, pose);
    for (auto role : kAllRoles) {
      const Point3 want = local.at(role) - local.at(Role::upper_nose);
      worst_derotate = std::max(worst_derotate, (back->at(role) - want).norm());
    }
  }
  double worst_angle = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto ref = random_face(g);
    // Yaw strictly inside the Euler chart.
    const HeadPose pose{g.uniform(-testing::kPi / 2, testing::kPi / 2), g.uniform(-1.55, 1.55),
                        g.uniform(-testing::kPi / 2, testing::kPi / 2)};
    const auto est = estimate_pose_rigid(moved(ref, euler_to_matrix(pose), g.point(50.0)), ref);
    worst_angle = std::max({worst_angle, std::abs(est.pitch - pose.pitch), std::abs(est.yaw - pose.yaw),
                            std::abs(est.roll - pose.roll)});
  }
  const std::string d = "derotate max err " + fmt(worst_derotate) + ", rigid angle max err " + fmt(worst_angle);
  return worst_derotate <= 1e-9 && worst_angle <= 1e-6 ? pass(d) : fail(d);
}

synth::MotionScript random_script(testing::Gen& g) {
  synth::MotionScript s;
  s.frames = g.integer(30, 120);
  auto profile = [&](double limit) {
    const int start = g.integer(0, s.frames / 3);
    const int end = g.integer(2 * s.frames / 3, s.frames - 1);
    const int peak = g.integer(start + 1, end - 1);
    return synth::Profile{g.coin() ? synth::Profile::Shape::raised_cosine : synth::Profile::Shape::linear, start,
                          peak, end, g.uniform(-limit, limit)};
  };
  s.pitch = profile(0.5);
  s.yaw = profile(0.5);
  s.roll = profile(0.3);
  s.brows.kind = synth::BrowProfile::Kind::neutral;
  return s;
}

Outcome rigid_invariance() {
  testing::Gen g(3003);
  double worst = 0.0;
  std::vector<BrowTrace> traces;
  for (int i = 0; i < 40; ++i) {
    synth::GenerateOptions o;
    o.camera_distance = CameraDistance::middle;
    o.condition = Condition::pitch_up;
    o.subject = "s" + std::to_string(i);
    synth::DistortionSpec none;
    // Half the scripts go through the rigid pose estimate.
    none.emit_pose = g.coin();
    const auto gen = synth::generate(synth::FaceTemplate::standard(), random_script(g), none, 100 + i, o);
    auto t = synth::trace_of(gen.observed);
    t.video = o.subject;
    for (auto kind : {BrowKind::inner, BrowKind::outer})
      for (auto v : {DeviationVariant::rms, DeviationVariant::sd_of_differences, DeviationVariant::mean_abs})
        worst = std::max(worst, deviation(t, kind, 1, v));
    traces.push_back(std::move(t));
  }
  for (const auto& row : build_deviation_report(traces).rows) worst = std::max(worst, std::abs(row.deviation));
  const std::string d = "max deviation " + fmt(worst) + " over 40 scripts";
  return worst < 1e-9 ? pass(d) : fail(d);
}

synth::ScenarioSpec linear_scenario(testing::Gen& g, double noise, std::uint64_t seed) {
  synth::ScenarioSpec spec;
  auto& s = spec.scenario;
  s.name = "linear";
  s.seed = seed;
  s.options.camera_distance = CameraDistance::middle;
  s.script.frames = 90;
  s.script.pitch = {synth::Profile::Shape::raised_cosine, 10, 45, 80, g.uniform(-0.4, -0.2)};
  s.script.yaw = {synth::Profile::Shape::linear, 5, 40, 85, g.uniform(-0.3, 0.3)};
  s.script.brows.kind = synth::BrowProfile::Kind::raised;
  s.distortion.kind = synth::DistortionSpec::Kind::custom;
  s.distortion.coefficients = {{Feature::pitch, g.uniform(0.4, 1.2)}, {Feature::yaw, g.uniform(-0.5, 0.5)}};
  s.distortion.noise_sigma = noise;
  synth::CorrectionPlan plan;
  plan.features = {Feature::pitch, Feature::yaw};
  for (int k = 0; k < 3; ++k) {
    auto train = s;
    train.name = "train" + std::to_string(k);
    train.seed = seed + 1 + k;
    train.script.brows.kind = synth::BrowProfile::Kind::neutral;
    train.script.pitch.peak_value = g.uniform(-0.4, 0.4);
    train.script.yaw.peak_value = g.uniform(-0.4, 0.4);
    train.script.yaw.peak = g.integer(20, 60);
    plan.train.push_back(train);
  }
  spec.correction = plan;
  return spec;
}

Outcome correction_recovery() {
  testing::Gen g(4004);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_clean = 0.0, worst_noisy = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (double noise : {0.0, 0.01}) {
      const auto res = synth::run_scenario(linear_scenario(g, noise, 50 + 10 * i));
      for (const auto& [kind, card] : res.scores) {
        const double r = card.improvement_ratio.value_or(1e9);
        (noise == 0.0 ? worst_clean : worst_noisy) = std::max(noise == 0.0 ? worst_clean : worst_noisy, r);
      }
    }
  }
  // The shipped example scenario as well.
  const auto example =
      synth::scenarios_from_json(nlohmann::json::parse(text::read_file(fs::path(BROWKIT_EXAMPLES_DIR) /
                                                                       "correction_linear.json")));
  for (const auto& spec : example)
    for (const auto& [kind, card] : synth::run_scenario(spec).scores)
      worst_clean = std::max(worst_clean, card.improvement_ratio.value_or(1e9));
  const double elapsed = seconds_since(t0);
  const std::string d = "worst ratio noise-free " + fmt(worst_clean) + ", sigma 0.01 " + fmt(worst_noisy) + ", " +
                        fmt(elapsed) + " s";
  return worst_clean < 0.05 && worst_noisy < 0.3 && elapsed < 5.0 ? pass(d) : fail(d);
}

Outcome stats_oracle() {
  testing::Gen g(5005);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = g.integer(3, 40);
    std::vector<double> xs(n);
    const double shift = g.uniform(-1.0, 1.0);
    const double sd = g.uniform(0.1, 3.0);
    for (auto& x : xs) x = shift + g.normal(sd);
    double got = 0.0;
    oracle::TestValue want{};
    if (i % 2 == 0) {
      got = stats::t_one_sample(xs, 0.0).p;
      want = oracle::one_sample(xs, 0.0);
    } else {
      std::vector<double> ys(g.integer(3, 40));
      const double sd2 = g.uniform(0.1, 3.0);
      for (auto& y : ys) y = g.normal(sd2);
      got = stats::t_welch(xs, ys).p;
      want = oracle::welch(xs, ys);
    }
    worst = std::max(worst, std::abs(got - want.p));
  }
  double worst_identity = 0.0;
  for (double df : {1.0, 2.5, 7.0, 30.0, 400.0}) {
    worst_identity = std::max(worst_identity, std::abs(stats::student_t_two_sided_p(0.0, df) - 1.0));
    for (double t : {0.3, 1.7, 4.2, 11.0})
      worst_identity = std::max(worst_identity, std::abs(stats::student_t_two_sided_p(t, df) -
                                                          stats::student_t_two_sided_p(-t, df)));
  }
  const std::string d = "max p error " + fmt(worst) + " over 50 datasets, identities " + fmt(worst_identity);
  return worst <= 1e-8 && worst_identity <= 1e-12 ? pass(d) : fail(d);
}

Outcome distortion_direction() {
  struct Case {
    synth::DistortionSpec::Kind kind;
    double pitch;
    bool lower;
  };
  const Case cases[] = {{synth::DistortionSpec::Kind::mph_like, -0.3, true},
                        {synth::DistortionSpec::Kind::mph_like, 0.3, false},
                        {synth::DistortionSpec::Kind::of_like, -0.3, false},
                        {synth::DistortionSpec::Kind::of_like, 0.3, true}};
  int ok = 0, total = 0;
  for (const auto& c : cases) {
    for (auto brows : {synth::BrowProfile::Kind::neutral, synth::BrowProfile::Kind::raised}) {
      for (bool interaction : {false, true}) {
        if (interaction && c.kind != synth::DistortionSpec::Kind::mph_like) continue;
        synth::MotionScript s;
        s.pitch = {synth::Profile::Shape::raised_cosine, 10, 45, 80, c.pitch};
        s.brows.kind = brows;
        synth::DistortionSpec d;
        d.kind = c.kind;
        d.brow_interaction = interaction;
        const auto obs = synth::trace_of(synth::generate(synth::FaceTemplate::standard(), s, d, 6).observed);
        for (auto kind : {BrowKind::inner, BrowKind::outer}) {
          ++total;
          const double peak = obs.records[45].sample->value(kind);
          const double base = obs.records[0].sample->value(kind);
          if ((peak < base) == c.lower && peak != base) ++ok;
        }
      }
    }
  }
  const std::string d = std::to_string(ok) + "/" + std::to_string(total) + " sign checks";
  return ok == total ? pass(d) : fail(d);
}

// Published deviation cells: (distance, pitch condition, tracker, kind) -> value.
using CellKey = std::tuple<std::string, std::string, std::string, std::string>;

std::map<CellKey, double> published_table(bool raised) {
  const char* rows[] = {"close pitch_down", "close pitch_up",  "far pitch_down",
                        "far pitch_up",     "middle pitch_down", "middle pitch_up"};
  static const double t1[6][4] = {{.103, .079, .19, .066}, {.117, .224, .097, .265}, {.1, .053, .098, .054},
                                  {.109, .2, .08, .209},   {.097, .062, .161, .054}, {.096, .211, .064, .26}};
  static const double t2[6][4] = {{.146, .079, .211, .178}, {.322, .24, .374, .261}, {.131, .074, .138, .102},
                                  {.268, .096, .201, .097}, {.118, .098, .097, .13},  {.273, .128, .244, .145}};
  const char* cols[4][2] = {{"mediapipe", "inner"}, {"openface", "inner"}, {"mediapipe", "outer"}, {"openface", "outer"}};
  std::map<CellKey, double> out;
  for (int r = 0; r < 6; ++r) {
    std::istringstream in(rows[r]);
    std::string dist, cond;
    in >> dist >> cond;
    for (int c = 0; c < 4; ++c) out[{dist, cond, cols[c][0], cols[c][1]}] = (raised ? t2 : t1)[r][c];
  }
  return out;
}

// Mean deviation per table cell from a deviations.csv, split by eyebrow state.
std::map<bool, std::map<CellKey, double>> measured_cells(const std::string& csv) {
  std::map<bool, std::map<CellKey, std::pair<double, int>>> sums;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto c = text::split_csv_line(line);
    if (c[1].find("_vs_") != std::string::npos || c[10].empty()) continue;
    auto& s = sums[c[10] == "true"][{c[2], c[3], c[1], c[4]}];
    s.first += *text::parse_double(c[5]);
    ++s.second;
  }
  std::map<bool, std::map<CellKey, double>> out;
  for (const auto& [raised, cells] : sums)
    for (const auto& [key, s] : cells) out[raised][key] = s.first / s.second;
  return out;
}

Outcome table_reproduction() {
  const char* dir = std::getenv("BROWKIT_OSF_DIR");
  if (dir == nullptr || !fs::exists(fs::path(dir) / "manifest.csv"))
    return skip("BROWKIT_OSF_DIR not set or has no manifest.csv");
  const fs::path root(dir);
  cli::RunConfig cfg;
  cfg.manifest = (root / "manifest.csv").string();
  {
    std::istringstream in(text::read_file(root / "manifest.csv"));
    std::string line;
    std::getline(in, line);
    const auto header = text::split_csv_line(line);
    const auto col = std::find(header.begin(), header.end(), "path") - header.begin();
    while (std::getline(in, line))
      if (!line.empty()) cfg.inputs.push_back((root / text::split_csv_line(line).at(col)).string());
  }
  const auto table1 = published_table(false);
  const auto table2 = published_table(true);
  std::string best_name;
  double best_err = std::numeric_limits<double>::infinity();
  bool best_pattern = false;
  int best_missing = 0;
  testing::TempDir tmp("osf");
  for (const std::string variant : {"rms", "sd", "mean_abs"}) {
    cfg.deviation_variant = variant;
    cfg.output_dir = (tmp / variant).string();
    std::ostringstream log;
    if (cli::cmd_deviations(cfg, log) != 0) return fail("cmd_deviations failed: " + log.str());
    auto cells = measured_cells(text::read_file(tmp / variant / "deviations.csv"));
    double err = 0.0;
    int missing = 0;
    for (const auto& [key, want] : table1) {
      const auto it = cells[false].find(key);
      if (it == cells[false].end()) {
        ++missing;
        err = std::numeric_limits<double>::infinity();
      } else {
        err = std::max(err, std::abs(it->second - want));
      }
    }
    bool pattern = true;
    for (bool raised : {false, true}) {
      for (const auto& [key, want] : raised ? table2 : table1) {
        if (std::get<2>(key) != "mediapipe") continue;
        const CellKey other{std::get<0>(key), std::get<1>(key), "openface", std::get<3>(key)};
        const auto& table = raised ? table2 : table1;
        auto& got = cells[raised];
        if (!got.count(key) || !got.count(other)) {
          pattern = false;
          continue;
        }
        pattern = pattern && ((want > table.at(other)) == (got.at(key) > got.at(other)));
      }
    }
    if (best_name.empty() || err < best_err) {
      best_err = err;
      best_missing = missing;
      best_name = variant;
      best_pattern = pattern;
    }
  }
  const std::string d = "best variant " + best_name + ", max cell error " + fmt(best_err) + ", " +
                        std::to_string(best_missing) + " of 24 cells missing" +
                        (best_pattern ? ", dominance pattern matches" : ", dominance pattern differs");
  return best_err <= 0.02 && best_pattern ? pass(d) : fail(d);
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = text::read_file(e.path());
  return out;
}

Outcome determinism() {
  testing::TempDir tmp("determinism");
  auto run = [&](const std::string& tag) {
    const fs::path out = tmp / tag;
    std::ostringstream log;
    int rc = 0;
    for (const char* scenario : {"correction_linear.json", "mph_pitch_up.json"}) {
      cli::RunConfig cfg;
      cfg.scenario = (fs::path(BROWKIT_EXAMPLES_DIR) / scenario).string();
      cfg.output_dir = (out / "synth").string();
      rc |= cli::cmd_synth(cfg, log);
    }
    cli::RunConfig cfg;
    cfg.inputs = {(out / "synth/*.observed.jsonl").string()};
    cfg.output_dir = (out / "extract").string();
    cfg.derotated = true;
    rc |= cli::cmd_extract(cfg, log);
    cfg.inputs = {(out / "extract/*.trace.csv").string()};
    cfg.output_dir = (out / "dev").string();
    rc |= cli::cmd_deviations(cfg, log);
    cfg.output_dir = (out / "agg").string();
    rc |= cli::cmd_aggregate(cfg, log);
    cfg.output_dir = (out / "plot").string();
    rc |= cli::cmd_plot_data(cfg, log);
    cfg.inputs = {(out / "synth/linear_raised.observed.trace.csv").string()};
    cfg.models = {(out / "synth/linear_raised.model.*.json").string()};
    cfg.output_dir = (out / "correct").string();
    rc |= cli::cmd_correct(cfg, log);
    return std::make_pair(rc, directory_bytes(out));
  };
  const auto [rc_a, a] = run("a");
  const auto [rc_b, b] = run("b");
  if (rc_a != 0 || rc_b != 0) return fail("a command failed");
  const std::string d = std::to_string(a.size()) + " files compared across two runs";
  return a == b && a.size() > 10 ? pass(d) : fail(d);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"geometry oracle equivalence", geometry_oracle},
      {"rotation round-trip", rotation_round_trip},
      {"rigid invariance", rigid_invariance},
      {"correction recovery", correction_recovery},
      {"statistics oracle", stats_oracle},
      {"distortion direction", distortion_direction},
      {"published deviation tables", table_reproduction},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::fail ? "FAIL" : "SKIP";
    if (o.status == Outcome::Status::fail) ++failures;
    std::cout << tag << "  " << name << "  (" << o.detail << ")\n";
  }
  return failures == 0 ? 0 : 1;
}

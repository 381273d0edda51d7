#include "browkit/commands.hpp"
#include "browkit/correction.hpp"
#include "browkit/error.hpp"
#include "browkit/geometry.hpp"
#include "browkit/landmark_io.hpp"
#include "browkit/metrics.hpp"
#include "browkit/report.hpp"
#include "browkit/stats.hpp"
#include "browkit/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <sstream>

namespace py = pybind11;
using namespace browkit;

namespace {

using Rows3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

py::dict test_dict(const stats::TTestResult& r) {
  py::dict d;
  d["t"] = r.t;
  d["df"] = r.df;
  d["p"] = r.p;
  d["n1"] = r.n1;
  d["n2"] = r.n2;
  d["mean1"] = r.mean1;
  d["mean2"] = r.mean2;
  d["sd1"] = r.sd1;
  d["sd2"] = r.sd2;
  return d;
}

py::dict meta_dict(const SequenceMeta& m) {
  py::dict d;
  d["tracker"] = std::string(to_string(m.tracker));
  d["camera_distance"] = std::string(to_string(m.camera_distance));
  d["condition"] = std::string(to_string(m.condition));
  d["eyebrows_raised"] = m.eyebrows_raised ? py::cast(*m.eyebrows_raised) : py::none();
  d["fps"] = m.fps;
  d["subject"] = m.subject;
  d["units"] = m.units;
  return d;
}

// Column arrays with NaN in absent frames.
py::dict trace_dict(const BrowTrace& t) {
  const auto n = static_cast<py::ssize_t>(t.records.size());
  py::array_t<std::int64_t> frame(n);
  py::array_t<bool> present(n);
  py::array_t<double> time(n);
  std::map<std::string, py::array_t<double>> cols;
  for (auto c : {Channel::inner, Channel::outer, Channel::pitch, Channel::yaw, Channel::roll})
    cols.emplace(std::string(to_string(c)), py::array_t<double>(n));
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& r = t.records[static_cast<std::size_t>(i)];
    frame.mutable_at(i) = r.frame_index;
    present.mutable_at(i) = r.present();
    time.mutable_at(i) = r.t;
    for (auto c : {Channel::inner, Channel::outer, Channel::pitch, Channel::yaw, Channel::roll})
      cols.at(std::string(to_string(c))).mutable_at(i) = r.sample ? r.sample->value(c) : std::nan("");
  }
  py::dict d;
  d["video"] = t.video;
  d["frame"] = frame;
  d["t"] = time;
  d["present"] = present;
  for (auto& [name, arr] : cols) d[py::str(name)] = arr;
  d["meta"] = meta_dict(t.meta);
  return d;
}

BrowTrace trace_from_values(const std::vector<double>& inner, double fps) {
  BrowTrace t;
  t.meta.fps = fps;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    TraceRecord r;
    r.frame_index = static_cast<std::int64_t>(i);
    r.t = static_cast<double>(i) / fps;
    if (std::isfinite(inner[i])) r.sample = TraceSample{inner[i], inner[i], {}};
    t.records.push_back(r);
  }
  return t;
}

cli::RunConfig config_from(const py::dict& config) {
  cli::RunConfig cfg;
  const auto json_mod = py::module_::import("json");
  const std::string text = py::str(json_mod.attr("dumps")(config));
  cli::apply_config_json(cfg, nlohmann::json::parse(text));
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_browkit, m) {
  m.doc() = "Eyebrow position measurement from facial landmark time series.";

  auto base = py::register_exception<Error>(m, "BrowkitError", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<IllConditionedError>(m, "IllConditionedError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  m.def("point_to_line_distance", &point_to_line_distance, py::arg("p"), py::arg("a"), py::arg("b"));

  m.def(
      "euler_to_matrix",
      [](double pitch, double yaw, double roll) { return Eigen::Matrix3d(euler_to_matrix({pitch, yaw, roll})); },
      py::arg("pitch"), py::arg("yaw"), py::arg("roll"));
  m.def(
      "matrix_to_euler",
      [](const Eigen::Matrix3d& r) {
        const auto p = matrix_to_euler(r);
        return py::make_tuple(p.pitch, p.yaw, p.roll);
      },
      py::arg("r"));
  m.def(
      "kabsch_rotation",
      [](const Rows3& from, const Rows3& to) {
        std::vector<Point3> a, b;
        for (Eigen::Index i = 0; i < from.rows(); ++i) a.emplace_back(from.row(i).transpose());
        for (Eigen::Index i = 0; i < to.rows(); ++i) b.emplace_back(to.row(i).transpose());
        return Eigen::Matrix3d(kabsch_rotation(a, b));
      },
      py::arg("source"), py::arg("target"));

  m.def(
      "read_landmarks",
      [](const std::filesystem::path& path, const py::dict& config) {
        const auto seq = cli::load_sequence(path, config_from(config));
        py::list frames;
        for (const auto& f : seq.frames) {
          py::dict d;
          d["frame"] = f.frame_index;
          d["t"] = f.time_s;
          d["present"] = f.present;
          py::dict roles;
          for (const auto& [role, p] : f.points) roles[py::str(std::string(to_string(role)))] = Eigen::Vector3d(p);
          d["roles"] = roles;
          if (f.pose) d["pose"] = py::make_tuple(f.pose->pitch, f.pose->yaw, f.pose->roll);
          frames.append(d);
        }
        py::dict out;
        out["meta"] = meta_dict(seq.meta);
        out["frames"] = frames;
        return out;
      },
      py::arg("path"), py::arg("config") = py::dict(),
      "Landmark file (OpenFace CSV or interchange JSONL) resolved to roles.");
  m.def(
      "load_trace",
      [](const std::filesystem::path& path, const py::dict& config) {
        return trace_dict(cli::load_trace(path, config_from(config)));
      },
      py::arg("path"), py::arg("config") = py::dict(),
      "Per-frame eyebrow distances and pose from a landmark file or trace CSV.");

  m.def(
      "deviation",
      [](const std::vector<double>& values, std::size_t baseline_window, const std::string& variant) {
        return deviation(trace_from_values(values, 30.0), BrowKind::inner, baseline_window,
                         deviation_variant_from_string(variant));
      },
      py::arg("values"), py::arg("baseline_window") = 1, py::arg("variant") = "rms",
      "Deviation of a unit-scaled series from its baseline. NaN marks absent frames.");
  m.def(
      "normalize_time",
      [](const std::vector<double>& values, std::size_t n, std::optional<std::size_t> max_gap) {
        const auto out = normalize_time(trace_from_values(values, 30.0), n, max_gap);
        std::vector<double> v;
        for (const auto& r : out.records) v.push_back(r.sample ? r.sample->inner : std::nan(""));
        return v;
      },
      py::arg("values"), py::arg("n") = kDefaultNormalizedLength, py::arg("max_gap") = py::none());

  m.def("student_t_two_sided_p", &stats::student_t_two_sided_p, py::arg("t"), py::arg("df"));
  m.def(
      "t_one_sample",
      [](const std::vector<double>& xs, double mu0) { return test_dict(stats::t_one_sample(xs, mu0)); },
      py::arg("xs"), py::arg("mu0") = 0.0);
  m.def(
      "t_welch",
      [](const std::vector<double>& xs, const std::vector<double>& ys) { return test_dict(stats::t_welch(xs, ys)); },
      py::arg("xs"), py::arg("ys"));

  m.def(
      "run_scenario",
      [](const std::string& scenario_json) {
        py::list out;
        for (const auto& spec : synth::scenarios_from_json(nlohmann::json::parse(scenario_json))) {
          const auto res = synth::run_scenario(spec);
          py::dict d;
          d["name"] = spec.scenario.name;
          d["truth"] = trace_dict(res.truth_trace);
          d["observed"] = trace_dict(res.observed_trace);
          py::dict scores;
          for (const auto& [kind, card] : res.scores) {
            py::dict s;
            s["rmse_uncorrected"] = card.rmse_uncorrected;
            s["rmse_corrected"] = card.rmse_corrected;
            s["improvement_ratio"] = card.improvement_ratio ? py::cast(*card.improvement_ratio) : py::none();
            s["n"] = card.n;
            scores[py::str(std::string(to_string(kind)))] = s;
          }
          d["scores"] = scores;
          py::dict models;
          for (const auto& [kind, model] : res.models)
            models[py::str(std::string(to_string(kind)))] = model_to_json(model).dump();
          d["models"] = models;
          out.append(d);
        }
        return out;
      },
      py::arg("scenario_json"), "Runs a synthetic scenario file given as JSON text.");

  m.def(
      "run_command",
      [](const std::string& command, const py::dict& config) {
        const auto cfg = config_from(config);
        std::ostringstream log;
        int rc = 0;
        {
          py::gil_scoped_release release;
          if (command == "extract") rc = cli::cmd_extract(cfg, log);
          else if (command == "deviations") rc = cli::cmd_deviations(cfg, log);
          else if (command == "correct") rc = cli::cmd_correct(cfg, log);
          else if (command == "aggregate") rc = cli::cmd_aggregate(cfg, log);
          else if (command == "synth") rc = cli::cmd_synth(cfg, log);
          else if (command == "plot-data") rc = cli::cmd_plot_data(cfg, log);
          else throw InvalidArgument("unknown command '" + command + "'");
        }
        return py::make_tuple(rc, log.str());
      },
      py::arg("command"), py::arg("config"),
      "Runs a CLI subcommand with a config mapping (same keys as --config files). Returns (exit_code, log).");
}

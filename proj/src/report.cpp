#include "browkit/report.hpp"

#include "browkit/error.hpp"
#include "browkit/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace browkit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Channel, 5> kTraceChannels = {Channel::inner, Channel::outer, Channel::pitch,
                                                   Channel::yaw, Channel::roll};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string raised_label(const std::optional<bool>& r) {
  if (!r) return "";
  return *r ? "true" : "false";
}

std::vector<double> abs_values(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string trace_csv(const BrowTrace& trace) {
  std::string out = "frame,t,inner,outer,pitch,yaw,roll,present\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.frame_index);
    out += ',';
    out += text::format_report(r.t);
    for (Channel c : kTraceChannels) {
      out += ',';
      if (r.sample) out += text::format_report(r.sample->value(c));
    }
    out += r.sample ? ",1\n" : ",0\n";
  }
  return out;
}

BrowTrace parse_trace_csv(std::string_view content) {
  BrowTrace trace;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split_csv_line(line);
    if (header) {
      static const std::vector<std::string> expected = {"frame", "t",   "inner", "outer",
                                                        "pitch", "yaw", "roll",  "present"};
      if (cells != expected) {
        throw SchemaError("trace CSV header must be frame,t,inner,outer,pitch,yaw,roll,present");
      }
      header = false;
      continue;
    }
    if (cells.size() != 8) {
      throw ParseError("trace CSV line " + std::to_string(line_no) + ": expected 8 cells");
    }
    auto num = [&](std::size_t i) {
      auto v = text::parse_double(cells[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("trace CSV line " + std::to_string(line_no) + ": bad number '" +
                         cells[i] + "'");
      }
      return *v;
    };
    TraceRecord r;
    r.frame_index = static_cast<std::int64_t>(std::llround(num(0)));
    r.t = num(1);
    if (cells[7] == "1") {
      TraceSample s;
      for (std::size_t c = 0; c < kTraceChannels.size(); ++c) s.value(kTraceChannels[c]) = num(2 + c);
      r.sample = s;
    } else if (cells[7] != "0") {
      throw ParseError("trace CSV line " + std::to_string(line_no) + ": present must be 0 or 1");
    }
    trace.records.push_back(r);
  }
  if (header) throw ParseError("trace CSV is empty");
  return trace;
}

ordered_json trace_meta_json(const BrowTrace& trace) {
  ordered_json j;
  j["video"] = trace.video;
  j["tracker"] = to_string(trace.meta.tracker);
  j["camera_distance"] = to_string(trace.meta.camera_distance);
  j["condition"] = to_string(trace.meta.condition);
  j["eyebrows_raised"] =
      trace.meta.eyebrows_raised ? ordered_json(*trace.meta.eyebrows_raised) : ordered_json(nullptr);
  j["subject"] = trace.meta.subject;
  j["fps"] = trace.meta.fps;
  j["units"] = trace.meta.units;
  return j;
}

void apply_trace_meta(BrowTrace& trace, const json& j) {
  try {
    if (j.contains("video")) trace.video = j.at("video").get<std::string>();
    if (j.contains("tracker")) trace.meta.tracker = tracker_from_string(j.at("tracker").get<std::string>());
    if (j.contains("camera_distance")) {
      trace.meta.camera_distance = camera_distance_from_string(j.at("camera_distance").get<std::string>());
    }
    if (j.contains("condition")) trace.meta.condition = condition_from_string(j.at("condition").get<std::string>());
    if (j.contains("eyebrows_raised")) {
      const auto& r = j.at("eyebrows_raised");
      trace.meta.eyebrows_raised = r.is_null() ? std::nullopt : std::optional<bool>(r.get<bool>());
    }
    if (j.contains("subject")) trace.meta.subject = j.at("subject").get<std::string>();
    if (j.contains("fps")) trace.meta.fps = j.at("fps").get<double>();
    if (j.contains("units")) trace.meta.units = j.at("units").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed trace metadata: ") + e.what());
  }
}

std::filesystem::path trace_meta_path(const std::filesystem::path& csv_path) {
  std::string s = csv_path.string();
  if (s.size() > 4 && s.ends_with(".csv")) s.resize(s.size() - 4);
  return s + ".meta.json";
}

void write_trace(const BrowTrace& trace, const std::filesystem::path& csv_path) {
  text::atomic_write(csv_path, trace_csv(trace));
  text::atomic_write(trace_meta_path(csv_path), trace_meta_json(trace).dump(2) + "\n");
}

BrowTrace read_trace(const std::filesystem::path& csv_path) {
  BrowTrace trace = parse_trace_csv(text::read_file(csv_path));
  trace.video = csv_path.filename().string();
  if (const auto meta = trace_meta_path(csv_path); std::filesystem::exists(meta)) {
    json j;
    try {
      j = json::parse(text::read_file(meta));
    } catch (const json::parse_error& e) {
      throw ParseError("trace metadata '" + meta.string() + "': " + e.what());
    }
    apply_trace_meta(trace, j);
  }
  return trace;
}

// ---------------------------------------------------------------------------

DeviationReport build_deviation_report(const std::vector<BrowTrace>& traces,
                                       const DeviationOptions& options) {
  DeviationReport report;
  if (traces.empty()) throw InvalidArgument("no traces to report on");

  // Scale within (tracker, camera distance) groups.
  std::vector<BrowTrace> scaled(traces.size());
  if (options.scale_mode == ScaleMode::per_group) {
    std::map<std::pair<Tracker, CameraDistance>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].meta.camera_distance == CameraDistance::unknown) {
        throw InvalidArgument("recording '" + traces[i].video +
                              "' has no camera distance group; label it or scale per video");
      }
      groups[{traces[i].meta.tracker, traces[i].meta.camera_distance}].push_back(i);
    }
    for (const auto& [key, members] : groups) {
      std::vector<BrowTrace> group;
      for (auto i : members) group.push_back(traces[i]);
      TraceScaling scaling;
      try {
        scaling = fit_trace_scaling(group);
      } catch (const DegenerateError&) {
        // Every distance in the group is identical: no spread to scale, and
        // every deviation is zero in any units.
        const double inner = group.front().present_values(BrowKind::inner).front();
        const double outer = group.front().present_values(BrowKind::outer).front();
        scaling = {{inner, inner + 1.0}, {outer, outer + 1.0}};
        report.warnings.push_back("group " + std::string(to_string(key.first)) + "/" +
                                  std::string(to_string(key.second)) +
                                  " has constant distances; left unscaled");
      }
      for (auto i : members) scaled[i] = apply_scaling(traces[i], scaling);
    }
  } else {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      try {
        scaled[i] = scale_group(std::span<const BrowTrace>(&traces[i], 1), ScaleMode::per_video)[0];
      } catch (const DegenerateError&) {
        scaled[i] = traces[i];
        report.warnings.push_back("recording '" + traces[i].video + "' is constant; left unscaled");
      }
    }
  }

  auto make_row = [&](const BrowTrace& t, BrowKind kind) {
    DeviationRow row;
    row.video = t.video;
    row.tracker = std::string(to_string(t.meta.tracker));
    row.distance_group = std::string(to_string(t.meta.camera_distance));
    row.condition = std::string(to_string(t.meta.condition));
    row.eyebrows_raised = t.meta.eyebrows_raised;
    row.kind = kind;
    row.baseline = baseline(t, kind, options.baseline_window);
    row.rms = deviation(t, kind, options.baseline_window, DeviationVariant::rms);
    row.mean_abs = deviation(t, kind, options.baseline_window, DeviationVariant::mean_abs);
    if (t.present_count() >= 2) {
      row.sd = deviation(t, kind, options.baseline_window, DeviationVariant::sd_of_differences);
    }
    switch (options.variant) {
      case DeviationVariant::rms: row.deviation = row.rms; break;
      case DeviationVariant::mean_abs: row.deviation = row.mean_abs; break;
      case DeviationVariant::sd_of_differences:
        if (!row.sd) throw InvalidArgument("sd deviation needs at least 2 present frames");
        row.deviation = *row.sd;
        break;
    }
    row.n = t.present_count();
    try {
      row.test = stats::t_one_sample(abs_values(baseline_differences(t, kind, options.baseline_window)), 0.0);
    } catch (const InvalidArgument&) {
      report.warnings.push_back("t-test undefined for '" + t.video + "' " +
                                std::string(to_string(kind)) + " (constant or too short)");
    }
    return row;
  };

  for (const auto& t : scaled) {
    for (BrowKind kind : {BrowKind::inner, BrowKind::outer}) report.rows.push_back(make_row(t, kind));
  }

  // Tracker comparisons for the same recording analysed by two trackers,
  // named in alphabetical tracker order.
  using Key = std::tuple<std::string, CameraDistance, Condition, std::optional<bool>>;
  std::map<Key, std::map<std::string, std::vector<std::size_t>>> by_recording;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const auto& m = scaled[i].meta;
    by_recording[{m.subject, m.camera_distance, m.condition, m.eyebrows_raised}][std::string(to_string(m.tracker))].push_back(i);
  }
  for (const auto& [key, per_tracker] : by_recording) {
    for (auto a = per_tracker.begin(); a != per_tracker.end(); ++a) {
      for (auto b = std::next(a); b != per_tracker.end(); ++b) {
        const std::size_t pairs = std::min(a->second.size(), b->second.size());
        for (std::size_t p = 0; p < pairs; ++p) {
          const auto& ta = scaled[a->second[p]];
          const auto& tb = scaled[b->second[p]];
          for (BrowKind kind : {BrowKind::inner, BrowKind::outer}) {
            DeviationRow row;
            row.video = ta.video + "|" + tb.video;
            row.tracker = a->first + "_vs_" + b->first;
            row.distance_group = std::string(to_string(std::get<1>(key)));
            row.condition = std::string(to_string(std::get<2>(key)));
            row.eyebrows_raised = std::get<3>(key);
            row.kind = kind;
            const auto da = abs_values(baseline_differences(ta, kind, options.baseline_window));
            const auto db = abs_values(baseline_differences(tb, kind, options.baseline_window));
            row.deviation = deviation(ta, kind, options.baseline_window, options.variant) -
                            deviation(tb, kind, options.baseline_window, options.variant);
            row.rms = deviation(ta, kind, options.baseline_window, DeviationVariant::rms) -
                      deviation(tb, kind, options.baseline_window, DeviationVariant::rms);
            row.mean_abs = deviation(ta, kind, options.baseline_window, DeviationVariant::mean_abs) -
                           deviation(tb, kind, options.baseline_window, DeviationVariant::mean_abs);
            row.n = da.size() + db.size();
            try {
              row.test = stats::t_welch(da, db);
            } catch (const InvalidArgument&) {
              report.warnings.push_back("Welch test undefined for " + row.video);
            }
            report.rows.push_back(row);
          }
        }
      }
    }
  }
  return report;
}

std::string deviation_csv(const DeviationReport& report) {
  std::string out =
      "video,tracker,distance_group,condition,brow_kind,deviation,n,t_stat,df,p_value,"
      "eyebrows_raised,baseline,rms,sd,mean_abs\n";
  for (const auto& r : report.rows) {
    out += csv_escape(r.video) + ',' + r.tracker + ',' + r.distance_group + ',' + r.condition + ',' +
           std::string(to_string(r.kind)) + ',' + text::format_report(r.deviation) + ',' +
           std::to_string(r.n) + ',';
    if (r.test) {
      out += text::format_report(r.test->t) + ',' + text::format_report(r.test->df) + ',' +
             text::format_report(r.test->p);
    } else {
      out += ",,";
    }
    out += ',' + raised_label(r.eyebrows_raised) + ',' + text::format_report(r.baseline) + ',' +
           text::format_report(r.rms) + ',' + text::format_optional(r.sd) + ',' +
           text::format_report(r.mean_abs) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string aggregate_csv(const std::vector<AggregateTrace>& aggregates) {
  std::string out = "group,brow_kind,x,mean,sd,n\n";
  for (const auto& a : aggregates) {
    for (std::size_t k = 0; k < a.mean.size(); ++k) {
      out += csv_escape(a.key) + ',' + std::string(to_string(a.kind)) + ',' + std::to_string(k) + ',' +
             text::format_optional(a.mean[k]) + ',' + text::format_optional(a.sd[k]) + ',' +
             std::to_string(a.count[k]) + '\n';
    }
  }
  return out;
}

std::string plot_long_csv(const std::vector<PlotSeries>& series) {
  std::string out = "series,x,y\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out += csv_escape(s.name) + ',' + text::format_report(s.x[i]) + ',' + text::format_optional(s.y[i]) + '\n';
    }
  }
  return out;
}

std::string plot_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  static constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  constexpr double kWidth = 720, kHeight = 420, kLeft = 60, kRight = 180, kTop = 40, kBottom = 40;

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!s.y[i]) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, *s.y[i]);
      y1 = std::max(y1, *s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o.push_back(c);
    }
    return o;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt(kLeft) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         esc(title) + "</text>\n";
  out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" +
         fmt(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  out += "<text x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kHeight - 12) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + text::format_report(x0) + "</text>\n";
  out += "<text x=\"" + fmt(kLeft + pw) + "\" y=\"" + fmt(kHeight - 12) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + text::format_report(x1) +
         "</text>\n";
  out += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(kTop + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + text::format_report(y1) +
         "</text>\n";
  out += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(kTop + ph) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + text::format_report(y0) +
         "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % kColors.size()];
    std::string run;
    auto flush = [&] {
      if (run.empty()) return;
      out += "<polyline data-series=\"" + std::to_string(si) + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\" points=\"" + run + "\"/>\n";
      run.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!s.y[i]) {
        flush();
        continue;
      }
      if (!run.empty()) run.push_back(' ');
      run += fmt(px(s.x[i])) + "," + fmt(py(*s.y[i]));
    }
    flush();
    const double ly = kTop + 14.0 * static_cast<double>(si) + 8.0;
    out += "<line x1=\"" + fmt(kLeft + pw + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(kLeft + pw + 30) +
           "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(kLeft + pw + 34) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + esc(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace browkit

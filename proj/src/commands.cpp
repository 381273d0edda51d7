#include "browkit/commands.hpp"

#include "browkit/correction.hpp"
#include "browkit/error.hpp"
#include "browkit/geometry.hpp"
#include "browkit/landmark_io.hpp"
#include "browkit/report.hpp"
#include "browkit/synth.hpp"
#include "browkit/text.hpp"

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace browkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;

bool ends_with(const std::string& s, std::string_view suffix) { return s.ends_with(suffix); }

std::string stem_of(const fs::path& p) {
  std::string name = p.filename().string();
  for (std::string_view suffix : {".trace.csv", ".jsonl", ".csv", ".json"}) {
    if (name.size() > suffix.size() && ends_with(name, suffix)) {
      name.resize(name.size() - suffix.size());
      break;
    }
  }
  return name;
}

std::vector<std::string> name_tokens(const fs::path& p) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : stem_of(p)) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

bool is_trace_csv(const fs::path& p) { return ends_with(p.filename().string(), ".trace.csv"); }
bool is_interchange(const fs::path& p) { return p.extension() == ".jsonl"; }

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  if (s.empty()) return std::nullopt;
  throw InvalidArgument("expected true/false, got '" + s + "'");
}

using ManifestRow = std::map<std::string, std::string>;

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::vector<ManifestRow> rows;
  if (path.empty()) return rows;
  std::istringstream in(text::read_file(path));
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto cells = text::split_csv_line(line);
    if (header.empty()) {
      header = cells;
      if (std::find(header.begin(), header.end(), "path") == header.end()) {
        throw SchemaError("manifest '" + path + "' needs a 'path' column");
      }
      continue;
    }
    ManifestRow row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

const ManifestRow* manifest_entry(const std::vector<ManifestRow>& rows, const fs::path& p) {
  for (const auto& r : rows) {
    auto it = r.find("path");
    if (it == r.end()) continue;
    if (it->second == p.string() || fs::path(it->second).filename() == p.filename()) return &r;
  }
  return nullptr;
}

void apply_meta_fields(SequenceMeta& m, const ManifestRow& fields, bool* tracker_set = nullptr) {
  auto get = [&](const char* k) -> std::string {
    auto it = fields.find(k);
    return it == fields.end() ? std::string() : it->second;
  };
  if (auto v = get("camera_distance"); !v.empty()) m.camera_distance = camera_distance_from_string(v);
  if (auto v = get("condition"); !v.empty()) m.condition = condition_from_string(v);
  if (auto v = get("subject"); !v.empty()) m.subject = v;
  if (auto v = get("eyebrows_raised"); !v.empty()) m.eyebrows_raised = parse_bool(v);
  if (auto v = get("fps"); !v.empty()) {
    auto f = text::parse_double(v);
    if (!f || !(*f > 0.0)) throw InvalidArgument("manifest fps must be a positive number");
    m.fps = *f;
  }
  if (auto v = get("tracker"); !v.empty()) {
    m.tracker = tracker_from_string(v);
    if (tracker_set) *tracker_set = true;
  }
}

ManifestRow flag_fields(const RunConfig& cfg) {
  ManifestRow f;
  if (!cfg.camera_distance.empty()) f["camera_distance"] = cfg.camera_distance;
  if (!cfg.condition.empty()) f["condition"] = cfg.condition;
  if (!cfg.subject.empty()) f["subject"] = cfg.subject;
  if (!cfg.eyebrows_raised.empty()) f["eyebrows_raised"] = cfg.eyebrows_raised;
  if (cfg.tracker != "auto") f["tracker"] = cfg.tracker;
  return f;
}

// Fills fields still at their defaults from tokens in the file name
// (e.g. "mph_close_pitch_up_raised.jsonl").
void infer_from_name(SequenceMeta& m, const fs::path& p) {
  const auto tokens = name_tokens(p);
  auto has = [&](std::string_view t) { return std::find(tokens.begin(), tokens.end(), t) != tokens.end(); };
  if (m.camera_distance == CameraDistance::unknown) {
    if (has("close")) m.camera_distance = CameraDistance::close;
    else if (has("middle")) m.camera_distance = CameraDistance::middle;
    else if (has("far")) m.camera_distance = CameraDistance::far;
  }
  if (m.condition == Condition::custom && has("pitch")) {
    if (has("up")) m.condition = Condition::pitch_up;
    else if (has("down")) m.condition = Condition::pitch_down;
  }
  if (!m.eyebrows_raised) {
    if (has("raised") || has("raise")) m.eyebrows_raised = true;
    else if (has("neutral") || has("noraise")) m.eyebrows_raised = false;
  }
}

TraceOptions trace_options(const RunConfig& cfg, const LandmarkSequence& seq) {
  TraceOptions o;
  o.brow.signed_distance = cfg.signed_distance;
  o.brow.planar = cfg.planar;
  if (cfg.pose_source == "file") {
    o.pose_source = PoseSource::from_file;
  } else if (cfg.pose_source == "rigid") {
    o.pose_source = PoseSource::rigid_estimate;
  } else if (cfg.pose_source == "auto") {
    const bool has_pose = std::all_of(seq.frames.begin(), seq.frames.end(),
                                      [](const auto& f) { return !f.present || f.pose.has_value(); });
    o.pose_source = has_pose ? PoseSource::from_file : PoseSource::rigid_estimate;
  } else {
    throw InvalidArgument("pose source must be auto, file or rigid");
  }
  return o;
}

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (!fs::is_directory(cfg.output_dir)) {
    throw IoError("output directory '" + cfg.output_dir + "' cannot be created");
  }
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.output_dir) / name; }

std::vector<BrowKind> brow_kinds(const std::string& s) {
  if (s == "both") return {BrowKind::inner, BrowKind::outer};
  return {brow_kind_from_string(s)};
}

struct Inputs {
  std::vector<fs::path> paths;
  bool ok = true;
};

Inputs resolve_inputs(const std::vector<std::string>& patterns, std::ostream& log) {
  Inputs in;
  in.paths = expand_inputs(patterns);
  if (in.paths.empty()) {
    log << "error: no inputs\n";
    in.ok = false;
  }
  return in;
}

// Traces of every input; failures are logged and counted.
std::vector<BrowTrace> load_traces(const std::vector<fs::path>& paths, const RunConfig& cfg,
                                   std::ostream& log, int& failures) {
  std::vector<BrowTrace> traces;
  for (const auto& p : paths) {
    try {
      traces.push_back(load_trace(p, cfg));
    } catch (const std::exception& e) {
      log << "error: " << p.string() << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return traces;
}

// Per-channel scaling over a group, keeping units when a channel is flat.
TraceScaling group_scaling(std::span<const BrowTrace> group, std::ostream& log) {
  TraceScaling s;
  for (BrowKind kind : {BrowKind::inner, BrowKind::outer}) {
    std::vector<std::vector<double>> values;
    for (const auto& t : group) values.push_back(t.present_values(kind));
    UnitScaling u;
    try {
      u = fit_unit_scaling(values);
    } catch (const DegenerateError&) {
      const double lo = values.front().empty() ? 0.0 : values.front().front();
      u = {lo, lo + 1.0};
      log << "warning: " << to_string(kind) << " distances are constant in a scaling group; left unscaled\n";
    }
    (kind == BrowKind::inner ? s.inner : s.outer) = u;
  }
  return s;
}

using GroupKey = std::pair<Tracker, CameraDistance>;

GroupKey group_key(const BrowTrace& t) { return {t.meta.tracker, t.meta.camera_distance}; }

std::string meta_value(const BrowTrace& t, const std::string& field) {
  if (field == "condition") return std::string(to_string(t.meta.condition));
  if (field == "camera_distance") return std::string(to_string(t.meta.camera_distance));
  if (field == "tracker") return std::string(to_string(t.meta.tracker));
  if (field == "subject") return t.meta.subject;
  if (field == "eyebrows_raised") {
    return t.meta.eyebrows_raised ? (*t.meta.eyebrows_raised ? "true" : "false") : "unknown";
  }
  throw InvalidArgument("cannot group by '" + field +
                        "' (condition|camera_distance|tracker|subject|eyebrows_raised)");
}

ordered_json scorecard_json(const synth::Scorecard& s) {
  ordered_json j;
  j["rmse_uncorrected"] = s.rmse_uncorrected;
  j["rmse_corrected"] = s.rmse_corrected;
  j["improvement_ratio"] = s.improvement_ratio ? ordered_json(*s.improvement_ratio) : ordered_json(nullptr);
  j["n"] = s.n;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw SchemaError("config file must hold a JSON object");
  try {
    auto str = [&](const char* k, std::string& dst) {
      if (j.contains(k)) dst = j.at(k).get<std::string>();
    };
    auto strs = [&](const char* k, std::vector<std::string>& dst) {
      if (j.contains(k)) dst = j.at(k).get<std::vector<std::string>>();
    };
    strs("inputs", cfg.inputs);
    str("output_dir", cfg.output_dir);
    str("tracker", cfg.tracker);
    str("schema", cfg.schema);
    str("manifest", cfg.manifest);
    str("camera_distance", cfg.camera_distance);
    str("condition", cfg.condition);
    str("subject", cfg.subject);
    if (j.contains("eyebrows_raised")) {
      const auto& v = j.at("eyebrows_raised");
      cfg.eyebrows_raised = v.is_boolean() ? (v.get<bool>() ? "true" : "false") : v.get<std::string>();
    }
    if (j.contains("confidence_threshold")) cfg.confidence_threshold = j.at("confidence_threshold").get<double>();
    if (j.contains("fps")) cfg.fps = j.at("fps").get<double>();
    str("pose_source", cfg.pose_source);
    if (j.contains("signed_distance")) cfg.signed_distance = j.at("signed_distance").get<bool>();
    if (j.contains("planar")) cfg.planar = j.at("planar").get<bool>();
    if (j.contains("baseline_window")) cfg.baseline_window = j.at("baseline_window").get<std::size_t>();
    str("deviation_variant", cfg.deviation_variant);
    str("scale_mode", cfg.scale_mode);
    if (j.contains("normalize_n")) cfg.normalize_n = j.at("normalize_n").get<std::size_t>();
    if (j.contains("normalize")) cfg.normalize = j.at("normalize").get<bool>();
    if (j.contains("scale")) cfg.scale = j.at("scale").get<bool>();
    if (j.contains("max_gap") && !j.at("max_gap").is_null()) cfg.max_gap = j.at("max_gap").get<std::size_t>();
    str("features", cfg.features);
    strs("models", cfg.models);
    strs("fit_inputs", cfg.fit_inputs);
    str("brow_kind", cfg.brow_kind);
    str("group_by", cfg.group_by);
    str("scenario", cfg.scenario);
    if (j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
      cfg.seed_set = true;
    }
    strs("channels", cfg.channels);
    str("plot_name", cfg.plot_name);
    str("title", cfg.title);
    if (j.contains("derotated")) cfg.derotated = j.at("derotated").get<bool>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed config: ") + e.what());
  }
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const auto& pattern : patterns) {
    if (pattern.find_first_of("*?[") == std::string::npos) {
      out.emplace_back(pattern);
      continue;
    }
    glob_t g{};
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
      std::vector<fs::path> matches;
      for (std::size_t i = 0; i < g.gl_pathc; ++i) matches.emplace_back(g.gl_pathv[i]);
      std::sort(matches.begin(), matches.end());
      out.insert(out.end(), matches.begin(), matches.end());
    }
    ::globfree(&g);
  }
  return out;
}

LandmarkSequence load_sequence(const fs::path& path, const RunConfig& cfg) {
  if (!fs::exists(path)) throw IoError("input '" + path.string() + "' does not exist");
  const auto manifest = read_manifest(cfg.manifest);
  const ManifestRow* entry = manifest_entry(manifest, path);
  const ManifestRow flags = flag_fields(cfg);

  LandmarkSequence seq;
  if (is_interchange(path)) {
    seq = parse_interchange(path);
  } else {
    OpenFaceOptions o;
    o.confidence_threshold = cfg.confidence_threshold;
    o.fallback_fps = cfg.fps;
    const LandmarkSchema schema =
        cfg.schema.empty() ? default_schema(Tracker::openface) : load_schema(cfg.schema);
    seq = parse_openface_csv(path, schema, o);
  }
  if (!cfg.schema.empty() && is_interchange(path)) {
    seq.schema = load_schema(cfg.schema);
    for (auto& f : seq.frames) resolve_roles(f, seq.schema);
  }
  infer_from_name(seq.meta, path);
  if (entry) apply_meta_fields(seq.meta, *entry);
  apply_meta_fields(seq.meta, flags);
  return seq;
}

BrowTrace load_trace(const fs::path& path, const RunConfig& cfg) {
  if (is_trace_csv(path)) {
    if (!fs::exists(path)) throw IoError("input '" + path.string() + "' does not exist");
    BrowTrace t = read_trace(path);
    if (t.video.empty() || t.video == path.filename().string()) t.video = stem_of(path);
    const auto manifest = read_manifest(cfg.manifest);
    if (const ManifestRow* entry = manifest_entry(manifest, path)) apply_meta_fields(t.meta, *entry);
    apply_meta_fields(t.meta, flag_fields(cfg));
    return t;
  }
  const auto seq = load_sequence(path, cfg);
  BrowTrace t = extract_trace(seq, trace_options(cfg, seq));
  t.video = stem_of(path);
  return t;
}

// ---------------------------------------------------------------------------

int cmd_extract(const RunConfig& cfg, std::ostream& log) {
  const auto in = resolve_inputs(cfg.inputs, log);
  if (!in.ok) return kExitUsage;
  ensure_output_dir(cfg);
  int failures = 0;
  for (const auto& p : in.paths) {
    try {
      const auto seq = load_sequence(p, cfg);
      BrowTrace trace = extract_trace(seq, trace_options(cfg, seq));
      trace.video = stem_of(p);
      const std::string stem = stem_of(p);
      if (!is_interchange(p) || fs::absolute(p).parent_path() != fs::absolute(cfg.output_dir)) {
        write_interchange(seq, out_path(cfg, stem + ".jsonl"));
      }
      write_trace(trace, out_path(cfg, stem + ".trace.csv"));
      if (cfg.derotated) {
        LandmarkSequence model = seq;
        for (std::size_t i = 0; i < model.frames.size(); ++i) {
          const auto& rec = trace.records[i];
          if (!rec.sample) continue;
          model.frames[i] = *derotate_and_center(seq.frames[i], rec.sample->pose);
        }
        write_interchange(model, out_path(cfg, stem + ".derotated.jsonl"));
      }
      log << "extracted " << p.string() << " (" << trace.present_count() << "/" << trace.records.size()
          << " frames present)\n";
    } catch (const std::exception& e) {
      log << "error: " << p.string() << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures ? kExitFailures : kExitOk;
}

int cmd_deviations(const RunConfig& cfg, std::ostream& log) {
  const auto in = resolve_inputs(cfg.inputs, log);
  if (!in.ok) return kExitUsage;
  int failures = 0;
  auto traces = load_traces(in.paths, cfg, log, failures);
  if (traces.empty()) return kExitFailures;

  DeviationOptions opts;
  opts.baseline_window = cfg.baseline_window;
  opts.variant = deviation_variant_from_string(cfg.deviation_variant);
  if (cfg.scale_mode == "per_group") {
    opts.scale_mode = ScaleMode::per_group;
  } else if (cfg.scale_mode == "per_video") {
    opts.scale_mode = ScaleMode::per_video;
  } else {
    throw InvalidArgument("scale mode must be per_group or per_video");
  }
  const auto report = build_deviation_report(traces, opts);
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  log << "note: t-tests treat frames within a recording as independent observations; frame-level "
         "samples are autocorrelated, so p-values are optimistic\n";
  ensure_output_dir(cfg);
  text::atomic_write(out_path(cfg, "deviations.csv"), deviation_csv(report));
  return failures ? kExitFailures : kExitOk;
}

int cmd_correct(const RunConfig& cfg, std::ostream& log) {
  const auto in = resolve_inputs(cfg.inputs, log);
  if (!in.ok) return kExitUsage;
  if (cfg.models.empty() == cfg.fit_inputs.empty()) {
    log << "error: give either --model or --fit (exactly one)\n";
    return kExitUsage;
  }
  const auto kinds = brow_kinds(cfg.brow_kind);
  int failures = 0;
  auto targets = load_traces(in.paths, cfg, log, failures);
  ensure_output_dir(cfg);

  std::map<std::tuple<Tracker, CameraDistance, BrowKind>, CorrectionModel> models;
  if (!cfg.models.empty()) {
    for (const auto& mp : expand_inputs(cfg.models)) {
      auto m = load_model(mp);
      if (!cfg.features.empty() && parse_feature_spec(cfg.features) != m.features) {
        throw InvalidArgument("feature mismatch: model '" + mp.string() + "' uses [" +
                              format_feature_spec(m.features) + "] but [" +
                              format_feature_spec(parse_feature_spec(cfg.features)) + "] was requested");
      }
      models[{m.tracker, m.camera_distance, m.kind}] = m;
    }
  } else {
    const FeatureSpec features = cfg.features.empty() ? linear_features() : parse_feature_spec(cfg.features);
    const auto train_paths = expand_inputs(cfg.fit_inputs);
    if (train_paths.empty()) {
      log << "error: no training inputs\n";
      return kExitUsage;
    }
    int train_failures = 0;
    auto training = load_traces(train_paths, cfg, log, train_failures);
    if (train_failures) return kExitFailures;

    std::map<GroupKey, std::vector<BrowTrace>> groups;
    for (const auto& t : training) groups[group_key(t)].push_back(t);
    for (auto& [key, members] : groups) {
      std::vector<BrowTrace> all = members;
      for (const auto& t : targets)
        if (group_key(t) == key) all.push_back(t);
      const TraceScaling scaling = group_scaling(all, log);
      for (BrowKind kind : kinds) {
        TrainingSet ts;
        ts.tracker = key.first;
        ts.camera_distance = key.second;
        ts.kind = kind;
        ts.scaling = scaling.of(kind);
        for (const auto& t : members) ts.add(apply_scaling(t, scaling));
        auto model = fit(ts, features);
        const std::string name = "model." + std::string(to_string(key.first)) + "." +
                                 std::string(to_string(key.second)) + "." + std::string(to_string(kind)) +
                                 ".json";
        save_model(model, out_path(cfg, name));
        log << "fitted " << name << " (n=" << model.n << ", rmse=" << text::format_report(model.rmse) << ")\n";
        models[{key.first, key.second, kind}] = std::move(model);
      }
    }
  }

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    try {
      BrowTrace corrected = t;
      for (BrowKind kind : kinds) {
        auto it = models.find({t.meta.tracker, t.meta.camera_distance, kind});
        if (it == models.end()) {
          throw InvalidArgument("no correction model for tracker '" + std::string(to_string(t.meta.tracker)) +
                                "', distance '" + std::string(to_string(t.meta.camera_distance)) +
                                "', brow kind '" + std::string(to_string(kind)) + "'");
        }
        corrected = apply_unscaled(it->second, corrected);
      }
      write_trace(corrected, out_path(cfg, t.video + ".corrected.trace.csv"));
    } catch (const std::exception& e) {
      log << "error: " << t.video << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures ? kExitFailures : kExitOk;
}

int cmd_aggregate(const RunConfig& cfg, std::ostream& log) {
  const auto in = resolve_inputs(cfg.inputs, log);
  if (!in.ok) return kExitUsage;
  int failures = 0;
  auto traces = load_traces(in.paths, cfg, log, failures);
  if (failures) return kExitFailures;

  if (cfg.scale) {
    std::map<GroupKey, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < traces.size(); ++i) groups[group_key(traces[i])].push_back(i);
    for (const auto& [key, members] : groups) {
      std::vector<BrowTrace> group;
      for (auto i : members) group.push_back(traces[i]);
      const auto scaling = group_scaling(group, log);
      for (auto i : members) traces[i] = apply_scaling(traces[i], scaling);
    }
  }
  if (cfg.normalize) {
    for (auto& t : traces) t = normalize_time(t, cfg.normalize_n, cfg.max_gap);
  }

  std::map<std::string, std::vector<BrowTrace>> by_key;
  for (const auto& t : traces) by_key[meta_value(t, cfg.group_by)].push_back(t);
  std::vector<AggregateTrace> aggregates;
  for (const auto& [key, group] : by_key) {
    for (BrowKind kind : brow_kinds(cfg.brow_kind)) aggregates.push_back(aggregate_condition(group, kind, key));
  }
  ensure_output_dir(cfg);
  text::atomic_write(out_path(cfg, "aggregate.csv"), aggregate_csv(aggregates));
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
  if (cfg.scenario.empty()) {
    log << "error: no scenario file\n";
    return kExitUsage;
  }
  json j;
  try {
    j = json::parse(text::read_file(cfg.scenario));
  } catch (const json::parse_error& e) {
    throw ParseError("scenario file '" + cfg.scenario + "': " + e.what());
  }
  auto specs = synth::scenarios_from_json(j);
  ensure_output_dir(cfg);

  std::set<std::string> names;
  std::string summary = "scenario,brow_kind,rmse_uncorrected,rmse_corrected,improvement_ratio,n\n";
  for (auto& spec : specs) {
    if (cfg.seed_set) spec.scenario.seed = cfg.seed;
    const auto& name = spec.scenario.name;
    if (!names.insert(name).second) throw InvalidArgument("duplicate scenario name '" + name + "'");
    const auto res = synth::run_scenario(spec);
    write_interchange(res.generated.truth, out_path(cfg, name + ".truth.jsonl"));
    write_interchange(res.generated.observed, out_path(cfg, name + ".observed.jsonl"));
    write_trace(res.truth_trace, out_path(cfg, name + ".truth.trace.csv"));
    write_trace(res.observed_trace, out_path(cfg, name + ".observed.trace.csv"));

    ordered_json card;
    card["scenario"] = name;
    card["seed"] = spec.scenario.seed;
    card["distortion"] = synth::to_string(spec.scenario.distortion.kind);
    card["units"] = spec.correction ? "scaled" : "template";
    ordered_json scores = ordered_json::object();
    for (const auto& [kind, s] : res.scores) {
      scores[std::string(to_string(kind))] = scorecard_json(s);
      summary += name + "," + std::string(to_string(kind)) + "," + text::format_report(s.rmse_uncorrected) + "," +
                 text::format_report(s.rmse_corrected) + "," + text::format_optional(s.improvement_ratio) + "," +
                 std::to_string(s.n) + "\n";
    }
    card["scores"] = scores;
    if (!res.models.empty()) {
      ordered_json models = ordered_json::object();
      for (const auto& [kind, m] : res.models) {
        models[std::string(to_string(kind))] = model_to_json(m);
        save_model(m, out_path(cfg, name + ".model." + std::string(to_string(kind)) + ".json"));
      }
      card["models"] = models;
    }
    text::atomic_write(out_path(cfg, name + ".scorecard.json"), card.dump(2) + "\n");
    log << "generated " << name << "\n";
  }
  text::atomic_write(out_path(cfg, "scorecard.csv"), summary);
  return kExitOk;
}

int cmd_plot_data(const RunConfig& cfg, std::ostream& log) {
  const auto in = resolve_inputs(cfg.inputs, log);
  if (!in.ok) return kExitUsage;
  std::vector<Channel> channels;
  for (const auto& c : cfg.channels) channels.push_back(channel_from_string(c));
  if (channels.empty()) throw InvalidArgument("no channels selected");

  int failures = 0;
  const auto traces = load_traces(in.paths, cfg, log, failures);
  std::vector<PlotSeries> series;
  for (const auto& t : traces) {
    for (Channel c : channels) {
      PlotSeries s;
      s.name = t.video + ":" + std::string(to_string(c));
      for (const auto& r : t.records) {
        s.x.push_back(static_cast<double>(r.frame_index));
        s.y.push_back(r.sample ? std::optional<double>(r.sample->value(c)) : std::nullopt);
      }
      series.push_back(std::move(s));
    }
  }
  ensure_output_dir(cfg);
  text::atomic_write(out_path(cfg, cfg.plot_name + ".csv"), plot_long_csv(series));
  text::atomic_write(out_path(cfg, cfg.plot_name + ".svg"),
                     plot_svg(series, cfg.title.empty() ? cfg.plot_name : cfg.title));
  return failures ? kExitFailures : kExitOk;
}

}  // namespace browkit::cli

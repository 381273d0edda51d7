#include "browkit/error.hpp"
#include "browkit/landmark_io.hpp"
#include "browkit/synth.hpp"

namespace browkit::synth {

using nlohmann::json;

namespace {

Eigen::Vector3d vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw SchemaError(std::string("'") + what + "' must be an [x, y, z] array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Profile profile_from_json(const json& j, const char* value_key) {
  Profile p;
  if (j.is_null()) return p;
  const auto shape = j.value("shape", std::string("raised_cosine"));
  if (shape == "none") return p;
  if (shape == "linear") {
    p.shape = Profile::Shape::linear;
  } else if (shape == "raised_cosine") {
    p.shape = Profile::Shape::raised_cosine;
  } else {
    throw SchemaError("unknown profile shape '" + shape + "'");
  }
  p.start = j.at("start").get<int>();
  p.peak = j.at("peak").get<int>();
  p.end = j.at("end").get<int>();
  p.peak_value = j.at(value_key).get<double>();
  return p;
}

MotionScript script_from_json(const json& j) {
  MotionScript s;
  s.frames = j.value("frames", s.frames);
  s.fps = j.value("fps", s.fps);
  if (j.contains("pitch")) s.pitch = profile_from_json(j.at("pitch"), "peak_angle");
  if (j.contains("yaw")) s.yaw = profile_from_json(j.at("yaw"), "peak_angle");
  if (j.contains("roll")) s.roll = profile_from_json(j.at("roll"), "peak_angle");
  if (j.contains("eyebrows")) {
    const auto& e = j.at("eyebrows");
    if (e.is_string()) {
      const auto kind = e.get<std::string>();
      if (kind == "neutral") {
        s.brows.kind = BrowProfile::Kind::neutral;
      } else if (kind == "raised") {
        s.brows.kind = BrowProfile::Kind::raised;
      } else {
        throw SchemaError("unknown eyebrow profile '" + kind + "'");
      }
    } else {
      s.brows.kind = BrowProfile::Kind::ramp;
      s.brows.ramp = profile_from_json(e.at("ramp"), "level");
    }
  }
  if (j.contains("head_position")) s.head_position = vec3(j.at("head_position"), "head_position");
  return s;
}

DistortionSpec distortion_from_json(const json& j) {
  DistortionSpec d;
  if (j.is_null()) return d;
  const auto kind = j.value("kind", std::string("none"));
  if (kind == "none") {
    d.kind = DistortionSpec::Kind::none;
  } else if (kind == "of_like") {
    d.kind = DistortionSpec::Kind::of_like;
  } else if (kind == "mph_like") {
    d.kind = DistortionSpec::Kind::mph_like;
  } else if (kind == "custom") {
    d.kind = DistortionSpec::Kind::custom;
  } else {
    throw SchemaError("unknown distortion kind '" + kind + "'");
  }
  d.k = j.value("k", d.k);
  d.brow_interaction = j.value("brow_interaction", d.brow_interaction);
  d.interaction_gain = j.value("interaction_gain", d.interaction_gain);
  d.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  if (j.contains("coefficients")) {
    for (const auto& [name, c] : j.at("coefficients").items()) {
      d.coefficients[feature_from_string(name)] = c.get<double>();
    }
  }
  if (j.contains("dropout") && !j.at("dropout").is_null()) {
    const auto& r = j.at("dropout");
    d.dropout = DropoutRule{r.value("pitch_up_threshold", 0.35), r.value("probability", 1.0)};
  }
  if (j.contains("emit_pose")) d.emit_pose = j.at("emit_pose").get<bool>();
  if (j.contains("tracker")) d.observed_tracker = tracker_from_string(j.at("tracker").get<std::string>());
  return d;
}

FaceTemplate template_from_json(const json& j) {
  FaceTemplate t = FaceTemplate::standard();
  if (j.is_null()) return t;
  if (j.contains("points")) {
    for (const auto& [name, p] : j.at("points").items()) t.points[role_from_string(name)] = vec3(p, "point");
  }
  if (j.contains("raise")) {
    for (const auto& [name, p] : j.at("raise").items()) t.raise[role_from_string(name)] = vec3(p, "raise");
  }
  if (j.contains("filler")) {
    for (const auto& [idx, p] : j.at("filler").items()) t.filler[std::stoi(idx)] = vec3(p, "filler");
  }
  t.pivot_below_nose = j.value("pivot_below_nose", t.pivot_below_nose);
  return t;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = j.value("name", s.name);
  s.seed = j.value("seed", std::uint64_t{0});
  s.face = template_from_json(j.value("template", json()));
  s.script = script_from_json(j.value("script", json::object()));
  s.distortion = distortion_from_json(j.value("distortion", json()));
  if (j.contains("schema")) {
    s.options.schema = schema_from_json(j.at("schema"));
  } else if (j.contains("schema_tracker")) {
    s.options.schema = default_schema(tracker_from_string(j.at("schema_tracker").get<std::string>()));
  }
  s.options.camera_distance =
      camera_distance_from_string(j.value("camera_distance", std::string("unknown")));
  s.options.condition = condition_from_string(j.value("condition", std::string("custom")));
  s.options.subject = j.value("subject", s.options.subject);
  return s;
}

ScenarioSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("scenario must be a JSON object");
  ScenarioSpec spec;
  spec.scenario = scenario_from_json(j);
  if (j.contains("correction")) {
    const auto& c = j.at("correction");
    CorrectionPlan plan;
    json base = j;
    base.erase("correction");
    base.erase("name");
    for (const auto& entry : c.at("train")) {
      json merged = base;
      merged.merge_patch(entry);
      if (!merged.contains("name")) merged["name"] = spec.scenario.name + ".train";
      plan.train.push_back(scenario_from_json(merged));
    }
    if (plan.train.empty()) throw SchemaError("correction plan has no training scenarios");
    if (c.contains("features")) plan.features = parse_feature_spec(c.at("features").get<std::string>());
    if (c.contains("brow_kind")) {
      const auto k = c.at("brow_kind").get<std::string>();
      if (k == "both") {
        plan.kinds = {BrowKind::inner, BrowKind::outer};
      } else {
        plan.kinds = {brow_kind_from_string(k)};
      }
    }
    spec.correction = std::move(plan);
  }
  return spec;
}

// Per-channel scaling; a constant channel keeps its units (offset only).
TraceScaling robust_scaling(std::span<const BrowTrace> group) {
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
    }
    (kind == BrowKind::inner ? s.inner : s.outer) = u;
  }
  return s;
}

}  // namespace

std::vector<ScenarioSpec> scenarios_from_json(const json& j) {
  std::vector<ScenarioSpec> out;
  try {
    if (j.is_object() && j.contains("scenarios")) {
      for (const auto& s : j.at("scenarios")) out.push_back(spec_from_json(s));
    } else {
      out.push_back(spec_from_json(j));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed scenario: ") + e.what());
  }
  if (out.empty()) throw SchemaError("scenario file lists no scenarios");
  return out;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  const auto& sc = spec.scenario;
  ScenarioResult res;
  res.generated = generate(sc.face, sc.script, sc.distortion, sc.seed, sc.options);
  res.truth_trace = trace_of(res.generated.truth);
  res.truth_trace.video = sc.name + ".truth";
  res.observed_trace = trace_of(res.generated.observed);
  res.observed_trace.video = sc.name + ".observed";

  if (!spec.correction) {
    for (BrowKind kind : {BrowKind::inner, BrowKind::outer}) {
      res.scores[kind] = score_correction(res.truth_trace, res.observed_trace, res.observed_trace, kind);
    }
    return res;
  }

  const auto& plan = *spec.correction;
  std::vector<BrowTrace> group;
  for (const auto& tr : plan.train) {
    auto g = generate(tr.face, tr.script, tr.distortion, tr.seed, tr.options);
    if (g.observed.meta.tracker != res.generated.observed.meta.tracker) {
      throw InvalidArgument("training scenario '" + tr.name + "' uses a different tracker");
    }
    group.push_back(trace_of(g.observed));
    group.back().video = tr.name;
  }
  group.push_back(res.observed_trace);
  const TraceScaling scaling = robust_scaling(group);

  const BrowTrace truth_scaled = apply_scaling(res.truth_trace, scaling);
  const BrowTrace observed_scaled = apply_scaling(res.observed_trace, scaling);
  for (BrowKind kind : plan.kinds) {
    TrainingSet ts;
    ts.tracker = res.generated.observed.meta.tracker;
    ts.kind = kind;
    ts.camera_distance = sc.options.camera_distance;
    ts.scaling = scaling.of(kind);
    for (std::size_t i = 0; i + 1 < group.size(); ++i) ts.add(apply_scaling(group[i], scaling));
    const auto model = fit(ts, plan.features);
    const auto corrected = apply(model, observed_scaled);
    res.scores[kind] = score_correction(truth_scaled, observed_scaled, corrected, kind);
    res.models.emplace(kind, model);
  }
  return res;
}

}  // namespace browkit::synth

#include "browkit/correction.hpp"

#include "browkit/error.hpp"
#include "browkit/least_squares.hpp"
#include "browkit/text.hpp"

#include <array>
#include <cmath>

namespace browkit {

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, 9> kFeatureNames = {{
    {Feature::pitch, "pitch"},
    {Feature::yaw, "yaw"},
    {Feature::roll, "roll"},
    {Feature::pitch2, "pitch^2"},
    {Feature::yaw2, "yaw^2"},
    {Feature::roll2, "roll^2"},
    {Feature::pitch_yaw, "pitch*yaw"},
    {Feature::pitch_roll, "pitch*roll"},
    {Feature::yaw_roll, "yaw*roll"},
}};

void check_tracker(const CorrectionModel& model, const BrowTrace& trace) {
  if (model.tracker != trace.meta.tracker) {
    throw InvalidArgument("correction model was fitted for tracker '" +
                          std::string(to_string(model.tracker)) + "' but the trace comes from '" +
                          std::string(to_string(trace.meta.tracker)) + "'");
  }
}

}  // namespace

std::string_view to_string(Feature f) {
  for (const auto& [v, name] : kFeatureNames)
    if (v == f) return name;
  return "?";
}

Feature feature_from_string(std::string_view s) {
  for (const auto& [v, name] : kFeatureNames)
    if (name == s) return v;
  throw InvalidArgument("unknown correction feature '" + std::string(s) + "'");
}

double feature_value(Feature f, const HeadPose& p) {
  switch (f) {
    case Feature::pitch: return p.pitch;
    case Feature::yaw: return p.yaw;
    case Feature::roll: return p.roll;
    case Feature::pitch2: return p.pitch * p.pitch;
    case Feature::yaw2: return p.yaw * p.yaw;
    case Feature::roll2: return p.roll * p.roll;
    case Feature::pitch_yaw: return p.pitch * p.yaw;
    case Feature::pitch_roll: return p.pitch * p.roll;
    case Feature::yaw_roll: return p.yaw * p.roll;
  }
  return 0.0;
}

FeatureSpec linear_features() { return {Feature::pitch, Feature::yaw, Feature::roll}; }

FeatureSpec quadratic_features() {
  return {Feature::pitch,  Feature::yaw,       Feature::roll,       Feature::pitch2,  Feature::yaw2,
          Feature::roll2, Feature::pitch_yaw, Feature::pitch_roll, Feature::yaw_roll};
}

FeatureSpec parse_feature_spec(std::string_view spec) {
  spec = text::trim(spec);
  if (spec == "linear") return linear_features();
  if (spec == "quadratic") return quadratic_features();
  FeatureSpec out;
  for (const auto& item : text::split_csv_line(spec)) {
    if (item.empty()) continue;
    const Feature f = feature_from_string(item);
    for (Feature g : out) {
      if (g == f) throw InvalidArgument("feature '" + item + "' listed twice");
    }
    out.push_back(f);
  }
  if (out.empty()) throw InvalidArgument("feature spec is empty");
  return out;
}

std::string format_feature_spec(const FeatureSpec& spec) {
  std::string out;
  for (Feature f : spec) {
    if (!out.empty()) out.push_back(',');
    out += to_string(f);
  }
  return out;
}

void TrainingSet::add(const BrowTrace& scaled_trace) {
  if (scaled_trace.meta.eyebrows_raised != false) {
    throw InvalidArgument("training recording '" + scaled_trace.video +
                          "' is not flagged as neutral-eyebrow (eyebrows_raised=false)");
  }
  for (const auto& r : scaled_trace.records) {
    if (r.sample) rows.push_back({r.sample->pose, r.sample->value(kind)});
  }
}

double CorrectionModel::pose_component(const HeadPose& pose) const {
  double s = 0.0;
  for (std::size_t j = 0; j < features.size(); ++j) s += betas[j] * feature_value(features[j], pose);
  return s;
}

CorrectionModel fit(const TrainingSet& training, const FeatureSpec& features) {
  if (features.empty()) throw InvalidArgument("correction model needs at least one feature");
  const auto m = static_cast<Eigen::Index>(training.rows.size());
  const auto p = static_cast<Eigen::Index>(features.size() + 1);
  if (m < p) {
    throw InvalidArgument("training set has " + std::to_string(m) + " rows; at least " +
                          std::to_string(p) + " are needed for " +
                          std::to_string(features.size()) + " features plus intercept");
  }

  Eigen::MatrixXd x(m, p);
  Eigen::VectorXd y(m);
  std::vector<std::string> names{"intercept"};
  for (Feature f : features) names.emplace_back(to_string(f));
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = training.rows[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      x(i, j) = feature_value(features[static_cast<std::size_t>(j - 1)], row.pose);
    }
    y(i) = row.distance;
  }

  const auto ls = solve_least_squares(x, y, names);

  CorrectionModel model;
  model.tracker = training.tracker;
  model.kind = training.kind;
  model.camera_distance = training.camera_distance;
  model.features = features;
  model.scaling = training.scaling;
  model.beta0 = ls.coefficients(0);
  model.betas.assign(ls.coefficients.data() + 1, ls.coefficients.data() + p);
  model.standard_errors.assign(ls.standard_errors.data(), ls.standard_errors.data() + p);
  model.n = static_cast<std::size_t>(m);
  model.rmse = std::sqrt(ls.residual_sum_squares / static_cast<double>(m));
  for (double b : model.betas) {
    if (!std::isfinite(b)) throw IllConditionedError("fitted coefficients are not finite");
  }
  return model;
}

BrowTrace apply(const CorrectionModel& model, const BrowTrace& scaled_trace) {
  check_tracker(model, scaled_trace);
  BrowTrace out = scaled_trace;
  for (auto& r : out.records) {
    if (r.sample) r.sample->value(model.kind) -= model.pose_component(r.sample->pose);
  }
  return out;
}

BrowTrace apply_unscaled(const CorrectionModel& model, const BrowTrace& trace) {
  check_tracker(model, trace);
  BrowTrace out = trace;
  const double range = model.scaling.range();
  for (auto& r : out.records) {
    if (r.sample) r.sample->value(model.kind) -= range * model.pose_component(r.sample->pose);
  }
  return out;
}

nlohmann::ordered_json model_to_json(const CorrectionModel& model) {
  nlohmann::ordered_json j;
  j["tracker"] = to_string(model.tracker);
  j["brow_kind"] = to_string(model.kind);
  j["camera_distance"] = to_string(model.camera_distance);
  auto features = nlohmann::ordered_json::array();
  for (Feature f : model.features) features.push_back(to_string(f));
  j["features"] = features;
  j["beta0"] = model.beta0;
  j["betas"] = model.betas;
  j["rmse"] = model.rmse;
  j["n"] = model.n;
  j["scaling"] = {{"min", model.scaling.min}, {"max", model.scaling.max}};
  return j;
}

CorrectionModel model_from_json(const nlohmann::json& j) {
  auto need = [&](const char* name) -> const nlohmann::json& {
    if (!j.contains(name)) throw SchemaError(std::string("correction model is missing '") + name + "'");
    return j.at(name);
  };
  CorrectionModel m;
  try {
    m.tracker = tracker_from_string(need("tracker").get<std::string>());
    m.kind = brow_kind_from_string(need("brow_kind").get<std::string>());
    if (j.contains("camera_distance")) {
      m.camera_distance = camera_distance_from_string(j.at("camera_distance").get<std::string>());
    }
    for (const auto& f : need("features")) m.features.push_back(feature_from_string(f.get<std::string>()));
    m.beta0 = need("beta0").get<double>();
    m.betas = need("betas").get<std::vector<double>>();
    m.rmse = need("rmse").get<double>();
    m.n = need("n").get<std::size_t>();
    const auto& s = need("scaling");
    m.scaling = {s.at("min").get<double>(), s.at("max").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed correction model: ") + e.what());
  }
  if (m.features.size() != m.betas.size()) {
    throw SchemaError("correction model lists " + std::to_string(m.features.size()) +
                      " features but " + std::to_string(m.betas.size()) + " coefficients");
  }
  if (!std::isfinite(m.beta0)) throw SchemaError("correction model intercept is not finite");
  for (double b : m.betas)
    if (!std::isfinite(b)) throw SchemaError("correction model coefficient is not finite");
  if (!(m.scaling.max > m.scaling.min)) throw SchemaError("correction model scaling is degenerate");
  return m;
}

void save_model(const CorrectionModel& model, const std::filesystem::path& path) {
  text::atomic_write(path, model_to_json(model).dump(2) + "\n");
}

CorrectionModel load_model(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("model file '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace browkit

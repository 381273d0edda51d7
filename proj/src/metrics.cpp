#include "browkit/metrics.hpp"

#include "browkit/error.hpp"
#include "browkit/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace browkit {

namespace {

constexpr std::array<std::pair<Channel, std::string_view>, 5> kChannelNames = {{
    {Channel::inner, "inner"},
    {Channel::outer, "outer"},
    {Channel::pitch, "pitch"},
    {Channel::yaw, "yaw"},
    {Channel::roll, "roll"},
}};

constexpr std::array<Channel, 5> kAllChannels = {Channel::inner, Channel::outer, Channel::pitch,
                                                 Channel::yaw, Channel::roll};

// Relative width below which a scaling group counts as constant.
constexpr double kDegenerateRange = 1e-12;

}  // namespace

std::string_view to_string(BrowKind kind) { return kind == BrowKind::inner ? "inner" : "outer"; }

BrowKind brow_kind_from_string(std::string_view s) {
  if (s == "inner") return BrowKind::inner;
  if (s == "outer") return BrowKind::outer;
  throw InvalidArgument("unknown brow kind '" + std::string(s) + "'");
}

std::string_view to_string(Channel c) {
  for (const auto& [v, name] : kChannelNames)
    if (v == c) return name;
  return "?";
}

Channel channel_from_string(std::string_view s) {
  for (const auto& [v, name] : kChannelNames)
    if (name == s) return v;
  throw InvalidArgument("unknown channel '" + std::string(s) + "'");
}

double TraceSample::value(Channel c) const {
  switch (c) {
    case Channel::inner: return inner;
    case Channel::outer: return outer;
    case Channel::pitch: return pose.pitch;
    case Channel::yaw: return pose.yaw;
    case Channel::roll: return pose.roll;
  }
  return 0.0;
}

double& TraceSample::value(Channel c) {
  switch (c) {
    case Channel::inner: return inner;
    case Channel::outer: return outer;
    case Channel::pitch: return pose.pitch;
    case Channel::yaw: return pose.yaw;
    case Channel::roll: break;
  }
  return pose.roll;
}

std::size_t BrowTrace::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.present(); }));
}

std::vector<double> BrowTrace::present_values(Channel c) const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.sample) out.push_back(r.sample->value(c));
  return out;
}

std::vector<double> BrowTrace::present_values(BrowKind k) const {
  return present_values(k == BrowKind::inner ? Channel::inner : Channel::outer);
}

// ---------------------------------------------------------------------------

BrowTrace extract_trace(const LandmarkSequence& seq, const TraceOptions& options) {
  const auto first_present =
      std::find_if(seq.frames.begin(), seq.frames.end(), [](const auto& f) { return f.present; });
  if (first_present == seq.frames.end()) {
    throw InvalidArgument("sequence has no present frames");
  }

  const LandmarkFrame* reference = nullptr;
  if (options.pose_source == PoseSource::rigid_estimate) {
    if (options.reference_frame) {
      if (*options.reference_frame >= seq.frames.size()) {
        throw InvalidArgument("reference frame position out of range");
      }
      reference = &seq.frames[*options.reference_frame];
      if (!reference->present) throw InvalidArgument("reference frame is a dropout");
    } else {
      reference = &*first_present;
    }
  }

  BrowTrace trace;
  trace.meta = seq.meta;
  trace.records.reserve(seq.frames.size());
  for (const auto& f : seq.frames) {
    TraceRecord rec{f.frame_index, f.time_s, std::nullopt};
    if (f.present) {
      TraceSample s;
      if (options.pose_source == PoseSource::from_file) {
        if (!f.pose) {
          throw SchemaError("frame " + std::to_string(f.frame_index) +
                            " has no head pose; use rigid pose estimation");
        }
        s.pose = *f.pose;
      } else {
        s.pose = estimate_pose_rigid(f, *reference, options.rigid_roles);
      }
      const auto m = brow_measures(f, options.brow);
      s.inner = m->inner_mean;
      s.outer = m->outer_mean;
      rec.sample = s;
    }
    trace.records.push_back(rec);
  }
  return trace;
}

// ---------------------------------------------------------------------------

UnitScaling fit_unit_scaling(std::span<const std::vector<double>> group) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& series : group) {
    for (double v : series) {
      if (!std::isfinite(v)) throw InvalidArgument("scaling group contains a non-finite value");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("scaling group is empty");
  const double magnitude = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (!(hi - lo > kDegenerateRange * magnitude)) {
    throw DegenerateError("scaling group is constant (min = max); cannot scale to [0,1]");
  }
  return {lo, hi};
}

std::vector<double> scale_unit(std::span<const double> values, const UnitScaling& scaling) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(scaling.apply(v));
  return out;
}

std::vector<double> scale_unit(std::span<const double> values,
                               std::span<const std::vector<double>> group) {
  return scale_unit(values, fit_unit_scaling(group));
}

TraceScaling fit_trace_scaling(std::span<const BrowTrace> group) {
  std::vector<std::vector<double>> inner, outer;
  for (const auto& t : group) {
    inner.push_back(t.present_values(BrowKind::inner));
    outer.push_back(t.present_values(BrowKind::outer));
  }
  return {fit_unit_scaling(inner), fit_unit_scaling(outer)};
}

BrowTrace apply_scaling(const BrowTrace& trace, const TraceScaling& scaling) {
  BrowTrace out = trace;
  for (auto& r : out.records) {
    if (!r.sample) continue;
    r.sample->inner = scaling.inner.apply(r.sample->inner);
    r.sample->outer = scaling.outer.apply(r.sample->outer);
  }
  return out;
}

std::vector<BrowTrace> scale_group(std::span<const BrowTrace> group, ScaleMode mode) {
  std::vector<BrowTrace> out;
  out.reserve(group.size());
  if (mode == ScaleMode::per_group) {
    const auto scaling = fit_trace_scaling(group);
    for (const auto& t : group) out.push_back(apply_scaling(t, scaling));
  } else {
    for (const auto& t : group) {
      out.push_back(apply_scaling(t, fit_trace_scaling(std::span<const BrowTrace>(&t, 1))));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

BrowTrace normalize_time(const BrowTrace& trace, std::size_t n, std::optional<std::size_t> max_gap) {
  if (n < 2) throw InvalidArgument("normalized length must be at least 2");
  if (trace.present_count() < 2) {
    throw InvalidArgument("time normalization needs at least 2 present frames");
  }
  const auto& recs = trace.records;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (!(recs[i].t > recs[i - 1].t)) {
      throw InvalidArgument("trace times must be strictly increasing");
    }
  }

  std::vector<std::size_t> present;  // positions of present records
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].present()) present.push_back(i);

  const double t0 = recs.front().t;
  const double t1 = recs.back().t;
  BrowTrace out;
  out.meta = trace.meta;
  out.video = trace.video;
  out.records.reserve(n);

  std::size_t hi = 0;  // index into `present` of the first present record with t >= tk
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = k + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
    TraceRecord rec{static_cast<std::int64_t>(k), tk, std::nullopt};
    while (hi < present.size() && recs[present[hi]].t < tk) ++hi;
    if (hi < present.size() && recs[present[hi]].t == tk) {
      rec.sample = recs[present[hi]].sample;
    } else if (hi > 0 && hi < present.size()) {
      const auto& a = recs[present[hi - 1]];
      const auto& b = recs[present[hi]];
      const std::size_t dropped = present[hi] - present[hi - 1] - 1;
      if (!max_gap || dropped <= *max_gap) {
        const double w = (tk - a.t) / (b.t - a.t);
        TraceSample s;
        for (Channel c : kAllChannels) {
          s.value(c) = (1.0 - w) * a.sample->value(c) + w * b.sample->value(c);
        }
        rec.sample = s;
      }
    }
    out.records.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DeviationVariant v) {
  switch (v) {
    case DeviationVariant::rms: return "rms";
    case DeviationVariant::sd_of_differences: return "sd";
    case DeviationVariant::mean_abs: return "mean_abs";
  }
  return "?";
}

DeviationVariant deviation_variant_from_string(std::string_view s) {
  if (s == "rms") return DeviationVariant::rms;
  if (s == "sd") return DeviationVariant::sd_of_differences;
  if (s == "mean_abs") return DeviationVariant::mean_abs;
  throw InvalidArgument("unknown deviation variant '" + std::string(s) + "' (rms|sd|mean_abs)");
}

double baseline(const BrowTrace& trace, BrowKind kind, std::size_t baseline_window) {
  if (baseline_window == 0) throw InvalidArgument("baseline window must be at least 1 frame");
  const auto values = trace.present_values(kind);
  if (values.size() < baseline_window) {
    throw InvalidArgument("trace has fewer present frames than the baseline window");
  }
  return std::accumulate(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(baseline_window), 0.0) /
         static_cast<double>(baseline_window);
}

std::vector<double> baseline_differences(const BrowTrace& trace, BrowKind kind,
                                         std::size_t baseline_window) {
  const double b = baseline(trace, kind, baseline_window);
  auto values = trace.present_values(kind);
  for (double& v : values) v -= b;
  return values;
}

double deviation(const BrowTrace& trace, BrowKind kind, std::size_t baseline_window,
                 DeviationVariant variant) {
  const auto diffs = baseline_differences(trace, kind, baseline_window);
  const double n = static_cast<double>(diffs.size());
  switch (variant) {
    case DeviationVariant::rms: {
      double ss = 0.0;
      for (double d : diffs) ss += d * d;
      return std::sqrt(ss / n);
    }
    case DeviationVariant::sd_of_differences:
      return stats::sample_sd(diffs);
    case DeviationVariant::mean_abs: {
      double s = 0.0;
      for (double d : diffs) s += std::abs(d);
      return s / n;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

AggregateTrace aggregate_condition(std::span<const BrowTrace> traces, BrowKind kind,
                                   std::string key) {
  if (traces.empty()) throw InvalidArgument("cannot aggregate an empty group ('" + key + "')");
  const std::size_t n = traces.front().records.size();
  for (const auto& t : traces) {
    if (t.records.size() != n) {
      throw InvalidArgument("traces in group '" + key +
                            "' have different lengths; normalize time first");
    }
  }
  AggregateTrace agg;
  agg.key = std::move(key);
  agg.kind = kind;
  agg.traces = traces.size();
  agg.mean.resize(n);
  agg.sd.resize(n);
  agg.count.resize(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> vals;
    for (const auto& t : traces)
      if (const auto& s = t.records[k].sample) vals.push_back(s->value(kind));
    agg.count[k] = vals.size();
    if (vals.empty()) continue;
    agg.mean[k] = stats::mean(vals);
    agg.sd[k] = vals.size() >= 2 ? stats::sample_sd(vals) : 0.0;
  }
  return agg;
}

}  // namespace browkit

// browkit command-line entry point.
#include "browkit/commands.hpp"
#include "browkit/error.hpp"
#include "browkit/text.hpp"

#include <CLI11.hpp>

#include <iostream>

using browkit::cli::RunConfig;

namespace {

struct Flags {
  std::string config;
  RunConfig cfg;
};

void add_input_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("inputs", cfg.inputs, "Input files or glob patterns");
  sub->add_option("-o,--output", cfg.output_dir, "Output directory");
  sub->add_option("--tracker", cfg.tracker, "auto|openface|mediapipe|custom");
  sub->add_option("--schema", cfg.schema, "Landmark schema JSON");
  sub->add_option("--manifest", cfg.manifest, "CSV with per-file metadata (path column)");
  sub->add_option("--camera-distance", cfg.camera_distance, "close|middle|far");
  sub->add_option("--condition", cfg.condition, "Condition label applied to every input");
  sub->add_option("--subject", cfg.subject, "Subject label applied to every input");
  sub->add_option("--eyebrows-raised", cfg.eyebrows_raised, "true|false");
  sub->add_option("--confidence", cfg.confidence_threshold, "OpenFace confidence threshold");
  sub->add_option("--fps", cfg.fps, "Frame rate when timestamps are missing");
  sub->add_option("--pose-source", cfg.pose_source, "auto|file|rigid");
  sub->add_flag("--signed", cfg.signed_distance, "Signed brow distances (above the eye line is positive)");
  sub->add_flag("--planar", cfg.planar, "Drop depth before measuring");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eyebrow position measurement and tracker distortion correction"};
  app.require_subcommand(1);
  Flags f;
  RunConfig& cfg = f.cfg;
  app.add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);

  auto* extract = app.add_subcommand("extract", "Landmark files to interchange and trace CSVs");
  add_input_flags(extract, cfg);
  extract->add_flag("--derotated", cfg.derotated, "Also write pose-removed landmark files");

  auto* deviations = app.add_subcommand("deviations", "Deviation table per recording and tracker pair");
  add_input_flags(deviations, cfg);
  deviations->add_option("--baseline-window", cfg.baseline_window, "Frames averaged for the baseline")
      ->check(CLI::PositiveNumber);
  deviations->add_option("--variant", cfg.deviation_variant, "rms|sd|mean_abs");
  deviations->add_option("--scale-mode", cfg.scale_mode, "per_group|per_video");

  auto* correct = app.add_subcommand("correct", "Fit or apply a pose correction model");
  add_input_flags(correct, cfg);
  correct->add_option("--model", cfg.models, "Model JSON files to apply");
  correct->add_option("--fit", cfg.fit_inputs, "Neutral-brow recordings to fit on");
  correct->add_option("--features", cfg.features, "linear|quadratic|comma-separated feature list");
  correct->add_option("--brow-kind", cfg.brow_kind, "inner|outer|both");

  auto* aggregate = app.add_subcommand("aggregate", "Mean and SD traces per group");
  add_input_flags(aggregate, cfg);
  aggregate->add_option("--group-by", cfg.group_by, "condition|camera_distance|tracker|subject|eyebrows_raised");
  aggregate->add_option("-n,--points", cfg.normalize_n, "Time-normalized length")->check(CLI::Range(2, 1000000));
  aggregate->add_option("--max-gap", cfg.max_gap, "Largest run of absent frames bridged by interpolation");
  aggregate->add_flag("!--no-normalize", cfg.normalize, "Keep native frame timing");
  aggregate->add_flag("!--no-scale", cfg.scale, "Skip per-group unit scaling");
  aggregate->add_option("--brow-kind", cfg.brow_kind, "inner|outer|both");

  auto* synth = app.add_subcommand("synth", "Generate synthetic scenarios and score corrections");
  synth->add_option("scenario", cfg.scenario, "Scenario JSON file");
  synth->add_option("-o,--output", cfg.output_dir, "Output directory");
  auto* seed_opt = synth->add_option("--seed", cfg.seed, "Override every scenario's seed");

  auto* plot = app.add_subcommand("plot-data", "Long-format CSV and SVG chart of traces");
  add_input_flags(plot, cfg);
  plot->add_option("--channels", cfg.channels, "inner|outer|pitch|yaw|roll")->delimiter(',');
  plot->add_option("--name", cfg.plot_name, "Output file stem");
  plot->add_option("--title", cfg.title, "Chart title");

  // Parse once to find the config file, then overlay flags on top of it.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (!f.config.empty()) {
    try {
      RunConfig base;
      browkit::cli::apply_config_json(base, nlohmann::json::parse(browkit::text::read_file(f.config)));
      cfg = base;
      app.clear();
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  cfg.seed_set = cfg.seed_set || seed_opt->count() > 0;

  try {
    if (*extract) return browkit::cli::cmd_extract(cfg, std::cerr);
    if (*deviations) return browkit::cli::cmd_deviations(cfg, std::cerr);
    if (*correct) return browkit::cli::cmd_correct(cfg, std::cerr);
    if (*aggregate) return browkit::cli::cmd_aggregate(cfg, std::cerr);
    if (*synth) return browkit::cli::cmd_synth(cfg, std::cerr);
    if (*plot) return browkit::cli::cmd_plot_data(cfg, std::cerr);
  } catch (const browkit::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

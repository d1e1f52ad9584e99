// trajkit: convert ADAS car-following datasets to the uniform schema,
// clean them and calibrate the linear car-following model.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trajkit/error.hpp"
#include "trajkit/pipeline.hpp"

namespace {

void print_error(const trajkit::json& err) { std::cerr << err.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajkit - uniform car-following trajectory toolkit"};
  app.set_version_flag("--version", std::string(trajkit::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string profile;
  for (const char* name : {"ingest", "clean", "report", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides config)");
    sub->add_option("--profile", profile, "Built-in dataset profile (overrides config)");
  }
  app.get_subcommand("ingest")->description("Parse raw files into the uniform CSV");
  app.get_subcommand("clean")->description("Trim, filter and remove outliers");
  app.get_subcommand("report")->description("Statistics, histograms and calibration");
  app.get_subcommand("pipeline")->description("ingest, clean and report in one run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : trajkit::kExitInvalidInput;
  }

  try {
    const auto cfg = trajkit::load_run_config(
        config_path, profile.empty() ? std::nullopt : std::optional<std::string>(profile),
        out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir));
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "ingest") return trajkit::cmd_ingest(cfg);
    if (cmd == "clean") return trajkit::cmd_clean(cfg);
    if (cmd == "report") return trajkit::cmd_report(cfg);
    return trajkit::cmd_pipeline(cfg);
  } catch (const trajkit::Error& e) {
    print_error(trajkit::error_json(e));
    return trajkit::kExitInvalidInput;
  } catch (const std::exception& e) {
    print_error({{"code", "IoError"}, {"message", e.what()}});
    return trajkit::kExitInvalidInput;
  }
}

#include <CLI11.hpp>

#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "stcox/errors.hpp"

namespace {

enum Exit { kOk = 0, kUserError = 1, kNumericalFailure = 2 };

int report(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space x circular-time Cox process models: ingest, simulate, fit, validate, summarize"};
  app.require_subcommand(1);
  stcox::cli::Overrides o;
  app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "base random seed");
  app.add_option("--threads", o.threads, "worker threads for chains")->check(CLI::PositiveNumber);
  app.add_option("--output", o.output, "output directory");

  auto* ingest = app.add_subcommand("ingest", "read the event CSV and write the binned grid");
  auto* simulate = app.add_subcommand("simulate", "simulate a point pattern from the configured truth");
  auto* fit = app.add_subcommand("fit", "fit the configured model variant");
  auto* validate = app.add_subcommand("validate", "p-thin, fit on train and score on test");
  auto* summarize = app.add_subcommand("summarize", "tables and surfaces from a finished fit");
  summarize->add_option("--input", o.input, "directory written by fit")->required();
  summarize->add_option("--truth", o.truth, "truth JSON written by simulate");
  for (auto* sub : {ingest, simulate, fit, validate, summarize}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kUserError);
  }

  try {
    const stcox::RunConfig cfg = stcox::cli::resolve(o);
    if (*ingest) stcox::cli::run_ingest(cfg);
    if (*simulate) stcox::cli::run_simulate(cfg);
    if (*fit) stcox::cli::run_fit(cfg);
    if (*validate) stcox::cli::run_validate(cfg);
    if (*summarize) stcox::cli::run_summarize(cfg, o);
  } catch (const stcox::NumericalError& e) {
    return report("numerical", e.what(), kNumericalFailure);
  } catch (const stcox::InputError& e) {
    return report("input", e.what(), kUserError);
  } catch (const stcox::ParameterError& e) {
    return report("parameter", e.what(), kUserError);
  } catch (const nlohmann::json::exception& e) {
    return report("input", e.what(), kUserError);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kNumericalFailure);
  }
  return kOk;
}

#pragma once

#include <optional>
#include <string>

#include "stcox/config.hpp"

namespace stcox::cli {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output;
  std::optional<std::string> input;  // summarize: directory holding a fit
  std::optional<std::string> truth;  // summarize: truth JSON for the True column
};

RunConfig resolve(const Overrides& o);

void run_ingest(const RunConfig& cfg);
void run_simulate(const RunConfig& cfg);
void run_fit(const RunConfig& cfg);
void run_validate(const RunConfig& cfg);
void run_summarize(const RunConfig& cfg, const Overrides& o);

}  // namespace stcox::cli

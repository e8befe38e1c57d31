#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "stcox/diagnostics.hpp"
#include "stcox/errors.hpp"
#include "stcox/io.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/simulate.hpp"
#include "stcox/validate.hpp"

namespace fs = std::filesystem;

namespace stcox::cli {

namespace {

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) { open_out(path) << j.dump(2) << '\n'; }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("'" + path.string() + "' is not valid JSON");
  return j;
}

struct LoadedGrid {
  SpaceTimeGrid grid;
  std::vector<Rejection> rejected;
  std::size_t rows = 0;
};

LoadedGrid load_grid(const RunConfig& cfg) {
  if (cfg.events_path.empty()) throw InputError("config key 'events' (events CSV path) is not set");
  const IngestResult ingested = ingest_file(cfg.events_path, {cfg.reference, cfg.region, cfg.type_filter});
  GridBuild built = build_grid(cfg.region, cfg.nx, cfg.ny, cfg.n_time, ingested.events, cfg.weekday_classes);
  LoadedGrid out{std::move(built.grid), ingested.rejected, ingested.rows};
  // Grid rejections index ingested events, not CSV rows.
  for (const auto& r : built.rejected) out.rejected.push_back({0, "event " + std::to_string(r.row) + ": " + r.reason});
  return out;
}

void write_rejections(const fs::path& path, const std::vector<Rejection>& rejected) {
  auto out = open_out(path);
  out << "row,reason\n";
  for (const auto& r : rejected) out << r.row << ",\"" << r.reason << "\"\n";
}

struct FitOutcome {
  std::vector<LandmarkSpec> landmarks;
  std::optional<PosteriorChain> nhpp_stage;
  std::vector<PosteriorChain> chains;
};

FitOutcome fit_chains(const RunConfig& cfg, const SpaceTimeGrid& grid) {
  FitOutcome out;
  out.landmarks = build_landmarks(cfg, grid);
  if (is_lgcp(cfg.variant) && !cfg.rho_overridden()) {
    SamplerOptions stage = cfg.sampler;
    stage.store_fields = false;
    Rng rng = make_stream(cfg.seed, 0);
    out.nhpp_stage = fit_nhpp(grid, out.landmarks, cfg.priors, stage, rng);
    out.landmarks = plug_in_rho(out.landmarks, *out.nhpp_stage);
  }

  FitSpec spec;
  spec.variant = cfg.variant;
  spec.landmarks = out.landmarks;
  spec.priors = cfg.priors;
  spec.sampler = cfg.sampler;
  spec.covariance = cfg.covariance;
  if (cfg.variant == ModelVariant::LgcpSeparable) spec.covariance.gamma = 0.0;

  const auto n = static_cast<std::size_t>(cfg.chains);
  out.chains.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < n; c = next++) {
      try {
        Rng rng = make_stream(cfg.seed, c + 1);
        out.chains[c] = fit(grid, spec, rng);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), n);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

PosteriorChain pooled(const std::vector<PosteriorChain>& chains) {
  PosteriorChain all = chains.front();
  for (std::size_t c = 1; c < chains.size(); ++c) {
    all.draws.insert(all.draws.end(), chains[c].draws.begin(), chains[c].draws.end());
  }
  return all;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void print_table(std::ostream& out, const std::vector<ParameterSummary>& rows) {
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %24s %8s", "Parameter", "True", "Mean", "95% CI", "IF");
  out << line << '\n';
  for (const auto& r : rows) {
    const std::string ci = "(" + fmt(r.lower) + ", " + fmt(r.upper) + ")";
    std::snprintf(line, sizeof line, "%-16s %10s %10s %24s %8s", r.name.c_str(), r.truth ? fmt(*r.truth).c_str() : "-",
                  fmt(r.mean).c_str(), ci.c_str(), fmt(r.inefficiency).c_str());
    out << line << '\n';
  }
}

void write_summary_csv(const fs::path& path, const std::vector<ParameterSummary>& rows) {
  auto out = open_out(path);
  out.precision(10);
  out << "parameter,true,mean,ci_lower,ci_upper,inefficiency\n";
  for (const auto& r : rows) {
    out << r.name << ',';
    if (r.truth) out << *r.truth;
    out << ',' << r.mean << ',' << r.lower << ',' << r.upper << ',' << r.inefficiency << '\n';
  }
}

nlohmann::json block_json(const PosteriorChain& chain) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : chain.blocks) {
    blocks.push_back({{"name", b.name},
                      {"acceptance_rate", b.acceptance_rate()},
                      {"failed_factorizations", b.failed_factorizations},
                      {"final_scale", b.final_scale}});
  }
  return blocks;
}

}  // namespace

RunConfig resolve(const Overrides& o) {
  nlohmann::json j = load_config(o.config_path);
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;
  if (o.output) j["output"] = *o.output;
  return parse_config(j);
}

void run_ingest(const RunConfig& cfg) {
  const LoadedGrid g = load_grid(cfg);
  const fs::path dir = output_dir(cfg);
  write_json(dir / "grid.json", {{"config", cfg.resolved}, {"grid", grid_to_json(g.grid)}});
  write_rejections(dir / "rejections.csv", g.rejected);
  std::cout << nlohmann::json{{"rows", g.rows},
                              {"events", g.grid.total_count()},
                              {"rejected", g.rejected.size()},
                              {"spatial_cells", g.grid.n_spatial()},
                              {"time_cells", g.grid.n_time()}}
                   .dump()
            << '\n';
}

void run_simulate(const RunConfig& cfg) {
  const SpaceTimeGrid grid(cfg.region, cfg.nx, cfg.ny, cfg.n_time, cfg.weekday_classes);
  ModelState truth = cfg.truth;
  truth.landmarks = build_landmarks(cfg, grid);
  if (truth.beta.size() != truth.landmarks.size()) {
    throw InputError("simulate.truth.beta needs one entry per landmark");
  }
  SimConfig sim{truth, grid, cfg.seed, cfg.emit_points};
  const GeoPoint reference = cfg.reference;
  const PointFilter filter = csv_roundtrip_filter(grid, reference);
  Rng rng = make_stream(cfg.seed, 0);
  const SimResult result = simulate_pattern(sim, rng, filter);

  const fs::path dir = output_dir(cfg);
  if (result.points) {
    auto out = open_out(dir / "events.csv");
    write_events_csv(out, *result.points, reference);
  }
  write_json(dir / "grid.json", {{"config", cfg.resolved}, {"grid", grid_to_json(result.grid)}});
  nlohmann::json truth_json = truth;
  if (result.z.size() > 0) truth_json["z"] = std::vector<double>(result.z.data(), result.z.data() + result.z.size());
  write_json(dir / "truth.json", {{"config", cfg.resolved}, {"truth", truth_json}});
  std::cout << nlohmann::json{{"events", result.grid.total_count()}, {"seed", cfg.seed}}.dump() << '\n';
}

void run_fit(const RunConfig& cfg) {
  const LoadedGrid g = load_grid(cfg);
  const FitOutcome fitted = fit_chains(cfg, g.grid);
  const fs::path dir = output_dir(cfg);
  write_json(dir / "grid.json", {{"config", cfg.resolved}, {"grid", grid_to_json(g.grid)}});
  nlohmann::json meta = {{"config", cfg.resolved}, {"seed", cfg.seed}, {"variant", to_string(cfg.variant)},
                         {"landmarks", fitted.landmarks}, {"chains", nlohmann::json::array()}};
  if (fitted.nhpp_stage) {
    meta["rho_plug_in"] = fitted.nhpp_stage->rho_posterior_means();
    auto out = open_out(dir / "nhpp_stage.jsonl");
    write_chain_jsonl(out, *fitted.nhpp_stage, cfg.resolved);
  }
  for (std::size_t c = 0; c < fitted.chains.size(); ++c) {
    const std::string name = "chain_" + std::to_string(c) + ".jsonl";
    auto out = open_out(dir / name);
    write_chain_jsonl(out, fitted.chains[c], cfg.resolved);
    meta["chains"].push_back({{"file", name}, {"blocks", block_json(fitted.chains[c])},
                              {"mean_ess_shrinks", fitted.chains[c].mean_ess_shrinks}});
  }
  write_json(dir / "fit.json", meta);
  const auto rows = summarize(pooled(fitted.chains));
  write_summary_csv(dir / "summary.csv", rows);
  print_table(std::cout, rows);
}

void run_validate(const RunConfig& cfg) {
  const LoadedGrid g = load_grid(cfg);
  Rng split_rng = make_stream(cfg.seed, 1000);
  const ThinningSplit split = p_thin(g.grid.counts(), cfg.validation.p, split_rng);
  const SpaceTimeGrid train = g.grid.with_counts(split.train);
  const FitOutcome fitted = fit_chains(cfg, train);
  Rng score_rng = make_stream(cfg.seed, 1001);
  const ValidationReport report = score_model(pooled(fitted.chains), train, split.test, cfg.validation, score_rng);

  const fs::path dir = output_dir(cfg);
  nlohmann::json j = report;
  j["config"] = cfg.resolved;
  j["seed"] = cfg.seed;
  j["train_events"] = train.total_count();
  write_json(dir / "validation.json", j);

  auto out = open_out(dir / "local_pic.csv");
  out.precision(10);
  out << "q,time_range,cell,easting,northing,coverage\n";
  for (const auto& e : report.entries) {
    for (std::size_t s = 0; s < e.local_pic.size(); ++s) {
      const auto& c = train.spatial_cells()[s].centroid;
      out << e.q << ',' << to_string(e.range) << ',' << s << ',' << c.easting << ',' << c.northing << ',';
      if (!std::isnan(e.local_pic[s])) out << e.local_pic[s];
      out << '\n';
    }
  }
  std::printf("%-6s %-8s %10s %8s\n", "q", "range", "mean RPS", "PIC");
  for (const auto& e : report.entries) {
    std::printf("%-6.3g %-8s %10.4f %8.3f\n", e.q, to_string(e.range).c_str(), e.mean_rps, e.pic);
  }
}

void run_summarize(const RunConfig& cfg, const Overrides& o) {
  const fs::path in(*o.input);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(in)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("chain_", 0) == 0 && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  if (files.empty()) throw InputError("no chain_*.jsonl files in '" + in.string() + "'");
  std::sort(files.begin(), files.end());
  std::vector<PosteriorChain> chains;
  for (const auto& f : files) {
    std::ifstream s(f);
    chains.push_back(read_chain_jsonl(s));
  }
  const PosteriorChain chain = pooled(chains);
  const SpaceTimeGrid grid = grid_from_json(read_json(in / "grid.json").at("grid"));

  std::map<std::string, double> truth;
  if (o.truth) truth = truth_map(read_json(*o.truth).at("truth").get<ModelState>());
  const auto rows = summarize(chain, truth);

  const fs::path dir = output_dir(cfg);
  write_summary_csv(dir / "summary.csv", rows);
  print_table(std::cout, rows);

  auto weekday = open_out(dir / "weekday.csv");
  weekday.precision(10);
  weekday << "weekday_class,expected_total_mean,expected_total_lower,expected_total_upper,delta_mean,delta_lower,"
             "delta_upper\n";
  for (const auto& p : weekday_panels(chain, grid)) {
    weekday << p.weekday_class << ',' << p.expected_total.mean << ',' << p.expected_total.lower << ','
            << p.expected_total.upper << ',' << p.delta.mean << ',' << p.delta.lower << ',' << p.delta.upper << '\n';
  }

  auto surface = open_out(dir / "surface.csv");
  surface.precision(10);
  surface << "cell,time_cell,easting,northing,time,lambda_mean,lambda_lower,lambda_upper\n";
  for (const auto& c : intensity_surface(chain, grid)) {
    surface << c.cell << ',' << grid.time_of(c.cell) << ',' << c.centroid.easting << ',' << c.centroid.northing << ','
            << c.time << ',' << c.mean << ',' << c.lower << ',' << c.upper << '\n';
  }
}

}  // namespace stcox::cli

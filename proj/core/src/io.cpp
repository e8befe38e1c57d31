#include "stcox/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"

namespace stcox {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr int kSecondsPerDay = 86400;

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw InputError("unterminated quoted field");
  return fields;
}

std::optional<double> parse_clock(const std::string& text) {
  const std::string t = trim(text);
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == ':') {
      parts.push_back(t.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 2 && parts.size() != 3) return std::nullopt;
  std::array<int, 3> v{0, 0, 0};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != 2) return std::nullopt;
    const auto x = parse_int(parts[i]);
    if (!x) return std::nullopt;
    v[i] = *x;
  }
  if (v[0] < 0 || v[0] > 23 || v[1] < 0 || v[1] > 59 || v[2] < 0 || v[2] > 59) return std::nullopt;
  return v[0] + v[1] / 60.0 + v[2] / 3600.0;
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& options) {
  options.region.validate();
  std::string line;
  if (!std::getline(in, line)) throw InputError("event CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[lower(trim(header[i]))] = i;
  std::string missing;
  for (const char* name : {"date", "time", "lat", "lon", "type"}) {
    if (!column.count(name)) missing += std::string(missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) throw InputError("event CSV is missing columns: " + missing);

  IngestResult result;
  const std::size_t width = header.size();
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::size_t row = ++result.rows;
    auto reject = [&](std::string reason) { result.rejected.push_back({row, std::move(reason)}); };
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const InputError& e) {
      reject(e.what());
      continue;
    }
    if (f.size() < width) {
      reject("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
      continue;
    }
    const std::string type = trim(f[column["type"]]);
    if (options.type_filter && type != *options.type_filter) continue;

    CivilDate date;
    try {
      date = CivilDate::parse_iso(trim(f[column["date"]]));
    } catch (const InputError& e) {
      reject(e.what());
      continue;
    }
    const auto clock = parse_clock(f[column["time"]]);
    if (!clock) {
      reject("malformed time '" + trim(f[column["time"]]) + "'");
      continue;
    }
    const auto lat = parse_double(f[column["lat"]]);
    const auto lon = parse_double(f[column["lon"]]);
    if (!lat || !lon) {
      reject("malformed coordinates");
      continue;
    }
    PlanarPoint p;
    try {
      p = project({*lat, *lon}, options.reference);
    } catch (const InputError& e) {
      reject(e.what());
      continue;
    }
    if (!options.region.contains(p)) {
      reject("outside the study region");
      continue;
    }
    EventRecord e;
    e.easting = p.easting;
    e.northing = p.northing;
    e.clock_angle = wrap_time(*clock);
    e.weekday = assign_day_of_week(date, *clock);
    e.type_label = type;
    result.events.push_back(std::move(e));
  }
  return result;
}

IngestResult ingest_file(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open events file '" + path + "'");
  return ingest_csv(in, options);
}

CsvRow format_event(const EventRecord& e, const GeoPoint& reference) {
  long secs = std::lround(unwrap_time(e.clock_angle) * 3600.0) % kSecondsPerDay;
  CivilDate date = kBaseWeek.plus_days(static_cast<int>(e.weekday));
  // Clock times before 02:00 belong to the previous weekday.
  if (secs < static_cast<long>(kDayBoundaryHour * 3600)) date = date.plus_days(1);
  char time[16];
  std::snprintf(time, sizeof time, "%02ld:%02ld:%02ld", secs / 3600, (secs / 60) % 60, secs % 60);
  const GeoPoint g = unproject(e.location(), reference);
  char lat[32];
  char lon[32];
  std::snprintf(lat, sizeof lat, "%.12f", g.latitude);
  std::snprintf(lon, sizeof lon, "%.12f", g.longitude);
  return {date.iso(), time, lat, lon, e.type_label};
}

EventRecord reparse_event(const EventRecord& e, const GeoPoint& reference) {
  const CsvRow row = format_event(e, reference);
  const double clock = *parse_clock(row.time);
  EventRecord out;
  const PlanarPoint p = project({*parse_double(row.lat), *parse_double(row.lon)}, reference);
  out.easting = p.easting;
  out.northing = p.northing;
  out.clock_angle = wrap_time(clock);
  out.weekday = assign_day_of_week(CivilDate::parse_iso(row.date), clock);
  out.type_label = e.type_label;
  return out;
}

PointFilter csv_roundtrip_filter(const SpaceTimeGrid& grid, const GeoPoint& reference) {
  return [&grid, reference](const EventRecord& e, const CellIndex& idx) {
    const auto loc = grid.locate(reparse_event(e, reference));
    return loc && loc->spatial == idx.spatial && loc->time == idx.time && loc->weekday_class == idx.weekday_class;
  };
}

void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events, const GeoPoint& reference) {
  out << "date,time,lat,lon,type\n";
  for (const auto& e : events) {
    const CsvRow r = format_event(e, reference);
    out << r.date << ',' << r.time << ',' << r.lat << ',' << r.lon << ',' << quote_if_needed(r.type) << '\n';
  }
}

namespace {

nlohmann::json options_to_json(const SamplerOptions& o) {
  std::vector<std::string> fixed;
  for (Param p : o.fixed) fixed.push_back(to_string(p));
  return {{"iterations", o.iterations}, {"burn_in", o.burn_in},         {"thin", o.thin},
          {"ess_steps", o.ess_steps},   {"adapt", o.adapt},             {"covariance_warmup", o.covariance_warmup},
          {"fixed", fixed},             {"store_fields", o.store_fields}, {"level_moves", o.level_moves},
          {"centred_moves", o.centred_moves}};
}

SamplerOptions options_from_json(const nlohmann::json& j) {
  SamplerOptions o;
  o.iterations = j.at("iterations").get<std::size_t>();
  o.burn_in = j.at("burn_in").get<std::size_t>();
  o.thin = j.at("thin").get<std::size_t>();
  o.ess_steps = j.value("ess_steps", 1);
  o.adapt = j.value("adapt", true);
  o.covariance_warmup = j.value("covariance_warmup", o.covariance_warmup);
  for (const auto& p : j.value("fixed", std::vector<std::string>{})) o.fixed.insert(param_from_string(p));
  o.store_fields = j.value("store_fields", true);
  o.level_moves = j.value("level_moves", true);
  o.centred_moves = j.value("centred_moves", true);
  return o;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_chain_jsonl(std::ostream& out, const PosteriorChain& chain, const nlohmann::json& config) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : chain.blocks) {
    blocks.push_back({{"name", b.name},
                      {"proposed", b.proposed},
                      {"accepted", b.accepted},
                      {"acceptance_rate", b.acceptance_rate()},
                      {"failed_factorizations", b.failed_factorizations},
                      {"final_scale", b.final_scale}});
  }
  nlohmann::json adaptation = nlohmann::json::array();
  for (const auto& a : chain.adaptation) {
    adaptation.push_back(
        {{"iteration", a.iteration}, {"block", a.block}, {"scale", a.scale}, {"acceptance_rate", a.acceptance_rate}});
  }
  const nlohmann::json header = {{"kind", "chain"},
                                 {"variant", to_string(chain.variant)},
                                 {"landmarks", chain.landmarks},
                                 {"weekday_classes", chain.weekday_classes},
                                 {"n_spatial", chain.n_spatial},
                                 {"n_time", chain.n_time},
                                 {"priors", chain.priors},
                                 {"options", options_to_json(chain.options)},
                                 {"blocks", blocks},
                                 {"adaptation", adaptation},
                                 {"mean_ess_shrinks", chain.mean_ess_shrinks},
                                 {"log_likelihood_trace", chain.log_likelihood_trace},
                                 {"config", config}};
  out << header.dump() << '\n';
  for (const auto& d : chain.draws) {
    nlohmann::json j = {{"iteration", d.iteration}, {"beta", d.beta},         {"rho", d.rho},
                        {"mu", d.mu},               {"delta", d.delta},       {"covariance", d.cov},
                        {"log_likelihood", d.log_likelihood}};
    if (d.nu.size() > 0) j["nu"] = to_vector(d.nu);
    if (d.log_base.size() > 0) j["log_base"] = to_vector(d.log_base);
    out << j.dump() << '\n';
  }
}

PosteriorChain read_chain_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("chain file is empty");
  PosteriorChain chain;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.value("kind", "") != "chain") throw InputError("not a chain file");
    chain.variant = variant_from_string(header.at("variant").get<std::string>());
    chain.landmarks = header.at("landmarks").get<std::vector<LandmarkSpec>>();
    chain.weekday_classes = header.at("weekday_classes").get<int>();
    chain.n_spatial = header.at("n_spatial").get<std::size_t>();
    chain.n_time = header.at("n_time").get<std::size_t>();
    chain.priors = header.at("priors").get<PriorSpec>();
    chain.options = options_from_json(header.at("options"));
    for (const auto& b : header.at("blocks")) {
      BlockStats s;
      s.name = b.at("name").get<std::string>();
      s.proposed = b.at("proposed").get<std::size_t>();
      s.accepted = b.at("accepted").get<std::size_t>();
      s.failed_factorizations = b.at("failed_factorizations").get<std::size_t>();
      s.final_scale = b.at("final_scale").get<double>();
      chain.blocks.push_back(s);
    }
    chain.mean_ess_shrinks = header.value("mean_ess_shrinks", 0.0);
    chain.log_likelihood_trace = header.value("log_likelihood_trace", std::vector<double>{});
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      Draw d;
      d.iteration = j.at("iteration").get<std::size_t>();
      d.beta = j.at("beta").get<std::vector<double>>();
      d.rho = j.at("rho").get<std::vector<double>>();
      d.mu = j.at("mu").get<std::vector<double>>();
      d.delta = j.at("delta").get<std::vector<double>>();
      d.cov = j.at("covariance").get<CovarianceParams>();
      d.log_likelihood = j.at("log_likelihood").get<double>();
      if (j.contains("nu")) d.nu = from_vector(j.at("nu").get<std::vector<double>>());
      if (j.contains("log_base")) d.log_base = from_vector(j.at("log_base").get<std::vector<double>>());
      chain.draws.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed chain file: ") + e.what());
  }
  return chain;
}

}  // namespace stcox

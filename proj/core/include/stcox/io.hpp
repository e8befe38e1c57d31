#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stcox/geomtime.hpp"
#include "stcox/mcmc.hpp"
#include "stcox/simulate.hpp"

namespace stcox {

/// Splits one CSV record; double quotes delimit fields and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line);

/// "HH:MM" or "HH:MM:SS" to clock hours; nullopt when malformed.
std::optional<double> parse_clock(const std::string& text);

struct IngestOptions {
  GeoPoint reference;  // projection origin
  Region region;
  std::optional<std::string> type_filter;  // keep only this crime type
};

struct IngestResult {
  std::vector<EventRecord> events;
  std::vector<Rejection> rejected;  // rows are 1-based data rows
  std::size_t rows = 0;
};

/// Reads an event CSV with header columns date, time, lat, lon, type (any
/// order, extra columns ignored).  Missing columns throw InputError; bad rows
/// and rows outside the region go to the rejection list.
IngestResult ingest_csv(std::istream& in, const IngestOptions& options);
IngestResult ingest_file(const std::string& path, const IngestOptions& options);

/// Calendar week used when writing events: Sunday 2012-01-01 onwards.
inline constexpr CivilDate kBaseWeek{2012, 1, 1};

struct CsvRow {
  std::string date;
  std::string time;
  std::string lat;
  std::string lon;
  std::string type;
};

/// Row that ingest_csv maps back onto `e` (up to whole seconds and
/// printed precision).
CsvRow format_event(const EventRecord& e, const GeoPoint& reference);

/// The record `e` becomes after formatting and re-ingestion.
EventRecord reparse_event(const EventRecord& e, const GeoPoint& reference);

/// Accepts a simulated point only if its CSV form bins back into the same
/// cell.  `grid` must outlive the filter.
PointFilter csv_roundtrip_filter(const SpaceTimeGrid& grid, const GeoPoint& reference);

void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events, const GeoPoint& reference);

/// First line: chain metadata plus `config`; then one JSON object per draw.
void write_chain_jsonl(std::ostream& out, const PosteriorChain& chain, const nlohmann::json& config);
PosteriorChain read_chain_jsonl(std::istream& in);

}  // namespace stcox

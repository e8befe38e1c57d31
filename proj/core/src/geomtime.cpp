#include "stcox/geomtime.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "stcox/errors.hpp"

namespace stcox {

namespace {

constexpr std::array<const char*, kDaysPerWeek> kWeekdayNames = {
    "Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"};

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::chrono::year_month_day to_ymd(const CivilDate& d) {
  return std::chrono::year_month_day{std::chrono::year{d.year}, std::chrono::month{d.month},
                                     std::chrono::day{d.day}};
}

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
  return (a.easting - o.easting) * (b.northing - o.northing) -
         (a.northing - o.northing) * (b.easting - o.easting);
}

bool on_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
  return std::min(a.easting, b.easting) <= p.easting && p.easting <= std::max(a.easting, b.easting) &&
         std::min(a.northing, b.northing) <= p.northing && p.northing <= std::max(a.northing, b.northing);
}

bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2, const PlanarPoint& q1,
                        const PlanarPoint& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
         (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}

PlanarPoint polygon_centroid(std::span<const PlanarPoint> poly) {
  double a2 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    const double c = p.easting * q.northing - q.easting * p.northing;
    a2 += c;
    cx += (p.easting + q.easting) * c;
    cy += (p.northing + q.northing) * c;
  }
  if (a2 == 0.0) return poly.empty() ? PlanarPoint{} : poly.front();
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

}  // namespace

std::string to_string(Weekday w) { return kWeekdayNames.at(static_cast<std::size_t>(w)); }

Weekday weekday_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    if (name == kWeekdayNames[i] || name == std::string(kWeekdayNames[i]).substr(0, 3)) {
      return static_cast<Weekday>(i);
    }
  }
  throw InputError("unknown weekday '" + name + "'");
}

bool CivilDate::valid() const { return to_ymd(*this).ok(); }

Weekday CivilDate::weekday() const {
  if (!valid()) throw InputError("invalid calendar date " + iso());
  return static_cast<Weekday>(std::chrono::weekday{std::chrono::sys_days{to_ymd(*this)}}.c_encoding());
}

CivilDate CivilDate::plus_days(int days) const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{to_ymd(*this)} + std::chrono::days{days}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day())};
}

std::string CivilDate::iso() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

CivilDate CivilDate::parse_iso(const std::string& text) {
  CivilDate d;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u%c", &d.year, &d.month, &d.day, &trailing) != 3 || !d.valid()) {
    throw InputError("invalid date '" + text + "'");
  }
  return d;
}

PlanarPoint project(const GeoPoint& point, const GeoPoint& reference) {
  if (std::abs(point.latitude) > 90.0 || std::abs(point.longitude) > 180.0 ||
      !std::isfinite(point.latitude) || !std::isfinite(point.longitude)) {
    throw InputError("coordinate out of range");
  }
  const double cos_ref = std::cos(reference.latitude * kDegToRad);
  return {kEarthRadiusKm * cos_ref * (point.longitude - reference.longitude) * kDegToRad,
          kEarthRadiusKm * (point.latitude - reference.latitude) * kDegToRad};
}

GeoPoint unproject(const PlanarPoint& point, const GeoPoint& reference) {
  const double cos_ref = std::cos(reference.latitude * kDegToRad);
  return {reference.latitude + point.northing / (kEarthRadiusKm * kDegToRad),
          reference.longitude + point.easting / (kEarthRadiusKm * cos_ref * kDegToRad)};
}

double wrap_time(double clock_hours) {
  if (!(clock_hours >= 0.0 && clock_hours < 24.0)) throw InputError("clock time outside [0, 24)");
  double shifted = clock_hours - kDayBoundaryHour;
  if (shifted < 0.0) shifted += 24.0;
  const double angle = shifted / 24.0 * kTwoPi;
  return angle >= kTwoPi ? 0.0 : angle;
}

double unwrap_time(double angle) {
  if (!(angle >= 0.0 && angle < kTwoPi)) throw InputError("angle outside [0, 2pi)");
  double clock = angle / kTwoPi * 24.0 + kDayBoundaryHour;
  if (clock >= 24.0) clock -= 24.0;
  return clock;
}

Weekday assign_day_of_week(const CivilDate& date, double clock_hours) {
  if (!date.valid()) throw InputError("invalid calendar date " + date.iso());
  if (!(clock_hours >= 0.0 && clock_hours < 24.0)) throw InputError("clock time outside [0, 24)");
  return clock_hours < kDayBoundaryHour ? date.plus_days(-1).weekday() : date.weekday();
}

double circular_distance(double t1, double t2) {
  const double d = std::fmod(std::abs(t1 - t2), kTwoPi);
  return std::min(d, kTwoPi - d);
}

double Region::max_distance() const { return std::hypot(width(), height()); }

bool Region::contains(const PlanarPoint& p) const {
  if (!(p.easting >= x_min && p.easting <= x_max && p.northing >= y_min && p.northing <= y_max)) return false;
  return polygon.empty() || point_in_polygon(p, polygon);
}

void Region::validate() const {
  if (!(x_max > x_min && y_max > y_min)) throw InputError("region rectangle must have positive area");
  if (polygon.empty()) return;
  if (polygon.size() < 3) throw InputError("region polygon needs at least 3 vertices");
  for (const auto& v : polygon) {
    if (v.easting < x_min || v.easting > x_max || v.northing < y_min || v.northing > y_max) {
      throw InputError("region polygon leaves the bounding rectangle");
    }
  }
  if (!polygon_is_simple(polygon)) throw InputError("region polygon is not simple");
}

double polygon_area(std::span<const PlanarPoint> polygon) {
  double a2 = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& p = polygon[i];
    const auto& q = polygon[(i + 1) % polygon.size()];
    a2 += p.easting * q.northing - q.easting * p.northing;
  }
  return 0.5 * std::abs(a2);
}

bool point_in_polygon(const PlanarPoint& p, std::span<const PlanarPoint> polygon) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.northing > p.northing) != (b.northing > p.northing)) {
      const double x = a.easting + (p.northing - a.northing) * (b.easting - a.easting) / (b.northing - a.northing);
      if (p.easting < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(std::span<const PlanarPoint> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::vector<PlanarPoint> clip_to_rectangle(std::span<const PlanarPoint> subject, double x0, double y0, double x1,
                                           double y1) {
  std::vector<PlanarPoint> out(subject.begin(), subject.end());
  // Each edge: inside test and intersection with the boundary line.
  auto clip_edge = [&out](auto inside, auto intersect) {
    if (out.empty()) return;
    std::vector<PlanarPoint> in;
    in.swap(out);
    PlanarPoint prev = in.back();
    for (const auto& cur : in) {
      if (inside(cur)) {
        if (!inside(prev)) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (inside(prev)) {
        out.push_back(intersect(prev, cur));
      }
      prev = cur;
    }
  };
  auto at_x = [](double x) {
    return [x](const PlanarPoint& a, const PlanarPoint& b) {
      const double f = (x - a.easting) / (b.easting - a.easting);
      return PlanarPoint{x, a.northing + f * (b.northing - a.northing)};
    };
  };
  auto at_y = [](double y) {
    return [y](const PlanarPoint& a, const PlanarPoint& b) {
      const double f = (y - a.northing) / (b.northing - a.northing);
      return PlanarPoint{a.easting + f * (b.easting - a.easting), y};
    };
  };
  clip_edge([x0](const PlanarPoint& p) { return p.easting >= x0; }, at_x(x0));
  clip_edge([x1](const PlanarPoint& p) { return p.easting <= x1; }, at_x(x1));
  clip_edge([y0](const PlanarPoint& p) { return p.northing >= y0; }, at_y(y0));
  clip_edge([y1](const PlanarPoint& p) { return p.northing <= y1; }, at_y(y1));
  return out;
}

SpaceTimeGrid::SpaceTimeGrid(Region region, int nx, int ny, int n_time, int weekday_classes)
    : region_(std::move(region)), nx_(nx), ny_(ny), weekday_classes_(weekday_classes) {
  if (nx < 1 || ny < 1 || n_time < 1) throw InputError("grid dimensions must be >= 1");
  if (weekday_classes != 1 && weekday_classes != kDaysPerWeek) throw InputError("weekday_classes must be 1 or 7");
  region_.validate();

  const double dx = cell_width();
  const double dy = cell_height();
  const double cell_area = dx * dy;
  lattice_to_cell_.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x0 = region_.x_min + ix * dx;
      const double y0 = region_.y_min + iy * dy;
      SpatialCell c{ix, iy, {x0 + 0.5 * dx, y0 + 0.5 * dy}, cell_area};
      if (!region_.polygon.empty()) {
        const auto clipped = clip_to_rectangle(region_.polygon, x0, y0, x0 + dx, y0 + dy);
        c.area = clipped.size() >= 3 ? polygon_area(clipped) : 0.0;
        if (c.area <= 1e-12 * cell_area) continue;
        c.centroid = polygon_centroid(clipped);
      }
      lattice_to_cell_[static_cast<std::size_t>(iy) * nx + ix] = static_cast<int>(spatial_.size());
      spatial_.push_back(c);
    }
  }
  if (spatial_.empty()) throw InputError("region polygon does not intersect any grid cell");

  const double width = kTwoPi / n_time;
  time_.reserve(n_time);
  for (int t = 0; t < n_time; ++t) time_.push_back({(t + 0.5) * width, width});
  counts_.assign(n_cells() * weekday_classes_, 0);
}

double SpaceTimeGrid::volume(std::size_t cell) const {
  return spatial_[spatial_of(cell)].area * time_[time_of(cell)].width;
}

double SpaceTimeGrid::total_area() const {
  return std::accumulate(spatial_.begin(), spatial_.end(), 0.0,
                         [](double acc, const SpatialCell& c) { return acc + c.area; });
}

std::optional<std::size_t> SpaceTimeGrid::locate_spatial(const PlanarPoint& p) const {
  if (!region_.contains(p)) return std::nullopt;
  const int ix = std::clamp(static_cast<int>(std::floor((p.easting - region_.x_min) / cell_width())), 0, nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((p.northing - region_.y_min) / cell_height())), 0, ny_ - 1);
  const int idx = lattice_to_cell_[static_cast<std::size_t>(iy) * nx_ + ix];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::size_t SpaceTimeGrid::locate_time(double angle) const {
  const auto m = static_cast<long>(time_.size());
  const long t = static_cast<long>(std::floor(angle / (kTwoPi / static_cast<double>(m))));
  return static_cast<std::size_t>(std::clamp(t, 0L, m - 1));
}

std::optional<CellIndex> SpaceTimeGrid::locate(const EventRecord& e) const {
  if (!(e.clock_angle >= 0.0 && e.clock_angle < kTwoPi)) return std::nullopt;
  const auto s = locate_spatial(e.location());
  if (!s) return std::nullopt;
  return CellIndex{*s, locate_time(e.clock_angle), weekday_class(e.weekday)};
}

std::int64_t SpaceTimeGrid::total_count() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

void SpaceTimeGrid::add_event(const CellIndex& idx) {
  counts_[cell(idx.spatial, idx.time) * weekday_classes_ + idx.weekday_class] += 1;
}

SpaceTimeGrid SpaceTimeGrid::with_counts(std::vector<int> counts) const {
  if (counts.size() != counts_.size()) throw InputError("count tensor does not match grid layout");
  SpaceTimeGrid g = *this;
  g.counts_ = std::move(counts);
  return g;
}

GridBuild build_grid(const Region& region, int nx, int ny, int n_time, std::span<const EventRecord> events,
                     int weekday_classes) {
  GridBuild out{SpaceTimeGrid(region, nx, ny, n_time, weekday_classes), {}};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.clock_angle >= 0.0 && e.clock_angle < kTwoPi)) {
      out.rejected.push_back({i, "clock angle outside [0, 2pi)"});
      continue;
    }
    const auto idx = out.grid.locate(e);
    if (!idx) {
      out.rejected.push_back({i, "location outside region"});
      continue;
    }
    out.grid.add_event(*idx);
  }
  return out;
}

void to_json(nlohmann::json& j, const Region& r) {
  j = nlohmann::json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
  if (!r.polygon.empty()) {
    auto poly = nlohmann::json::array();
    for (const auto& p : r.polygon) poly.push_back({p.easting, p.northing});
    j["polygon"] = poly;
  }
}

void from_json(const nlohmann::json& j, Region& r) {
  r.x_min = j.at("x_min").get<double>();
  r.x_max = j.at("x_max").get<double>();
  r.y_min = j.at("y_min").get<double>();
  r.y_max = j.at("y_max").get<double>();
  r.polygon.clear();
  if (j.contains("polygon")) {
    for (const auto& p : j.at("polygon")) r.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
}

nlohmann::json grid_to_json(const SpaceTimeGrid& grid) {
  nlohmann::json j;
  j["region"] = grid.region();
  j["nx"] = grid.nx();
  j["ny"] = grid.ny();
  j["n_time"] = grid.n_time();
  j["weekday_classes"] = grid.weekday_classes();
  auto cells = nlohmann::json::array();
  for (std::size_t s = 0; s < grid.n_spatial(); ++s) {
    const auto& c = grid.spatial_cells()[s];
    cells.push_back({{"id", s},
                     {"ix", c.ix},
                     {"iy", c.iy},
                     {"easting", c.centroid.easting},
                     {"northing", c.centroid.northing},
                     {"area", c.area}});
  }
  j["spatial_cells"] = cells;
  auto times = nlohmann::json::array();
  for (const auto& t : grid.time_cells()) times.push_back({{"centroid", t.centroid}, {"width", t.width}});
  j["time_cells"] = times;
  j["total_count"] = grid.total_count();
  j["counts"] = grid.counts();
  return j;
}

SpaceTimeGrid grid_from_json(const nlohmann::json& j) {
  SpaceTimeGrid g(j.at("region").get<Region>(), j.at("nx").get<int>(), j.at("ny").get<int>(),
                  j.at("n_time").get<int>(), j.at("weekday_classes").get<int>());
  if (j.contains("counts")) return g.with_counts(j.at("counts").get<std::vector<int>>());
  return g;
}

}  // namespace stcox

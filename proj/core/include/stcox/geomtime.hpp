#pragma once

// Planar projection, circular clock time, 02:00-based weekdays and the
// space x circular-time lattice that the likelihood is evaluated on.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace stcox {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEarthRadiusKm = 6371.0;
// Clock hour that maps to angle 0 on the circle and starts each weekday.
inline constexpr double kDayBoundaryHour = 2.0;

enum class Weekday : int { Sunday = 0, Monday, Tuesday, Wednesday, Thursday, Friday, Saturday };

inline constexpr int kDaysPerWeek = 7;

std::string to_string(Weekday w);
Weekday weekday_from_string(const std::string& name);

struct GeoPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
};

struct PlanarPoint {
  double easting = 0.0;   // km
  double northing = 0.0;  // km
};

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  bool valid() const;
  Weekday weekday() const;
  CivilDate plus_days(int days) const;
  std::string iso() const;
  static CivilDate parse_iso(const std::string& text);

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

/// Equirectangular projection about `reference`, in km.
PlanarPoint project(const GeoPoint& point, const GeoPoint& reference);
GeoPoint unproject(const PlanarPoint& point, const GeoPoint& reference);

/// Clock hours in [0, 24) to radians in [0, 2pi), with 02:00 at angle 0.
double wrap_time(double clock_hours);
/// Inverse of wrap_time.
double unwrap_time(double angle);

/// Weekday under the 02:00-to-02:00 day convention.
Weekday assign_day_of_week(const CivilDate& date, double clock_hours);

/// Arc length between two angles on the unit circle, in [0, pi].
double circular_distance(double t1, double t2);

struct EventRecord {
  double easting = 0.0;      // km
  double northing = 0.0;     // km
  double clock_angle = 0.0;  // radians in [0, 2pi)
  Weekday weekday = Weekday::Sunday;
  std::string type_label;

  PlanarPoint location() const { return {easting, northing}; }
};

struct Region {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  // Closed boundary; the first vertex is not repeated at the end.
  std::vector<PlanarPoint> polygon;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double max_distance() const;
  bool contains(const PlanarPoint& p) const;
  // Throws InputError when the rectangle is degenerate or the polygon is
  // self-intersecting or leaves the rectangle.
  void validate() const;
};

double polygon_area(std::span<const PlanarPoint> polygon);
bool point_in_polygon(const PlanarPoint& p, std::span<const PlanarPoint> polygon);
bool polygon_is_simple(std::span<const PlanarPoint> polygon);
/// Sutherland-Hodgman clip of `subject` against an axis-aligned rectangle.
std::vector<PlanarPoint> clip_to_rectangle(std::span<const PlanarPoint> subject, double x0, double y0,
                                           double x1, double y1);

struct SpatialCell {
  int ix = 0;
  int iy = 0;
  PlanarPoint centroid;
  double area = 0.0;  // km^2, after clipping
};

struct TimeCell {
  double centroid = 0.0;  // radians
  double width = 0.0;     // radians
};

/// Index of a space-time cell plus weekday class.
struct CellIndex {
  std::size_t spatial = 0;
  std::size_t time = 0;
  int weekday_class = 0;
};

/// Spatial cells x circular time cells with per-weekday event counts.
///
/// Space-time cells are flattened with time fastest: cell (s, t) has index
/// s * n_time() + t.  Counts are stored as counts[cell * weekday_classes + w].
/// With a single weekday class all events share w = 0.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid() = default;
  SpaceTimeGrid(Region region, int nx, int ny, int n_time, int weekday_classes);

  const Region& region() const { return region_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_width() const { return region_.width() / nx_; }
  double cell_height() const { return region_.height() / ny_; }

  std::size_t n_spatial() const { return spatial_.size(); }
  std::size_t n_time() const { return time_.size(); }
  std::size_t n_cells() const { return spatial_.size() * time_.size(); }
  int weekday_classes() const { return weekday_classes_; }

  const std::vector<SpatialCell>& spatial_cells() const { return spatial_; }
  const std::vector<TimeCell>& time_cells() const { return time_; }

  std::size_t cell(std::size_t spatial, std::size_t time) const { return spatial * time_.size() + time; }
  std::size_t spatial_of(std::size_t cell) const { return cell / time_.size(); }
  std::size_t time_of(std::size_t cell) const { return cell % time_.size(); }

  /// Space-time cell volume (km^2 * radians); identical across weekday classes.
  double volume(std::size_t cell) const;
  double total_area() const;

  int weekday_class(Weekday w) const { return weekday_classes_ == 1 ? 0 : static_cast<int>(w); }

  std::optional<CellIndex> locate(const EventRecord& e) const;
  std::optional<std::size_t> locate_spatial(const PlanarPoint& p) const;
  std::size_t locate_time(double angle) const;

  const std::vector<int>& counts() const { return counts_; }
  int count(std::size_t cell, int w) const { return counts_[cell * weekday_classes_ + w]; }
  std::int64_t total_count() const;
  void add_event(const CellIndex& idx);
  /// Copy of this grid carrying different counts (same layout).
  SpaceTimeGrid with_counts(std::vector<int> counts) const;

 private:
  Region region_;
  int nx_ = 0;
  int ny_ = 0;
  int weekday_classes_ = kDaysPerWeek;
  std::vector<SpatialCell> spatial_;
  std::vector<TimeCell> time_;
  std::vector<int> lattice_to_cell_;  // nx*ny, -1 where the cell was dropped
  std::vector<int> counts_;
};

struct Rejection {
  std::size_t row = 0;
  std::string reason;
};

struct GridBuild {
  SpaceTimeGrid grid;
  std::vector<Rejection> rejected;
};

/// Builds the lattice and bins `events`; events outside the region are
/// reported in `rejected` rather than dropped.
GridBuild build_grid(const Region& region, int nx, int ny, int n_time, std::span<const EventRecord> events,
                     int weekday_classes = kDaysPerWeek);

void to_json(nlohmann::json& j, const Region& r);
void from_json(const nlohmann::json& j, Region& r);
nlohmann::json grid_to_json(const SpaceTimeGrid& grid);
SpaceTimeGrid grid_from_json(const nlohmann::json& j);

}  // namespace stcox

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace oq {

/// Physical location of an agent.  The numeric values are the trace-file codes.
enum class Location : std::int8_t { Waiting = 0, QueueA = 1, QueueB = -1, Departed = 9 };

inline int location_code(Location l) { return static_cast<int>(l); }
/// Throws std::invalid_argument for codes other than 0, 1, -1, 9.
Location location_from_code(int code);

inline bool in_queue(Location l) { return l == Location::QueueA || l == Location::QueueB; }

struct EpochRecord {
  double t = 0.0;
  int n_A = 0;
  int n_B = 0;
  int n_W = 0;
  int n_departed = 0;
  bool in_band = false;
  std::vector<double> opinions;
  std::vector<Location> locations;

  bool operator==(const EpochRecord&) const = default;
};

enum class EventKind : std::uint8_t { Join, Switch, Service };

struct Event {
  std::size_t epoch = 0; // epoch at whose end the event happened
  std::size_t agent = 0;
  EventKind kind = EventKind::Join;
  Location from = Location::Waiting;
  Location to = Location::Waiting;

  bool operator==(const Event&) const = default;
};

/// One record per epoch boundary t = 0, dt_D, ..., T (epoch count + 1 records).
struct TrialTrace {
  std::size_t n_agents = 0;
  double dt_D = 0.0;
  double horizon = 0.0;
  std::vector<bool> informed;
  std::vector<EpochRecord> records;
  std::vector<Event> events;
  std::size_t clamp_count = 0;

  bool operator==(const TrialTrace&) const = default;
};

/// CSV with header t,n_A,n_B,n_W,in_band,z_0..z_{N-1},loc_0..loc_{N-1}.
void write_trace_csv(std::ostream& out, const TrialTrace& trace);
void write_trace_csv(const std::string& path, const TrialTrace& trace);

/// Parses the CSV written by write_trace_csv.  Only the per-epoch records are
/// recovered (n_departed is re-derived from the locations).  Throws
/// std::runtime_error naming the row/column on malformed input.
TrialTrace read_trace_csv(std::istream& in);

} // namespace oq

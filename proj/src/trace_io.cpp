#include "opinion_queues/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oq {

Location location_from_code(int code) {
  switch (code) {
  case 0: return Location::Waiting;
  case 1: return Location::QueueA;
  case -1: return Location::QueueB;
  case 9: return Location::Departed;
  default: throw std::invalid_argument("unknown location code " + std::to_string(code));
  }
}

namespace {

std::string format_double(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

} // namespace

void write_trace_csv(std::ostream& out, const TrialTrace& trace) {
  const std::size_t n = trace.n_agents;
  out << "t,n_A,n_B,n_W,in_band";
  for (std::size_t i = 0; i < n; ++i) out << ",z_" << i;
  for (std::size_t i = 0; i < n; ++i) out << ",loc_" << i;
  out << '\n';
  for (const auto& r : trace.records) {
    out << format_double(r.t, 12) << ',' << r.n_A << ',' << r.n_B << ',' << r.n_W << ','
        << (r.in_band ? 1 : 0);
    for (double z : r.opinions) out << ',' << format_double(z, 17);
    for (Location l : r.locations) out << ',' << location_code(l);
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const TrialTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(out, trace);
  if (!out) throw std::runtime_error("failed writing " + path);
}

TrialTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: missing header");
  const auto header = split_csv_line(line);
  if (header.size() < 5 || (header.size() - 5) % 2 != 0 || header[0] != "t") {
    throw std::runtime_error("trace csv: malformed header");
  }
  TrialTrace trace;
  trace.n_agents = (header.size() - 5) / 2;
  const std::size_t n = trace.n_agents;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("trace csv: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " columns, expected " +
                               std::to_string(header.size()));
    }
    std::size_t col = 0;
    auto parse_d = [&](const std::string& s) {
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw std::runtime_error("trace csv: row " + std::to_string(row) + " column " +
                                 header[col] + ": bad number '" + s + "'");
      }
    };
    auto parse_i = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw std::runtime_error("trace csv: row " + std::to_string(row) + " column " +
                                 header[col] + ": bad integer '" + s + "'");
      }
    };
    EpochRecord r;
    r.t = parse_d(cells[col]);
    r.n_A = parse_i(cells[++col]);
    r.n_B = parse_i(cells[++col]);
    r.n_W = parse_i(cells[++col]);
    r.in_band = parse_i(cells[++col]) != 0;
    r.opinions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) r.opinions.push_back(parse_d(cells[++col]));
    r.locations.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int code = parse_i(cells[++col]);
      try {
        r.locations.push_back(location_from_code(code));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error("trace csv: row " + std::to_string(row) + " column " +
                                 header[col] + ": " + e.what());
      }
      if (r.locations.back() == Location::Departed) ++r.n_departed;
    }
    trace.records.push_back(std::move(r));
  }
  if (trace.records.size() >= 2) {
    trace.dt_D = trace.records[1].t - trace.records[0].t;
    trace.horizon = trace.records.back().t;
  }
  return trace;
}

} // namespace oq

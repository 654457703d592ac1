#include "neurotrig/record_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

std::string col(const char* name, std::size_t i) { return std::string(name) + "_" + std::to_string(i); }
std::string col(const char* name, std::size_t i, std::size_t k) {
  return col(name, i) + "_" + std::to_string(k);
}

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw MalformedInputError("line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Column bindings shared by the writer and the reader.
struct Binding {
  std::string name;
  std::vector<double>* series;
};

std::vector<Binding> bindings(TrajectoryRecord& r) {
  std::vector<Binding> b;
  b.push_back({"t", &r.time});
  b.push_back({"y0", &r.reference});
  b.push_back({"y0_held", &r.reference_held});
  const bool wtilde = r.has_weight_errors();
  for (std::size_t i = 1; i <= r.agents.size(); ++i) {
    auto& a = r.agents[i - 1];
    for (std::size_t k = 1; k <= r.order; ++k) {
      b.push_back({col("x", i, k), &a.x[k - 1]});
      b.push_back({col("xh", i, k), &a.x_held[k - 1]});
    }
    for (std::size_t k = 2; k <= r.order; ++k) {
      b.push_back({col("af", i, k), &a.filter[k - 2]});
      b.push_back({col("afh", i, k), &a.filter_held[k - 2]});
    }
    b.push_back({col("u", i), &a.control});
    b.push_back({col("eps", i), &a.tracking_error});
    b.push_back({col("e", i), &a.consensus_error});
    b.push_back({col("eh", i), &a.consensus_error_held});
    b.push_back({col("yhat", i), &a.leader_estimate});
    for (std::size_t k = 1; k <= r.order; ++k) {
      b.push_back({col("z", i, k), &a.z[k - 1]});
      b.push_back({col("zh", i, k), &a.z_held[k - 1]});
      b.push_back({col("alpha", i, k), &a.alpha[k - 1]});
      b.push_back({col("alphah", i, k), &a.alpha_held[k - 1]});
      b.push_back({col("wnorm", i, k), &a.weight_norm[k - 1]});
      if (wtilde) b.push_back({col("wtilde", i, k), &a.weight_error_norm[k - 1]});
    }
  }
  return b;
}

void size_agent(AgentSeries& a, std::size_t order, bool wtilde) {
  a.x.resize(order);
  a.x_held.resize(order);
  a.filter.resize(order - 1);
  a.filter_held.resize(order - 1);
  a.z.resize(order);
  a.z_held.resize(order);
  a.alpha.resize(order);
  a.alpha_held.resize(order);
  a.weight_norm.resize(order);
  a.weight_error_norm.resize(order);
  if (wtilde) {
    for (auto& w : a.weight_error_norm) w.push_back(0.0);
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::vector<std::string> trajectory_columns(const TrajectoryRecord& record) {
  std::vector<std::string> names;
  for (const auto& b : bindings(const_cast<TrajectoryRecord&>(record))) names.push_back(b.name);
  return names;
}

void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& os, std::size_t stride) {
  if (stride == 0) throw MalformedInputError("stride must be positive");
  const auto cols = bindings(const_cast<TrajectoryRecord&>(record));
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c].name;
  os << "\n";
  const std::size_t n = record.samples();
  for (std::size_t s = 0; s < n; ++s) {
    if (s % stride != 0 && s + 1 != n) continue;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      os << format_double((*cols[c].series)[s]);
    }
    os << "\n";
  }
  if (!os) throw IoError("failed writing trajectory CSV");
}

TrajectoryRecord read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw MalformedInputError("trajectory CSV is empty");
  chomp(line);
  const auto header = split(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) index[std::string(header[c])] = c;

  TrajectoryRecord r;
  r.mode = ControlMode::kContinuous;
  std::size_t agents = 0;
  while (index.count(col("u", agents + 1))) ++agents;
  while (index.count(col("x", 1, r.order + 1))) ++r.order;
  if (agents == 0 || r.order == 0 || !index.count("t")) {
    throw MalformedInputError("trajectory CSV header lacks t, x_1_1 or u_1 columns");
  }
  const bool wtilde = index.count(col("wtilde", 1, 1)) > 0;
  r.agents.resize(agents);
  for (auto& a : r.agents) size_agent(a, r.order, wtilde);

  auto cols = bindings(r);
  if (wtilde) {
    for (auto& a : r.agents) {
      for (auto& w : a.weight_error_norm) w.clear();
    }
  }
  if (cols.size() != header.size()) {
    throw MalformedInputError("trajectory CSV has " + std::to_string(header.size()) +
                              " columns, expected " + std::to_string(cols.size()));
  }
  std::vector<std::size_t> where;
  for (const auto& b : cols) {
    const auto it = index.find(b.name);
    if (it == index.end()) throw MalformedInputError("trajectory CSV lacks column " + b.name);
    where.push_back(it->second);
  }

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw MalformedInputError("line " + std::to_string(lineno) + ": expected " +
                                std::to_string(header.size()) + " fields");
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      cols[c].series->push_back(parse_double(fields[where[c]], lineno));
    }
  }
  if (r.time.size() >= 2) r.step = r.time[1] - r.time[0];
  return r;
}

void write_events_csv(const std::vector<ChannelLog>& channels, std::ostream& os) {
  os << "signal_id,event_index,time,value\n";
  for (const auto& ch : channels) {
    const auto id = ch.id.to_string();
    for (std::size_t e = 0; e < ch.events.size(); ++e) {
      os << id << ',' << e << ',' << format_double(ch.events[e].time) << ','
         << format_double(ch.events[e].value) << "\n";
    }
  }
  if (!os) throw IoError("failed writing events CSV");
}

std::vector<ChannelLog> read_events_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw MalformedInputError("events CSV is empty");
  chomp(line);
  if (line != "signal_id,event_index,time,value") throw MalformedInputError("events CSV: unexpected header");
  std::vector<ChannelLog> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) throw MalformedInputError("events CSV line " + std::to_string(lineno) + ": expected 4 fields");
    SignalId id;
    try {
      id = SignalId::parse(std::string(f[0]));
    } catch (const MalformedInputError& e) {
      throw MalformedInputError("events CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    if (out.empty() || !(out.back().id == id)) out.push_back(ChannelLog{id, 0.0, {}});
    std::size_t idx = 0;
    const auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), idx);
    if (ec != std::errc() || idx != out.back().events.size()) {
      throw MalformedInputError("events CSV line " + std::to_string(lineno) + ": event index out of sequence");
    }
    out.back().events.push_back({parse_double(f[2], lineno), parse_double(f[3], lineno)});
  }
  return out;
}

void write_plot_csv(const TrajectoryRecord& record, std::ostream& os, std::size_t stride) {
  if (stride == 0) throw MalformedInputError("stride must be positive");
  os << "t,series,value\n";
  const std::size_t n = record.samples();
  for (std::size_t s = 0; s < n; ++s) {
    if (s % stride != 0 && s + 1 != n) continue;
    const auto t = format_double(record.time[s]);
    os << t << ",y0," << format_double(record.reference[s]) << "\n";
    for (std::size_t i = 1; i <= record.agents.size(); ++i) {
      const auto& a = record.agents[i - 1];
      os << t << ',' << col("eps", i) << ',' << format_double(a.tracking_error[s]) << "\n";
      for (std::size_t k = 1; k <= record.order; ++k) {
        os << t << ',' << col("x", i, k) << ',' << format_double(a.x[k - 1][s]) << "\n";
      }
      os << t << ',' << col("u", i) << ',' << format_double(a.control[s]) << "\n";
      os << t << ',' << col("yhat", i) << ',' << format_double(a.leader_estimate[s]) << "\n";
    }
  }
  if (!os) throw IoError("failed writing plot CSV");
}

TrajectoryRecord load_record(const std::filesystem::path& directory) {
  std::ifstream traj(directory / "trajectory.csv");
  if (!traj) throw IoError("cannot open " + (directory / "trajectory.csv").string());
  TrajectoryRecord r = read_trajectory_csv(traj);
  std::ifstream events(directory / "events.csv");
  if (events) {
    r.channels = read_events_csv(events);
    if (!r.channels.empty()) r.mode = ControlMode::kTriggered;
  }
  return r;
}

}  // namespace neurotrig

#include "lady/netseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace lady {

std::pair<int, int> dyad_actors(int k) {
  // v is the largest integer with v(v-1)/2 <= k
  int v = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * k)) / 2.0);
  while (v * (v - 1) / 2 > k) --v;
  while ((v + 1) * v / 2 <= k) ++v;
  return {v, k - v * (v - 1) / 2};
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i + 1] > times_[i])) {
      throw data_error("TimeGrid: times must be strictly increasing at index " +
                       std::to_string(i));
    }
  }
  for (double t : times_) {
    if (!std::isfinite(t)) throw data_error("TimeGrid: non-finite time");
  }
}

TimeGrid TimeGrid::prefix(int k) const {
  if (k < 1 || k > size()) throw data_error("TimeGrid::prefix: bad length");
  return TimeGrid(std::vector<double>(times_.begin(), times_.begin() + k));
}

void AdjacencyMatrix::set(int v, int u, bool present) {
  if (v == u) throw data_error("AdjacencyMatrix: cannot set diagonal");
  if (v < 0 || u < 0 || v >= V_ || u >= V_)
    throw data_error("AdjacencyMatrix: actor id out of range");
  dyads_[v > u ? dyad_index(v, u) : dyad_index(u, v)] = present ? 1 : 0;
}

int AdjacencyMatrix::degree(int v) const {
  int d = 0;
  for (int u = 0; u < V_; ++u)
    if (u != v && (*this)(v, u)) ++d;
  return d;
}

int AdjacencyMatrix::edge_count() const {
  int e = 0;
  for (std::uint8_t b : dyads_) e += b;
  return e;
}

NetworkSeries NetworkSeries::prefix(int k) const {
  NetworkSeries out(grid.prefix(k), V);
  for (int i = 0; i < k; ++i) out.snapshots[i] = snapshots[i];
  out.labels = labels;
  return out;
}

NetworkSeries NetworkSeries::slice(int from, int count) const {
  if (from < 0 || count < 1 || from + count > n_times())
    throw data_error("NetworkSeries::slice: range out of bounds");
  std::vector<double> t(grid.times().begin() + from,
                        grid.times().begin() + from + count);
  NetworkSeries out((TimeGrid(t)), V);
  for (int i = 0; i < count; ++i) out.snapshots[i] = snapshots[from + i];
  out.labels = labels;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_ll(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_d(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

ContactData load_contacts(std::istream& in) {
  ContactData data;
  std::unordered_map<long long, int> dense;
  std::string line;
  int lineno = 0;
  bool first = true;
  struct RawEvent {
    double t;
    long long u, v;
  };
  std::vector<RawEvent> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 3)
      throw data_error("contacts: expected 3 fields at line " +
                       std::to_string(lineno));
    double t;
    long long u, v;
    if (!parse_d(f[0], t) || !parse_ll(f[1], u) || !parse_ll(f[2], v)) {
      if (first) {  // tolerate a header row
        first = false;
        continue;
      }
      throw data_error("contacts: parse error at line " +
                       std::to_string(lineno));
    }
    first = false;
    if (u == v)
      throw data_error("contacts: self-contact at line " +
                       std::to_string(lineno));
    raw.push_back({t, u, v});
  }
  // remap ids to dense 0..V-1 in order of first appearance
  auto remap = [&](long long id) {
    auto it = dense.find(id);
    if (it != dense.end()) return it->second;
    int k = static_cast<int>(data.id_map.size());
    dense.emplace(id, k);
    data.id_map.push_back(id);
    return k;
  };
  for (const auto& e : raw) {
    int du = remap(e.u), dv = remap(e.v);
    data.events.push_back({e.t, du, dv});
  }
  data.V = static_cast<int>(data.id_map.size());
  return data;
}

NetworkSeries aggregate_windows(const std::vector<ContactEvent>& events,
                                int V, double window, double span_start,
                                double span_end) {
  if (!(window > 0)) throw config_error("aggregate_windows: window must be > 0");
  if (!(span_end > span_start))
    throw config_error("aggregate_windows: empty span");
  std::string bad;
  for (const auto& e : events) {
    if (e.timestamp < span_start || e.timestamp > span_end) {
      if (!bad.empty()) bad += ", ";
      bad += std::to_string(e.timestamp);
    }
  }
  if (!bad.empty())
    throw data_error("aggregate_windows: events outside span at timestamps " +
                     bad);

  int n = static_cast<int>(std::ceil((span_end - span_start) / window));
  if (n < 1) n = 1;
  std::vector<double> mids(n);
  for (int i = 0; i < n; ++i) {
    double lo = span_start + i * window;
    double hi = std::min(lo + window, span_end);
    mids[i] = 0.5 * (lo + hi);
  }
  NetworkSeries out((TimeGrid(mids)), V);
  for (const auto& e : events) {
    int i = static_cast<int>((e.timestamp - span_start) / window);
    if (i >= n) i = n - 1;  // events exactly at span_end
    out.snapshots[i].set(e.v, e.u, true);
  }
  return out;
}

NetworkSeries subset_actors(const NetworkSeries& series,
                            const std::vector<int>& keep) {
  for (int id : keep) {
    if (id < 0 || id >= series.V)
      throw data_error("subset_actors: unknown actor id " + std::to_string(id));
  }
  int W = static_cast<int>(keep.size());
  NetworkSeries out(series.grid, W);
  for (int i = 0; i < series.n_times(); ++i) {
    for (int a = 0; a < W; ++a)
      for (int b = 0; b < a; ++b)
        if (series.snapshots[i](keep[a], keep[b]))
          out.snapshots[i].set(a, b, true);
  }
  for (const auto& [name, vals] : series.labels) {
    std::vector<std::string> sub(W);
    for (int a = 0; a < W; ++a) sub[a] = vals[keep[a]];
    out.labels[name] = sub;
  }
  return out;
}

ValidationReport validate(const NetworkSeries& series) {
  ValidationReport rep;
  if (static_cast<int>(series.snapshots.size()) != series.n_times()) {
    rep.issues.push_back({-1, -1, -1, "snapshot count differs from grid length"});
    return rep;
  }
  for (int i = 0; i < series.n_times(); ++i) {
    const auto& A = series.snapshots[i];
    if (A.actors() != series.V) {
      rep.issues.push_back({i, -1, -1, "actor count mismatch"});
      continue;
    }
    // dyad-major storage can only hold {0,1}; scan for stray values anyway
    for (int k = 0; k < dyad_count(series.V); ++k) {
      if (A.dyads()[k] > 1) {
        auto [v, u] = dyad_actors(k);
        rep.issues.push_back({i, v, u, "nonbinary"});
      }
    }
  }
  return rep;
}

ValidationReport validate_dense(const Eigen::MatrixXd& adjacency) {
  ValidationReport rep;
  int V = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != V) {
    rep.issues.push_back({-1, -1, -1, "not square"});
    return rep;
  }
  for (int v = 0; v < V; ++v) {
    if (adjacency(v, v) != 0.0)
      rep.issues.push_back({-1, v, v, "diagonal"});
    for (int u = 0; u < v; ++u) {
      if (adjacency(v, u) != adjacency(u, v))
        rep.issues.push_back({-1, v, u, "asymmetric"});
      else if (adjacency(v, u) != 0.0 && adjacency(v, u) != 1.0)
        rep.issues.push_back({-1, v, u, "nonbinary"});
    }
  }
  return rep;
}

void save_series(const NetworkSeries& series, const std::string& base_path) {
  {
    std::ofstream csv(base_path + ".csv");
    if (!csv) throw data_error("save_series: cannot write " + base_path + ".csv");
    csv << "time_index,u,v\n";
    for (int i = 0; i < series.n_times(); ++i) {
      for (int v = 1; v < series.V; ++v)
        for (int u = 0; u < v; ++u)
          if (series.snapshots[i](v, u)) csv << i << ',' << u << ',' << v << '\n';
    }
  }
  nlohmann::json hdr;
  hdr["V"] = series.V;
  hdr["times"] = series.grid.times();
  hdr["labels"] = nlohmann::json::object();
  for (const auto& [name, vals] : series.labels) hdr["labels"][name] = vals;
  std::ofstream js(base_path + ".json");
  if (!js) throw data_error("save_series: cannot write " + base_path + ".json");
  js << hdr.dump(2) << '\n';
}

NetworkSeries load_series(const std::string& base_path) {
  std::ifstream js(base_path + ".json");
  if (!js) throw data_error("load_series: missing " + base_path + ".json");
  nlohmann::json hdr = nlohmann::json::parse(js);
  int V = hdr.at("V").get<int>();
  std::vector<double> times = hdr.at("times").get<std::vector<double>>();
  NetworkSeries out((TimeGrid(std::move(times))), V);
  if (hdr.contains("labels")) {
    for (auto it = hdr["labels"].begin(); it != hdr["labels"].end(); ++it) {
      auto vals = it.value().get<std::vector<std::string>>();
      if (static_cast<int>(vals.size()) != V)
        throw data_error("load_series: label '" + it.key() + "' has wrong length");
      out.labels[it.key()] = std::move(vals);
    }
  }
  std::ifstream csv(base_path + ".csv");
  if (!csv) throw data_error("load_series: missing " + base_path + ".csv");
  std::string line;
  int lineno = 0;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 3)
      throw data_error("load_series: bad row at line " + std::to_string(lineno));
    long long ti, u, v;
    if (!parse_ll(f[0], ti)) {
      if (lineno == 1) continue;  // header
      throw data_error("load_series: bad row at line " + std::to_string(lineno));
    }
    if (!parse_ll(f[1], u) || !parse_ll(f[2], v))
      throw data_error("load_series: bad row at line " + std::to_string(lineno));
    if (ti < 0 || ti >= out.n_times())
      throw data_error("load_series: time_index out of range at line " +
                       std::to_string(lineno));
    out.snapshots[static_cast<int>(ti)].set(static_cast<int>(v),
                                            static_cast<int>(u), true);
  }
  return out;
}

}  // namespace lady

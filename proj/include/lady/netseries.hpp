#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lady/errors.hpp"

namespace lady {

// Number of unordered dyads (v,u), v > u, among V actors.
inline int dyad_count(int V) { return V * (V - 1) / 2; }

// Dense dyad index for v > u: pairs are laid out (1,0),(2,0),(2,1),(3,0),...
inline int dyad_index(int v, int u) { return v * (v - 1) / 2 + u; }

// Inverse of dyad_index.
std::pair<int, int> dyad_actors(int k);

/// Strictly increasing time grid t_1 < ... < t_n.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  int size() const { return static_cast<int>(times_.size()); }
  double time(int i) const { return times_[i]; }
  // delta(i) = t_{i+1} - t_i, valid for i in [0, size()-2]
  double delta(int i) const { return times_[i + 1] - times_[i]; }
  const std::vector<double>& times() const { return times_; }

  // grid restricted to the first k points
  TimeGrid prefix(int k) const;

 private:
  std::vector<double> times_;
};

/// Symmetric binary adjacency matrix with zero diagonal, stored dyad-major.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int V) : V_(V), dyads_(dyad_count(V), 0) {}

  int actors() const { return V_; }
  std::uint8_t operator()(int v, int u) const {
    if (v == u) return 0;
    return v > u ? dyads_[dyad_index(v, u)] : dyads_[dyad_index(u, v)];
  }
  void set(int v, int u, bool present);

  int degree(int v) const;
  int edge_count() const;

  const std::vector<std::uint8_t>& dyads() const { return dyads_; }
  std::vector<std::uint8_t>& dyads() { return dyads_; }

 private:
  int V_;
  std::vector<std::uint8_t> dyads_;
};

/// A dynamic binary undirected network: one snapshot per grid time.
struct NetworkSeries {
  TimeGrid grid;
  int V = 0;
  std::vector<AdjacencyMatrix> snapshots;
  // attribute name -> per-actor value ("class", "gender", ...)
  std::map<std::string, std::vector<std::string>> labels;

  NetworkSeries(TimeGrid g, int actors)
      : grid(std::move(g)), V(actors),
        snapshots(grid.size(), AdjacencyMatrix(actors)) {}

  int n_times() const { return grid.size(); }
  int n_dyads() const { return dyad_count(V); }

  // series restricted to the first k times
  NetworkSeries prefix(int k) const;

  // contiguous sub-series of `count` times starting at `from`
  NetworkSeries slice(int from, int count) const;
};

/// One binary proximity contact between two distinct actors.
struct ContactEvent {
  double timestamp = 0;
  int u = 0;
  int v = 0;
};

struct ContactData {
  std::vector<ContactEvent> events;  // actor ids remapped to dense 0..V-1
  std::vector<long long> id_map;     // dense id -> original id
  int V = 0;
};

// Parse `timestamp,u,v` records (header line optional). Throws data_error
// with the offending line number on malformed input or self-contacts.
ContactData load_contacts(std::istream& in);

// Binary aggregation into consecutive windows of the given width covering
// [span_start, span_end]; an edge is present iff the pair had at least one
// contact in the window. Grid times are window midpoints.
NetworkSeries aggregate_windows(const std::vector<ContactEvent>& events,
                                int V, double window, double span_start,
                                double span_end);

// Induced sub-series on `keep` (actor ids relabeled to 0..|keep|-1 in the
// given order); labels carried over.
NetworkSeries subset_actors(const NetworkSeries& series,
                            const std::vector<int>& keep);

struct ValidationIssue {
  int time_index;
  int v, u;
  std::string what;  // "asymmetric", "diagonal", "nonbinary", ...
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

ValidationReport validate(const NetworkSeries& series);

// Raw dense adjacency data (e.g. foreign input) can carry violations the
// dyad-major storage cannot represent: list every asymmetric pair, nonzero
// diagonal entry and nonbinary value.
ValidationReport validate_dense(const Eigen::MatrixXd& adjacency);

// On-disk format: <base>.csv with `time_index,u,v` rows for present edges,
// <base>.json with {"V":..,"times":[..],"labels":{..}}.
void save_series(const NetworkSeries& series, const std::string& base_path);
NetworkSeries load_series(const std::string& base_path);

}  // namespace lady

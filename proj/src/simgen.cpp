#include "lady/simgen.hpp"

#include <string>

#include "lady/errors.hpp"

namespace lady {

namespace {

void fill_block(Eigen::MatrixXd& P, int a, int b, double p,
                const std::vector<int>& of) {
  int V = static_cast<int>(of.size());
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < V; ++u)
      if (v != u && ((of[v] == a && of[u] == b) || (of[v] == b && of[u] == a)))
        P(v, u) = p;
}

void zero_actor(Eigen::MatrixXd& P, int a) {
  P.row(a).setZero();
  P.col(a).setZero();
}

}  // namespace

RegimeSpec default_regimes(double p_high, double p_med, double p_low) {
  if (!(0 <= p_low && p_low < p_med && p_med < p_high && p_high <= 1))
    throw config_error("default_regimes: need 0 <= p_low < p_med < p_high <= 1");

  RegimeSpec spec;
  const int V = spec.V;
  spec.class_of.resize(V);
  spec.gender_of.resize(V);
  for (int v = 0; v < V; ++v) spec.class_of[v] = v / 10;
  // males are 1..5 and 16..25 in the 1-based labelling
  for (int v = 0; v < V; ++v)
    spec.gender_of[v] = (v <= 4 || (v >= 15 && v <= 24)) ? 0 : 1;

  auto base = [&]() {
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(V, V, p_low);
    P.diagonal().setZero();
    return P;
  };
  auto same_class = [&](Eigen::MatrixXd& P, double p) {
    for (int c = 0; c < 3; ++c)
      fill_block(P, c, c, p, spec.class_of);
  };

  // regime 1: school hours
  Eigen::MatrixXd r1 = base();
  same_class(r1, p_high);

  // regime 2: break with gender homophily
  Eigen::MatrixXd r2 = base();
  fill_block(r2, 0, 0, p_high, spec.gender_of);
  fill_block(r2, 1, 1, p_high, spec.gender_of);

  // regime 3: classes 1 and 2 share a room
  Eigen::MatrixXd r3 = base();
  same_class(r3, p_high);
  fill_block(r3, 0, 1, p_med, spec.class_of);

  // regime 4: lunch in two blocks {class1 + first half of class2} and
  // {second half of class2 + class3}; four students leave the school
  Eigen::MatrixXd r4 = Eigen::MatrixXd::Constant(V, V, 0.5 * p_low);
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < V; ++u) {
      if (v == u) continue;
      bool va = v < 15, ua = u < 15;
      if (va && ua) r4(v, u) = 0.875 * p_high;
      if (!va && !ua) r4(v, u) = 0.75 * p_high;
    }
  for (int a : {2, 7, 23, 29}) zero_actor(r4, a);
  r4.diagonal().setZero();

  // regime 5: end of day, class 1 in one room, classes 2 and 3 gathering
  Eigen::MatrixXd r5 = base();
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < V; ++u) {
      if (v == u) continue;
      int cv = spec.class_of[v], cu = spec.class_of[u];
      if (cv != cu) r5(v, u) = (cv >= 1 && cu >= 1) ? 0.625 * p_med : 0.4 * p_low;
    }
  same_class(r5, p_high);
  r5.diagonal().setZero();

  spec.prob = {r1, r2, r3, r4, r5};
  for (auto& P : spec.prob) P = (0.5 * (P + P.transpose())).eval();
  return spec;
}

std::pair<Schedule, TimeGrid> default_schedule(int n, double t_end) {
  if (n < 2) throw config_error("default_schedule: need n >= 2");
  std::vector<double> times(n);
  for (int i = 0; i < n; ++i) times[i] = t_end * i / (n - 1);

  Schedule sched;
  sched.regime.resize(n);
  // school-day phases, 1-based positions scaled to the grid length
  auto phase = [&](int i1) {
    if (i1 <= 8) return 1;
    if (i1 <= 12) return 3;
    if (i1 <= 16) return 2;
    if (i1 <= 24) return 1;
    if (i1 <= 30) return 4;
    if (i1 <= 38) return 1;
    if (i1 <= 41) return 3;
    if (i1 <= 45) return 5;
    if (i1 <= 48) return 2;
    return 4;
  };
  for (int i = 0; i < n; ++i) {
    int pos = (n == 50) ? i + 1 : 1 + (i * 50) / n;
    sched.regime[i] = phase(pos);
  }

  auto clampi = [&](int i1) { return std::min(i1 - 1, n - 1); };
  sched.departures.push_back({{0, 3, 9, 11}, clampi(42)});
  sched.departures.push_back({{15, 19, 25, 27}, clampi(46)});
  return {sched, TimeGrid(times)};
}

Eigen::MatrixXd true_pi_at(const Schedule& sched, const RegimeSpec& spec,
                           int i) {
  int k = sched.regime[i];
  if (k < 1 || k > static_cast<int>(spec.prob.size()))
    throw config_error("true_pi_at: regime index out of range at time " +
                       std::to_string(i));
  Eigen::MatrixXd P = spec.prob[k - 1];
  for (const auto& dep : sched.departures)
    if (i >= dep.time_index)
      for (int a : dep.actors) zero_actor(P, a);
  return P;
}

SimOutput simulate(const Schedule& sched, const RegimeSpec& spec,
                   const TimeGrid& grid, std::uint64_t seed) {
  int n = grid.size();
  if (static_cast<int>(sched.regime.size()) != n)
    throw config_error("simulate: schedule length differs from grid");
  for (const auto& dep : sched.departures) {
    if (dep.time_index < 0 || dep.time_index >= n)
      throw config_error("simulate: departure time outside grid");
    for (int a : dep.actors)
      if (a < 0 || a >= spec.V)
        throw config_error("simulate: departure actor out of range");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SimOutput out{NetworkSeries(grid, spec.V), {}};
  out.true_pi.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd P = true_pi_at(sched, spec, i);
    for (int v = 1; v < spec.V; ++v)
      for (int u = 0; u < v; ++u)
        if (unif(rng) < P(v, u)) out.series.snapshots[i].set(v, u, true);
    out.true_pi.push_back(std::move(P));
  }
  std::vector<std::string> cls(spec.V), gen(spec.V);
  for (int v = 0; v < spec.V; ++v) {
    cls[v] = "class" + std::to_string(spec.class_of[v] + 1);
    gen[v] = spec.gender_of[v] == 0 ? "M" : "F";
  }
  out.series.labels["class"] = cls;
  out.series.labels["gender"] = gen;
  return out;
}

}  // namespace lady

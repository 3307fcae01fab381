// Batch front-end for the LADY dynamic network model: simulation of the
// synthetic school-day benchmark, Gibbs fitting with latent-dimension
// selection, one-step forecasting, streaming online updates, replicate
// prediction, posterior-predictive checking and the rolling forecast
// evaluation loop. Outputs are run directories of CSV/JSON/binary tables.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lady/forecast.hpp"
#include "lady/gibbs.hpp"
#include "lady/io.hpp"
#include "lady/netstats.hpp"
#include "lady/simgen.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.2.0";

void write_manifest(const std::string& dir, const std::string& command,
                    const json& config,
                    const std::vector<std::pair<std::string, std::string>>& inputs) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["version"] = kVersion;
  m["inputs"] = json::object();
  for (const auto& [name, path] : inputs) {
    json e;
    e["path"] = path;
    e["blob_sha1"] = lady::blob_hash(path);
    m["inputs"][name] = e;
  }
  std::ofstream f(dir + "/manifest.json");
  f << m.dump(2) << '\n';
}

template <typename F>
void parallel_for(int n_tasks, int workers, F&& fn) {
  workers = std::max(1, std::min(workers, n_tasks));
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n_tasks) fn(i);
    });
  for (auto& t : pool) t.join();
}

lady::Schedule schedule_from_json(const json& j) {
  lady::Schedule s;
  s.regime = j.at("regime").get<std::vector<int>>();
  for (const auto& d : j.at("departures")) {
    lady::Departure dep;
    dep.actors = d.at("actors").get<std::vector<int>>();
    dep.time_index = d.at("time_index").get<int>();
    s.departures.push_back(dep);
  }
  return s;
}

json schedule_to_json(const lady::Schedule& s) {
  json j;
  j["regime"] = s.regime;
  j["departures"] = json::array();
  for (const auto& d : s.departures)
    j["departures"].push_back({{"actors", d.actors}, {"time_index", d.time_index}});
  return j;
}

struct SimulateArgs {
  std::string out;
  std::uint64_t seed = 1;
  int n = 50;
  double t_end = 15.0;
  double p_high = 0.8, p_med = 0.4, p_low = 0.05;
  std::string schedule_file;
};

int cmd_simulate(const SimulateArgs& a) {
  auto spec = lady::default_regimes(a.p_high, a.p_med, a.p_low);
  auto [sched, grid] = lady::default_schedule(a.n, a.t_end);
  if (!a.schedule_file.empty()) {
    std::ifstream f(a.schedule_file);
    if (!f) throw lady::data_error("cannot open schedule " + a.schedule_file);
    sched = schedule_from_json(json::parse(f));
    if (static_cast<int>(sched.regime.size()) != grid.size())
      throw lady::config_error("schedule length must equal n");
  }
  lady::SimOutput sim = lady::simulate(sched, spec, grid, a.seed);

  fs::create_directories(a.out);
  lady::save_series(sim.series, a.out + "/series");
  {
    int D = lady::dyad_count(spec.V);
    std::vector<double> flat(static_cast<std::size_t>(D) * grid.size());
    for (int k = 0; k < D; ++k) {
      auto [v, u] = lady::dyad_actors(k);
      for (int i = 0; i < grid.size(); ++i)
        flat[static_cast<std::size_t>(k) * grid.size() + i] = sim.true_pi[i](v, u);
    }
    lady::write_tensor(a.out + "/truth_pi.bin", flat,
                       {static_cast<std::size_t>(D),
                        static_cast<std::size_t>(grid.size())},
                       "dyad,time");
  }
  {
    std::ofstream f(a.out + "/schedule.json");
    f << schedule_to_json(sched).dump(2) << '\n';
  }
  json cfg{{"seed", a.seed},     {"n", a.n},         {"t_end", a.t_end},
           {"p_high", a.p_high}, {"p_med", a.p_med}, {"p_low", a.p_low}};
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!a.schedule_file.empty()) inputs.push_back({"schedule", a.schedule_file});
  write_manifest(a.out, "simulate", cfg, inputs);
  std::cout << "simulate: V=" << spec.V << " n=" << grid.size() << " -> "
            << a.out << "\n";
  return 0;
}

struct FitArgs {
  std::string data, out;
  std::string H = "2";
  lady::ModelConfig config;
  double hyper_a = 0.01, hyper_b = 0.01;
  double auc_threshold = 0.01;
  int max_H = 8;
  std::string contacts;
  double window = 0, span_start = 0, span_end = -1;
};

lady::NetworkSeries load_fit_input(const FitArgs& a,
                                   std::vector<std::pair<std::string, std::string>>& inputs) {
  if (!a.contacts.empty()) {
    std::ifstream f(a.contacts);
    if (!f) throw lady::data_error("cannot open contacts " + a.contacts);
    auto data = lady::load_contacts(f);
    double end = a.span_end;
    if (end < a.span_start) {
      for (const auto& e : data.events) end = std::max(end, e.timestamp);
      end += 1e-9;
    }
    if (!(a.window > 0))
      throw lady::config_error("--window is required with --contacts");
    inputs.push_back({"contacts", a.contacts});
    return lady::aggregate_windows(data.events, data.V, a.window, a.span_start,
                                   end);
  }
  inputs.push_back({"series_csv", a.data + ".csv"});
  inputs.push_back({"series_json", a.data + ".json"});
  return lady::load_series(a.data);
}

int cmd_fit(const FitArgs& a) {
  std::vector<std::pair<std::string, std::string>> inputs;
  lady::NetworkSeries series = load_fit_input(a, inputs);

  lady::ModelConfig cfg = a.config;
  cfg.prior.a_mu = cfg.prior.a_z = cfg.prior.a_x = cfg.prior.a_m = a.hyper_a;
  cfg.prior.b_mu = cfg.prior.b_z = cfg.prior.b_x = cfg.prior.b_m = a.hyper_b;

  fs::create_directories(a.out);
  std::unique_ptr<lady::PosteriorStore> store;
  if (a.H == "auto") {
    auto sel = lady::select_H(series, cfg, a.auc_threshold, a.max_H);
    std::ofstream f(a.out + "/h_selection.csv");
    f << "H,auc\n";
    for (std::size_t h = 0; h < sel.auc.size(); ++h)
      f << h << ',' << sel.auc[h] << '\n';
    std::cout << "selected H=" << sel.H_star << "\n";
    store = std::move(sel.store);
  } else {
    cfg.H = std::stoi(a.H);
    store = std::make_unique<lady::PosteriorStore>(lady::run_gibbs(cfg, series));
  }
  lady::save_fit(*store, a.out);
  json jc = json::parse("{}");
  jc["H"] = a.H;
  jc["iters"] = cfg.n_iter;
  jc["burn"] = cfg.burn_in;
  jc["thin"] = cfg.thin;
  jc["seed"] = cfg.seed;
  jc["kappa"] = cfg.kappa;
  jc["hyper_a"] = a.hyper_a;
  jc["hyper_b"] = a.hyper_b;
  jc["data"] = a.data;
  write_manifest(a.out, "fit", jc, inputs);
  double auc = lady::in_sample_auc(*store, series);
  std::cout << "fit: H=" << store->H << " draws=" << store->n_draws
            << " in-sample AUC=" << auc << " -> " << a.out << "\n";
  return 0;
}

struct TerminalSource {
  lady::TerminalDraws terminal;
  double default_delta = 0;
};

TerminalSource load_terminal_source(const std::string& dir) {
  TerminalSource src;
  if (fs::exists(dir + "/config.json")) {
    lady::PosteriorStore store = lady::load_fit(dir);
    src.terminal = store.terminal;
    int n = store.n_times();
    src.default_delta = n >= 2 ? store.grid.delta(n - 2) : 1.0;
    return src;
  }
  if (!fs::exists(dir + "/update.json"))
    throw lady::data_error("no fit or update output found in " + dir);
  std::ifstream f(dir + "/update.json");
  json meta = json::parse(f);
  int V = meta.at("V").get<int>();
  int H = meta.at("H").get<int>();
  auto wt = meta.at("window_times").get<std::vector<double>>();
  src.default_delta =
      wt.size() >= 2 ? wt[wt.size() - 1] - wt[wt.size() - 2] : 1.0;
  lady::Tensor t = lady::read_tensor(dir + "/terminal_draws.bin");
  int nd = static_cast<int>(t.shape[0]);
  int W = static_cast<int>((t.shape[1] - 2) / 2);
  src.terminal.V = V;
  src.terminal.H = H;
  src.terminal.mu.resize(nd, 2);
  src.terminal.x.resize(nd, W);
  src.terminal.xd.resize(nd, W);
  for (int r = 0; r < nd; ++r) {
    const double* p = t.data.data() + static_cast<std::size_t>(r) * (2 + 2 * W);
    src.terminal.mu(r, 0) = p[0];
    src.terminal.mu(r, 1) = p[1];
    for (int c = 0; c < W; ++c) {
      src.terminal.x(r, c) = p[2 + c];
      src.terminal.xd(r, c) = p[2 + W + c];
    }
  }
  return src;
}

int cmd_forecast(const std::string& fit_dir, double delta,
                 const std::string& out) {
  TerminalSource src = load_terminal_source(fit_dir);
  if (delta <= 0) delta = src.default_delta;
  lady::ForecastResult fc = lady::forecast_one_step(src.terminal, delta);
  lady::write_forecast_csv(fc, src.terminal.V, out);
  std::cout << "forecast: delta=" << delta << " -> " << out << "\n";
  return 0;
}

int cmd_predict(const std::string& fit_dir, const std::string& test,
                const std::string& out) {
  lady::PosteriorStore store = lady::load_fit(fit_dir);
  lady::NetworkSeries series = lady::load_series(test);
  lady::PredictResult res = lady::predict_replicate(store, series);
  lady::write_predict_auc_csv(res.auc_per_time, out);
  std::cout << "predict: " << res.auc_per_time.size() << " times -> " << out
            << "\n";
  return 0;
}

struct UpdateArgs {
  std::string fit, state, train, segment, out;
  int j = 5;
  int iters = 0, burn = -1, thin = 1;
  std::uint64_t seed = 1;
};

int cmd_update(const UpdateArgs& a) {
  std::vector<std::pair<std::string, std::string>> inputs;
  lady::OnlineState state;
  if (!a.state.empty()) {
    state = lady::load_online_state(a.state);
    inputs.push_back({"state", a.state});
  } else {
    lady::PosteriorStore store = lady::load_fit(a.fit);
    lady::NetworkSeries training = lady::load_series(a.train);
    state = lady::make_online_state(store, training, a.j);
    inputs.push_back({"train_csv", a.train + ".csv"});
  }
  lady::NetworkSeries segment = lady::load_series(a.segment);
  inputs.push_back({"segment_csv", a.segment + ".csv"});

  lady::OnlineSettings os;
  os.n_iter = a.iters;
  os.burn_in = a.burn >= 0 ? a.burn : a.iters / 2;
  os.thin = a.thin;
  os.seed = a.seed;
  lady::OnlineUpdateResult res = lady::online_update(state, segment, a.j, os);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(a.out);
  lady::save_online_state(res.next, a.out + "/online_state.json");
  {
    json meta;
    meta["V"] = res.V;
    meta["H"] = state.H;
    meta["window_times"] = res.window_times;
    meta["first_new"] = res.first_new;
    meta["n_draws"] = res.n_draws;
    std::ofstream f(a.out + "/update.json");
    f << meta.dump(2) << '\n';
  }
  {
    // pi draws restricted to the new times
    int D = lady::dyad_count(res.V);
    int wn = res.n_window();
    int nn = wn - res.first_new;
    std::vector<double> flat(static_cast<std::size_t>(res.n_draws) * D * nn);
    std::size_t q = 0;
    for (int r = 0; r < res.n_draws; ++r)
      for (int k = 0; k < D; ++k)
        for (int i = res.first_new; i < wn; ++i)
          flat[q++] = res.pi_at(r, k, i);
    lady::write_tensor(a.out + "/pi_new.bin", flat,
                       {static_cast<std::size_t>(res.n_draws),
                        static_cast<std::size_t>(D),
                        static_cast<std::size_t>(nn)},
                       "draw,dyad,time");
    std::ofstream f(a.out + "/pi_new_mean.csv");
    f << "time_index,u,v,mean\n";
    for (int i = res.first_new; i < wn; ++i)
      for (int v = 1; v < res.V; ++v)
        for (int u = 0; u < v; ++u)
          f << (i - res.first_new) << ',' << u << ',' << v << ','
            << res.pi_mean_at(lady::dyad_index(v, u), i) << '\n';
  }
  {
    int nd = res.n_draws;
    int W = static_cast<int>(res.terminal.x.cols());
    std::vector<double> flat(static_cast<std::size_t>(nd) * (2 + 2 * W));
    for (int r = 0; r < nd; ++r) {
      double* p = flat.data() + static_cast<std::size_t>(r) * (2 + 2 * W);
      p[0] = res.terminal.mu(r, 0);
      p[1] = res.terminal.mu(r, 1);
      for (int c = 0; c < W; ++c) {
        p[2 + c] = res.terminal.x(r, c);
        p[2 + W + c] = res.terminal.xd(r, c);
      }
    }
    lady::write_tensor(a.out + "/terminal_draws.bin", flat,
                       {static_cast<std::size_t>(nd),
                        static_cast<std::size_t>(2 + 2 * W)},
                       "draw,(mu,mu',x...,xd...)");
  }
  json jc{{"j", a.j},       {"iters", os.n_iter}, {"burn", os.burn_in},
          {"thin", os.thin}, {"seed", a.seed}};
  write_manifest(a.out, "update", jc, inputs);
  std::cout << "update: window=" << res.n_window() << " new="
            << res.n_window() - res.first_new << " draws=" << res.n_draws
            << " -> " << a.out << "\n";
  return 0;
}

int cmd_check(const std::string& fit_dir, const std::string& data,
              const std::string& out, std::uint64_t seed, double level) {
  lady::PosteriorStore store = lady::load_fit(fit_dir);
  lady::NetworkSeries series = lady::load_series(data);
  std::mt19937_64 rng(seed);
  lady::CheckReport rep = lady::posterior_predictive_check(store, series, rng, level);
  lady::write_check_csv(rep, out);
  std::cout << "check: density coverage=" << rep.density_coverage
            << " degree coverage=" << rep.degree_coverage << " -> " << out
            << "\n";
  return 0;
}

struct EvalArgs {
  std::string out;
  std::uint64_t seed = 1;
  int replicates = 20;
  int first_target = 45, last_target = 50;  // 1-based times
  int j = 5;
  int fit_iters = 5000, fit_burn = 1000, fit_thin = 2;
  int online_iters = 2500, online_burn = 500, online_thin = 2;
  int H = 2;
  int workers = 0;
  double p_high = 0.8, p_med = 0.4, p_low = 0.05;
  std::string mode = "both";  // forecast | predict | both
};

int cmd_eval(const EvalArgs& a) {
  fs::create_directories(a.out);
  auto spec = lady::default_regimes(a.p_high, a.p_med, a.p_low);
  auto [sched, grid] = lady::default_schedule();
  int workers = a.workers > 0
                    ? a.workers
                    : static_cast<int>(std::thread::hardware_concurrency());

  int nt = a.last_target - a.first_target + 1;
  std::vector<std::vector<std::optional<double>>> fc_auc(
      a.replicates, std::vector<std::optional<double>>(nt));
  std::vector<std::vector<std::optional<double>>> pr_auc(a.replicates);

  bool do_forecast = a.mode == "both" || a.mode == "forecast";
  bool do_predict = a.mode == "both" || a.mode == "predict";

  parallel_for(a.replicates, workers, [&](int r) {
    std::uint64_t rep_seed = a.seed + 1000ULL * (r + 1);
    lady::SimOutput sim = lady::simulate(sched, spec, grid, rep_seed);

    if (do_forecast) {
      lady::ModelConfig fit_cfg;
      fit_cfg.H = a.H;
      fit_cfg.n_iter = a.fit_iters;
      fit_cfg.burn_in = a.fit_burn;
      fit_cfg.thin = a.fit_thin;
      fit_cfg.seed = rep_seed + 7;
      lady::OnlineSettings os;
      os.n_iter = a.online_iters;
      os.burn_in = a.online_burn;
      os.thin = a.online_thin;
      os.seed = rep_seed + 13;
      fc_auc[r] = lady::forecast_protocol(sim.series, a.first_target - 1,
                                          a.last_target - 1, a.j, fit_cfg, os);
    }
    if (do_predict) {
      lady::ModelConfig cfg;
      cfg.H = a.H;
      cfg.n_iter = a.fit_iters;
      cfg.burn_in = a.fit_burn;
      cfg.thin = a.fit_thin;
      cfg.seed = rep_seed + 23;
      lady::PosteriorStore store = lady::run_gibbs(cfg, sim.series);
      lady::SimOutput fresh = lady::simulate(sched, spec, grid, rep_seed + 31);
      lady::PredictResult res = lady::predict_replicate(store, fresh.series);
      pr_auc[r] = res.auc_per_time;
    }
    std::cout << "eval: replicate " << r << " done\n" << std::flush;
  });

  if (do_forecast) {
    std::ofstream f(a.out + "/forecast_auc.csv");
    f << "replicate,target_time,auc\n";
    for (int r = 0; r < a.replicates; ++r)
      for (int k = 0; k < nt; ++k) {
        f << r << ',' << (a.first_target + k) << ',';
        if (fc_auc[r][k])
          f << *fc_auc[r][k];
        else
          f << "NA";
        f << '\n';
      }
  }
  if (do_predict) {
    std::ofstream f(a.out + "/predict_auc.csv");
    f << "replicate,time,auc\n";
    for (int r = 0; r < a.replicates; ++r)
      for (std::size_t i = 0; i < pr_auc[r].size(); ++i) {
        f << r << ',' << (i + 1) << ',';
        if (pr_auc[r][i])
          f << *pr_auc[r][i];
        else
          f << "NA";
        f << '\n';
      }
  }
  json jc{{"seed", a.seed},
          {"replicates", a.replicates},
          {"first_target", a.first_target},
          {"last_target", a.last_target},
          {"j", a.j},
          {"H", a.H},
          {"fit_iters", a.fit_iters},
          {"fit_burn", a.fit_burn},
          {"online_iters", a.online_iters},
          {"online_burn", a.online_burn},
          {"mode", a.mode}};
  write_manifest(a.out, "eval", jc, {});
  std::cout << "eval: " << a.replicates << " replicates -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LADY dynamic network model"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "generate the synthetic benchmark");
  s_sim->add_option("--out", sim.out)->required();
  s_sim->add_option("--seed", sim.seed)->required();
  s_sim->add_option("--n", sim.n);
  s_sim->add_option("--t-end", sim.t_end);
  s_sim->add_option("--p-high", sim.p_high);
  s_sim->add_option("--p-med", sim.p_med);
  s_sim->add_option("--p-low", sim.p_low);
  s_sim->add_option("--schedule", sim.schedule_file);

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "run the Gibbs sampler");
  s_fit->add_option("--data", fit.data);
  s_fit->add_option("--out", fit.out)->required();
  s_fit->add_option("--seed", fit.config.seed)->required();
  s_fit->add_option("--H", fit.H, "latent dimension or 'auto'");
  s_fit->add_option("--iters", fit.config.n_iter);
  s_fit->add_option("--burn", fit.config.burn_in);
  s_fit->add_option("--thin", fit.config.thin);
  s_fit->add_option("--kappa", fit.config.kappa);
  s_fit->add_option("--hyper-a", fit.hyper_a);
  s_fit->add_option("--hyper-b", fit.hyper_b);
  s_fit->add_option("--auc-threshold", fit.auc_threshold);
  s_fit->add_option("--max-H", fit.max_H);
  s_fit->add_option("--contacts", fit.contacts, "raw edge-list CSV input");
  s_fit->add_option("--window", fit.window, "aggregation window width");
  s_fit->add_option("--span-start", fit.span_start);
  s_fit->add_option("--span-end", fit.span_end);

  std::string fc_fit, fc_out = "forecast.csv";
  double fc_delta = 0;
  auto* s_fc = app.add_subcommand("forecast", "one-step-ahead edge forecast");
  s_fc->add_option("--fit", fc_fit, "fit or update run directory")->required();
  s_fc->add_option("--delta", fc_delta, "time increment (default: last grid gap)");
  s_fc->add_option("--out", fc_out);

  std::string pr_fit, pr_test, pr_out = "predict_auc.csv";
  auto* s_pr = app.add_subcommand("predict", "score a held-out replicate series");
  s_pr->add_option("--fit", pr_fit)->required();
  s_pr->add_option("--test", pr_test)->required();
  s_pr->add_option("--out", pr_out);

  UpdateArgs upd;
  auto* s_up = app.add_subcommand("update", "online update with new snapshots");
  s_up->add_option("--fit", upd.fit);
  s_up->add_option("--state", upd.state, "resume from a saved online state");
  s_up->add_option("--train", upd.train, "training series used for the fit");
  s_up->add_option("--new", upd.segment)->required();
  s_up->add_option("--out", upd.out)->required();
  s_up->add_option("--j", upd.j);
  s_up->add_option("--iters", upd.iters)->required();
  s_up->add_option("--burn", upd.burn);
  s_up->add_option("--thin", upd.thin);
  s_up->add_option("--seed", upd.seed)->required();

  std::string ck_fit, ck_data, ck_out = "check.csv";
  std::uint64_t ck_seed = 1;
  double ck_level = 0.95;
  auto* s_ck = app.add_subcommand("check", "posterior-predictive model checking");
  s_ck->add_option("--fit", ck_fit)->required();
  s_ck->add_option("--data", ck_data)->required();
  s_ck->add_option("--out", ck_out);
  s_ck->add_option("--seed", ck_seed);
  s_ck->add_option("--level", ck_level);

  EvalArgs ev;
  auto* s_ev = app.add_subcommand("eval", "rolling forecast / prediction study");
  s_ev->add_option("--out", ev.out)->required();
  s_ev->add_option("--seed", ev.seed)->required();
  s_ev->add_option("--replicates", ev.replicates);
  s_ev->add_option("--first-target", ev.first_target);
  s_ev->add_option("--last-target", ev.last_target);
  s_ev->add_option("--j", ev.j);
  s_ev->add_option("--H", ev.H);
  s_ev->add_option("--fit-iters", ev.fit_iters);
  s_ev->add_option("--fit-burn", ev.fit_burn);
  s_ev->add_option("--fit-thin", ev.fit_thin);
  s_ev->add_option("--online-iters", ev.online_iters);
  s_ev->add_option("--online-burn", ev.online_burn);
  s_ev->add_option("--online-thin", ev.online_thin);
  s_ev->add_option("--workers", ev.workers);
  s_ev->add_option("--p-high", ev.p_high);
  s_ev->add_option("--p-med", ev.p_med);
  s_ev->add_option("--p-low", ev.p_low);
  s_ev->add_option("--mode", ev.mode)->check(CLI::IsMember({"forecast", "predict", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s_sim->parsed()) return cmd_simulate(sim);
    if (s_fit->parsed()) {
      if (fit.data.empty() && fit.contacts.empty())
        throw lady::config_error("fit: need --data or --contacts");
      return cmd_fit(fit);
    }
    if (s_fc->parsed()) return cmd_forecast(fc_fit, fc_delta, fc_out);
    if (s_pr->parsed()) return cmd_predict(pr_fit, pr_test, pr_out);
    if (s_up->parsed()) {
      if (upd.state.empty() && (upd.fit.empty() || upd.train.empty()))
        throw lady::config_error("update: need --state or both --fit and --train");
      return cmd_update(upd);
    }
    if (s_ck->parsed()) return cmd_check(ck_fit, ck_data, ck_out, ck_seed, ck_level);
    if (s_ev->parsed()) return cmd_eval(ev);
  } catch (const lady::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lady::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const lady::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

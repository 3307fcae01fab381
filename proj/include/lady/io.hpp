#pragma once

#include <string>
#include <vector>

#include "lady/forecast.hpp"
#include "lady/gibbs.hpp"
#include "lady/netstats.hpp"

namespace lady {

// Self-describing binary tensor: one JSON header line
// {"dtype":"float64","shape":[...],"order":"..."} followed by raw
// little-endian float64 data.
void write_tensor(const std::string& path, const std::vector<double>& data,
                  const std::vector<std::size_t>& shape,
                  const std::string& order);
struct Tensor {
  std::vector<double> data;
  std::vector<std::size_t> shape;
  std::string order;
};
Tensor read_tensor(const std::string& path);

// git-style content hash of a file: SHA-1 over "blob <size>\0<bytes>"
std::string blob_hash(const std::string& path);
std::string sha1_hex(const void* data, std::size_t len);

// Fit run directory: config.json, posterior_pi.bin, terminal_state.json,
// variances.json, trace_summaries.csv (+ manifest written by the CLI).
void save_fit(const PosteriorStore& store, const std::string& dir);
PosteriorStore load_fit(const std::string& dir);

void save_online_state(const OnlineState& state, const std::string& path);
OnlineState load_online_state(const std::string& path);

// forecast.csv: v,u,mean,q025,q975
void write_forecast_csv(const ForecastResult& fc, int V,
                        const std::string& path);
// predict_auc.csv: time_index,auc
void write_predict_auc_csv(const std::vector<std::optional<double>>& aucs,
                           const std::string& path);
// check.csv: time_index,statistic,observed,mean,q025,q975
void write_check_csv(const CheckReport& rep, const std::string& path);

}  // namespace lady

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lady/netseries.hpp"

namespace lady {

// Five ground-truth edge-probability regimes for a stylized school day with
// V = 30 students in three classes of ten, half male and half female.
struct RegimeSpec {
  int V = 30;
  std::vector<Eigen::MatrixXd> prob;  // 5 symmetric V x V matrices, zero diag
  std::vector<int> class_of;          // 0,1,2
  std::vector<int> gender_of;         // 0 = male, 1 = female
};

//  1 school hours   - within-class p_high, across p_low
//  2 break          - same-gender p_high regardless of class
//  3 shared room    - as 1 plus p_med between the first two classes
//  4 lunch split    - class 2 halves join classes 1 and 3; a small set of
//                     students leaves for lunch (zero rows)
//  5 end of day     - class 1 alone, classes 2 and 3 gathering
RegimeSpec default_regimes(double p_high = 0.8, double p_med = 0.4,
                           double p_low = 0.05);

struct Departure {
  std::vector<int> actors;
  int time_index;  // zero the actors' dyads from this index on
};

struct Schedule {
  std::vector<int> regime;  // per time, values 1..5
  std::vector<Departure> departures;
};

// n equally spaced times on [0, t_end], a documented school-day phase
// sequence ending in regimes 5/2/4, departures of actors {1,4,10,12} at
// t_42 and {16,20,26,28} at t_46 (1-based ids and times).
std::pair<Schedule, TimeGrid> default_schedule(int n = 50, double t_end = 15.0);

// Ground-truth probability matrix at time i (regime with departures applied).
Eigen::MatrixXd true_pi_at(const Schedule& sched, const RegimeSpec& spec,
                           int i);

struct SimOutput {
  NetworkSeries series;
  std::vector<Eigen::MatrixXd> true_pi;  // per time
};

SimOutput simulate(const Schedule& sched, const RegimeSpec& spec,
                   const TimeGrid& grid, std::uint64_t seed);

}  // namespace lady

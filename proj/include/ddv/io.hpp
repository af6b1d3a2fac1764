#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddv/data.hpp"
#include "ddv/lti.hpp"
#include "ddv/supply.hpp"

namespace ddv {

// Trajectory CSV: header names the columns u1..um, x1..xn, y1..yp (x and y
// optional, any column order, indices contiguous from 1). One sample per row;
// the state columns may carry one extra trailing row (x_N) whose other cells
// are empty. Values are written with 17 significant digits so a round trip is
// exact. Parse errors name the offending row/column.
Trajectory load_trajectory_csv(const std::string& path);
void save_trajectory_csv(const Trajectory& t, const std::string& path);

// System matrix file: "n/m/p <count>" header lines, then labeled blocks A, B,
// C, D given row by row. '#' starts a comment. Additional "key value" lines
// after the blocks are returned in the metadata map (the simulate command
// writes oracle values there).
struct SystemFile {
  LtiSystem sys;
  std::map<std::string, double> metadata;
};
SystemFile load_system_file(const std::string& path);
void save_system_file(const LtiSystem& sys, const std::string& path,
                      const std::vector<std::pair<std::string, double>>& metadata = {});

// Supply-rate file: "m/p <count>" header lines, then blocks Q, S, R.
SupplyRate load_supply_file(const std::string& path);

// Noise-bound file: "span/width <count>" header lines, then blocks Qn, Sn, Rn.
NoiseBoundQuadratic load_noise_file(const std::string& path, NoiseTarget target);

// Key-value report lines, kept in insertion order.
struct Report {
  std::vector<std::pair<std::string, std::string>> items;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  std::string to_text() const;
  void write(const std::string& path) const;
};

}  // namespace ddv

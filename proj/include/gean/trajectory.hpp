#pragma once

#include <vector>

#include "gean/dynamics.hpp"

namespace gean {

// A logged (t, q, u) sequence at simulator rate.
struct Trajectory {
  double dt = 0.002;
  std::vector<double> t;
  std::vector<Vec> q;  // [rad]
  std::vector<Vec> u;  // normalized commands

  // Number of samples (time indices 0 .. size()-1).
  std::size_t size() const { return t.size(); }
  int n_joints() const { return q.empty() ? 0 : static_cast<int>(q[0].size()); }
};

}  // namespace gean

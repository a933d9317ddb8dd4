// Raw delta-history feature construction. A step's input is the current
// value plus differences of strided past values to the current one,
//   (x_t, x_{t-s} - x_t, ..., x_{t-sH} - x_t)
// for both joint positions and control signals, concatenated.
#pragma once

#include <vector>

#include "gean/trajectory.hpp"

namespace gean {

inline int feature_dim(int n_joints, int history_length) {
  return 2 * n_joints * (history_length + 1);
}

// Unnormalized features for step t of a trajectory; requires t >= H*s.
Vec delta_features(const Trajectory& traj, std::size_t t, int history_length,
                   int history_stride);

// Same on explicit windows of length H*s + 1, ordered oldest to newest.
Vec delta_features(const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window, int history_length,
                   int history_stride);

}  // namespace gean

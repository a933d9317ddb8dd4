#include "gean/feature.hpp"

#include <stdexcept>

namespace gean {

namespace {

// Shared layout: q features first (offset index k outer, joint inner),
// then u features in the same order.
template <typename GetQ, typename GetU>
Vec build(int n, int H, int s, GetQ&& q_at, GetU&& u_at) {
  Vec f(feature_dim(n, H));
  int idx = 0;
  for (int k = 0; k <= H; ++k) {
    for (int j = 0; j < n; ++j) {
      f[idx++] = k == 0 ? q_at(0, j) : q_at(k * s, j) - q_at(0, j);
    }
  }
  for (int k = 0; k <= H; ++k) {
    for (int j = 0; j < n; ++j) {
      f[idx++] = k == 0 ? u_at(0, j) : u_at(k * s, j) - u_at(0, j);
    }
  }
  return f;
}

}  // namespace

Vec delta_features(const Trajectory& traj, std::size_t t, int history_length,
                   int history_stride) {
  const int H = history_length;
  const int s = history_stride;
  if (H < 1 || s < 1) throw std::invalid_argument("need H >= 1 and s >= 1");
  if (t < static_cast<std::size_t>(H) * s || t >= traj.size())
    throw std::invalid_argument("insufficient history for requested step");
  const int n = traj.n_joints();
  return build(
      n, H, s, [&](int back, int j) { return traj.q[t - back][j]; },
      [&](int back, int j) { return traj.u[t - back][j]; });
}

Vec delta_features(const std::vector<Vec>& q_window,
                   const std::vector<Vec>& u_window, int history_length,
                   int history_stride) {
  const int H = history_length;
  const int s = history_stride;
  if (H < 1 || s < 1) throw std::invalid_argument("need H >= 1 and s >= 1");
  const std::size_t need = static_cast<std::size_t>(H) * s + 1;
  if (q_window.size() < need || u_window.size() < need)
    throw std::invalid_argument("history window too short");
  const int n = static_cast<int>(q_window[0].size());
  const std::size_t last_q = q_window.size() - 1;
  const std::size_t last_u = u_window.size() - 1;
  return build(
      n, H, s, [&](int back, int j) { return q_window[last_q - back][j]; },
      [&](int back, int j) { return u_window[last_u - back][j]; });
}

}  // namespace gean

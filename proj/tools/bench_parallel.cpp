// Benchmark of the chunk-parallel kernels against the serial reference
// path: data collection and the zero-torque normalizer table. Also
// asserts that both paths produce identical results, which the chunked
// reduction scheme guarantees by construction.
#include <chrono>
#include <cstdio>

#include "gean/datagen.hpp"
#include "gean/gean.hpp"
#include "gean/parallel.hpp"

namespace {

template <typename F>
double time_it(bool parallel, F&& f) {
  gean::set_parallel_enabled(parallel);
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* kernel, double serial_s, double parallel_s) {
  std::printf("%-28s %10.3f %10.3f %7.2fx\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s);
}

}  // namespace

int main() {
  const gean::ArmModel arm = gean::ArmModel::default_arm();
  const gean::PlantModel plant = gean::PlantModel::default_messy();
  gean::DataParams params = gean::DataParams::defaults(arm.n_joints);
  params.n_traj = 64;

  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]",
              "speedup");

  gean::Dataset serial_ds, parallel_ds;
  const double collect_serial =
      time_it(false, [&] { serial_ds = gean::collect_dataset(plant, arm, params); });
  const double collect_parallel =
      time_it(true, [&] { parallel_ds = gean::collect_dataset(plant, arm, params); });
  report("collect_dataset", collect_serial, collect_parallel);
  for (std::size_t i = 0; i < serial_ds.trajectories.size(); ++i) {
    for (std::size_t t = 0; t < serial_ds.trajectories[i].size(); ++t) {
      if (serial_ds.trajectories[i].q[t] != parallel_ds.trajectories[i].q[t]) {
        std::printf("MISMATCH in trajectory %zu step %zu\n", i, t);
        return 1;
      }
    }
  }

  gean::Mat serial_c, parallel_c;
  const double norm_serial = time_it(
      false, [&] { serial_c = gean::zero_torque_normalizers(arm, serial_ds, 10); });
  const double norm_parallel = time_it(
      true, [&] { parallel_c = gean::zero_torque_normalizers(arm, serial_ds, 10); });
  report("zero_torque_normalizers", norm_serial, norm_parallel);
  if (serial_c != parallel_c) {
    std::printf("MISMATCH in normalizer table\n");
    return 1;
  }

  std::printf("serial and parallel results identical\n");
  gean::set_parallel_enabled(true);
  return 0;
}

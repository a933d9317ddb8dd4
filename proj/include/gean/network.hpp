// Small dense tanh network with hand-written batch forward/backward
// passes and an Adam optimizer. No autodiff dependency; the network is
// tiny and the simulator Jacobian is applied explicitly by the losses.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gean/dynamics.hpp"

namespace gean {

struct Mlp {
  // layer_dims = {in, hidden..., out}; W[l] is (out_l x in_l), row-major
  // semantics in the checkpoint format. All hidden layers use tanh, the
  // output layer is linear.
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  std::size_t layer_count() const { return weights.size(); }

  // Uniform fan-in init, +-sqrt(1/fan_in).
  static Mlp init(const std::vector<int>& layer_dims, std::mt19937_64& rng);
};

// Forward-pass cache: activations[0] is the input batch (rows = samples),
// activations[l] the post-activation output of layer l.
struct MlpCache {
  std::vector<Mat> activations;
};

// Batch forward; rows of x are samples. Returns the (batch x out) output.
Mat mlp_forward(const Mlp& net, const Mat& x, MlpCache* cache = nullptr);

struct MlpGrad {
  std::vector<Mat> d_weights;
  std::vector<Vec> d_biases;

  static MlpGrad zeros_like(const Mlp& net);
  void add(const MlpGrad& other);
  void scale(double s);
};

// Batch backward for output adjoint d_out (batch x out). Accumulates into
// grad; optionally returns the input adjoint.
void mlp_backward(const Mlp& net, const MlpCache& cache, const Mat& d_out,
                  MlpGrad& grad, Mat* d_input = nullptr);

class Adam {
 public:
  Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void update(Mlp& net, const MlpGrad& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Mat> m_w_, v_w_;
  std::vector<Vec> m_b_, v_b_;
};

}  // namespace gean

#include "gean/network.hpp"

#include <cmath>
#include <stdexcept>

namespace gean {

Mlp Mlp::init(const std::vector<int>& layer_dims, std::mt19937_64& rng) {
  if (layer_dims.size() < 2) throw std::invalid_argument("need >= 2 layer dims");
  Mlp net;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int in = layer_dims[l];
    const int out = layer_dims[l + 1];
    if (in < 1 || out < 1) throw std::invalid_argument("layer dims must be >= 1");
    const double bound = std::sqrt(1.0 / in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Mat w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = dist(rng);
    Vec b(out);
    for (int r = 0; r < out; ++r) b[r] = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

Mat mlp_forward(const Mlp& net, const Mat& x, MlpCache* cache) {
  if (x.cols() != net.input_dim())
    throw std::invalid_argument("input has wrong feature dimension");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  Mat a = x;
  const std::size_t layers = net.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    Mat z = a * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    if (l + 1 < layers) z = z.array().tanh();
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

MlpGrad MlpGrad::zeros_like(const Mlp& net) {
  MlpGrad g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.d_weights.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.d_biases.push_back(Vec::Zero(net.biases[l].size()));
  }
  return g;
}

void MlpGrad::add(const MlpGrad& other) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] += other.d_weights[l];
    d_biases[l] += other.d_biases[l];
  }
}

void MlpGrad::scale(double s) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] *= s;
    d_biases[l] *= s;
  }
}

void mlp_backward(const Mlp& net, const MlpCache& cache, const Mat& d_out,
                  MlpGrad& grad, Mat* d_input) {
  const std::size_t layers = net.layer_count();
  Mat delta = d_out;
  for (std::size_t l = layers; l-- > 0;) {
    // delta is the adjoint of layer l's pre-bias+activation output; for
    // hidden layers fold in the tanh derivative first.
    if (l + 1 < layers) {
      const Mat& a = cache.activations[l + 1];
      delta = delta.cwiseProduct(Mat::Ones(a.rows(), a.cols()) - a.cwiseProduct(a));
    }
    grad.d_weights[l].noalias() += delta.transpose() * cache.activations[l];
    grad.d_biases[l] += delta.colwise().sum().transpose();
    if (l > 0 || d_input) {
      Mat d_prev = delta * net.weights[l];
      if (l == 0) {
        if (d_input) *d_input = std::move(d_prev);
      } else {
        delta = std::move(d_prev);
      }
    }
  }
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    m_w_.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    v_w_.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    m_b_.push_back(Vec::Zero(net.biases[l].size()));
    v_b_.push_back(Vec::Zero(net.biases[l].size()));
  }
}

void Adam::update(Mlp& net, const MlpGrad& grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    m_w_[l] = beta1_ * m_w_[l] + (1.0 - beta1_) * grad.d_weights[l];
    v_w_[l] = beta2_ * v_w_[l].array() +
              (1.0 - beta2_) * grad.d_weights[l].array().square();
    net.weights[l].array() -=
        lr_ * (m_w_[l].array() / bc1) /
        ((v_w_[l].array() / bc2).sqrt() + eps_);
    m_b_[l] = beta1_ * m_b_[l] + (1.0 - beta1_) * grad.d_biases[l];
    v_b_[l] = beta2_ * v_b_[l].array() +
              (1.0 - beta2_) * grad.d_biases[l].array().square();
    net.biases[l].array() -=
        lr_ * (m_b_[l].array() / bc1) /
        ((v_b_[l].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace gean

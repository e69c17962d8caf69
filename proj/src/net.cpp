#include "tea/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tea/kernels.hpp"
#include "tea/serial.hpp"

namespace tea::net {

void NetSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("NetSpec: need at least input and output layers");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw std::invalid_argument("NetSpec: layer sizes must be >= 1");
  }
}

std::size_t NetParams::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

NetParams init_net(const NetSpec& spec, SeededRng& rng) {
  spec.validate();
  NetParams p;
  p.spec = spec;
  p.layers.resize(spec.n_layers());
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    Layer& layer = p.layers[l];
    layer.cols = spec.layer_sizes[l];
    layer.rows = spec.layer_sizes[l + 1];
    layer.w.resize(layer.rows * layer.cols);
    layer.b.assign(layer.rows, 0.0);
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.cols));
    for (double& w : layer.w) w = rng.uniform(-limit, limit);
    layer.m_w.assign(layer.w.size(), 0.0);
    layer.v_w.assign(layer.w.size(), 0.0);
    layer.m_b.assign(layer.b.size(), 0.0);
    layer.v_b.assign(layer.b.size(), 0.0);
  }
  return p;
}

void Gradients::zero() {
  for (auto& g : w) std::fill(g.begin(), g.end(), 0.0);
  for (auto& g : b) std::fill(g.begin(), g.end(), 0.0);
}

void Gradients::scale(double a) {
  for (auto& g : w) {
    for (double& v : g) v *= a;
  }
  for (auto& g : b) {
    for (double& v : g) v *= a;
  }
}

Gradients make_gradients(const NetParams& params) {
  Gradients g;
  g.w.resize(params.layers.size());
  g.b.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    g.w[l].assign(params.layers[l].w.size(), 0.0);
    g.b[l].assign(params.layers[l].b.size(), 0.0);
  }
  return g;
}

const std::vector<double>& forward(const NetParams& params, std::span<const double> input,
                                   ForwardCache& cache) {
  if (input.size() != params.input_dim()) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  const auto& ops = kernels::active_ops();
  const std::size_t n_layers = params.layers.size();
  cache.acts.resize(n_layers + 1);
  cache.acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = params.layers[l];
    auto& out = cache.acts[l + 1];
    out.resize(layer.rows);
    ops.matvec(layer.w.data(), cache.acts[l].data(), layer.b.data(), out.data(), layer.rows,
               layer.cols);
    if (l + 1 < n_layers) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    }
  }
  return cache.acts.back();
}

std::vector<double> forward(const NetParams& params, std::span<const double> input) {
  ForwardCache cache;
  forward(params, input, cache);
  return std::move(cache.acts.back());
}

void backward(const NetParams& params, const ForwardCache& cache,
              std::span<const double> output_grad, Gradients& acc) {
  const std::size_t n_layers = params.layers.size();
  if (cache.acts.size() != n_layers + 1) {
    throw std::invalid_argument("backward: cache does not match network");
  }
  if (output_grad.size() != params.output_dim()) {
    throw std::invalid_argument("backward: output_grad dimension mismatch");
  }
  const auto& ops = kernels::active_ops();
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> delta_prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    if (l + 1 < n_layers) {
      // ReLU derivative: post-activation > 0 iff pre-activation > 0.
      const auto& act = cache.acts[l + 1];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (act[i] <= 0.0) delta[i] = 0.0;
      }
    }
    ops.outer_acc(acc.w[l].data(), delta.data(), cache.acts[l].data(), layer.rows, layer.cols);
    for (std::size_t i = 0; i < layer.rows; ++i) acc.b[l][i] += delta[i];
    if (l > 0) {
      delta_prev.assign(layer.cols, 0.0);
      ops.matvec_t_acc(layer.w.data(), delta.data(), delta_prev.data(), layer.rows, layer.cols);
      delta.swap(delta_prev);
    }
  }
}

void forward_batch(const NetParams& params, const double* x, std::size_t batch,
                   BatchCache& cache) {
  const auto& ops = kernels::active_ops();
  const std::size_t n_layers = params.layers.size();
  cache.batch = batch;
  cache.acts.resize(n_layers + 1);
  const std::size_t in_dim = params.input_dim();
  cache.acts[0].assign(x, x + batch * in_dim);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = params.layers[l];
    const auto& in = cache.acts[l];
    auto& out = cache.acts[l + 1];
    out.resize(batch * layer.rows);
    // Weight row stays hot across the whole batch.
    for (std::size_t i = 0; i < layer.rows; ++i) {
      const double* w_row = layer.w.data() + i * layer.cols;
      const double bias = layer.b[i];
      for (std::size_t s = 0; s < batch; ++s) {
        out[s * layer.rows + i] = ops.dot(w_row, in.data() + s * layer.cols, layer.cols) + bias;
      }
    }
    if (l + 1 < n_layers) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    }
  }
}

void backward_batch(const NetParams& params, const BatchCache& cache, const double* dy,
                    Gradients& acc) {
  const auto& ops = kernels::active_ops();
  const std::size_t n_layers = params.layers.size();
  const std::size_t batch = cache.batch;
  std::vector<double> delta(dy, dy + batch * params.output_dim());
  std::vector<double> delta_prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    if (l + 1 < n_layers) {
      const auto& act = cache.acts[l + 1];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (act[i] <= 0.0) delta[i] = 0.0;
      }
    }
    const auto& in = cache.acts[l];
    // dW[i][:] accumulates over samples in ascending order, matching the
    // single-sample path exactly.
    for (std::size_t i = 0; i < layer.rows; ++i) {
      double* dw_row = acc.w[l].data() + i * layer.cols;
      double db = 0.0;
      for (std::size_t s = 0; s < batch; ++s) {
        const double d = delta[s * layer.rows + i];
        if (d != 0.0) ops.axpy(d, in.data() + s * layer.cols, dw_row, layer.cols);
        db += d;
      }
      acc.b[l][i] += db;
    }
    if (l > 0) {
      delta_prev.assign(batch * layer.cols, 0.0);
      for (std::size_t i = 0; i < layer.rows; ++i) {
        const double* w_row = layer.w.data() + i * layer.cols;
        for (std::size_t s = 0; s < batch; ++s) {
          const double d = delta[s * layer.rows + i];
          if (d != 0.0) ops.axpy(d, w_row, delta_prev.data() + s * layer.cols, layer.cols);
        }
      }
      delta.swap(delta_prev);
    }
  }
}

void adam_step(NetParams& params, const Gradients& grads, double lr, double beta1, double beta2,
               double eps) {
  if (grads.w.size() != params.layers.size()) {
    throw std::invalid_argument("adam_step: gradient/layer count mismatch");
  }
  const auto& ops = kernels::active_ops();
  params.adam_step += 1;
  const double t = static_cast<double>(params.adam_step);
  const double bc1 = 1.0 / (1.0 - std::pow(beta1, t));
  const double bc2 = 1.0 / (1.0 - std::pow(beta2, t));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Layer& layer = params.layers[l];
    if (grads.w[l].size() != layer.w.size() || grads.b[l].size() != layer.b.size()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    ops.adam_update(layer.w.data(), layer.m_w.data(), layer.v_w.data(), grads.w[l].data(),
                    layer.w.size(), lr, beta1, beta2, eps, bc1, bc2);
    ops.adam_update(layer.b.data(), layer.m_b.data(), layer.v_b.data(), grads.b[l].data(),
                    layer.b.size(), lr, beta1, beta2, eps, bc1, bc2);
  }
}

LossGrad mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw std::invalid_argument("mse_loss: length mismatch");
  }
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  LossGrad r;
  r.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.loss += d * d;
    r.grad[i] = 2.0 * d * inv_n;
  }
  r.loss *= inv_n;
  return r;
}

LossGrad huber_loss(std::span<const double> pred, std::span<const double> target, double delta) {
  if (pred.size() != target.size() || pred.empty()) {
    throw std::invalid_argument("huber_loss: length mismatch");
  }
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  LossGrad r;
  r.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    const double ad = std::abs(d);
    if (ad <= delta) {
      r.loss += 0.5 * d * d;
      r.grad[i] = d * inv_n;
    } else {
      r.loss += delta * (ad - 0.5 * delta);
      r.grad[i] = (d > 0.0 ? delta : -delta) * inv_n;
    }
  }
  r.loss *= inv_n;
  return r;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

LossGrad softmax_nll_loss(std::span<const double> logits, std::size_t label) {
  if (logits.empty()) throw std::invalid_argument("softmax_nll_loss: empty logits");
  if (label >= logits.size()) {
    throw std::invalid_argument("softmax_nll_loss: label out of range");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  LossGrad r;
  r.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.grad[i] = std::exp(logits[i] - m);
    sum += r.grad[i];
  }
  r.loss = -(logits[label] - m - std::log(sum));
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.grad[i] = r.grad[i] / sum - (i == label ? 1.0 : 0.0);
  }
  return r;
}

namespace {
constexpr char kNetMagic[9] = "TEANET01";
}

void save_net(const NetParams& params, const std::filesystem::path& path) {
  serial::Writer w(path);
  w.magic(kNetMagic);
  w.u32(static_cast<std::uint32_t>(params.spec.layer_sizes.size()));
  for (std::size_t s : params.spec.layer_sizes) w.u32(static_cast<std::uint32_t>(s));
  for (const auto& layer : params.layers) {
    w.f64_array(layer.w);
    w.f64_array(layer.b);
  }
  w.u64(params.adam_step);
  for (const auto& layer : params.layers) {
    w.f64_array(layer.m_w);
    w.f64_array(layer.v_w);
    w.f64_array(layer.m_b);
    w.f64_array(layer.v_b);
  }
  w.finish_with_crc();
}

NetParams load_net(const std::filesystem::path& path) {
  serial::Reader r(path);
  r.expect_magic(kNetMagic);
  NetSpec spec;
  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 64) {
    throw std::runtime_error("corrupt checkpoint (layer count): " + path.string());
  }
  spec.layer_sizes.resize(n_sizes);
  for (auto& s : spec.layer_sizes) s = r.u32();
  spec.validate();
  NetParams p;
  p.spec = spec;
  p.layers.resize(spec.n_layers());
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    Layer& layer = p.layers[l];
    layer.cols = spec.layer_sizes[l];
    layer.rows = spec.layer_sizes[l + 1];
    layer.w.resize(layer.rows * layer.cols);
    layer.b.resize(layer.rows);
    r.f64_array(layer.w);
    r.f64_array(layer.b);
  }
  p.adam_step = r.u64();
  for (auto& layer : p.layers) {
    layer.m_w.resize(layer.w.size());
    layer.v_w.resize(layer.w.size());
    layer.m_b.resize(layer.b.size());
    layer.v_b.resize(layer.b.size());
    r.f64_array(layer.m_w);
    r.f64_array(layer.v_w);
    r.f64_array(layer.m_b);
    r.f64_array(layer.v_b);
  }
  r.verify_crc_trailer();
  return p;
}

}  // namespace tea::net

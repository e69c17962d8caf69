#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tea/rng.hpp"

namespace tea::net {

// Dense MLP: ReLU hidden layers, linear output. layer_sizes lists every layer
// width including input and output.
struct NetSpec {
  std::vector<std::size_t> layer_sizes;

  void validate() const;  // throws std::invalid_argument
  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t n_layers() const { return layer_sizes.size() - 1; }
  bool operator==(const NetSpec&) const = default;
};

struct Layer {
  std::size_t rows = 0, cols = 0;  // rows = fan-out, cols = fan-in
  std::vector<double> w;           // row-major rows x cols
  std::vector<double> b;           // rows
  std::vector<double> m_w, v_w, m_b, v_b;  // Adam moments
};

struct NetParams {
  NetSpec spec;
  std::vector<Layer> layers;
  std::uint64_t adam_step = 0;

  std::size_t input_dim() const { return spec.input_dim(); }
  std::size_t output_dim() const { return spec.output_dim(); }
  std::size_t param_count() const;
};

// He-style uniform init, range +-sqrt(6/fan_in), biases zero. Weights are
// drawn layer by layer in row-major order, so a seed fixes every value.
NetParams init_net(const NetSpec& spec, SeededRng& rng);

struct Gradients {
  std::vector<std::vector<double>> w, b;
  void zero();
  void scale(double a);
};
Gradients make_gradients(const NetParams& params);

// Single-sample forward. The cache keeps post-activation values of every
// layer (acts[0] is the input), which is exactly what backward needs.
struct ForwardCache {
  std::vector<std::vector<double>> acts;
};

std::vector<double> forward(const NetParams& params, std::span<const double> input);
const std::vector<double>& forward(const NetParams& params, std::span<const double> input,
                                   ForwardCache& cache);

// Accumulates parameter gradients for one sample into `acc` given dL/d(output).
void backward(const NetParams& params, const ForwardCache& cache,
              std::span<const double> output_grad, Gradients& acc);

// Batched variants over row-major (batch x dim) buffers. Per-sample results
// and gradient accumulation order are bit-identical to looping the
// single-sample path over the batch; the loops are merely arranged so weight
// rows stream once per batch instead of once per sample.
struct BatchCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> acts;  // acts[l]: batch x layer_size_l
};

void forward_batch(const NetParams& params, const double* x, std::size_t batch,
                   BatchCache& cache);
void backward_batch(const NetParams& params, const BatchCache& cache, const double* dy,
                    Gradients& acc);

void adam_step(NetParams& params, const Gradients& grads, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

LossGrad mse_loss(std::span<const double> pred, std::span<const double> target);
LossGrad huber_loss(std::span<const double> pred, std::span<const double> target,
                    double delta = 1.0);
LossGrad softmax_nll_loss(std::span<const double> logits, std::size_t label);
std::vector<double> softmax(std::span<const double> logits);

// TEANET01 checkpoint (see docs/FORMATS.md).
void save_net(const NetParams& params, const std::filesystem::path& path);
NetParams load_net(const std::filesystem::path& path);

}  // namespace tea::net

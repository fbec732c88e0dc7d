#pragma once

#include <cstdint>
#include <vector>

#include "cft/numkernel.hpp"

namespace cft {

// One affine layer y = x W^T + b, with matching gradient accumulator and
// momentum buffer per tensor. W is (out x in).
struct Affine {
  Matrix W;
  std::vector<double> b;
  Matrix gW;
  std::vector<double> gb;
  Matrix mW;
  std::vector<double> mb;

  Affine() = default;
  Affine(std::size_t out, std::size_t in)
      : W(out, in), b(out, 0.0), gW(out, in), gb(out, 0.0), mW(out, in),
        mb(out, 0.0) {}
};

// Encoder G_e (tanh hidden layers, linear output to d_z), linear classifier
// G_y, and 2-layer projection head G_c whose output is row-l2-normalized.
struct MlpParams {
  std::vector<Affine> encoder;  // hidden affines + final linear affine
  Affine classifier;            // K x d_z
  Affine proj1;                 // proj_hidden x d_z, tanh
  Affine proj2;                 // proj_dim x proj_hidden

  std::size_t d_in = 0;
  std::size_t d_z = 0;
  std::size_t num_classes = 0;
};

// Cached activations of the classifier/projection heads, sufficient for an
// exact backward pass.
struct HeadTrace {
  Matrix z;          // head input (encoder features)
  Matrix logits;     // n x K
  Matrix proj_pre1;  // pre-activation of the first projection layer
  Matrix proj_act1;  // tanh output
  Matrix u;          // pre-normalization projection output
  Matrix v;          // l2-normalized rows
  std::vector<double> u_norm;
};

struct ForwardTrace {
  Matrix x;
  std::vector<Matrix> enc_pre;  // per hidden layer
  std::vector<Matrix> enc_act;
  HeadTrace head;
};

// Xavier-uniform weights, zero biases, deterministic per seed.
MlpParams init_params(std::size_t d_in, const std::vector<int>& encoder_widths,
                      std::size_t d_z, std::size_t num_classes,
                      std::size_t proj_hidden, std::size_t proj_dim,
                      std::uint64_t seed);

ForwardTrace forward(const MlpParams& params, const Matrix& x);

// Heads only: generated samples live in encoder-feature space and do not
// pass through the encoder.
HeadTrace forward_generated(const MlpParams& params, const Matrix& z_gen);

void zero_grads(MlpParams& params);

// Accumulates head parameter gradients and returns dL/dz for the head
// inputs. dv is differentiated through the row-normalization Jacobian
// (I - v v^T)/||u||.
Matrix backward_heads(MlpParams& params, const HeadTrace& trace,
                      const Matrix& dlogits, const Matrix& dv);

// Accumulates encoder parameter gradients given dL/dz for a trace produced
// by forward().
void backward_encoder(MlpParams& params, const ForwardTrace& trace,
                      const Matrix& dz);

// buf <- momentum*buf + grad + weight_decay*param; param <- param - lr*buf.
void sgd_momentum_step(MlpParams& params, double lr, double momentum,
                       double weight_decay);

struct Schedule {
  enum class Kind { Cosine, Linear, Constant };
  Kind kind = Kind::Cosine;
  double base_lr = 0.01;
  std::size_t total_steps = 1;
};

// Steps past total clamp to the final value.
double lr_at(const Schedule& schedule, std::size_t step);

// Flat parameter vector in a fixed order; used by the finite-difference
// oracle.
std::vector<double> flatten_params(const MlpParams& params);
void set_params(MlpParams& params, std::span<const double> flat);
std::vector<double> flatten_grads(const MlpParams& params);

}  // namespace cft

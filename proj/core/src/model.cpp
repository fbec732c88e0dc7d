#include "cft/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cft/rng.hpp"

namespace cft {
namespace {

constexpr double kNormEps = 1e-12;

void xavier_init(Affine& layer, RngStream& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(layer.W.rows + layer.W.cols));
  for (double& w : layer.W.data) {
    w = bound * (2.0 * rng.next_double() - 1.0);
  }
}

// y = x W^T + b
Matrix affine_forward(const Affine& layer, const Matrix& x) {
  if (x.cols != layer.W.cols) {
    throw std::invalid_argument("affine_forward: shape mismatch");
  }
  Matrix y(x.rows, layer.W.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t o = 0; o < layer.W.rows; ++o) {
      y.at(i, o) = dot(x.row(i), layer.W.row(o)) + layer.b[o];
    }
  }
  return y;
}

// Accumulates dW, db; returns dx.
Matrix affine_backward(Affine& layer, const Matrix& x, const Matrix& dy) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t o = 0; o < layer.W.rows; ++o) {
      const double g = dy.at(i, o);
      if (g == 0.0) continue;
      layer.gb[o] += g;
      auto gw = layer.gW.row(o);
      auto xr = x.row(i);
      for (std::size_t j = 0; j < x.cols; ++j) gw[j] += g * xr[j];
    }
  }
  Matrix dx(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t o = 0; o < layer.W.rows; ++o) {
      const double g = dy.at(i, o);
      if (g == 0.0) continue;
      auto wr = layer.W.row(o);
      auto dxr = dx.row(i);
      for (std::size_t j = 0; j < x.cols; ++j) dxr[j] += g * wr[j];
    }
  }
  return dx;
}

Matrix tanh_forward(const Matrix& x) {
  Matrix y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::tanh(x.data[i]);
  return y;
}

Matrix tanh_backward(const Matrix& act, const Matrix& dact) {
  Matrix dx(act.rows, act.cols);
  for (std::size_t i = 0; i < act.data.size(); ++i) {
    dx.data[i] = dact.data[i] * (1.0 - act.data[i] * act.data[i]);
  }
  return dx;
}

void momentum_update(Affine& layer, double lr, double momentum, double wd) {
  for (std::size_t i = 0; i < layer.W.data.size(); ++i) {
    layer.mW.data[i] =
        momentum * layer.mW.data[i] + layer.gW.data[i] + wd * layer.W.data[i];
    layer.W.data[i] -= lr * layer.mW.data[i];
  }
  for (std::size_t i = 0; i < layer.b.size(); ++i) {
    layer.mb[i] = momentum * layer.mb[i] + layer.gb[i] + wd * layer.b[i];
    layer.b[i] -= lr * layer.mb[i];
  }
}

template <typename Fn>
void for_each_layer(MlpParams& p, Fn fn) {
  for (auto& l : p.encoder) fn(l);
  fn(p.classifier);
  fn(p.proj1);
  fn(p.proj2);
}

template <typename Fn>
void for_each_layer(const MlpParams& p, Fn fn) {
  for (const auto& l : p.encoder) fn(l);
  fn(p.classifier);
  fn(p.proj1);
  fn(p.proj2);
}

}  // namespace

MlpParams init_params(std::size_t d_in, const std::vector<int>& encoder_widths,
                      std::size_t d_z, std::size_t num_classes,
                      std::size_t proj_hidden, std::size_t proj_dim,
                      std::uint64_t seed) {
  if (d_in < 1 || d_z < 1 || num_classes < 1 || proj_hidden < 1 ||
      proj_dim < 1) {
    throw std::invalid_argument("init_params: all dims must be >= 1");
  }
  MlpParams p;
  p.d_in = d_in;
  p.d_z = d_z;
  p.num_classes = num_classes;

  std::size_t in = d_in;
  std::uint64_t substream = 0;
  for (int w : encoder_widths) {
    auto rng = RngStream::make(seed, RngStream::kInit, substream++);
    p.encoder.emplace_back(static_cast<std::size_t>(w), in);
    xavier_init(p.encoder.back(), rng);
    in = static_cast<std::size_t>(w);
  }
  {
    auto rng = RngStream::make(seed, RngStream::kInit, substream++);
    p.encoder.emplace_back(d_z, in);
    xavier_init(p.encoder.back(), rng);
  }
  {
    auto rng = RngStream::make(seed, RngStream::kInit, substream++);
    p.classifier = Affine(num_classes, d_z);
    xavier_init(p.classifier, rng);
  }
  {
    auto rng = RngStream::make(seed, RngStream::kInit, substream++);
    p.proj1 = Affine(proj_hidden, d_z);
    xavier_init(p.proj1, rng);
  }
  {
    auto rng = RngStream::make(seed, RngStream::kInit, substream++);
    p.proj2 = Affine(proj_dim, proj_hidden);
    xavier_init(p.proj2, rng);
  }
  return p;
}

namespace {

HeadTrace heads_forward(const MlpParams& params, Matrix z) {
  HeadTrace t;
  t.logits = affine_forward(params.classifier, z);
  t.proj_pre1 = affine_forward(params.proj1, z);
  t.proj_act1 = tanh_forward(t.proj_pre1);
  t.u = affine_forward(params.proj2, t.proj_act1);
  t.v = Matrix(t.u.rows, t.u.cols);
  t.u_norm.resize(t.u.rows);
  for (std::size_t i = 0; i < t.u.rows; ++i) {
    const double nrm = std::max(norm2(t.u.row(i)), kNormEps);
    t.u_norm[i] = nrm;
    auto ur = t.u.row(i);
    auto vr = t.v.row(i);
    for (std::size_t j = 0; j < t.u.cols; ++j) vr[j] = ur[j] / nrm;
  }
  t.z = std::move(z);
  return t;
}

}  // namespace

ForwardTrace forward(const MlpParams& params, const Matrix& x) {
  if (x.cols != params.d_in) {
    throw std::invalid_argument("forward: input width mismatch");
  }
  ForwardTrace t;
  t.x = x;
  const Matrix* cur = &t.x;
  const std::size_t hidden = params.encoder.size() - 1;
  for (std::size_t l = 0; l < hidden; ++l) {
    t.enc_pre.push_back(affine_forward(params.encoder[l], *cur));
    t.enc_act.push_back(tanh_forward(t.enc_pre.back()));
    cur = &t.enc_act.back();
  }
  Matrix z = affine_forward(params.encoder.back(), *cur);
  t.head = heads_forward(params, std::move(z));
  return t;
}

HeadTrace forward_generated(const MlpParams& params, const Matrix& z_gen) {
  if (z_gen.rows > 0 && z_gen.cols != params.d_z) {
    throw std::invalid_argument("forward_generated: feature width mismatch");
  }
  Matrix z = z_gen;
  if (z.rows == 0) z = Matrix(0, params.d_z);
  return heads_forward(params, std::move(z));
}

void zero_grads(MlpParams& params) {
  for_each_layer(params, [](Affine& l) {
    std::fill(l.gW.data.begin(), l.gW.data.end(), 0.0);
    std::fill(l.gb.begin(), l.gb.end(), 0.0);
  });
}

Matrix backward_heads(MlpParams& params, const HeadTrace& trace,
                      const Matrix& dlogits, const Matrix& dv) {
  const std::size_t n = trace.z.rows;
  // normalization Jacobian: du = (dv - v (v.dv)) / ||u||, or dv/eps in the
  // clamped (zero-row) regime
  Matrix du(trace.u.rows, trace.u.cols);
  for (std::size_t i = 0; i < n; ++i) {
    auto vr = trace.v.row(i);
    auto dvr = dv.row(i);
    auto dur = du.row(i);
    const double nrm = trace.u_norm[i];
    if (norm2(trace.u.row(i)) > kNormEps) {
      const double proj = dot(vr, dvr);
      for (std::size_t j = 0; j < du.cols; ++j) {
        dur[j] = (dvr[j] - vr[j] * proj) / nrm;
      }
    } else {
      for (std::size_t j = 0; j < du.cols; ++j) dur[j] = dvr[j] / nrm;
    }
  }

  Matrix dact1 = affine_backward(params.proj2, trace.proj_act1, du);
  Matrix dpre1 = tanh_backward(trace.proj_act1, dact1);
  Matrix dz = affine_backward(params.proj1, trace.z, dpre1);
  Matrix dz_cls = affine_backward(params.classifier, trace.z, dlogits);
  for (std::size_t i = 0; i < dz.data.size(); ++i) dz.data[i] += dz_cls.data[i];
  return dz;
}

void backward_encoder(MlpParams& params, const ForwardTrace& trace,
                      const Matrix& dz) {
  const std::size_t hidden = params.encoder.size() - 1;
  const Matrix& last_in = hidden == 0 ? trace.x : trace.enc_act.back();
  Matrix d = affine_backward(params.encoder.back(), last_in, dz);
  for (std::size_t l = hidden; l-- > 0;) {
    Matrix dpre = tanh_backward(trace.enc_act[l], d);
    const Matrix& in = l == 0 ? trace.x : trace.enc_act[l - 1];
    d = affine_backward(params.encoder[l], in, dpre);
  }
}

void sgd_momentum_step(MlpParams& params, double lr, double momentum,
                       double weight_decay) {
  for_each_layer(params, [&](Affine& l) {
    momentum_update(l, lr, momentum, weight_decay);
  });
}

double lr_at(const Schedule& schedule, std::size_t step) {
  const std::size_t t = std::min(step, schedule.total_steps);
  const double frac = schedule.total_steps == 0
                          ? 1.0
                          : static_cast<double>(t) /
                                static_cast<double>(schedule.total_steps);
  switch (schedule.kind) {
    case Schedule::Kind::Cosine:
      return schedule.base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
    case Schedule::Kind::Linear:
      return schedule.base_lr * (1.0 - frac);
    case Schedule::Kind::Constant:
      return schedule.base_lr;
  }
  return schedule.base_lr;
}

std::vector<double> flatten_params(const MlpParams& params) {
  std::vector<double> flat;
  for_each_layer(params, [&](const Affine& l) {
    flat.insert(flat.end(), l.W.data.begin(), l.W.data.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  });
  return flat;
}

void set_params(MlpParams& params, std::span<const double> flat) {
  std::size_t pos = 0;
  for_each_layer(params, [&](Affine& l) {
    std::copy(flat.begin() + pos, flat.begin() + pos + l.W.data.size(),
              l.W.data.begin());
    pos += l.W.data.size();
    std::copy(flat.begin() + pos, flat.begin() + pos + l.b.size(),
              l.b.begin());
    pos += l.b.size();
  });
  if (pos != flat.size()) {
    throw std::invalid_argument("set_params: flat vector size mismatch");
  }
}

std::vector<double> flatten_grads(const MlpParams& params) {
  std::vector<double> flat;
  for_each_layer(params, [&](const Affine& l) {
    flat.insert(flat.end(), l.gW.data.begin(), l.gW.data.end());
    flat.insert(flat.end(), l.gb.begin(), l.gb.end());
  });
  return flat;
}

}  // namespace cft

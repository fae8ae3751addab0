#pragma once

#include "aniso/artifact_io.hpp"
#include "aniso/core.hpp"
#include "aniso/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace aniso {

/// Fully connected network with SiLU hidden activations and a linear output.
/// Batches are column-major: one sample per column.
template <typename Scalar>
class Mlp {
 public:
  using M = MatrixX<Scalar>;
  using V = VectorX<Scalar>;

  struct Layer {
    M w;
    V b;
  };

  struct Cache {
    std::vector<M> inputs;  // input to each layer
    std::vector<M> pre;     // pre-activation of each layer
  };

  struct Grads {
    std::vector<M> dw;
    std::vector<V> db;

    void zero_like(const Mlp& net) {
      dw.resize(net.layers_.size());
      db.resize(net.layers_.size());
      for (std::size_t l = 0; l < net.layers_.size(); ++l) {
        dw[l] = M::Zero(net.layers_[l].w.rows(), net.layers_[l].w.cols());
        db[l] = V::Zero(net.layers_[l].b.size());
      }
    }
  };

  Mlp() = default;

  /// widths = {in, hidden..., out}. Weights ~ N(0, 1/fan_in), biases zero.
  Mlp(const std::vector<Index>& widths, Rng& rng) {
    require(widths.size() >= 2, Errc::InvalidInput, "Mlp needs at least input and output widths");
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      Layer layer{M(widths[l + 1], widths[l]), V::Zero(widths[l + 1])};
      const double scale = 1.0 / std::sqrt(static_cast<double>(widths[l]));
      for (Index j = 0; j < layer.w.cols(); ++j)
        for (Index i = 0; i < layer.w.rows(); ++i) layer.w(i, j) = static_cast<Scalar>(scale * normal(rng));
      layers_.push_back(std::move(layer));
    }
  }

  Index input_width() const { return layers_.front().w.cols(); }
  Index output_width() const { return layers_.back().w.rows(); }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  void zero_output_layer() {
    layers_.back().w.setZero();
    layers_.back().b.setZero();
  }

  bool all_finite() const {
    for (const auto& l : layers_)
      if (!l.w.allFinite() || !l.b.allFinite()) return false;
    return true;
  }

  M forward(const M& x, Cache* cache = nullptr) const {
    require(x.rows() == input_width(), Errc::InvalidInput, "Mlp input width mismatch");
    if (cache) {
      cache->inputs.clear();
      cache->pre.clear();
    }
    M h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      M z = (layers_[l].w * h).colwise() + layers_[l].b;
      if (cache) {
        cache->inputs.push_back(h);
        cache->pre.push_back(z);
      }
      h = l + 1 < layers_.size() ? silu(z) : std::move(z);
    }
    return h;
  }

  /// Back-propagates grad_out (d loss / d output). Parameter gradients are
  /// accumulated into `grads` when given; the input gradient is returned.
  M backward(const Cache& cache, const M& grad_out, Grads* grads) const {
    M g = grad_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l + 1 < layers_.size()) g = g.cwiseProduct(silu_prime(cache.pre[l]));
      if (grads) {
        grads->dw[l].noalias() += g * cache.inputs[l].transpose();
        grads->db[l] += g.rowwise().sum();
      }
      g = layers_[l].w.transpose() * g;
    }
    return g;
  }

  /// Rounds every weight to float32 so the network equals its serialized form.
  void freeze_to_f32() {
    for (auto& l : layers_) {
      l.w = l.w.unaryExpr([](Scalar v) { return static_cast<Scalar>(static_cast<float>(v)); });
      l.b = l.b.unaryExpr([](Scalar v) { return static_cast<Scalar>(static_cast<float>(v)); });
    }
  }

  void write_sections(SectionFile& file, const std::string& prefix) const {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      file.add(prefix + std::to_string(l) + ".w", layers_[l].w.template cast<double>(), SectionDtype::F32);
      file.add(prefix + std::to_string(l) + ".b", Mat(layers_[l].b.template cast<double>()), SectionDtype::F32);
    }
  }

  static Mlp read_sections(const SectionFile& file, const std::string& prefix) {
    Mlp net;
    for (std::size_t l = 0; file.has(prefix + std::to_string(l) + ".w"); ++l) {
      Layer layer{file.get(prefix + std::to_string(l) + ".w").template cast<Scalar>(),
                  file.get_vector(prefix + std::to_string(l) + ".b").template cast<Scalar>()};
      require(layer.b.size() == layer.w.rows(), Errc::FormatError, "layer bias size mismatch");
      if (!net.layers_.empty())
        require(layer.w.cols() == net.layers_.back().w.rows(), Errc::FormatError, "layer width mismatch");
      net.layers_.push_back(std::move(layer));
    }
    require(!net.layers_.empty(), Errc::FormatError, "no layers under prefix " + prefix);
    return net;
  }

 private:
  static Scalar sigmoid(Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); }
  static M silu(const M& z) {
    return z.unaryExpr([](Scalar v) { return v * sigmoid(v); });
  }
  static M silu_prime(const M& z) {
    return z.unaryExpr([](Scalar v) {
      const Scalar s = sigmoid(v);
      return s * (Scalar(1) + v * (Scalar(1) - s));
    });
  }

  std::vector<Layer> layers_;
};

/// Adam with bias correction over every layer of an Mlp.
template <typename Scalar>
class Adam {
 public:
  using Net = Mlp<Scalar>;

  explicit Adam(const Net& net, double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.zero_like(net);
    v_.zero_like(net);
  }

  void step(Net& net, const typename Net::Grads& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = beta1_ * m + (1.0 - beta1_) * grad;
      v = beta2_ * v + (1.0 - beta2_) * grad.cwiseAbs2();
      param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    for (std::size_t l = 0; l < net.depth(); ++l) {
      update(net.layers()[l].w, m_.dw[l], v_.dw[l], g.dw[l]);
      update(net.layers()[l].b, m_.db[l], v_.db[l], g.db[l]);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  typename Net::Grads m_;
  typename Net::Grads v_;
};

/// Adam state for a plain parameter vector (mixing skew parameters).
class VectorAdam {
 public:
  VectorAdam(Index size, double lr) : lr_(lr), m_(Vec::Zero(size)), v_(Vec::Zero(size)) {}

  void step(Vec& param, const Vec& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
    m_ = 0.9 * m_ + 0.1 * grad;
    v_ = 0.999 * v_ + 0.001 * grad.cwiseAbs2();
    param.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + 1e-8);
  }

 private:
  double lr_;
  long t_ = 0;
  Vec m_, v_;
};

}  // namespace aniso

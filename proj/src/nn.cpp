#include "tann/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tann/errors.hpp"

namespace tann::nn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kSigmoidFloor = 0x1.0p-53;
constexpr double kBceClamp = 1e-7;

std::string at_layer(std::size_t index, const Layer& layer) {
  return "layer " + std::to_string(index) + " (" + layer_name(layer) + ")";
}

double sigmoid(double x) {
  double y;
  if (x >= 0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, kSigmoidFloor, 1.0 - kSigmoidFloor);
}

double activate(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::ReLU:
      return x > 0 ? x : 0.0;
    case ActivationKind::Sigmoid:
      return sigmoid(x);
    case ActivationKind::Identity:
      return x;
  }
  return x;
}

// Derivative expressed through input x and output y.
double activate_grad(ActivationKind kind, double x, double y) {
  switch (kind) {
    case ActivationKind::ReLU:
      return x > 0 ? 1.0 : 0.0;
    case ActivationKind::Sigmoid:
      return y * (1.0 - y);
    case ActivationKind::Identity:
      return 1.0;
  }
  return 1.0;
}

std::size_t layer_out_width(const Layer& layer, std::size_t in, std::size_t index) {
  auto fail = [&](const std::string& why) -> std::size_t {
    throw DimensionError(at_layer(index, layer) + ": " + why + ", got input width " + std::to_string(in));
  };
  return std::visit(
      overloaded{
          [&](const Dense& d) {
            if (in != d.weight.cols) fail("expects input width " + std::to_string(d.weight.cols));
            return d.weight.rows;
          },
          [&](const Activation&) { return in; },
          [&](const Dropout&) { return in; },
          [&](const Recurrent& r) {
            if (in != r.input_width) fail("expects input width " + std::to_string(r.input_width));
            return r.hidden_size();
          },
          [&](const Conv1D& c) {
            if (in < c.kernel_width()) fail("input narrower than kernel width " + std::to_string(c.kernel_width()));
            return c.out_channels() * (in - c.kernel_width() + 1);
          },
          [&](const ComplexDense& c) {
            const std::size_t want = c.real_input ? c.weight.cols : 2 * c.weight.cols;
            if (in != want) fail("expects input width " + std::to_string(want));
            return 2 * c.weight.rows;
          },
          [&](const Magnitude&) {
            if (in % 2 != 0) fail("expects an interleaved complex (even-width) input");
            return in / 2;
          },
      },
      layer);
}

std::size_t block_count(const Layer& layer) {
  return std::visit(overloaded{
                        [](const Dense&) -> std::size_t { return 2; },
                        [](const Recurrent&) -> std::size_t { return 3; },
                        [](const Conv1D&) -> std::size_t { return 2; },
                        [](const ComplexDense&) -> std::size_t { return 2; },
                        [](const auto&) -> std::size_t { return 0; },
                    },
                    layer);
}

enum class MaskSource { Draw, Reuse };

Vector layer_forward(const Layer& layer, const Vector& x, Mode mode, MaskSource masks, const LayerCache* reuse,
                     Rng* rng, LayerCache& cache, std::size_t index) {
  return std::visit(
      overloaded{
          [&](const Dense& d) {
            Vector y(d.bias);
            const std::size_t in = d.weight.cols;
            std::size_t nnz = 0;
            for (double v : x) nnz += (v != 0.0);
            if (nnz * 4 < in) {
              std::vector<std::size_t> idx;
              idx.reserve(nnz);
              for (std::size_t j = 0; j < in; ++j)
                if (x[j] != 0.0) idx.push_back(j);
              for (std::size_t k = 0; k < d.weight.rows; ++k) {
                const double* w = d.weight.data.data() + k * in;
                double acc = 0.0;
                for (std::size_t j : idx) acc += w[j] * x[j];
                y[k] += acc;
              }
            } else {
              for (std::size_t k = 0; k < d.weight.rows; ++k) {
                const double* w = d.weight.data.data() + k * in;
                double acc = 0.0;
                for (std::size_t j = 0; j < in; ++j) acc += w[j] * x[j];
                y[k] += acc;
              }
            }
            return y;
          },
          [&](const Activation& a) {
            Vector y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = activate(a.kind, x[i]);
            return y;
          },
          [&](const Dropout& d) {
            if (mode == Mode::Infer) return x;
            if (masks == MaskSource::Reuse) {
              if (reuse == nullptr || reuse->mask.size() != x.size()) {
                throw ContractError(at_layer(index, layer) + ": no frozen dropout mask of matching width");
              }
              cache.mask = reuse->mask;
            } else {
              cache.mask.assign(x.size(), 1.0);
              if (d.p > 0.0) {
                if (rng == nullptr) throw ContractError(at_layer(index, layer) + ": train-mode dropout needs an rng");
                const double keep_scale = 1.0 / (1.0 - d.p);
                for (double& m : cache.mask) m = rng->uniform() < d.p ? 0.0 : keep_scale;
              }
            }
            Vector y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * cache.mask[i];
            return y;
          },
          [&](const Recurrent& r) {
            const std::size_t hidden = r.hidden_size();
            const std::size_t step = r.step_width();
            cache.hidden.assign(r.seq_len + 1, Vector(hidden, 0.0));
            for (std::size_t t = 0; t < r.seq_len; ++t) {
              const Vector& prev = cache.hidden[t];
              Vector& h = cache.hidden[t + 1];
              for (std::size_t k = 0; k < hidden; ++k) {
                double a = r.bias[k];
                for (std::size_t j = 0; j < step; ++j) {
                  const std::size_t pos = t * step + j;
                  if (pos < x.size()) a += r.w_ih(k, j) * x[pos];
                }
                for (std::size_t j = 0; j < hidden; ++j) a += r.w_hh(k, j) * prev[j];
                h[k] = std::tanh(a);
              }
            }
            return cache.hidden.back();
          },
          [&](const Conv1D& c) {
            const std::size_t width = x.size() - c.kernel_width() + 1;
            Vector y(c.out_channels() * width);
            for (std::size_t ch = 0; ch < c.out_channels(); ++ch) {
              for (std::size_t i = 0; i < width; ++i) {
                double acc = c.bias[ch];
                for (std::size_t j = 0; j < c.kernel_width(); ++j) acc += c.kernels(ch, j) * x[i + j];
                y[ch * width + i] = acc;
              }
            }
            return y;
          },
          [&](const ComplexDense& c) {
            const std::size_t in = c.weight.cols;
            Vector y(2 * c.weight.rows);
            for (std::size_t k = 0; k < c.weight.rows; ++k) {
              double re = c.bias[k].real();
              double im = c.bias[k].imag();
              for (std::size_t j = 0; j < in; ++j) {
                const double p = c.weight(k, j).real();
                const double q = c.weight(k, j).imag();
                const double a = c.real_input ? x[j] : x[2 * j];
                const double b = c.real_input ? 0.0 : x[2 * j + 1];
                re += p * a - q * b;
                im += p * b + q * a;
              }
              y[2 * k] = re;
              y[2 * k + 1] = im;
            }
            return y;
          },
          [&](const Magnitude&) {
            Vector y(x.size() / 2);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::hypot(x[2 * k], x[2 * k + 1]);
            return y;
          },
      },
      layer);
}

ForwardResult forward_impl(const Network& net, std::span<const double> x, Mode mode, MaskSource masks,
                           const ForwardCache* reuse, Rng* rng) {
  if (reuse != nullptr && reuse->layers.size() != net.layers.size()) {
    throw ContractError("frozen-mask cache was produced by a different network");
  }
  ForwardResult result;
  result.cache.mode = mode;
  result.cache.layers.resize(net.layers.size());
  Vector signal(x.begin(), x.end());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    layer_out_width(net.layers[i], signal.size(), i);
    LayerCache& lc = result.cache.layers[i];
    lc.input = signal;
    signal = layer_forward(net.layers[i], lc.input, mode, masks, reuse ? &reuse->layers[i] : nullptr, rng, lc, i);
    lc.output = signal;
  }
  result.output = std::move(signal);
  return result;
}

// Gradient with respect to the layer input; parameter gradients are
// accumulated into `grads[first_block..]`.
Vector layer_backward(const Layer& layer, const LayerCache& lc, const Vector& g, Gradients& grads,
                      std::size_t first_block, bool need_input_grad) {
  const Vector& x = lc.input;
  return std::visit(
      overloaded{
          [&](const Dense& d) {
            const std::size_t in = d.weight.cols;
            Vector& gw = grads.blocks[first_block];
            Vector& gb = grads.blocks[first_block + 1];
            std::vector<std::size_t> idx;
            for (std::size_t j = 0; j < in; ++j)
              if (x[j] != 0.0) idx.push_back(j);
            for (std::size_t k = 0; k < d.weight.rows; ++k) {
              gb[k] += g[k];
              if (g[k] == 0.0) continue;
              double* row = gw.data() + k * in;
              for (std::size_t j : idx) row[j] += g[k] * x[j];
            }
            Vector dx;
            if (need_input_grad) {
              dx.assign(in, 0.0);
              for (std::size_t k = 0; k < d.weight.rows; ++k) {
                if (g[k] == 0.0) continue;
                const double* w = d.weight.data.data() + k * in;
                for (std::size_t j = 0; j < in; ++j) dx[j] += w[j] * g[k];
              }
            }
            return dx;
          },
          [&](const Activation& a) {
            Vector dx(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) dx[i] = g[i] * activate_grad(a.kind, x[i], lc.output[i]);
            return dx;
          },
          [&](const Dropout&) {
            Vector dx(g);
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= lc.mask[i];
            return dx;
          },
          [&](const Recurrent& r) {
            const std::size_t hidden = r.hidden_size();
            const std::size_t step = r.step_width();
            Vector& gih = grads.blocks[first_block];
            Vector& ghh = grads.blocks[first_block + 1];
            Vector& gb = grads.blocks[first_block + 2];
            Vector dx(need_input_grad ? x.size() : 0, 0.0);
            Vector dh(g);
            Vector da(hidden);
            for (std::size_t t = r.seq_len; t-- > 0;) {
              const Vector& h = lc.hidden[t + 1];
              const Vector& prev = lc.hidden[t];
              for (std::size_t k = 0; k < hidden; ++k) da[k] = dh[k] * (1.0 - h[k] * h[k]);
              for (std::size_t k = 0; k < hidden; ++k) {
                gb[k] += da[k];
                for (std::size_t j = 0; j < step; ++j) {
                  const std::size_t pos = t * step + j;
                  if (pos < x.size()) gih[k * step + j] += da[k] * x[pos];
                }
                for (std::size_t j = 0; j < hidden; ++j) ghh[k * hidden + j] += da[k] * prev[j];
              }
              if (need_input_grad) {
                for (std::size_t j = 0; j < step; ++j) {
                  const std::size_t pos = t * step + j;
                  if (pos >= x.size()) break;
                  double acc = 0.0;
                  for (std::size_t k = 0; k < hidden; ++k) acc += r.w_ih(k, j) * da[k];
                  dx[pos] = acc;
                }
              }
              Vector next(hidden, 0.0);
              for (std::size_t k = 0; k < hidden; ++k)
                for (std::size_t j = 0; j < hidden; ++j) next[j] += r.w_hh(k, j) * da[k];
              dh = std::move(next);
            }
            return dx;
          },
          [&](const Conv1D& c) {
            const std::size_t width = x.size() - c.kernel_width() + 1;
            Vector& gk = grads.blocks[first_block];
            Vector& gb = grads.blocks[first_block + 1];
            Vector dx(x.size(), 0.0);
            for (std::size_t ch = 0; ch < c.out_channels(); ++ch) {
              for (std::size_t i = 0; i < width; ++i) {
                const double go = g[ch * width + i];
                gb[ch] += go;
                for (std::size_t j = 0; j < c.kernel_width(); ++j) {
                  gk[ch * c.kernel_width() + j] += go * x[i + j];
                  dx[i + j] += go * c.kernels(ch, j);
                }
              }
            }
            return dx;
          },
          [&](const ComplexDense& c) {
            const std::size_t in = c.weight.cols;
            Vector& gw = grads.blocks[first_block];  // interleaved (d/dRe, d/dIm)
            Vector& gb = grads.blocks[first_block + 1];
            Vector dx(x.size(), 0.0);
            for (std::size_t k = 0; k < c.weight.rows; ++k) {
              const double gre = g[2 * k];
              const double gim = g[2 * k + 1];
              gb[2 * k] += gre;
              gb[2 * k + 1] += gim;
              for (std::size_t j = 0; j < in; ++j) {
                const double p = c.weight(k, j).real();
                const double q = c.weight(k, j).imag();
                const double a = c.real_input ? x[j] : x[2 * j];
                const double b = c.real_input ? 0.0 : x[2 * j + 1];
                gw[2 * (k * in + j)] += gre * a + gim * b;
                gw[2 * (k * in + j) + 1] += -gre * b + gim * a;
                if (c.real_input) {
                  dx[j] += gre * p + gim * q;
                } else {
                  dx[2 * j] += gre * p + gim * q;
                  dx[2 * j + 1] += -gre * q + gim * p;
                }
              }
            }
            return dx;
          },
          [&](const Magnitude&) {
            Vector dx(x.size(), 0.0);
            for (std::size_t k = 0; k < g.size(); ++k) {
              const double r = lc.output[k];
              if (r > 0.0) {
                dx[2 * k] = g[k] * x[2 * k] / r;
                dx[2 * k + 1] = g[k] * x[2 * k + 1] / r;
              }
            }
            return dx;
          },
      },
      layer);
}

void check_same_width(std::span<const double> pred, std::span<const double> target, const char* loss) {
  if (pred.size() != target.size()) {
    throw DimensionError(std::string(loss) + ": prediction width " + std::to_string(pred.size()) +
                         " != target width " + std::to_string(target.size()));
  }
}

// Cross-entropy target as a distribution over the score classes.
Vector ce_distribution(std::span<const double> scores, std::span<const double> target) {
  Vector dist(scores.size(), 0.0);
  if (target.size() == 1 && scores.size() != 1) {
    const double label = target[0];
    if (!(label >= 0) || label != std::floor(label) || label >= static_cast<double>(scores.size())) {
      throw ContractError("CrossEntropy: class index out of range");
    }
    dist[static_cast<std::size_t>(label)] = 1.0;
    return dist;
  }
  check_same_width(scores, target, "CrossEntropy");
  std::copy(target.begin(), target.end(), dist.begin());
  return dist;
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::BCE:
      return "bce";
    case LossKind::MSE:
      return "mse";
    case LossKind::CrossEntropy:
      return "cross_entropy";
  }
  return "unknown";
}

LossKind loss_from_string(const std::string& name) {
  if (name == "bce") return LossKind::BCE;
  if (name == "mse") return LossKind::MSE;
  if (name == "cross_entropy" || name == "ce") return LossKind::CrossEntropy;
  throw ContractError("unknown loss '" + name + "'");
}

std::string layer_name(const Layer& layer) {
  return std::visit(overloaded{
                        [](const Dense&) { return std::string("Dense"); },
                        [](const Activation& a) {
                          switch (a.kind) {
                            case ActivationKind::ReLU:
                              return std::string("ReLU");
                            case ActivationKind::Sigmoid:
                              return std::string("Sigmoid");
                            case ActivationKind::Identity:
                              break;
                          }
                          return std::string("Identity");
                        },
                        [](const Dropout&) { return std::string("Dropout"); },
                        [](const Recurrent&) { return std::string("Recurrent"); },
                        [](const Conv1D&) { return std::string("Conv1D"); },
                        [](const ComplexDense&) { return std::string("ComplexDense"); },
                        [](const Magnitude&) { return std::string("Magnitude"); },
                    },
                    layer);
}

std::optional<std::size_t> Network::input_width() const {
  for (const Layer& layer : layers) {
    if (const auto* d = std::get_if<Dense>(&layer)) return d->weight.cols;
    if (const auto* r = std::get_if<Recurrent>(&layer)) return r->input_width;
    if (const auto* c = std::get_if<ComplexDense>(&layer)) return c->real_input ? c->weight.cols : 2 * c->weight.cols;
    if (std::holds_alternative<Conv1D>(layer)) return std::nullopt;
  }
  return std::nullopt;
}

std::size_t Network::output_width(std::size_t in_width) const {
  std::size_t w = in_width;
  for (std::size_t i = 0; i < layers.size(); ++i) w = layer_out_width(layers[i], w, i);
  return w;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (auto block : parameter_blocks(*this)) n += block.size();
  return n;
}

std::vector<std::span<double>> parameter_blocks(Network& net) {
  std::vector<std::span<double>> out;
  for (Layer& layer : net.layers) {
    std::visit(overloaded{
                   [&](Dense& d) {
                     out.emplace_back(d.weight.data);
                     out.emplace_back(d.bias);
                   },
                   [&](Recurrent& r) {
                     out.emplace_back(r.w_ih.data);
                     out.emplace_back(r.w_hh.data);
                     out.emplace_back(r.bias);
                   },
                   [&](Conv1D& c) {
                     out.emplace_back(c.kernels.data);
                     out.emplace_back(c.bias);
                   },
                   [&](ComplexDense& c) {
                     out.push_back(as_reals(std::span<Complex>(c.weight.data)));
                     out.push_back(as_reals(std::span<Complex>(c.bias)));
                   },
                   [](auto&) {},
               },
               layer);
  }
  return out;
}

std::vector<std::span<const double>> parameter_blocks(const Network& net) {
  auto mutable_blocks = parameter_blocks(const_cast<Network&>(net));
  return {mutable_blocks.begin(), mutable_blocks.end()};
}

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  for (auto block : parameter_blocks(net)) g.blocks.emplace_back(block.size(), 0.0);
  return g;
}

void Gradients::add(const Gradients& other, double scale) {
  if (other.blocks.size() != blocks.size()) throw ContractError("gradient block count mismatch");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (other.blocks[b].size() != blocks[b].size()) throw ContractError("gradient block shape mismatch");
    for (std::size_t i = 0; i < blocks[b].size(); ++i) blocks[b][i] += scale * other.blocks[b][i];
  }
}

bool Gradients::all_zero() const {
  for (const Vector& b : blocks)
    for (double v : b)
      if (v != 0.0) return false;
  return true;
}

ForwardResult forward(const Network& net, std::span<const double> x, Mode mode, Rng* rng) {
  return forward_impl(net, x, mode, MaskSource::Draw, nullptr, rng);
}

ForwardResult forward_with_masks(const Network& net, std::span<const double> x, const ForwardCache& masks) {
  return forward_impl(net, x, Mode::Train, MaskSource::Reuse, &masks, nullptr);
}

Vector predict(const Network& net, std::span<const double> x) {
  Vector signal(x.begin(), x.end());
  LayerCache scratch;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    layer_out_width(net.layers[i], signal.size(), i);
    signal = layer_forward(net.layers[i], signal, Mode::Infer, MaskSource::Draw, nullptr, nullptr, scratch, i);
  }
  return signal;
}

double loss_value(LossKind kind, std::span<const double> pred, std::span<const double> target) {
  switch (kind) {
    case LossKind::BCE: {
      check_same_width(pred, target, "BCE");
      double sum = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(pred[i] >= 0.0 && pred[i] <= 1.0)) {
          throw DomainError("BCE: prediction " + std::to_string(pred[i]) + " outside [0, 1]");
        }
        const double p = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
        sum -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
      }
      return pred.empty() ? 0.0 : sum / static_cast<double>(pred.size());
    }
    case LossKind::MSE: {
      check_same_width(pred, target, "MSE");
      double sum = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - target[i]) * (pred[i] - target[i]);
      return pred.empty() ? 0.0 : sum / static_cast<double>(pred.size());
    }
    case LossKind::CrossEntropy: {
      if (pred.empty()) throw DimensionError("CrossEntropy: empty score vector");
      const Vector dist = ce_distribution(pred, target);
      const double top = *std::max_element(pred.begin(), pred.end());
      double sum_exp = 0.0;
      for (double s : pred) sum_exp += std::exp(s - top);
      const double log_sum = std::log(sum_exp);
      double loss = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (dist[i] != 0.0) loss += dist[i] * ((top - pred[i]) + log_sum);
      }
      return loss;
    }
  }
  return 0.0;
}

Vector loss_gradient(LossKind kind, std::span<const double> pred, std::span<const double> target) {
  Vector g(pred.size(), 0.0);
  const double n = static_cast<double>(pred.size());
  switch (kind) {
    case LossKind::BCE:
      check_same_width(pred, target, "BCE");
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(pred[i] >= 0.0 && pred[i] <= 1.0)) throw DomainError("BCE: prediction outside [0, 1]");
        const double p = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
        g[i] = (p - target[i]) / (p * (1.0 - p)) / n;
      }
      break;
    case LossKind::MSE:
      check_same_width(pred, target, "MSE");
      for (std::size_t i = 0; i < pred.size(); ++i) g[i] = 2.0 * (pred[i] - target[i]) / n;
      break;
    case LossKind::CrossEntropy: {
      if (pred.empty()) throw DimensionError("CrossEntropy: empty score vector");
      const Vector dist = ce_distribution(pred, target);
      const double mass = std::accumulate(dist.begin(), dist.end(), 0.0);
      const double top = *std::max_element(pred.begin(), pred.end());
      double sum_exp = 0.0;
      for (double s : pred) sum_exp += std::exp(s - top);
      for (std::size_t i = 0; i < pred.size(); ++i) g[i] = mass * std::exp(pred[i] - top) / sum_exp - dist[i];
      break;
    }
  }
  return g;
}

void accumulate_backward(const Network& net, const ForwardCache& cache, std::span<const double> output_grad,
                         Gradients& into) {
  if (cache.mode != Mode::Train) throw ContractError("backward needs a Train-mode forward cache");
  if (cache.layers.size() != net.layers.size()) {
    throw ContractError("forward cache has " + std::to_string(cache.layers.size()) + " layers, network has " +
                        std::to_string(net.layers.size()));
  }
  const auto blocks = parameter_blocks(net);
  if (into.blocks.size() != blocks.size()) throw ContractError("gradient buffer does not match the network");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (into.blocks[b].size() != blocks[b].size()) throw ContractError("gradient buffer does not match the network");
  }
  std::vector<std::size_t> first_block(net.layers.size() + 1, 0);
  for (std::size_t i = 0; i < net.layers.size(); ++i) first_block[i + 1] = first_block[i] + block_count(net.layers[i]);

  Vector g(output_grad.begin(), output_grad.end());
  for (std::size_t i = net.layers.size(); i-- > 0;) {
    if (cache.layers[i].output.size() != g.size()) {
      throw ContractError("gradient width does not match cached output of " + at_layer(i, net.layers[i]));
    }
    g = layer_backward(net.layers[i], cache.layers[i], g, into, first_block[i], i > 0);
  }
}

Gradients backward_from_output(const Network& net, const ForwardCache& cache, std::span<const double> output_grad) {
  Gradients grads = Gradients::zeros_like(net);
  accumulate_backward(net, cache, output_grad, grads);
  return grads;
}

Gradients backward(const Network& net, const ForwardCache& cache, std::span<const double> target) {
  if (cache.layers.empty()) {
    if (!net.layers.empty()) throw ContractError("forward cache does not belong to this network");
    return Gradients{};
  }
  const Vector& out = cache.layers.back().output;
  return backward_from_output(net, cache, loss_gradient(net.loss, out, target));
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Network init_params(Network net, std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&](std::span<double> values, double bound) {
    for (double& v : values) v = rng.uniform(-bound, bound);
  };
  for (Layer& layer : net.layers) {
    std::visit(overloaded{
                   [&](Dense& d) {
                     fill(d.weight.data, glorot_bound(d.weight.cols, d.weight.rows));
                     std::fill(d.bias.begin(), d.bias.end(), 0.0);
                   },
                   [&](Recurrent& r) {
                     fill(r.w_ih.data, glorot_bound(r.step_width(), r.hidden_size()));
                     fill(r.w_hh.data, glorot_bound(r.hidden_size(), r.hidden_size()));
                     std::fill(r.bias.begin(), r.bias.end(), 0.0);
                   },
                   [&](Conv1D& c) {
                     fill(c.kernels.data, glorot_bound(c.kernel_width(), c.out_channels()));
                     std::fill(c.bias.begin(), c.bias.end(), 0.0);
                   },
                   [&](ComplexDense& c) {
                     fill(as_reals(std::span<Complex>(c.weight.data)),
                          glorot_bound(c.weight.cols, c.weight.rows) / std::sqrt(2.0));
                     std::fill(c.bias.begin(), c.bias.end(), Complex{});
                   },
                   [](auto&) {},
               },
               layer);
  }
  return net;
}

Gradients finite_diff_gradients(const Network& net, std::span<const double> x, std::span<const double> target,
                                double step, const ForwardCache* masks) {
  if (!(step > 0.0)) throw ContractError("finite_diff_gradients: step must be positive");
  Network probe = net;
  auto eval = [&]() {
    Vector out = masks ? forward_with_masks(probe, x, *masks).output : predict(probe, x);
    return loss_value(probe.loss, out, target);
  };
  Gradients grads = Gradients::zeros_like(net);
  auto blocks = parameter_blocks(probe);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      const double original = blocks[b][i];
      blocks[b][i] = original + step;
      const double up = eval();
      blocks[b][i] = original - step;
      const double down = eval();
      blocks[b][i] = original;
      grads.blocks[b][i] = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

Dense make_dense(std::size_t in, std::size_t out) { return Dense{Matrix(out, in), Vector(out, 0.0)}; }

Recurrent make_recurrent(std::size_t step_width, std::size_t seq_len, std::size_t hidden, std::size_t input_width) {
  if (step_width == 0 || seq_len == 0 || hidden == 0) throw ContractError("recurrent layer needs non-zero shape");
  if (input_width > step_width * seq_len) throw ContractError("recurrent input wider than seq_len * step_width");
  return Recurrent{Matrix(hidden, step_width), Matrix(hidden, hidden), Vector(hidden, 0.0), seq_len, input_width};
}

Conv1D make_conv1d(std::size_t kernel_width, std::size_t out_channels) {
  return Conv1D{Matrix(out_channels, kernel_width), Vector(out_channels, 0.0)};
}

ComplexDense make_complex_dense(std::size_t in, std::size_t out, bool real_input) {
  return ComplexDense{ComplexMatrix(out, in), ComplexVector(out), real_input};
}

Network make_mini_nn(std::size_t input_size, std::size_t hidden_size) {
  Network net;
  net.layers = {make_dense(input_size, hidden_size), Activation{ActivationKind::ReLU}, make_dense(hidden_size, 1),
                Activation{ActivationKind::Sigmoid}};
  net.loss = LossKind::BCE;
  return net;
}

Vector make_target(LossKind kind, std::size_t label, std::size_t output_width) {
  if (kind == LossKind::CrossEntropy || output_width == 1) return {static_cast<double>(label)};
  if (label >= output_width) throw ContractError("label out of range for output width");
  Vector t(output_width, 0.0);
  t[label] = 1.0;
  return t;
}

std::size_t predicted_class(std::span<const double> output, double threshold) {
  if (output.empty()) throw ContractError("empty network output");
  if (output.size() == 1) return output[0] >= threshold ? 1 : 0;
  return static_cast<std::size_t>(std::max_element(output.begin(), output.end()) - output.begin());
}

}  // namespace tann::nn

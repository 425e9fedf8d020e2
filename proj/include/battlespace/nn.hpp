#pragma once

// Small feed-forward networks trained from scratch: a stack of 3x3 same-padded
// convolutions (Conv) or none (Dense), then fully connected hidden layers,
// then A*3 logits read as one win/loss/draw softmax per action.
//
// Parameters live in one flat vector, laid out block by block in declaration
// order (weights then bias for each layer); gradients share that layout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "battlespace/core.hpp"
#include "battlespace/encoders.hpp"
#include "battlespace/rng.hpp"
#include "json.hpp"

namespace battlespace {

enum class NetKind : std::uint8_t { Conv, Dense };

inline constexpr int kOutcomes = 3;  // win, loss, draw

struct NetworkSpec {
  NetKind kind = NetKind::Conv;
  Layout encoder = Layout::PropertyLayers;
  // Conv input: channels x rows x cols. Dense input: inputLength.
  int channels = 0;
  int rows = 0;
  int cols = 0;
  int inputLength = 0;
  std::vector<int> convFilters{16, 32};
  std::vector<int> hidden{128};
  int outputActions = kLandActionCount;
  int outputsPerAction = kOutcomes;

  int input_size() const { return kind == NetKind::Conv ? channels * rows * cols : inputLength; }
  int output_size() const { return outputActions * outputsPerAction; }

  void validate() const {
    if (outputsPerAction != kOutcomes) throw ShapeError("network must emit 3 outcomes per action");
    if (outputActions < 1) throw ShapeError("network needs at least one output action");
    if (kind == NetKind::Conv) {
      if (encoder == Layout::List) throw ShapeError("Conv networks need a grid encoding");
      if (channels < 1 || rows < 1 || cols < 1) throw ShapeError("Conv input shape must be positive");
    } else {
      if (encoder != Layout::List) throw ShapeError("Dense networks need the list encoding");
      if (inputLength < 1) throw ShapeError("Dense input length must be positive");
      if (!convFilters.empty()) throw ShapeError("Dense networks have no convolution layers");
    }
    for (int f : convFilters)
      if (f < 1) throw ShapeError("filter counts must be positive");
    for (int h : hidden)
      if (h < 1) throw ShapeError("hidden sizes must be positive");
  }

  static NetworkSpec conv(Layout encoder, int channels, int rows, int cols, int actions) {
    NetworkSpec s;
    s.kind = NetKind::Conv;
    s.encoder = encoder;
    s.channels = channels;
    s.rows = rows;
    s.cols = cols;
    s.outputActions = actions;
    return s;
  }

  static NetworkSpec dense(int inputLength, int actions) {
    NetworkSpec s;
    s.kind = NetKind::Dense;
    s.encoder = Layout::List;
    s.inputLength = inputLength;
    s.convFilters = {};
    s.hidden = {128, 128};
    s.outputActions = actions;
    return s;
  }

  bool operator==(const NetworkSpec&) const = default;
};

inline nlohmann::json to_json(const NetworkSpec& s) {
  return {{"kind", s.kind == NetKind::Conv ? "conv" : "dense"},
          {"encoder", std::string(to_string(s.encoder))},
          {"channels", s.channels},
          {"rows", s.rows},
          {"cols", s.cols},
          {"inputLength", s.inputLength},
          {"convFilters", s.convFilters},
          {"hidden", s.hidden},
          {"outputActions", s.outputActions},
          {"outputsPerAction", s.outputsPerAction}};
}

inline NetworkSpec network_spec_from_json(const nlohmann::json& j) {
  NetworkSpec s;
  s.kind = j.at("kind") == "conv" ? NetKind::Conv : NetKind::Dense;
  const auto enc = parse_layout(j.at("encoder").get<std::string>());
  if (!enc) throw ShapeError("unknown encoder in network spec");
  s.encoder = *enc;
  s.channels = j.value("channels", 0);
  s.rows = j.value("rows", 0);
  s.cols = j.value("cols", 0);
  s.inputLength = j.value("inputLength", 0);
  s.convFilters = j.at("convFilters").get<std::vector<int>>();
  s.hidden = j.at("hidden").get<std::vector<int>>();
  s.outputActions = j.at("outputActions").get<int>();
  s.outputsPerAction = j.value("outputsPerAction", kOutcomes);
  return s;
}

// Row-wise softmax of an A x 3 logit matrix.
template <typename T>
std::vector<T> outcome_softmax(std::span<const T> logits) {
  std::vector<T> p(logits.size());
  for (std::size_t r = 0; r + kOutcomes <= logits.size(); r += kOutcomes) {
    const T m = std::max({logits[r], logits[r + 1], logits[r + 2]});
    T sum = 0;
    for (int k = 0; k < kOutcomes; ++k) sum += p[r + k] = std::exp(logits[r + k] - m);
    for (int k = 0; k < kOutcomes; ++k) p[r + k] /= sum;
  }
  return p;
}

inline void check_target(std::span<const double> target) {
  if (target.size() % kOutcomes != 0) throw ShapeError("target is not an A x 3 matrix");
  for (std::size_t r = 0; r < target.size(); r += kOutcomes) {
    double sum = 0;
    for (int k = 0; k < kOutcomes; ++k) {
      if (!(target[r + k] >= 0)) throw ShapeError("target has a negative entry");
      sum += target[r + k];
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ShapeError("target row does not sum to 1");
  }
}

// Mean over actions of the cross-entropy H(target, predicted).
template <typename T>
T cross_entropy(std::span<const T> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) throw ShapeError("loss: shape mismatch");
  check_target(target);
  T total = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (target[i] > 0) total -= static_cast<T>(target[i]) * std::log(std::max(predicted[i], std::numeric_limits<T>::min()));
  return total / static_cast<T>(predicted.size() / kOutcomes);
}

template <typename T>
class Network {
 public:
  struct Block {
    bool conv = false;
    int in = 0;
    int out = 0;
    std::size_t weights = 0;  // offset into the parameter vector
    std::size_t bias = 0;
  };

  explicit Network(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::size_t offset = 0;
    int channels = spec_.kind == NetKind::Conv ? spec_.channels : 0;
    for (int f : spec_.convFilters) {
      Block b{true, channels, f, offset, 0};
      offset += static_cast<std::size_t>(f * channels * 9);
      b.bias = offset;
      offset += static_cast<std::size_t>(f);
      blocks_.push_back(b);
      channels = f;
    }
    int width = spec_.kind == NetKind::Conv ? channels * spec_.rows * spec_.cols : spec_.inputLength;
    std::vector<int> dense = spec_.hidden;
    dense.push_back(spec_.output_size());
    for (int h : dense) {
      Block b{false, width, h, offset, 0};
      offset += static_cast<std::size_t>(h * width);
      b.bias = offset;
      offset += static_cast<std::size_t>(h);
      blocks_.push_back(b);
      width = h;
    }
    params_.assign(offset, T{0});
  }

  // He-uniform weights, zero biases; deterministic per seed.
  Network(NetworkSpec spec, std::uint64_t seed) : Network(std::move(spec)) {
    seed_ = seed;
    Rng rng(seed);
    for (const Block& b : blocks_) {
      const int fanIn = b.conv ? b.in * 9 : b.in;
      const double bound = std::sqrt(6.0 / fanIn);
      for (std::size_t i = b.weights; i < b.bias; ++i) params_[i] = static_cast<T>((2 * rng.uniform() - 1) * bound);
    }
  }

  const NetworkSpec& spec() const { return spec_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::uint64_t seed() const { return seed_; }
  std::span<T> parameters() { return params_; }
  std::span<const T> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::vector<T> logits(std::span<const T> input) const {
    Trace t;
    run(input, t);
    return t.post.back();
  }

  // A x 3 row-stochastic matrix, row-major.
  std::vector<T> forward(std::span<const T> input) const {
    const std::vector<T> z = logits(input);
    return outcome_softmax<T>(z);
  }

  // Loss of one sample; adds d(loss)/d(params) * scale into grad.
  T accumulate_gradient(std::span<const T> input, std::span<const double> target, std::span<T> grad,
                        T scale = T{1}) const {
    if (grad.size() != params_.size()) throw ShapeError("gradient buffer has the wrong size");
    if (target.size() != static_cast<std::size_t>(spec_.output_size())) throw ShapeError("target shape mismatch");
    check_target(target);
    Trace t;
    run(input, t);
    const std::vector<T>& z = t.post.back();
    const std::vector<T> p = outcome_softmax<T>(z);
    const T rows = static_cast<T>(spec_.outputActions);
    T loss = 0;
    std::vector<T> delta(z.size());
    for (std::size_t r = 0; r < z.size(); r += kOutcomes) {
      const T m = std::max({z[r], z[r + 1], z[r + 2]});
      const T lse = m + std::log(std::exp(z[r] - m) + std::exp(z[r + 1] - m) + std::exp(z[r + 2] - m));
      for (int k = 0; k < kOutcomes; ++k) {
        const T tk = static_cast<T>(target[r + k]);
        loss -= tk * (z[r + k] - lse);
        delta[r + k] = (p[r + k] - tk) / rows;
      }
    }
    backprop(t, std::move(delta), grad, scale);
    return loss / rows;
  }

 private:
  // Activations of every layer: post[0] is the input, post[l+1] the output of
  // block l (after ReLU except for the final logits).
  struct Trace {
    std::vector<std::vector<T>> post;
  };

  int plane() const { return spec_.rows * spec_.cols; }

  void run(std::span<const T> input, Trace& t) const {
    if (input.size() != static_cast<std::size_t>(spec_.input_size()))
      throw ShapeError("input has " + std::to_string(input.size()) + " values, network expects " +
                       std::to_string(spec_.input_size()));
    t.post.clear();
    t.post.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      const Block& b = blocks_[l];
      const std::vector<T>& x = t.post.back();
      std::vector<T> y = b.conv ? conv_forward(b, x) : dense_forward(b, x);
      if (l + 1 < blocks_.size())
        for (T& v : y) v = std::max(v, T{0});
      t.post.push_back(std::move(y));
    }
  }

  std::vector<T> conv_forward(const Block& b, const std::vector<T>& x) const {
    const int R = spec_.rows, C = spec_.cols, P = plane();
    std::vector<T> y(static_cast<std::size_t>(b.out * P));
    for (int o = 0; o < b.out; ++o) {
      T* yo = &y[static_cast<std::size_t>(o * P)];
      std::fill(yo, yo + P, params_[b.bias + static_cast<std::size_t>(o)]);
      for (int i = 0; i < b.in; ++i) {
        const T* xi = &x[static_cast<std::size_t>(i * P)];
        const T* w = &params_[b.weights + static_cast<std::size_t>((o * b.in + i) * 9)];
        for (int ky = 0; ky < 3; ++ky)
          for (int kx = 0; kx < 3; ++kx) {
            const T wk = w[ky * 3 + kx];
            for (int r = std::max(0, 1 - ky); r < std::min(R, R + 1 - ky); ++r) {
              const int rr = r + ky - 1;
              for (int c = std::max(0, 1 - kx); c < std::min(C, C + 1 - kx); ++c)
                yo[r * C + c] += wk * xi[rr * C + c + kx - 1];
            }
          }
      }
    }
    return y;
  }

  std::vector<T> dense_forward(const Block& b, const std::vector<T>& x) const {
    std::vector<T> y(static_cast<std::size_t>(b.out));
    for (int o = 0; o < b.out; ++o) {
      const T* w = &params_[b.weights + static_cast<std::size_t>(o * b.in)];
      T acc = params_[b.bias + static_cast<std::size_t>(o)];
      for (int i = 0; i < b.in; ++i) acc += w[i] * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = acc;
    }
    return y;
  }

  void backprop(const Trace& t, std::vector<T> delta, std::span<T> grad, T scale) const {
    for (std::size_t l = blocks_.size(); l-- > 0;) {
      const Block& b = blocks_[l];
      const std::vector<T>& x = t.post[l];
      std::vector<T> dx(x.size(), T{0});
      if (b.conv) {
        const int R = spec_.rows, C = spec_.cols, P = plane();
        for (int o = 0; o < b.out; ++o) {
          const T* d = &delta[static_cast<std::size_t>(o * P)];
          T db = 0;
          for (int k = 0; k < P; ++k) db += d[k];
          grad[b.bias + static_cast<std::size_t>(o)] += scale * db;
          for (int i = 0; i < b.in; ++i) {
            const T* xi = &x[static_cast<std::size_t>(i * P)];
            T* dxi = &dx[static_cast<std::size_t>(i * P)];
            const std::size_t wo = b.weights + static_cast<std::size_t>((o * b.in + i) * 9);
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const T wk = params_[wo + static_cast<std::size_t>(ky * 3 + kx)];
                T gw = 0;
                for (int r = std::max(0, 1 - ky); r < std::min(R, R + 1 - ky); ++r) {
                  const int rr = r + ky - 1;
                  for (int c = std::max(0, 1 - kx); c < std::min(C, C + 1 - kx); ++c) {
                    const int src = rr * C + c + kx - 1;
                    gw += d[r * C + c] * xi[src];
                    dxi[src] += wk * d[r * C + c];
                  }
                }
                grad[wo + static_cast<std::size_t>(ky * 3 + kx)] += scale * gw;
              }
          }
        }
      } else {
        for (int o = 0; o < b.out; ++o) {
          const T d = delta[static_cast<std::size_t>(o)];
          grad[b.bias + static_cast<std::size_t>(o)] += scale * d;
          if (d == T{0}) continue;
          const std::size_t wo = b.weights + static_cast<std::size_t>(o * b.in);
          for (int i = 0; i < b.in; ++i) {
            grad[wo + static_cast<std::size_t>(i)] += scale * d * x[static_cast<std::size_t>(i)];
            dx[static_cast<std::size_t>(i)] += params_[wo + static_cast<std::size_t>(i)] * d;
          }
        }
      }
      if (l == 0) break;
      // x is post-ReLU of the previous block, so its zeros mark inactive units
      for (std::size_t k = 0; k < dx.size(); ++k)
        if (!(x[k] > T{0})) dx[k] = T{0};
      delta = std::move(dx);
    }
  }

  NetworkSpec spec_;
  std::vector<Block> blocks_;
  std::vector<T> params_;
  std::uint64_t seed_ = 0;
};

// SGD with classical momentum: v <- mu*v + g; theta <- theta - lr*v.
template <typename T>
class Sgd {
 public:
  explicit Sgd(T learningRate, T momentum = T(0.9)) : lr_(learningRate), mu_(momentum) {}

  void step(std::span<T> params, std::span<const T> grad) {
    if (velocity_.size() != params.size()) velocity_.assign(params.size(), T{0});
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity_[i] = mu_ * velocity_[i] + grad[i];
      params[i] -= lr_ * velocity_[i];
    }
  }

  T learning_rate() const { return lr_; }

 private:
  T lr_;
  T mu_;
  std::vector<T> velocity_;
};

// ---- checkpoints ----

inline constexpr char kCheckpointMagic[4] = {'B', 'S', 'N', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// magic, version (u32), header length (u32), JSON header {spec, seed}, then
// every parameter block as float32 little-endian in declaration order.
template <typename T>
void save_checkpoint(const Network<T>& net, std::ostream& out) {
  const std::string header = nlohmann::json{{"spec", to_json(net.spec())}, {"seed", net.seed()}}.dump();
  out.write(kCheckpointMagic, 4);
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (T v : net.parameters()) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    detail::put_u32(out, bits);
  }
}

template <typename T>
Network<T> load_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) throw ShapeError("not a network checkpoint");
  if (detail::get_u32(in) != kCheckpointVersion) throw ShapeError("unsupported checkpoint version");
  std::string header(detail::get_u32(in), '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(header.size()))) throw ShapeError("truncated checkpoint");
  const auto j = nlohmann::json::parse(header);
  Network<T> net(network_spec_from_json(j.at("spec")), j.value("seed", std::uint64_t{0}));
  for (T& v : net.parameters()) {
    const std::uint32_t bits = detail::get_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = static_cast<T>(f);
  }
  return net;
}

template <typename T>
void save_checkpoint(const Network<T>& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  save_checkpoint(net, out);
}

template <typename T>
Network<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_checkpoint<T>(in);
}

}  // namespace battlespace

// Fixed 7-10-5 feed-forward controller: forward pass, action choice, and the
// one-step self-teaching update.
#pragma once

#include <array>
#include <cmath>

namespace miniworld {

inline constexpr int kNumInputs = 7;
inline constexpr int kNumHidden = 10;
inline constexpr int kNumActions = 5;

using InputVector = std::array<double, kNumInputs>;
using OutputVector = std::array<double, kNumActions>;

// Weights and biases of one network. Row-major: w1[h * kNumInputs + i] is the
// connection from input i to hidden unit h, w2[o * kNumHidden + h] from
// hidden h to output o.
struct LayerNet {
  std::array<double, kNumHidden * kNumInputs> w1{};
  std::array<double, kNumHidden> b1{};
  std::array<double, kNumActions * kNumHidden> w2{};
  std::array<double, kNumActions> b2{};

  friend bool operator==(const LayerNet&, const LayerNet&) = default;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Hidden activations are kept because the self-teaching update reuses them.
struct Activations {
  std::array<double, kNumHidden> hidden;
  OutputVector output;
};

inline Activations forward(const LayerNet& net, const InputVector& input) {
  Activations acts;
  for (int h = 0; h < kNumHidden; ++h) {
    double z = net.b1[h];
    const double* row = &net.w1[static_cast<std::size_t>(h) * kNumInputs];
    for (int i = 0; i < kNumInputs; ++i) z += row[i] * input[i];
    acts.hidden[h] = sigmoid(z);
  }
  for (int o = 0; o < kNumActions; ++o) {
    double z = net.b2[o];
    const double* row = &net.w2[static_cast<std::size_t>(o) * kNumHidden];
    for (int h = 0; h < kNumHidden; ++h) z += row[h] * acts.hidden[h];
    acts.output[o] = sigmoid(z);
  }
  return acts;
}

// Index of the maximum activation; ties go to the lowest index.
inline int select_action(const OutputVector& output) {
  int best = 0;
  for (int k = 1; k < kNumActions; ++k) {
    if (output[k] > output[best]) best = k;
  }
  return best;
}

// One gradient step on L = 1/2 * sum_k (output_k - target_k)^2 with respect
// to all weights and biases of `net`, given the activations computed for
// `input`. The target is treated as a constant: no gradient flows into the
// network that produced it.
inline void self_teach_step(LayerNet& net, const InputVector& input,
                            const Activations& acts, const OutputVector& target,
                            double learning_rate, bool learn_bias = true) {
  std::array<double, kNumActions> delta_out;
  for (int o = 0; o < kNumActions; ++o) {
    const double y = acts.output[o];
    delta_out[o] = (y - target[o]) * y * (1.0 - y);
  }

  // Hidden deltas use the pre-update output weights.
  std::array<double, kNumHidden> delta_hidden;
  for (int h = 0; h < kNumHidden; ++h) {
    double back = 0.0;
    for (int o = 0; o < kNumActions; ++o) {
      back += net.w2[static_cast<std::size_t>(o) * kNumHidden + h] * delta_out[o];
    }
    const double a = acts.hidden[h];
    delta_hidden[h] = back * a * (1.0 - a);
  }

  for (int o = 0; o < kNumActions; ++o) {
    double* row = &net.w2[static_cast<std::size_t>(o) * kNumHidden];
    for (int h = 0; h < kNumHidden; ++h) {
      row[h] -= learning_rate * delta_out[o] * acts.hidden[h];
    }
    if (learn_bias) net.b2[o] -= learning_rate * delta_out[o];
  }
  for (int h = 0; h < kNumHidden; ++h) {
    double* row = &net.w1[static_cast<std::size_t>(h) * kNumInputs];
    for (int i = 0; i < kNumInputs; ++i) {
      row[i] -= learning_rate * delta_hidden[h] * input[i];
    }
    if (learn_bias) net.b1[h] -= learning_rate * delta_hidden[h];
  }
}

inline LayerNet self_teach(LayerNet net, const InputVector& input,
                           const OutputVector& target,
                           double learning_rate = 0.01,
                           bool learn_bias = true) {
  const Activations acts = forward(net, input);
  self_teach_step(net, input, acts, target, learning_rate, learn_bias);
  return net;
}

}  // namespace miniworld

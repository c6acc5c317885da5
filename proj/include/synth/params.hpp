#pragma once
#include <cstdint>
#include <vector>

#include "synth/arch.hpp"

namespace synth {

// Flat real parameters for one candidate program: one slot per parameterized
// node (affine, constant, fold accumulator, neural module), addressed by the
// node's pre-order position. Single-owner: one store per candidate.
struct ParamStore {
  std::vector<std::vector<double>> slots;
  std::vector<std::vector<double>> grads;

  void zero_grads();
  size_t total_params() const;
  bool all_finite() const;

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
};

// Number of parameters the node owns (0 for unparameterized constructs).
size_t slot_size(const ArchNode& n);

// Layout offsets inside a neural module slot: W1|b1|W2|b2 for feedforward,
// Wh|bh|Wo|bo for the recurrent kinds (single affine over concat(x, h)).
struct NeuralLayout {
  int in = 0, out = 0, units = 0;
  size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
};
NeuralLayout neural_layout(const ArchNode& n);

// Sized and initialized store: affine/neural weights uniform in
// +-1/sqrt(fan_in), biases and constants zero. Deterministic in (arch, seed).
ParamStore init_params(const Architecture& a, uint64_t seed);

}  // namespace synth

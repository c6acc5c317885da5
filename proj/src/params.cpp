#include "synth/params.hpp"

#include <cmath>

#include "synth/rng.hpp"

namespace synth {

void ParamStore::zero_grads() {
  for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
}

size_t ParamStore::total_params() const {
  size_t n = 0;
  for (const auto& s : slots) n += s.size();
  return n;
}

bool ParamStore::all_finite() const {
  for (const auto& s : slots)
    for (double v : s)
      if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> out;
  out.reserve(total_params());
  for (const auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

void ParamStore::unflatten(const std::vector<double>& flat) {
  size_t pos = 0;
  for (auto& s : slots) {
    for (auto& v : s) v = flat[pos++];
  }
}

size_t slot_size(const ArchNode& n) {
  switch (n.kind) {
    case Construct::Affine: {
      int m = n.sig.out.dim;
      int k = n.sel.empty() ? n.sig.in.dim : int(n.sel.size());
      return size_t(m) * size_t(k) + size_t(m);
    }
    case Construct::Const:
      return size_t(n.sig.out.dim);
    case Construct::Fold:
      return size_t(n.sig.out.dim);  // learnable initial accumulator
    case Construct::Neural:
      return neural_layout(n).total;
    default:
      return 0;
  }
}

NeuralLayout neural_layout(const ArchNode& n) {
  NeuralLayout L;
  L.in = n.sig.in.dim;
  L.out = n.sig.out.dim;
  L.units = n.units;
  const int u = n.units;
  const int first_in = (n.nkind == NeuralKind::Feedforward) ? L.in : L.in + u;
  L.w1 = 0;
  L.b1 = size_t(u) * size_t(first_in);
  L.w2 = L.b1 + size_t(u);
  L.b2 = L.w2 + size_t(L.out) * size_t(u);
  L.total = L.b2 + size_t(L.out);
  return L;
}

namespace {

void fill_affine(std::vector<double>& slot, int rows, int cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(double(std::max(1, cols)));
  for (int i = 0; i < rows * cols; ++i) slot[size_t(i)] = rng.uniform(-bound, bound);
  // biases after the weight block stay zero
}

}  // namespace

ParamStore init_params(const Architecture& a, uint64_t seed) {
  ParamStore ps;
  auto nodes = collect_nodes(a);
  ps.slots.resize(nodes.size());
  ps.grads.resize(nodes.size());
  Rng rng(mix64(seed, 0x70617261ull));
  for (size_t i = 0; i < nodes.size(); ++i) {
    const ArchNode& n = *nodes[i];
    size_t sz = slot_size(n);
    ps.slots[i].assign(sz, 0.0);
    ps.grads[i].assign(sz, 0.0);
    if (sz == 0) continue;
    if (n.kind == Construct::Affine) {
      int m = n.sig.out.dim;
      int k = n.sel.empty() ? n.sig.in.dim : int(n.sel.size());
      fill_affine(ps.slots[i], m, k, rng);
    } else if (n.kind == Construct::Neural) {
      auto L = neural_layout(n);
      const int first_in = (n.nkind == NeuralKind::Feedforward) ? L.in : L.in + L.units;
      const double bound1 = 1.0 / std::sqrt(double(std::max(1, first_in)));
      for (size_t j = L.w1; j < L.b1; ++j) ps.slots[i][j] = rng.uniform(-bound1, bound1);
      const double bound2 = 1.0 / std::sqrt(double(std::max(1, L.units)));
      for (size_t j = L.w2; j < L.b2; ++j) ps.slots[i][j] = rng.uniform(-bound2, bound2);
    }
    // Const and Fold slots start at zero.
  }
  return ps;
}

}  // namespace synth

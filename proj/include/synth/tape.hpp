#pragma once
#include <cstdint>
#include <vector>

#include "synth/params.hpp"

namespace synth {

// Reverse-mode tape over vector values. Values live in one contiguous arena;
// each op records references into it and forward computation happens at emit
// time (program control flow never depends on values, so no deferral is
// needed). backward() replays the record once in reverse, accumulating
// adjoints additively; Param entries flush their adjoints into the bound
// ParamStore's grads.
class Tape {
 public:
  enum class Op : uint8_t {
    Input,
    Param,
    Slice,
    Select,
    Concat,
    Affine,
    Add,
    Mul,
    Scale,       // y = s[0] * x, s one-dimensional
    ScaleConst,  // y = k * x
    OneMinus,    // y = 1 - x
    Sigmoid,
    Tanh,
    Mean,      // one-dimensional output
    CeLogits,  // weighted cross-entropy from logits, one-dimensional output
  };

  void reset(ParamStore* store);

  int input(const double* x, int n);
  int input(const std::vector<double>& x) { return input(x.data(), int(x.size())); }
  int param(int node);  // whole slot of the bound store as a leaf
  int slice(int x, int ofs, int n);
  int select(int x, const std::vector<int>& idx);
  int concat(int a, int b);
  int affine(int wb, int x, int m, int k);  // wb = W (row-major m*k) then b (m)
  int add(int a, int b);
  int mul(int a, int b);
  int scale(int s, int x);
  int scale_const(int x, double k);
  int one_minus(int x);
  int sigmoid(int x);
  int tanh(int x);
  int mean(int x);
  int ce_logits(int logits, int label, double weight);

  int size(int id) const { return entries_[size_t(id)].n; }
  const double* values(int id) const { return buf_.data() + entries_[size_t(id)].ofs; }
  double scalar(int id) const { return buf_[size_t(entries_[size_t(id)].ofs)]; }
  std::vector<double> value_vec(int id) const;

  void backward(int loss_id);

  size_t num_entries() const { return entries_.size(); }

 private:
  struct Entry {
    Op op;
    int a = -1, b = -1;
    int ofs = 0, n = 0;
    int aux = 0;     // Select: offset into idx pool; Param: node id; CeLogits: label
    double k = 0.0;  // ScaleConst factor / CeLogits class weight / Affine cols
  };

  int push(Op op, int n, int a = -1, int b = -1);
  double* out(Entry& e) { return buf_.data() + e.ofs; }
  const double* in(const Entry& e, int id) const {
    return buf_.data() + entries_[size_t(id)].ofs;
  }

  std::vector<Entry> entries_;
  std::vector<double> buf_;
  std::vector<double> adj_;
  std::vector<int> idx_pool_;
  ParamStore* store_ = nullptr;
};

double stable_sigmoid(double z);

// Smooth conditional on scalars: sigmoid(beta*c)*a + (1-sigmoid(beta*c))*b.
double smooth_if(double c, double a, double b, double beta);

}  // namespace synth

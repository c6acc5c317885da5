#include "synth/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace synth {

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double smooth_if(double c, double a, double b, double beta) {
  double g = stable_sigmoid(beta * c);
  return g * a + (1.0 - g) * b;
}

void Tape::reset(ParamStore* store) {
  entries_.clear();
  buf_.clear();
  adj_.clear();
  idx_pool_.clear();
  store_ = store;
}

int Tape::push(Op op, int n, int a, int b) {
  Entry e;
  e.op = op;
  e.a = a;
  e.b = b;
  e.ofs = int(buf_.size());
  e.n = n;
  buf_.resize(buf_.size() + size_t(n), 0.0);
  entries_.push_back(e);
  return int(entries_.size()) - 1;
}

std::vector<double> Tape::value_vec(int id) const {
  const Entry& e = entries_[size_t(id)];
  return std::vector<double>(buf_.begin() + e.ofs, buf_.begin() + e.ofs + e.n);
}

int Tape::input(const double* x, int n) {
  int id = push(Op::Input, n);
  std::copy(x, x + n, out(entries_.back()));
  return id;
}

int Tape::param(int node) {
  assert(store_ != nullptr);
  const auto& slot = store_->slots[size_t(node)];
  int id = push(Op::Param, int(slot.size()));
  entries_.back().aux = node;
  std::copy(slot.begin(), slot.end(), out(entries_.back()));
  return id;
}

int Tape::slice(int x, int ofs, int n) {
  int id = push(Op::Slice, n, x);
  Entry& e = entries_.back();
  e.aux = ofs;
  const double* src = in(e, x);
  std::copy(src + ofs, src + ofs + n, out(e));
  return id;
}

int Tape::select(int x, const std::vector<int>& idx) {
  int id = push(Op::Select, int(idx.size()), x);
  Entry& e = entries_.back();
  e.aux = int(idx_pool_.size());
  idx_pool_.insert(idx_pool_.end(), idx.begin(), idx.end());
  const double* src = in(e, x);
  double* dst = out(e);
  for (size_t i = 0; i < idx.size(); ++i) dst[i] = src[idx[i]];
  return id;
}

int Tape::concat(int a, int b) {
  int na = size(a), nb = size(b);
  int id = push(Op::Concat, na + nb, a, b);
  Entry& e = entries_.back();
  std::copy(in(e, a), in(e, a) + na, out(e));
  std::copy(in(e, b), in(e, b) + nb, out(e) + na);
  return id;
}

int Tape::affine(int wb, int x, int m, int k) {
  assert(size(wb) == m * k + m && size(x) == k);
  int id = push(Op::Affine, m, wb, x);
  Entry& e = entries_.back();
  e.k = double(k);
  const double* W = in(e, wb);
  const double* bias = W + m * k;
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < m; ++i) {
    double acc = bias[i];
    const double* row = W + i * k;
    for (int j = 0; j < k; ++j) acc += row[j] * xv[j];
    y[i] = acc;
  }
  return id;
}

int Tape::add(int a, int b) {
  int n = size(a);
  assert(size(b) == n);
  int id = push(Op::Add, n, a, b);
  Entry& e = entries_.back();
  const double* av = in(e, a);
  const double* bv = in(e, b);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = av[i] + bv[i];
  return id;
}

int Tape::mul(int a, int b) {
  int n = size(a);
  assert(size(b) == n);
  int id = push(Op::Mul, n, a, b);
  Entry& e = entries_.back();
  const double* av = in(e, a);
  const double* bv = in(e, b);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = av[i] * bv[i];
  return id;
}

int Tape::scale(int s, int x) {
  assert(size(s) == 1);
  int n = size(x);
  int id = push(Op::Scale, n, s, x);
  Entry& e = entries_.back();
  double sv = in(e, s)[0];
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = sv * xv[i];
  return id;
}

int Tape::scale_const(int x, double k) {
  int n = size(x);
  int id = push(Op::ScaleConst, n, x);
  Entry& e = entries_.back();
  e.k = k;
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = k * xv[i];
  return id;
}

int Tape::one_minus(int x) {
  int n = size(x);
  int id = push(Op::OneMinus, n, x);
  Entry& e = entries_.back();
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = 1.0 - xv[i];
  return id;
}

int Tape::sigmoid(int x) {
  int n = size(x);
  int id = push(Op::Sigmoid, n, x);
  Entry& e = entries_.back();
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = stable_sigmoid(xv[i]);
  return id;
}

int Tape::tanh(int x) {
  int n = size(x);
  int id = push(Op::Tanh, n, x);
  Entry& e = entries_.back();
  const double* xv = in(e, x);
  double* y = out(e);
  for (int i = 0; i < n; ++i) y[i] = std::tanh(xv[i]);
  return id;
}

int Tape::mean(int x) {
  int n = size(x);
  int id = push(Op::Mean, 1, x);
  Entry& e = entries_.back();
  const double* xv = in(e, x);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += xv[i];
  out(e)[0] = acc / double(n);
  return id;
}

int Tape::ce_logits(int logits, int label, double weight) {
  int n = size(logits);
  assert(label >= 0 && label < n);
  int id = push(Op::CeLogits, 1, logits);
  Entry& e = entries_.back();
  e.aux = label;
  e.k = weight;
  const double* z = in(e, logits);
  double zmax = z[0];
  for (int i = 1; i < n; ++i) zmax = std::max(zmax, z[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(z[i] - zmax);
  out(e)[0] = weight * (zmax + std::log(sum) - z[label]);
  return id;
}

void Tape::backward(int loss_id) {
  adj_.assign(buf_.size(), 0.0);
  const Entry& last = entries_[size_t(loss_id)];
  assert(last.n == 1);
  adj_[size_t(last.ofs)] = 1.0;

  for (size_t ei = entries_.size(); ei-- > 0;) {
    const Entry& e = entries_[ei];
    const double* dy = adj_.data() + e.ofs;
    switch (e.op) {
      case Op::Input:
        break;
      case Op::Param: {
        auto& g = store_->grads[size_t(e.aux)];
        for (int i = 0; i < e.n; ++i) g[size_t(i)] += dy[i];
        break;
      }
      case Op::Slice: {
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs + e.aux;
        for (int i = 0; i < e.n; ++i) dx[i] += dy[i];
        break;
      }
      case Op::Select: {
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        const int* idx = idx_pool_.data() + e.aux;
        for (int i = 0; i < e.n; ++i) dx[idx[i]] += dy[i];
        break;
      }
      case Op::Concat: {
        int na = entries_[size_t(e.a)].n;
        double* da = adj_.data() + entries_[size_t(e.a)].ofs;
        double* db = adj_.data() + entries_[size_t(e.b)].ofs;
        for (int i = 0; i < na; ++i) da[i] += dy[i];
        for (int i = 0; i < e.n - na; ++i) db[i] += dy[na + i];
        break;
      }
      case Op::Affine: {
        const int m = e.n, k = int(e.k);
        const double* W = buf_.data() + entries_[size_t(e.a)].ofs;
        const double* xv = buf_.data() + entries_[size_t(e.b)].ofs;
        double* dW = adj_.data() + entries_[size_t(e.a)].ofs;
        double* db = dW + m * k;
        double* dx = adj_.data() + entries_[size_t(e.b)].ofs;
        for (int i = 0; i < m; ++i) {
          const double g = dy[i];
          if (g == 0.0) continue;
          double* dWrow = dW + i * k;
          const double* Wrow = W + i * k;
          for (int j = 0; j < k; ++j) {
            dWrow[j] += g * xv[j];
            dx[j] += g * Wrow[j];
          }
          db[i] += g;
        }
        break;
      }
      case Op::Add: {
        double* da = adj_.data() + entries_[size_t(e.a)].ofs;
        double* db = adj_.data() + entries_[size_t(e.b)].ofs;
        for (int i = 0; i < e.n; ++i) {
          da[i] += dy[i];
          db[i] += dy[i];
        }
        break;
      }
      case Op::Mul: {
        const double* av = buf_.data() + entries_[size_t(e.a)].ofs;
        const double* bv = buf_.data() + entries_[size_t(e.b)].ofs;
        double* da = adj_.data() + entries_[size_t(e.a)].ofs;
        double* db = adj_.data() + entries_[size_t(e.b)].ofs;
        for (int i = 0; i < e.n; ++i) {
          da[i] += dy[i] * bv[i];
          db[i] += dy[i] * av[i];
        }
        break;
      }
      case Op::Scale: {
        const double s = buf_[size_t(entries_[size_t(e.a)].ofs)];
        const double* xv = buf_.data() + entries_[size_t(e.b)].ofs;
        double* ds = adj_.data() + entries_[size_t(e.a)].ofs;
        double* dx = adj_.data() + entries_[size_t(e.b)].ofs;
        for (int i = 0; i < e.n; ++i) {
          ds[0] += dy[i] * xv[i];
          dx[i] += dy[i] * s;
        }
        break;
      }
      case Op::ScaleConst: {
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        for (int i = 0; i < e.n; ++i) dx[i] += e.k * dy[i];
        break;
      }
      case Op::OneMinus: {
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        for (int i = 0; i < e.n; ++i) dx[i] -= dy[i];
        break;
      }
      case Op::Sigmoid: {
        const double* y = buf_.data() + e.ofs;
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        for (int i = 0; i < e.n; ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::Tanh: {
        const double* y = buf_.data() + e.ofs;
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        for (int i = 0; i < e.n; ++i) dx[i] += dy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::Mean: {
        const int n = entries_[size_t(e.a)].n;
        double* dx = adj_.data() + entries_[size_t(e.a)].ofs;
        const double g = dy[0] / double(n);
        for (int i = 0; i < n; ++i) dx[i] += g;
        break;
      }
      case Op::CeLogits: {
        const int n = entries_[size_t(e.a)].n;
        const double* z = buf_.data() + entries_[size_t(e.a)].ofs;
        double* dz = adj_.data() + entries_[size_t(e.a)].ofs;
        double zmax = z[0];
        for (int i = 1; i < n; ++i) zmax = std::max(zmax, z[i]);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += std::exp(z[i] - zmax);
        const double g = dy[0] * e.k;
        for (int i = 0; i < n; ++i) {
          double soft = std::exp(z[i] - zmax) / sum;
          dz[i] += g * (soft - (i == e.aux ? 1.0 : 0.0));
        }
        break;
      }
    }
  }
}

}  // namespace synth

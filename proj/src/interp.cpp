#include "synth/interp.hpp"

#include <cmath>

namespace synth {

Emitter::Emitter(Tape& tape, const Architecture& arch, double beta)
    : tape_(tape), arch_(arch), beta_(beta) {
  auto nodes = collect_nodes(arch);
  for (size_t i = 0; i < nodes.size(); ++i) node_index_[nodes[i]] = int(i);
}

EmitValue Emitter::emit_input(const Frames& x) {
  EmitValue v;
  if (arch_.root->sig.in.kind == SemType::Seq) {
    v.seq = true;
    for (const auto& f : x) v.frames.push_back(tape_.input(f));
  } else {
    require(x.size() == 1, "vector-input program expects a single frame");
    v.vec = tape_.input(x[0]);
  }
  return v;
}

int Emitter::param_id(const ArchNode* n) {
  auto it = param_cache_.find(n);
  if (it != param_cache_.end()) return it->second;
  int id = tape_.param(node_index_.at(n));
  param_cache_[n] = id;
  return id;
}

int Emitter::zeros(int n) {
  std::vector<double> z(size_t(n), 0.0);
  return tape_.input(z);
}

int Emitter::gate(int cond_vec) {
  return tape_.sigmoid(tape_.scale_const(tape_.mean(cond_vec), beta_));
}

EmitValue Emitter::emit_if(const ArchNode* n, const EmitValue& input) {
  EmitValue c = emit(n->kids[0].get(), input);
  EmitValue a = emit(n->kids[1].get(), input);
  EmitValue b = emit(n->kids[2].get(), input);
  EmitValue out;
  if (n->sig.out.kind == SemType::Vec) {
    int g = gate(c.vec);
    out.vec = tape_.add(tape_.scale(g, a.vec), tape_.scale(tape_.one_minus(g), b.vec));
  } else {
    out.seq = true;
    for (size_t t = 0; t < a.frames.size(); ++t) {
      int g = gate(c.frames[t]);
      out.frames.push_back(
          tape_.add(tape_.scale(g, a.frames[t]), tape_.scale(tape_.one_minus(g), b.frames[t])));
    }
  }
  return out;
}

EmitValue Emitter::emit_neural(const ArchNode* n, const EmitValue& input) {
  const auto L = neural_layout(*n);
  int slot = param_id(n);
  int wb1 = tape_.slice(slot, 0, int(L.b1 - L.w1) + L.units);
  int wb2 = tape_.slice(slot, int(L.w2), L.out * L.units + L.out);
  EmitValue out;
  if (n->nkind == NeuralKind::Feedforward) {
    int h = tape_.tanh(tape_.affine(wb1, input.vec, L.units, L.in));
    out.vec = tape_.affine(wb2, h, L.out, L.units);
    return out;
  }
  int h = zeros(L.units);
  std::vector<int> hidden;
  hidden.reserve(input.frames.size());
  for (int f : input.frames) {
    h = tape_.tanh(tape_.affine(wb1, tape_.concat(f, h), L.units, L.in + L.units));
    hidden.push_back(h);
  }
  if (n->nkind == NeuralKind::Recurrent) {
    out.vec = tape_.affine(wb2, h, L.out, L.units);
  } else {
    out.seq = true;
    for (int ht : hidden) out.frames.push_back(tape_.affine(wb2, ht, L.out, L.units));
  }
  return out;
}

EmitValue Emitter::emit(const ArchNode* n, const EmitValue& input) {
  switch (n->kind) {
    case Construct::Hole:
      throw std::logic_error("cannot evaluate an architecture with holes");
    case Construct::Input:
      return input;
    case Construct::Const: {
      EmitValue v;
      v.vec = param_id(n);
      return v;
    }
    case Construct::Affine: {
      int x = input.vec;
      int k = n->sig.in.dim;
      if (!n->sel.empty()) {
        x = tape_.select(x, n->sel);
        k = int(n->sel.size());
      }
      EmitValue v;
      v.vec = tape_.affine(param_id(n), x, n->sig.out.dim, k);
      return v;
    }
    case Construct::Add:
    case Construct::Mul: {
      EmitValue a = emit(n->kids[0].get(), input);
      EmitValue b = emit(n->kids[1].get(), input);
      EmitValue out;
      if (n->sig.out.kind == SemType::Vec) {
        out.vec = n->kind == Construct::Add ? tape_.add(a.vec, b.vec) : tape_.mul(a.vec, b.vec);
      } else {
        out.seq = true;
        for (size_t t = 0; t < a.frames.size(); ++t)
          out.frames.push_back(n->kind == Construct::Add
                                   ? tape_.add(a.frames[t], b.frames[t])
                                   : tape_.mul(a.frames[t], b.frames[t]));
      }
      return out;
    }
    case Construct::If:
      return emit_if(n, input);
    case Construct::Map: {
      EmitValue out;
      out.seq = true;
      for (int f : input.frames) {
        EmitValue frame;
        frame.vec = f;
        out.frames.push_back(emit(n->kids[0].get(), frame).vec);
      }
      return out;
    }
    case Construct::Fold: {
      int acc = param_id(n);
      for (int f : input.frames) {
        EmitValue step;
        step.vec = tape_.concat(acc, f);
        acc = emit(n->kids[0].get(), step).vec;
      }
      EmitValue out;
      out.vec = acc;
      return out;
    }
    case Construct::MapPrefix: {
      const ArchNode* g = n->kids[0].get();
      EmitValue out;
      out.seq = true;
      if (g->kind == Construct::Fold) {
        // fold over the i-th prefix is the accumulator after step i
        int acc = param_id(g);
        for (int f : input.frames) {
          EmitValue step;
          step.vec = tape_.concat(acc, f);
          acc = emit(g->kids[0].get(), step).vec;
          out.frames.push_back(acc);
        }
      } else if (g->kind == Construct::Neural && g->nkind == NeuralKind::Recurrent) {
        // the recurrent module on the i-th prefix reads the i-th hidden state
        const auto L = neural_layout(*g);
        int slot = param_id(g);
        int wb1 = tape_.slice(slot, 0, L.units * (L.in + L.units) + L.units);
        int wb2 = tape_.slice(slot, int(L.w2), L.out * L.units + L.out);
        int h = zeros(L.units);
        for (int f : input.frames) {
          h = tape_.tanh(tape_.affine(wb1, tape_.concat(f, h), L.units, L.in + L.units));
          out.frames.push_back(tape_.affine(wb2, h, L.out, L.units));
        }
      } else {
        for (size_t i = 1; i <= input.frames.size(); ++i) {
          EmitValue prefix;
          prefix.seq = true;
          prefix.frames.assign(input.frames.begin(), input.frames.begin() + long(i));
          out.frames.push_back(emit(g, prefix).vec);
        }
      }
      return out;
    }
    case Construct::WinAvg: {
      const int n_frames = int(input.frames.size());
      std::map<int, int> cache;  // frame index -> emitted g(x_t)
      auto mapped = [&](int t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        EmitValue frame;
        frame.vec = input.frames[size_t(t)];
        int id = emit(n->kids[0].get(), frame).vec;
        cache[t] = id;
        return id;
      };
      int sum = -1;
      for (int j = n_frames - kWindow; j < n_frames; ++j) {
        int id = mapped(std::max(j, 0));
        sum = sum < 0 ? id : tape_.add(sum, id);
      }
      EmitValue out;
      out.vec = tape_.scale_const(sum, 1.0 / double(kWindow));
      return out;
    }
    case Construct::Neural:
      return emit_neural(n, input);
  }
  throw std::logic_error("unreachable construct");
}

Value evaluate(const Architecture& arch, const ParamStore& params, const Frames& x,
               double beta) {
  require(arch.valid(), "invalid architecture");
  require(hole_count(arch) == 0, "architecture must be complete (or relaxed)");
  require(beta > 0.0, "beta must be positive");
  require(!x.empty(), "empty trajectory");
  const int d = arch.root->sig.in.dim;
  for (const auto& f : x) {
    require(int(f.size()) == d, "trajectory frame dim does not match program input");
    for (double v : f) require(std::isfinite(v), "non-finite input value");
  }
  require(params.all_finite(), "non-finite parameter value");

  Tape tape;
  ParamStore& mutable_params = const_cast<ParamStore&>(params);  // grads untouched
  tape.reset(&mutable_params);
  Emitter em(tape, arch, mutable_params, beta);
  EmitValue out = em.run(em.emit_input(x));
  Value v;
  v.seq = out.seq;
  if (out.seq) {
    for (int f : out.frames) v.frames.push_back(tape.value_vec(f));
  } else {
    v.vec = tape.value_vec(out.vec);
  }
  return v;
}

}  // namespace synth

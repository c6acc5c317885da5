#pragma once
#include <stdexcept>
#include <string>

namespace synth {

// Value type of the DSL: real vectors and sequences of real vectors.
struct SemType {
  enum Kind { Vec, Seq } kind = Vec;
  int dim = 1;  // element dim for Seq

  static SemType vec(int d) { return {Vec, d}; }
  static SemType seq(int d) { return {Seq, d}; }

  bool operator==(const SemType& o) const { return kind == o.kind && dim == o.dim; }
  bool operator!=(const SemType& o) const { return !(*this == o); }

  std::string str() const {
    return (kind == Vec ? "Vec(" : "Seq(") + std::to_string(dim) + ")";
  }
};

// Every expression in the DSL denotes a function of one input; nonterminals
// carry the signature of the function they stand for.
struct Signature {
  SemType in, out;

  bool operator==(const Signature& o) const { return in == o.in && out == o.out; }
  bool operator!=(const Signature& o) const { return !(*this == o); }

  std::string str() const { return in.str() + "->" + out.str(); }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace synth

#pragma once
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "synth/semtype.hpp"

namespace synth {

// Construct kinds appearing in architecture trees. Hole and Neural are not
// produced by grammar rules: holes are unexpanded nonterminals and neural
// modules are substituted for holes by the relaxation pass.
enum class Construct {
  Input,      // the bound variable x (identity function)
  Const,      // learnable constant vector
  Affine,     // W * sel_S(x) + b
  Add,        // elementwise sum of two subexpressions
  Mul,        // elementwise product
  If,         // smooth if-then-else
  Map,        // per-element application over a sequence
  Fold,       // accumulator threaded over a sequence, g(concat(acc, x_t))
  MapPrefix,  // g applied to every prefix of the sequence
  WinAvg,     // mean of g(x_t) over the trailing window of the sequence
  Hole,
  Neural,
};

const char* construct_name(Construct c);

// One grammar production, monomorphic: lhs is a concrete signature and the
// rhs template fixes the child slot signatures.
struct Rule {
  int idx = -1;  // position in Grammar::rules, stable and deterministic
  std::string name;
  Construct construct = Construct::Hole;
  Signature sig;                  // lhs nonterminal signature
  std::vector<Signature> slots;   // child hole signatures, left to right
  double cost = 0.0;
  std::vector<int> sel;           // Affine only; empty means whole input

  int arity() const { return int(slots.size()); }
};

struct SelectorDef {
  std::string name;
  std::vector<int> indices;
};

class Grammar {
 public:
  int feature_dim = 0;
  int label_dim = 0;
  bool per_frame = true;  // start signature Seq(d)->Seq(K) vs Seq(d)->Vec(K)
  Signature start;
  std::vector<Rule> rules;
  std::vector<SelectorDef> selectors;

  const std::vector<int>& rules_for(const Signature& sig) const;
  const Rule& rule(int idx) const { return rules.at(size_t(idx)); }
  const Rule* find_rule(const std::string& name, const Signature& sig) const;

  // Uniform or per-name cost assignment; unknown names are rejected.
  void set_uniform_cost(double c);
  void set_cost(const std::string& name, double c);

  // Minimum number of derivation steps needed to complete a hole of the
  // given signature; returns a large sentinel when no completion exists.
  int min_steps(const Signature& sig) const;
  static constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

  // Copy of this grammar keeping only rules whose names pass the filter.
  Grammar keep_rules(const std::vector<std::string>& names) const;

  void rebuild_index();

 private:
  std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, std::vector<int>> by_sig_;
  mutable std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, int> min_steps_;
  static std::pair<std::pair<int, int>, std::pair<int, int>> key(const Signature& s);
};

// Builds the sequence-classification grammar: one affine rule per named
// selector, a general affine for non-feature inputs (fold interiors), a
// learnable constant, identity where dims permit, elementwise add/mul and
// smooth if at every level, and the map / fold / mapprefix / sliding-window
// combinators. All rules start at the given uniform cost.
Grammar default_grammar(int feature_dim, int label_dim,
                        const std::vector<SelectorDef>& selectors,
                        bool per_frame = true, double uniform_cost = 0.01);

}  // namespace synth

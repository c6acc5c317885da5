#pragma once
#include <memory>
#include <string>
#include <vector>

#include "synth/grammar.hpp"

namespace synth {

enum class NeuralKind { Feedforward, Recurrent, Seq2Seq };

struct ArchNode;
using NodePtr = std::shared_ptr<const ArchNode>;

// Immutable syntax-tree node. expand() path-copies, so subtrees are shared
// freely between architectures and across threads.
struct ArchNode {
  Construct kind = Construct::Hole;
  Signature sig;
  int rule_idx = -1;  // grammar rule that introduced this node; -1 for Hole/Neural
  std::vector<NodePtr> kids;
  std::vector<int> sel;  // Affine: selected input dims; empty = whole input
  int units = 0;         // Neural only
  NeuralKind nkind = NeuralKind::Feedforward;
};

struct Architecture {
  NodePtr root;
  std::vector<int> rules_used;  // rule indices, kept sorted (a multiset)

  bool valid() const { return root != nullptr; }
  // One rule application creates exactly one construct node, so the number
  // of derivation steps equals the number of non-hole, non-neural nodes.
  int steps() const { return int(rules_used.size()); }
};

// Architecture whose root is a single hole of the grammar's start signature.
Architecture empty_architecture(const Grammar& g);

// Pre-order traversal; node ids used by ParamStore and the param cache are
// positions in this ordering.
void collect_nodes(const NodePtr& root, std::vector<const ArchNode*>& out);
std::vector<const ArchNode*> collect_nodes(const Architecture& a);

// Pre-order positions of every hole (empty for complete architectures).
std::vector<int> hole_indices(const Architecture& a);
bool is_complete(const Architecture& a);
int hole_count(const Architecture& a);

// Replaces the hole at pre-order position hole_id with the rule's construct;
// the rule's child slots become fresh holes. The input is not mutated.
Architecture expand(const Architecture& u, int hole_id, const Rule& r);

// Sum of rule costs over the multiset, accumulated in sorted-index order so
// the result is bit-stable for a given multiset.
double structural_cost(const Architecture& a, const Grammar& g);

// Max nesting level of the tree (holes and neural modules count as a level);
// a bare hole has depth 1, map(affine) has depth 2.
int tree_depth(const Architecture& a);

// Deterministic canonical key for memoization; independent of parameters and
// of the grammar object identity.
std::string structural_key(const Architecture& a);
uint64_t structural_hash(const Architecture& a);

bool structurally_equal(const NodePtr& a, const NodePtr& b);
bool structurally_equal(const Architecture& a, const Architecture& b);

// Rebuilds the rules_used multiset from the tree (used after subtree
// surgery by the genetic operators).
std::vector<int> rules_in_tree(const NodePtr& root);

// Replaces the subtree at pre-order position pos with repl (signatures must
// match); returns the new architecture with rules_used recomputed.
Architecture replace_subtree(const Architecture& a, int pos, const NodePtr& repl);

// Pre-order position lookup.
const ArchNode* node_at(const Architecture& a, int pos);

}  // namespace synth

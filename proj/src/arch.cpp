#include "synth/arch.hpp"

#include <algorithm>
#include <functional>

#include "synth/rng.hpp"

namespace synth {

Architecture empty_architecture(const Grammar& g) {
  auto hole = std::make_shared<ArchNode>();
  hole->kind = Construct::Hole;
  hole->sig = g.start;
  return Architecture{hole, {}};
}

void collect_nodes(const NodePtr& root, std::vector<const ArchNode*>& out) {
  if (!root) return;
  out.push_back(root.get());
  for (const auto& k : root->kids) collect_nodes(k, out);
}

std::vector<const ArchNode*> collect_nodes(const Architecture& a) {
  std::vector<const ArchNode*> out;
  collect_nodes(a.root, out);
  return out;
}

std::vector<int> hole_indices(const Architecture& a) {
  std::vector<int> out;
  auto nodes = collect_nodes(a);
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i]->kind == Construct::Hole) out.push_back(int(i));
  return out;
}

bool is_complete(const Architecture& a) { return hole_count(a) == 0; }

int hole_count(const Architecture& a) {
  int n = 0;
  for (auto* node : collect_nodes(a))
    if (node->kind == Construct::Hole) ++n;
  return n;
}

namespace {

NodePtr instantiate(const Rule& r) {
  auto n = std::make_shared<ArchNode>();
  n->kind = r.construct;
  n->sig = r.sig;
  n->rule_idx = r.idx;
  n->sel = r.sel;
  for (const auto& s : r.slots) {
    auto h = std::make_shared<ArchNode>();
    h->kind = Construct::Hole;
    h->sig = s;
    n->kids.push_back(std::move(h));
  }
  return n;
}

// Path-copies down to pre-order position target and substitutes repl there.
// cursor counts nodes already passed in pre-order.
NodePtr rebuild(const NodePtr& node, int target, int& cursor, const NodePtr& repl) {
  int my_pos = cursor++;
  if (my_pos == target) return repl;
  if (node->kids.empty()) return node;
  // Skip subtrees wholly before the target to avoid copying them.
  auto copy = std::make_shared<ArchNode>(*node);
  bool replaced = false;
  for (auto& kid : copy->kids) {
    if (replaced) break;  // cursor already beyond target; remaining kids shared
    std::vector<const ArchNode*> sub;
    collect_nodes(kid, sub);
    if (cursor + int(sub.size()) <= target) {
      cursor += int(sub.size());
      continue;
    }
    kid = rebuild(kid, target, cursor, repl);
    replaced = true;
  }
  return copy;
}

}  // namespace

Architecture expand(const Architecture& u, int hole_id, const Rule& r) {
  const ArchNode* h = node_at(u, hole_id);
  require(h != nullptr, "hole id out of range");
  require(h->kind == Construct::Hole, "node " + std::to_string(hole_id) + " is not a hole");
  require(h->sig == r.sig, "rule " + r.name + " signature " + r.sig.str() +
                               " does not match hole " + h->sig.str());
  int cursor = 0;
  Architecture out;
  out.root = rebuild(u.root, hole_id, cursor, instantiate(r));
  out.rules_used = u.rules_used;
  out.rules_used.insert(
      std::lower_bound(out.rules_used.begin(), out.rules_used.end(), r.idx), r.idx);
  return out;
}

double structural_cost(const Architecture& a, const Grammar& g) {
  double total = 0.0;
  for (int idx : a.rules_used) total += g.rule(idx).cost;
  return total;
}

int tree_depth(const Architecture& a) {
  std::function<int(const NodePtr&)> depth = [&](const NodePtr& n) -> int {
    int d = 0;
    for (const auto& k : n->kids) d = std::max(d, depth(k));
    return d + 1;
  };
  return a.root ? depth(a.root) : 0;
}

namespace {

void key_rec(const ArchNode* n, std::string& out) {
  switch (n->kind) {
    case Construct::Hole:
      out += "H<" + n->sig.str() + ">";
      return;
    case Construct::Neural:
      out += "N";
      out += (n->nkind == NeuralKind::Feedforward ? "f"
              : n->nkind == NeuralKind::Recurrent ? "r"
                                                  : "s");
      out += std::to_string(n->units);
      out += "<" + n->sig.str() + ">";
      return;
    case Construct::Affine: {
      out += "A";
      if (n->sel.empty()) {
        out += "*";
      } else {
        for (size_t i = 0; i < n->sel.size(); ++i) {
          if (i) out += ",";
          out += std::to_string(n->sel[i]);
        }
      }
      out += "<" + n->sig.str() + ">";
      return;
    }
    default:
      out += construct_name(n->kind)[0];
      out += "<" + n->sig.str() + ">";
      break;
  }
  out += "(";
  for (size_t i = 0; i < n->kids.size(); ++i) {
    if (i) out += ",";
    key_rec(n->kids[i].get(), out);
  }
  out += ")";
}

}  // namespace

std::string structural_key(const Architecture& a) {
  std::string out;
  if (a.root) key_rec(a.root.get(), out);
  return out;
}

uint64_t structural_hash(const Architecture& a) {
  // FNV-1a over the canonical key
  uint64_t h = 1469598103934665603ull;
  for (char c : structural_key(a)) {
    h ^= uint64_t(uint8_t(c));
    h *= 1099511628211ull;
  }
  return h;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->sig != b->sig || a->sel != b->sel || a->units != b->units ||
      a->nkind != b->nkind || a->kids.size() != b->kids.size())
    return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!structurally_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

bool structurally_equal(const Architecture& a, const Architecture& b) {
  return structurally_equal(a.root, b.root);
}

std::vector<int> rules_in_tree(const NodePtr& root) {
  std::vector<int> out;
  std::vector<const ArchNode*> nodes;
  collect_nodes(root, nodes);
  for (auto* n : nodes)
    if (n->rule_idx >= 0) out.push_back(n->rule_idx);
  std::sort(out.begin(), out.end());
  return out;
}

Architecture replace_subtree(const Architecture& a, int pos, const NodePtr& repl) {
  const ArchNode* target = node_at(a, pos);
  require(target != nullptr, "subtree position out of range");
  require(repl && target->sig == repl->sig, "replacement subtree signature mismatch");
  int cursor = 0;
  Architecture out;
  out.root = rebuild(a.root, pos, cursor, repl);
  out.rules_used = rules_in_tree(out.root);
  return out;
}

const ArchNode* node_at(const Architecture& a, int pos) {
  auto nodes = collect_nodes(a);
  if (pos < 0 || pos >= int(nodes.size())) return nullptr;
  return nodes[size_t(pos)];
}

}  // namespace synth

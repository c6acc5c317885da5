#include "synth/grammar.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace synth {

const char* construct_name(Construct c) {
  switch (c) {
    case Construct::Input: return "x";
    case Construct::Const: return "const";
    case Construct::Affine: return "affine";
    case Construct::Add: return "add";
    case Construct::Mul: return "mul";
    case Construct::If: return "if";
    case Construct::Map: return "map";
    case Construct::Fold: return "fold";
    case Construct::MapPrefix: return "mapprefix";
    case Construct::WinAvg: return "slidingwinavg";
    case Construct::Hole: return "hole";
    case Construct::Neural: return "neural";
  }
  return "?";
}

std::pair<std::pair<int, int>, std::pair<int, int>> Grammar::key(const Signature& s) {
  return {{int(s.in.kind), s.in.dim}, {int(s.out.kind), s.out.dim}};
}

const std::vector<int>& Grammar::rules_for(const Signature& sig) const {
  static const std::vector<int> empty;
  auto it = by_sig_.find(key(sig));
  return it == by_sig_.end() ? empty : it->second;
}

const Rule* Grammar::find_rule(const std::string& name, const Signature& sig) const {
  for (int idx : rules_for(sig))
    if (rules[size_t(idx)].name == name) return &rules[size_t(idx)];
  return nullptr;
}

void Grammar::set_uniform_cost(double c) {
  require(c >= 0.0, "rule cost must be non-negative");
  for (auto& r : rules) r.cost = c;
}

void Grammar::set_cost(const std::string& name, double c) {
  require(c >= 0.0, "rule cost must be non-negative");
  bool found = false;
  for (auto& r : rules)
    if (r.name == name) {
      r.cost = c;
      found = true;
    }
  require(found, "no grammar rule named '" + name + "'");
}

void Grammar::rebuild_index() {
  by_sig_.clear();
  min_steps_.clear();
  for (size_t i = 0; i < rules.size(); ++i) {
    rules[i].idx = int(i);
    by_sig_[key(rules[i].sig)].push_back(int(i));
  }
}

int Grammar::min_steps(const Signature& sig) const {
  if (min_steps_.empty()) {
    // Fixpoint over all lhs signatures; child signatures outside the closure
    // cannot occur because rules are built from the closure itself.
    for (const auto& [k, v] : by_sig_) {
      (void)v;
      min_steps_[k] = kUnreachable;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : rules) {
        long total = 1;
        for (const auto& s : r.slots) {
          auto it = min_steps_.find(key(s));
          long child = (it == min_steps_.end()) ? kUnreachable : it->second;
          total += child;
        }
        total = std::min<long>(total, kUnreachable);
        auto& cur = min_steps_[key(r.sig)];
        if (total < cur) {
          cur = int(total);
          changed = true;
        }
      }
    }
  }
  auto it = min_steps_.find(key(sig));
  return it == min_steps_.end() ? kUnreachable : it->second;
}

Grammar Grammar::keep_rules(const std::vector<std::string>& names) const {
  Grammar g = *this;
  g.rules.clear();
  for (const auto& r : rules)
    if (std::find(names.begin(), names.end(), r.name) != names.end()) g.rules.push_back(r);
  g.rebuild_index();
  return g;
}

Grammar default_grammar(int feature_dim, int label_dim,
                        const std::vector<SelectorDef>& selectors, bool per_frame,
                        double uniform_cost) {
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(label_dim >= 1, "label_dim must be >= 1");
  require(!selectors.empty(), "at least one feature selector is required");
  require(uniform_cost >= 0.0, "rule cost must be non-negative");
  std::set<std::string> seen_names;
  for (const auto& s : selectors) {
    require(!s.name.empty(), "selector name must be non-empty");
    require(seen_names.insert(s.name).second, "duplicate selector name '" + s.name + "'");
    require(!s.indices.empty(), "selector '" + s.name + "' has no indices");
    for (int i : s.indices)
      require(i >= 0 && i < feature_dim,
              "selector '" + s.name + "' index " + std::to_string(i) + " out of range [0, " +
                  std::to_string(feature_dim) + ")");
  }

  Grammar g;
  g.feature_dim = feature_dim;
  g.label_dim = label_dim;
  g.per_frame = per_frame;
  g.selectors = selectors;
  g.start = per_frame
                ? Signature{SemType::seq(feature_dim), SemType::seq(label_dim)}
                : Signature{SemType::seq(feature_dim), SemType::vec(label_dim)};

  auto add_rule = [&](const std::string& name, Construct c, const Signature& sig,
                      std::vector<Signature> slots, std::vector<int> sel = {}) {
    Rule r;
    r.name = name;
    r.construct = c;
    r.sig = sig;
    r.slots = std::move(slots);
    r.cost = uniform_cost;
    r.sel = std::move(sel);
    g.rules.push_back(std::move(r));
  };

  // Closure of reachable signatures, breadth-first from the start symbol, so
  // rule order (and thus tie-breaking) is deterministic.
  std::deque<Signature> todo{g.start};
  std::set<std::tuple<int, int, int, int>> visited;
  auto sig_key = [](const Signature& s) {
    return std::make_tuple(int(s.in.kind), s.in.dim, int(s.out.kind), s.out.dim);
  };
  std::vector<Signature> pending;

  while (!todo.empty()) {
    Signature sig = todo.front();
    todo.pop_front();
    if (!visited.insert(sig_key(sig)).second) continue;
    pending.clear();
    auto slot = [&](const Signature& s) {
      pending.push_back(s);
      return s;
    };

    const bool v2v = sig.in.kind == SemType::Vec && sig.out.kind == SemType::Vec;
    const bool s2s = sig.in.kind == SemType::Seq && sig.out.kind == SemType::Seq;
    const bool s2v = sig.in.kind == SemType::Seq && sig.out.kind == SemType::Vec;

    if (v2v) {
      if (sig.in.dim == feature_dim) {
        for (const auto& s : selectors)
          add_rule(s.name + "Affine", Construct::Affine, sig, {}, s.indices);
      } else {
        add_rule("Affine", Construct::Affine, sig, {});
      }
      add_rule("const", Construct::Const, sig, {});
      if (sig.in == sig.out) add_rule("id", Construct::Input, sig, {});
      add_rule("add", Construct::Add, sig, {slot(sig), slot(sig)});
      add_rule("mul", Construct::Mul, sig, {slot(sig), slot(sig)});
      add_rule("if", Construct::If, sig, {slot(sig), slot(sig), slot(sig)});
    } else if (s2s) {
      Signature per_elem{SemType::vec(sig.in.dim), SemType::vec(sig.out.dim)};
      Signature prefix{SemType::seq(sig.in.dim), SemType::vec(sig.out.dim)};
      add_rule("map", Construct::Map, sig, {slot(per_elem)});
      add_rule("mapprefix", Construct::MapPrefix, sig, {slot(prefix)});
      if (sig.in == sig.out) add_rule("id", Construct::Input, sig, {});
      add_rule("add", Construct::Add, sig, {slot(sig), slot(sig)});
      add_rule("mul", Construct::Mul, sig, {slot(sig), slot(sig)});
      add_rule("if", Construct::If, sig, {slot(sig), slot(sig), slot(sig)});
    } else if (s2v) {
      Signature folder{SemType::vec(sig.out.dim + sig.in.dim), SemType::vec(sig.out.dim)};
      Signature per_elem{SemType::vec(sig.in.dim), SemType::vec(sig.out.dim)};
      add_rule("fold", Construct::Fold, sig, {slot(folder)});
      add_rule("SlidingWinAvg", Construct::WinAvg, sig, {slot(per_elem)});
      add_rule("add", Construct::Add, sig, {slot(sig), slot(sig)});
      add_rule("mul", Construct::Mul, sig, {slot(sig), slot(sig)});
      add_rule("if", Construct::If, sig, {slot(sig), slot(sig), slot(sig)});
    } else {
      // Vec -> Seq never arises from the productions above.
      require(false, "unsupported signature " + sig.str());
    }
    for (const auto& s : pending) todo.push_back(s);
  }

  g.rebuild_index();
  return g;
}

}  // namespace synth

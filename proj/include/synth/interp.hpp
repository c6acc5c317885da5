#pragma once
#include <map>
#include <vector>

#include "synth/tape.hpp"

namespace synth {

using Frames = std::vector<std::vector<double>>;  // T x d trajectory

// Runtime value during emission: a single tape vector or a sequence of them.
struct EmitValue {
  bool seq = false;
  int vec = -1;
  std::vector<int> frames;
};

// Lowers one architecture onto a tape for one input trajectory. Parameters
// are emitted once per node and shared across frames, so gradient fan-out is
// accumulated by the tape. Requires a hole-free (complete or relaxed) tree.
class Emitter {
 public:
  Emitter(Tape& tape, const Architecture& arch, double beta);

  EmitValue emit_input(const Frames& x);
  EmitValue run(const EmitValue& input) { return emit(arch_.root.get(), input); }

 private:
  EmitValue emit(const ArchNode* n, const EmitValue& input);
  EmitValue emit_if(const ArchNode* n, const EmitValue& input);
  EmitValue emit_neural(const ArchNode* n, const EmitValue& input);
  int gate(int cond_vec);
  int param_id(const ArchNode* n);
  int zeros(int n);

  Tape& tape_;
  const Architecture& arch_;
  double beta_;
  std::map<const ArchNode*, int> node_index_;
  std::map<const ArchNode*, int> param_cache_;
  static constexpr int kWindow = 10;  // trailing frames averaged by WinAvg
};

struct Value {
  bool seq = false;
  std::vector<double> vec;
  Frames frames;
};

// Pure evaluation of a complete (or relaxed) architecture on one trajectory.
Value evaluate(const Architecture& arch, const ParamStore& params, const Frames& x,
               double beta);

}  // namespace synth

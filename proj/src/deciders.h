#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ittmbb/classical.h"

namespace ittmbb::internal {

// A finite machine over an arbitrary alphabet, used as an abstraction of a
// classical table. Symbol 0 is blank and state 0 is the start.
struct AbstractRule {
  uint32_t write = 0;
  Move move = Move::kRight;
  int next = 0;  // a state, or one of the two markers below
};
inline constexpr int kEscapes = -1;  // may halt
inline constexpr int kStuck = -2;    // loops without ever moving on

struct AbstractMachine {
  int states = 0;
  uint32_t symbols = 2;
  std::vector<AbstractRule> rules;  // states * symbols, indexed [q * symbols + s]
};

// Blocks of `block` cells as single symbols. A macro state is (state, side)
// with the head at the left (side 0) or right end of its block.
AbstractMachine MacroMachine(int n, const ClassicalTransition* table, int block);
// Each symbol also remembers which state wrote it last (0 for never).
AbstractMachine WithHistory(const AbstractMachine& base);

// Per-cell run-length abstraction: each side of the head is a stack of
// (symbol, count) runs where a count below `threshold` is exact and larger
// counts only keep their residue mod `modulus`. Explores the abstract
// configurations reachable from blank; true if none escapes. Gives up past
// max_configs configurations or max_runs runs on one side.
bool RunLengthSearch(const AbstractMachine& m, int threshold, int modulus, size_t max_configs, size_t max_runs);

// Looks for a set of local views (state, head symbol, `radius` symbols on
// each side) that contains the blank start, is closed under steps and never
// escapes. Gives up past max_views views.
bool ClosedGramSearch(const AbstractMachine& m, int radius, size_t max_views);

}  // namespace ittmbb::internal

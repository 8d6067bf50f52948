#pragma once

// Test-only generators and reference simulators. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "ittmbb/classical.h"
#include "ittmbb/ittm.h"

namespace doctest {
template <>
struct StringMaker<ittmbb::EPTape> {
  static String convert(const ittmbb::EPTape& t) { return t.ToString().c_str(); }
};
}  // namespace doctest

namespace ittmbb::testing {

inline ClassicalMachine RandomClassical(std::mt19937_64& rng, int n) {
  std::vector<ClassicalTransition> table;
  std::uniform_int_distribution<int> bit(0, 1), next(-1, n - 1);
  for (int i = 0; i < 2 * n; ++i) {
    table.push_back({static_cast<uint8_t>(bit(rng)), bit(rng) ? Move::kRight : Move::kLeft, next(rng)});
  }
  return ClassicalMachine(n, std::move(table));
}

// halt_weight in [0,1]: probability that a transition targets Halt.
inline ITTMachine RandomITTM(std::mt19937_64& rng, int n, double halt_weight = 0.1) {
  std::vector<ITTMTransition> table;
  std::uniform_int_distribution<int> triple(0, 7), bit(0, 1), state(0, n - 1);
  std::bernoulli_distribution halts(halt_weight);
  for (int i = 0; i < 8 * (n + 1); ++i) {
    table.push_back({static_cast<Triple>(triple(rng)), bit(rng) ? Move::kRight : Move::kLeft,
                     halts(rng) ? kHalt : state(rng)});
  }
  return ITTMachine(n, std::move(table));
}

// Reference classical run on a std::map tape.
struct ReferenceRun {
  bool halted = false;
  uint64_t steps = 0;
  std::map<int64_t, uint8_t> tape;
  int64_t head = 0;
  int state = 0;

  uint64_t Ones() const {
    uint64_t n = 0;
    for (auto [c, v] : tape) n += v;
    return n;
  }
};

inline ReferenceRun ReferenceClassical(const ClassicalMachine& m, uint64_t budget) {
  ReferenceRun r;
  while (r.steps < budget) {
    const auto& t = m.At(r.state, r.tape[r.head]);
    r.tape[r.head] = t.write;
    r.head += t.move == Move::kRight ? 1 : -1;
    r.state = t.next;
    ++r.steps;
    if (r.state == kHalt) {
      r.halted = true;
      break;
    }
  }
  return r;
}

// Every 2-symbol n-state table, in mixed-radix order.
template <typename Fn>
void ForEachRawClassical(int n, Fn&& fn) {
  const int per = 2 * 2 * (n + 1);
  const int entries = 2 * n;
  std::vector<int> digits(static_cast<size_t>(entries), 0);
  for (;;) {
    std::vector<ClassicalTransition> table;
    for (int d : digits) {
      table.push_back({static_cast<uint8_t>(d % 2), (d / 2) % 2 ? Move::kRight : Move::kLeft,
                       d / 4 == n ? kHalt : d / 4});
    }
    fn(ClassicalMachine(n, std::move(table)));
    int i = 0;
    while (i < entries && ++digits[static_cast<size_t>(i)] == per) digits[static_cast<size_t>(i++)] = 0;
    if (i == entries) return;
  }
}

// Machine with a given table built from a list of (state, read) -> t rows;
// unspecified entries become "write back, move R, halt".
struct ITTMRow {
  int state;
  Triple read;
  ITTMTransition t;
};

inline ITTMachine BuildITTM(int n, const std::vector<ITTMRow>& rows) {
  std::vector<ITTMTransition> table(static_cast<size_t>(8 * (n + 1)));
  for (int r = 0; r <= n; ++r) {
    for (Triple x = 0; x < 8; ++x) table[static_cast<size_t>(8 * r + x)] = {x, Move::kRight, kHalt};
  }
  for (const auto& row : rows) {
    table[static_cast<size_t>(8 * ITTMachine::Row(row.state, n) + row.read)] = row.t;
  }
  return ITTMachine(n, std::move(table));
}


// Reference ITTM run on explicit cell arrays. Cells beyond the array hold the
// starting tapes' contents.
class ReferenceITTM {
 public:
  ReferenceITTM(const ITTMachine& m, const Snapshot& start) : m_(m), start_(start) {
    head = start.head;
    state = start.state;
  }

  Triple Cell(uint64_t c) const {
    if (c < cells_.size()) return cells_[c];
    return MakeTriple(start_.input.At(c), start_.output.At(c), start_.scratch.At(c));
  }
  // False once halted.
  bool Step() {
    while (cells_.size() <= head + 1) cells_.push_back(Cell(cells_.size()));
    const auto& t = m_.At(state, cells_[head]);
    cells_[head] = t.write;
    if (t.move == Move::kRight) ++head;
    else if (head > 0) --head;
    state = t.next;
    ++steps;
    return state != kHalt;
  }
  uint64_t size() const { return cells_.size(); }

  uint64_t head = 0;
  int state = 0;
  uint64_t steps = 0;

 private:
  ITTMachine m_;
  Snapshot start_;
  std::vector<Triple> cells_;
};

// Brute-force limit of the block from `start`, given that it repeats with
// period p from step t0: simulate t0 + 100p steps, then one more period and
// take the cellwise max/min over it. Only cells in [0, window) are
// meaningful; for a drift the window stops at the lowest head position of the
// last period.
struct BruteLimit {
  std::vector<Triple> sup, inf;
  uint64_t window = 0;
};

inline BruteLimit BruteForceLimit(const ITTMachine& m, const Snapshot& start, uint64_t t0, uint64_t p,
                                  bool drift) {
  ReferenceITTM r(m, start);
  for (uint64_t i = 0; i < t0 + 100 * p; ++i) r.Step();
  const uint64_t reach = r.size() + 2 * p + 2;
  BruteLimit out;
  out.sup.assign(reach, 0);
  out.inf.assign(reach, 7);
  uint64_t low = r.head;
  auto note = [&] {
    for (uint64_t c = 0; c < reach; ++c) {
      out.sup[c] |= r.Cell(c);
      out.inf[c] &= r.Cell(c);
    }
  };
  note();
  for (uint64_t i = 0; i < p; ++i) {
    r.Step();
    low = std::min(low, r.head);
    note();
  }
  out.window = drift ? low : reach;
  return out;
}

}  // namespace ittmbb::testing

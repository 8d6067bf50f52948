#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ittmbb/ittm.h"

namespace ittmbb {

// Where a fragment transition goes: one of the fragment's own states, or the
// exit hook that a later splice binds to the next fragment's entry.
struct FragmentTarget {
  enum class Kind { kLocal, kExit };
  Kind kind = Kind::kExit;
  int state = 0;

  static FragmentTarget Local(int s) { return {Kind::kLocal, s}; }
  static FragmentTarget Exit() { return {Kind::kExit, 0}; }
  friend bool operator==(const FragmentTarget&, const FragmentTarget&) = default;
};

struct FragmentTransition {
  Triple write = 0;
  Move move = Move::kRight;
  FragmentTarget next;
  friend bool operator==(const FragmentTransition&, const FragmentTransition&) = default;
};

// A run of ordinary states with 8 transitions each. Entry is local state 0;
// an empty fragment passes control straight through.
class MachineFragment {
 public:
  MachineFragment() = default;
  explicit MachineFragment(std::vector<FragmentTransition> table);

  int n_states() const { return static_cast<int>(table_.size() / 8); }
  bool empty() const { return table_.empty(); }
  const FragmentTransition& At(int state, Triple read) const {
    return table_[static_cast<size_t>(8 * state + read)];
  }
  const std::vector<FragmentTransition>& table() const { return table_; }

  // `this` followed by `next`: exits of `this` enter `next`, whose states are
  // renumbered after ours. State count is the sum.
  MachineFragment Then(const MachineFragment& next) const;

  friend bool operator==(const MachineFragment&, const MachineFragment&) = default;

 private:
  std::vector<FragmentTransition> table_;
};

// Closes a fragment into a machine: exits halt, and the Limit row sends every
// read to one extra trap state that moves right forever without writing, so
// a run that reaches a limit stage never halts. The result has
// body.n_states() + 1 states. Throws std::invalid_argument on an empty body.
ITTMachine CloseFragment(const MachineFragment& body);

// An ITTMachine that only reads and writes one tape: for every entry, the
// other two bits of the written triple equal those read, and the transition's
// effect depends on the designated bit alone.
class OneTapeITTM {
 public:
  // Throws std::invalid_argument if m is not one-tape on `tape`.
  OneTapeITTM(ITTMachine m, TapeId tape);
  static bool IsOneTape(const ITTMachine& m, TapeId tape);

  const ITTMachine& machine() const { return m_; }
  TapeId tape() const { return tape_; }
  int n_states() const { return m_.n_states(); }

  // The designated-bit action of state s reading bit b.
  struct Action {
    uint8_t write;
    Move move;
    int next;
  };
  Action At(int state, uint8_t bit) const;

 private:
  ITTMachine m_;
  TapeId tape_;
};

// sum_{i=0..x} (fstar(i) + i)^2. Throws std::overflow_error past 64 bits.
uint64_t ReferenceF(const std::function<uint64_t(uint64_t)>& fstar, uint64_t x);

// x states; state i writes 1 on input cell i and moves right. Empty for x=0.
MachineFragment WriteOnesGadget(uint64_t x);

// m's successor-step behaviour retargeted to `tape`: the other two tapes are
// written back unchanged. Exactly m.n_states() states; m's Halt becomes the
// exit. The Limit row of m is not carried over.
MachineFragment EmbedOnTape(const OneTapeITTM& m, TapeId tape);

// One state: scans right copying src into dst while src reads 1, copies the
// first 0 too and exits one cell to its right. Assumes src is clean unary and
// dst is blank from the first 0 of src onwards.
MachineFragment CopyGadget(TapeId src, TapeId dst);

// One state: sets `marker` on the current cell (meant for cell 0) and exits
// without moving the head.
MachineFragment MarkGadget(TapeId marker);

// One state: moves left until it stands on a cell whose `marker` bit is 1,
// then exits there.
MachineFragment RewindGadget(TapeId marker);

struct Theorem1Machine {
  ITTMachine machine;
  uint64_t x = 0;
  uint64_t c = 0;  // states of m
  uint64_t h = 0;  // overhead depending on c only
  uint64_t s = 0;  // x + h, equals machine.n_states()
};

// The overhead of the construction for an m with c states.
uint64_t Theorem1Overhead(uint64_t c);

// Writes x ones on input, runs m there, copies input to scratch, runs m on
// scratch, copies scratch to output and halts. Output cell 0 serves as the
// rewind marker until the final copy overwrites it. Requires m on the input
// tape.
Theorem1Machine ComposeTheorem1(const OneTapeITTM& m, uint64_t x);

// Least N < horizon with f[n] > g[n] for every n in [N, horizon), or nullopt.
// A finite-horizon observation only. Throws std::invalid_argument if either
// sequence is shorter than horizon.
std::optional<uint64_t> DominanceWitness(const std::vector<uint64_t>& f, const std::vector<uint64_t>& g,
                                         uint64_t horizon);

// Hand-written one-tape machines on the input tape, used by tests and the
// CLI: unary successor (1 state) and unary doubling (8 states).
OneTapeITTM UnarySuccessorMachine();
OneTapeITTM UnaryDoublingMachine();

}  // namespace ittmbb

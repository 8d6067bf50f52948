#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ittmbb/eptape.h"

namespace ittmbb {

enum class Move : uint8_t { kLeft = 0, kRight = 1 };

inline Move Flip(Move m) { return m == Move::kLeft ? Move::kRight : Move::kLeft; }
inline char MoveChar(Move m) { return m == Move::kLeft ? 'L' : 'R'; }

// Targets outside 0..n_states-1.
inline constexpr int kHalt = -1;
inline constexpr int kUndefined = -2;

struct ClassicalTransition {
  uint8_t write = 0;
  Move move = Move::kRight;
  int next = kHalt;

  friend bool operator==(const ClassicalTransition&, const ClassicalTransition&) = default;
};

// A 2-symbol Turing machine with n non-halting states 0..n-1 (start 0) and
// a single absorbing Halt target. The table is total.
class ClassicalMachine {
 public:
  // Throws std::invalid_argument unless the table has 2*n_states entries, each
  // targeting a state in range or kHalt.
  ClassicalMachine(int n_states, std::vector<ClassicalTransition> table);

  int n_states() const { return n_states_; }
  const ClassicalTransition& At(int state, uint8_t bit) const { return table_[2 * state + bit]; }
  const std::vector<ClassicalTransition>& table() const { return table_; }

  // Compact one-line form, e.g. "1RB1LB_1LA1RZ" (Z is Halt).
  std::string Encode() const;
  static ClassicalMachine Decode(std::string_view text);

  // Same machine with every Left/Right swapped.
  ClassicalMachine Mirrored() const;

  friend bool operator==(const ClassicalMachine&, const ClassicalMachine&) = default;

 private:
  int n_states_;
  std::vector<ClassicalTransition> table_;
};

// Finite window of a two-way infinite tape. Cells outside are 0. The window
// covers every visited cell; the written extent is tracked separately since
// the final move of a run may step onto a fresh cell.
class FiniteTapeWindow {
 public:
  FiniteTapeWindow() : cells_{0} {}
  // Window holding `bits` at cells origin.., all counted as written.
  static FiniteTapeWindow FromBits(const Bits& bits, int64_t origin = 0, int64_t head = 0);
  // Explicit written extent; an empty extent is written_lo > written_hi.
  static FiniteTapeWindow FromBits(const Bits& bits, int64_t origin, int64_t head,
                                   int64_t written_lo, int64_t written_hi);

  uint8_t At(int64_t cell) const {
    const int64_t i = cell - origin_;
    return (i < 0 || i >= static_cast<int64_t>(cells_.size())) ? 0 : cells_[static_cast<size_t>(i)];
  }
  uint8_t Read() const { return cells_[static_cast<size_t>(head_ - origin_)]; }
  void Write(uint8_t bit);
  void Shift(Move m);

  int64_t head() const { return head_; }
  int64_t origin() const { return origin_; }
  int64_t leftmost() const { return origin_; }
  int64_t rightmost() const { return origin_ + static_cast<int64_t>(cells_.size()) - 1; }
  bool written() const { return written_lo_ <= written_hi_; }
  int64_t written_lo() const { return written_lo_; }
  int64_t written_hi() const { return written_hi_; }
  const Bits& cells() const { return cells_; }

  uint64_t CountOnes() const;
  // Reflection about cell 0 (cell i becomes cell -i).
  FiniteTapeWindow Mirrored() const;
  uint64_t Fingerprint() const;

  // Contents equal as tapes (window geometry ignored).
  bool SameContents(const FiniteTapeWindow& other) const;

 private:
  Bits cells_;
  int64_t origin_ = 0;
  int64_t head_ = 0;
  int64_t written_lo_ = 1;
  int64_t written_hi_ = 0;
};

struct ClassicalConfig {
  FiniteTapeWindow tape;
  int state = 0;  // kHalt once halted
  uint64_t steps = 0;
};

// One quintuple step. Precondition: cfg.state is a non-halting state.
ClassicalConfig StepClassical(const ClassicalMachine& m, ClassicalConfig cfg);

struct ClassicalRun {
  enum class Status { kHalted, kOutOfBudget };
  Status status;
  ClassicalConfig last;  // final configuration, or the one at the budget

  bool halted() const { return status == Status::kHalted; }
};

// Runs from the blank tape. Requires step_budget >= 1.
ClassicalRun RunClassical(const ClassicalMachine& m, uint64_t step_budget);

// Number of 1 cells.
uint64_t ScoreRado(const FiniteTapeWindow& tape);

// k if the tape reads 1^k 0^inf starting at the leftmost written cell (and
// is 0 everywhere to the left of it); nullopt otherwise. Blank gives 0.
std::optional<uint64_t> CleanScore(const FiniteTapeWindow& tape);

// In-place simulator over a flat tape, used by the hot loops. Works on a raw
// table that may contain kUndefined entries (partial machines during
// enumeration).
class ClassicalSimulator {
 public:
  enum class Event { kRunning, kHalted, kUndefined };

  ClassicalSimulator(int n_states, const ClassicalTransition* table, size_t initial_width = 64);

  void Reset();
  Event Step();

  int state() const { return state_; }
  uint64_t steps() const { return steps_; }
  int64_t head() const { return head_ - zero_; }
  uint8_t Read() const { return tape_[static_cast<size_t>(head_)]; }
  uint8_t At(int64_t cell) const {
    const int64_t i = cell + zero_;
    return (i < 0 || i >= static_cast<int64_t>(tape_.size())) ? 0 : tape_[static_cast<size_t>(i)];
  }
  int64_t leftmost() const { return lo_ - zero_; }
  int64_t rightmost() const { return hi_ - zero_; }
  // Cells visited strictly beyond all earlier positions on the last step:
  // +1 for a new rightmost, -1 for a new leftmost, 0 otherwise.
  int record() const { return record_; }

  FiniteTapeWindow Window() const;

 private:
  void Grow();

  int n_states_;
  const ClassicalTransition* table_;
  Bits tape_;
  int64_t zero_ = 0;
  int64_t head_ = 0;
  int64_t lo_ = 0, hi_ = 0;
  int64_t wlo_ = 1, whi_ = 0;
  int state_ = 0;
  uint64_t steps_ = 0;
  int record_ = 0;
};

}  // namespace ittmbb

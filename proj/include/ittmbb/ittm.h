#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ittmbb/classical.h"
#include "ittmbb/eptape.h"

namespace ittmbb {

enum class TapeId : uint8_t { kInput = 0, kOutput = 1, kScratch = 2 };

// The bits under the shared head, one per tape: bit 2 input, bit 1 output,
// bit 0 scratch. Written "(in,out,scr)" in machine files.
using Triple = uint8_t;

inline constexpr Triple MakeTriple(uint8_t in, uint8_t out, uint8_t scr) {
  return static_cast<Triple>((in << 2) | (out << 1) | scr);
}
inline constexpr uint8_t TripleBit(Triple t, TapeId id) {
  return static_cast<uint8_t>((t >> (2 - static_cast<int>(id))) & 1);
}
inline constexpr Triple WithTripleBit(Triple t, TapeId id, uint8_t bit) {
  const int shift = 2 - static_cast<int>(id);
  return static_cast<Triple>((t & ~(1 << shift)) | (bit << shift));
}
std::string TripleString(Triple t);

// Pseudo-state of a snapshot after a limit stage. Never a transition target.
inline constexpr int kLimit = -3;

enum class LimitRule { kLimsup, kLiminf };
std::string_view RuleName(LimitRule rule);
LimitRule ParseRule(std::string_view name);

struct ITTMTransition {
  Triple write = 0;
  Move move = Move::kRight;
  int next = kHalt;

  friend bool operator==(const ITTMTransition&, const ITTMTransition&) = default;
};

inline constexpr int kMaxITTMStates = 4096;

// Three-tape ITTM with ordinary states 0..n-1 (start 0) plus the reserved
// Limit and Halt states. Rows 0..n-1 belong to the ordinary states and row n
// to Limit; each row has 8 entries indexed by the read triple.
class ITTMachine {
 public:
  // Throws std::invalid_argument on a wrong table size or a target that is
  // neither an ordinary state nor kHalt (in particular kLimit).
  ITTMachine(int n_states, std::vector<ITTMTransition> table);

  int n_states() const { return n_states_; }
  static int Row(int state, int n_states) { return state == kLimit ? n_states : state; }
  const ITTMTransition& At(int state, Triple read) const {
    return table_[static_cast<size_t>(8 * Row(state, n_states_) + read)];
  }
  const std::vector<ITTMTransition>& table() const { return table_; }

  // Compact form: one '_'-separated row per state, Limit row last; each entry
  // is "<in><out><scr><L|R><A..|Z>". Encode throws std::length_error above
  // 25 states; use the text format for larger machines.
  std::string Encode() const;
  static ITTMachine Decode(std::string_view text);

  friend bool operator==(const ITTMachine&, const ITTMachine&) = default;

 private:
  int n_states_;
  std::vector<ITTMTransition> table_;
};

// omega*limits + steps.
struct OrdinalStage {
  uint64_t limits = 0;
  uint64_t steps = 0;

  bool IsLimit() const { return steps == 0 && limits > 0; }
  // ASCII form "w*b+c".
  std::string ToString() const;

  friend bool operator==(const OrdinalStage&, const OrdinalStage&) = default;
  friend auto operator<=>(const OrdinalStage&, const OrdinalStage&) = default;
};

struct Snapshot {
  EPTape input, output, scratch;
  uint64_t head = 0;
  int state = 0;  // ordinary, kLimit or kHalt
  OrdinalStage stage;

  const EPTape& tape(TapeId id) const;
  EPTape& tape(TapeId id);
  Triple Read() const;

  // Equality of everything except the stage.
  bool SameConfiguration(const Snapshot& other) const {
    return head == other.head && state == other.state && input == other.input &&
           output == other.output && scratch == other.scratch;
  }
  uint64_t Digest() const;
  std::string StateName() const;
};

// Stage 0, state 0, head 0, blank output and scratch.
Snapshot InitialSnapshot(const EPTape& input = EPTape());

// 1^n 0^omega.
EPTape EncodeUnary(uint64_t n);
// n if the tape is 1^n 0^omega, nullopt otherwise.
std::optional<uint64_t> DecodeUnary(const EPTape& tape);

// One successor step. The result has state kHalt when the step halts.
// Moving Left at cell 0 leaves the head at 0.
Snapshot SuccessorStep(const ITTMachine& m, const Snapshot& s);

// Eventual behaviour of one cell below a limit stage.
enum class CellBehavior : uint8_t { kConstant0, kConstant1, kAlternates };

// Per-cell behaviours of one tape, eventually periodic in the cell index.
struct CellHistory {
  std::vector<CellBehavior> prefix;
  std::vector<CellBehavior> period;

  static CellHistory Constant(const EPTape& tape);
};

// Snapshot at the limit stage omega*(completed_limits+1): cells per `rule`,
// head 0, state Limit. Throws std::invalid_argument when a history has an
// empty period (not eventually periodic, hence not representable).
Snapshot LimitSnapshot(const CellHistory& input, const CellHistory& output,
                       const CellHistory& scratch, LimitRule rule, uint64_t completed_limits);

}  // namespace ittmbb

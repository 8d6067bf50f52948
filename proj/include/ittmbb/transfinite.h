#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "ittmbb/ittm.h"

namespace ittmbb {

enum class Detection { kCycleOnly, kCycleAndDrift };

struct ExecBudget {
  uint64_t max_block_steps = 10000;  // successor steps explored per omega-block
  uint64_t max_limit_stages = 8;     // largest b of a computed limit stage omega*b
  Detection detection = Detection::kCycleAndDrift;

  // Throws std::invalid_argument on a zero budget.
  void Validate() const;
  friend bool operator==(const ExecBudget&, const ExecBudget&) = default;
};

// config(t0 + period) == config(t0) within one block (stage excluded).
struct CycleReport {
  uint64_t t0 = 0;
  uint64_t period = 0;
  friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

// config(t0 + period) restricted to cells >= low + shift equals config(t0)
// restricted to cells >= low, shifted right by `shift`, with the same state;
// `low` is the leftmost head position during the period and no Left move at
// cell 0 occurs in it. Every later period repeats the same translation, so
// the head escapes to infinity and every cell is eventually constant.
struct DriftReport {
  uint64_t t0 = 0;
  uint64_t period = 0;
  uint64_t shift = 0;
  uint64_t low = 0;
  friend bool operator==(const DriftReport&, const DriftReport&) = default;
};

using PatternReport = std::variant<CycleReport, DriftReport>;

// Minimal (t0 + period, period) exact repeat among the first max_steps
// successor steps from `start`; nullopt if none, including when the machine
// halts first.
std::optional<CycleReport> DetectCycle(const ITTMachine& m, const Snapshot& start, uint64_t max_steps);
// Minimal (t0 + period, period, shift) drift within max_steps.
std::optional<DriftReport> DetectDrift(const ITTMachine& m, const Snapshot& start, uint64_t max_steps);

// The snapshot at the limit of the block that starts at `start`, given a
// pattern of that block. Re-verifies the report by simulation and throws
// std::invalid_argument if it does not hold.
Snapshot OmegaLimit(const ITTMachine& m, const Snapshot& start, const PatternReport& report,
                    LimitRule rule);

enum class UndeterminedReason {
  kBlockBudget,     // block steps exhausted with drift detection disabled
  kLimitBudget,     // a further limit stage would exceed max_limit_stages
  kNoPatternFound,  // block steps exhausted with full detection
};
std::string_view ReasonName(UndeterminedReason reason);

struct Halted {
  OrdinalStage stage;
  Snapshot final;
  uint64_t trace_digest = 0;
};

struct NonHaltingCertified {
  OrdinalStage first, second;  // two limit stages with equal snapshots
  Snapshot witness;
};

struct Undetermined {
  UndeterminedReason reason;
  OrdinalStage stage;  // where the executor gave up
};

struct RunOutcome {
  std::variant<Halted, NonHaltingCertified, Undetermined> result;

  bool halted() const { return std::holds_alternative<Halted>(result); }
  bool certified() const { return std::holds_alternative<NonHaltingCertified>(result); }
  bool undetermined() const { return std::holds_alternative<Undetermined>(result); }
  std::string Describe() const;
};

struct TraceEvent {
  enum class Kind { kStep, kCycle, kDrift, kLimit, kHalt, kCertificate, kUndetermined };
  Kind kind;
  OrdinalStage stage;
  int state = 0;
  uint64_t head = 0;
  Triple read = 0;
  uint64_t t0 = 0, period = 0, shift = 0;
  OrdinalStage other;  // first witness stage for certificates
  std::string detail;  // tapes for limits, reason for undetermined

  // One JSON object, no trailing newline.
  std::string ToJsonLine() const;
};

struct TraceOptions {
  std::function<void(const TraceEvent&)> sink;
  bool steps = false;  // also emit one event per successor step
};

RunOutcome RunTransfinite(const ITTMachine& m, const EPTape& input, const ExecBudget& budget,
                          LimitRule rule = LimitRule::kLimsup, const TraceOptions* trace = nullptr);

// Runs until `stage` and returns the snapshot there, or nullopt if the run
// halts, certifies, or gives up earlier.
std::optional<Snapshot> SnapshotAtStage(const ITTMachine& m, const EPTape& input,
                                        const ExecBudget& budget, LimitRule rule,
                                        const OrdinalStage& stage);

// Execution over a table that may hold kUndefined targets, for lazy
// enumeration. Stops when an undefined entry would be used.
struct ReachedUndefined {
  int state;
  Triple read;
  Snapshot at;  // configuration about to use the entry
};
using PartialOutcome = std::variant<RunOutcome, ReachedUndefined>;

PartialOutcome RunTransfinitePartial(int n_states, std::span<const ITTMTransition> table,
                                     const EPTape& input, const ExecBudget& budget, LimitRule rule);

struct FStarValue {
  enum class Kind { kValue, kUndefined, kUndetermined };
  Kind kind;
  uint64_t value = 0;
  RunOutcome outcome;
};

// The unary partial function of m at n: run on input 1^n 0^omega.
FStarValue FStar(const ITTMachine& m, uint64_t n, const ExecBudget& budget,
                 LimitRule rule = LimitRule::kLimsup);

// Replays `steps` successor steps from the snapshots at both witness stages
// (recomputed from scratch) and checks they agree at every step.
bool AuditCertificate(const ITTMachine& m, const EPTape& input, const ExecBudget& budget,
                      LimitRule rule, const NonHaltingCertified& cert, uint64_t steps);

}  // namespace ittmbb

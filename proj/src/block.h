#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ittmbb/ittm.h"
#include "ittmbb/transfinite.h"

namespace ittmbb::internal {

// Successor-step evolution of one omega-block with enough history to detect
// cycles and drifts and to evaluate the limit exactly. Time t is the
// configuration after t steps from the block start.
class BlockExplorer {
 public:
  enum class Event { kRunning, kHalted, kUndefined };

  BlockExplorer(int n_states, std::span<const ITTMTransition> table, const Snapshot& start);

  Event Step();
  uint64_t now() const { return state_.size() - 1; }
  int state() const { return state_.back(); }
  uint64_t head() const { return head_.back(); }
  Triple Read() const { return Cell(head_.back()); }

  std::optional<CycleReport> CycleEndingNow();
  std::optional<DriftReport> DriftEndingNow() const;

  bool CycleHolds(const CycleReport& r) const;
  bool DriftHolds(const DriftReport& r) const;

  Snapshot SnapshotAt(uint64_t t) const;
  // Throws std::invalid_argument if the report does not hold.
  Snapshot Limit(const PatternReport& report, LimitRule rule) const;

 private:
  Triple Cell(uint64_t cell) const {
    return cell < cells_.size() ? cells_[cell] : BaseCell(cell);
  }
  Triple BaseCell(uint64_t cell) const;
  Triple CellAt(uint64_t t, uint64_t cell) const;
  void Materialize(uint64_t cell);
  bool DriftEquation(uint64_t t0, uint64_t t1, uint64_t shift, uint64_t low) const;
  uint64_t ConfigKey() const;

  int n_states_;
  std::span<const ITTMTransition> table_;
  Snapshot base_;
  std::vector<Triple> cells_;    // current contents of cells [0, size)
  std::vector<Triple> initial_;  // block-start contents of the same cells
  // (time, value) writes per cell, increasing time.
  std::vector<std::vector<std::pair<uint64_t, Triple>>> writes_;
  std::vector<int> state_;
  std::vector<uint64_t> head_;
  std::vector<Triple> read_;
  // Steps s whose move was Left at cell 0.
  std::vector<uint64_t> clamps_;
  uint64_t diff_hash_ = 0;
  std::unordered_map<uint64_t, std::vector<uint64_t>> seen_;
};

}  // namespace ittmbb::internal

#include "block.h"

#include <algorithm>
#include <stdexcept>

namespace ittmbb::internal {

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Zobrist(uint64_t cell, Triple value) { return SplitMix(cell * 8 + value); }

CellBehavior Behaviour(bool saw0, bool saw1) {
  if (saw0 && saw1) return CellBehavior::kAlternates;
  return saw1 ? CellBehavior::kConstant1 : CellBehavior::kConstant0;
}

void AppendConstant(CellHistory& h, const EPTape& tail) {
  auto c = CellHistory::Constant(tail);
  h.prefix.insert(h.prefix.end(), c.prefix.begin(), c.prefix.end());
  h.period = std::move(c.period);
}

}  // namespace

BlockExplorer::BlockExplorer(int n_states, std::span<const ITTMTransition> table,
                             const Snapshot& start)
    : n_states_(n_states), table_(table), base_(start) {
  if (start.state == kHalt) throw std::invalid_argument("block cannot start from a halted snapshot");
  Materialize(start.head);
  state_.push_back(start.state);
  head_.push_back(start.head);
  read_.push_back(cells_[start.head]);
  seen_[ConfigKey()].push_back(0);
}

Triple BlockExplorer::BaseCell(uint64_t cell) const {
  return MakeTriple(base_.input.At(cell), base_.output.At(cell), base_.scratch.At(cell));
}

void BlockExplorer::Materialize(uint64_t cell) {
  while (cells_.size() <= cell) {
    const Triple v = BaseCell(cells_.size());
    cells_.push_back(v);
    initial_.push_back(v);
    writes_.emplace_back();
  }
}

Triple BlockExplorer::CellAt(uint64_t t, uint64_t cell) const {
  if (cell >= cells_.size()) return BaseCell(cell);
  if (t == now()) return cells_[cell];
  const auto& w = writes_[cell];
  auto it = std::upper_bound(w.begin(), w.end(), t,
                             [](uint64_t time, const auto& e) { return time < e.first; });
  return it == w.begin() ? initial_[cell] : std::prev(it)->second;
}

BlockExplorer::Event BlockExplorer::Step() {
  const uint64_t t = now();
  const int s = state_.back();
  const uint64_t h = head_.back();
  const Triple read = cells_[h];
  const auto& tr = table_[static_cast<size_t>(8 * ITTMachine::Row(s, n_states_) + read)];
  if (tr.next == kUndefined) return Event::kUndefined;
  if (tr.write != read) {
    writes_[h].emplace_back(t + 1, tr.write);
    diff_hash_ ^= Zobrist(h, read) ^ Zobrist(h, tr.write);
    cells_[h] = tr.write;
  }
  uint64_t next_head = h;
  if (tr.move == Move::kRight) {
    next_head = h + 1;
    Materialize(next_head);
  } else if (h == 0) {
    clamps_.push_back(t);
  } else {
    next_head = h - 1;
  }
  state_.push_back(tr.next);
  head_.push_back(next_head);
  read_.push_back(cells_[next_head]);
  return tr.next == kHalt ? Event::kHalted : Event::kRunning;
}

uint64_t BlockExplorer::ConfigKey() const {
  return SplitMix(diff_hash_ ^ SplitMix(head_.back() * 64 + static_cast<uint64_t>(state_.back() + 8)));
}

std::optional<CycleReport> BlockExplorer::CycleEndingNow() {
  auto& bucket = seen_[ConfigKey()];
  for (auto it = bucket.rbegin(); it != bucket.rend(); ++it) {
    const CycleReport r{*it, now() - *it};
    if (CycleHolds(r)) return r;
  }
  bucket.push_back(now());
  return std::nullopt;
}

bool BlockExplorer::CycleHolds(const CycleReport& r) const {
  const uint64_t t1 = r.t0 + r.period;
  if (r.period == 0 || t1 > now()) return false;
  if (state_[r.t0] != state_[t1] || head_[r.t0] != head_[t1]) return false;
  for (uint64_t c = 0; c < cells_.size(); ++c) {
    if (CellAt(r.t0, c) != CellAt(t1, c)) return false;
  }
  return true;
}

bool BlockExplorer::DriftEquation(uint64_t t0, uint64_t t1, uint64_t shift, uint64_t low) const {
  const uint64_t size = cells_.size();
  // Cells near the head first; mismatches tend to be there.
  for (uint64_t c = head_[t0]; c < size; ++c) {
    if (CellAt(t0, c) != CellAt(t1, c + shift)) return false;
  }
  for (uint64_t c = low; c < head_[t0]; ++c) {
    if (CellAt(t0, c) != CellAt(t1, c + shift)) return false;
  }
  for (TapeId id : {TapeId::kInput, TapeId::kOutput, TapeId::kScratch}) {
    const EPTape& tape = base_.tape(id);
    if (tape.period().size() == 1 && size >= tape.prefix().size()) continue;
    if (tape.Drop(size) != tape.Drop(size + shift)) return false;
  }
  return true;
}

std::optional<DriftReport> BlockExplorer::DriftEndingNow() const {
  const uint64_t t1 = now();
  if (t1 == 0 || state_[t1] == kHalt) return std::nullopt;
  const uint64_t lower = clamps_.empty() ? 0 : clamps_.back() + 1;
  const uint64_t h1 = head_[t1];
  const int s1 = state_[t1];
  const Triple r1 = read_[t1];
  uint64_t low = h1;
  for (uint64_t t0 = t1; t0-- > lower;) {
    low = std::min(low, head_[t0]);
    if (state_[t0] != s1 || head_[t0] >= h1 || read_[t0] != r1) continue;
    const uint64_t shift = h1 - head_[t0];
    if (DriftEquation(t0, t1, shift, low)) return DriftReport{t0, t1 - t0, shift, low};
  }
  return std::nullopt;
}

bool BlockExplorer::DriftHolds(const DriftReport& r) const {
  const uint64_t t1 = r.t0 + r.period;
  if (r.period == 0 || r.shift == 0 || t1 > now()) return false;
  if (state_[r.t0] != state_[t1] || state_[t1] == kHalt) return false;
  if (head_[t1] != head_[r.t0] + r.shift) return false;
  uint64_t low = head_[t1];
  for (uint64_t t = r.t0; t < t1; ++t) low = std::min(low, head_[t]);
  if (low != r.low) return false;
  for (uint64_t s : clamps_) {
    if (s >= r.t0 && s < t1) return false;
  }
  return DriftEquation(r.t0, t1, r.shift, r.low);
}

Snapshot BlockExplorer::SnapshotAt(uint64_t t) const {
  Snapshot s;
  const uint64_t size = cells_.size();
  for (TapeId id : {TapeId::kInput, TapeId::kOutput, TapeId::kScratch}) {
    Bits bits(size);
    for (uint64_t c = 0; c < size; ++c) bits[c] = TripleBit(CellAt(t, c), id);
    s.tape(id) = base_.tape(id).Drop(size).PrependedBy(bits);
  }
  s.head = head_[t];
  s.state = state_[t];
  s.stage = {base_.stage.limits, base_.stage.steps + t};
  return s;
}

Snapshot BlockExplorer::Limit(const PatternReport& report, LimitRule rule) const {
  CellHistory hist[3];
  const uint64_t size = cells_.size();
  if (const auto* cyc = std::get_if<CycleReport>(&report)) {
    if (!CycleHolds(*cyc)) throw std::invalid_argument("cycle report does not hold");
    const uint64_t t_end = cyc->t0 + cyc->period;
    for (uint64_t c = 0; c < size; ++c) {
      bool saw[3][2] = {};
      auto note = [&](Triple v) {
        for (int k = 0; k < 3; ++k) saw[k][TripleBit(v, static_cast<TapeId>(k))] = true;
      };
      note(CellAt(cyc->t0, c));
      const auto& w = writes_[c];
      auto it = std::upper_bound(w.begin(), w.end(), cyc->t0,
                                 [](uint64_t time, const auto& e) { return time < e.first; });
      for (; it != w.end() && it->first < t_end; ++it) note(it->second);
      for (int k = 0; k < 3; ++k) hist[k].prefix.push_back(Behaviour(saw[k][0], saw[k][1]));
    }
    for (int k = 0; k < 3; ++k) AppendConstant(hist[k], base_.tape(static_cast<TapeId>(k)).Drop(size));
  } else {
    const auto& dr = std::get<DriftReport>(report);
    if (!DriftHolds(dr)) throw std::invalid_argument("drift report does not hold");
    const uint64_t t1 = dr.t0 + dr.period;
    for (int k = 0; k < 3; ++k) {
      const auto id = static_cast<TapeId>(k);
      Bits prefix, period;
      for (uint64_t c = 0; c < dr.low; ++c) prefix.push_back(TripleBit(CellAt(dr.t0, c), id));
      for (uint64_t c = dr.low; c < dr.low + dr.shift; ++c) {
        period.push_back(TripleBit(CellAt(t1, c), id));
      }
      hist[k] = CellHistory::Constant(EPTape(std::move(prefix), std::move(period)));
    }
  }
  return LimitSnapshot(hist[0], hist[1], hist[2], rule, base_.stage.limits);
}

}  // namespace ittmbb::internal

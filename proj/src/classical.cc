#include "ittmbb/classical.h"

#include <algorithm>
#include <stdexcept>

#include "ittmbb/digest.h"

namespace ittmbb {

ClassicalMachine::ClassicalMachine(int n_states, std::vector<ClassicalTransition> table)
    : n_states_(n_states), table_(std::move(table)) {
  if (n_states < 1 || n_states > 25) throw std::invalid_argument("state count must be in 1..25");
  if (table_.size() != static_cast<size_t>(2 * n_states)) {
    throw std::invalid_argument("transition table must have 2*n_states entries");
  }
  for (const auto& t : table_) {
    if (t.write > 1) throw std::invalid_argument("written symbol must be 0 or 1");
    if (t.next != kHalt && (t.next < 0 || t.next >= n_states)) {
      throw std::invalid_argument("transition target out of range");
    }
  }
}

std::string ClassicalMachine::Encode() const {
  std::string s;
  for (int q = 0; q < n_states_; ++q) {
    if (q > 0) s.push_back('_');
    for (uint8_t b = 0; b < 2; ++b) {
      const auto& t = At(q, b);
      s.push_back(static_cast<char>('0' + t.write));
      s.push_back(MoveChar(t.move));
      s.push_back(t.next == kHalt ? 'Z' : static_cast<char>('A' + t.next));
    }
  }
  return s;
}

ClassicalMachine ClassicalMachine::Decode(std::string_view text) {
  if ((text.size() + 1) % 7 != 0) throw std::invalid_argument("bad machine encoding length");
  const int n = static_cast<int>((text.size() + 1) / 7);
  std::vector<ClassicalTransition> table;
  for (int q = 0; q < n; ++q) {
    const auto row = text.substr(static_cast<size_t>(7 * q), 6);
    if (q + 1 < n && text[static_cast<size_t>(7 * q + 6)] != '_') {
      throw std::invalid_argument("expected '_' between states");
    }
    for (int b = 0; b < 2; ++b) {
      const char w = row[static_cast<size_t>(3 * b)], d = row[static_cast<size_t>(3 * b + 1)],
                 s = row[static_cast<size_t>(3 * b + 2)];
      if ((w != '0' && w != '1') || (d != 'L' && d != 'R')) {
        throw std::invalid_argument("bad transition in encoding");
      }
      int next = kHalt;
      if (s != 'Z') {
        if (s < 'A' || s >= 'A' + n) throw std::invalid_argument("bad state letter in encoding");
        next = s - 'A';
      }
      table.push_back({static_cast<uint8_t>(w - '0'), d == 'L' ? Move::kLeft : Move::kRight, next});
    }
  }
  return ClassicalMachine(n, std::move(table));
}

ClassicalMachine ClassicalMachine::Mirrored() const {
  auto table = table_;
  for (auto& t : table) t.move = Flip(t.move);
  return ClassicalMachine(n_states_, std::move(table));
}

FiniteTapeWindow FiniteTapeWindow::FromBits(const Bits& bits, int64_t origin, int64_t head) {
  if (bits.empty()) return FromBits(bits, origin, head, 1, 0);
  return FromBits(bits, origin, head, origin, origin + static_cast<int64_t>(bits.size()) - 1);
}

FiniteTapeWindow FiniteTapeWindow::FromBits(const Bits& bits, int64_t origin, int64_t head,
                                            int64_t written_lo, int64_t written_hi) {
  FiniteTapeWindow w;
  w.cells_ = bits.empty() ? Bits{0} : bits;
  for (uint8_t b : w.cells_) {
    if (b > 1) throw std::invalid_argument("tape cell value must be 0 or 1");
  }
  w.origin_ = origin;
  w.head_ = origin;
  while (w.head_ < head) w.Shift(Move::kRight);
  while (w.head_ > head) w.Shift(Move::kLeft);
  w.written_lo_ = written_lo;
  w.written_hi_ = written_hi;
  return w;
}

void FiniteTapeWindow::Write(uint8_t bit) {
  cells_[static_cast<size_t>(head_ - origin_)] = bit;
  written_lo_ = written() ? std::min(written_lo_, head_) : head_;
  written_hi_ = std::max(written_hi_, head_);
}

void FiniteTapeWindow::Shift(Move m) {
  if (m == Move::kLeft) {
    --head_;
    if (head_ < origin_) {
      cells_.insert(cells_.begin(), 0);
      --origin_;
    }
  } else {
    ++head_;
    if (head_ > rightmost()) cells_.push_back(0);
  }
}

uint64_t FiniteTapeWindow::CountOnes() const {
  return static_cast<uint64_t>(std::count(cells_.begin(), cells_.end(), uint8_t{1}));
}

FiniteTapeWindow FiniteTapeWindow::Mirrored() const {
  FiniteTapeWindow w;
  w.cells_.assign(cells_.rbegin(), cells_.rend());
  w.origin_ = -rightmost();
  w.head_ = -head_;
  if (written()) {
    w.written_lo_ = -written_hi_;
    w.written_hi_ = -written_lo_;
  }
  return w;
}

uint64_t FiniteTapeWindow::Fingerprint() const {
  // Trimmed to the ones so that window geometry does not matter.
  std::string s;
  int64_t first = 1, last = 0;
  for (int64_t c = leftmost(); c <= rightmost(); ++c) {
    if (At(c)) {
      if (first > last) first = c;
      last = c;
    }
  }
  s = std::to_string(first > last ? 0 : first) + ":";
  for (int64_t c = first; c <= last; ++c) s.push_back(static_cast<char>('0' + At(c)));
  return Fnv1a64(s);
}

bool FiniteTapeWindow::SameContents(const FiniteTapeWindow& other) const {
  const int64_t lo = std::min(leftmost(), other.leftmost());
  const int64_t hi = std::max(rightmost(), other.rightmost());
  for (int64_t c = lo; c <= hi; ++c) {
    if (At(c) != other.At(c)) return false;
  }
  return true;
}

ClassicalConfig StepClassical(const ClassicalMachine& m, ClassicalConfig cfg) {
  const auto& t = m.At(cfg.state, cfg.tape.Read());
  cfg.tape.Write(t.write);
  cfg.tape.Shift(t.move);
  cfg.state = t.next;
  ++cfg.steps;
  return cfg;
}

ClassicalRun RunClassical(const ClassicalMachine& m, uint64_t step_budget) {
  if (step_budget < 1) throw std::invalid_argument("step budget must be >= 1");
  ClassicalSimulator sim(m.n_states(), m.table().data());
  while (sim.steps() < step_budget) {
    if (sim.Step() == ClassicalSimulator::Event::kHalted) {
      return {ClassicalRun::Status::kHalted, {sim.Window(), kHalt, sim.steps()}};
    }
  }
  return {ClassicalRun::Status::kOutOfBudget, {sim.Window(), sim.state(), sim.steps()}};
}

uint64_t ScoreRado(const FiniteTapeWindow& tape) { return tape.CountOnes(); }

std::optional<uint64_t> CleanScore(const FiniteTapeWindow& tape) {
  const uint64_t ones = tape.CountOnes();
  if (ones == 0) return 0;
  if (!tape.written()) return std::nullopt;
  for (uint64_t i = 0; i < ones; ++i) {
    if (tape.At(tape.written_lo() + static_cast<int64_t>(i)) != 1) return std::nullopt;
  }
  return ones;
}

ClassicalSimulator::ClassicalSimulator(int n_states, const ClassicalTransition* table,
                                       size_t initial_width)
    : n_states_(n_states), table_(table), tape_(std::max<size_t>(initial_width, 4), 0) {
  Reset();
}

void ClassicalSimulator::Reset() {
  std::fill(tape_.begin(), tape_.end(), 0);
  zero_ = static_cast<int64_t>(tape_.size() / 2);
  head_ = lo_ = hi_ = zero_;
  wlo_ = 1;
  whi_ = 0;
  state_ = 0;
  steps_ = 0;
  record_ = 0;
}

void ClassicalSimulator::Grow() {
  const int64_t old = static_cast<int64_t>(tape_.size());
  Bits bigger(tape_.size() * 2, 0);
  const int64_t shift = old / 2;
  std::copy(tape_.begin(), tape_.end(), bigger.begin() + shift);
  tape_.swap(bigger);
  zero_ += shift;
  head_ += shift;
  lo_ += shift;
  hi_ += shift;
  wlo_ += shift;
  whi_ += shift;
}

ClassicalSimulator::Event ClassicalSimulator::Step() {
  const auto& t = table_[2 * state_ + tape_[static_cast<size_t>(head_)]];
  if (t.next == kUndefined) return Event::kUndefined;
  tape_[static_cast<size_t>(head_)] = t.write;
  if (wlo_ > whi_) {
    wlo_ = whi_ = head_;
  } else {
    wlo_ = std::min(wlo_, head_);
    whi_ = std::max(whi_, head_);
  }
  record_ = 0;
  if (t.move == Move::kLeft) {
    if (head_ == 0) Grow();
    --head_;
    if (head_ < lo_) {
      lo_ = head_;
      record_ = -1;
    }
  } else {
    if (head_ + 1 == static_cast<int64_t>(tape_.size())) Grow();
    ++head_;
    if (head_ > hi_) {
      hi_ = head_;
      record_ = 1;
    }
  }
  state_ = t.next;
  ++steps_;
  return state_ == kHalt ? Event::kHalted : Event::kRunning;
}

FiniteTapeWindow ClassicalSimulator::Window() const {
  Bits bits(tape_.begin() + lo_, tape_.begin() + hi_ + 1);
  return FiniteTapeWindow::FromBits(bits, lo_ - zero_, head_ - zero_, wlo_ - zero_, whi_ - zero_);
}

}  // namespace ittmbb

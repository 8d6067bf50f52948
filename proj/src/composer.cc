#include "ittmbb/composer.h"

#include <limits>
#include <stdexcept>

namespace ittmbb {

namespace {

constexpr TapeId kTapes[] = {TapeId::kInput, TapeId::kOutput, TapeId::kScratch};

// A one-state fragment whose action depends only on the bit of `tape`; the
// `write` fields hold that bit.
MachineFragment OneState(TapeId tape, FragmentTransition on0, FragmentTransition on1) {
  std::vector<FragmentTransition> table(8);
  for (Triple x = 0; x < 8; ++x) {
    const auto& t = TripleBit(x, tape) ? on1 : on0;
    table[x] = {WithTripleBit(x, tape, t.write), t.move, t.next};
  }
  return MachineFragment(std::move(table));
}

using Local = FragmentTarget;

// Builds a one-tape machine on the input tape from per-state (on0, on1)
// actions; the Limit row halts.
OneTapeITTM InputMachine(const std::vector<std::pair<OneTapeITTM::Action, OneTapeITTM::Action>>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<ITTMTransition> table;
  for (int s = 0; s <= n; ++s) {
    for (Triple x = 0; x < 8; ++x) {
      if (s == n) {
        table.push_back({x, Move::kRight, kHalt});
        continue;
      }
      const auto& a = TripleBit(x, TapeId::kInput) ? rows[static_cast<size_t>(s)].second
                                                   : rows[static_cast<size_t>(s)].first;
      table.push_back({WithTripleBit(x, TapeId::kInput, a.write), a.move, a.next});
    }
  }
  return OneTapeITTM(ITTMachine(n, std::move(table)), TapeId::kInput);
}

}  // namespace

MachineFragment::MachineFragment(std::vector<FragmentTransition> table) : table_(std::move(table)) {
  if (table_.size() % 8 != 0) throw std::invalid_argument("fragment table must have 8 entries per state");
  const int n = n_states();
  for (const auto& t : table_) {
    if (t.write > 7) throw std::invalid_argument("written triple out of range");
    if (t.next.kind == FragmentTarget::Kind::kLocal && (t.next.state < 0 || t.next.state >= n)) {
      throw std::invalid_argument("fragment target out of range");
    }
  }
}

MachineFragment MachineFragment::Then(const MachineFragment& next) const {
  if (next.empty()) return *this;
  if (empty()) return next;
  const int offset = n_states();
  std::vector<FragmentTransition> table = table_;
  for (auto& t : table) {
    if (t.next.kind == FragmentTarget::Kind::kExit) t.next = Local::Local(offset);
  }
  for (auto t : next.table_) {
    if (t.next.kind == FragmentTarget::Kind::kLocal) t.next.state += offset;
    table.push_back(t);
  }
  return MachineFragment(std::move(table));
}

ITTMachine CloseFragment(const MachineFragment& body) {
  if (body.empty()) throw std::invalid_argument("cannot close an empty fragment");
  const int n = body.n_states();
  const int trap = n;
  std::vector<ITTMTransition> table;
  table.reserve(static_cast<size_t>(8 * (n + 2)));
  for (const auto& t : body.table()) {
    table.push_back({t.write, t.move, t.next.kind == FragmentTarget::Kind::kExit ? kHalt : t.next.state});
  }
  for (int row = 0; row < 2; ++row) {
    for (Triple x = 0; x < 8; ++x) table.push_back({x, Move::kRight, trap});
  }
  return ITTMachine(n + 1, std::move(table));
}

OneTapeITTM::OneTapeITTM(ITTMachine m, TapeId tape) : m_(std::move(m)), tape_(tape) {
  if (!IsOneTape(m_, tape_)) throw std::invalid_argument("machine is not one-tape on the designated tape");
}

bool OneTapeITTM::IsOneTape(const ITTMachine& m, TapeId tape) {
  for (int row = 0; row <= m.n_states(); ++row) {
    const int state = row == m.n_states() ? kLimit : row;
    for (Triple x = 0; x < 8; ++x) {
      const auto& t = m.At(state, x);
      for (TapeId other : kTapes) {
        if (other != tape && TripleBit(t.write, other) != TripleBit(x, other)) return false;
      }
      const auto& base = m.At(state, WithTripleBit(0, tape, TripleBit(x, tape)));
      if (TripleBit(t.write, tape) != TripleBit(base.write, tape) || t.move != base.move || t.next != base.next) {
        return false;
      }
    }
  }
  return true;
}

OneTapeITTM::Action OneTapeITTM::At(int state, uint8_t bit) const {
  const auto& t = m_.At(state, WithTripleBit(0, tape_, bit));
  return {TripleBit(t.write, tape_), t.move, t.next};
}

uint64_t ReferenceF(const std::function<uint64_t(uint64_t)>& fstar, uint64_t x) {
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  uint64_t sum = 0;
  for (uint64_t i = 0; i <= x; ++i) {
    const uint64_t v = fstar(i);
    if (v > kMax - i) throw std::overflow_error("F overflows 64 bits");
    const uint64_t base = v + i;
    if (base != 0 && base > kMax / base) throw std::overflow_error("F overflows 64 bits");
    if (sum > kMax - base * base) throw std::overflow_error("F overflows 64 bits");
    sum += base * base;
  }
  return sum;
}

MachineFragment WriteOnesGadget(uint64_t x) {
  if (x > static_cast<uint64_t>(kMaxITTMStates)) throw std::invalid_argument("too many ones for one machine");
  MachineFragment out;
  for (uint64_t i = 0; i < x; ++i) {
    out = out.Then(OneState(TapeId::kInput, {1, Move::kRight, Local::Exit()}, {1, Move::kRight, Local::Exit()}));
  }
  return out;
}

MachineFragment EmbedOnTape(const OneTapeITTM& m, TapeId tape) {
  std::vector<FragmentTransition> table;
  for (int s = 0; s < m.n_states(); ++s) {
    for (Triple x = 0; x < 8; ++x) {
      const auto a = m.At(s, TripleBit(x, tape));
      table.push_back({WithTripleBit(x, tape, a.write), a.move,
                       a.next == kHalt ? Local::Exit() : Local::Local(a.next)});
    }
  }
  return MachineFragment(std::move(table));
}

MachineFragment CopyGadget(TapeId src, TapeId dst) {
  if (src == dst) throw std::invalid_argument("copy needs distinct tapes");
  std::vector<FragmentTransition> table(8);
  for (Triple x = 0; x < 8; ++x) {
    const uint8_t b = TripleBit(x, src);
    table[x] = {WithTripleBit(x, dst, b), Move::kRight, b ? Local::Local(0) : Local::Exit()};
  }
  return MachineFragment(std::move(table));
}

MachineFragment MarkGadget(TapeId marker) {
  return OneState(marker, {1, Move::kLeft, Local::Exit()}, {1, Move::kLeft, Local::Exit()});
}

MachineFragment RewindGadget(TapeId marker) {
  return OneState(marker, {0, Move::kLeft, Local::Local(0)}, {1, Move::kLeft, Local::Exit()});
}

uint64_t Theorem1Overhead(uint64_t c) {
  // Two copies of m, plus the mark, four rewinds, two copies and the trap.
  return 2 * c + 8;
}

Theorem1Machine ComposeTheorem1(const OneTapeITTM& m, uint64_t x) {
  if (m.tape() != TapeId::kInput) throw std::invalid_argument("m must act on the input tape");
  const auto rewind = RewindGadget(TapeId::kOutput);
  const MachineFragment body = MarkGadget(TapeId::kOutput)
                                   .Then(WriteOnesGadget(x))
                                   .Then(rewind)
                                   .Then(EmbedOnTape(m, TapeId::kInput))
                                   .Then(rewind)
                                   .Then(CopyGadget(TapeId::kInput, TapeId::kScratch))
                                   .Then(rewind)
                                   .Then(EmbedOnTape(m, TapeId::kScratch))
                                   .Then(rewind)
                                   .Then(CopyGadget(TapeId::kScratch, TapeId::kOutput));
  Theorem1Machine out{CloseFragment(body), x, static_cast<uint64_t>(m.n_states()), 0, 0};
  out.h = Theorem1Overhead(out.c);
  out.s = x + out.h;
  if (static_cast<uint64_t>(out.machine.n_states()) != out.s) {
    throw std::logic_error("state accounting mismatch");
  }
  return out;
}

std::optional<uint64_t> DominanceWitness(const std::vector<uint64_t>& f, const std::vector<uint64_t>& g,
                                         uint64_t horizon) {
  if (f.size() < horizon || g.size() < horizon) throw std::invalid_argument("sequences shorter than horizon");
  uint64_t n = horizon;
  while (n > 0 && f[n - 1] > g[n - 1]) --n;
  if (n == horizon) return std::nullopt;
  return n;
}

OneTapeITTM UnarySuccessorMachine() {
  return InputMachine({{{1, Move::kRight, kHalt}, {1, Move::kRight, 0}}});
}

OneTapeITTM UnaryDoublingMachine() {
  // Keeps 1^a 0 1^b with a + b/2 = y: moves the last 1 of the left block
  // across the separator and appends one more 1 on the right. When the left
  // block is empty the separator sits at cell 0; filling it and erasing the
  // last 1 leaves 1^(2y).
  enum { A, B, C, D, G, E, H, I };
  const Move L = Move::kLeft, R = Move::kRight;
  return InputMachine({
      /* A */ {{0, L, B}, {1, R, A}},
      /* B */ {{0, L, E}, {0, R, C}},
      /* C */ {{1, R, D}, {1, R, D}},
      /* D */ {{1, L, G}, {1, R, D}},
      /* G */ {{0, L, B}, {1, L, G}},
      /* E */ {{1, R, H}, {1, R, H}},
      /* H */ {{0, L, I}, {1, R, H}},
      /* I */ {{0, R, kHalt}, {0, R, kHalt}},
  });
}

}  // namespace ittmbb

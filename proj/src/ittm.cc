#include "ittmbb/ittm.h"

#include <stdexcept>

#include "ittmbb/digest.h"

namespace ittmbb {

std::string TripleString(Triple t) {
  std::string s = "(0,0,0)";
  s[1] = static_cast<char>('0' + TripleBit(t, TapeId::kInput));
  s[3] = static_cast<char>('0' + TripleBit(t, TapeId::kOutput));
  s[5] = static_cast<char>('0' + TripleBit(t, TapeId::kScratch));
  return s;
}

std::string_view RuleName(LimitRule rule) {
  return rule == LimitRule::kLimsup ? "limsup" : "liminf";
}

LimitRule ParseRule(std::string_view name) {
  if (name == "limsup") return LimitRule::kLimsup;
  if (name == "liminf") return LimitRule::kLiminf;
  throw std::invalid_argument("unknown limit rule '" + std::string(name) + "'");
}

ITTMachine::ITTMachine(int n_states, std::vector<ITTMTransition> table)
    : n_states_(n_states), table_(std::move(table)) {
  if (n_states < 1 || n_states > kMaxITTMStates) {
    throw std::invalid_argument("state count must be in 1.." + std::to_string(kMaxITTMStates));
  }
  if (table_.size() != static_cast<size_t>(8 * (n_states + 1))) {
    throw std::invalid_argument("transition table must have 8*(n_states+1) entries");
  }
  for (const auto& t : table_) {
    if (t.write > 7) throw std::invalid_argument("written triple out of range");
    if (t.next == kLimit) throw std::invalid_argument("limit state not a valid target");
    if (t.next != kHalt && (t.next < 0 || t.next >= n_states)) {
      throw std::invalid_argument("transition target out of range");
    }
  }
}

std::string ITTMachine::Encode() const {
  if (n_states_ > 25) throw std::length_error("compact encoding supports at most 25 states");
  std::string s;
  s.reserve(static_cast<size_t>(41 * (n_states_ + 1)));
  for (int row = 0; row <= n_states_; ++row) {
    if (row > 0) s.push_back('_');
    for (Triple r = 0; r < 8; ++r) {
      const auto& t = table_[static_cast<size_t>(8 * row + r)];
      s.push_back(static_cast<char>('0' + TripleBit(t.write, TapeId::kInput)));
      s.push_back(static_cast<char>('0' + TripleBit(t.write, TapeId::kOutput)));
      s.push_back(static_cast<char>('0' + TripleBit(t.write, TapeId::kScratch)));
      s.push_back(MoveChar(t.move));
      s.push_back(t.next == kHalt ? 'Z' : static_cast<char>('A' + t.next));
    }
  }
  return s;
}

ITTMachine ITTMachine::Decode(std::string_view text) {
  constexpr size_t kRow = 40;
  if ((text.size() + 1) % (kRow + 1) != 0) throw std::invalid_argument("bad ITTM encoding length");
  const int rows = static_cast<int>((text.size() + 1) / (kRow + 1));
  if (rows < 2) throw std::invalid_argument("ITTM encoding needs a Limit row");
  const int n = rows - 1;
  std::vector<ITTMTransition> table;
  for (int row = 0; row < rows; ++row) {
    const auto r = text.substr(static_cast<size_t>(row) * (kRow + 1), kRow);
    if (row + 1 < rows && text[static_cast<size_t>(row) * (kRow + 1) + kRow] != '_') {
      throw std::invalid_argument("expected '_' between rows");
    }
    for (size_t e = 0; e < 8; ++e) {
      const auto f = r.substr(5 * e, 5);
      for (size_t i = 0; i < 3; ++i) {
        if (f[i] != '0' && f[i] != '1') throw std::invalid_argument("bad written triple");
      }
      if (f[3] != 'L' && f[3] != 'R') throw std::invalid_argument("bad move");
      int next = kHalt;
      if (f[4] != 'Z') {
        if (f[4] < 'A' || f[4] >= 'A' + n) throw std::invalid_argument("bad state letter");
        next = f[4] - 'A';
      }
      table.push_back({MakeTriple(static_cast<uint8_t>(f[0] - '0'), static_cast<uint8_t>(f[1] - '0'),
                                  static_cast<uint8_t>(f[2] - '0')),
                       f[3] == 'L' ? Move::kLeft : Move::kRight, next});
    }
  }
  return ITTMachine(n, std::move(table));
}

std::string OrdinalStage::ToString() const {
  return "w*" + std::to_string(limits) + "+" + std::to_string(steps);
}

const EPTape& Snapshot::tape(TapeId id) const {
  switch (id) {
    case TapeId::kInput: return input;
    case TapeId::kOutput: return output;
    case TapeId::kScratch: return scratch;
  }
  return scratch;
}

EPTape& Snapshot::tape(TapeId id) {
  return const_cast<EPTape&>(static_cast<const Snapshot&>(*this).tape(id));
}

Triple Snapshot::Read() const {
  return MakeTriple(input.At(head), output.At(head), scratch.At(head));
}

uint64_t Snapshot::Digest() const {
  return Fnv1a64(input.ToString() + "|" + output.ToString() + "|" + scratch.ToString() + "|" +
                 std::to_string(head) + "|" + std::to_string(state));
}

std::string Snapshot::StateName() const {
  if (state == kLimit) return "LIM";
  if (state == kHalt) return "HALT";
  return "S" + std::to_string(state);
}

Snapshot InitialSnapshot(const EPTape& input) {
  Snapshot s;
  s.input = input;
  return s;
}

EPTape EncodeUnary(uint64_t n) { return EPTape(Bits(n, 1), Bits{0}); }

std::optional<uint64_t> DecodeUnary(const EPTape& tape) {
  if (!tape.FinitelyManyOnes()) return std::nullopt;
  const auto& p = tape.prefix();
  // Canonical form ends in a 1 (or is empty), so 1^k 0^w has prefix 1^k.
  for (uint8_t b : p) {
    if (b != 1) return std::nullopt;
  }
  return p.size();
}

Snapshot SuccessorStep(const ITTMachine& m, const Snapshot& s) {
  if (s.state == kHalt) throw std::invalid_argument("successor step from a halted snapshot");
  const Triple read = s.Read();
  const auto& t = m.At(s.state, read);
  Snapshot out = s;
  for (TapeId id : {TapeId::kInput, TapeId::kOutput, TapeId::kScratch}) {
    out.tape(id) = out.tape(id).With(s.head, TripleBit(t.write, id));
  }
  if (t.move == Move::kRight) {
    ++out.head;
  } else if (out.head > 0) {
    --out.head;
  }
  out.state = t.next;
  ++out.stage.steps;
  return out;
}

CellHistory CellHistory::Constant(const EPTape& tape) {
  CellHistory h;
  for (uint8_t b : tape.prefix()) h.prefix.push_back(b ? CellBehavior::kConstant1 : CellBehavior::kConstant0);
  for (uint8_t b : tape.period()) h.period.push_back(b ? CellBehavior::kConstant1 : CellBehavior::kConstant0);
  return h;
}

namespace {

uint8_t LimitValue(CellBehavior c, LimitRule rule) {
  switch (c) {
    case CellBehavior::kConstant0: return 0;
    case CellBehavior::kConstant1: return 1;
    case CellBehavior::kAlternates: return rule == LimitRule::kLimsup ? 1 : 0;
  }
  return 0;
}

EPTape LimitTape(const CellHistory& h, LimitRule rule) {
  if (h.period.empty()) {
    throw std::invalid_argument("cell history is not eventually periodic in the cell index");
  }
  Bits prefix, period;
  for (auto c : h.prefix) prefix.push_back(LimitValue(c, rule));
  for (auto c : h.period) period.push_back(LimitValue(c, rule));
  return EPTape(std::move(prefix), std::move(period));
}

}  // namespace

Snapshot LimitSnapshot(const CellHistory& input, const CellHistory& output,
                       const CellHistory& scratch, LimitRule rule, uint64_t completed_limits) {
  Snapshot s;
  s.input = LimitTape(input, rule);
  s.output = LimitTape(output, rule);
  s.scratch = LimitTape(scratch, rule);
  s.head = 0;
  s.state = kLimit;
  s.stage = {completed_limits + 1, 0};
  return s;
}

}  // namespace ittmbb

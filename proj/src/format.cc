#include "ittmbb/format.h"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace ittmbb {

namespace {

std::string StateName(int s) {
  if (s == kHalt) return "HALT";
  if (s == kLimit) return "LIM";
  return "S" + std::to_string(s);
}

// Scanner over one line; columns are 1-based.
class Cursor {
 public:
  Cursor(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void Fail(const std::string& reason) const { throw ParseError(line_, column(), reason); }
  int column() const { return static_cast<int>(pos_) + 1; }

  void SkipSpace() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool AtEnd() {
    SkipSpace();
    return pos_ >= s_.size();
  }
  void ExpectEnd() {
    if (!AtEnd()) Fail("unexpected '" + std::string(s_.substr(pos_)) + "'");
  }

  // A run of non-space characters, stopping at '(' ',' ')'.
  std::string Word() {
    SkipSpace();
    const size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')' && s_[pos_] != ',') {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  void Expect(char c) {
    SkipSpace();
    if (pos_ >= s_.size() || s_[pos_] != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void ExpectWord(std::string_view w) {
    const int col = (SkipSpace(), column());
    if (Word() != w) throw ParseError(line_, col, "expected '" + std::string(w) + "'");
  }

  uint8_t Bit() {
    SkipSpace();
    if (pos_ >= s_.size() || (s_[pos_] != '0' && s_[pos_] != '1')) Fail("expected 0 or 1");
    return static_cast<uint8_t>(s_[pos_++] - '0');
  }

  Triple TripleValue() {
    Expect('(');
    const uint8_t a = Bit();
    Expect(',');
    const uint8_t b = Bit();
    Expect(',');
    const uint8_t c = Bit();
    Expect(')');
    return MakeTriple(a, b, c);
  }

  Move Direction() {
    const int col = (SkipSpace(), column());
    const std::string w = Word();
    if (w == "L") return Move::kLeft;
    if (w == "R") return Move::kRight;
    throw ParseError(line_, col, "expected direction L or R, got '" + w + "'");
  }

  // S<k> with k < n, or LIM / HALT where allowed.
  int State(int n, bool allow_limit, bool allow_halt) {
    const int col = (SkipSpace(), column());
    const std::string w = Word();
    auto fail = [&](const std::string& reason) { throw ParseError(line_, col, reason); };
    if (w == "HALT") {
      if (!allow_halt) fail("HALT is not a source state");
      return kHalt;
    }
    if (w == "LIM") {
      if (!allow_limit) fail(allow_halt ? "limit state not a valid target" : "LIM is not a classical state");
      return kLimit;
    }
    if (w.size() < 2 || w[0] != 'S' || (w.size() > 2 && w[1] == '0')) fail("bad state name '" + w + "'");
    int k = 0;
    for (size_t i = 1; i < w.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(w[i])) || k > 100000) fail("bad state name '" + w + "'");
      k = 10 * k + (w[i] - '0');
    }
    if (k >= n) fail("state " + w + " out of range for " + std::to_string(n) + " states");
    return k;
  }

  // key=value with a decimal or word value.
  std::string Field(std::string_view key) {
    const int col = (SkipSpace(), column());
    const std::string w = Word();
    if (w.rfind(std::string(key) + "=", 0) != 0) throw ParseError(line_, col, "expected " + std::string(key) + "=");
    return w.substr(key.size() + 1);
  }

  int Natural(const std::string& text, int col, int max) const {
    if (text.empty() || text.size() > 6) throw ParseError(line_, col, "expected a state count");
    int v = 0;
    for (char c : text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError(line_, col, "expected a state count");
      v = 10 * v + (c - '0');
    }
    if (v < 1 || v > max) throw ParseError(line_, col, "state count must be in 1.." + std::to_string(max));
    return v;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
  int line_;
};

struct Line {
  int number;
  std::string_view text;  // comment stripped
};

std::vector<Line> ContentLines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t") != std::string_view::npos) out.push_back({number, line});
    pos = end + 1;
  }
  return out;
}

std::string_view HeaderKind(const std::vector<Line>& lines) {
  if (lines.empty()) throw ParseError(1, 1, "empty document");
  Cursor c(lines[0].text, lines[0].number);
  const std::string kind = c.Word();
  if (kind != "classical" && kind != "ittm") {
    throw ParseError(lines[0].number, 1, "expected header 'classical' or 'ittm'");
  }
  return kind == "classical" ? "classical" : "ittm";
}

int LastLine(const std::vector<Line>& lines) { return lines.back().number + 1; }

ClassicalMachine ParseClassicalLines(const std::vector<Line>& lines) {
  Cursor h(lines[0].text, lines[0].number);
  h.ExpectWord("classical");
  const int col = (h.SkipSpace(), h.column());
  const int n = h.Natural(h.Field("states"), col, 1 << 16);
  h.ExpectEnd();
  std::vector<std::optional<ClassicalTransition>> table(static_cast<size_t>(2 * n));
  for (size_t i = 1; i < lines.size(); ++i) {
    Cursor c(lines[i].text, lines[i].number);
    const int src_col = (c.SkipSpace(), c.column());
    const int q = c.State(n, false, false);
    const uint8_t b = c.Bit();
    c.ExpectWord("->");
    const uint8_t w = c.Bit();
    const Move d = c.Direction();
    const int next = c.State(n, false, true);
    c.ExpectEnd();
    auto& slot = table[static_cast<size_t>(2 * q + b)];
    if (slot) {
      throw ParseError(lines[i].number, src_col, "duplicate transition (" + StateName(q) + "," + std::to_string(b) + ")");
    }
    slot = ClassicalTransition{w, d, next};
  }
  std::vector<ClassicalTransition> out;
  for (int q = 0; q < n; ++q) {
    for (uint8_t b = 0; b < 2; ++b) {
      const auto& slot = table[static_cast<size_t>(2 * q + b)];
      if (!slot) {
        throw ParseError(LastLine(lines), 1,
                         "missing transition (" + StateName(q) + "," + std::to_string(b) + ")");
      }
      out.push_back(*slot);
    }
  }
  return ClassicalMachine(n, std::move(out));
}

ITTMDocument ParseITTMLines(const std::vector<Line>& lines) {
  Cursor h(lines[0].text, lines[0].number);
  h.ExpectWord("ittm");
  int col = (h.SkipSpace(), h.column());
  const int n = h.Natural(h.Field("states"), col, kMaxITTMStates);
  col = (h.SkipSpace(), h.column());
  const std::string rule = h.Field("rule");
  if (rule != "limsup" && rule != "liminf") throw ParseError(lines[0].number, col, "rule must be limsup or liminf");
  h.ExpectEnd();
  std::vector<std::optional<ITTMTransition>> table(static_cast<size_t>(8 * (n + 1)));
  for (size_t i = 1; i < lines.size(); ++i) {
    Cursor c(lines[i].text, lines[i].number);
    const int src_col = (c.SkipSpace(), c.column());
    const int q = c.State(n, true, false);
    const Triple x = c.TripleValue();
    c.ExpectWord("->");
    const Triple w = c.TripleValue();
    const Move d = c.Direction();
    const int next = c.State(n, false, true);
    c.ExpectEnd();
    auto& slot = table[static_cast<size_t>(8 * ITTMachine::Row(q, n) + x)];
    if (slot) {
      throw ParseError(lines[i].number, src_col, "duplicate transition (" + StateName(q) + "," + TripleString(x) + ")");
    }
    slot = ITTMTransition{w, d, next};
  }
  std::vector<ITTMTransition> out;
  for (int row = 0; row <= n; ++row) {
    for (Triple x = 0; x < 8; ++x) {
      const auto& slot = table[static_cast<size_t>(8 * row + x)];
      if (!slot) {
        throw ParseError(LastLine(lines), 1,
                         "missing transition (" + StateName(row == n ? kLimit : row) + "," + TripleString(x) + ")");
      }
      out.push_back(*slot);
    }
  }
  return {ITTMachine(n, std::move(out)), ParseRule(rule)};
}

}  // namespace

std::string Serialize(const ClassicalMachine& m) {
  std::ostringstream out;
  out << "classical states=" << m.n_states() << "\n";
  for (int q = 0; q < m.n_states(); ++q) {
    for (uint8_t b = 0; b < 2; ++b) {
      const auto& t = m.At(q, b);
      out << StateName(q) << " " << int(b) << " -> " << int(t.write) << " " << MoveChar(t.move) << " "
          << StateName(t.next) << "\n";
    }
  }
  return out.str();
}

std::string Serialize(const ITTMachine& m, LimitRule rule) {
  std::ostringstream out;
  out << "ittm states=" << m.n_states() << " rule=" << RuleName(rule) << "\n";
  for (int row = 0; row <= m.n_states(); ++row) {
    const int q = row == m.n_states() ? kLimit : row;
    for (Triple x = 0; x < 8; ++x) {
      const auto& t = m.At(q, x);
      out << StateName(q) << " " << TripleString(x) << " -> " << TripleString(t.write) << " " << MoveChar(t.move)
          << " " << StateName(t.next) << "\n";
    }
  }
  return out.str();
}

std::string Serialize(const MachineDocument& doc) {
  if (const auto* c = std::get_if<ClassicalMachine>(&doc)) return Serialize(*c);
  const auto& d = std::get<ITTMDocument>(doc);
  return Serialize(d.machine, d.rule);
}

MachineDocument ParseMachine(std::string_view text) {
  const auto lines = ContentLines(text);
  if (HeaderKind(lines) == "classical") return ParseClassicalLines(lines);
  return ParseITTMLines(lines);
}

ClassicalMachine ParseClassical(std::string_view text) {
  const auto lines = ContentLines(text);
  if (HeaderKind(lines) != "classical") throw ParseError(lines[0].number, 1, "expected a classical machine");
  return ParseClassicalLines(lines);
}

ITTMDocument ParseITTM(std::string_view text) {
  const auto lines = ContentLines(text);
  if (HeaderKind(lines) != "ittm") throw ParseError(lines[0].number, 1, "expected an ITTM");
  return ParseITTMLines(lines);
}

}  // namespace ittmbb

#include "deciders.h"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace ittmbb::internal {

AbstractMachine MacroMachine(int n, const ClassicalTransition* table, int block) {
  if (block < 1 || block > 8) throw std::invalid_argument("block must be in 1..8");
  AbstractMachine m;
  m.states = 2 * n;
  m.symbols = 1u << block;
  m.rules.resize(static_cast<size_t>(m.states) * m.symbols);
  // Any run inside one block longer than this repeats a configuration.
  const uint64_t limit = static_cast<uint64_t>(n) * static_cast<uint64_t>(block) * m.symbols + 1;
  for (int ms = 0; ms < m.states; ++ms) {
    for (uint32_t word = 0; word < m.symbols; ++word) {
      int q = ms / 2;
      int pos = ms % 2 == 0 ? 0 : block - 1;
      uint32_t w = word;
      AbstractRule rule{0, Move::kRight, kStuck};
      for (uint64_t i = 0; i < limit; ++i) {
        const auto& t = table[2 * q + ((w >> pos) & 1)];
        if (t.next < 0 || t.next >= n) {
          rule.next = kEscapes;
          break;
        }
        w = (w & ~(1u << pos)) | (static_cast<uint32_t>(t.write) << pos);
        pos += t.move == Move::kRight ? 1 : -1;
        q = t.next;
        if (pos < 0 || pos >= block) {
          rule = {w, pos < 0 ? Move::kLeft : Move::kRight, 2 * q + (pos < 0 ? 1 : 0)};
          break;
        }
      }
      m.rules[static_cast<size_t>(ms) * m.symbols + word] = rule;
    }
  }
  return m;
}

AbstractMachine WithHistory(const AbstractMachine& base) {
  AbstractMachine m;
  m.states = base.states;
  m.symbols = base.symbols * static_cast<uint32_t>(base.states + 1);
  m.rules.resize(static_cast<size_t>(m.states) * m.symbols);
  for (int q = 0; q < m.states; ++q) {
    for (uint32_t s = 0; s < m.symbols; ++s) {
      AbstractRule rule = base.rules[static_cast<size_t>(q) * base.symbols + s % base.symbols];
      rule.write += base.symbols * static_cast<uint32_t>(q + 1);
      m.rules[static_cast<size_t>(q) * m.symbols + s] = rule;
    }
  }
  return m;
}

namespace {

struct View {
  int state;
  uint32_t head;
  uint64_t left, right;  // symbol nearest the head in the low bits
  friend bool operator==(const View&, const View&) = default;
};

struct ViewHash {
  size_t operator()(const View& v) const {
    uint64_t h = v.left * 0x9e3779b97f4a7c15ULL ^ (v.right + 0x632be59bd9b4e019ULL);
    h ^= (static_cast<uint64_t>(v.state) << 32 | v.head) * 0xc2b2ae3d27d4eb4fULL;
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

}  // namespace

bool ClosedGramSearch(const AbstractMachine& m, int radius, size_t max_views) {
  const int width = std::max(1, static_cast<int>(std::bit_width(m.symbols - 1)));
  if (radius < 1 || radius * width > 64) throw std::invalid_argument("radius too large for the alphabet");
  const uint64_t mask = radius * width == 64 ? ~0ULL : (1ULL << (radius * width)) - 1;
  const int top = (radius - 1) * width;
  const uint64_t sym_mask = (1ULL << width) - 1;

  std::unordered_set<uint64_t> grams[2] = {{0}, {0}};  // left, right
  std::unordered_set<View, ViewHash> seen;
  std::vector<View> views;
  auto add = [&](const View& v) {
    if (seen.insert(v).second) views.push_back(v);
  };
  add({0, 0, 0, 0});
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < views.size(); ++i) {
      if (views.size() > max_views) return false;
      const View v = views[i];
      const auto& rule = m.rules[static_cast<size_t>(v.state) * m.symbols + v.head];
      if (rule.next == kStuck) continue;
      if (rule.next < 0) return false;
      // Moving right pushes the written symbol onto the left side.
      const int side = rule.move == Move::kRight ? 0 : 1;
      const uint64_t near = side == 0 ? v.left : v.right;
      const uint64_t far = side == 0 ? v.right : v.left;
      const uint64_t pushed = ((near << width) | rule.write) & mask;
      if (grams[side].insert(pushed).second) changed = true;
      const uint64_t rest = far >> width;
      for (uint64_t x = 0; x < m.symbols; ++x) {
        const uint64_t popped = rest | (x << top);
        if (!grams[1 - side].count(popped)) continue;
        const auto head = static_cast<uint32_t>(far & sym_mask);
        add(side == 0 ? View{rule.next, head, pushed, popped} : View{rule.next, head, popped, pushed});
      }
    }
  }
  return true;
}

namespace {

struct Run {
  uint32_t symbol;
  uint32_t count;  // exact count, or the residue when `many`
  bool many;
  friend auto operator<=>(const Run&, const Run&) = default;
};

struct RunConfig {
  int state = 0;
  uint32_t head = 0;
  std::vector<Run> side[2];  // left, right; the run next to the head is last
  friend auto operator<=>(const RunConfig&, const RunConfig&) = default;
};

}  // namespace

bool RunLengthSearch(const AbstractMachine& m, int threshold, int modulus, size_t max_configs, size_t max_runs) {
  if (threshold < 1 || modulus < 1) throw std::invalid_argument("threshold and modulus must be positive");
  const auto t = static_cast<uint32_t>(threshold), mod = static_cast<uint32_t>(modulus);
  std::set<RunConfig> seen;
  std::vector<RunConfig> todo;
  auto add = [&](RunConfig c) {
    if (seen.insert(c).second) todo.push_back(std::move(c));
  };
  add({});
  while (!todo.empty()) {
    if (seen.size() > max_configs) return false;
    RunConfig c = std::move(todo.back());
    todo.pop_back();
    const auto& rule = m.rules[static_cast<size_t>(c.state) * m.symbols + c.head];
    if (rule.next == kStuck) continue;
    if (rule.next < 0) return false;
    const int near = rule.move == Move::kRight ? 0 : 1;
    auto& push = c.side[near];
    if (!push.empty() && push.back().symbol == rule.write) {
      Run& r = push.back();
      if (r.many) {
        r.count = (r.count + 1) % mod;
      } else if (++r.count == t) {
        r = {r.symbol, t % mod, true};
      }
    } else if (!(push.empty() && rule.write == 0)) {
      push.push_back({rule.write, 1, threshold == 1});
      if (threshold == 1) push.back().count = 1 % mod;
    }
    if (push.size() > max_runs) return false;
    c.state = rule.next;
    auto& pop = c.side[1 - near];
    if (pop.empty()) {
      c.head = 0;
      add(c);
      continue;
    }
    Run top = pop.back();
    pop.pop_back();
    c.head = top.symbol;
    if (!top.many) {
      if (top.count > 1) pop.push_back({top.symbol, top.count - 1, false});
      add(c);
      continue;
    }
    // At least t with the given residue, minus one: either exactly t - 1 or
    // still at least t with the residue shifted.
    const uint32_t residue = (top.count + mod - 1) % mod;
    if ((t - 1) % mod == residue) {
      RunConfig exact = c;
      if (t > 1) exact.side[1 - near].push_back({top.symbol, t - 1, false});
      add(std::move(exact));
    }
    pop.push_back({top.symbol, residue, true});
    add(std::move(c));
  }
  return true;
}

}  // namespace ittmbb::internal

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <stdexcept>

#include "deciders.h"
#include "ittmbb/search.h"
#include "ledger.h"
#include "parallel.h"

namespace ittmbb {

namespace {

using Table = std::vector<ClassicalTransition>;
using nlohmann::json;

constexpr ClassicalTransition kUnset{0, Move::kRight, kUndefined};
// Previous records kept per (side, state) for the translated-cycler check.
constexpr size_t kRecordHistory = 64;
// Caps for the abstract searches.
constexpr size_t kBackwardNodes = 1 << 14;
constexpr size_t kGramViews = 1 << 14;
constexpr size_t kRunConfigs = 20000;
constexpr size_t kRunsPerSide = 32;
// Runs still going after this many steps get the abstract searches.
constexpr uint64_t kAbstractAt = 4096;

// Partial configuration for the backward search: cells relative to the head.
struct Partial {
  int state;
  std::map<int64_t, uint8_t> cells;
};

bool Backward(int n, const ClassicalTransition* table, int depth, size_t max_nodes) {
  size_t nodes = 0;
  // True when every predecessor chain of `c` dies within `left` steps.
  std::function<bool(const Partial&, int)> dies = [&](const Partial& c, int left) {
    if (c.state == 0 && std::all_of(c.cells.begin(), c.cells.end(), [](const auto& kv) { return kv.second == 0; })) {
      return false;  // consistent with the blank start
    }
    if (left == 0 || ++nodes > max_nodes) return false;
    for (int q = 0; q < n; ++q) {
      for (uint8_t b = 0; b < 2; ++b) {
        const auto& t = table[2 * q + b];
        if (t.next != c.state) continue;
        // The predecessor head sat one cell against the move.
        const int64_t from = t.move == Move::kRight ? -1 : 1;
        const auto it = c.cells.find(from);
        if (it != c.cells.end() && it->second != t.write) continue;
        Partial p{q, {}};
        for (const auto& [cell, bit] : c.cells) p.cells[cell - from] = bit;
        p.cells[0] = b;
        if (!dies(p, left - 1)) return false;
      }
    }
    return true;
  };
  for (int q = 0; q < n; ++q) {
    for (uint8_t b = 0; b < 2; ++b) {
      const auto& t = table[2 * q + b];
      if (t.next >= 0 && t.next < n) continue;
      if (!dies(Partial{q, {{0, b}}}, depth)) return false;
    }
  }
  return true;
}

// Reruns the abstract search a proof names. Halting and undefined entries
// both count as escapes.
bool AbstractProofHolds(int n, const ClassicalTransition* table, const NonHaltProof& p) {
  using K = NonHaltProof::Kind;
  if (p.kind == K::kBackward) return p.radius >= 1 && Backward(n, table, p.radius, kBackwardNodes);
  if (p.block < 1 || p.block > 4 || p.radius < 1) return false;
  auto m = internal::MacroMachine(n, table, p.block);
  if (p.history) m = internal::WithHistory(m);
  if (p.kind == K::kClosedGrams) {
    const int width = std::max(1, static_cast<int>(std::bit_width(m.symbols - 1)));
    if (p.radius * width > 64) return false;
    return internal::ClosedGramSearch(m, p.radius, kGramViews);
  }
  if (p.kind == K::kRunLength) {
    return p.modulus >= 1 && internal::RunLengthSearch(m, p.radius, p.modulus, kRunConfigs, kRunsPerSide);
  }
  return false;
}

// Abstract searches tried, cheapest first, on runs that exhaust the budget.
std::vector<NonHaltProof> Schedule(int n) {
  using K = NonHaltProof::Kind;
  std::vector<NonHaltProof> out;
  auto proof = [](K kind, int block, bool history, int radius, int modulus) {
    NonHaltProof p;
    p.kind = kind;
    p.block = block;
    p.history = history;
    p.radius = radius;
    p.modulus = modulus;
    return p;
  };
  out.push_back(proof(K::kBackward, 1, false, 16, 1));
  for (bool history : {false, true}) {
    for (int block : {1, 2}) {
      const uint32_t symbols = (1u << block) * (history ? static_cast<uint32_t>(2 * n + 1) : 1u);
      const int width = static_cast<int>(std::bit_width(symbols - 1));
      for (int radius = 1; radius <= 8 && radius * width <= 24; ++radius) {
        out.push_back(proof(K::kClosedGrams, block, history, radius, 1));
      }
    }
  }
  for (int block : {1, 2}) {
    for (int modulus : {1, 2, 3}) {
      for (int threshold : {1, 2, 3}) out.push_back(proof(K::kRunLength, block, false, threshold, modulus));
    }
  }
  return out;
}

struct NodeRun {
  enum class Kind { kUndefined, kHalted, kNonHalting, kUnresolved };
  Kind kind = Kind::kUnresolved;
  int state = 0;
  uint8_t bit = 0;
  uint64_t steps = 0;
  FiniteTapeWindow tape;
  NonHaltProof proof;
};

struct SavedTape {
  uint64_t t = 0;
  int state = 0;
  int64_t head = 0;
  int64_t lo = 0;
  Bits cells;

  uint8_t At(int64_t c) const {
    const int64_t i = c - lo;
    return (i < 0 || i >= static_cast<int64_t>(cells.size())) ? 0 : cells[static_cast<size_t>(i)];
  }
};

SavedTape Save(const ClassicalSimulator& sim) {
  SavedTape s{sim.steps(), sim.state(), sim.head(), sim.leftmost(), {}};
  for (int64_t c = sim.leftmost(); c <= sim.rightmost(); ++c) s.cells.push_back(sim.At(c));
  return s;
}

// Runs a (possibly partial) table from blank with the cycler and
// translated-cycler checks active.
NodeRun RunNode(int n, const Table& table, uint64_t budget) {
  ClassicalSimulator sim(n, table.data());
  std::vector<int64_t> heads{0};
  SavedTape brent = Save(sim);
  uint64_t next_save = 1;
  std::vector<std::deque<SavedTape>> records(static_cast<size_t>(2 * n));
  NodeRun out;
  bool tried = false;
  auto try_abstract = [&] {
    tried = true;
    for (const auto& p : Schedule(n)) {
      if (AbstractProofHolds(n, table.data(), p)) {
        out.kind = NodeRun::Kind::kNonHalting;
        out.proof = p;
        return true;
      }
    }
    return false;
  };

  while (sim.steps() < budget) {
    const int state = sim.state();
    const uint8_t bit = sim.Read();
    const auto ev = sim.Step();
    if (ev == ClassicalSimulator::Event::kUndefined) {
      out.kind = NodeRun::Kind::kUndefined;
      out.state = state;
      out.bit = bit;
      out.steps = sim.steps();
      out.tape = sim.Window();
      return out;
    }
    heads.push_back(sim.head());
    if (ev == ClassicalSimulator::Event::kHalted) {
      out.kind = NodeRun::Kind::kHalted;
      out.steps = sim.steps();
      out.tape = sim.Window();
      return out;
    }
    const uint64_t t = sim.steps();
    if (t == kAbstractAt && try_abstract()) {
      out.steps = t;
      return out;
    }

    if (sim.state() == brent.state && sim.head() == brent.head) {
      bool same = true;
      const int64_t lo = std::min(brent.lo, sim.leftmost());
      const int64_t hi = std::max(brent.lo + static_cast<int64_t>(brent.cells.size()) - 1, sim.rightmost());
      for (int64_t c = lo; c <= hi && same; ++c) same = brent.At(c) == sim.At(c);
      if (same) {
        out.kind = NodeRun::Kind::kNonHalting;
        out.steps = t;
        out.proof = {NonHaltProof::Kind::kCycler, brent.t, t, 0, 0};
        return out;
      }
    }
    if (t == next_save) {
      brent = Save(sim);
      next_save *= 2;
    }

    if (sim.record() != 0) {
      const bool right = sim.record() > 0;
      const int64_t h2 = sim.head();
      auto& list = records[static_cast<size_t>(2 * sim.state() + (right ? 1 : 0))];
      // Walk back through the head history, tracking the far excursion
      // (minimum for right records, maximum for left ones).
      int64_t extreme = h2;
      uint64_t j = t;
      for (auto it = list.rbegin(); it != list.rend(); ++it) {
        while (j > it->t) {
          --j;
          extreme = right ? std::min(extreme, heads[j]) : std::max(extreme, heads[j]);
        }
        const int64_t h1 = it->head;
        const int64_t shift = h2 - h1;
        const int64_t a = right ? extreme : h1, b = right ? h1 : extreme;
        bool same = true;
        for (int64_t c = a; c <= b && same; ++c) same = it->At(c) == sim.At(c + shift);
        if (same) {
          out.kind = NodeRun::Kind::kNonHalting;
          out.steps = t;
          out.proof = {NonHaltProof::Kind::kTranslatedCycler, it->t, t, shift, extreme};
          return out;
        }
      }
      list.push_back(Save(sim));
      if (list.size() > kRecordHistory) list.pop_front();
    }
  }
  out.steps = sim.steps();
  if (!tried && try_abstract()) return out;
  out.kind = NodeRun::Kind::kUnresolved;
  return out;
}

ClassicalMachine Fill(int n, Table table) {
  for (auto& t : table) {
    if (t.next == kUndefined) t = {1, Move::kRight, kHalt};
  }
  return ClassicalMachine(n, std::move(table));
}

int UsedStates(const Table& table) {
  int used = 1;
  for (const auto& t : table) {
    if (t.next >= 0) used = std::max(used, t.next + 1);
  }
  return used;
}

bool AllUnset(const Table& table) {
  return std::all_of(table.begin(), table.end(), [](const auto& t) { return t.next == kUndefined; });
}

std::string PartialKey(const Table& table) {
  std::string s;
  for (size_t i = 0; i < table.size(); ++i) {
    if (i > 0 && i % 2 == 0) s.push_back('_');
    const auto& t = table[i];
    if (t.next == kUndefined) {
      s += "---";
    } else {
      s.push_back(static_cast<char>('0' + t.write));
      s.push_back(MoveChar(t.move));
      s.push_back(t.next == kHalt ? 'Z' : static_cast<char>('A' + t.next));
    }
  }
  return s;
}

class Enumerator {
 public:
  Enumerator(int n, uint64_t budget, const std::function<void(const ClassicalLeaf&)>& visit)
      : n_(n), budget_(budget), visit_(visit) {}

  void EmitHalts(const Table& table, const NodeRun& r) {
    for (uint8_t w = 0; w < 2; ++w) {
      Table t = table;
      t[static_cast<size_t>(2 * r.state + r.bit)] = {w, Move::kRight, kHalt};
      FiniteTapeWindow tape = r.tape;
      tape.Write(w);
      ClassicalLeaf leaf{Fill(n_, t)};
      leaf.outcome = ClassicalLeaf::Outcome::kHalted;
      leaf.steps = r.steps + 1;
      leaf.rado = ScoreRado(tape);
      leaf.clean = CleanScore(tape);
      leaf.mirror_clean = CleanScore(tape.Mirrored());
      visit_(leaf);
    }
  }

  template <typename Fn>
  void ForEachChild(Table& table, const NodeRun& r, Fn&& fn) {
    const int limit = std::min(UsedStates(table), n_ - 1);
    const bool first = AllUnset(table);
    auto& slot = table[static_cast<size_t>(2 * r.state + r.bit)];
    for (uint8_t w = 0; w < 2; ++w) {
      for (Move mv : {Move::kLeft, Move::kRight}) {
        if (first && mv == Move::kLeft) continue;
        for (int next = 0; next <= limit; ++next) {
          slot = {w, mv, next};
          fn(table);
        }
      }
    }
    slot = kUnset;
  }

  void Visit(Table& table) {
    const NodeRun r = RunNode(n_, table, budget_);
    switch (r.kind) {
      case NodeRun::Kind::kUndefined:
        EmitHalts(table, r);
        ForEachChild(table, r, [&](Table& t) { Visit(t); });
        return;
      case NodeRun::Kind::kHalted: {
        ClassicalLeaf leaf{Fill(n_, table)};
        leaf.outcome = ClassicalLeaf::Outcome::kHalted;
        leaf.steps = r.steps;
        leaf.rado = ScoreRado(r.tape);
        leaf.clean = CleanScore(r.tape);
        leaf.mirror_clean = CleanScore(r.tape.Mirrored());
        visit_(leaf);
        return;
      }
      case NodeRun::Kind::kNonHalting: {
        ClassicalLeaf leaf{Fill(n_, table)};
        leaf.outcome = ClassicalLeaf::Outcome::kNonHalting;
        leaf.steps = r.steps;
        leaf.proof = r.proof;
        visit_(leaf);
        return;
      }
      case NodeRun::Kind::kUnresolved: {
        ClassicalLeaf leaf{Fill(n_, table)};
        leaf.steps = r.steps;
        visit_(leaf);
        return;
      }
    }
  }

  // Work units in depth-first order: nodes at split depth are whole
  // subtrees; shallower nodes contribute their halting leaves as a unit of
  // their own, placed where the depth-first order would visit them.
  struct Unit {
    Table table;
    bool halts_only = false;
  };

  void Frontier(Table& table, int depth, int split, std::vector<Unit>& out) {
    if (depth >= split) {
      out.push_back({table, false});
      return;
    }
    const NodeRun r = RunNode(n_, table, budget_);
    if (r.kind != NodeRun::Kind::kUndefined) {
      out.push_back({table, false});
      return;
    }
    out.push_back({table, true});
    ForEachChild(table, r, [&](Table& t) { Frontier(t, depth + 1, split, out); });
  }

  void RunUnit(const Unit& u) {
    Table table = u.table;
    if (!u.halts_only) {
      Visit(table);
      return;
    }
    EmitHalts(table, RunNode(n_, table, budget_));
  }

 private:
  int n_;
  uint64_t budget_;
  const std::function<void(const ClassicalLeaf&)>& visit_;
};

struct Tally {
  uint64_t machines = 0, halted = 0, decided = 0, unresolved = 0;
  Best sigma, stime;
  std::vector<std::pair<ClassicalMachine, NonHaltProof>> proofs;

  void Add(const Tally& o) {
    machines += o.machines;
    halted += o.halted;
    decided += o.decided;
    unresolved += o.unresolved;
    sigma.Merge(o.sigma);
    stime.Merge(o.stime);
  }
};

void Count(Tally& tally, const ClassicalLeaf& leaf, Convention convention, bool keep_proofs) {
  ++tally.machines;
  switch (leaf.outcome) {
    case ClassicalLeaf::Outcome::kHalted: {
      ++tally.halted;
      const std::string enc = leaf.machine.Encode();
      if (tally.stime.Offer(leaf.steps, enc)) tally.stime.steps = leaf.steps;
      if (convention == Convention::kRado) {
        if (tally.sigma.Offer(leaf.rado, enc)) tally.sigma.steps = leaf.steps;
      } else {
        if (leaf.clean && tally.sigma.Offer(*leaf.clean, enc)) tally.sigma.steps = leaf.steps;
        if (leaf.mirror_clean && tally.sigma.Offer(*leaf.mirror_clean, leaf.machine.Mirrored().Encode())) {
          tally.sigma.steps = leaf.steps;
        }
      }
      return;
    }
    case ClassicalLeaf::Outcome::kNonHalting:
      ++tally.decided;
      if (keep_proofs) tally.proofs.emplace_back(leaf.machine, *leaf.proof);
      return;
    case ClassicalLeaf::Outcome::kUnresolved:
      ++tally.unresolved;
      return;
  }
}

json BestJson(const Best& b, Convention convention, uint64_t step_budget) {
  if (!b.found) return nullptr;
  json j;
  j["value"] = b.value;
  j["champion"] = b.champion;
  j["stage"] = OrdinalStage{0, b.steps}.ToString();
  j["certificate"] =
      json::parse(ClassicalCertificate(ClassicalMachine::Decode(b.champion), convention, step_budget).ToJson());
  return j;
}

Best BestFromJson(const json& j) {
  Best b;
  if (j.is_null()) return b;
  b.found = true;
  b.value = j.at("value");
  b.champion = j.at("champion");
  const auto c = Certificate::FromJson(j.at("certificate").dump());
  b.steps = c.stage.steps;
  return b;
}

json TallyJson(const Tally& t) {
  return {{"machines", t.machines}, {"halted", t.halted}, {"decided", t.decided}, {"unresolved", t.unresolved}};
}

Tally TallyFromJson(const json& j) {
  Tally t;
  const auto& o = j.at("outcome");
  t.machines = o.at("machines");
  t.halted = o.at("halted");
  t.decided = o.at("decided");
  t.unresolved = o.at("unresolved");
  t.sigma = BestFromJson(j.at("sigma"));
  t.stime = BestFromJson(j.at("stime"));
  return t;
}

SearchReport MakeReport(const std::string& quantity, const ClassicalSearchOptions& o, const Tally& t,
                        const Best& best) {
  SearchReport r;
  r.quantity = quantity;
  r.n = o.n;
  r.convention = o.convention;
  r.value = best.value;
  r.champion = best.champion;
  r.machines = t.machines;
  r.unresolved = t.unresolved;
  r.status = t.unresolved == 0 ? SearchReport::Status::kExact : SearchReport::Status::kLowerBound;
  r.budgets = "steps=" + std::to_string(o.step_budget);
  return r;
}

}  // namespace

void EnumerateClassical(int n, uint64_t step_budget, const std::function<void(const ClassicalLeaf&)>& visit) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (step_budget < 1) throw std::invalid_argument("step budget must be >= 1");
  Table table(static_cast<size_t>(2 * n), kUnset);
  Enumerator(n, step_budget, visit).Visit(table);
}

ClassicalSearchResult SearchClassical(const ClassicalSearchOptions& o) {
  if (o.n < 1 || o.n > o.max_n) {
    throw std::invalid_argument("n must be in 1.." + std::to_string(o.max_n));
  }
  if (o.step_budget < 1) throw std::invalid_argument("step budget must be >= 1");
  internal::Ledger ledger(o.ledger_path);
  const json budgets = {{"step_budget", o.step_budget}, {"split_depth", o.split_depth}};
  const std::string conv(ConventionName(o.convention));

  ClassicalSearchResult result;
  Tally total;
  auto finish = [&] {
    result.sigma = MakeReport("sigma", o, total, total.sigma);
    result.stime = MakeReport("stime", o, total, total.stime);
    result.sigma_best = total.sigma;
    result.stime_best = total.stime;
    result.halted = total.halted;
    result.decided = total.decided;
  };

  if (auto done = internal::Matching(ledger, "classical-summary", o.n, conv, budgets); !done.empty()) {
    total = TallyFromJson(*done.back());
    finish();
    return result;
  }
  std::map<std::string, const json*> known;
  for (const json* r : internal::Matching(ledger, "classical-unit", o.n, conv, budgets)) {
    known[r->at("machine").get<std::string>()] = r;
  }

  std::vector<Enumerator::Unit> units;
  {
    Table root(static_cast<size_t>(2 * o.n), kUnset);
    std::function<void(const ClassicalLeaf&)> none = [](const ClassicalLeaf&) {};
    Enumerator(o.n, o.step_budget, none).Frontier(root, 0, o.split_depth, units);
  }
  auto key = [&](size_t i) { return PartialKey(units[i].table) + (units[i].halts_only ? "/halts" : ""); };

  struct UnitResult {
    Tally tally;
    bool loaded = false;
  };
  std::function<UnitResult(size_t)> work = [&](size_t i) {
    UnitResult r;
    if (auto it = known.find(key(i)); it != known.end()) {
      r.tally = TallyFromJson(*it->second);
      r.loaded = true;
      return r;
    }
    std::function<void(const ClassicalLeaf&)> visit = [&](const ClassicalLeaf& leaf) {
      Count(r.tally, leaf, o.convention, static_cast<bool>(o.on_proof));
    };
    Enumerator(o.n, o.step_budget, visit).RunUnit(units[i]);
    return r;
  };
  std::function<void(size_t, UnitResult&)> consume = [&](size_t i, UnitResult& r) {
    total.Add(r.tally);
    if (o.on_proof) {
      for (const auto& [m, p] : r.tally.proofs) o.on_proof(m, p);
    }
    if (r.loaded) return;
    ++result.simulated_units;
    json rec = internal::NewRecord("classical-unit");
    rec["n"] = o.n;
    rec["convention"] = conv;
    rec["machine"] = key(i);
    rec["outcome"] = TallyJson(r.tally);
    rec["stage"] = r.tally.sigma.found ? json(OrdinalStage{0, r.tally.sigma.steps}.ToString()) : json(nullptr);
    rec["score"] = r.tally.sigma.found ? json(r.tally.sigma.value) : json(nullptr);
    rec["budgets"] = budgets;
    rec["sigma"] = BestJson(r.tally.sigma, o.convention, o.step_budget);
    rec["stime"] = BestJson(r.tally.stime, Convention::kRado, o.step_budget);
    ledger.Append(std::move(rec));
  };
  internal::RunOrdered<UnitResult>(units.size(), o.workers, work, consume);
  finish();

  json summary = internal::NewRecord("classical-summary");
  summary["n"] = o.n;
  summary["convention"] = conv;
  summary["machine"] = total.sigma.champion;
  summary["outcome"] = TallyJson(total);
  summary["outcome"]["status"] = StatusName(result.sigma.status);
  summary["stage"] = OrdinalStage{0, total.sigma.steps}.ToString();
  summary["score"] = total.sigma.value;
  summary["budgets"] = budgets;
  summary["sigma"] = BestJson(total.sigma, o.convention, o.step_budget);
  summary["stime"] = BestJson(total.stime, Convention::kRado, o.step_budget);
  ledger.Append(std::move(summary));
  return result;
}

SearchReport SigmaClassical(const ClassicalSearchOptions& options) { return SearchClassical(options).sigma; }
SearchReport STimeClassical(const ClassicalSearchOptions& options) { return SearchClassical(options).stime; }

std::string_view ProofKindName(NonHaltProof::Kind kind) {
  switch (kind) {
    case NonHaltProof::Kind::kCycler: return "cycler";
    case NonHaltProof::Kind::kTranslatedCycler: return "translated-cycler";
    case NonHaltProof::Kind::kClosedGrams: return "closed-grams";
    case NonHaltProof::Kind::kRunLength: return "run-length";
    case NonHaltProof::Kind::kBackward: return "backward";
  }
  return "?";
}

bool AuditNonHaltProof(const ClassicalMachine& m, const NonHaltProof& proof, uint64_t steps) {
  if (proof.kind != NonHaltProof::Kind::kCycler && proof.kind != NonHaltProof::Kind::kTranslatedCycler) {
    if (!AbstractProofHolds(m.n_states(), m.table().data(), proof)) return false;
    return steps == 0 || !RunClassical(m, steps).halted();
  }
  if (proof.t2 <= proof.t1) return false;
  ClassicalSimulator a(m.n_states(), m.table().data()), b(m.n_states(), m.table().data());
  auto advance = [](ClassicalSimulator& sim, uint64_t t) {
    while (sim.steps() < t) {
      if (sim.Step() != ClassicalSimulator::Event::kRunning) return false;
    }
    return true;
  };
  if (!advance(a, proof.t1) || !advance(b, proof.t2)) return false;
  const bool translated = proof.kind == NonHaltProof::Kind::kTranslatedCycler;
  const bool right = proof.shift > 0;
  if (translated != (proof.shift != 0)) return false;
  // Cells that can still influence the run from t1 on.
  auto same_region = [&] {
    const int64_t lo = translated ? (right ? proof.low : std::min(a.leftmost(), b.leftmost() - proof.shift))
                                  : std::min(a.leftmost(), b.leftmost());
    const int64_t hi = translated ? (right ? std::max(a.rightmost(), b.rightmost() - proof.shift) : proof.low)
                                  : std::max(a.rightmost(), b.rightmost());
    for (int64_t c = lo; c <= hi; ++c) {
      if (a.At(c) != b.At(c + proof.shift)) return false;
    }
    return true;
  };
  if (!same_region()) return false;
  // Between the two full comparisons only the written cell can diverge.
  for (uint64_t i = 0;; ++i) {
    if (a.state() != b.state() || b.head() != a.head() + proof.shift) return false;
    if (translated && (right ? a.head() < proof.low : a.head() > proof.low)) return false;
    if (i == steps) return same_region();
    const int64_t written = a.head();
    if (a.Step() != ClassicalSimulator::Event::kRunning || b.Step() != ClassicalSimulator::Event::kRunning) {
      return false;
    }
    if (a.At(written) != b.At(written + proof.shift)) return false;
  }
}

}  // namespace ittmbb

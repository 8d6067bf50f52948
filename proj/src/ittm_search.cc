#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "ittmbb/search.h"
#include "ledger.h"
#include "parallel.h"

namespace ittmbb {

namespace {

using Table = std::vector<ITTMTransition>;
using nlohmann::json;

constexpr ITTMTransition kUnset{0, Move::kRight, kUndefined};

ITTMachine Fill(int n, Table table) {
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i].next == kUndefined) table[i] = {static_cast<Triple>(i % 8), Move::kRight, kHalt};
  }
  return ITTMachine(n, std::move(table));
}

size_t Slot(int n, int state, Triple read) { return static_cast<size_t>(8 * ITTMachine::Row(state, n) + read); }

int UsedStates(const Table& table) {
  int used = 1;
  for (const auto& t : table) {
    if (t.next >= 0) used = std::max(used, t.next + 1);
  }
  return used;
}

std::string PartialKey(const Table& table) {
  std::string s;
  for (size_t i = 0; i < table.size(); ++i) {
    if (i > 0 && i % 8 == 0) s.push_back('_');
    const auto& t = table[i];
    if (t.next == kUndefined) {
      s += "-----";
    } else {
      s += TripleString(t.write);
      s.push_back(MoveChar(t.move));
      s.push_back(t.next == kHalt ? 'Z' : static_cast<char>('A' + t.next));
    }
  }
  return s;
}

class Enumerator {
 public:
  Enumerator(int n, const ExecBudget& budget, LimitRule rule, const std::function<void(const ITTMLeaf&)>& visit)
      : n_(n), budget_(budget), rule_(rule), visit_(visit) {}

  PartialOutcome Run(const Table& table) const {
    return RunTransfinitePartial(n_, table, EPTape(), budget_, rule_);
  }

  // Halting at the undefined entry: the move does not change the output, so
  // only Right is emitted, once per written triple.
  void EmitHalts(const Table& table, const ReachedUndefined& r) {
    for (Triple w = 0; w < 8; ++w) {
      Table t = table;
      t[Slot(n_, r.state, r.read)] = {w, Move::kRight, kHalt};
      ITTMLeaf leaf{Fill(n_, std::move(t))};
      Snapshot last = SuccessorStep(leaf.machine, r.at);
      const OrdinalStage stage = last.stage;
      const auto value = DecodeUnary(last.output);
      leaf.outcome = value ? ITTMLeaf::Outcome::kValue : ITTMLeaf::Outcome::kUndefined;
      leaf.value = value.value_or(0);
      leaf.run = RunOutcome{Halted{stage, std::move(last), 0}};
      visit_(leaf);
    }
  }

  template <typename Fn>
  void ForEachChild(Table& table, const ReachedUndefined& r, Fn&& fn) {
    const int limit = std::min(UsedStates(table), n_ - 1);
    auto& slot = table[Slot(n_, r.state, r.read)];
    for (Triple w = 0; w < 8; ++w) {
      for (Move mv : {Move::kLeft, Move::kRight}) {
        for (int next = 0; next <= limit; ++next) {
          slot = {w, mv, next};
          fn(table);
        }
      }
    }
    slot = kUnset;
  }

  void Leaf(const Table& table, RunOutcome run) {
    ITTMLeaf leaf{Fill(n_, table)};
    if (const auto* h = std::get_if<Halted>(&run.result)) {
      const auto value = DecodeUnary(h->final.output);
      leaf.outcome = value ? ITTMLeaf::Outcome::kValue : ITTMLeaf::Outcome::kUndefined;
      leaf.value = value.value_or(0);
    } else if (run.certified()) {
      leaf.outcome = ITTMLeaf::Outcome::kCertified;
    } else {
      leaf.outcome = ITTMLeaf::Outcome::kUnresolved;
    }
    leaf.run = std::move(run);
    visit_(leaf);
  }

  void Visit(Table& table) {
    auto out = Run(table);
    if (auto* r = std::get_if<ReachedUndefined>(&out)) {
      const ReachedUndefined at = *r;
      EmitHalts(table, at);
      ForEachChild(table, at, [&](Table& t) { Visit(t); });
      return;
    }
    Leaf(table, std::move(std::get<RunOutcome>(out)));
  }

  struct Unit {
    Table table;
    bool halts_only = false;
  };

  void Frontier(Table& table, int depth, int split, std::vector<Unit>& out) {
    if (depth >= split) {
      out.push_back({table, false});
      return;
    }
    auto run = Run(table);
    const auto* r = std::get_if<ReachedUndefined>(&run);
    if (!r) {
      out.push_back({table, false});
      return;
    }
    const ReachedUndefined at = *r;
    out.push_back({table, true});
    ForEachChild(table, at, [&](Table& t) { Frontier(t, depth + 1, split, out); });
  }

  void RunUnit(const Unit& u) {
    Table table = u.table;
    if (!u.halts_only) {
      Visit(table);
      return;
    }
    EmitHalts(table, std::get<ReachedUndefined>(Run(table)));
  }

 private:
  int n_;
  ExecBudget budget_;
  LimitRule rule_;
  const std::function<void(const ITTMLeaf&)>& visit_;
};

struct Tally {
  uint64_t machines = 0, values = 0, undefined = 0, certified = 0, unresolved = 0;
  Best best;
  std::vector<std::pair<ITTMachine, NonHaltingCertified>> certificates;

  void Add(const Tally& o) {
    machines += o.machines;
    values += o.values;
    undefined += o.undefined;
    certified += o.certified;
    unresolved += o.unresolved;
    best.Merge(o.best);
  }
};

json TallyJson(const Tally& t) {
  return {{"machines", t.machines},
          {"values", t.values},
          {"undefined", t.undefined},
          {"certified", t.certified},
          {"unresolved", t.unresolved}};
}

json BudgetJson(const SigmaInfOptions& o) {
  return {{"max_block_steps", o.budget.max_block_steps},
          {"max_limit_stages", o.budget.max_limit_stages},
          {"detection", o.budget.detection == Detection::kCycleOnly ? "cycle" : "cycle+drift"},
          {"split_depth", o.split_depth}};
}

OrdinalStage ParseStage(const std::string& s) {
  unsigned long long b = 0, c = 0;
  if (std::sscanf(s.c_str(), "w*%llu+%llu", &b, &c) != 2) throw std::invalid_argument("bad stage '" + s + "'");
  return {b, c};
}

Tally TallyFromJson(const json& j) {
  Tally t;
  const auto& o = j.at("outcome");
  t.machines = o.at("machines");
  t.values = o.at("values");
  t.undefined = o.at("undefined");
  t.certified = o.at("certified");
  t.unresolved = o.at("unresolved");
  if (!j.at("score").is_null()) {
    t.best.found = true;
    t.best.value = j.at("score");
    t.best.champion = j.at("champion");
    t.best.stage = ParseStage(j.at("stage"));
  }
  return t;
}

}  // namespace

void EnumerateITTM(int n, const ExecBudget& budget, LimitRule rule,
                   const std::function<void(const ITTMLeaf&)>& visit) {
  if (n < 1 || n > 25) throw std::invalid_argument("n must be in 1..25");
  budget.Validate();
  Table table(static_cast<size_t>(8 * (n + 1)), kUnset);
  Enumerator(n, budget, rule, visit).Visit(table);
}

std::string ITTMSpaceEstimate(int n) {
  const double entries = 8.0 * (n + 1);
  const double choices = 16.0 * (n + 1);
  const double exponent = entries * std::log10(choices);
  const double mantissa = std::pow(10.0, exponent - std::floor(exponent));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1fe%d", mantissa, static_cast<int>(std::floor(exponent)));
  return buf;
}

SigmaInfResult SigmaInfLowerBound(const SigmaInfOptions& o) {
  if (o.n < 1) throw std::invalid_argument("n must be at least 1");
  if (o.n > o.max_n) {
    throw std::invalid_argument("n=" + std::to_string(o.n) + " exceeds the maximum " + std::to_string(o.max_n) +
                                ": about " + ITTMSpaceEstimate(o.n) + " raw tables");
  }
  o.budget.Validate();
  internal::Ledger ledger(o.ledger_path);
  const json budgets = BudgetJson(o);
  const std::string rule(RuleName(o.rule));

  SigmaInfResult result;
  Tally total;
  auto certificate_of = [&](const json& rec) {
    if (rec.contains("certificate") && !rec.at("certificate").is_null()) {
      result.certificates.push_back(Certificate::FromJson(rec.at("certificate").dump()));
    }
  };
  auto finish = [&] {
    SearchReport& r = result.report;
    r.quantity = "sigma_inf";
    r.n = o.n;
    r.value = total.best.value;
    r.champion = total.best.champion;
    r.machines = total.machines;
    r.unresolved = total.unresolved;
    // Halting stages are unbounded below any budget, so the search only
    // ever establishes a lower bound.
    r.status = SearchReport::Status::kLowerBound;
    r.budgets = "block_steps=" + std::to_string(o.budget.max_block_steps) +
                " limit_stages=" + std::to_string(o.budget.max_limit_stages) + " rule=" + rule;
    result.best = total.best;
    result.values = total.values;
    result.undefined = total.undefined;
    result.certified = total.certified;
  };

  if (auto done = internal::Matching(ledger, "ittm-summary", o.n, rule, budgets); !done.empty()) {
    total = TallyFromJson(*done.back());
    for (const json* r : internal::Matching(ledger, "ittm-unit", o.n, rule, budgets)) certificate_of(*r);
    finish();
    return result;
  }
  std::map<std::string, const json*> known;
  for (const json* r : internal::Matching(ledger, "ittm-unit", o.n, rule, budgets)) {
    known[r->at("machine").get<std::string>()] = r;
  }

  std::vector<Enumerator::Unit> units;
  {
    Table root(static_cast<size_t>(8 * (o.n + 1)), kUnset);
    std::function<void(const ITTMLeaf&)> none = [](const ITTMLeaf&) {};
    Enumerator(o.n, o.budget, o.rule, none).Frontier(root, 0, o.split_depth, units);
  }
  auto key = [&](size_t i) {
    return PartialKey(units[i].table) + (units[i].halts_only ? "/halts" : "");
  };

  struct UnitResult {
    Tally tally;
    std::optional<Certificate> certificate;
    bool loaded = false;
  };
  std::function<UnitResult(size_t)> work = [&](size_t i) {
    UnitResult r;
    if (auto it = known.find(key(i)); it != known.end()) {
      r.tally = TallyFromJson(*it->second);
      if (!it->second->at("certificate").is_null()) {
        r.certificate = Certificate::FromJson(it->second->at("certificate").dump());
      }
      r.loaded = true;
      return r;
    }
    std::function<void(const ITTMLeaf&)> visit = [&](const ITTMLeaf& leaf) {
      Tally& t = r.tally;
      ++t.machines;
      switch (leaf.outcome) {
        case ITTMLeaf::Outcome::kValue:
          ++t.values;
          if (t.best.Offer(leaf.value, leaf.machine.Encode())) {
            t.best.stage = std::get<Halted>(leaf.run.result).stage;
          }
          break;
        case ITTMLeaf::Outcome::kUndefined:
          ++t.undefined;
          break;
        case ITTMLeaf::Outcome::kCertified:
          ++t.certified;
          if (o.on_certificate) {
            t.certificates.emplace_back(leaf.machine, std::get<NonHaltingCertified>(leaf.run.result));
          }
          break;
        case ITTMLeaf::Outcome::kUnresolved:
          ++t.unresolved;
          break;
      }
    };
    Enumerator(o.n, o.budget, o.rule, visit).RunUnit(units[i]);
    if (r.tally.best.found) {
      r.certificate = ITTMCertificate(ITTMachine::Decode(r.tally.best.champion), o.budget, o.rule);
    }
    return r;
  };
  std::function<void(size_t, UnitResult&)> consume = [&](size_t i, UnitResult& r) {
    total.Add(r.tally);
    if (r.certificate) result.certificates.push_back(*r.certificate);
    if (o.on_certificate) {
      for (const auto& [m, c] : r.tally.certificates) o.on_certificate(m, c);
    }
    if (r.loaded) return;
    ++result.simulated_units;
    json rec = internal::NewRecord("ittm-unit");
    rec["n"] = o.n;
    rec["convention"] = rule;
    rec["machine"] = key(i);
    rec["outcome"] = TallyJson(r.tally);
    rec["score"] = r.tally.best.found ? json(r.tally.best.value) : json(nullptr);
    rec["champion"] = r.tally.best.found ? json(r.tally.best.champion) : json(nullptr);
    rec["stage"] = r.tally.best.found ? json(r.tally.best.stage.ToString()) : json(nullptr);
    rec["budgets"] = budgets;
    rec["certificate"] = r.certificate ? json::parse(r.certificate->ToJson()) : json(nullptr);
    ledger.Append(std::move(rec));
  };
  internal::RunOrdered<UnitResult>(units.size(), o.workers, work, consume);
  finish();

  json summary = internal::NewRecord("ittm-summary");
  summary["n"] = o.n;
  summary["convention"] = rule;
  summary["machine"] = total.best.found ? json(total.best.champion) : json(nullptr);
  summary["champion"] = summary["machine"];
  summary["outcome"] = TallyJson(total);
  summary["outcome"]["status"] = StatusName(result.report.status);
  summary["score"] = total.best.found ? json(total.best.value) : json(nullptr);
  summary["stage"] = total.best.found ? json(total.best.stage.ToString()) : json(nullptr);
  summary["budgets"] = budgets;
  ledger.Append(std::move(summary));
  return result;
}

ITTMachine LiftClassical(const ClassicalMachine& m) {
  const int n = m.n_states();
  std::vector<ITTMTransition> table;
  table.reserve(static_cast<size_t>(8 * (n + 1)));
  for (int s = 0; s < n; ++s) {
    for (Triple x = 0; x < 8; ++x) {
      const auto& t = m.At(s, TripleBit(x, TapeId::kOutput));
      table.push_back({WithTripleBit(x, TapeId::kOutput, t.write), t.move, t.next});
    }
  }
  for (Triple x = 0; x < 8; ++x) table.push_back({x, Move::kRight, 0});
  return ITTMachine(n, std::move(table));
}

}  // namespace ittmbb

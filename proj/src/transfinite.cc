#include "ittmbb/transfinite.h"

#include <stdexcept>

#include "json.hpp"

#include "block.h"

namespace ittmbb {

using internal::BlockExplorer;

void ExecBudget::Validate() const {
  if (max_block_steps == 0 || max_limit_stages == 0) {
    throw std::invalid_argument("execution budgets must be positive");
  }
}

std::string_view ReasonName(UndeterminedReason reason) {
  switch (reason) {
    case UndeterminedReason::kBlockBudget: return "BlockBudget";
    case UndeterminedReason::kLimitBudget: return "LimitBudget";
    case UndeterminedReason::kNoPatternFound: return "NoPatternFound";
  }
  return "?";
}

std::string RunOutcome::Describe() const {
  if (const auto* h = std::get_if<Halted>(&result)) return "Halted at " + h->stage.ToString();
  if (const auto* c = std::get_if<NonHaltingCertified>(&result)) {
    return "NonHaltingCertified (" + c->first.ToString() + " = " + c->second.ToString() + ")";
  }
  const auto& u = std::get<Undetermined>(result);
  return "Undetermined (" + std::string(ReasonName(u.reason)) + " at " + u.stage.ToString() + ")";
}

namespace {

std::string_view KindName(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::kStep: return "step";
    case TraceEvent::Kind::kCycle: return "cycle";
    case TraceEvent::Kind::kDrift: return "drift";
    case TraceEvent::Kind::kLimit: return "limit";
    case TraceEvent::Kind::kHalt: return "halt";
    case TraceEvent::Kind::kCertificate: return "certificate";
    case TraceEvent::Kind::kUndetermined: return "undetermined";
  }
  return "?";
}

std::string StateName(int state) {
  Snapshot s;
  s.state = state;
  return s.StateName();
}

std::string TapesOf(const Snapshot& s) {
  return s.input.ToString() + " " + s.output.ToString() + " " + s.scratch.ToString();
}

struct EngineResult {
  PartialOutcome outcome;
  std::optional<Snapshot> stopped;
};

class Engine {
 public:
  Engine(int n_states, std::span<const ITTMTransition> table, const ExecBudget& budget,
         LimitRule rule, const TraceOptions* trace)
      : n_states_(n_states), table_(table), budget_(budget), rule_(rule), trace_(trace) {
    budget.Validate();
  }

  EngineResult Run(const EPTape& input, const OrdinalStage* stop_at) {
    Snapshot snap = InitialSnapshot(input);
    std::vector<Snapshot> limits;
    uint64_t digest = 0xcbf29ce484222325ULL;
    for (;;) {
      if (stop_at && snap.stage == *stop_at) return {RunOutcome{}, snap};
      BlockExplorer block(n_states_, table_, snap);
      const uint64_t b = snap.stage.limits;
      std::optional<PatternReport> pattern;
      while (!pattern && block.now() < budget_.max_block_steps) {
        const int state = block.state();
        const uint64_t head = block.head();
        const Triple read = block.Read();
        const auto ev = block.Step();
        if (ev == BlockExplorer::Event::kUndefined) {
          return {ReachedUndefined{state, read, block.SnapshotAt(block.now())}, {}};
        }
        digest = (digest ^ static_cast<uint64_t>((state + 8) * 8 + read)) * 0x100000001b3ULL;
        const OrdinalStage stage{b, block.now()};
        if (trace_ && trace_->steps) {
          Emit({.kind = TraceEvent::Kind::kStep, .stage = stage, .state = state, .head = head, .read = read});
        }
        if (ev == BlockExplorer::Event::kHalted) {
          Snapshot final = block.SnapshotAt(block.now());
          Emit({.kind = TraceEvent::Kind::kHalt, .stage = stage, .state = kHalt, .head = final.head,
                .detail = TapesOf(final)});
          return {RunOutcome{Halted{stage, std::move(final), digest}}, {}};
        }
        if (stop_at && stage == *stop_at) return {RunOutcome{}, block.SnapshotAt(block.now())};
        if (auto c = block.CycleEndingNow()) {
          pattern = *c;
          Emit({.kind = TraceEvent::Kind::kCycle, .stage = stage, .t0 = c->t0, .period = c->period});
        } else if (budget_.detection == Detection::kCycleAndDrift) {
          if (auto d = block.DriftEndingNow()) {
            pattern = *d;
            Emit({.kind = TraceEvent::Kind::kDrift, .stage = stage, .t0 = d->t0, .period = d->period,
                  .shift = d->shift});
          }
        }
      }
      if (!pattern) {
        const auto reason = budget_.detection == Detection::kCycleOnly
                                ? UndeterminedReason::kBlockBudget
                                : UndeterminedReason::kNoPatternFound;
        return GiveUp(reason, {b, block.now()});
      }
      if (b + 1 > budget_.max_limit_stages) return GiveUp(UndeterminedReason::kLimitBudget, {b, block.now()});
      Snapshot lim = block.Limit(*pattern, rule_);
      Emit({.kind = TraceEvent::Kind::kLimit, .stage = lim.stage, .state = kLimit, .detail = TapesOf(lim)});
      if (stop_at && lim.stage == *stop_at) return {RunOutcome{}, lim};
      for (const auto& earlier : limits) {
        if (earlier.SameConfiguration(lim)) {
          Emit({.kind = TraceEvent::Kind::kCertificate, .stage = lim.stage, .other = earlier.stage});
          return {RunOutcome{NonHaltingCertified{earlier.stage, lim.stage, lim}}, {}};
        }
      }
      limits.push_back(lim);
      snap = std::move(lim);
    }
  }

 private:
  void Emit(TraceEvent e) const {
    if (trace_ && trace_->sink) trace_->sink(e);
  }

  EngineResult GiveUp(UndeterminedReason reason, OrdinalStage stage) const {
    Emit({.kind = TraceEvent::Kind::kUndetermined, .stage = stage, .detail = std::string(ReasonName(reason))});
    return {RunOutcome{Undetermined{reason, stage}}, {}};
  }

  int n_states_;
  std::span<const ITTMTransition> table_;
  ExecBudget budget_;
  LimitRule rule_;
  const TraceOptions* trace_;
};

}  // namespace

std::string TraceEvent::ToJsonLine() const {
  nlohmann::json j;
  j["event"] = KindName(kind);
  j["stage"] = stage.ToString();
  switch (kind) {
    case Kind::kStep:
      j["state"] = StateName(state);
      j["head"] = head;
      j["read"] = TripleString(read);
      break;
    case Kind::kCycle:
      j["t0"] = t0;
      j["p"] = period;
      break;
    case Kind::kDrift:
      j["t0"] = t0;
      j["p"] = period;
      j["d"] = shift;
      break;
    case Kind::kLimit:
    case Kind::kHalt:
      j["tapes"] = detail;
      break;
    case Kind::kCertificate:
      j["witness"] = {other.ToString(), stage.ToString()};
      break;
    case Kind::kUndetermined:
      j["reason"] = detail;
      break;
  }
  return j.dump();
}

RunOutcome RunTransfinite(const ITTMachine& m, const EPTape& input, const ExecBudget& budget,
                          LimitRule rule, const TraceOptions* trace) {
  Engine engine(m.n_states(), m.table(), budget, rule, trace);
  return std::get<RunOutcome>(engine.Run(input, nullptr).outcome);
}

std::optional<Snapshot> SnapshotAtStage(const ITTMachine& m, const EPTape& input,
                                        const ExecBudget& budget, LimitRule rule,
                                        const OrdinalStage& stage) {
  Engine engine(m.n_states(), m.table(), budget, rule, nullptr);
  return engine.Run(input, &stage).stopped;
}

PartialOutcome RunTransfinitePartial(int n_states, std::span<const ITTMTransition> table,
                                     const EPTape& input, const ExecBudget& budget, LimitRule rule) {
  if (table.size() != static_cast<size_t>(8 * (n_states + 1))) {
    throw std::invalid_argument("partial table has the wrong size");
  }
  Engine engine(n_states, table, budget, rule, nullptr);
  return engine.Run(input, nullptr).outcome;
}

std::optional<CycleReport> DetectCycle(const ITTMachine& m, const Snapshot& start, uint64_t max_steps) {
  BlockExplorer block(m.n_states(), m.table(), start);
  while (block.now() < max_steps) {
    if (block.Step() != BlockExplorer::Event::kRunning) return std::nullopt;
    if (auto c = block.CycleEndingNow()) return c;
  }
  return std::nullopt;
}

std::optional<DriftReport> DetectDrift(const ITTMachine& m, const Snapshot& start, uint64_t max_steps) {
  BlockExplorer block(m.n_states(), m.table(), start);
  while (block.now() < max_steps) {
    if (block.Step() != BlockExplorer::Event::kRunning) return std::nullopt;
    if (auto d = block.DriftEndingNow()) return d;
  }
  return std::nullopt;
}

Snapshot OmegaLimit(const ITTMachine& m, const Snapshot& start, const PatternReport& report,
                    LimitRule rule) {
  const uint64_t end = std::visit([](const auto& r) { return r.t0 + r.period; }, report);
  BlockExplorer block(m.n_states(), m.table(), start);
  while (block.now() < end) {
    if (block.Step() != BlockExplorer::Event::kRunning) {
      throw std::invalid_argument("block halts before the reported pattern completes");
    }
  }
  return block.Limit(report, rule);
}

FStarValue FStar(const ITTMachine& m, uint64_t n, const ExecBudget& budget, LimitRule rule) {
  RunOutcome outcome = RunTransfinite(m, EncodeUnary(n), budget, rule);
  if (const auto* h = std::get_if<Halted>(&outcome.result)) {
    if (auto k = DecodeUnary(h->final.output)) return {FStarValue::Kind::kValue, *k, outcome};
    return {FStarValue::Kind::kUndefined, 0, outcome};
  }
  if (outcome.certified()) return {FStarValue::Kind::kUndefined, 0, outcome};
  return {FStarValue::Kind::kUndetermined, 0, outcome};
}

bool AuditCertificate(const ITTMachine& m, const EPTape& input, const ExecBudget& budget,
                      LimitRule rule, const NonHaltingCertified& cert, uint64_t steps) {
  if (!(cert.first < cert.second)) return false;
  auto a = SnapshotAtStage(m, input, budget, rule, cert.first);
  auto b = SnapshotAtStage(m, input, budget, rule, cert.second);
  if (!a || !b || !a->SameConfiguration(*b)) return false;
  for (uint64_t i = 0; i < steps; ++i) {
    *a = SuccessorStep(m, *a);
    *b = SuccessorStep(m, *b);
    if (a->state == kHalt || !a->SameConfiguration(*b)) return false;
  }
  return true;
}

}  // namespace ittmbb

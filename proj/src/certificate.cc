#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ittmbb/digest.h"
#include "ittmbb/search.h"
#include "json.hpp"

namespace ittmbb {

std::string_view ConventionName(Convention c) { return c == Convention::kRado ? "rado" : "clean"; }

Convention ParseConvention(std::string_view name) {
  if (name == "rado") return Convention::kRado;
  if (name == "clean") return Convention::kClean;
  throw std::invalid_argument("unknown convention '" + std::string(name) + "'");
}

std::string_view StatusName(SearchReport::Status s) {
  return s == SearchReport::Status::kExact ? "Exact" : "LowerBound";
}

bool Best::Offer(uint64_t v, const std::string& encoding) {
  if (found && (v < value || (v == value && encoding >= champion))) return false;
  found = true;
  value = v;
  champion = encoding;
  return true;
}

void Best::Merge(const Best& other) {
  if (!other.found) return;
  if (Offer(other.value, other.champion)) {
    steps = other.steps;
    stage = other.stage;
  }
}

std::string SearchReport::Summary() const {
  std::ostringstream out;
  out << quantity << "(" << n << ")=" << value << " " << StatusName(status);
  if (quantity == "sigma") out << " convention=" << ConventionName(convention);
  out << " champion=" << (champion.empty() ? "-" : champion) << " machines=" << machines
      << " unresolved=" << unresolved << " budgets=" << budgets;
  return out.str();
}

namespace {

std::optional<uint64_t> ClassicalScore(const FiniteTapeWindow& tape, Convention c) {
  if (c == Convention::kRado) return ScoreRado(tape);
  return CleanScore(tape);
}

}  // namespace

std::string Certificate::ToJson() const {
  nlohmann::json j;
  j["kind"] = kind == Kind::kClassical ? "classical" : "ittm";
  j["machine"] = machine;
  j["stage"] = stage.ToString();
  j["digest"] = digest;
  j["score"] = score;
  if (kind == Kind::kClassical) {
    j["convention"] = ConventionName(convention);
    j["step_budget"] = step_budget;
  } else {
    j["rule"] = RuleName(rule);
    j["max_block_steps"] = budget.max_block_steps;
    j["max_limit_stages"] = budget.max_limit_stages;
    j["detection"] = budget.detection == Detection::kCycleOnly ? "cycle" : "cycle+drift";
  }
  return j.dump();
}

Certificate Certificate::FromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Certificate c;
    const std::string kind = j.at("kind");
    if (kind != "classical" && kind != "ittm") throw std::invalid_argument("unknown certificate kind");
    c.kind = kind == "classical" ? Kind::kClassical : Kind::kITTM;
    c.machine = j.at("machine");
    const std::string stage = j.at("stage");
    unsigned long long b = 0, s = 0;
    if (std::sscanf(stage.c_str(), "w*%llu+%llu", &b, &s) != 2) throw std::invalid_argument("bad stage");
    c.stage = {b, s};
    c.digest = j.at("digest");
    c.score = j.at("score");
    if (c.kind == Kind::kClassical) {
      c.convention = ParseConvention(j.at("convention").get<std::string>());
      c.step_budget = j.at("step_budget");
    } else {
      c.rule = ParseRule(j.at("rule").get<std::string>());
      c.budget.max_block_steps = j.at("max_block_steps");
      c.budget.max_limit_stages = j.at("max_limit_stages");
      c.budget.detection = j.at("detection") == "cycle" ? Detection::kCycleOnly : Detection::kCycleAndDrift;
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad certificate: ") + e.what());
  }
}

Certificate ClassicalCertificate(const ClassicalMachine& m, Convention convention, uint64_t step_budget) {
  auto run = RunClassical(m, step_budget);
  if (!run.halted()) throw std::invalid_argument("machine does not halt within the budget");
  auto score = ClassicalScore(run.last.tape, convention);
  if (!score) throw std::invalid_argument("halting tape is not clean");
  Certificate c;
  c.kind = Certificate::Kind::kClassical;
  c.machine = m.Encode();
  c.convention = convention;
  c.stage = {0, run.last.steps};
  // Contents plus the final head position.
  c.digest = HexDigest(Fnv1a64(std::to_string(run.last.tape.head()), run.last.tape.Fingerprint()));
  c.score = *score;
  c.step_budget = step_budget;
  return c;
}

std::optional<Certificate> ITTMCertificate(const ITTMachine& m, const ExecBudget& budget, LimitRule rule) {
  auto v = FStar(m, 0, budget, rule);
  if (v.kind != FStarValue::Kind::kValue) return std::nullopt;
  const auto& h = std::get<Halted>(v.outcome.result);
  Certificate c;
  c.kind = Certificate::Kind::kITTM;
  c.machine = m.Encode();
  c.rule = rule;
  c.stage = h.stage;
  c.digest = HexDigest(h.final.Digest());
  c.score = v.value;
  c.budget = budget;
  return c;
}

bool VerifyCertificate(const Certificate& c) {
  try {
    if (c.kind == Certificate::Kind::kClassical) {
      if (c.stage.limits != 0 || c.step_budget == 0) return false;
      auto fresh = ClassicalCertificate(ClassicalMachine::Decode(c.machine), c.convention, c.step_budget);
      return fresh.stage == c.stage && fresh.digest == c.digest && fresh.score == c.score;
    }
    auto fresh = ITTMCertificate(ITTMachine::Decode(c.machine), c.budget, c.rule);
    return fresh && fresh->stage == c.stage && fresh->digest == c.digest && fresh->score == c.score;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace ittmbb

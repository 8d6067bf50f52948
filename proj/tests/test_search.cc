#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "ittmbb/search.h"
#include "json.hpp"
#include "test_support.h"

using namespace ittmbb;
using namespace ittmbb::testing;

namespace {

// Halting behaviour of a machine up to reflection: step count plus the
// smaller of the two tape images.
using Behaviour = std::pair<uint64_t, std::string>;

std::string Image(const std::map<int64_t, uint8_t>& tape, bool mirror) {
  std::map<int64_t, uint8_t> t;
  for (auto [c, v] : tape) {
    if (v) t[mirror ? -c : c] = 1;
  }
  std::string s;
  for (auto [c, v] : t) s += std::to_string(c) + ",";
  return s;
}

std::optional<Behaviour> BehaviourOf(const ClassicalMachine& m, uint64_t budget) {
  const auto r = ReferenceClassical(m, budget);
  if (!r.halted) return std::nullopt;
  return Behaviour{r.steps, std::min(Image(r.tape, false), Image(r.tape, true))};
}

ClassicalSearchOptions Options(int n, uint64_t budget = 100000) {
  ClassicalSearchOptions o;
  o.n = n;
  o.step_budget = budget;
  return o;
}

std::string TempPath(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ittmbb_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p.string();
}

std::vector<std::string> Lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Ledger lines without their timestamps.
std::vector<std::string> Stable(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& line : Lines(path)) {
    auto j = nlohmann::json::parse(line);
    j.erase("timestamp");
    out.push_back(j.dump());
  }
  return out;
}

}  // namespace

TEST_CASE("tree enumeration has the halting behaviours of the raw space") {
  for (int n : {1, 2}) {
    std::set<Behaviour> raw, tnf;
    uint64_t raw_count = 0, tnf_count = 0;
    ForEachRawClassical(n, [&](const ClassicalMachine& m) {
      ++raw_count;
      if (auto b = BehaviourOf(m, 500)) raw.insert(*b);
    });
    EnumerateClassical(n, 500, [&](const ClassicalLeaf& leaf) {
      ++tnf_count;
      if (leaf.outcome == ClassicalLeaf::Outcome::kHalted) {
        auto b = BehaviourOf(leaf.machine, 500);
        REQUIRE(b.has_value());
        CHECK(b->first == leaf.steps);
        tnf.insert(*b);
      }
    });
    CHECK(tnf_count < raw_count);
    CHECK(raw == tnf);
  }
  uint64_t count = 0;
  ForEachRawClassical(1, [&](const ClassicalMachine&) { ++count; });
  CHECK(count == 64);
}

TEST_CASE("enumeration order is deterministic and first moves go right") {
  std::vector<std::string> a, b;
  EnumerateClassical(2, 1000, [&](const ClassicalLeaf& l) { a.push_back(l.machine.Encode()); });
  EnumerateClassical(2, 1000, [&](const ClassicalLeaf& l) { b.push_back(l.machine.Encode()); });
  CHECK(a == b);
  CHECK(std::set<std::string>(a.begin(), a.end()).size() == a.size());
  for (const auto& e : a) CHECK(e[1] == 'R');
  CHECK(std::find(a.begin(), a.end(), "1RB1LB_1LA1RZ") != a.end());
}

TEST_CASE("leaf scores agree with the reference run") {
  EnumerateClassical(3, 2000, [&](const ClassicalLeaf& leaf) {
    if (leaf.outcome != ClassicalLeaf::Outcome::kHalted) return;
    const auto r = ReferenceClassical(leaf.machine, 2000);
    REQUIRE(r.halted);
    CHECK(r.steps == leaf.steps);
    CHECK(r.Ones() == leaf.rado);
    if (leaf.clean) CHECK(*leaf.clean <= leaf.rado);
    if (leaf.mirror_clean) CHECK(*leaf.mirror_clean <= leaf.rado);
  });
}

TEST_CASE("busy beaver values for n <= 3") {
  const uint64_t sigma[] = {1, 4, 6}, stime[] = {1, 6, 21};
  uint64_t prev_sigma = 0, prev_stime = 0;
  for (int n = 1; n <= 3; ++n) {
    auto r = SearchClassical(Options(n));
    CAPTURE(n);
    CHECK(r.sigma.value == sigma[n - 1]);
    CHECK(r.stime.value == stime[n - 1]);
    CHECK(r.sigma.status == SearchReport::Status::kExact);
    CHECK(r.stime.status == SearchReport::Status::kExact);
    CHECK(r.sigma.unresolved == 0);
    CHECK(r.sigma.value >= prev_sigma);
    CHECK(r.stime.value >= prev_stime);
    prev_sigma = r.sigma.value;
    prev_stime = r.stime.value;

    // Champions reproduce their values on the reference simulator.
    const auto s = ReferenceClassical(ClassicalMachine::Decode(r.sigma.champion), 1000);
    REQUIRE(s.halted);
    CHECK(s.Ones() == r.sigma.value);
    CHECK(s.steps <= r.stime.value);
    const auto t = ReferenceClassical(ClassicalMachine::Decode(r.stime.champion), 1000);
    REQUIRE(t.halted);
    CHECK(t.steps == r.stime.value);

    auto clean = Options(n);
    clean.convention = Convention::kClean;
    CHECK(SearchClassical(clean).sigma.value <= r.sigma.value);
  }
}

TEST_CASE("budget too small degrades to a lower bound") {
  auto r = SearchClassical(Options(3, 10));
  CHECK(r.sigma.status == SearchReport::Status::kLowerBound);
  CHECK(r.sigma.unresolved > 0);
  CHECK(r.sigma.value <= 6);
  CHECK_THROWS_AS(SearchClassical(Options(5)), std::invalid_argument);
}

TEST_CASE("non-halting proofs replay and survive the reference simulator") {
  uint64_t proofs = 0;
  std::map<NonHaltProof::Kind, uint64_t> kinds;
  auto o = Options(3);
  o.on_proof = [&](const ClassicalMachine& m, const NonHaltProof& p) {
    ++kinds[p.kind];
    if (proofs++ % 7 != 0) return;
    CHECK(AuditNonHaltProof(m, p, 300));
    CHECK_FALSE(ReferenceClassical(m, 3000).halted);
  };
  auto r = SearchClassical(o);
  CHECK(proofs == r.decided);
  CHECK(kinds[NonHaltProof::Kind::kCycler] > 0);
  CHECK(kinds[NonHaltProof::Kind::kTranslatedCycler] > 0);
}

TEST_CASE("tampered proofs fail the audit") {
  // Moves right forever writing ones: a translated cycler.
  const auto m = ClassicalMachine::Decode("1RA1RZ");
  NonHaltProof p{NonHaltProof::Kind::kTranslatedCycler, 1, 2, 1, 0};
  CHECK(AuditNonHaltProof(m, p, 100));
  auto bad = p;
  bad.shift = 2;
  CHECK_FALSE(AuditNonHaltProof(m, bad, 100));
  bad = p;
  bad.kind = NonHaltProof::Kind::kCycler;
  CHECK_FALSE(AuditNonHaltProof(m, bad, 100));
  // A halting machine cannot carry any proof.
  const auto h = ClassicalMachine::Decode("1RB1LB_1LA1RZ");
  for (int k = 1; k <= 3; ++k) {
    NonHaltProof g;
    g.kind = NonHaltProof::Kind::kClosedGrams;
    g.radius = k;
    CHECK_FALSE(AuditNonHaltProof(h, g, 10));
    g.kind = NonHaltProof::Kind::kRunLength;
    CHECK_FALSE(AuditNonHaltProof(h, g, 10));
  }
  CHECK_FALSE(AuditNonHaltProof(h, {NonHaltProof::Kind::kCycler, 1, 3, 0, 0}, 10));
}

TEST_CASE("classical certificates verify and reject tampering") {
  const auto m = ClassicalMachine::Decode("1RB1LB_1LA1RZ");
  const auto c = ClassicalCertificate(m, Convention::kRado, 1000);
  CHECK(c.score == 4);
  CHECK(c.stage == OrdinalStage{0, 6});
  CHECK(VerifyCertificate(c));
  CHECK(VerifyCertificate(Certificate::FromJson(c.ToJson())));
  auto bad = c;
  bad.score += 1;
  CHECK_FALSE(VerifyCertificate(bad));
  bad = c;
  bad.machine = "1RB1LB_0LA1RZ";
  CHECK_FALSE(VerifyCertificate(bad));
  bad = c;
  bad.machine = "1RB1LB_1LA1LZ";
  CHECK_FALSE(VerifyCertificate(bad));
  bad = c;
  bad.stage.steps = 7;
  CHECK_FALSE(VerifyCertificate(bad));
  bad = c;
  bad.digest = "0000000000000000";
  CHECK_FALSE(VerifyCertificate(bad));
  CHECK_THROWS(Certificate::FromJson("{\"kind\":\"nope\"}"));
}

TEST_CASE("worker count does not change reports or the ledger") {
  const auto a_path = TempPath("w1"), b_path = TempPath("w4");
  auto o = Options(3);
  o.ledger_path = a_path;
  auto a = SearchClassical(o);
  o.workers = 4;
  o.ledger_path = b_path;
  auto b = SearchClassical(o);
  CHECK(a.sigma.Summary() == b.sigma.Summary());
  CHECK(a.stime.Summary() == b.stime.Summary());
  CHECK(Stable(a_path) == Stable(b_path));
  std::filesystem::remove(a_path);
  std::filesystem::remove(b_path);
}

TEST_CASE("ledger resume skips finished work") {
  const auto path = TempPath("resume");
  auto o = Options(3);
  o.ledger_path = path;
  o.workers = 2;
  const auto first = SearchClassical(o);
  CHECK(first.simulated_units > 0);
  const auto lines = Lines(path);

  const auto again = SearchClassical(o);
  CHECK(again.simulated_units == 0);
  CHECK(again.sigma.Summary() == first.sigma.Summary());
  CHECK(Lines(path).size() == lines.size());

  // Keep half of the unit records plus a torn line, as after a crash.
  {
    std::ofstream out(path, std::ios::trunc);
    const size_t keep = (lines.size() - 1) / 2;
    for (size_t i = 0; i < keep; ++i) out << lines[i] << "\n";
    out << lines[keep].substr(0, lines[keep].size() / 2);
  }
  const auto resumed = SearchClassical(o);
  CHECK(resumed.simulated_units == first.simulated_units - (lines.size() - 1) / 2);
  CHECK(resumed.sigma.Summary() == first.sigma.Summary());
  CHECK(resumed.stime.Summary() == first.stime.Summary());

  // Different budgets do not reuse the records.
  auto other = o;
  other.step_budget = 5000;
  CHECK(SearchClassical(other).simulated_units > 0);

  // Every record carrying a certificate verifies.
  for (const auto& line : Lines(path)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    CHECK(j.at("schema_version") == 1);
    for (const char* key : {"sigma", "stime"}) {
      if (j.contains(key) && !j.at(key).is_null()) {
        CHECK(VerifyCertificate(Certificate::FromJson(j.at(key).at("certificate").dump())));
      }
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("ITTM enumeration at n=1") {
  const ExecBudget budget{2, 1, Detection::kCycleAndDrift};
  std::vector<std::string> order;
  bool one_writer = false;
  uint64_t finite_checked = 0;
  EnumerateITTM(1, budget, LimitRule::kLimsup, [&](const ITTMLeaf& leaf) {
    order.push_back(leaf.machine.Encode());
    if (leaf.machine.At(0, 0) == ITTMTransition{MakeTriple(0, 1, 0), Move::kRight, kHalt}) one_writer = true;
    for (int s = 0; s <= 1; ++s) {
      for (Triple x = 0; x < 8; ++x) CHECK(leaf.machine.At(s == 1 ? kLimit : 0, x).next != kLimit);
    }
    if (leaf.outcome == ITTMLeaf::Outcome::kValue || leaf.outcome == ITTMLeaf::Outcome::kUndefined) {
      const auto& h = std::get<Halted>(leaf.run.result);
      if (h.stage.limits == 0) {
        // Finite halts against the reference simulator.
        ReferenceITTM r(leaf.machine, InitialSnapshot());
        while (r.Step()) REQUIRE(r.steps < 100);
        CHECK(r.steps == h.stage.steps);
        uint64_t ones = 0;
        bool clean = true;
        for (uint64_t c = 0; c < r.size() + 2; ++c) {
          const uint8_t b = TripleBit(r.Cell(c), TapeId::kOutput);
          if (b && ones != c) clean = false;
          ones += b;
        }
        CHECK(clean == (leaf.outcome == ITTMLeaf::Outcome::kValue));
        if (clean) CHECK(ones == leaf.value);
        ++finite_checked;
      } else if (finite_checked % 16 == 0) {
        // Limit-stage halts against the full executor.
        auto v = FStar(leaf.machine, 0, budget);
        CHECK(v.outcome.halted());
        CHECK(std::get<Halted>(v.outcome.result).stage == h.stage);
      }
    }
  });
  CHECK(one_writer);
  CHECK(finite_checked > 0);
  std::vector<std::string> again;
  EnumerateITTM(1, budget, LimitRule::kLimsup, [&](const ITTMLeaf& l) { again.push_back(l.machine.Encode()); });
  CHECK(order == again);
}

TEST_CASE("sigma-infinity lower bound") {
  SigmaInfOptions o;
  o.n = 1;
  o.budget = {2, 1, Detection::kCycleAndDrift};
  auto small = SigmaInfLowerBound(o);
  CHECK(small.report.value >= 1);
  CHECK(small.report.status == SearchReport::Status::kLowerBound);
  REQUIRE_FALSE(small.certificates.empty());
  for (const auto& c : small.certificates) CHECK(VerifyCertificate(c));
  CHECK(small.report.machines == small.values + small.undefined + small.certified + small.report.unresolved);

  auto tampered = small.certificates.front();
  tampered.score += 1;
  CHECK_FALSE(VerifyCertificate(tampered));

  o.workers = 3;
  auto parallel = SigmaInfLowerBound(o);
  CHECK(parallel.report.Summary() == small.report.Summary());
  REQUIRE(parallel.certificates.size() == small.certificates.size());
  for (size_t i = 0; i < small.certificates.size(); ++i) {
    CHECK(parallel.certificates[i].ToJson() == small.certificates[i].ToJson());
  }

  // More budget never lowers the bound.
  o.workers = 1;
  o.budget = {3, 1, Detection::kCycleAndDrift};
  CHECK(SigmaInfLowerBound(o).report.value >= small.report.value);
  o.budget = {2, 2, Detection::kCycleAndDrift};
  CHECK(SigmaInfLowerBound(o).report.value >= small.report.value);

  o.n = 3;
  try {
    SigmaInfLowerBound(o);
    FAIL("expected a refusal");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("e") != std::string::npos);
  }
}

TEST_CASE("certified ITTM leaves audit from both witnesses") {
  uint64_t audited = 0;
  SigmaInfOptions o;
  o.n = 1;
  o.on_certificate = [&](const ITTMachine& m, const NonHaltingCertified& c) {
    if (audited++ % 4 == 0) CHECK(AuditCertificate(m, EPTape(), o.budget, o.rule, c, 500));
  };
  SigmaInfLowerBound(o);
  CHECK(audited > 0);
}

TEST_CASE("sigma-infinity ledger resumes and its certificates verify") {
  const auto path = TempPath("inf");
  SigmaInfOptions o;
  o.n = 1;
  o.budget = {2, 1, Detection::kCycleAndDrift};
  o.ledger_path = path;
  auto first = SigmaInfLowerBound(o);
  auto again = SigmaInfLowerBound(o);
  CHECK(again.simulated_units == 0);
  CHECK(again.report.Summary() == first.report.Summary());
  CHECK(again.certificates.size() == first.certificates.size());
  for (const auto& line : Lines(path)) {
    const auto j = nlohmann::json::parse(line);
    if (j.contains("certificate") && !j.at("certificate").is_null()) {
      CHECK(VerifyCertificate(Certificate::FromJson(j.at("certificate").dump())));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("lifted classical machines compute their clean score") {
  for (int n = 1; n <= 2; ++n) {
    EnumerateClassical(n, 200, [&](const ClassicalLeaf& leaf) {
      if (leaf.outcome != ClassicalLeaf::Outcome::kHalted) return;
      const auto r = ReferenceClassical(leaf.machine, 200);
      // The lift only matches on runs that never go left of cell 0.
      bool right_only = true;
      {
        ReferenceRun s;
        while (!s.halted && s.steps < 200) {
          s = ReferenceClassical(leaf.machine, s.steps + 1);
          if (s.head < 0) right_only = false;
        }
      }
      if (!right_only) return;
      const auto v = FStar(LiftClassical(leaf.machine), 0, {1000, 1, Detection::kCycleAndDrift});
      REQUIRE(v.outcome.halted());
      CHECK(std::get<Halted>(v.outcome.result).stage == OrdinalStage{0, r.steps});
      if (leaf.clean) {
        CHECK(v.kind == FStarValue::Kind::kValue);
        CHECK(v.value == *leaf.clean);
      } else {
        CHECK(v.kind == FStarValue::Kind::kUndefined);
      }
    });
  }
  // The lifted classical champion stays below the infinite-time bound.
  SigmaInfOptions o;
  o.n = 1;
  auto clean = Options(1);
  clean.convention = Convention::kClean;
  CHECK(SearchClassical(clean).sigma.value <= SigmaInfLowerBound(o).report.value);
}

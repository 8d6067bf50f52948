#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ittmbb/classical.h"
#include "ittmbb/ittm.h"
#include "ittmbb/transfinite.h"

namespace ittmbb {

enum class Convention { kRado, kClean };
std::string_view ConventionName(Convention c);
// Accepts "rado" and "clean".
Convention ParseConvention(std::string_view name);

// ---------------------------------------------------------------------------
// Classical non-halting proofs

// A cycler repeats its whole configuration: config(t2) == config(t1).
// A translated cycler reaches a new tape extreme at t1 and t2 in the same
// state, and the cells the head can reach between the two records match:
// from `low` (right records) or up to `low` (left records) at t1, and the
// same cells shifted by `shift` at t2.
// The other kinds name an abstract search that, rerun with the same
// parameters on the machine, finds a set of abstract configurations that
// contains the blank start, is closed under steps and never halts:
//  - closed grams: views of the state, head symbol and `radius` symbols on
//    each side, over blocks of `block` cells (optionally tagged with the
//    state that last wrote them);
//  - run length: each side is a stack of runs of one block, exact below
//    `radius` repetitions, otherwise kept mod `modulus`;
//  - backward: every predecessor chain of a halting configuration dies out
//    within `radius` steps without meeting the start.
struct NonHaltProof {
  enum class Kind { kCycler, kTranslatedCycler, kClosedGrams, kRunLength, kBackward };
  Kind kind = Kind::kCycler;
  uint64_t t1 = 0, t2 = 0;
  int64_t shift = 0;  // 0 for cyclers
  int64_t low = 0;    // boundary of the region that matters, at t1
  int block = 1;
  bool history = false;
  int radius = 0;
  int modulus = 1;
};
std::string_view ProofKindName(NonHaltProof::Kind kind);

// Cycler kinds: replays the machine from blank and checks that the
// configurations from t1 and t2 agree (up to the translation) at each of the
// next `steps` steps. Abstract kinds: reruns the search and also requires the
// machine to survive `steps` steps.
bool AuditNonHaltProof(const ClassicalMachine& m, const NonHaltProof& proof, uint64_t steps);

// ---------------------------------------------------------------------------
// Classical enumeration

struct ClassicalLeaf {
  enum class Outcome { kHalted, kNonHalting, kUnresolved };
  ClassicalMachine machine;  // transitions never used are filled with 1RZ
  Outcome outcome = Outcome::kUnresolved;
  uint64_t steps = 0;  // halting step count, or steps simulated
  uint64_t rado = 0;
  std::optional<uint64_t> clean;
  // Clean score of the mirror image (Rado score and steps are equal).
  std::optional<uint64_t> mirror_clean;
  std::optional<NonHaltProof> proof;
};

// Tree-normal-form enumeration from the blank tape. Undefined transitions
// are fixed only when the run first needs them, new states are introduced in
// first-use order, and the first move is Right (the Left variants are the
// mirror images). A transition into Halt ends the branch; both written bits
// are emitted. Leaves are visited in a deterministic depth-first order.
void EnumerateClassical(int n, uint64_t step_budget, const std::function<void(const ClassicalLeaf&)>& visit);

// ---------------------------------------------------------------------------
// Reports and certificates

struct Best {
  bool found = false;
  uint64_t value = 0;
  std::string champion;  // least encoding among the maximizers
  uint64_t steps = 0;    // champion's halting step count (classical)
  OrdinalStage stage;    // champion's halting stage (ITTM)

  // Keeps the larger value, ties broken by the smaller encoding.
  bool Offer(uint64_t v, const std::string& encoding);
  void Merge(const Best& other);
};

struct SearchReport {
  enum class Status { kExact, kLowerBound };
  std::string quantity;  // "sigma", "stime" or "sigma_inf"
  int n = 0;
  Convention convention = Convention::kRado;
  uint64_t value = 0;
  Status status = Status::kLowerBound;
  std::string champion;
  uint64_t machines = 0;
  uint64_t unresolved = 0;
  std::string budgets;  // human-readable budget summary

  // One line, e.g. "sigma(2)=4 Exact champion=1RB1LB_1LA1RZ machines=... unresolved=0".
  std::string Summary() const;
};
std::string_view StatusName(SearchReport::Status s);

// A replayable claim that a machine halts with a given score.
struct Certificate {
  enum class Kind { kClassical, kITTM };
  Kind kind = Kind::kClassical;
  std::string machine;  // compact encoding
  Convention convention = Convention::kRado;
  LimitRule rule = LimitRule::kLimsup;
  OrdinalStage stage;  // classical: {0, steps}
  std::string digest;  // final tape digest, hex
  uint64_t score = 0;
  uint64_t step_budget = 0;  // classical
  ExecBudget budget;         // ITTM

  std::string ToJson() const;
  static Certificate FromJson(std::string_view text);
};

Certificate ClassicalCertificate(const ClassicalMachine& m, Convention convention, uint64_t step_budget);
// Nullopt unless m halts with a clean unary output.
std::optional<Certificate> ITTMCertificate(const ITTMachine& m, const ExecBudget& budget, LimitRule rule);
bool VerifyCertificate(const Certificate& c);

// ---------------------------------------------------------------------------
// Classical search

struct ClassicalSearchOptions {
  int n = 1;
  uint64_t step_budget = 100000;
  Convention convention = Convention::kRado;
  int workers = 1;
  int max_n = 4;
  // Nodes with this many fixed transitions become independent work units.
  int split_depth = 3;
  std::string ledger_path;  // empty: no ledger
  // Called for every decided non-halting machine, in enumeration order.
  std::function<void(const ClassicalMachine&, const NonHaltProof&)> on_proof;
};

struct ClassicalSearchResult {
  SearchReport sigma, stime;
  Best sigma_best, stime_best;
  uint64_t halted = 0, decided = 0;
  uint64_t simulated_units = 0;  // work units run (not loaded from a ledger)
};

// Throws std::invalid_argument if n is outside 1..max_n.
ClassicalSearchResult SearchClassical(const ClassicalSearchOptions& options);
SearchReport SigmaClassical(const ClassicalSearchOptions& options);
SearchReport STimeClassical(const ClassicalSearchOptions& options);

// ---------------------------------------------------------------------------
// ITTM enumeration and the Sigma-infinity lower bound

struct ITTMLeaf {
  enum class Outcome { kValue, kUndefined, kCertified, kUnresolved };
  ITTMachine machine;  // unused entries write back, move right and halt
  Outcome outcome = Outcome::kUnresolved;
  uint64_t value = 0;  // f*(0) for kValue
  RunOutcome run;
};

// Tree-normal-form enumeration of n-state ITTMs on the blank input under the
// given executor budget: entries are fixed when first used, states appear in
// first-use order, nothing targets Limit. Deterministic order.
void EnumerateITTM(int n, const ExecBudget& budget, LimitRule rule,
                   const std::function<void(const ITTMLeaf&)>& visit);

// Raw table count (2*(n+1)*8)^(8*(n+1)) written as a decimal estimate, for
// refusal messages.
std::string ITTMSpaceEstimate(int n);

struct SigmaInfOptions {
  int n = 1;
  // The lazy tree grows quickly with the budget; n=1 at {3, 2} already has
  // over ten million leaves.
  ExecBudget budget{2, 2, Detection::kCycleAndDrift};
  LimitRule rule = LimitRule::kLimsup;
  int workers = 1;
  int max_n = 2;
  int split_depth = 2;
  std::string ledger_path;
  std::function<void(const ITTMachine&, const NonHaltingCertified&)> on_certificate;
};

struct SigmaInfResult {
  SearchReport report;
  Best best;
  std::vector<Certificate> certificates;  // champion certificates, one per work unit that found a value
  uint64_t values = 0, undefined = 0, certified = 0;
  uint64_t simulated_units = 0;
};

// Throws std::invalid_argument with the size estimate if n exceeds max_n.
SigmaInfResult SigmaInfLowerBound(const SigmaInfOptions& options);

// A classical machine acting on the ITTM output tape (input and scratch are
// written back). Its Limit row moves right into state 0.
ITTMachine LiftClassical(const ClassicalMachine& m);

}  // namespace ittmbb

#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ittmbb/ittm.h"
#include "test_support.h"

using namespace ittmbb;
using testing::BuildITTM;

TEST_CASE("unary encoding") {
  CHECK(EncodeUnary(0).IsBlank());
  CHECK(EncodeUnary(3).prefix() == Bits{1, 1, 1});
  CHECK(EncodeUnary(3).period() == Bits{0});
  CHECK(EncodeUnary(1).ToString() == "1(0)");
  CHECK(DecodeUnary(EPTape()) == 0u);
  CHECK(DecodeUnary(EPTape::Parse("11")) == 2u);
  CHECK_FALSE(DecodeUnary(EPTape::Parse("(1)")).has_value());
  CHECK_FALSE(DecodeUnary(EPTape::Parse("101")).has_value());
  CHECK_FALSE(DecodeUnary(EPTape::Parse("1(10)")).has_value());
  for (uint64_t n = 0; n < 200; ++n) REQUIRE(DecodeUnary(EncodeUnary(n)) == n);
}

TEST_CASE("ordinal stages") {
  CHECK(OrdinalStage{0, 1}.ToString() == "w*0+1");
  CHECK(OrdinalStage{2, 0}.ToString() == "w*2+0");
  CHECK(OrdinalStage{1, 0}.IsLimit());
  CHECK_FALSE(OrdinalStage{0, 0}.IsLimit());
  CHECK(OrdinalStage{0, 999} < OrdinalStage{1, 0});
  CHECK(OrdinalStage{1, 3} < OrdinalStage{1, 4});
}

TEST_CASE("machine validation") {
  std::vector<ITTMTransition> table(16);
  CHECK_NOTHROW(ITTMachine(1, table));
  CHECK_THROWS_AS(ITTMachine(1, std::vector<ITTMTransition>(15)), std::invalid_argument);
  table[3].next = kLimit;
  CHECK_THROWS_AS(ITTMachine(1, table), std::invalid_argument);
  table[3].next = 1;
  CHECK_THROWS_AS(ITTMachine(1, table), std::invalid_argument);
}

TEST_CASE("successor step") {
  SUBCASE("one-writer halts with output 1") {
    auto m = BuildITTM(1, {{0, 0, {MakeTriple(0, 1, 0), Move::kRight, kHalt}}});
    auto s = SuccessorStep(m, InitialSnapshot());
    CHECK(s.state == kHalt);
    CHECK(s.output == EPTape::Parse("1"));
    CHECK(s.stage == OrdinalStage{0, 1});
    CHECK_THROWS_AS(SuccessorStep(m, s), std::invalid_argument);
  }
  SUBCASE("identity write changes only head and stage") {
    auto m = BuildITTM(1, {{0, 4, {4, Move::kRight, 0}}});
    auto start = InitialSnapshot(EPTape::Parse("1"));
    auto s = SuccessorStep(m, start);
    CHECK(s.input == start.input);
    CHECK(s.output == start.output);
    CHECK(s.scratch == start.scratch);
    CHECK(s.head == 1);
    CHECK(s.state == 0);
    CHECK(s.stage == OrdinalStage{0, 1});
  }
  SUBCASE("left at cell 0 stays") {
    auto m = BuildITTM(1, {{0, 0, {1, Move::kLeft, 0}}});
    auto s = SuccessorStep(m, InitialSnapshot());
    CHECK(s.head == 0);
    CHECK(s.scratch == EPTape::Parse("1"));
  }
}

TEST_CASE("limit snapshot rules") {
  const CellHistory zero = CellHistory::Constant(EPTape());
  auto blank = LimitSnapshot(zero, zero, zero, LimitRule::kLimsup, 0);
  CHECK(blank.state == kLimit);
  CHECK(blank.head == 0);
  CHECK(blank.stage == OrdinalStage{1, 0});
  CHECK(blank.input.IsBlank());
  CHECK(blank.StateName() == "LIM");

  CellHistory alt{{CellBehavior::kAlternates}, {CellBehavior::kConstant0}};
  CHECK(LimitSnapshot(zero, zero, alt, LimitRule::kLimsup, 0).scratch == EPTape::Parse("1"));
  CHECK(LimitSnapshot(zero, zero, alt, LimitRule::kLiminf, 0).scratch.IsBlank());
  CHECK(LimitSnapshot(zero, zero, alt, LimitRule::kLimsup, 4).stage == OrdinalStage{5, 0});
  CHECK_THROWS_AS(LimitSnapshot(zero, CellHistory{{CellBehavior::kConstant1}, {}}, zero, LimitRule::kLimsup, 0),
                  std::invalid_argument);
}

TEST_CASE("limit rule properties over random histories") {
  std::mt19937_64 rng(5);
  auto random_history = [&](bool allow_alternation) {
    CellHistory h;
    const int choices = allow_alternation ? 3 : 2;
    for (size_t i = rng() % 5; i > 0; --i) h.prefix.push_back(static_cast<CellBehavior>(rng() % choices));
    for (size_t i = 1 + rng() % 3; i > 0; --i) h.period.push_back(static_cast<CellBehavior>(rng() % choices));
    return h;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const bool alternation = trial % 2 == 0;
    CellHistory a = random_history(alternation), b = random_history(alternation), c = random_history(alternation);
    auto sup = LimitSnapshot(a, b, c, LimitRule::kLimsup, 0);
    auto inf = LimitSnapshot(a, b, c, LimitRule::kLiminf, 0);
    for (TapeId id : {TapeId::kInput, TapeId::kOutput, TapeId::kScratch}) {
      for (uint64_t cell = 0; cell < 40; ++cell) REQUIRE(sup.tape(id).At(cell) >= inf.tape(id).At(cell));
      REQUIRE(EPTape(sup.tape(id).prefix(), sup.tape(id).period()) == sup.tape(id));
    }
    if (!alternation) CHECK(sup.SameConfiguration(inf));
  }
}

TEST_CASE("machine encoding round-trip") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = testing::RandomITTM(rng, 1 + trial % 4);
    REQUIRE(ITTMachine::Decode(m.Encode()) == m);
  }
  CHECK_THROWS(ITTMachine::Decode("nonsense"));
}

TEST_CASE("random successor steps keep tapes canonical and head in range") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = testing::RandomITTM(rng, 3, 0.02);
    Snapshot s = InitialSnapshot(EncodeUnary(rng() % 4));
    for (int i = 0; i < 200 && s.state != kHalt; ++i) {
      Snapshot next = SuccessorStep(m, s);
      const Triple r = s.Read();
      const auto& t = m.At(s.state, r);
      CHECK(next.head == (t.move == Move::kRight ? s.head + 1 : (s.head == 0 ? 0 : s.head - 1)));
      CHECK(next.Read() == (next.head == s.head ? t.write : next.Read()));
      for (TapeId id : {TapeId::kInput, TapeId::kOutput, TapeId::kScratch}) {
        const EPTape& tape = next.tape(id);
        REQUIRE(EPTape(tape.prefix(), tape.period()) == tape);
        REQUIRE(tape.At(s.head) == TripleBit(t.write, id));
      }
      s = std::move(next);
    }
  }
}

#include <random>

#include "doctest.h"
#include "ittmbb/format.h"
#include "ittmbb/search.h"
#include "test_support.h"

using namespace ittmbb;

namespace {

template <typename T>
std::vector<T> Sample(std::vector<T> pool, size_t k, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  if (pool.size() > k) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());
  return pool;
}

ParseError ErrorOf(const std::string& text) {
  try {
    ParseMachine(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("document parsed: " << text);
  return ParseError(0, 0, "");
}

const char* kBB2 =
    "classical states=2\n"
    "S0 0 -> 1 R S1\n"
    "S0 1 -> 1 L S1\n"
    "S1 0 -> 1 L S0\n"
    "S1 1 -> 1 R HALT\n";

std::string OneWriterText(const std::string& limit_row_target = "S0") {
  std::string s = "ittm states=1 rule=liminf\n";
  for (int row = 0; row < 2; ++row) {
    for (int x = 0; x < 8; ++x) {
      const std::string t = "(" + std::to_string(x >> 2) + "," + std::to_string((x >> 1) & 1) + "," +
                            std::to_string(x & 1) + ")";
      s += row == 0 ? "S0 " : "LIM ";
      s += t + " -> " + (row == 0 && x == 0 ? "(0,1,0) R HALT" : t + " R " + (row ? limit_row_target : "HALT"));
      s += "\n";
    }
  }
  return s;
}

}  // namespace

TEST_CASE("classical documents") {
  const auto m = ParseClassical(kBB2);
  CHECK(m.Encode() == "1RB1LB_1LA1RZ");
  CHECK(Serialize(m) == kBB2);
  // Comments, blank lines, CRLF and reordered lines are accepted.
  const auto loose = ParseClassical(
      "# champion\r\nclassical   states=2\r\n\r\nS1 1 -> 1 R HALT # stop\r\nS1 0 -> 1 L S0\nS0 1 -> 1 L S1\n"
      "  S0 0 -> 1 R S1\n");
  CHECK(loose == m);
  CHECK(std::holds_alternative<ClassicalMachine>(ParseMachine(kBB2)));
  CHECK_THROWS_AS(ParseITTM(kBB2), ParseError);
}

TEST_CASE("ITTM documents") {
  const auto doc = ParseITTM(OneWriterText());
  CHECK(doc.rule == LimitRule::kLiminf);
  CHECK(doc.machine.At(0, 0) == ITTMTransition{MakeTriple(0, 1, 0), Move::kRight, kHalt});
  CHECK(doc.machine.At(kLimit, 3) == ITTMTransition{3, Move::kRight, 0});
  CHECK(Serialize(doc.machine, doc.rule) == OneWriterText());
  CHECK_THROWS_AS(ParseClassical(OneWriterText()), ParseError);
}

TEST_CASE("errors carry line and column") {
  SUBCASE("limit state as a target") {
    const auto e = ErrorOf(OneWriterText("LIM"));
    CHECK(e.line() == 10);
    CHECK(e.column() == 26);
    CHECK(e.reason() == "limit state not a valid target");
  }
  SUBCASE("missing transition") {
    std::string text = kBB2;
    text.erase(text.find("S1 0"), std::string("S1 0 -> 1 L S0\n").size());
    const auto e = ErrorOf(text);
    CHECK(e.line() == 5);
    CHECK(e.column() == 1);
    CHECK(e.reason() == "missing transition (S1,0)");
  }
  SUBCASE("duplicate transition") {
    const auto e = ErrorOf(std::string(kBB2) + "S0 1 -> 0 R S0\n");
    CHECK(e.line() == 6);
    CHECK(e.reason() == "duplicate transition (S0,1)");
  }
  SUBCASE("state out of range") {
    const auto e = ErrorOf("classical states=1\nS0 0 -> 1 R S1\nS0 1 -> 1 R HALT\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 13);
  }
  SUBCASE("bad direction") {
    const auto e = ErrorOf("classical states=1\nS0 0 -> 1 X HALT\nS0 1 -> 1 R HALT\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 11);
  }
  SUBCASE("bad triple") {
    const auto e = ErrorOf("ittm states=1 rule=limsup\nS0 (0,2,0) -> (0,0,0) R HALT\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  SUBCASE("headers") {
    CHECK(ErrorOf("").line() == 1);
    CHECK(ErrorOf("# only a comment\n").line() == 1);
    CHECK(ErrorOf("tm states=1\n").line() == 1);
    CHECK(ErrorOf("ittm states=1 rule=lim\n").column() == 15);
    CHECK(ErrorOf("classical states=0\n").column() == 11);
    CHECK(ErrorOf("classical states=1 extra\n").line() == 1);
  }
}

TEST_CASE("mangled documents fail only with ParseError") {
  std::mt19937_64 rng(17);
  const std::string alphabet = "01SLRHALTIM(),->= \n#x";
  for (const std::string base : {std::string(kBB2), OneWriterText()}) {
    for (int trial = 0; trial < 2000; ++trial) {
      std::string text = base;
      const int edits = 1 + static_cast<int>(rng() % 3);
      for (int e = 0; e < edits; ++e) {
        const size_t at = rng() % text.size();
        switch (rng() % 3) {
          case 0:
            text[at] = alphabet[rng() % alphabet.size()];
            break;
          case 1:
            text.erase(at, 1);
            break;
          default:
            text.insert(at, 1, alphabet[rng() % alphabet.size()]);
        }
      }
      try {
        const auto doc = ParseMachine(text);
        // Whatever parses must reserialize to a fixed point.
        CHECK(Serialize(ParseMachine(Serialize(doc))) == Serialize(doc));
      } catch (const ParseError& e) {
        CHECK(e.line() >= 1);
        CHECK(e.column() >= 1);
      }
    }
  }
}

TEST_CASE("1000 enumerated machines round-trip bit-identically") {
  std::mt19937_64 rng(2024);
  std::vector<ClassicalMachine> classical;
  for (int n = 1; n <= 3; ++n) {
    EnumerateClassical(n, 200, [&](const ClassicalLeaf& l) { classical.push_back(l.machine); });
  }
  std::vector<ITTMachine> ittm;
  EnumerateITTM(1, ExecBudget{2, 1}, LimitRule::kLimsup, [&](const ITTMLeaf& l) { ittm.push_back(l.machine); });
  classical = Sample(classical, 400, rng);
  ittm = Sample(ittm, 300, rng);
  for (int i = 0; i < 300; ++i) ittm.push_back(testing::RandomITTM(rng, 1 + static_cast<int>(rng() % 4), 0.3));
  REQUIRE(classical.size() + ittm.size() == 1000);

  for (const auto& m : classical) {
    const auto text = Serialize(m);
    const auto back = ParseClassical(text);
    CHECK(back == m);
    CHECK(Serialize(back) == text);
  }
  for (const auto& m : ittm) {
    for (auto rule : {LimitRule::kLimsup, LimitRule::kLiminf}) {
      const auto text = Serialize(m, rule);
      const auto back = ParseITTM(text);
      CHECK(back.machine == m);
      CHECK(back.rule == rule);
      CHECK(Serialize(back.machine, back.rule) == text);
    }
  }
}

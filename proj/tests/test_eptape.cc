#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ittmbb/eptape.h"

using namespace ittmbb;

namespace {

Bits RandomWord(std::mt19937_64& rng, size_t lo, size_t hi) {
  std::uniform_int_distribution<size_t> len(lo, hi);
  std::uniform_int_distribution<int> bit(0, 1);
  Bits w(len(rng));
  for (auto& b : w) b = static_cast<uint8_t>(bit(rng));
  return w;
}

// Naive denotation of prefix . period^omega.
uint8_t Denote(const Bits& prefix, const Bits& period, uint64_t cell) {
  return cell < prefix.size() ? prefix[cell] : period[(cell - prefix.size()) % period.size()];
}

}  // namespace

TEST_CASE("blank tape and parsing") {
  EPTape blank;
  CHECK(blank.IsBlank());
  CHECK(blank.ToString() == "(0)");
  CHECK(EPTape::Parse("") == blank);
  CHECK(EPTape::Parse("000(0)") == blank);
  CHECK(EPTape::Parse("110").ToString() == "11(0)");
  CHECK(EPTape::Parse("(1)").period() == Bits{1});
  CHECK_FALSE(EPTape::Parse("(1)").FinitelyManyOnes());
  CHECK_THROWS_AS(EPTape::Parse("1(2)"), std::invalid_argument);
  CHECK_THROWS_AS(EPTape::Parse("1()"), std::invalid_argument);
  CHECK_THROWS_AS(EPTape::Parse("1(0"), std::invalid_argument);
  CHECK_THROWS_AS(EPTape(Bits{1}, Bits{}), std::invalid_argument);
}

TEST_CASE("canonical form folds prefix and shortens period") {
  CHECK(EPTape::Parse("0101(01)") == EPTape::Parse("(01)"));
  CHECK(EPTape::Parse("(0101)") == EPTape::Parse("(01)"));
  CHECK(EPTape::Parse("1(01)").ToString() == "(10)");
  CHECK(EPTape::Parse("11(111)").ToString() == "(1)");
  CHECK(EPTape::Parse("10(010)").ToString() == "(100)");
  CHECK(EPTape::Parse("11(01)").ToString() == "1(10)");
}

TEST_CASE("canonical equality matches denotation on random tapes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    Bits p1 = RandomWord(rng, 0, 6), q1 = RandomWord(rng, 1, 4);
    Bits p2 = RandomWord(rng, 0, 6), q2 = RandomWord(rng, 1, 4);
    EPTape a(p1, q1), b(p2, q2);
    // Two eventually periodic words with prefixes <= 6 and periods <= 4 agree
    // everywhere iff they agree on the first 6 + lcm bound cells.
    bool same = true;
    for (uint64_t c = 0; c < 6 + 12 * 2; ++c) same &= Denote(p1, q1, c) == Denote(p2, q2, c);
    CHECK((a == b) == same);
    for (uint64_t c = 0; c < 40; ++c) REQUIRE(a.At(c) == Denote(p1, q1, c));
    // Idempotence.
    CHECK(EPTape(a.prefix(), a.period()) == a);
    CHECK(EPTape::Parse(a.ToString()) == a);
  }
}

TEST_CASE("With, Drop, PrependedBy and Take agree with the denotation") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    Bits p = RandomWord(rng, 0, 5), q = RandomWord(rng, 1, 3);
    EPTape t(p, q);
    const uint64_t cell = rng() % 12;
    const uint8_t v = static_cast<uint8_t>(rng() % 2);
    EPTape w = t.With(cell, v);
    for (uint64_t c = 0; c < 30; ++c) REQUIRE(w.At(c) == (c == cell ? v : t.At(c)));
    const uint64_t k = rng() % 9;
    EPTape d = t.Drop(k);
    for (uint64_t c = 0; c < 30; ++c) REQUIRE(d.At(c) == t.At(c + k));
    Bits head = RandomWord(rng, 0, 4);
    EPTape pre = t.PrependedBy(head);
    for (uint64_t c = 0; c < 30; ++c) REQUIRE(pre.At(c) == (c < head.size() ? head[c] : t.At(c - head.size())));
    Bits taken = t.Take(k);
    REQUIRE(taken.size() == k);
    CHECK(t.Drop(k).PrependedBy(taken) == t);
  }
}

TEST_CASE("fingerprint respects equality") {
  CHECK(EPTape::Parse("0101(01)").Fingerprint() == EPTape::Parse("(01)").Fingerprint());
  CHECK(EPTape::Parse("(01)").Fingerprint() != EPTape::Parse("(10)").Fingerprint());
}

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ittmbb {

using Bits = std::vector<uint8_t>;

// An infinite one-way binary tape written as prefix . period^omega.
//
// Instances are always canonical: the period is primitive and the prefix is
// as short as possible, so two tapes denote the same sequence iff they
// compare equal.
class EPTape {
 public:
  // Blank tape: prefix "", period "0".
  EPTape();
  // Throws std::invalid_argument if period is empty or a value is not 0/1.
  EPTape(Bits prefix, Bits period);

  // Parses "110(0)", "(1)", or a bare finite word "110" (implicit "(0)").
  static EPTape Parse(std::string_view text);

  uint8_t At(uint64_t cell) const {
    if (cell < prefix_.size()) return prefix_[cell];
    return period_[(cell - prefix_.size()) % period_.size()];
  }

  EPTape With(uint64_t cell, uint8_t value) const;
  // The suffix starting at `cell`, re-indexed from 0.
  EPTape Drop(uint64_t cell) const;
  // `head` followed by this tape.
  EPTape PrependedBy(const Bits& head) const;

  // Cells [0, n) as an explicit word.
  Bits Take(uint64_t n) const;

  bool FinitelyManyOnes() const { return period_.size() == 1 && period_[0] == 0; }
  bool IsBlank() const { return prefix_.empty() && FinitelyManyOnes(); }

  const Bits& prefix() const { return prefix_; }
  const Bits& period() const { return period_; }

  std::string ToString() const;
  uint64_t Fingerprint() const;

  friend bool operator==(const EPTape&, const EPTape&) = default;
  friend auto operator<=>(const EPTape&, const EPTape&) = default;

 private:
  void Canonicalize();

  Bits prefix_;
  Bits period_;
};

}  // namespace ittmbb

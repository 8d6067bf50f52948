#include "ittmbb/eptape.h"

#include <algorithm>
#include <stdexcept>

#include "ittmbb/digest.h"

namespace ittmbb {

namespace {

void CheckBits(const Bits& bits) {
  for (uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("tape cell value must be 0 or 1");
  }
}

Bits ParseWord(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bad tape character '" + std::string(1, c) + "'");
    }
    out.push_back(static_cast<uint8_t>(c - '0'));
  }
  return out;
}

}  // namespace

EPTape::EPTape() : period_{0} {}

EPTape::EPTape(Bits prefix, Bits period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) throw std::invalid_argument("EPTape period must be nonempty");
  CheckBits(prefix_);
  CheckBits(period_);
  Canonicalize();
}

EPTape EPTape::Parse(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos) return EPTape(ParseWord(text), Bits{0});
  if (text.back() != ')' || text.find('(', open + 1) != std::string_view::npos) {
    throw std::invalid_argument("malformed tape '" + std::string(text) + "'");
  }
  return EPTape(ParseWord(text.substr(0, open)),
                ParseWord(text.substr(open + 1, text.size() - open - 2)));
}

void EPTape::Canonicalize() {
  // Primitive root of the period.
  const size_t n = period_.size();
  for (size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (size_t i = p; i < n && ok; ++i) ok = period_[i] == period_[i - p];
    if (ok) {
      period_.resize(p);
      break;
    }
  }
  // Fold trailing prefix cells into the period by rotation.
  while (!prefix_.empty() && prefix_.back() == period_.back()) {
    prefix_.pop_back();
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
  }
}

EPTape EPTape::With(uint64_t cell, uint8_t value) const {
  if (value > 1) throw std::invalid_argument("tape cell value must be 0 or 1");
  if (At(cell) == value) return *this;
  Bits head = Take(cell + 1);
  head[cell] = value;
  return Drop(cell + 1).PrependedBy(head);
}

EPTape EPTape::Drop(uint64_t cell) const {
  if (cell <= prefix_.size()) {
    return EPTape(Bits(prefix_.begin() + static_cast<long>(cell), prefix_.end()), period_);
  }
  const uint64_t offset = (cell - prefix_.size()) % period_.size();
  Bits period(period_.size());
  for (size_t i = 0; i < period_.size(); ++i) period[i] = period_[(offset + i) % period_.size()];
  return EPTape({}, std::move(period));
}

EPTape EPTape::PrependedBy(const Bits& head) const {
  Bits prefix = head;
  prefix.insert(prefix.end(), prefix_.begin(), prefix_.end());
  return EPTape(std::move(prefix), period_);
}

Bits EPTape::Take(uint64_t n) const {
  Bits out(n);
  for (uint64_t i = 0; i < n; ++i) out[i] = At(i);
  return out;
}

std::string EPTape::ToString() const {
  std::string s;
  s.reserve(prefix_.size() + period_.size() + 2);
  for (uint8_t b : prefix_) s.push_back(static_cast<char>('0' + b));
  s.push_back('(');
  for (uint8_t b : period_) s.push_back(static_cast<char>('0' + b));
  s.push_back(')');
  return s;
}

uint64_t EPTape::Fingerprint() const { return Fnv1a64(ToString()); }

}  // namespace ittmbb

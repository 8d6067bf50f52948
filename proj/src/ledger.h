#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ittmbb::internal {

inline constexpr int kLedgerSchema = 1;

// Append-only JSONL file. Loading skips a torn last line (an interrupted
// append) but rejects malformed lines elsewhere.
class Ledger {
 public:
  explicit Ledger(std::string path);

  bool enabled() const { return !path_.empty(); }
  const std::vector<nlohmann::json>& records() const { return records_; }
  // Writes one line and flushes.
  void Append(nlohmann::json record);

 private:
  std::string path_;
  std::vector<nlohmann::json> records_;
};

// Fills schema_version and timestamp.
nlohmann::json NewRecord(const std::string& kind);

// Records of `kind` whose n, convention and budgets match.
std::vector<const nlohmann::json*> Matching(const Ledger& ledger, const std::string& kind, int n,
                                            const std::string& convention, const nlohmann::json& budgets);

}  // namespace ittmbb::internal

#include "ledger.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace ittmbb::internal {

Ledger::Ledger(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    const bool last = end == std::string::npos || end + 1 == text.size();
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string line = text.substr(pos, end - pos);
    if (!line.empty()) {
      try {
        records_.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::parse_error&) {
        if (!last) throw std::runtime_error(path_ + ":" + std::to_string(line_no) + ": malformed ledger record");
        // An interrupted append: cut it off so new records start cleanly.
        std::filesystem::resize_file(path_, pos);
        return;
      }
    }
    pos = end + 1;
  }
  if (!text.empty() && text.back() != '\n') std::ofstream(path_, std::ios::app) << '\n';
}

void Ledger::Append(nlohmann::json record) {
  if (!enabled()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot open ledger " + path_);
  out << record.dump() << '\n';
  out.flush();
  records_.push_back(std::move(record));
}

nlohmann::json NewRecord(const std::string& kind) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  nlohmann::json j;
  j["schema_version"] = kLedgerSchema;
  j["kind"] = kind;
  j["timestamp"] = buf;
  return j;
}

std::vector<const nlohmann::json*> Matching(const Ledger& ledger, const std::string& kind, int n,
                                            const std::string& convention, const nlohmann::json& budgets) {
  std::vector<const nlohmann::json*> out;
  for (const auto& r : ledger.records()) {
    if (r.value("kind", "") == kind && r.value("n", -1) == n && r.value("convention", "") == convention &&
        r.value("budgets", nlohmann::json()) == budgets) {
      out.push_back(&r);
    }
  }
  return out;
}

}  // namespace ittmbb::internal

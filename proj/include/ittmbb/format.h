#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "ittmbb/classical.h"
#include "ittmbb/ittm.h"

namespace ittmbb {

// Machine text documents; the grammar is in docs/grammar.md.
//
//   classical states=2
//   S0 0 -> 1 R S1
//   ...
//
//   ittm states=1 rule=limsup
//   S0 (0,0,0) -> (0,1,0) R HALT
//   ...
//   LIM (0,0,0) -> (0,0,0) R S0

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& reason)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(reason) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  int line_, column_;
  std::string reason_;
};

struct ITTMDocument {
  ITTMachine machine;
  LimitRule rule = LimitRule::kLimsup;
};

using MachineDocument = std::variant<ClassicalMachine, ITTMDocument>;

// Canonical form: header, then one line per transition in state order (Limit
// last) and read order, no comments, trailing newline.
std::string Serialize(const ClassicalMachine& m);
std::string Serialize(const ITTMachine& m, LimitRule rule);
std::string Serialize(const MachineDocument& doc);

// Throws ParseError on syntax errors, duplicate or missing transitions, and
// targets outside the machine (including LIM).
MachineDocument ParseMachine(std::string_view text);
ClassicalMachine ParseClassical(std::string_view text);
ITTMDocument ParseITTM(std::string_view text);

}  // namespace ittmbb

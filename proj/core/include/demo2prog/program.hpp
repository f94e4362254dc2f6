#pragma once

#include <string>
#include <variant>
#include <vector>

namespace demo2prog {

struct ProgramNode;

/// A sequence of statements. Loop bodies and whole programs are both
/// sequences, so a program is the top-level Seq.
using Program = std::vector<ProgramNode>;

struct ExecNode {
  int symbol = 0;
};

/// count >= 2 repetitions of the body.
struct LoopNode {
  int count = 2;
  Program body;
};

/// Forward traversal of `symbols` followed by the reverse path, sharing the
/// centre element; expands to 2*n-1 symbols. Requires n >= 4 so the
/// expansion is longer than 6.
struct PalindromeNode {
  std::vector<int> symbols;
};

struct ProgramNode {
  std::variant<ExecNode, LoopNode, PalindromeNode> node;
};

bool operator==(const ProgramNode& a, const ProgramNode& b);
inline bool operator!=(const ProgramNode& a, const ProgramNode& b) {
  return !(a == b);
}

ProgramNode make_exec(int symbol);
ProgramNode make_loop(int count, Program body);
ProgramNode make_palindrome(std::vector<int> symbols);

/// Throws ConfigError on loop counts < 2 or palindrome lists shorter than 4.
void validate(const Program& program);

/// Flatten to the executed symbol sequence.
std::vector<int> expand(const Program& program);

/// Number of statements in the printed form (loop headers count as one).
int statement_count(const Program& program);

/// Textual program form:
///   exec N
///   loop N { ... }
///   palin [a,b,c,d]
std::string pretty_print(const Program& program);

/// Inverse of pretty_print. Throws ConfigError with a line number on
/// malformed input.
Program parse_program(const std::string& text);

}  // namespace demo2prog

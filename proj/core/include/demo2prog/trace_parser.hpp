#pragma once

#include <vector>

#include "demo2prog/program.hpp"

namespace demo2prog {

/// Replace maximal consecutive repeats with Loop nodes, recursing both into
/// loop bodies and into the flanks, until no sub-sequence repeats twice in a
/// row. Candidate runs are ranked by repeat count, then unit length, then
/// earliest start.
Program roll_loops(const std::vector<int>& trace);

/// Fold the longest odd palindromic run of length >= 7 inside every literal
/// stretch (loop bodies included) into a Palindrome node, repeating until
/// none remain. Ties go to the earliest start; even palindromes are left
/// alone.
Program fold_palindromes(const Program& program);

/// roll_loops, then fold_palindromes. expand(induce_program(t)) == t.
Program induce_program(const std::vector<int>& trace);

}  // namespace demo2prog

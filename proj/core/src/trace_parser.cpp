#include "demo2prog/trace_parser.hpp"

#include <span>

namespace demo2prog {

namespace {

struct LoopRun {
  std::size_t start = 0;
  std::size_t unit = 0;
  std::size_t reps = 0;

  bool better_than(const LoopRun& other) const {
    if (reps != other.reps) return reps > other.reps;
    if (unit != other.unit) return unit > other.unit;
    return start < other.start;
  }
};

// Exhaustive scan over (start, unit length) pairs for the best repeated run.
bool find_best_run(std::span<const int> trace, LoopRun& best) {
  bool found = false;
  const std::size_t n = trace.size();
  for (std::size_t start = 0; start < n; ++start) {
    for (std::size_t unit = 1; unit <= (n - start) / 2; ++unit) {
      std::size_t reps = 1;
      while (start + (reps + 1) * unit <= n) {
        bool match = true;
        for (std::size_t i = 0; i < unit; ++i) {
          if (trace[start + reps * unit + i] != trace[start + i]) {
            match = false;
            break;
          }
        }
        if (!match) break;
        ++reps;
      }
      if (reps < 2) continue;
      const LoopRun run{start, unit, reps};
      if (!found || run.better_than(best)) {
        best = run;
        found = true;
      }
    }
  }
  return found;
}

void roll_into(std::span<const int> trace, Program& out) {
  LoopRun run;
  if (!find_best_run(trace, run)) {
    for (int s : trace) out.push_back(make_exec(s));
    return;
  }
  roll_into(trace.first(run.start), out);
  Program body;
  roll_into(trace.subspan(run.start, run.unit), body);
  out.push_back(make_loop(static_cast<int>(run.reps), std::move(body)));
  roll_into(trace.subspan(run.start + run.reps * run.unit), out);
}

struct PalRun {
  std::size_t start = 0;
  std::size_t length = 0;  // odd, >= 7
};

bool find_longest_odd_palindrome(const std::vector<int>& s, PalRun& best) {
  const std::size_t n = s.size();
  best.length = 0;
  for (std::size_t center = 0; center < n; ++center) {
    std::size_t radius = 0;
    while (center >= radius + 1 && center + radius + 1 < n &&
           s[center - radius - 1] == s[center + radius + 1]) {
      ++radius;
    }
    const std::size_t len = 2 * radius + 1;
    const std::size_t start = center - radius;
    if (len >= 7 &&
        (len > best.length || (len == best.length && start < best.start))) {
      best.length = len;
      best.start = start;
    }
  }
  return best.length >= 7;
}

void fold_literal(const std::vector<int>& syms, Program& out) {
  PalRun pal;
  if (!find_longest_odd_palindrome(syms, pal)) {
    for (int s : syms) out.push_back(make_exec(s));
    return;
  }
  fold_literal({syms.begin(),
                syms.begin() + static_cast<std::ptrdiff_t>(pal.start)},
               out);
  const std::size_t half = (pal.length + 1) / 2;  // centre included
  out.push_back(make_palindrome(
      {syms.begin() + static_cast<std::ptrdiff_t>(pal.start),
       syms.begin() + static_cast<std::ptrdiff_t>(pal.start + half)}));
  fold_literal({syms.begin() +
                    static_cast<std::ptrdiff_t>(pal.start + pal.length),
                syms.end()},
               out);
}

}  // namespace

Program roll_loops(const std::vector<int>& trace) {
  Program out;
  roll_into(std::span<const int>(trace), out);
  return out;
}

Program fold_palindromes(const Program& program) {
  Program out;
  std::vector<int> literal;
  auto flush = [&] {
    if (!literal.empty()) {
      fold_literal(literal, out);
      literal.clear();
    }
  };
  for (const auto& stmt : program) {
    if (const auto* exec = std::get_if<ExecNode>(&stmt.node)) {
      literal.push_back(exec->symbol);
    } else if (const auto* loop = std::get_if<LoopNode>(&stmt.node)) {
      flush();
      out.push_back(
          make_loop(loop->count, fold_palindromes(loop->body)));
    } else {
      flush();
      out.push_back(stmt);
    }
  }
  flush();
  return out;
}

Program induce_program(const std::vector<int>& trace) {
  return fold_palindromes(roll_loops(trace));
}

}  // namespace demo2prog

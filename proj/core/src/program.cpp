#include "demo2prog/program.hpp"

#include <cctype>
#include <sstream>

#include "demo2prog/errors.hpp"

namespace demo2prog {

bool operator==(const ProgramNode& a, const ProgramNode& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* ea = std::get_if<ExecNode>(&a.node)) {
    return ea->symbol == std::get<ExecNode>(b.node).symbol;
  }
  if (const auto* la = std::get_if<LoopNode>(&a.node)) {
    const auto& lb = std::get<LoopNode>(b.node);
    return la->count == lb.count && la->body == lb.body;
  }
  return std::get<PalindromeNode>(a.node).symbols ==
         std::get<PalindromeNode>(b.node).symbols;
}

ProgramNode make_exec(int symbol) { return {ExecNode{symbol}}; }

ProgramNode make_loop(int count, Program body) {
  return {LoopNode{count, std::move(body)}};
}

ProgramNode make_palindrome(std::vector<int> symbols) {
  return {PalindromeNode{std::move(symbols)}};
}

void validate(const Program& program) {
  for (const auto& stmt : program) {
    if (const auto* loop = std::get_if<LoopNode>(&stmt.node)) {
      if (loop->count < 2) throw ConfigError("loop count must be >= 2");
      validate(loop->body);
    } else if (const auto* pal = std::get_if<PalindromeNode>(&stmt.node)) {
      if (pal->symbols.size() < 4) {
        throw ConfigError("palindrome list must have at least 4 symbols");
      }
    }
  }
}

namespace {

void expand_into(const Program& program, std::vector<int>& out) {
  for (const auto& stmt : program) {
    if (const auto* exec = std::get_if<ExecNode>(&stmt.node)) {
      out.push_back(exec->symbol);
    } else if (const auto* loop = std::get_if<LoopNode>(&stmt.node)) {
      for (int i = 0; i < loop->count; ++i) expand_into(loop->body, out);
    } else {
      const auto& syms = std::get<PalindromeNode>(stmt.node).symbols;
      out.insert(out.end(), syms.begin(), syms.end());
      for (auto it = syms.rbegin() + 1; it != syms.rend(); ++it) {
        out.push_back(*it);
      }
    }
  }
}

}  // namespace

std::vector<int> expand(const Program& program) {
  std::vector<int> out;
  expand_into(program, out);
  return out;
}

int statement_count(const Program& program) {
  int n = 0;
  for (const auto& stmt : program) {
    ++n;
    if (const auto* loop = std::get_if<LoopNode>(&stmt.node)) {
      n += statement_count(loop->body);
    }
  }
  return n;
}

namespace {

void print_into(const Program& program, std::ostringstream& os, int depth) {
  const std::string indent(2 * static_cast<std::size_t>(depth), ' ');
  for (const auto& stmt : program) {
    if (const auto* exec = std::get_if<ExecNode>(&stmt.node)) {
      os << indent << "exec " << exec->symbol << "\n";
    } else if (const auto* loop = std::get_if<LoopNode>(&stmt.node)) {
      os << indent << "loop " << loop->count << " {\n";
      print_into(loop->body, os, depth + 1);
      os << indent << "}\n";
    } else {
      const auto& syms = std::get<PalindromeNode>(stmt.node).symbols;
      os << indent << "palin [";
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i) os << ",";
        os << syms[i];
      }
      os << "]\n";
    }
  }
}

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '{' || c == '}') {
      tokens.push_back({std::string(1, c), line});
      ++i;
    } else if (c == '[') {
      // bracket list is one token, commas and all
      std::size_t j = text.find(']', i);
      if (j == std::string::npos) {
        throw ConfigError("line " + std::to_string(line) +
                          ": unterminated '['");
      }
      tokens.push_back({text.substr(i, j - i + 1), line});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '{' && text[j] != '}' && text[j] != '[') {
        ++j;
      }
      tokens.push_back({text.substr(i, j - i), line});
      i = j;
    }
  }
  return tokens;
}

int parse_int(const Token& tok, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok.text, &pos);
    if (pos != tok.text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(tok.line) + ": expected " +
                      what + ", got '" + tok.text + "'");
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program parse_block(bool top_level) {
    Program program;
    while (pos_ < tokens_.size()) {
      const Token& tok = tokens_[pos_];
      if (tok.text == "}") {
        if (top_level) {
          throw ConfigError("line " + std::to_string(tok.line) +
                            ": unmatched '}'");
        }
        return program;
      }
      program.push_back(parse_statement());
    }
    if (!top_level) throw ConfigError("unexpected end of program: missing '}'");
    return program;
  }

 private:
  ProgramNode parse_statement() {
    const Token tok = take("statement");
    if (tok.text == "exec") {
      return make_exec(parse_int(take("symbol id"), "symbol id"));
    }
    if (tok.text == "loop") {
      const int count = parse_int(take("loop count"), "loop count");
      if (count < 2) {
        throw ConfigError("line " + std::to_string(tok.line) +
                          ": loop count must be >= 2");
      }
      expect("{");
      Program body = parse_block(false);
      expect("}");
      return make_loop(count, std::move(body));
    }
    if (tok.text == "palin") {
      const Token list = take("symbol list");
      if (list.text.size() < 2 || list.text.front() != '[' ||
          list.text.back() != ']') {
        throw ConfigError("line " + std::to_string(list.line) +
                          ": expected [a,b,...] after palin");
      }
      std::vector<int> syms;
      std::stringstream ss(list.text.substr(1, list.text.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        syms.push_back(parse_int({item, list.line}, "symbol id"));
      }
      if (syms.size() < 4) {
        throw ConfigError("line " + std::to_string(list.line) +
                          ": palindrome list must have at least 4 symbols");
      }
      return make_palindrome(std::move(syms));
    }
    throw ConfigError("line " + std::to_string(tok.line) +
                      ": unknown statement '" + tok.text + "'");
  }

  Token take(const std::string& what) {
    if (pos_ >= tokens_.size()) {
      throw ConfigError("unexpected end of program: expected " + what);
    }
    return tokens_[pos_++];
  }

  void expect(const std::string& text) {
    const Token tok = take("'" + text + "'");
    if (tok.text != text) {
      throw ConfigError("line " + std::to_string(tok.line) + ": expected '" +
                        text + "', got '" + tok.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string pretty_print(const Program& program) {
  std::ostringstream os;
  print_into(program, os, 0);
  return os.str();
}

Program parse_program(const std::string& text) {
  Parser parser(tokenize(text));
  Program program = parser.parse_block(true);
  validate(program);
  return program;
}

}  // namespace demo2prog

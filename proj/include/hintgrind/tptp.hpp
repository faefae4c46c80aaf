// Copyright 2026 The Hintgrind Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reader and writer for the clausal (cnf) fragment of TPTP:
//
//   cnf(<name>, <role>, (<literal> | ... | <literal>)).
//
// Literals are `p(t, ...)`, `~p(t, ...)`, `s = t` or `s != t`. Variables start
// with an uppercase letter. `$false` stands for the empty clause.

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hintgrind/logic.hpp"

namespace hintgrind {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::string token, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                           (token.empty() ? std::string() : " near '" + token + "'")),
        line_(line),
        column_(column),
        token_(std::move(token)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  int line_;
  int column_;
  std::string token_;
};

class ArityError : public std::runtime_error {
 public:
  ArityError(std::string symbol, int first, int second)
      : std::runtime_error("symbol '" + symbol + "' used with arity " + std::to_string(first) +
                           " and " + std::to_string(second)),
        symbol_(std::move(symbol)),
        first_(first),
        second_(second) {}

  const std::string& symbol() const { return symbol_; }
  int first_arity() const { return first_; }
  int second_arity() const { return second_; }

 private:
  std::string symbol_;
  int first_;
  int second_;
};

enum class Role : std::uint8_t { Axiom, Hypothesis, NegatedConjecture, Plain };

inline std::string_view role_name(Role r) {
  switch (r) {
    case Role::Axiom: return "axiom";
    case Role::Hypothesis: return "hypothesis";
    case Role::NegatedConjecture: return "negated_conjecture";
    case Role::Plain: return "plain";
  }
  return "axiom";
}

struct NamedClause {
  std::string name;
  Role role = Role::Axiom;
  Clause clause;
};

struct Problem {
  std::string name;
  std::vector<NamedClause> clauses;
  std::shared_ptr<SymbolTable> symbols;
};

inline constexpr std::string_view kEqualityName = "=";

namespace detail {

class CnfParser {
 public:
  CnfParser(std::string_view text, SymbolTable& symbols) : text_(text), symbols_(symbols) {}

  std::vector<NamedClause> parse_all() {
    std::vector<NamedClause> out;
    skip_layout();
    while (pos_ < text_.size()) {
      out.push_back(parse_statement(static_cast<ClauseId>(out.size())));
      skip_layout();
    }
    return out;
  }

 private:
  static constexpr int kMaxDepth = 2000;

  [[noreturn]] void fail(const std::string& message) {
    std::string tok;
    if (pos_ >= text_.size()) {
      tok = "<end of input>";
    } else {
      std::size_t e = pos_;
      while (e < text_.size() && e - pos_ < 16 && !std::isspace(static_cast<unsigned char>(text_[e])))
        ++e;
      tok = std::string(text_.substr(pos_, std::max<std::size_t>(e - pos_, 1)));
    }
    throw ParseError(line_, column(), tok, message);
  }

  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_layout() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= text_.size()) fail("unterminated comment");
        advance();
        advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool peek(char c) {
    skip_layout();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool peek(std::string_view s) {
    skip_layout();
    return text_.substr(pos_, s.size()) == s;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    advance();
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string word() {
    skip_layout();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '\'') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
        advance();
      }
      if (pos_ >= text_.size()) fail("unterminated quoted name");
      advance();
      return std::string(text_.substr(start, pos_ - start));
    }
    if (pos_ < text_.size() && text_[pos_] == '$') advance();
    while (pos_ < text_.size() && word_char(text_[pos_])) advance();
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_variable_name(const std::string& w) {
    return !w.empty() && (std::isupper(static_cast<unsigned char>(w[0])) || w[0] == '_');
  }

  SymbolId symbol(const std::string& name, int arity, SymbolKind kind) {
    auto [it, inserted] = arities_.try_emplace(name, arity);
    if (!inserted && it->second != arity) throw ArityError(name, it->second, arity);
    return symbols_.intern(name, arity, kind);
  }

  NamedClause parse_statement(ClauseId index) {
    std::string kw = word();
    if (kw != "cnf") fail("only cnf statements are supported");
    expect('(');
    NamedClause nc;
    nc.name = word();
    expect(',');
    std::string role = word();
    if (role == "axiom") nc.role = Role::Axiom;
    else if (role == "hypothesis") nc.role = Role::Hypothesis;
    else if (role == "negated_conjecture") nc.role = Role::NegatedConjecture;
    else if (role == "plain") nc.role = Role::Plain;
    else fail("unknown role '" + role + "'");
    expect(',');
    vars_.clear();
    std::vector<Literal> lits;
    if (peek('(')) {
      advance();
      parse_disjunction(lits);
      expect(')');
    } else {
      parse_disjunction(lits);
    }
    // Optional annotations are accepted and ignored.
    if (peek(',')) {
      advance();
      skip_annotation();
    }
    expect(')');
    expect('.');
    nc.clause = Clause(std::move(lits), index, Origin{});
    return nc;
  }

  void skip_annotation() {
    int depth = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') {
        if (depth == 0) return;
        --depth;
      }
      advance();
    }
    fail("unterminated annotation");
  }

  void parse_disjunction(std::vector<Literal>& lits) {
    parse_literal(lits);
    while (peek('|')) {
      advance();
      parse_literal(lits);
    }
  }

  void parse_literal(std::vector<Literal>& lits) {
    bool positive = true;
    while (peek('~')) {
      advance();
      positive = !positive;
    }
    if (peek('(')) {
      // A parenthesised literal.
      advance();
      std::vector<Literal> inner;
      parse_literal(inner);
      expect(')');
      for (auto& l : inner) {
        if (!positive) l.positive = !l.positive;
        lits.push_back(std::move(l));
      }
      return;
    }
    std::string head = word();
    if (head == "$false") {
      if (!positive) fail("'~$false' is not supported");
      return;
    }
    if (head == "$true") fail("'$true' literals are not supported");
    std::vector<TermNode> lhs;
    int head_arity = -1;
    if (is_variable_name(head)) {
      if (peek('(')) fail("variable applied to arguments");
      lhs.push_back(var_node(variable(head)));
    } else {
      head_arity = parse_arguments(head, lhs, 0);
    }
    if (peek("!=") || peek('=')) {
      bool neq = peek("!=");
      advance();
      if (neq) advance();
      if (head_arity >= 0) lhs[0].symbol = symbol(head, head_arity, SymbolKind::Function);
      std::vector<TermNode> atom;
      atom.push_back(TermNode{symbol(std::string(kEqualityName), 2, SymbolKind::Predicate), 1});
      atom.insert(atom.end(), lhs.begin(), lhs.end());
      parse_term(atom, 1);
      atom[0].size = static_cast<std::uint32_t>(atom.size());
      lits.push_back(Literal{neq ? !positive : positive, std::move(atom)});
      return;
    }
    if (head_arity < 0) fail("variable used as a literal");
    lhs[0].symbol = symbol(head, head_arity, SymbolKind::Predicate);
    lits.push_back(Literal{positive, std::move(lhs)});
  }

  VarId variable(const std::string& name) {
    auto [it, inserted] = vars_.try_emplace(name, static_cast<VarId>(vars_.size()));
    return it->second;
  }

  // Parses the optional argument list of `name`; the root symbol is left for
  // the caller to fill in because its kind depends on context.
  int parse_arguments(const std::string& name, std::vector<TermNode>& out, int depth) {
    if (depth > kMaxDepth) fail("term nesting too deep");
    if (name.empty() || name[0] == '$') fail("unsupported defined symbol '" + name + "'");
    std::size_t at = out.size();
    out.push_back(TermNode{0, 1});
    int arity = 0;
    if (peek('(')) {
      advance();
      parse_term(out, depth + 1);
      ++arity;
      while (peek(',')) {
        advance();
        parse_term(out, depth + 1);
        ++arity;
      }
      expect(')');
    }
    out[at].size = static_cast<std::uint32_t>(out.size() - at);
    return arity;
  }

  void parse_term(std::vector<TermNode>& out, int depth) {
    if (depth > kMaxDepth) fail("term nesting too deep");
    std::string w = word();
    if (is_variable_name(w)) {
      if (peek('(')) fail("variable applied to arguments");
      out.push_back(var_node(variable(w)));
      return;
    }
    std::size_t at = out.size();
    int arity = parse_arguments(w, out, depth);
    out[at].symbol = symbol(w, arity, SymbolKind::Function);
  }

  std::string_view text_;
  SymbolTable& symbols_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  std::unordered_map<std::string, VarId> vars_;
  std::unordered_map<std::string, int> arities_;
};

inline std::string variable_name(VarId v) {
  static constexpr const char* kNames[] = {"X", "Y", "Z", "U", "V", "W"};
  if (v >= 0 && v < 6) return kNames[v];
  return "X" + std::to_string(v);
}

inline void write_term(std::string& out, TermView t, std::size_t pos, const SymbolTable& symbols) {
  const TermNode& n = t[pos];
  if (n.is_var()) {
    out += variable_name(n.var());
    return;
  }
  out += symbols.name(n.symbol);
  if (n.size == 1) return;
  out += '(';
  bool first = true;
  for_each_arg(t, pos, [&](std::size_t c) {
    if (!first) out += ',';
    first = false;
    write_term(out, t, c, symbols);
  });
  out += ')';
}

}  // namespace detail

// Parses a sequence of cnf statements; used directly for watchlist files.
inline std::vector<NamedClause> parse_clauses(std::string_view text, SymbolTable& symbols) {
  detail::CnfParser p(text, symbols);
  return p.parse_all();
}

inline Problem parse_problem(std::string_view text, std::string name = "",
                             std::shared_ptr<SymbolTable> symbols = nullptr) {
  if (!symbols) symbols = std::make_shared<SymbolTable>();
  Problem p;
  p.name = std::move(name);
  p.symbols = symbols;
  p.clauses = parse_clauses(text, *symbols);
  if (p.clauses.empty()) throw ParseError(1, 1, "", "problem contains no clauses");
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string problem_name_from_path(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

inline Problem load_problem(const std::string& path,
                            std::shared_ptr<SymbolTable> symbols = nullptr) {
  return parse_problem(read_file(path), problem_name_from_path(path), std::move(symbols));
}

inline std::string literal_to_string(const Literal& l, const SymbolTable& symbols) {
  std::string out;
  TermView a = l.view();
  if (symbols.name(l.predicate()) == kEqualityName && symbols.info(l.predicate()).arity == 2) {
    std::size_t lhs = 1;
    std::size_t rhs = lhs + a[lhs].size;
    detail::write_term(out, a, lhs, symbols);
    out += l.positive ? " = " : " != ";
    detail::write_term(out, a, rhs, symbols);
    return out;
  }
  if (!l.positive) out += '~';
  detail::write_term(out, a, 0, symbols);
  return out;
}

inline std::string clause_body(const Clause& c, const SymbolTable& symbols) {
  if (c.empty()) return "$false";
  std::string out;
  for (std::size_t i = 0; i < c.literals().size(); ++i) {
    if (i > 0) out += " | ";
    out += literal_to_string(c.literals()[i], symbols);
  }
  return out;
}

inline std::string serialize_clause(const Clause& c, const SymbolTable& symbols,
                                    std::string_view name, Role role = Role::Axiom) {
  std::string out = "cnf(";
  out += name;
  out += ", ";
  out += role_name(role);
  out += ", (";
  out += clause_body(c, symbols);
  out += ")).";
  return out;
}

inline std::string serialize_problem(const Problem& p) {
  std::string out;
  for (const auto& nc : p.clauses) {
    out += serialize_clause(nc.clause, *p.symbols, nc.name, nc.role);
    out += '\n';
  }
  return out;
}

}  // namespace hintgrind

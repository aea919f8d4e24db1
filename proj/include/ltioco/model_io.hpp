#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ltioco/error.hpp"
#include "ltioco/model.hpp"

// Text format, one declaration per line, '#' starts a comment:
//
//   automaton NAME
//   clocks x y
//   inputs a b
//   outputs c
//   location NAME [initial] [invariant EXPR]
//   switch SRC -> DST [when EXPR] [via ?a|!a|tau] [reset x y]
//
// EXPR is a conjunction "atom & atom ..." of "x op n" or "x - y op n" with op
// one of < <= == >= > and n a non-negative integer, or the literal "true".

namespace ltioco {

namespace detail {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t column = 0;
};

class LineLexer {
 public:
  LineLexer(std::string_view line, std::size_t lineno) : line_(line), lineno_(lineno) { lex(); }

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(Errc code, const Token& t, const std::string& msg) const {
    throw Error(code, "line " + std::to_string(lineno_) + ", column " + std::to_string(t.column + 1) + ": " + msg);
  }

  std::string ident(const char* what) {
    Token t = next();
    if (t.kind != Tok::Ident) fail(Errc::SyntaxError, t, std::string("expected ") + what);
    return t.text;
  }

  bool accept_symbol(std::string_view s) {
    if (peek().kind == Tok::Symbol && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view s) {
    if (peek().kind == Tok::Ident && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t lineno() const { return lineno_; }

 private:
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
  }

  void lex() {
    std::size_t i = 0;
    while (i < line_.size()) {
      char c = line_[i];
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      if (ident_start(c)) {
        while (i < line_.size() && ident_char(line_[i])) ++i;
        toks_.push_back({Tok::Ident, std::string(line_.substr(start, i - start)), start});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < line_.size() && std::isdigit(static_cast<unsigned char>(line_[i]))) ++i;
        if (i < line_.size() && (line_[i] == '.' || ident_start(line_[i]))) {
          fail(Errc::SemanticError, {Tok::Number, "", start}, "clock constants must be integers");
        }
        toks_.push_back({Tok::Number, std::string(line_.substr(start, i - start)), start});
      } else {
        static const char* two[] = {"->", "<=", ">=", "=="};
        bool matched = false;
        for (const char* s : two) {
          if (line_.substr(i, 2) == s) {
            toks_.push_back({Tok::Symbol, s, start});
            i += 2;
            matched = true;
            break;
          }
        }
        if (matched) continue;
        if (std::string_view("<>&?!-").find(c) != std::string_view::npos) {
          toks_.push_back({Tok::Symbol, std::string(1, c), start});
          ++i;
          continue;
        }
        fail(Errc::SyntaxError, {Tok::Symbol, "", start}, std::string("unexpected character '") + c + "'");
      }
    }
    toks_.push_back({Tok::End, "", line_.size()});
  }

  std::string_view line_;
  std::size_t lineno_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline std::int64_t parse_constant(LineLexer& lx) {
  if (lx.accept_symbol("-")) {
    lx.fail(Errc::SemanticError, lx.peek(), "clock constants must be non-negative");
  }
  Token t = lx.next();
  if (t.kind != Tok::Number) lx.fail(Errc::SyntaxError, t, "expected an integer constant");
  try {
    return std::stoll(t.text);
  } catch (const std::out_of_range&) {
    lx.fail(Errc::SemanticError, t, "constant out of range");
  }
}

inline Relation parse_relation(LineLexer& lx) {
  Token t = lx.next();
  if (t.kind == Tok::Symbol) {
    if (t.text == "<") return Relation::Less;
    if (t.text == "<=") return Relation::LessEq;
    if (t.text == "==") return Relation::Equal;
    if (t.text == ">=") return Relation::GreaterEq;
    if (t.text == ">") return Relation::Greater;
  }
  lx.fail(Errc::SyntaxError, t, "expected one of < <= == >= >");
}

inline bool is_clause_keyword(const Token& t) {
  return t.kind == Tok::Ident && (t.text == "when" || t.text == "via" || t.text == "reset" ||
                                  t.text == "initial" || t.text == "invariant");
}

inline ClockConstraint parse_expr(LineLexer& lx, const Tioa& a) {
  ClockConstraint c;
  if (lx.accept_word("true")) return c;
  do {
    Token ct = lx.peek();
    AtomicConstraint at;
    at.clock = lx.ident("a clock name");
    if (!a.clock_index(at.clock)) lx.fail(Errc::SemanticError, ct, "undeclared clock '" + at.clock + "'");
    if (lx.accept_symbol("-")) {
      Token ot = lx.peek();
      at.other = lx.ident("a clock name");
      if (!a.clock_index(at.other)) lx.fail(Errc::SemanticError, ot, "undeclared clock '" + at.other + "'");
      lx.fail(Errc::SemanticError, ct, "diagonal constraint '" + at.clock + " - " + at.other + "' is not supported");
    }
    at.relation = parse_relation(lx);
    at.bound = parse_constant(lx);
    c.conjuncts.push_back(std::move(at));
  } while (lx.accept_symbol("&"));
  return c;
}

inline std::vector<std::string> parse_names(LineLexer& lx) {
  std::vector<std::string> out;
  while (lx.peek().kind == Tok::Ident && !is_clause_keyword(lx.peek())) out.push_back(lx.next().text);
  return out;
}

}  // namespace detail

inline Tioa parse_model(std::string_view text) {
  using detail::LineLexer;
  using detail::Tok;
  Tioa a;
  bool have_name = false;
  std::size_t initial_count = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    LineLexer lx(line, lineno);
    if (lx.at_end()) continue;
    detail::Token head = lx.peek();
    std::string kw = lx.ident("a declaration keyword");
    if (kw == "automaton") {
      if (have_name) lx.fail(Errc::SemanticError, head, "automaton name declared twice");
      a.name = lx.ident("an automaton name");
      have_name = true;
    } else if (kw == "clocks") {
      for (auto& n : detail::parse_names(lx)) {
        if (a.clock_index(n)) lx.fail(Errc::SemanticError, head, "clock '" + n + "' declared twice");
        a.clocks.push_back(n);
      }
    } else if (kw == "inputs" || kw == "outputs") {
      for (auto& n : detail::parse_names(lx)) {
        if (n == kTau) lx.fail(Errc::SemanticError, head, "tau is reserved");
        if (a.is_input(n) || a.is_output(n)) lx.fail(Errc::SemanticError, head, "action '" + n + "' declared twice");
        (kw == "inputs" ? a.inputs : a.outputs).push_back(n);
      }
    } else if (kw == "location") {
      Location l;
      detail::Token nt = lx.peek();
      l.name = lx.ident("a location name");
      if (a.location_index(l.name)) lx.fail(Errc::SemanticError, nt, "location '" + l.name + "' declared twice");
      while (!lx.at_end()) {
        detail::Token t = lx.peek();
        if (lx.accept_word("initial")) {
          ++initial_count;
          if (initial_count > 1) lx.fail(Errc::SemanticError, t, "more than one initial location");
          a.initial = l.name;
        } else if (lx.accept_word("invariant")) {
          l.invariant = detail::parse_expr(lx, a);
        } else {
          lx.fail(Errc::SyntaxError, t, "expected 'initial' or 'invariant'");
        }
      }
      a.locations.push_back(std::move(l));
    } else if (kw == "switch") {
      Switch s;
      detail::Token st = lx.peek();
      s.source = lx.ident("a source location");
      if (!a.location_index(s.source)) lx.fail(Errc::SemanticError, st, "undeclared location '" + s.source + "'");
      if (!lx.accept_symbol("->")) lx.fail(Errc::SyntaxError, lx.peek(), "expected '->'");
      detail::Token tt = lx.peek();
      s.target = lx.ident("a target location");
      if (!a.location_index(s.target)) lx.fail(Errc::SemanticError, tt, "undeclared location '" + s.target + "'");
      bool seen_via = false;
      while (!lx.at_end()) {
        detail::Token t = lx.peek();
        if (lx.accept_word("when")) {
          s.guard = detail::parse_expr(lx, a);
        } else if (lx.accept_word("via")) {
          if (seen_via) lx.fail(Errc::SyntaxError, t, "duplicate 'via'");
          seen_via = true;
          detail::Token lt = lx.peek();
          if (lx.accept_symbol("?")) {
            s.action = ActionLabel::input(lx.ident("an action name"));
            if (!a.is_input(s.action.name)) lx.fail(Errc::SemanticError, lt, "'" + s.action.name + "' is not a declared input");
          } else if (lx.accept_symbol("!")) {
            s.action = ActionLabel::output(lx.ident("an action name"));
            if (!a.is_output(s.action.name)) lx.fail(Errc::SemanticError, lt, "'" + s.action.name + "' is not a declared output");
          } else if (lx.accept_word("tau")) {
            s.action = ActionLabel::tau();
          } else {
            lx.fail(Errc::SyntaxError, lt, "expected ?name, !name or tau");
          }
        } else if (lx.accept_word("reset")) {
          for (auto& x : detail::parse_names(lx)) {
            if (!a.clock_index(x)) lx.fail(Errc::SemanticError, t, "undeclared clock '" + x + "'");
            s.resets.push_back(x);
          }
        } else {
          lx.fail(Errc::SyntaxError, t, "expected 'when', 'via' or 'reset'");
        }
      }
      a.switches.push_back(std::move(s));
      continue;
    } else {
      lx.fail(Errc::SyntaxError, head, "unknown declaration '" + kw + "'");
    }
    if (!lx.at_end()) lx.fail(Errc::SyntaxError, lx.peek(), "unexpected '" + lx.peek().text + "'");
  }
  if (!have_name) throw Error(Errc::SemanticError, "missing 'automaton NAME' declaration");
  if (a.locations.empty()) throw Error(Errc::SemanticError, "no location declared");
  if (initial_count == 0) throw Error(Errc::SemanticError, "no initial location");
  return a;
}

inline Tioa load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::SyntaxError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

namespace detail {

inline std::string render_expr(const ClockConstraint& c) {
  std::string s;
  for (std::size_t i = 0; i < c.conjuncts.size(); ++i) {
    const auto& at = c.conjuncts[i];
    if (i) s += " & ";
    s += at.clock;
    if (at.is_diagonal()) s += " - " + at.other;
    s += " " + std::string(relation_symbol(at.relation)) + " " + std::to_string(at.bound);
  }
  return s;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += " " + x;
  return s;
}

}  // namespace detail

inline std::string render_model(const Tioa& a) {
  std::ostringstream os;
  os << "automaton " << a.name << '\n';
  if (!a.clocks.empty()) os << "clocks" << detail::join(a.clocks) << '\n';
  if (!a.inputs.empty()) os << "inputs" << detail::join(a.inputs) << '\n';
  if (!a.outputs.empty()) os << "outputs" << detail::join(a.outputs) << '\n';
  for (const auto& l : a.locations) {
    os << "location " << l.name;
    if (l.name == a.initial) os << " initial";
    if (!l.invariant.is_true()) os << " invariant " << detail::render_expr(l.invariant);
    os << '\n';
  }
  for (const auto& s : a.switches) {
    os << "switch " << s.source << " -> " << s.target;
    if (!s.guard.is_true()) os << " when " << detail::render_expr(s.guard);
    os << " via " << s.action.to_string();
    if (!s.resets.empty()) os << " reset" << detail::join(s.resets);
    os << '\n';
  }
  return os.str();
}

}  // namespace ltioco

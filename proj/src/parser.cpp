#include <cctype>
#include <optional>

#include "pqd/frontend.hpp"

namespace pqd {

namespace {

enum class Tok { Ident, Number, Sym, Label, End };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{Tok::End, "", Span{line_, col_, line_, col_}});
    return out;
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      const auto c = static_cast<unsigned char>(src_[pos_++]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80 && c != '\r') {
        ++col_;  // count code points, not bytes
      }
    }
  }

  bool at(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (at("--") && !at("-->")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(Tok k, std::string text, std::uint32_t l, std::uint32_t c) {
    std::uint32_t ec = col_ > 1 ? col_ - 1 : col_;
    return Token{k, std::move(text), Span{l, c, line_, ec}};
  }

  Token next() {
    const std::uint32_t l = line_, c = col_;
    const char ch = src_[pos_];
    if (ident_start(ch)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      return make(Tok::Ident, std::string(src_.substr(start, pos_ - start)), l, c);
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      return make(Tok::Number, std::string(src_.substr(start, pos_ - start)), l, c);
    }
    if (ch == '#' && pos_ + 2 < src_.size() && (src_[pos_ + 1] == 'q' || src_[pos_ + 1] == 'b') &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 2]))) {
      std::size_t start = pos_;
      advance(2);
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      return make(Tok::Label, std::string(src_.substr(start, pos_ - start)), l, c);
    }
    static const std::pair<std::string_view, std::string_view> kUnicode[] = {
        {"\xCE\xBB", "\\"}, {"\xE2\x8A\xB8", "-o"}, {"\xE2\x8A\x97", "*"},
        {"\xE2\x86\x92", "->"}};
    for (const auto& [u, ascii] : kUnicode)
      if (at(u)) {
        advance(u.size());
        return make(Tok::Sym, std::string(ascii), l, c);
      }
    if (at("\\'")) {
      advance(2);
      return make(Tok::Sym, "\\'", l, c);
    }
    if (at("->")) {
      advance(2);
      return make(Tok::Sym, "->", l, c);
    }
    if (at("-o") && !(pos_ + 2 < src_.size() && ident_char(src_[pos_ + 2]))) {
      advance(2);
      return make(Tok::Sym, "-o", l, c);
    }
    static const std::string_view kSingle = "\\()[]{},:;=!*@";
    if (kSingle.find(ch) != std::string_view::npos) {
      advance();
      return make(Tok::Sym, std::string(1, ch), l, c);
    }
    throw ParseError(Span{l, c, l, c},
                     "unexpected character '" + std::string(1, ch) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"let", "in",  "case",  "of",     "lift",
                                       "force", "force'", "box", "apply", "apply'",
                                       "unit"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, bool internal)
      : toks_(std::move(toks)), internal_(internal) {}

  bool done() const { return peek().kind == Tok::End; }
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }

  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(t.span, t.kind == Tok::End
                                 ? msg + " at end of input"
                                 : msg + " near '" + t.text + "'");
  }

  bool is_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_kw(std::string_view s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  bool accept(std::string_view s) {
    if (is_sym(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  Token expect(std::string_view s) {
    if (!is_sym(s) && !is_kw(s)) error("expected '" + std::string(s) + "'");
    return toks_[pos_++];
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident || keywords().count(peek().text))
      error(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  Span last() const { return pos_ ? toks_[pos_ - 1].span : peek().span; }
  Span from(const Span& start) const { return Span::merge(start, last()); }

  void internal(const char* what) const {
    if (!internal_)
      error(std::string(what) + " is an internal form with no surface syntax");
  }

  Declaration declaration();
  TermPtr term();
  TypePtr type();

 private:
  TermPtr lambda();
  TermPtr let_term();
  TermPtr case_term();
  TermPtr opterm();
  TermPtr appterm();
  TermPtr item();
  TermPtr item_or_lambda();
  TermPtr atom();
  bool starts_item() const;
  TypePtr ttype();
  TypePtr btype();
  TypePtr atype();

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool internal_;
};

// ---------------------------------------------------------------------------
// Terms

TermPtr Parser::term() {
  if (is_sym("\\") || is_sym("\\'")) return lambda();
  if (is_kw("let")) return let_term();
  if (is_kw("case")) return case_term();
  return opterm();
}

TermPtr Parser::lambda() {
  const Span start = peek().span;
  const bool primed = peek().text == "\\'";
  if (primed) internal("\\'");
  ++pos_;
  std::vector<std::pair<std::string, TypePtr>> binders;
  while (!is_sym("->")) {
    if (accept("(")) {
      std::string x = ident("a binder name");
      expect(":");
      TypePtr a = type();
      expect(")");
      binders.emplace_back(x, a);
    } else {
      binders.emplace_back(ident("a binder or '->'"), nullptr);
    }
  }
  if (binders.empty()) error("expected a binder");
  expect("->");
  TermPtr body = term();
  const Span s = from(start);
  for (auto it = binders.rbegin(); it != binders.rend(); ++it)
    body = primed ? tm::lam_p(it->first, it->second, body, s)
                  : tm::lam(it->first, it->second, body, s);
  return body;
}

TermPtr Parser::let_term() {
  const Span start = expect("let").span;
  expect("(");
  std::string x = ident("a variable");
  expect(",");
  std::string y = ident("a variable");
  expect(")");
  expect("=");
  TermPtr bound = term();
  expect("in");
  TermPtr body = term();
  return tm::let_pair(x, y, bound, body, from(start));
}

TermPtr Parser::case_term() {
  const Span start = expect("case").span;
  TermPtr scrut = term();
  expect("of");
  expect("{");
  std::vector<Alt> alts;
  accept(";");
  while (!is_sym("}")) {
    const Span astart = peek().span;
    Alt alt;
    alt.ctor = ident("a constructor");
    while (peek().kind == Tok::Ident && !keywords().count(peek().text))
      alt.vars.push_back(toks_[pos_++].text);
    expect("->");
    alt.body = term();
    alt.span = from(astart);
    alts.push_back(std::move(alt));
    if (!accept(";")) break;
  }
  expect("}");
  if (alts.empty()) error("case needs at least one alternative");
  return tm::case_of(scrut, std::move(alts), from(start));
}

TermPtr Parser::opterm() {
  const Span start = peek().span;
  TermPtr t = appterm();
  while (is_sym("@")) {
    internal("@");
    ++pos_;
    TermPtr r = appterm();
    t = tm::app_p(t, r, from(start));
  }
  return t;
}

bool Parser::starts_item() const {
  const Token& t = peek();
  switch (t.kind) {
    case Tok::Ident:
      return !keywords().count(t.text) || t.text == "lift" || t.text == "force" ||
             t.text == "force'" || t.text == "box" || t.text == "apply" ||
             t.text == "apply'" || t.text == "unit";
    case Tok::Number:
    case Tok::Label:
      return true;
    case Tok::Sym:
      return t.text == "(" || t.text == "[";
    case Tok::End:
      return false;
  }
  return false;
}

TermPtr Parser::appterm() {
  const Span start = peek().span;
  if (!starts_item()) error("expected a term");
  TermPtr t = item();
  while (starts_item()) {
    TermPtr arg = item();
    t = tm::app(t, arg, from(start));
  }
  return t;
}

TermPtr Parser::item_or_lambda() {
  if (is_sym("\\") || is_sym("\\'")) return lambda();
  if (!starts_item()) error("expected a term");
  return item();
}

TermPtr Parser::item() {
  const Span start = peek().span;
  if (is_kw("lift")) {
    ++pos_;
    TermPtr m = item_or_lambda();
    return tm::lift(m, from(start));
  }
  if (is_kw("force") || is_kw("force'")) {
    const bool primed = peek().text == "force'";
    if (primed) internal("force'");
    ++pos_;
    TermPtr m = item_or_lambda();
    return primed ? tm::force_p(m, from(start)) : tm::force(m, from(start));
  }
  if (is_kw("box")) {
    ++pos_;
    expect("[");
    TypePtr in = type();
    TypePtr out;
    if (accept(";")) out = type();
    expect("]");
    TermPtr m = item_or_lambda();
    return tm::box(in, out, m, from(start));
  }
  return atom();
}

TermPtr Parser::atom() {
  const Token t = peek();
  const Span start = t.span;
  switch (t.kind) {
    case Tok::Number: {
      ++pos_;
      std::uint64_t n = 0;
      for (char c : t.text) {
        n = n * 10 + static_cast<std::uint64_t>(c - '0');
        if (n > 10000) throw ParseError(t.span, "numeric literal " + t.text + " is too large");
      }
      return tm::numeral(n, t.span);
    }
    case Tok::Label: {
      internal("a circuit label");
      ++pos_;
      auto id = static_cast<std::uint32_t>(std::stoul(t.text.substr(2)));
      return tm::label(LabelId{id}, t.text[1] == 'q' ? Sort::Qubit : Sort::Bit, t.span);
    }
    case Tok::Ident: {
      if (t.text == "unit") {
        ++pos_;
        return tm::unit(t.span);
      }
      if (t.text == "apply" || t.text == "apply'") {
        const bool primed = t.text == "apply'";
        if (primed) internal("apply'");
        ++pos_;
        expect("(");
        TermPtr c = term();
        expect(",");
        TermPtr x = term();
        expect(")");
        return primed ? tm::apply_p(c, x, from(start)) : tm::apply(c, x, from(start));
      }
      if (keywords().count(t.text)) error("unexpected keyword");
      ++pos_;
      if (lookup_const(t.text)) return tm::cnst(t.text, t.span);
      return tm::var(t.text, t.span);
    }
    case Tok::Sym:
      if (t.text == "(") {
        ++pos_;
        if (accept(")")) return tm::unit(from(start));
        TermPtr first = term();
        if (accept(":")) {
          TypePtr a = type();
          expect(")");
          return tm::ann(first, a, from(start));
        }
        std::vector<TermPtr> elems{first};
        while (accept(",")) elems.push_back(term());
        expect(")");
        if (elems.size() == 1) return first;
        const Span s = from(start);
        TermPtr out = elems.back();
        for (auto it = elems.rbegin() + 1; it != elems.rend(); ++it)
          out = tm::pair(*it, out, s);
        return out;
      }
      if (t.text == "[") {
        ++pos_;
        std::vector<TermPtr> elems;
        if (!is_sym("]")) {
          elems.push_back(term());
          while (accept(",")) elems.push_back(term());
        }
        expect("]");
        return tm::list(elems, from(start));
      }
      break;
    case Tok::End:
      break;
  }
  error("expected a term");
}

// ---------------------------------------------------------------------------
// Types

TypePtr Parser::type() {
  const Span start = peek().span;
  TypePtr t = ttype();
  if (accept("-o")) {
    TypePtr cod = type();
    return ty::lin_pi(std::string(kAnon), t, cod, from(start));
  }
  if (accept("->")) {
    TypePtr cod = type();
    return ty::int_pi(std::string(kAnon), t, cod, from(start));
  }
  return t;
}

TypePtr Parser::ttype() {
  const Span start = peek().span;
  TypePtr t = btype();
  if (accept("*")) {
    TypePtr cod = ttype();
    return ty::tensor(std::string(kAnon), t, cod, from(start));
  }
  return t;
}

TypePtr Parser::btype() {
  const Span start = peek().span;
  if (accept("!")) {
    TypePtr a = btype();
    return ty::bang(a, from(start));
  }
  if (is_kw("List")) {
    ++pos_;
    TypePtr a = atype();
    return ty::list(a, from(start));
  }
  if (is_kw("Vec")) {
    ++pos_;
    TypePtr a = atype();
    TermPtr n = item();
    return ty::vec(a, n, from(start));
  }
  return atype();
}

TypePtr Parser::atype() {
  const Token t = peek();
  const Span start = t.span;
  if (t.kind == Tok::Ident) {
    if (t.text == "Qubit") return ++pos_, ty::qubit(t.span);
    if (t.text == "Bit") return ++pos_, ty::bit(t.span);
    if (t.text == "Unit") return ++pos_, ty::unit(t.span);
    if (t.text == "Nat") return ++pos_, ty::nat(t.span);
    if (t.text == "Circ") {
      ++pos_;
      expect("(");
      TypePtr in = type();
      expect(",");
      TypePtr out = type();
      expect(")");
      return ty::circ(in, out, from(start));
    }
  }
  if (is_sym("(")) {
    // Dependent binder `(x : A) op B`.
    if (peek(1).kind == Tok::Ident && is_sym(":", 2)) {
      ++pos_;
      std::string x = ident("a binder name");
      expect(":");
      TypePtr dom = type();
      expect(")");
      if (accept("*")) {
        TypePtr cod = ttype();
        return ty::tensor(x, dom, cod, from(start));
      }
      if (accept("-o")) {
        TypePtr cod = type();
        return ty::lin_pi(x, dom, cod, from(start));
      }
      if (accept("->")) {
        TypePtr cod = type();
        return ty::int_pi(x, dom, cod, from(start));
      }
      error("expected '-o', '->' or '*' after a dependent binder");
    }
    ++pos_;
    TypePtr a = type();
    expect(")");
    return a;
  }
  error("expected a type");
}

// ---------------------------------------------------------------------------
// Declarations

Declaration Parser::declaration() {
  const Span start = peek().span;
  Declaration d;
  d.name = ident("a declaration name");
  if (accept(":")) {
    d.type = type();
  } else if (accept("=")) {
    d.body = term();
  } else {
    error("expected ':' or '=' after declaration name");
  }
  if (!done()) error("unexpected token after declaration");
  d.span = from(start);
  return d;
}

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace

std::vector<Declaration> parse_program(std::string_view source, bool allow_internal) {
  std::vector<Token> toks = lex(source);
  // Split at tokens in column 1: each chunk is one declaration item.
  std::vector<Declaration> items;
  std::size_t i = 0;
  while (toks[i].kind != Tok::End) {
    if (toks[i].span.col != 1)
      throw ParseError(toks[i].span, "declarations must start in column 1");
    std::size_t j = i + 1;
    while (toks[j].kind != Tok::End && toks[j].span.col != 1) ++j;
    std::vector<Token> chunk(toks.begin() + static_cast<std::ptrdiff_t>(i),
                             toks.begin() + static_cast<std::ptrdiff_t>(j));
    Span end = toks[j - 1].span;
    chunk.push_back(Token{Tok::End, "", Span{end.end_line, end.end_col + 1,
                                            end.end_line, end.end_col + 1}});
    Parser p(std::move(chunk), allow_internal);
    items.push_back(p.declaration());
    i = j;
  }

  // Pair each signature with the definition that follows it.
  std::vector<Declaration> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    Declaration d = items[k];
    if (d.type) {
      if (k + 1 >= items.size() || items[k + 1].name != d.name || !items[k + 1].body)
        throw ParseError(d.span, "type signature for " + d.name +
                                     " is not followed by its definition");
      d.body = items[k + 1].body;
      d.span = Span::merge(d.span, items[k + 1].span);
      ++k;
    }
    out.push_back(std::move(d));
  }
  return out;
}

TermPtr parse_term(std::string_view source, bool allow_internal) {
  Parser p(lex(source), allow_internal);
  TermPtr t = p.term();
  if (!p.done()) p.error("unexpected token after term");
  return t;
}

TypePtr parse_type(std::string_view source, bool allow_internal) {
  Parser p(lex(source), allow_internal);
  TypePtr t = p.type();
  if (!p.done()) p.error("unexpected token after type");
  return t;
}

}  // namespace pqd

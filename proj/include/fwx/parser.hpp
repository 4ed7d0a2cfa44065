#pragma once

// FW-Elixir parser. A source file holds a sequence of (optionally
// `$`-annotated) multi-clause `def` definitions and at most one trailing
// expression. Multi-clause definitions of the same name are grouped into
// one pattern-matching function.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fwx/ast.hpp"
#include "fwx/lex.hpp"
#include "fwx/type_parse.hpp"

namespace fwx {

struct ParseError : std::runtime_error {
  Span span;
  ParseError(std::string msg, Span s) : std::runtime_error(std::move(msg)), span(s) {}
};

namespace detail {

inline bool is_keyword(const std::string& s) {
  static const char* kws[] = {"fn",  "end", "case", "do",  "when", "def",
                              "and", "or",  "not",  "true", "false"};
  for (auto k : kws)
    if (s == k) return true;
  return false;
}

class FwParser {
 public:
  explicit FwParser(std::string src) : toks_(lex(src)) {}

  FwModule parse_module() {
    FwModule m;
    skip_newlines();
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Dollar || (peek().kind == Tok::Ident && peek().text == "def")) {
        parse_def_group(m);
      } else {
        if (m.main)
          throw ParseError("only one trailing expression is allowed", peek().span);
        m.main = parse_expr();
      }
      if (peek().kind != Tok::End) expect_separator();
      skip_newlines();
    }
    return m;
  }

  FwExprPtr parse_single_expr() {
    skip_newlines();
    FwExprPtr e = parse_expr();
    skip_newlines();
    if (peek().kind != Tok::End)
      throw ParseError("trailing input after expression", peek().span);
    return e;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) next();
  }
  void expect(Tok k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError("expected " + what + ", got '" + peek().text + "'", peek().span);
    next();
  }
  void expect_separator() {
    if (peek().kind == Tok::Newline || peek().kind == Tok::Semi) {
      next();
      return;
    }
    if (peek().kind == Tok::End) return;
    throw ParseError("expected end of line, got '" + peek().text + "'", peek().span);
  }
  bool at_ident(const std::string& s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  Span2 at() const { return Span2{peek().span.line, peek().span.col}; }

  // ---- interface annotations ----

  InterfaceArrow decompose_arrow(const Type& t, Span sp) {
    auto ad = single_plain_arrow(t.down);
    auto au = single_plain_arrow(t.up);
    if (!ad || !au || ad->arity() != au->arity())
      throw ParseError("interface annotation must be an intersection of arrows", sp);
    InterfaceArrow a;
    for (size_t i = 0; i < ad->arity(); ++i)
      a.dom.push_back(Type{au->types[i], ad->types[i]});
    a.cod = Type{ad->cod(), au->cod()};
    return a;
  }

  // one interface arrow from its own token segment
  InterfaceArrow parse_iarrow(std::vector<Token> segment, bool& dyn_neg) {
    Span sp = segment.empty() ? peek().span : segment.front().span;
    segment.push_back(Token{Tok::End, "", 0, sp});
    size_t spos = 0;
    TypeParser tp(segment, spos);
    std::vector<Type> items;
    items.push_back(tp.parse_or());
    while (tp.peek().kind == Tok::Comma) {
      tp.next();
      items.push_back(tp.parse_or());
    }
    InterfaceArrow out;
    if (tp.peek().kind == Tok::Arrow) {
      tp.next();
      out.dom = std::move(items);
      out.cod = tp.parse_type();
    } else if (items.size() == 1) {
      out = decompose_arrow(items[0], sp);
    } else {
      throw ParseError("expected '->' after domain list", tp.peek().span);
    }
    if (tp.peek().kind != Tok::End)
      throw ParseError("trailing input in interface arrow", tp.peek().span);
    dyn_neg = dyn_neg || tp.dyn_under_neg;
    return out;
  }

  // annotations occupy one line; arrows are separated by depth-0 'and'
  void parse_annotation(FwDef& def) {
    expect(Tok::Dollar, "'$'");
    std::vector<std::vector<Token>> segments(1);
    int depth = 0;
    while (peek().kind != Tok::Newline && peek().kind != Tok::End) {
      const Token& t = next();
      if (t.kind == Tok::LParen || t.kind == Tok::LBrace) ++depth;
      if (t.kind == Tok::RParen || t.kind == Tok::RBrace) --depth;
      if (depth == 0 && t.kind == Tok::Ident && t.text == "and")
        segments.emplace_back();
      else
        segments.back().push_back(t);
    }
    bool dyn_neg = false;
    std::vector<InterfaceArrow> arrows;
    for (auto& seg : segments) arrows.push_back(parse_iarrow(std::move(seg), dyn_neg));
    def.iface = std::move(arrows);
    def.iface_dyn_under_neg = dyn_neg;
    expect_separator();
    skip_newlines();
  }

  // ---- definitions ----

  void check_linear(const std::vector<PatternPtr>& pats, Span sp) {
    std::vector<std::string> vars;
    for (const auto& p : pats) pattern_vars(p, vars);
    std::sort(vars.begin(), vars.end());
    for (size_t i = 1; i < vars.size(); ++i)
      if (vars[i] == vars[i - 1])
        throw ParseError("variable '" + vars[i] + "' occurs twice in a pattern", sp);
  }

  void parse_def_group(FwModule& m) {
    FwDef def;
    def.span = at();
    if (peek().kind == Tok::Dollar) parse_annotation(def);
    if (!at_ident("def")) throw ParseError("expected 'def' after annotation", peek().span);
    bool first = true;
    while (at_ident("def")) {
      Span2 sp = at();
      next();
      if (peek().kind != Tok::Ident || is_keyword(peek().text))
        throw ParseError("expected a definition name", peek().span);
      std::string name = next().text;
      if (first) {
        def.name = name;
        first = false;
      } else if (name != def.name) {
        // a new definition begins; rewind the two consumed tokens
        pos_ -= 2;
        break;
      }
      FwClause cl;
      expect(Tok::LParen, "'('");
      if (peek().kind != Tok::RParen) {
        cl.pats.push_back(parse_pattern());
        while (peek().kind == Tok::Comma) {
          next();
          cl.pats.push_back(parse_pattern());
        }
      }
      expect(Tok::RParen, "')'");
      check_linear(cl.pats, peek().span);
      if (at_ident("when")) {
        next();
        cl.guard = parse_guard();
      }
      expect(Tok::Comma, "','");
      expect(Tok::DoColon, "'do:'");
      cl.body = parse_expr();
      if (def.clauses.empty())
        def.arity = cl.pats.size();
      else if (cl.pats.size() != def.arity)
        throw ParseError("clauses of '" + def.name + "' have mixed arity", {sp.line, sp.col});
      def.clauses.push_back(std::move(cl));
      // peek past separators for another clause of the same function
      size_t save = pos_;
      if (peek().kind == Tok::Newline || peek().kind == Tok::Semi) {
        skip_newlines();
        if (peek().kind == Tok::Semi) next();
        skip_newlines();
        if (!at_ident("def")) {
          pos_ = save;
          break;
        }
        if (peek(1).kind == Tok::Ident && peek(1).text != def.name) {
          pos_ = save;
          break;
        }
      } else {
        break;
      }
    }
    m.defs.push_back(std::move(def));
  }

  // ---- patterns ----

  PatternPtr parse_pattern() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: next(); return Pattern::mk_int(t.ival);
      case Tok::AtomLit: next(); return Pattern::mk_atom(intern_atom(t.text));
      case Tok::Ident: {
        if (t.text == "true") {
          next();
          return Pattern::mk_atom(atom_true);
        }
        if (t.text == "false") {
          next();
          return Pattern::mk_atom(atom_false);
        }
        if (is_keyword(t.text)) throw ParseError("expected a pattern", t.span);
        next();
        return Pattern::mk_var(t.text);
      }
      case Tok::LBrace: {
        next();
        std::vector<PatternPtr> elems;
        if (peek().kind != Tok::RBrace) {
          elems.push_back(parse_pattern());
          while (peek().kind == Tok::Comma) {
            next();
            elems.push_back(parse_pattern());
          }
        }
        expect(Tok::RBrace, "'}'");
        return Pattern::mk_tuple(std::move(elems));
      }
      default: throw ParseError("expected a pattern, got '" + t.text + "'", t.span);
    }
  }

  // ---- guards ----

  FwGuardPtr parse_guard() { return parse_gor(); }

  FwGuardPtr parse_gor() {
    FwGuardPtr g = parse_gand();
    while (at_ident("or")) {
      Span2 sp = at();
      next();
      auto n = FwGuard::mk(FwGuard::K::Or, sp);
      n->a = g;
      n->b = parse_gand();
      g = n;
    }
    return g;
  }
  FwGuardPtr parse_gand() {
    FwGuardPtr g = parse_gnot();
    while (at_ident("and")) {
      Span2 sp = at();
      next();
      auto n = FwGuard::mk(FwGuard::K::And, sp);
      n->a = g;
      n->b = parse_gnot();
      g = n;
    }
    return g;
  }
  FwGuardPtr parse_gnot() {
    if (at_ident("not")) {
      Span2 sp = at();
      next();
      auto n = FwGuard::mk(FwGuard::K::Not, sp);
      n->a = parse_gnot();
      return n;
    }
    return parse_gcmp();
  }
  FwGuardPtr parse_gcmp() {
    FwGuardPtr g = parse_gprim();
    if (peek().kind == Tok::EqEq || peek().kind == Tok::BangEq) {
      bool eq = peek().kind == Tok::EqEq;
      Span2 sp = at();
      Span rawsp = peek().span;
      next();
      FwGuardPtr rhs = parse_gprim();
      if (!fw_is_selector(*g) || !fw_is_selector(*rhs))
        throw ParseError("==/!= compares selector expressions", rawsp);
      auto n = FwGuard::mk(eq ? FwGuard::K::Eq : FwGuard::K::Neq, sp);
      n->a = g;
      n->b = rhs;
      return n;
    }
    return g;
  }

  FwGuardPtr parse_check_call(FwGuard::K k, Span2 sp, bool with_arity = false) {
    next();  // the is_* identifier
    expect(Tok::LParen, "'('");
    auto g = FwGuard::mk(k, sp);
    g->a = parse_gprim();
    if (!fw_is_selector(*g->a))
      throw ParseError("type checks apply to selector expressions", peek().span);
    if (with_arity && peek().kind == Tok::Comma) {
      next();
      if (peek().kind != Tok::Int) throw ParseError("expected an arity", peek().span);
      g->k = FwGuard::K::IsFunctionN;
      g->arity = next().ival;
    }
    expect(Tok::RParen, "')'");
    return g;
  }

  FwGuardPtr parse_gprim() {
    const Token& t = peek();
    Span2 sp = at();
    switch (t.kind) {
      case Tok::Int: {
        next();
        auto g = FwGuard::mk(FwGuard::K::SelInt, sp);
        g->ival = t.ival;
        return g;
      }
      case Tok::AtomLit: {
        next();
        auto g = FwGuard::mk(FwGuard::K::SelAtom, sp);
        g->aval = intern_atom(t.text);
        return g;
      }
      case Tok::LParen: {
        next();
        FwGuardPtr g = parse_guard();
        expect(Tok::RParen, "')'");
        return g;
      }
      case Tok::LBrace: {
        next();
        auto g = FwGuard::mk(FwGuard::K::SelTuple, sp);
        std::vector<FwGuardPtr> elems;
        if (peek().kind != Tok::RBrace) {
          elems.push_back(parse_gprim());
          while (peek().kind == Tok::Comma) {
            next();
            elems.push_back(parse_gprim());
          }
        }
        expect(Tok::RBrace, "'}'");
        for (const auto& e : elems)
          if (!fw_is_selector(*e))
            throw ParseError("tuple selectors contain selectors", t.span);
        g->elems = std::move(elems);
        return g;
      }
      case Tok::Ident: {
        const std::string& w = t.text;
        if (w == "true" || w == "false") {
          next();
          auto g = FwGuard::mk(FwGuard::K::SelAtom, sp);
          g->aval = w == "true" ? atom_true : atom_false;
          return g;
        }
        if (w == "is_integer") return parse_check_call(FwGuard::K::IsInteger, sp);
        if (w == "is_atom") return parse_check_call(FwGuard::K::IsAtom, sp);
        if (w == "is_boolean") return parse_check_call(FwGuard::K::IsBoolean, sp);
        if (w == "is_tuple") return parse_check_call(FwGuard::K::IsTuple, sp);
        if (w == "is_function") return parse_check_call(FwGuard::K::IsFunction, sp, true);
        if (w == "elem") {
          next();
          expect(Tok::LParen, "'('");
          auto g = FwGuard::mk(FwGuard::K::SelElem, sp);
          g->a = parse_gprim();
          expect(Tok::Comma, "','");
          g->b = parse_gprim();
          expect(Tok::RParen, "')'");
          if (!fw_is_selector(*g->a) || !fw_is_selector(*g->b))
            throw ParseError("elem applies to selectors", t.span);
          return g;
        }
        if (w == "tuple_size") {
          next();
          expect(Tok::LParen, "'('");
          auto g = FwGuard::mk(FwGuard::K::SelSize, sp);
          g->a = parse_gprim();
          expect(Tok::RParen, "')'");
          if (!fw_is_selector(*g->a))
            throw ParseError("tuple_size applies to selectors", t.span);
          return g;
        }
        if (is_keyword(w)) throw ParseError("expected a guard", t.span);
        next();
        auto g = FwGuard::mk(FwGuard::K::SelVar, sp);
        g->var = w;
        return g;
      }
      default: throw ParseError("expected a guard, got '" + t.text + "'", t.span);
    }
  }

  // ---- expressions ----

  FwExprPtr parse_expr() { return parse_sum(); }

  FwExprPtr parse_sum() {
    FwExprPtr e = parse_postfix();
    while (peek().kind == Tok::Plus) {
      Span2 sp = at();
      next();
      auto n = FwExpr::mk(FwExpr::K::Plus, sp);
      n->a = e;
      n->b = parse_postfix();
      e = n;
    }
    return e;
  }

  FwExprPtr parse_postfix() {
    FwExprPtr e = parse_prim();
    while (true) {
      if (peek().kind == Tok::LParen) {
        e = finish_call(e);
      } else if (peek().kind == Tok::Dot && peek(1).kind == Tok::LParen) {
        next();
        e = finish_call(e);
      } else {
        break;
      }
    }
    return e;
  }

  FwExprPtr finish_call(FwExprPtr fn) {
    Span2 sp = at();
    expect(Tok::LParen, "'('");
    std::vector<FwExprPtr> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(parse_expr());
      while (peek().kind == Tok::Comma) {
        next();
        args.push_back(parse_expr());
      }
    }
    expect(Tok::RParen, "')'");
    if (fn->k == FwExpr::K::Var && fn->var == "tuple_size") {
      if (args.size() != 1)
        throw ParseError("tuple_size/1 expects one argument", {sp.line, sp.col});
      auto e = FwExpr::mk(FwExpr::K::Size, sp);
      e->a = args[0];
      return e;
    }
    if (fn->k == FwExpr::K::Var && fn->var == "elem") {
      if (args.size() != 2) throw ParseError("elem/2 expects two arguments", {sp.line, sp.col});
      auto e = FwExpr::mk(FwExpr::K::Elem, sp);
      e->a = args[0];
      e->b = args[1];
      return e;
    }
    auto e = FwExpr::mk(FwExpr::K::App, sp);
    e->fn = std::move(fn);
    e->elems = std::move(args);
    return e;
  }

  std::vector<FwClause> parse_fn_clauses(bool multi_pattern) {
    std::vector<FwClause> clauses;
    skip_newlines();
    while (true) {
      FwClause cl;
      cl.pats.push_back(parse_pattern());
      while (multi_pattern && peek().kind == Tok::Comma) {
        next();
        cl.pats.push_back(parse_pattern());
      }
      check_linear(cl.pats, peek().span);
      if (at_ident("when")) {
        next();
        cl.guard = parse_guard();
      }
      expect(Tok::Arrow, "'->'");
      cl.body = parse_expr();
      clauses.push_back(std::move(cl));
      size_t save = pos_;
      while (peek().kind == Tok::Semi || peek().kind == Tok::Newline) next();
      if (at_ident("end")) {
        pos_ = save;
        break;
      }
      if (pos_ == save) break;  // no separator: clause list ends
    }
    skip_newlines();
    while (peek().kind == Tok::Semi) {
      next();
      skip_newlines();
    }
    return clauses;
  }

  FwExprPtr parse_prim() {
    const Token& t = peek();
    Span2 sp = at();
    switch (t.kind) {
      case Tok::Int: {
        next();
        auto e = FwExpr::mk(FwExpr::K::Int, sp);
        e->ival = t.ival;
        return e;
      }
      case Tok::AtomLit: {
        next();
        auto e = FwExpr::mk(FwExpr::K::Atom, sp);
        e->aval = intern_atom(t.text);
        return e;
      }
      case Tok::LParen: {
        next();
        FwExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LBrace: {
        next();
        auto e = FwExpr::mk(FwExpr::K::Tuple, sp);
        if (peek().kind != Tok::RBrace) {
          e->elems.push_back(parse_expr());
          while (peek().kind == Tok::Comma) {
            next();
            e->elems.push_back(parse_expr());
          }
        }
        expect(Tok::RBrace, "'}'");
        return e;
      }
      case Tok::Ident: {
        const std::string& w = t.text;
        if (w == "true" || w == "false") {
          next();
          auto e = FwExpr::mk(FwExpr::K::Atom, sp);
          e->aval = w == "true" ? atom_true : atom_false;
          return e;
        }
        if (w == "fn") {
          next();
          auto e = FwExpr::mk(FwExpr::K::Fn, sp);
          e->clauses = parse_fn_clauses(true);
          if (!at_ident("end")) throw ParseError("expected 'end'", peek().span);
          next();
          for (const auto& c : e->clauses)
            if (c.pats.size() != e->clauses.front().pats.size())
              throw ParseError("fn clauses have mixed arity", t.span);
          return e;
        }
        if (w == "case") {
          next();
          auto e = FwExpr::mk(FwExpr::K::Case, sp);
          e->a = parse_expr();
          if (!at_ident("do")) throw ParseError("expected 'do'", peek().span);
          next();
          e->clauses = parse_fn_clauses(false);
          if (!at_ident("end")) throw ParseError("expected 'end'", peek().span);
          next();
          return e;
        }
        if (is_keyword(w)) throw ParseError("unexpected '" + w + "'", t.span);
        next();
        auto e = FwExpr::mk(FwExpr::K::Var, sp);
        e->var = w;
        return e;
      }
      default: throw ParseError("expected an expression, got '" + t.text + "'", t.span);
    }
  }

  using TypeParser = detail::TypeParser;
};

}  // namespace detail

inline FwModule parse_fw_module(const std::string& src) {
  detail::FwParser p(src);
  return p.parse_module();
}

inline FwExprPtr parse_fw_expr(const std::string& src) {
  detail::FwParser p(src);
  return p.parse_single_expr();
}

}  // namespace fwx

#pragma once

// Textual type syntax: integer(), boolean(), atom(), term(), none(),
// dynamic(), tuple(), function(), literals, tuples {t, t} / {t, t, ..},
// arrows (t, t) -> t, strong arrows (t -> t)*, and/or/not.

#include <stdexcept>
#include <string>
#include <vector>

#include "fwx/lex.hpp"
#include "fwx/subtype.hpp"
#include "fwx/types.hpp"

namespace fwx {

struct TypeParseError : std::runtime_error {
  Span span;
  TypeParseError(std::string msg, Span s)
      : std::runtime_error(std::move(msg)), span(s) {}
};

struct ParsedType {
  Type type;
  bool dyn_under_negation = false;
};

namespace detail {

// works over a borrowed token stream so the surface parser can embed it
class TypeParser {
 public:
  TypeParser(const std::vector<Token>& toks, size_t& pos) : toks_(toks), pos_(pos) {}

  Type parse_type() {
    Type t = parse_or();
    if (peek().kind == Tok::Arrow) {
      next();
      Type cod = parse_type();
      return t_arrow_of({t}, cod);
    }
    return t;
  }

  Type parse_or() {
    Type t = parse_and();
    while (peek().kind == Tok::Ident && peek().text == "or") {
      next();
      t = t_union(t, parse_and());
    }
    return t;
  }

  bool dyn_under_neg = false;

  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

 private:
  const std::vector<Token>& toks_;
  size_t& pos_;
  int neg_depth_ = 0;

  void expect(Tok k, const std::string& what) {
    if (peek().kind != k)
      throw TypeParseError("expected " + what + ", got '" + peek().text + "'",
                           peek().span);
    next();
  }

  Type parse_and() {
    Type t = parse_not();
    while (peek().kind == Tok::Ident && peek().text == "and") {
      next();
      t = t_inter(t, parse_not());
    }
    return t;
  }

  Type parse_not() {
    if (peek().kind == Tok::Ident && peek().text == "not") {
      next();
      ++neg_depth_;
      Type t = parse_not();
      --neg_depth_;
      return t_neg(t);
    }
    return parse_prim();
  }

  Type base_named(const std::string& name, Span s) {
    expect(Tok::LParen, "'('");
    expect(Tok::RParen, "')'");
    if (name == "integer") return t_int();
    if (name == "boolean") return t_bool();
    if (name == "atom") return t_atom();
    if (name == "term") return Type::any();
    if (name == "none") return Type::none();
    if (name == "tuple") return t_tuple();
    if (name == "function") return t_fun();
    if (name == "dynamic") {
      if (neg_depth_ % 2 == 1) dyn_under_neg = true;
      return Type::dyn();
    }
    throw TypeParseError("unknown type '" + name + "()'", s);
  }

  Type parse_prim() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        next();
        return t_int_singleton(t.ival);
      }
      case Tok::AtomLit: {
        next();
        return t_atom_singleton(intern_atom(t.text));
      }
      case Tok::Ident: {
        if (t.text == "true") {
          next();
          return t_atom_singleton(atom_true);
        }
        if (t.text == "false") {
          next();
          return t_atom_singleton(atom_false);
        }
        std::string name = t.text;
        Span s = t.span;
        next();
        return base_named(name, s);
      }
      case Tok::LBrace: {
        next();
        std::vector<Type> elems;
        bool open = false;
        if (peek().kind != Tok::RBrace) {
          while (true) {
            if (peek().kind == Tok::DotDot) {
              next();
              open = true;
              break;
            }
            elems.push_back(parse_type());
            if (peek().kind == Tok::Comma) {
              next();
              continue;
            }
            break;
          }
        }
        expect(Tok::RBrace, "'}'");
        return t_tuple_of(elems, open);
      }
      case Tok::LParen: {
        next();
        std::vector<Type> items;
        items.push_back(parse_type());
        while (peek().kind == Tok::Comma) {
          next();
          items.push_back(parse_type());
        }
        expect(Tok::RParen, "')'");
        if (peek().kind == Tok::Arrow) {
          next();
          Type cod = parse_type();
          return t_arrow_of(items, cod);
        }
        if (items.size() != 1)
          throw TypeParseError("domain list must be followed by '->'", peek().span);
        if (peek().kind == Tok::Star) {
          next();
          try {
            return strong_of(items[0]);
          } catch (const std::invalid_argument& e) {
            throw TypeParseError(e.what(), t.span);
          }
        }
        return items[0];
      }
      default:
        throw TypeParseError("expected a type, got '" + t.text + "'", t.span);
    }
  }
};

}  // namespace detail

inline ParsedType parse_type_full(const std::string& src) {
  std::vector<Token> toks = lex(src);
  size_t pos = 0;
  detail::TypeParser p(toks, pos);
  Type t = p.parse_type();
  while (p.peek().kind == Tok::Newline) p.next();
  if (p.peek().kind != Tok::End)
    throw TypeParseError("trailing input after type: '" + p.peek().text + "'",
                         p.peek().span);
  return {t, p.dyn_under_neg};
}

inline Type parse_type(const std::string& src) { return parse_type_full(src).type; }

}  // namespace fwx

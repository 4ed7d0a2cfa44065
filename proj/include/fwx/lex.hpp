#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwx {

struct Span {
  int line = 0;
  int col = 0;
};

struct LexError : std::runtime_error {
  Span span;
  LexError(std::string msg, Span s) : std::runtime_error(std::move(msg)), span(s) {}
};

enum class Tok {
  Int,      // 42, -7
  AtomLit,  // :ok
  Ident,    // fn, case, is_integer, x, integer (before "()")
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Plus,
  Star,
  Arrow,    // ->
  EqEq,     // ==
  BangEq,   // !=
  Dollar,
  Dot,
  DotDot,   // ..
  DoColon,  // do:
  Newline,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int64_t ival = 0;
  Span span;
};

// Lexer shared by the type syntax and FW-Elixir. Newlines are kept as
// tokens so the surface parser can use them as separators; the type
// parser skips them.
inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto span = [&]() { return Span{line, col}; };
  auto push = [&](Tok k, std::string t, Span s) { out.push_back({k, std::move(t), 0, s}); };
  while (i < src.size()) {
    char c = src[i];
    Span s = span();
    if (c == '\n') {
      push(Tok::Newline, "\n", s);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i, ++col;
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    if (two('-', '>')) {
      push(Tok::Arrow, "->", s);
      i += 2;
      col += 2;
      continue;
    }
    if (two('=', '=')) {
      push(Tok::EqEq, "==", s);
      i += 2;
      col += 2;
      continue;
    }
    if (two('!', '=')) {
      push(Tok::BangEq, "!=", s);
      i += 2;
      col += 2;
      continue;
    }
    if (two('.', '.')) {
      push(Tok::DotDot, "..", s);
      i += 2;
      col += 2;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
      size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, src.substr(i, j - i), 0, s};
      t.ival = std::stoll(t.text);
      out.push_back(t);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, src.substr(i, j - i), 0, s};
      t.ival = std::stoll(t.text);
      out.push_back(t);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == ':' && i + 1 < src.size() &&
        (std::isalpha(static_cast<unsigned char>(src[i + 1])) || src[i + 1] == '_')) {
      size_t j = i + 1;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      push(Tok::AtomLit, src.substr(i + 1, j - i - 1), s);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      std::string word = src.substr(i, j - i);
      col += static_cast<int>(j - i);
      i = j;
      if (word == "do" && i < src.size() && src[i] == ':') {
        push(Tok::DoColon, "do:", s);
        ++i;
        ++col;
        continue;
      }
      push(Tok::Ident, word, s);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, "(", s); break;
      case ')': push(Tok::RParen, ")", s); break;
      case '{': push(Tok::LBrace, "{", s); break;
      case '}': push(Tok::RBrace, "}", s); break;
      case ',': push(Tok::Comma, ",", s); break;
      case ';': push(Tok::Semi, ";", s); break;
      case '+': push(Tok::Plus, "+", s); break;
      case '*': push(Tok::Star, "*", s); break;
      case '$': push(Tok::Dollar, "$", s); break;
      case '.': push(Tok::Dot, ".", s); break;
      default:
        throw LexError("unexpected character '" + std::string(1, c) + "'", s);
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", 0, span()});
  return out;
}

}  // namespace fwx

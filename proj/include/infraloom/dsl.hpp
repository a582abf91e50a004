#pragma once

// Front end for the annotated declaration language (`.kls` files).
//
// The language is a small Kotlin-flavoured subset:
//
//   file       := {decl}
//   decl       := {annotation} (fun | val | object)
//   annotation := '@' Ident '(' [arg {',' arg}] ')'
//   fun        := 'fun' Ident '(' [param {',' param}] ')' [':' Type] body
//   val        := 'val' Ident '=' restOfLine
//   object     := 'object' Ident body
//
// Bodies are brace-balanced and otherwise uninterpreted; the only thing
// extracted from them is the set of identifiers they mention. That set is a
// purely lexical over-approximation of what the declaration references.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "infraloom/error.hpp"

namespace infraloom::dsl {

enum class TokenKind {
  At,
  Ident,
  StringLit,
  IntLit,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Equals,
  KwFun,
  KwVal,
  KwObject,
  KwReturn,
  Dot,
  BodyText,
};

inline const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::At: return "'@'";
    case TokenKind::Ident: return "identifier";
    case TokenKind::StringLit: return "string literal";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Equals: return "'='";
    case TokenKind::KwFun: return "'fun'";
    case TokenKind::KwVal: return "'val'";
    case TokenKind::KwObject: return "'object'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::BodyText: return "body";
  }
  return "?";
}

// `offset`/`length` describe the token's span in the LF-normalized source.
// For string literals `text` is the unescaped content while the span covers
// the quotes.
struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;
  int col = 1;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Token&) const = default;
};

inline std::string normalize_newlines(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r' && i + 1 < source.size() && source[i + 1] == '\n') continue;
    out.push_back(source[i]);
  }
  return out;
}

namespace detail {

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_keyword(std::string_view word) {
  static constexpr std::string_view kKeywords[] = {
      "as",     "break",   "class", "continue", "do",     "else",      "false",
      "for",    "fun",     "if",    "in",       "interface", "is",     "null",
      "object", "package", "return", "super",   "this",   "throw",     "true",
      "try",    "typealias", "typeof", "val",   "var",    "when",      "while"};
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

// Cursor over the normalized source tracking 1-based line and column.
// Columns count code points, so UTF-8 continuation bytes do not advance it.
class Cursor {
 public:
  Cursor(std::string_view src, std::string_view path) : src_(src), path_(path) {}

  bool done() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  std::size_t pos() const { return pos_; }
  int line() const { return line_; }
  int col() const { return col_; }
  std::string_view src() const { return src_; }

  void advance() {
    if (done()) return;
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
  }

  [[noreturn]] void fail(const char* code, int line, int col, const std::string& detail) const {
    throw DslError(code, std::string(path_), line, col, detail);
  }

  // Skips a `//` or `/* */` comment starting at the cursor. Block comments
  // nest. Returns false if the cursor is not at a comment.
  bool skip_comment() {
    if (peek() == '/' && peek(1) == '/') {
      while (!done() && peek() != '\n') advance();
      return true;
    }
    if (peek() == '/' && peek(1) == '*') {
      int start_line = line_;
      int start_col = col_;
      int depth = 0;
      while (!done()) {
        if (peek() == '/' && peek(1) == '*') {
          ++depth;
          advance();
          advance();
        } else if (peek() == '*' && peek(1) == '/') {
          --depth;
          advance();
          advance();
          if (depth == 0) return true;
        } else {
          advance();
        }
      }
      fail("UnterminatedComment", start_line, start_col, "block comment is not closed");
    }
    return false;
  }

  // Scans a quoted string starting at the opening quote. Identifiers found in
  // `$name` and `${...}` templates are appended to `refs` when non-null.
  // Returns the unescaped content.
  std::string scan_string(std::vector<std::string>* refs) {
    int start_line = line_;
    int start_col = col_;
    bool raw = peek(1) == '"' && peek(2) == '"';
    std::string value;
    if (raw) {
      advance();
      advance();
      advance();
      while (true) {
        if (done()) fail("UnterminatedString", start_line, start_col, "raw string is not closed");
        if (peek() == '"' && peek(1) == '"' && peek(2) == '"') {
          advance();
          advance();
          advance();
          return value;
        }
        if (refs && peek() == '$') {
          scan_template(*refs);
          continue;
        }
        value.push_back(peek());
        advance();
      }
    }
    advance();
    while (true) {
      if (done() || peek() == '\n') {
        fail("UnterminatedString", start_line, start_col, "string literal is not closed");
      }
      char c = peek();
      if (c == '"') {
        advance();
        return value;
      }
      if (c == '\\') {
        advance();
        if (done() || peek() == '\n') {
          fail("UnterminatedString", start_line, start_col, "string literal is not closed");
        }
        char e = peek();
        switch (e) {
          case '"': value.push_back('"'); break;
          case '\\': value.push_back('\\'); break;
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '$': value.push_back('$'); break;
          case '\'': value.push_back('\''); break;
          default:
            value.push_back('\\');
            value.push_back(e);
        }
        advance();
        continue;
      }
      if (refs && c == '$') {
        scan_template(*refs);
        continue;
      }
      value.push_back(c);
      advance();
    }
  }

  // Scans a brace-balanced block starting at '{'. Identifiers outside of
  // comments and string literals (but inside string templates) are appended
  // to `refs` when non-null.
  void scan_block(std::vector<std::string>* refs) {
    int start_line = line_;
    int start_col = col_;
    int depth = 0;
    while (true) {
      if (done()) fail("UnbalancedBrace", start_line, start_col, "'{' is never closed");
      char c = peek();
      if (skip_comment()) continue;
      if (c == '"') {
        scan_string(refs);
      } else if (c == '\'') {
        scan_char_literal();
      } else if (c == '{') {
        ++depth;
        advance();
      } else if (c == '}') {
        --depth;
        advance();
        if (depth == 0) return;
      } else if (is_ident_start(c)) {
        std::size_t begin = pos_;
        while (!done() && is_ident_char(peek())) advance();
        if (refs) refs->emplace_back(src_.substr(begin, pos_ - begin));
      } else if (is_digit(c)) {
        while (!done() && is_ident_char(peek())) advance();
      } else {
        advance();
      }
    }
  }

 private:
  void scan_char_literal() {
    int start_line = line_;
    int start_col = col_;
    advance();
    while (true) {
      if (done() || peek() == '\n') {
        fail("UnterminatedString", start_line, start_col, "character literal is not closed");
      }
      if (peek() == '\\') {
        advance();
        advance();
        continue;
      }
      if (peek() == '\'') {
        advance();
        return;
      }
      advance();
    }
  }

  void scan_template(std::vector<std::string>& refs) {
    advance();  // '$'
    if (peek() == '{') {
      scan_block(&refs);
    } else if (is_ident_start(peek())) {
      std::size_t begin = pos_;
      while (!done() && is_ident_char(peek())) advance();
      refs.emplace_back(src_.substr(begin, pos_ - begin));
    }
  }

  std::string_view src_;
  std::string_view path_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline std::vector<Token> tokenize_normalized(std::string_view src, std::string_view path) {
  std::vector<Token> tokens;
  Cursor cur(src, path);
  bool expect_body = false;
  std::vector<std::pair<int, int>> open_braces;

  auto push = [&](TokenKind kind, std::string text, int line, int col, std::size_t begin) {
    tokens.push_back(Token{kind, std::move(text), line, col, begin, cur.pos() - begin});
  };

  while (!cur.done()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
      cur.advance();
      continue;
    }
    if (cur.skip_comment()) continue;

    int line = cur.line();
    int col = cur.col();
    std::size_t begin = cur.pos();

    if (c == '"') {
      std::string value = cur.scan_string(nullptr);
      push(TokenKind::StringLit, std::move(value), line, col, begin);
      continue;
    }
    if (is_digit(c)) {
      while (!cur.done() && is_digit(cur.peek())) cur.advance();
      push(TokenKind::IntLit, std::string(src.substr(begin, cur.pos() - begin)), line, col, begin);
      continue;
    }
    if (is_ident_start(c)) {
      while (!cur.done() && is_ident_char(cur.peek())) cur.advance();
      std::string word(src.substr(begin, cur.pos() - begin));
      TokenKind kind = TokenKind::Ident;
      if (word == "fun") {
        kind = TokenKind::KwFun;
        expect_body = true;
      } else if (word == "object") {
        kind = TokenKind::KwObject;
        expect_body = true;
      } else if (word == "val") {
        kind = TokenKind::KwVal;
      } else if (word == "return") {
        kind = TokenKind::KwReturn;
      }
      push(kind, std::move(word), line, col, begin);
      continue;
    }
    if (c == '{') {
      if (expect_body) {
        cur.scan_block(nullptr);
        expect_body = false;
        push(TokenKind::BodyText, std::string(src.substr(begin, cur.pos() - begin)), line, col,
             begin);
      } else {
        open_braces.emplace_back(line, col);
        cur.advance();
        push(TokenKind::LBrace, "{", line, col, begin);
      }
      continue;
    }
    if (c == '}') {
      if (open_braces.empty()) cur.fail("UnbalancedBrace", line, col, "unexpected '}'");
      open_braces.pop_back();
      cur.advance();
      push(TokenKind::RBrace, "}", line, col, begin);
      continue;
    }

    TokenKind kind;
    switch (c) {
      case '@': kind = TokenKind::At; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case ',': kind = TokenKind::Comma; break;
      case ':': kind = TokenKind::Colon; break;
      case '=': kind = TokenKind::Equals; break;
      case '.': kind = TokenKind::Dot; break;
      default: {
        std::string shown;
        if (static_cast<unsigned char>(c) < 0x20) {
          shown = "\\x" + std::to_string(static_cast<int>(static_cast<unsigned char>(c)));
        } else {
          shown = std::string(1, c);
        }
        cur.fail("InvalidCharacter", line, col, "unexpected character '" + shown + "'");
      }
    }
    cur.advance();
    push(kind, std::string(1, c), line, col, begin);
  }

  if (!open_braces.empty()) {
    cur.fail("UnbalancedBrace", open_braces.back().first, open_braces.back().second,
             "'{' is never closed");
  }
  return tokens;
}

}  // namespace detail

// Splits `source` into tokens. CRLF line endings are normalized to LF first;
// token offsets refer to the normalized text.
//
// Throws DslError with code UnterminatedString, UnterminatedComment,
// UnbalancedBrace or InvalidCharacter.
inline std::vector<Token> tokenize(std::string_view source, std::string_view path = {}) {
  std::string normalized = normalize_newlines(source);
  return detail::tokenize_normalized(normalized, path);
}

// Identifiers mentioned in a body's text, in order of appearance. Strings and
// comments are skipped, except for `$name` / `${...}` string templates.
inline std::vector<std::string> body_identifiers(std::string_view body) {
  std::vector<std::string> refs;
  detail::Cursor cur(body, {});
  cur.scan_block(&refs);
  return refs;
}

// ---------------------------------------------------------------------------
// Declarations

enum class DeclKind { Function, Value, Object };

inline const char* to_string(DeclKind kind) {
  switch (kind) {
    case DeclKind::Function: return "Function";
    case DeclKind::Value: return "Value";
    case DeclKind::Object: return "Object";
  }
  return "?";
}

enum class ArgKind { String, Int, Ident };

struct AnnotationArg {
  ArgKind kind = ArgKind::String;
  // String content, decimal digits or dotted identifier path.
  std::string value;

  bool operator==(const AnnotationArg&) const = default;
};

struct Annotation {
  std::string name;
  std::vector<AnnotationArg> args;
  std::string file;
  int line = 0;

  bool operator==(const Annotation&) const = default;
};

struct Param {
  std::string name;
  std::string type_name;

  bool operator==(const Param&) const = default;
};

struct Declaration {
  DeclKind kind = DeclKind::Function;
  std::string name;
  std::vector<Annotation> annotations;
  std::vector<Param> params;                // Function only
  std::optional<std::string> return_type;   // Function only
  std::string initializer;                  // Value only
  std::set<std::string> body_refs;
  std::string file;
  int line = 0;

  const Annotation* find_annotation(std::string_view annotation) const {
    for (const auto& a : annotations) {
      if (a.name == annotation) return &a;
    }
    return nullptr;
  }

  bool operator==(const Declaration&) const = default;
};

struct SourceFile {
  std::string path;
  std::vector<Declaration> declarations;

  const Declaration* find(std::string_view name) const {
    for (const auto& d : declarations) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  bool operator==(const SourceFile&) const = default;
};

inline bool is_routing_annotation(std::string_view name) {
  return name == "Get" || name == "Post" || name == "StaticGet";
}

inline bool is_known_annotation(std::string_view name) {
  return is_routing_annotation(name) || name == "DynamoDBTable";
}

inline std::size_t annotation_arity(std::string_view name) {
  return (name == "Get" || name == "Post") ? 1 : 2;
}

// Renders an annotation back to source form, e.g. `@StaticGet("/a.css", MimeType.CSS)`.
inline std::string render_annotation(const Annotation& a) {
  std::string out = "@" + a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    const auto& arg = a.args[i];
    if (arg.kind == ArgKind::String) {
      out.push_back('"');
      for (char c : arg.value) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\r': out += "\\r"; break;
          case '$': out += "\\$"; break;
          default: out.push_back(c);
        }
      }
      out.push_back('"');
    } else {
      out += arg.value;
    }
  }
  out += ")";
  return out;
}

namespace detail {

class Parser {
 public:
  Parser(std::string src, std::string path)
      : src_(std::move(src)), path_(std::move(path)), tokens_(tokenize_normalized(src_, path_)) {}

  SourceFile parse() {
    SourceFile file;
    file.path = path_;
    std::set<std::string> names;
    while (!at_end()) {
      Declaration decl = parse_declaration();
      if (!names.insert(decl.name).second) {
        fail_at(decl.line, "unique declaration name", "duplicate '" + decl.name + "'");
      }
      file.declarations.push_back(std::move(decl));
    }
    return file;
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token* peek() const { return at_end() ? nullptr : &tokens_[pos_]; }
  bool check(TokenKind kind) const { return !at_end() && tokens_[pos_].kind == kind; }

  int current_line() const {
    if (!at_end()) return tokens_[pos_].line;
    return tokens_.empty() ? 1 : tokens_.back().line;
  }

  [[noreturn]] void fail_at(int line, const std::string& expected, const std::string& found) const {
    throw DslError("ParseError", path_, line, 0, "expected " + expected + ", found " + found);
  }

  [[noreturn]] void fail_expected(const std::string& expected) const {
    std::string found = "end of input";
    if (const Token* t = peek()) {
      found = std::string(to_string(t->kind));
      if (t->kind != TokenKind::BodyText) found += " '" + t->text + "'";
    }
    fail_at(current_line(), expected, found);
  }

  const Token& expect(TokenKind kind) {
    if (!check(kind)) fail_expected(to_string(kind));
    return tokens_[pos_++];
  }

  // Ident {'.' Ident}
  std::string dotted_identifier() {
    std::string name = expect(TokenKind::Ident).text;
    while (check(TokenKind::Dot)) {
      ++pos_;
      name += "." + expect(TokenKind::Ident).text;
    }
    return name;
  }

  Annotation parse_annotation() {
    const Token& at = expect(TokenKind::At);
    Annotation a;
    a.file = path_;
    a.line = at.line;
    a.name = expect(TokenKind::Ident).text;
    if (!is_known_annotation(a.name)) {
      throw DslError("UnknownAnnotation", path_, a.line, 0, "'" + a.name + "'");
    }
    expect(TokenKind::LParen);
    if (!check(TokenKind::RParen)) {
      while (true) {
        if (check(TokenKind::StringLit)) {
          a.args.push_back({ArgKind::String, tokens_[pos_++].text});
        } else if (check(TokenKind::IntLit)) {
          a.args.push_back({ArgKind::Int, tokens_[pos_++].text});
        } else if (check(TokenKind::Ident)) {
          a.args.push_back({ArgKind::Ident, dotted_identifier()});
        } else {
          fail_expected("annotation argument");
        }
        if (!check(TokenKind::Comma)) break;
        ++pos_;
      }
    }
    expect(TokenKind::RParen);
    if (a.args.size() != annotation_arity(a.name)) {
      throw DslError("ArityMismatch", path_, a.line, 0,
                     "@" + a.name + " takes " + std::to_string(annotation_arity(a.name)) +
                         " argument(s), got " + std::to_string(a.args.size()));
    }
    check_argument_kinds(a);
    return a;
  }

  void check_argument_kinds(const Annotation& a) const {
    auto want = [&](std::size_t i, ArgKind kind, const char* what) {
      if (a.args[i].kind != kind) {
        fail_at(a.line, std::string(what) + " as argument " + std::to_string(i + 1) + " of @" + a.name,
                "'" + a.args[i].value + "'");
      }
    };
    want(0, ArgKind::String, "string literal");
    if (a.name == "StaticGet") want(1, ArgKind::Ident, "MIME identifier");
    if (a.name == "DynamoDBTable") {
      want(1, ArgKind::Ident, "access mode");
      const std::string& mode = a.args[1].value;
      if (mode != "Read" && mode != "Write" && mode != "ReadWrite") {
        fail_at(a.line, "Read, Write or ReadWrite", "'" + mode + "'");
      }
    }
  }

  Declaration parse_declaration() {
    Declaration decl;
    while (check(TokenKind::At)) decl.annotations.push_back(parse_annotation());

    const Token* head = peek();
    if (!head || (head->kind != TokenKind::KwFun && head->kind != TokenKind::KwVal &&
                  head->kind != TokenKind::KwObject)) {
      fail_expected("declaration ('fun', 'val' or 'object')");
    }
    decl.file = path_;
    decl.line = decl.annotations.empty() ? head->line : decl.annotations.front().line;

    switch (head->kind) {
      case TokenKind::KwFun: parse_function(decl); break;
      case TokenKind::KwVal: parse_value(decl); break;
      default: parse_object(decl); break;
    }
    decl.body_refs.erase(decl.name);
    check_annotation_targets(decl, head->line);
    return decl;
  }

  void check_annotation_targets(const Declaration& decl, int line) const {
    int routing = 0;
    for (const auto& a : decl.annotations) {
      if (!is_routing_annotation(a.name)) continue;
      ++routing;
      if ((a.name == "Get" || a.name == "Post") && decl.kind != DeclKind::Function) {
        fail_at(line, "'fun' after @" + a.name, to_string(decl.kind));
      }
      if (a.name == "StaticGet" && decl.kind != DeclKind::Value) {
        fail_at(line, "'val' after @StaticGet", to_string(decl.kind));
      }
    }
    if (routing > 1) {
      fail_at(decl.annotations.front().line, "at most one routing annotation",
              std::to_string(routing));
    }
  }

  void add_body_refs(Declaration& decl, const std::string& body) {
    std::set<std::string> params;
    for (const auto& p : decl.params) params.insert(p.name);
    for (auto& id : body_identifiers(body)) {
      if (is_keyword(id) || params.count(id)) continue;
      decl.body_refs.insert(std::move(id));
    }
  }

  void parse_function(Declaration& decl) {
    decl.kind = DeclKind::Function;
    expect(TokenKind::KwFun);
    decl.name = expect(TokenKind::Ident).text;
    expect(TokenKind::LParen);
    if (!check(TokenKind::RParen)) {
      while (true) {
        Param p;
        p.name = expect(TokenKind::Ident).text;
        expect(TokenKind::Colon);
        p.type_name = expect(TokenKind::Ident).text;
        for (const auto& existing : decl.params) {
          if (existing.name == p.name) {
            fail_at(current_line(), "unique parameter name", "duplicate '" + p.name + "'");
          }
        }
        decl.params.push_back(std::move(p));
        if (!check(TokenKind::Comma)) break;
        ++pos_;
      }
    }
    expect(TokenKind::RParen);
    if (check(TokenKind::Colon)) {
      ++pos_;
      decl.return_type = expect(TokenKind::Ident).text;
    }
    add_body_refs(decl, expect(TokenKind::BodyText).text);
  }

  void parse_value(Declaration& decl) {
    decl.kind = DeclKind::Value;
    expect(TokenKind::KwVal);
    decl.name = expect(TokenKind::Ident).text;
    const Token& eq = expect(TokenKind::Equals);
    std::size_t first = pos_;
    while (!at_end() && tokens_[pos_].line == eq.line) ++pos_;
    if (first == pos_) fail_expected("initializer");
    const Token& a = tokens_[first];
    const Token& b = tokens_[pos_ - 1];
    decl.initializer = src_.substr(a.offset, b.offset + b.length - a.offset);
    for (std::size_t i = first; i < pos_; ++i) {
      const Token& t = tokens_[i];
      if (t.kind == TokenKind::Ident && !is_keyword(t.text)) {
        decl.body_refs.insert(t.text);
      } else if (t.kind == TokenKind::BodyText) {
        add_body_refs(decl, t.text);
      }
    }
  }

  void parse_object(Declaration& decl) {
    decl.kind = DeclKind::Object;
    expect(TokenKind::KwObject);
    decl.name = expect(TokenKind::Ident).text;
    add_body_refs(decl, expect(TokenKind::BodyText).text);
  }

  std::string src_;
  std::string path_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses one `.kls` file. The first error aborts the whole file: there is no
// recovery, so a partially understood source never reaches synthesis.
//
// Throws DslError with code ParseError, UnknownAnnotation, ArityMismatch or
// any tokenizer error.
inline SourceFile parse_file(std::string_view source, std::string_view path) {
  return detail::Parser(normalize_newlines(source), std::string(path)).parse();
}

// `File("css/style.css")` -> "css/style.css"
inline std::string extract_static_path(const Declaration& decl) {
  auto malformed = [&]() -> DslError {
    return DslError("MalformedInitializer", decl.file, decl.line, 0,
                    "expected File(\"<path>\"), found '" + decl.initializer + "'");
  };
  std::vector<Token> tokens;
  try {
    tokens = tokenize(decl.initializer, decl.file);
  } catch (const DslError&) {
    throw malformed();
  }
  if (tokens.size() != 4 || tokens[0].kind != TokenKind::Ident || tokens[0].text != "File" ||
      tokens[1].kind != TokenKind::LParen || tokens[2].kind != TokenKind::StringLit ||
      tokens[3].kind != TokenKind::RParen) {
    throw malformed();
  }
  return tokens[2].text;
}

}  // namespace infraloom::dsl

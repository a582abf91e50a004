#include <random>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "infraloom/dsl.hpp"

using namespace infraloom;
using namespace infraloom::dsl;

namespace {

const char* kStaticSite = "@StaticGet(\"/style.css\", MimeType.CSS)\nval style = File(\"css/style.css\")\n";
const char* kHelloWorld = "@Get(\"/\")\nfun root(): String {\n    return \"Hello world!\"\n}\n";
const char* kStorageProject =
    "@DynamoDBTable(\"id\", ReadWrite)\nobject Storage {\n    val table = DynamoTable(\"id\")\n}\n";

std::vector<TokenKind> kinds(const std::vector<Token>& tokens) {
  std::vector<TokenKind> out;
  for (const auto& t : tokens) out.push_back(t.kind);
  return out;
}

std::string error_code(const std::string& source) {
  try {
    parse_file(source, "t.kls");
  } catch (const DslError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Tokenize, AnnotationTokens) {
  auto tokens = tokenize("@Get(\"/\")");
  ASSERT_EQ(kinds(tokens), (std::vector<TokenKind>{TokenKind::At, TokenKind::Ident, TokenKind::LParen,
                                                   TokenKind::StringLit, TokenKind::RParen}));
  EXPECT_EQ(tokens[1].text, "Get");
  EXPECT_EQ(tokens[3].text, "/");
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, NestedBodyIsOneToken) {
  auto tokens = tokenize("fun f() { { } }");
  ASSERT_EQ(kinds(tokens), (std::vector<TokenKind>{TokenKind::KwFun, TokenKind::Ident, TokenKind::LParen,
                                                   TokenKind::RParen, TokenKind::BodyText}));
  EXPECT_EQ(tokens[4].text, "{ { } }");
}

TEST(Tokenize, StringEscapesResolved) {
  auto tokens = tokenize(R"("a\"b\\c")");
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].text, "a\"b\\c");
  EXPECT_EQ(tokens[0].length, 9u);
}

TEST(Tokenize, CommentsSkipped) {
  auto tokens = tokenize("// line\n/* block /* nested */ */ val");
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].kind, TokenKind::KwVal);
  EXPECT_EQ(tokens[0].line, 2);
}

TEST(Tokenize, BracesInsideBodyStringsAndComments) {
  auto tokens = tokenize("object O { val s = \"}\" // }\n /* } */ val c = '}' }");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[2].kind, TokenKind::BodyText);
}

TEST(Tokenize, CrLfNormalized) {
  auto tokens = tokenize("val\r\nx");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[1].line, 2);
  EXPECT_EQ(tokens[1].col, 1);
}

TEST(Tokenize, ColumnsCountCodePoints) {
  auto tokens = tokenize("\"\xC3\xA9\xC3\xA9\" x");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[1].col, 6);
}

TEST(Tokenize, Errors) {
  auto code = [](const std::string& src) -> std::pair<std::string, int> {
    try {
      tokenize(src);
    } catch (const DslError& e) {
      return {e.code(), e.line()};
    }
    return {"", 0};
  };
  EXPECT_EQ(code("\n\"abc"), std::make_pair(std::string("UnterminatedString"), 2));
  EXPECT_EQ(code("\"ab\ncd\""), std::make_pair(std::string("UnterminatedString"), 1));
  EXPECT_EQ(code("val x\n/* open"), std::make_pair(std::string("UnterminatedComment"), 2));
  EXPECT_EQ(code("fun f() {\n{ }"), std::make_pair(std::string("UnbalancedBrace"), 1));
  EXPECT_EQ(code("}"), std::make_pair(std::string("UnbalancedBrace"), 1));
  EXPECT_EQ(code("fun f() { \"unterminated }"), std::make_pair(std::string("UnterminatedString"), 1));
  try {
    tokenize("val x\n  val # y");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.code(), "InvalidCharacter");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.col(), 7);
  }
}

TEST(Tokenize, TotalOnArbitraryBytes) {
  std::mt19937 rng(7);
  const std::string alphabet = "@(){},:=.\"'/*\\ \n\tabfunvalobject0123#$";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    int len = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int j = 0; j < len; ++j) s.push_back(alphabet[rng() % alphabet.size()]);
    try {
      tokenize(s);
    } catch (const DslError& e) {
      EXPECT_TRUE(e.code() == "UnterminatedString" || e.code() == "UnterminatedComment" ||
                  e.code() == "UnbalancedBrace" || e.code() == "InvalidCharacter")
          << e.code();
    }
  }
}

TEST(ParseFile, HelloWorld) {
  SourceFile f = parse_file(kHelloWorld, "app.kls");
  ASSERT_EQ(f.declarations.size(), 1u);
  const auto& d = f.declarations[0];
  EXPECT_EQ(d.kind, DeclKind::Function);
  EXPECT_EQ(d.name, "root");
  ASSERT_EQ(d.annotations.size(), 1u);
  EXPECT_EQ(d.annotations[0].name, "Get");
  EXPECT_EQ(d.annotations[0].args, (std::vector<AnnotationArg>{{ArgKind::String, "/"}}));
  EXPECT_TRUE(d.params.empty());
  EXPECT_EQ(d.return_type, "String");
  EXPECT_TRUE(d.body_refs.empty());
}

TEST(ParseFile, StaticSite) {
  SourceFile f = parse_file(kStaticSite, "site.kls");
  ASSERT_EQ(f.declarations.size(), 1u);
  const auto& d = f.declarations[0];
  EXPECT_EQ(d.kind, DeclKind::Value);
  EXPECT_EQ(d.name, "style");
  EXPECT_EQ(d.annotations[0].name, "StaticGet");
  EXPECT_EQ(d.annotations[0].args, (std::vector<AnnotationArg>{{ArgKind::String, "/style.css"},
                                                               {ArgKind::Ident, "MimeType.CSS"}}));
  EXPECT_EQ(d.initializer, "File(\"css/style.css\")");
  EXPECT_EQ(d.body_refs, (std::set<std::string>{"File"}));
}

TEST(ParseFile, StorageProject) {
  SourceFile f = parse_file(kStorageProject, "storage.kls");
  const auto& d = f.declarations.at(0);
  EXPECT_EQ(d.kind, DeclKind::Object);
  EXPECT_EQ(d.name, "Storage");
  EXPECT_EQ(d.annotations[0].args[1].value, "ReadWrite");
  EXPECT_EQ(d.body_refs, (std::set<std::string>{"DynamoTable", "table"}));
}

TEST(ParseFile, BodyRefsExcludeParamsKeywordsAndSelf) {
  SourceFile f = parse_file(
      "fun f(a: Int, b: String): String {\n"
      "  val c = g(a) // h\n"
      "  if (b == null) return f(1)\n"
      "  return \"$Other and ${Third.x} not Fourth\"\n"
      "}\n",
      "t.kls");
  EXPECT_EQ(f.declarations[0].body_refs, (std::set<std::string>{"Other", "Third", "c", "g", "x"}));
}

TEST(ParseFile, UnknownAnnotation) {
  try {
    parse_file("@Gett(\"/\") fun f() {}", "t.kls");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.code(), "UnknownAnnotation");
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("Gett"), std::string::npos);
  }
}

TEST(ParseFile, ArityAndShapeErrors) {
  EXPECT_EQ(error_code("@Get(\"/\", \"x\") fun f() {}"), "ArityMismatch");
  EXPECT_EQ(error_code("@StaticGet(\"/a\") val a = File(\"a\")"), "ArityMismatch");
  EXPECT_EQ(error_code("@DynamoDBTable(\"t\", Delete) object O {}"), "ParseError");
  EXPECT_EQ(error_code("@Get(1) fun f() {}"), "ParseError");
  EXPECT_EQ(error_code("@Get(\"/\") val x = 1"), "ParseError");
  EXPECT_EQ(error_code("@Get(\"/\") @Post(\"/\") fun f() {}"), "ParseError");
  EXPECT_EQ(error_code("fun f() {}\nfun f() {}"), "ParseError");
  EXPECT_EQ(error_code("fun f(a Int) {}"), "ParseError");
  EXPECT_EQ(error_code("val x ="), "ParseError");
  EXPECT_EQ(error_code("return"), "ParseError");
  EXPECT_EQ(error_code("@Get(\"/\")"), "ParseError");
}

TEST(ParseFile, ParseErrorReportsLineAndFound) {
  try {
    parse_file("fun ok() {}\n\nobject (", "x.kls");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.code(), "ParseError");
    EXPECT_EQ(e.file(), "x.kls");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("expected identifier"), std::string::npos);
  }
}

TEST(ExtractStaticPath, Cases) {
  Declaration d;
  d.kind = DeclKind::Value;
  d.initializer = "File(\"css/style.css\")";
  EXPECT_EQ(extract_static_path(d), "css/style.css");
  d.initializer = "File(\"\")";
  EXPECT_EQ(extract_static_path(d), "");
  d.initializer = "Files(\"x\")";
  try {
    extract_static_path(d);
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.code(), "MalformedInitializer");
  }
  d.initializer = "File(\"x\").readText()";
  EXPECT_THROW(extract_static_path(d), DslError);
}

// ---------------------------------------------------------------------------
// Properties over generated files

namespace {

struct Generator {
  std::mt19937 rng;
  int counter = 0;

  explicit Generator(unsigned seed) : rng(seed) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  std::string ident() {
    static const char* words[] = {"alpha", "Beta", "gamma_1", "Delta", "eps", "Zeta2", "eta", "Theta_x"};
    return std::string(words[pick(0, 7)]) + std::to_string(counter++);
  }

  std::string gap() {
    switch (pick(0, 5)) {
      case 0: return " ";
      case 1: return "\n";
      case 2: return "  \t";
      case 3: return " // note {\n";
      case 4: return " /* c } */ ";
      default: return "\n\n  ";
    }
  }

  std::string string_lit() {
    static const char* parts[] = {"a", "/x", "\\\"", "\\\\", "{", "}", "é", " "};
    std::string s = "\"";
    int n = pick(0, 4);
    for (int i = 0; i < n; ++i) s += parts[pick(0, 7)];
    return s + "\"";
  }

  std::string body(int depth = 0) {
    std::string s = "{";
    int n = pick(0, 4);
    for (int i = 0; i < n; ++i) {
      switch (pick(0, 4)) {
        case 0: s += " " + ident(); break;
        case 1: s += " " + string_lit(); break;
        case 2: s += depth < 3 ? " " + body(depth + 1) : " x"; break;
        case 3: s += " // }\n"; break;
        default: s += " 42 + (a.b)"; break;
      }
    }
    return s + " }";
  }

  std::string annotation_arg_string() { return string_lit(); }

  std::string declaration() {
    std::string out;
    switch (pick(0, 2)) {
      case 0:
        if (pick(0, 1)) out += "@Get(" + annotation_arg_string() + ")" + gap();
        if (pick(0, 1)) out += "@DynamoDBTable(" + string_lit() + ", ReadWrite)" + gap();
        out += "fun" + gap() + ident() + "(";
        if (pick(0, 1)) out += ident() + ":" + gap() + "Int," + gap() + ident() + " : String";
        out += ")";
        if (pick(0, 1)) out += ": Unit";
        out += gap() + body();
        break;
      case 1:
        if (pick(0, 1)) out += "@StaticGet(" + string_lit() + ", MimeType.CSS)" + gap();
        out += "val " + ident() + " = File(" + string_lit() + ")";
        break;
      default:
        if (pick(0, 1)) out += "@DynamoDBTable(" + string_lit() + ", Read)" + gap();
        out += "object " + ident() + gap() + body();
        break;
    }
    return out;
  }

  std::string file() {
    std::string out;
    int n = pick(0, 5);
    for (int i = 0; i < n; ++i) out += gap() + declaration() + "\n";
    return out;
  }
};

// (line, col) of byte offset `off`, columns in code points.
std::pair<int, int> position_of(const std::string& src, std::size_t off) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < off; ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
      ++col;
    }
  }
  return {line, col};
}

bool only_trivia(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s.compare(i, 2, "//") == 0) {
      i = s.find('\n', i);
      if (i == std::string::npos) return true;
    } else if (s.compare(i, 2, "/*") == 0) {
      i = s.find("*/", i);
      if (i == std::string::npos) return false;
      i += 2;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(DslProperties, PositionSoundnessAndCoverage) {
  Generator gen(2024);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string src = gen.file();
    std::vector<Token> tokens;
    ASSERT_NO_THROW(tokens = tokenize(src)) << src;
    std::size_t cursor = 0;
    for (const auto& t : tokens) {
      ASSERT_GE(t.offset, cursor);
      ASSERT_TRUE(only_trivia(src.substr(cursor, t.offset - cursor))) << src;
      auto [line, col] = position_of(src, t.offset);
      EXPECT_EQ(t.line, line);
      EXPECT_EQ(t.col, col);
      std::string span = src.substr(t.offset, t.length);
      if (t.kind == TokenKind::StringLit) {
        EXPECT_EQ(span.front(), '"');
        EXPECT_EQ(span.back(), '"');
      } else {
        EXPECT_EQ(span, t.text);
      }
      cursor = t.offset + t.length;
    }
    EXPECT_TRUE(only_trivia(src.substr(cursor)));
  }
}

TEST(DslProperties, ParseIsDeterministic) {
  Generator gen(99);
  for (int iter = 0; iter < 300; ++iter) {
    std::string src = gen.file();
    EXPECT_EQ(parse_file(src, "a.kls"), parse_file(src, "a.kls"));
  }
}

TEST(DslProperties, ConcurrentParsesAgree) {
  Generator gen(5);
  std::vector<std::string> sources;
  for (int i = 0; i < 50; ++i) sources.push_back(gen.file());
  std::vector<SourceFile> expected;
  for (const auto& s : sources) expected.push_back(parse_file(s, "c.kls"));
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!(parse_file(sources[i], "c.kls") == expected[i])) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(DslProperties, AnnotationRoundTrip) {
  Generator gen(31337);
  int checked = 0;
  for (int iter = 0; iter < 500; ++iter) {
    SourceFile f = parse_file(gen.file(), "r.kls");
    for (const auto& d : f.declarations) {
      if (d.annotations.empty()) continue;
      std::string src;
      for (const auto& a : d.annotations) src += render_annotation(a) + "\n";
      switch (d.kind) {
        case DeclKind::Function: src += "fun " + d.name + "() {}"; break;
        case DeclKind::Value: src += "val " + d.name + " = File(\"x\")"; break;
        case DeclKind::Object: src += "object " + d.name + " {}"; break;
      }
      SourceFile again = parse_file(src, "r.kls");
      ASSERT_EQ(again.declarations.size(), 1u);
      const auto& got = again.declarations[0].annotations;
      ASSERT_EQ(got.size(), d.annotations.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].name, d.annotations[i].name);
        EXPECT_EQ(got[i].args, d.annotations[i].args);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

#include <doctest.h>

#include "steerbench/frontend/lexer.hpp"
#include "steerbench/frontend/parser.hpp"
#include "steerbench/frontend/typecheck.hpp"
#include "support.hpp"

using namespace steerbench::frontend;

namespace {

std::vector<std::string> texts(const std::vector<Lexeme>& lx) {
  std::vector<std::string> out;
  for (const auto& l : lx) out.push_back(l.text);
  return out;
}

Ast parse_text(const std::string& src) {
  auto lx = lex(src);
  REQUIRE(lx.ok());
  auto ast = parse(lx.value());
  REQUIRE(ast.ok());
  return ast.value();
}

bool has_kind(const std::vector<Diagnostic>& ds, DiagnosticKind k) {
  for (const auto& d : ds) {
    if (d.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("lex splits a minimal kernel") {
  auto r = lex("kernel void A(){}");
  REQUIRE(r.ok());
  CHECK(texts(r.value()) == std::vector<std::string>{"kernel", "void", "A", "(", ")", "{", "}"});
}

TEST_CASE("lex splits a declaration") {
  auto r = lex("int x = 3;");
  REQUIRE(r.ok());
  CHECK(texts(r.value()) == std::vector<std::string>{"int", "x", "=", "3", ";"});
  CHECK(r.value()[3].kind == LexemeKind::int_literal);
}

TEST_CASE("lex reports an illegal character with its position") {
  auto r = lex("a $ b");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic().kind == DiagnosticKind::lex);
  CHECK(r.diagnostic().location.line == 1);
  CHECK(r.diagnostic().location.column == 3);
}

TEST_CASE("lex strips comments and tracks lines") {
  auto r = lex("// c\nint /* x\n y */ z;");
  REQUIRE(r.ok());
  CHECK(texts(r.value()) == std::vector<std::string>{"int", "z", ";"});
  CHECK(r.value()[1].pos.line == 3);
}

TEST_CASE("lex rules for literals") {
  CHECK_FALSE(lex("1.").ok());
  CHECK_FALSE(lex("99999999999999999999999").ok());
  auto r = lex("3.25 7");
  REQUIRE(r.ok());
  CHECK(r.value()[0].kind == LexemeKind::float_literal);
  CHECK(r.value()[1].kind == LexemeKind::int_literal);
  CHECK_FALSE(lex("/* open").ok());
}

TEST_CASE("parse a single assignment") {
  const Ast ast = parse_text("kernel void A(global int* a){a[get_global_id(0)] = 1;}");
  CHECK(ast.name == "A");
  REQUIRE(ast.params.size() == 1);
  CHECK(ast.params[0].is_pointer);
  CHECK(ast.params[0].space == AddressSpace::global);
  REQUIRE(ast.body.size() == 1);
  CHECK(ast.body[0].kind == StmtKind::assign);
}

TEST_CASE("parse an if statement") {
  const Ast ast = parse_text("kernel void A(){ if (1 < 2) {} }");
  REQUIRE(ast.body.size() == 1);
  CHECK(ast.body[0].kind == StmtKind::if_);
  CHECK_FALSE(ast.body[0].has_else);
}

TEST_CASE("parse rejects a malformed for") {
  auto lx = lex("kernel void A(){ for }");
  REQUIRE(lx.ok());
  auto r = parse(lx.value());
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic().kind == DiagnosticKind::parse);
}

TEST_CASE("parse rejects trailing tokens and stray qualifiers") {
  CHECK_FALSE(parse(lex("kernel void A(){} x").value()).ok());
  CHECK_FALSE(parse(lex("kernel void A(global int a){}").value()).ok());
  CHECK_FALSE(parse(lex("kernel void A(){ 1 = 2; }").value()).ok());
}

TEST_CASE("typecheck accepts saxpy") {
  const Ast ast = parse_text(
      "kernel void S(global float* y, global float* x, float a) {"
      " int i = get_global_id(0); y[i] = a * x[i] + y[i]; }");
  CHECK(typecheck(ast).empty());
}

TEST_CASE("typecheck reports an undeclared variable as a scope error") {
  const Ast ast = parse_text("kernel void A(global int* a){ a[0] = y; }");
  CHECK(has_kind(typecheck(ast), DiagnosticKind::scope));
}

TEST_CASE("typecheck rejects float operands of &&") {
  const Ast ast = parse_text("kernel void A(global float* a){ int i = 0; float f = a[i] && 3.0; }");
  CHECK(has_kind(typecheck(ast), DiagnosticKind::type));
}

TEST_CASE("typecheck rules") {
  auto diag = [](const std::string& src) { return typecheck(parse_text(src)); };
  CHECK(has_kind(diag("kernel void A(int a){ a[0] = 1; }"), DiagnosticKind::type));
  CHECK(has_kind(diag("kernel void A(global int* a){ atomic_add(a[0], 1); }"), DiagnosticKind::type));
  CHECK(has_kind(diag("kernel void A(float f){ if (f) {} }"), DiagnosticKind::type));
  CHECK(has_kind(diag("kernel void A(global float* a){ a[0] = 1.0 % 2.0; }"), DiagnosticKind::type));
  CHECK(diag("kernel void A(global int* a){ atomic_add(&a[0], 1); }").empty());
  CHECK(diag("kernel void A(int n){ if (n) {} for (int i = 0; i < n; i = i + 1) {} }").empty());
  CHECK(has_kind(diag("kernel void A(){ for (int i = 0; i < 2; i = i + 1) {} i = 3; }"), DiagnosticKind::scope));
}

TEST_CASE("validate verdicts") {
  CHECK(validate("kernel void A(){}").valid);
  CHECK_FALSE(validate("kernel void A(){ x = 1; }").valid);
  CHECK_FALSE(validate("").valid);
  CHECK_FALSE(validate("kernel void A(){}").diagnostics.size() > 0);
  const auto bad = validate("kernel void A(){ x = 1; }");
  REQUIRE_FALSE(bad.diagnostics.empty());
}

TEST_CASE("validate is deterministic") {
  for (const auto& [name, text] : test::golden_kernels()) {
    const auto a = validate(text);
    const auto b = validate(text);
    CHECK(a.valid == b.valid);
    CHECK(a.valid);
  }
}

TEST_CASE("diagnostic locations lie inside the text") {
  for (const std::string src : {"kernel void A(){ x = 1; }", "kernel void A(){ for }", "kernel void A(\n) { $ }",
                                "kernel void A(global float* a){\n float f = a[0] && 3.0; }"}) {
    const auto v = validate(src);
    REQUIRE_FALSE(v.valid);
    for (const auto& d : v.diagnostics) {
      std::size_t lines = 1;
      for (char c : src) lines += c == '\n';
      CHECK(d.location.line >= 1);
      CHECK(d.location.line <= lines);
      CHECK(d.location.column >= 1);
    }
  }
}

TEST_CASE("render gives the canonical form") {
  CHECK(render(parse_text("kernel void A(){}")) == "kernel void A ( ) { }");
  CHECK(render(parse_text("kernel void A(int n){int x=(n+1)*2;}")) ==
        "kernel void A ( int n ) { int x = ( n + 1 ) * 2 ; }");
  CHECK(render(parse_text("kernel void A(int n){int x=n-(n-1);}")) == "kernel void A ( int n ) { int x = n - ( n - 1 ) ; }");
}

TEST_CASE("render round-trips every golden kernel") {
  for (const auto& [name, text] : test::golden_kernels()) {
    CAPTURE(name);
    const Ast a = parse_text(text);
    const Ast b = parse_text(render(a));
    CHECK(structurally_equal(a, b));
    CHECK(render(b) == render(a));
  }
}

TEST_CASE("render round-trips nested control flow") {
  const std::string src =
      "kernel void N(global int* a, int n) { for (int i = 0; i < n; i = i + 1) { if (i % 2 == 0) {"
      " for (int j = 0; j < i; j = j + 1) { a[i] = a[i] - -j; } } else { if (!(i > 3)) { a[0] = 1; } } } }";
  const Ast a = parse_text(src);
  CHECK(structurally_equal(a, parse_text(render(a))));
  CHECK(statement_count(a) == 10);  // loop initializers and steps count as statements
}

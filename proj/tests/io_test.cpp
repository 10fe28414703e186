#include <gtest/gtest.h>

#include "probisim/generators.hpp"
#include "probisim/io.hpp"

using namespace probisim;

namespace {

ParseError::Kind kind_of(auto&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError::Kind::Syntax;
}

std::size_t line_of(auto&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError";
  return 0;
}

constexpr const char* kCoin = R"(# fair coin
states: h t done
actions: flip stop
h flip h 0.5
h flip t 1/2
t flip h 0.5
t flip t 0.5
h stop done 1
)";

}  // namespace

TEST(ParsePts, Example) {
  const auto doc = parse_pts(kCoin);
  EXPECT_EQ(doc.states, (std::vector<std::string>{"h", "t", "done"}));
  EXPECT_EQ(doc.pts.n, 3u);
  EXPECT_EQ(doc.pts.actions(), (std::vector<std::string>{"flip", "stop"}));
  EXPECT_EQ(doc.pts.matrix("flip")(0, 1), 0.5);
  EXPECT_EQ(doc.pts.matrix("stop")(0, 2), 1.0);
  EXPECT_FALSE(doc.pts.enabled("stop", 1));
  EXPECT_FALSE(doc.pts.enabled("flip", 2));
}

TEST(ParsePts, CompactDeclarations) {
  const auto doc = parse_pts("states:a b\nactions:x\na x b 1\n");
  EXPECT_EQ(doc.states, (std::vector<std::string>{"a", "b"}));
}

TEST(ParsePts, FractionSyntax) {
  EXPECT_EQ(parse_probability("1/3"), 1.0 / 3.0);
  EXPECT_EQ(parse_probability("0.25"), 0.25);
  EXPECT_FALSE(parse_probability("1/0"));
  EXPECT_FALSE(parse_probability("x"));
  EXPECT_FALSE(parse_probability("0.5.1"));
  const auto doc = parse_pts("states: a b c\nactions: x\na x a 1/3\na x b 1/3\na x c 1/3\n");
  EXPECT_NEAR(doc.pts.matrix("x").row(0).sum(), 1.0, 1e-15);
}

TEST(ParsePts, Errors) {
  using K = ParseError::Kind;
  EXPECT_EQ(kind_of([] { parse_pts("states: a\nactions: x\na y a 1\n"); }), K::UnknownName);
  EXPECT_EQ(kind_of([] { parse_pts("states: a\nactions: x\na x b 1\n"); }), K::UnknownName);
  EXPECT_EQ(kind_of([] { parse_pts("states: a\nactions: x\na x a\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_pts("states: a\nactions: x\na x a one\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_pts("actions: x\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_pts("states: a a\nactions: x\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_pts("states: a\nactions: x\na x a 0.5\na x a 0.5\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_pts("states: a b\nactions: x\na x a 0.5\n"); }), K::Validation);
  EXPECT_EQ(kind_of([] { parse_pts("states: a b\nactions: x\na x a 1.5\na x b -0.5\n"); }), K::Validation);
}

TEST(ParsePts, LineNumbers) {
  EXPECT_EQ(line_of([] { parse_pts("states: a\n\n# c\nactions: x\na x q 1\n"); }), 5u);
  EXPECT_EQ(line_of([] { parse_pts("states: a\nactions: x\na x a 0.5\na x a 0.5\n"); }), 4u);
  // a bad row sum points at the first transition of that row
  EXPECT_EQ(line_of([] { parse_pts("states: a b\nactions: x\nb x b 1\na x a 0.25\na x b 0.25\n"); }), 4u);
  try {
    parse_pts("states: a\nactions: x\na x a\n");
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 3: ", 0), 0u);
  }
}

TEST(ParsePts, PrintRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PtsDocument doc{gen_random_pts(6, {"a", "b", "c"}, 0.5, seed), default_state_names(6)};
    const auto text = print_pts(doc, {"generated"});
    const auto back = parse_pts(text);
    EXPECT_EQ(back.states, doc.states);
    EXPECT_TRUE(back.pts == doc.pts);
    EXPECT_EQ(print_pts(back, {"generated"}), text);
  }
  const auto q = gen_random_pts(3, {"a"}, 1.0, 4);
  PtsDocument lift{gen_planted(q, {2, 3, 1}, 4).lift, default_state_names(6)};
  EXPECT_TRUE(parse_pts(print_pts(lift)).pts == lift.pts);
}

TEST(ParsePts, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 1024.0, 1e-17, 0.0})
    EXPECT_EQ(*parse_probability(format_double(v)), v);
}

TEST(ParseClassification, Example) {
  const std::vector<std::string> names{"a", "b", "c"};
  const auto c = parse_classification("c 0\na 1\nb 1\n", names);
  EXPECT_EQ(c.assign(), (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(parse_classification(print_classification(c, names), names), c);
  EXPECT_EQ(kind_of([&] { parse_classification("a 0\nb 0\n", names); }), ParseError::Kind::Validation);
  EXPECT_EQ(kind_of([&] { parse_classification("a 0\nb 0\nz 0\n", names); }), ParseError::Kind::UnknownName);
  EXPECT_EQ(kind_of([&] { parse_classification("a 0\na 0\nb 0\nc 0\n", names); }), ParseError::Kind::Syntax);
  EXPECT_EQ(kind_of([&] { parse_classification("a 0\nb 2\nc 0\n", names); }), ParseError::Kind::Validation);
}

TEST(ParseKripke, Example) {
  const auto doc = parse_kripke("states: x y z\nmarked: z\nx -> y\ny -> z\nz -> z\n");
  EXPECT_EQ(doc.states.size(), 3u);
  EXPECT_TRUE(doc.ks.has_edge(0, 1));
  EXPECT_FALSE(doc.ks.has_edge(1, 0));
  EXPECT_EQ(doc.ks.marked(), std::vector<std::size_t>{2});
  const auto again = parse_kripke(print_kripke(doc));
  EXPECT_EQ(print_kripke(again), print_kripke(doc));
  EXPECT_EQ(kind_of([] { parse_kripke("states: x\nx -> q\n"); }), ParseError::Kind::UnknownName);
  EXPECT_EQ(kind_of([] { parse_kripke("states: x\nx => x\n"); }), ParseError::Kind::Syntax);
  EXPECT_EQ(line_of([] { parse_kripke("states: x\nx -> x\nx -> x\n"); }), 3u);
}

TEST(ParseRelation, Example) {
  const auto r = parse_relation("a u\nb u\n", {"a", "b"}, {"u", "v"});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_TRUE(r.contains(1, 0));
  EXPECT_EQ(kind_of([] { parse_relation("a w\n", {"a"}, {"u"}); }), ParseError::Kind::UnknownName);
}

TEST(ParseGalois, TwoPoint) {
  const auto doc = parse_galois("abstract: bot top\nleq: bot <= top\nalpha: p bot\nalpha: q top\n");
  EXPECT_EQ(doc.concrete, (std::vector<std::string>{"p", "q"}));
  EXPECT_EQ(doc.spec.abs.bottom(), 0u);
  EXPECT_EQ(doc.spec.abs.top(), 1u);
  EXPECT_TRUE(check_galois(doc.spec));
  EXPECT_FALSE(doc.spec.alpha_table);
}

TEST(ParseGalois, ExplicitConcreteOrderAndSetOverride) {
  const auto doc = parse_galois(
      "abstract: bot top\nconcrete: q p\nleq: bot <= top\nalpha: p bot\nalpha: q top\nalpha-set: bot p q\n");
  EXPECT_EQ(doc.concrete, (std::vector<std::string>{"q", "p"}));
  ASSERT_TRUE(doc.spec.alpha_table);
  EXPECT_EQ(doc.spec.alpha(0b11), 0u);
  EXPECT_EQ(doc.spec.alpha(0b01), 1u);
  const auto check = check_galois(doc.spec);
  ASSERT_FALSE(check);
  EXPECT_EQ(check.violation->kind, GaloisViolation::Kind::AlphaNotMonotone);
}

TEST(ParseGalois, Errors) {
  using K = ParseError::Kind;
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x y\nleq: x <= y\nleq: y <= x\nalpha: p x\n"); }), K::NotALattice);
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x y\nalpha: p x\n"); }), K::NotALattice);
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x\nalpha: p y\n"); }), K::UnknownName);
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x\nleq: x < x\n"); }), K::Syntax);
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x\nconcrete: p q\nalpha: p x\n"); }), K::Validation);
  EXPECT_EQ(kind_of([] { parse_galois("abstract: x\nalpha: p x\nalpha: p x\n"); }), K::Syntax);
  EXPECT_EQ(line_of([] { parse_galois("abstract: x y\nalpha: p x\nleq: x <= y\nleq: y <= x\n"); }), 3u);
}

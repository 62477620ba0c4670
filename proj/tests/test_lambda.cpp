#include <gtest/gtest.h>

#include "arrowlab/lambda.hpp"
#include "arrowlab/pca.hpp"
#include "oracles.hpp"

using namespace arrowlab;

namespace {

// Named-environment evaluator, written against the interpretation clauses
// directly; the library compiles to de Bruijn indices instead.
Elem eval_named(const ArrowAlgebra& A, const LambdaTerm& t, const Environment& env) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var:
      return env.at(t.name());
    case LambdaTerm::Kind::constant:
      return A.at(t.name());
    case LambdaTerm::Kind::app:
      return A.apply(eval_named(A, t.fun(), env), eval_named(A, t.arg(), env));
    case LambdaTerm::Kind::abs: {
      Elem m = A.top();
      for (Elem b : A.elements()) {
        Environment inner = env;
        inner[t.name()] = b;
        m = A.meet(m, A.imp(b, A.shift(eval_named(A, t.body(), inner))));
      }
      return m;
    }
  }
  return A.top();
}

// Renames every bound variable to a fresh name, leaving free ones alone.
LambdaTerm rename_bound(const LambdaTerm& t, std::map<std::string, std::string>& scope, int& fresh) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var: {
      auto it = scope.find(t.name());
      return it == scope.end() ? t : LambdaTerm::var(it->second);
    }
    case LambdaTerm::Kind::constant:
      return t;
    case LambdaTerm::Kind::app:
      return LambdaTerm::app(rename_bound(t.fun(), scope, fresh), rename_bound(t.arg(), scope, fresh));
    case LambdaTerm::Kind::abs: {
      std::string v = "v" + std::to_string(fresh++);
      auto saved = scope;
      scope[t.name()] = v;
      auto body = rename_bound(t.body(), scope, fresh);
      scope = saved;
      return LambdaTerm::abs(v, body);
    }
  }
  return t;
}

std::vector<std::pair<std::string, ArrowAlgebra>> test_algebras() {
  auto out = oracle::corpus_frames();
  out.emplace_back("downsets-of-one", downset_arrow_algebra(one_element_pca()));
  out.emplace_back("per-of-one", per_arrow_algebra(one_element_pca()));
  for (const auto& A : oracle::small_algebras(3))
    if (!is_frame_derived(A) && A.size() == 3) {
      out.emplace_back("non-frame-chain3", A);
      break;
    }
  return out;
}

}  // namespace

TEST(Parse, Abstractions) {
  EXPECT_EQ(parse_lambda("\\x. x").to_string(), "\\x. x");
  auto k = parse_lambda("\\x.\\y. x");
  ASSERT_EQ(k.kind(), LambdaTerm::Kind::abs);
  ASSERT_EQ(k.body().kind(), LambdaTerm::Kind::abs);
  EXPECT_EQ(k.body().body().name(), "x");
  EXPECT_EQ(k.to_string(), "\\x. \\y. x");
  EXPECT_EQ(parse_lambda("λx. x").to_string(), "\\x. x");
}

TEST(Parse, ApplicationAndConstants) {
  auto t = parse_lambda("(\\z. z #a) #b");
  ASSERT_EQ(t.kind(), LambdaTerm::Kind::app);
  EXPECT_EQ(t.fun().kind(), LambdaTerm::Kind::abs);
  EXPECT_EQ(t.arg().kind(), LambdaTerm::Kind::constant);
  EXPECT_EQ(t.arg().name(), "b");
  EXPECT_EQ(t.fun().body().arg().name(), "a");
  EXPECT_EQ(t.to_string(), "(\\z. z #a) #b");
  EXPECT_EQ(parse_lambda("x y z").to_string(), "x y z");
  EXPECT_EQ(parse_lambda("x (y z)").to_string(), "x (y z)");
  EXPECT_EQ(parse_lambda("#\"{0,1}\"").name(), "{0,1}");
}

TEST(Parse, RoundTripsGeneratedTerms) {
  auto A = ArrowAlgebra::frame(FiniteLattice::boolean(2));
  TermGenerator gen(A, 3);
  for (int i = 0; i < 200; ++i) {
    auto [t, env] = gen.next(8);
    ASSERT_EQ(parse_lambda(t.to_string()).to_string(), t.to_string());
  }
}

TEST(Parse, SyntaxErrors) {
  EXPECT_THROW(parse_lambda("\\x."), InputError);
  EXPECT_THROW(parse_lambda("(x"), InputError);
  EXPECT_THROW(parse_lambda(""), InputError);
  EXPECT_THROW(parse_lambda("x )"), InputError);
}

TEST(Interpret, IdentityIsTopOnFrames) {
  for (const auto& [name, A] : oracle::corpus_frames()) EXPECT_EQ(interpret(A, parse_lambda("\\x. x")), A.top()) << name;
}

TEST(Interpret, ConstantCombinatorOnThreeChain) {
  auto A = ArrowAlgebra::frame(FiniteLattice::chain(3));
  EXPECT_EQ(interpret(A, parse_lambda("\\x. \\y. x")), A.top());
}

TEST(Interpret, PairingDefinesLogicalMeet) {
  auto t = parse_lambda("\\z. z u v");
  for (const auto& [name, A] : test_algebras())
    for (Elem a : A.elements())
      for (Elem b : A.elements())
        ASSERT_EQ(interpret(A, t, {{"u", A.shift(a)}, {"v", A.shift(b)}}), logical_meet(A, a, b)) << name;
}

TEST(Interpret, ErrorsOnUnboundNames) {
  auto A = ArrowAlgebra::frame(FiniteLattice::chain(2));
  EXPECT_THROW(interpret(A, parse_lambda("x")), InputError);
  EXPECT_THROW(interpret(A, parse_lambda("#nope")), InputError);
}

TEST(Interpret, AgreesWithNamedEvaluator) {
  for (const auto& [name, A] : test_algebras()) {
    TermGenerator gen(A, 17);
    for (int i = 0; i < 150; ++i) {
      auto [t, env] = gen.next(7);
      ASSERT_EQ(interpret(A, t, env), eval_named(A, t, env)) << name << ": " << t.to_string();
    }
  }
}

TEST(Interpret, AlphaEquivalentTermsAgree) {
  for (const auto& [name, A] : test_algebras()) {
    TermGenerator gen(A, 29);
    for (int i = 0; i < 150; ++i) {
      auto [t, env] = gen.next(8);
      std::map<std::string, std::string> scope;
      int fresh = 0;
      auto u = rename_bound(t, scope, fresh);
      ASSERT_EQ(interpret(A, t, env), interpret(A, u, env)) << name << ": " << t.to_string();
    }
  }
  auto A = ArrowAlgebra::frame(FiniteLattice::diamond());
  EXPECT_EQ(interpret(A, parse_lambda("\\x. \\y. x y")), interpret(A, parse_lambda("\\y. \\x. y x")));
}

TEST(SeparatorClosure, BasicCombinators) {
  for (const auto& [name, A] : test_algebras()) {
    EXPECT_TRUE(check_separator_closure(A, parse_lambda("\\x. x")).passed()) << name;
    EXPECT_TRUE(check_separator_closure(A, parse_lambda("\\x. \\y. x")).passed()) << name;
    for (Elem s : A.separator_elements())
      EXPECT_TRUE(check_separator_closure(A, parse_lambda("\\x. x"), {{"u", s}}).passed()) << name;
  }
}

TEST(SeparatorClosure, RandomTermsStaySeparated) {
  for (const auto& [name, A] : test_algebras()) {
    TermGenerator gen(A, 41);
    for (int i = 0; i < 200; ++i) {
      auto [t, env] = gen.next(8);
      ASSERT_LE(t.size(), 8u);
      for (const auto& [x, v] : env) ASSERT_TRUE(A.in_sep(v));
      ASSERT_TRUE(check_separator_closure(A, t, env).passed()) << name << ": " << t.to_string();
    }
  }
}

TEST(SeparatorClosure, RejectsUnseparatedEnvironment) {
  auto A = ArrowAlgebra::frame(FiniteLattice::chain(2));
  EXPECT_THROW(check_separator_closure(A, parse_lambda("x"), {{"x", A.bottom()}}), InputError);
}

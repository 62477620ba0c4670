#include <gtest/gtest.h>

#include "arrowlab/modified.hpp"
#include "arrowlab/nucleus.hpp"
#include "arrowlab/pca.hpp"
#include "arrowlab/tripos.hpp"
#include "oracles.hpp"

using namespace arrowlab;

namespace {

const std::vector<ArrowAlgebra>& small() {
  static const auto all = oracle::small_algebras(3);
  return all;
}

FinMap compose_maps(const FinMap& g, const FinMap& f) {
  std::vector<std::size_t> m;
  for (std::size_t x = 0; x < f.dom; ++x) m.push_back(g(f(x)));
  return FinMap(g.cod, m);
}

// Every predicate over I when the space is small.
std::vector<Predicate> all_predicates(const ArrowAlgebra& A, std::size_t I) {
  std::vector<Predicate> out;
  std::vector<std::size_t> idx(I, 0);
  while (true) {
    Predicate p;
    for (auto i : idx) p.push_back(Elem{i});
    out.push_back(p);
    std::size_t k = I;
    while (k > 0 && ++idx[k - 1] == A.size()) idx[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

}  // namespace

TEST(PowerAlgebra, EmptyAndSingletonIndex) {
  for (const auto& A : small()) {
    auto P0 = power_algebra(A, 0);
    EXPECT_EQ(P0.size(), 1u);
    EXPECT_TRUE(is_trivial(P0));
    auto P1 = power_algebra(A, 1);
    ASSERT_EQ(P1.size(), A.size());
    EXPECT_EQ(P1.imp_table(), A.imp_table());
    EXPECT_EQ(P1.separator(), A.separator());
  }
}

TEST(PowerAlgebra, VerifiesAndIsAHeytingPrealgebra) {
  for (const auto& A : small()) {
    if (A.size() > 2) continue;
    for (std::size_t I = 0; I <= 3; ++I) {
      auto P = power_algebra(A, I);
      ASSERT_TRUE(verify_algebra(P).passed());
      ASSERT_TRUE(check_heyting_prealgebra(P).passed());
    }
  }
}

TEST(Entailment, PointwiseOrderOnFrames) {
  for (const auto& [name, A] : oracle::corpus_frames()) {
    if (A.size() > 5) continue;
    for (const auto& p : all_predicates(A, 2))
      for (const auto& q : all_predicates(A, 2))
        ASSERT_EQ(entails(A, p, q), A.leq(p[0], q[0]) && A.leq(p[1], q[1])) << name;
  }
}

TEST(Entailment, StrongerThanPointwise) {
  for (const auto& A : small())
    for (const auto& p : all_predicates(A, 2))
      for (const auto& q : all_predicates(A, 2))
        if (entails(A, p, q)) { ASSERT_TRUE(logical_leq(A, p[0], q[0]) && logical_leq(A, p[1], q[1])); }
}

TEST(Quantifiers, ExistsMatchesFormula) {
  for (const auto& A : small())
    for (std::size_t X = 0; X <= 3; ++X)
      for (std::size_t Y = 1; Y <= 2; ++Y)
        for (const auto& f : all_maps(X, Y))
          for (const auto& a : all_predicates(A, X)) ASSERT_EQ(exists_along(A, f, a), oracle::exists(A, f.map, Y, a));
}

TEST(Quantifiers, FramesUseFiberwiseJoinsAndMeets) {
  for (const auto& [name, A] : oracle::corpus_frames()) {
    if (A.size() > 4) continue;
    for (const auto& f : all_maps(3, 2))
      for (const auto& a : all_predicates(A, 3)) {
        auto ex = exists_along(A, f, a), all = forall_along(A, f, a);
        for (std::size_t y = 0; y < 2; ++y) {
          Elem join = A.bottom(), meet = A.top();
          for (std::size_t x = 0; x < 3; ++x)
            if (f(x) == y) {
              join = A.join(join, a[x]);
              meet = A.meet(meet, a[x]);
            }
          ASSERT_EQ(ex[y], join) << name;
          ASSERT_EQ(all[y], meet) << name;
        }
      }
  }
}

TEST(Quantifiers, IdentityAndEmptyFibers) {
  for (const auto& A : small()) {
    for (const auto& a : all_predicates(A, 2)) {
      auto id = FinMap::identity(2);
      EXPECT_TRUE(equivalent(A, exists_along(A, id, a), a));
      EXPECT_TRUE(equivalent(A, forall_along(A, id, a), a));
    }
    FinMap empty(1, {});
    Elem bottom_cycle = A.top();
    for (Elem x : A.elements()) bottom_cycle = A.meet(bottom_cycle, A.shift(A.shift(x)));
    EXPECT_EQ(exists_along(A, empty, {})[0], bottom_cycle);
    EXPECT_EQ(forall_along(A, empty, {})[0], A.top());
  }
}

TEST(Quantifiers, JoinFormAgreesWhenJoinCompatible) {
  for (const auto& A : small()) {
    if (!A.compatible_with_joins()) continue;
    for (const auto& f : all_maps(3, 2))
      for (const auto& a : all_predicates(A, 3)) ASSERT_TRUE(equivalent(A, exists_along(A, f, a), exists_join(A, f, a)));
  }
}

TEST(Quantifiers, PseudoFunctorial) {
  for (const auto& A : small()) {
    if (A.size() < 3) continue;
    for (const auto& f : all_maps(2, 2))
      for (const auto& g : all_maps(2, 3)) {
        auto gf = compose_maps(g, f);
        for (const auto& b : all_predicates(A, 3)) ASSERT_EQ(reindex(gf, b), reindex(f, reindex(g, b)));
        for (const auto& a : all_predicates(A, 2)) {
          ASSERT_TRUE(equivalent(A, exists_along(A, gf, a), exists_along(A, g, exists_along(A, f, a))));
          ASSERT_TRUE(equivalent(A, forall_along(A, gf, a), forall_along(A, g, forall_along(A, f, a))));
        }
      }
  }
}

TEST(Adjointness, ThreeChainAllSmallMaps) {
  auto A = ArrowAlgebra::frame(FiniteLattice::chain(3));
  for (std::size_t X = 0; X <= 3; ++X)
    for (std::size_t Y = 0; Y <= 3; ++Y)
      for (const auto& f : all_maps(X, Y)) ASSERT_TRUE(check_adjointness(A, f).passed());
}

TEST(Adjointness, EverySmallAlgebra) {
  for (const auto& A : small())
    for (std::size_t X = 0; X <= 2; ++X)
      for (std::size_t Y = 0; Y <= 2; ++Y)
        for (const auto& f : all_maps(X, Y)) ASSERT_TRUE(check_adjointness(A, f, 3).passed());
}

TEST(BeckChevalley, IdentitySquareAndDownsetsOfOne) {
  auto A = ArrowAlgebra::frame(FiniteLattice::chain(3));
  auto id = FinMap::identity(2);
  EXPECT_TRUE(check_beck_chevalley(A, PullbackSquare::of(id, id)).passed());
  auto D = downset_arrow_algebra(one_element_pca());
  for (std::size_t W = 0; W <= 2; ++W)
    for (std::size_t X = 0; X <= 2; ++X)
      for (std::size_t Y = 0; Y <= 2; ++Y)
        for (const auto& k : all_maps(W, Y))
          for (const auto& h : all_maps(X, Y)) ASSERT_TRUE(check_beck_chevalley(D, PullbackSquare::of(k, h)).passed());
}

TEST(BeckChevalley, PullbackIsExactFiberProduct) {
  FinMap k(2, {0, 1, 1}), h(2, {1, 0});
  auto sq = PullbackSquare::of(k, h);
  ASSERT_EQ(sq.p1.dom, 3u);
  for (std::size_t z = 0; z < sq.p1.dom; ++z) EXPECT_EQ(k(sq.p1(z)), h(sq.p2(z)));
}

TEST(BeckChevalley, SmallAlgebras) {
  for (const auto& A : small())
    for (const auto& k : all_maps(2, 2))
      for (const auto& h : all_maps(2, 2)) ASSERT_TRUE(check_beck_chevalley(A, PullbackSquare::of(k, h), 1).passed());
}

TEST(Induced, IdentityNucleusAndRoundTrip) {
  for (const auto& A : small()) {
    auto id = MorphismTable::identity(A);
    auto T = induced_transformation(id);
    for (const auto& p : all_predicates(A, 2)) EXPECT_EQ(T(p), p);
    for (Elem c : A.elements()) {
      auto j = nucleus_double(A, c);
      auto J = induced_transformation(j);
      for (const auto& p : all_predicates(A, 2)) {
        ASSERT_TRUE(entails(A, p, J(p)));
        ASSERT_TRUE(equivalent(A, J(J(p)), J(p)));
      }
      ASSERT_TRUE(check_induced_transformation(j, 2).passed());
      ASSERT_EQ(recover_morphism(A, A, J).table(), j.table());
    }
  }
}

TEST(Induced, ImplicativeMorphismsAreCartesian) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> pick(0, small().size() - 1);
  for (int round = 0; round < 200; ++round) {
    const auto &A = small()[pick(rng)], &B = small()[pick(rng)];
    auto f = oracle::random_table(rng, A, B);
    if (is_implicative(f)) { ASSERT_TRUE(check_induced_transformation(f, 2, round).passed()); }
  }
}

TEST(GenericElement, EverySmallAlgebra) {
  for (const auto& A : small()) EXPECT_TRUE(generic_element_check(A, 3, 5).passed());
  for (const auto& [name, A] : oracle::corpus_frames()) EXPECT_TRUE(generic_element_check(A, 3, 5).passed()) << name;
}

TEST(Subtripos, IdentityAndShift) {
  for (const auto& A : small()) {
    auto all = predicate_family(A, 2);
    EXPECT_EQ(subtripos_qj(MorphismTable::identity(A), 2), all);
    EXPECT_EQ(subtripos_qj(nucleus_shift(A), 2), all);
    EXPECT_TRUE(check_subtripos(nucleus_shift(A), 2).passed());
  }
}

TEST(Subtripos, ClosedNucleusMatchesSecondComponentDescription) {
  auto S = sierpinski(two_frame());
  auto c = open_closed_nuclei(S).closed;
  auto q = subtripos_qj(c, 1);
  std::vector<Predicate> expect;
  for (Elem x : S.algebra.elements())
    if (S.base.in_sep(S.second(x))) expect.push_back({x});
  EXPECT_EQ(q, expect);
  std::vector<std::string> names;
  for (const auto& p : q) names.push_back(S.algebra.name(p[0]));
  EXPECT_EQ(names, (std::vector<std::string>{"(bot,top)", "(top,top)"}));
}

TEST(Subtripos, QuotientOrderIsEntailmentIntoJ) {
  for (const auto& A : small())
    for (Elem c : A.elements()) {
      auto j = nucleus_double(A, c);
      auto Q = quotient(j);
      for (const auto& p : all_predicates(A, 2))
        for (const auto& q : all_predicates(A, 2))
          ASSERT_EQ(entails(Q, p, q), entails(A, p, pointwise(q, [&](Elem x) { return j(x); })));
      ASSERT_TRUE(check_subtripos(j, 2).passed());
    }
}

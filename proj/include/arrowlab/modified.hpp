#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"
#include "arrowlab/morphism.hpp"
#include "arrowlab/nucleus.hpp"
#include "arrowlab/tripos.hpp"

namespace arrowlab {

/// A^-> on pairs x0 <= x1 with pointwise order, implication
/// (x0 -> y0 meet x1 -> y1, x1 -> y1) and separator {x | x0 separated}.
/// Elements are listed in lexicographic order of (x0, x1) and named
/// "(x0,x1)".
struct Sierpinski {
  ArrowAlgebra base;
  ArrowAlgebra algebra;
  std::vector<std::pair<Elem, Elem>> pairs;
  std::map<std::pair<Elem, Elem>, Elem> index;

  Elem of(Elem x0, Elem x1) const {
    auto it = index.find({x0, x1});
    if (it == index.end()) throw InputError("(" + base.name(x0) + "," + base.name(x1) + ") is not an ordered pair");
    return it->second;
  }
  Elem first(Elem x) const { return pairs[x.index].first; }
  Elem second(Elem x) const { return pairs[x.index].second; }
  /// (bottom, top), the element defining the open and closed nuclei.
  Elem open_point() const { return of(base.bottom(), base.top()); }
};

inline Sierpinski sierpinski(const ArrowAlgebra& A) {
  if (auto w = binary_implicative_violation(A))
    throw InputError("Sierpinski construction needs a binary implicative base; fails at (" + (*w)[0] + ", " + (*w)[1] +
                     ", " + (*w)[2] + ")");
  std::vector<std::pair<Elem, Elem>> pairs;
  std::map<std::pair<Elem, Elem>, Elem> index;
  std::vector<std::string> names;
  for (Elem x0 : A.elements())
    for (Elem x1 : A.elements())
      if (A.leq(x0, x1)) {
        index.emplace(std::make_pair(x0, x1), Elem{pairs.size()});
        pairs.emplace_back(x0, x1);
        names.push_back("(" + A.name(x0) + "," + A.name(x1) + ")");
      }
  const std::size_t n = pairs.size();
  std::vector<std::uint8_t> leq(n * n);
  std::vector<Elem> imp(n * n);
  std::vector<std::uint8_t> sep(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto [x0, x1] = pairs[x];
    sep[x] = A.in_sep(x0);
    for (std::size_t y = 0; y < n; ++y) {
      auto [y0, y1] = pairs[y];
      leq[x * n + y] = A.leq(x0, y0) && A.leq(x1, y1);
      Elem second = A.imp(x1, y1);
      imp[x * n + y] = index.at({A.meet(A.imp(x0, y0), second), second});
    }
  }
  ArrowAlgebra S(FiniteLattice(std::move(names), std::move(leq)), std::move(imp), std::move(sep));
  require_algebra(S, "Sierpinski construction");
  if (!S.binary_implicative()) throw LawViolation("Sierpinski construction is not binary implicative");
  return {A, std::move(S), std::move(pairs), std::move(index)};
}

inline VerificationReport check_sierpinski(const Sierpinski& S, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  auto vr = verify_algebra(S.algebra);
  if (vr.passed())
    r.add(Verdict::pass("sierpinski.algebra"));
  else
    r.add(Verdict::fail("sierpinski.algebra", vr.first_failure()->witness, vr.first_failure()->detail));
  if (auto w = binary_implicative_violation(S.algebra))
    r.add(Verdict::fail("sierpinski.binary-implicative", *w, "a -> (b meet c) differs from (a -> b) meet (a -> c)"));
  else
    r.add(Verdict::pass("sierpinski.binary-implicative"));
  const auto& A = S.base;
  const auto& X = S.algebra;
  for (Elem x : X.elements())
    for (Elem y : X.elements()) {
      if (S.second(logical_join(X, x, y)) != logical_join(A, S.second(x), S.second(y))) {
        r.add(Verdict::fail("sierpinski.join-second-component", X.names({x, y}),
                            "second component of the join is not the join of second components"));
        return r;
      }
      if (logical_leq(X, x, y) && !logical_leq(A, S.second(x), S.second(y))) {
        r.add(Verdict::fail("sierpinski.join-second-component", X.names({x, y}),
                            "entailment does not pass to second components"));
        return r;
      }
    }
  r.add(Verdict::pass("sierpinski.join-second-component"));
  return r;
}

/// f^-> : A^-> -> B^->, componentwise application of the monotonized f.
/// Throws InputError unless f is implicative, LawViolation when the lift is
/// not.
inline MorphismTable lift_morphism(const MorphismTable& f, const Sierpinski& SA, const Sierpinski& SB) {
  if (!SA.base.same_as(f.source()) || !SB.base.same_as(f.target()))
    throw InputError("Sierpinski algebras do not match the morphism");
  if (!is_implicative(f)) throw InputError("lift needs an implicative morphism");
  MorphismTable mf = monotonize(f);
  std::vector<Elem> t;
  for (Elem x : SA.algebra.elements()) t.push_back(SB.of(mf(SA.first(x)), mf(SA.second(x))));
  MorphismTable out(SA.algebra, SB.algebra, std::move(t));
  if (!is_implicative(out)) throw LawViolation("lifted morphism is not implicative");
  return out;
}

/// pi1 : A^-> -> A and the diagonal delta : A -> A^->, verified as an
/// adjoint pair.
inline AdjointPair pi1_delta(const Sierpinski& S) {
  std::vector<Elem> p, d;
  for (Elem x : S.algebra.elements()) p.push_back(S.second(x));
  for (Elem a : S.base.elements()) d.push_back(S.of(a, a));
  MorphismTable pi1(S.algebra, S.base, std::move(p)), delta(S.base, S.algebra, std::move(d));
  if (!is_implicative(pi1) || !is_implicative(delta)) throw LawViolation("projection or diagonal is not implicative");
  auto pair = verify_adjoint(pi1, delta);
  if (!pair) throw LawViolation("diagonal is not right adjoint to the projection");
  return *pair;
}

/// x0 as a map A^-> -> A. Reports whether it is implicative and, if a right
/// adjoint exists, how the pair classifies. Claims nothing in general.
struct FirstProjectionOutcome {
  bool implicative = false;
  std::optional<Classification> classification;
};

inline FirstProjectionOutcome pi0_outcome(const Sierpinski& S) {
  std::vector<Elem> p;
  for (Elem x : S.algebra.elements()) p.push_back(S.first(x));
  MorphismTable pi0(S.algebra, S.base, std::move(p));
  FirstProjectionOutcome out;
  out.implicative = is_implicative(pi0);
  if (out.implicative) {
    auto found = find_right_adjoint(pi0);
    if (found.pair) out.classification = classify(*found.pair);
  }
  return out;
}

struct OpenClosed {
  MorphismTable open, closed;
};

/// o(x) = (bot, top) -> x and c(x) = x + (bot, top) on A^->.
inline OpenClosed open_closed_nuclei(const Sierpinski& S) {
  const auto& X = S.algebra;
  Elem u = S.open_point();
  return {endo(X, [&](Elem x) { return X.imp(u, x); }), endo(X, [&](Elem x) { return logical_join(X, x, u); })};
}

/// Both nuclei laws, and o isomorphic to delta after pi1 on modifiable bases.
inline VerificationReport check_open_closed(const Sierpinski& S, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  auto oc = open_closed_nuclei(S);
  auto add_nucleus = [&](const MorphismTable& j, const char* law) {
    auto rep = check_nucleus(j);
    if (rep.passed())
      r.add(Verdict::pass(law));
    else
      r.add(Verdict::fail(law, rep.first_failure()->witness, rep.first_failure()->law + ": " + rep.first_failure()->detail));
  };
  add_nucleus(oc.open, "sierpinski.open-nucleus");
  add_nucleus(oc.closed, "sierpinski.closed-nucleus");
  auto pd = pi1_delta(S);
  if (classify(pd).surjection)
    r.add(Verdict::pass("sierpinski.projection-surjection", {S.algebra.name(pd.unit), S.base.name(pd.counit)}));
  else
    r.add(Verdict::fail("sierpinski.projection-surjection", {}, "pi1 delta is not isomorphic to the identity"));
  if (!S.base.modifiable()) {
    r.add(Verdict::inconclusive("sierpinski.open-is-projection", "base is not modifiable; comparison skipped"));
  } else if (morphism_equiv(oc.open, compose(pd.h, pd.f))) {
    r.add(Verdict::pass("sierpinski.open-is-projection"));
  } else {
    r.add(Verdict::fail("sierpinski.open-is-projection", {}, "o is not isomorphic to delta after pi1"));
  }
  return r;
}

/// A^m = (A^->)_c with the closed nucleus, over the Sierpinski carrier.
struct Modified {
  Sierpinski sierpinski;
  MorphismTable closed;
  ArrowAlgebra algebra;
};

inline Modified modification(const ArrowAlgebra& A) {
  if (!A.modifiable()) throw InputError("modification needs a modifiable algebra");
  Sierpinski S = arrowlab::sierpinski(A);
  auto oc = open_closed_nuclei(S);
  ArrowAlgebra m = quotient(oc.closed);
  return {std::move(S), std::move(oc.closed), std::move(m)};
}

/// The family {alpha : I -> A^-> | top |-_I alpha_1} within the predicate
/// family of A^->.
inline std::vector<Predicate> modified_predicates(const Modified& M, std::size_t I, std::uint64_t seed = 0) {
  const auto& S = M.sierpinski;
  std::vector<Predicate> out;
  for (const auto& alpha : predicate_family(S.algebra, I, seed)) {
    Predicate second;
    for (Elem x : alpha) second.push_back(S.second(x));
    if (entails(S.base, Predicate(I, S.base.top()), second)) out.push_back(alpha);
  }
  return out;
}

/// The three descriptions of the modified predicates agree: c alpha |- alpha,
/// meet of (bot, top) -> alpha(i) separated, and top |- alpha_1.
inline VerificationReport check_modified_predicates(const Modified& M, std::size_t I, std::uint64_t seed = 0,
                                                    std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto& S = M.sierpinski;
  const auto& X = S.algebra;
  auto second_form = modified_predicates(M, I, seed);
  std::size_t k = 0;
  for (const auto& alpha : predicate_family(X, I, seed)) {
    bool closed = entails(X, pointwise(alpha, [&](Elem x) { return M.closed(x); }), alpha);
    Elem m = X.top();
    for (Elem x : alpha) m = X.meet(m, X.imp(S.open_point(), x));
    bool open_form = X.in_sep(m);
    bool in_second = k < second_form.size() && second_form[k] == alpha;
    if (in_second) ++k;
    if (closed != open_form || closed != in_second) {
      r.add(Verdict::fail("modified.predicates", {detail::show(X, alpha)}, "descriptions of the modified predicates disagree"));
      return r;
    }
  }
  r.add(Verdict::pass("modified.predicates", {}, std::to_string(second_form.size()) + " predicates"));
  return r;
}

/// f^m = f^-> after c, as a morphism A^m -> B^m. Throws LawViolation when
/// it is not implicative.
inline MorphismTable lift_modified(const MorphismTable& f, const Modified& MA, const Modified& MB) {
  MorphismTable fl = lift_morphism(f, MA.sierpinski, MB.sierpinski);
  std::vector<Elem> t;
  for (Elem x : MA.algebra.elements()) t.push_back(fl(MA.closed(x)));
  MorphismTable out(MA.algebra, MB.algebra, std::move(t));
  if (!is_implicative(out)) throw LawViolation("modified lift is not implicative");
  return out;
}

/// c f^-> c |- f^-> c in B^->.
inline VerificationReport check_closure_absorption(const MorphismTable& f, const Modified& MA, const Modified& MB,
                                                   std::string subject = {}) {
  VerificationReport r(std::move(subject));
  MorphismTable fl = lift_morphism(f, MA.sierpinski, MB.sierpinski);
  MorphismTable fc = compose(fl, MA.closed);
  MorphismTable cfc = compose(MB.closed, fc);
  if (morphism_leq(cfc, fc))
    r.add(Verdict::pass("modified.closure-absorption", {MB.sierpinski.algebra.name(entailment_realizer(cfc, fc))}));
  else
    r.add(Verdict::fail("modified.closure-absorption", {}, "c f c does not entail f c"));
  return r;
}

/// f^->(bot, top) -||- (bot, top) in B^->.
inline VerificationReport pullback_condition(const MorphismTable& f, const Sierpinski& SA, const Sierpinski& SB,
                                             std::string subject = {}) {
  VerificationReport r(std::move(subject));
  MorphismTable fl = lift_morphism(f, SA, SB);
  Elem img = fl(SA.open_point());
  if (logical_equiv(SB.algebra, img, SB.open_point()))
    r.add(Verdict::pass("modified.pullback-condition"));
  else
    r.add(Verdict::fail("modified.pullback-condition", {SB.algebra.name(img)}, "lift of (bot, top) is not isomorphic to (bot, top)"));
  return r;
}

/// f^-> delta -||- delta f and pi1 f^-> -||- f pi1.
inline VerificationReport check_delta_square(const MorphismTable& f, const Sierpinski& SA, const Sierpinski& SB,
                                             std::string subject = {}) {
  VerificationReport r(std::move(subject));
  MorphismTable fl = lift_morphism(f, SA, SB);
  auto pa = pi1_delta(SA), pb = pi1_delta(SB);
  bool diag = morphism_equiv(compose(fl, pa.h), compose(pb.h, f));
  bool proj = morphism_equiv(compose(pb.f, fl), compose(f, pa.f));
  if (diag && proj)
    r.add(Verdict::pass("sierpinski.delta-square"));
  else
    r.add(Verdict::fail("sierpinski.delta-square", {}, diag ? "projection square fails" : "diagonal square fails"));
  return r;
}

/// Lift laws for f, with the adjoint laws when a right adjoint h is given.
inline VerificationReport check_lifts(const MorphismTable& f, const std::optional<MorphismTable>& h, const Modified& MA,
                                      const Modified& MB, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &SA = MA.sierpinski, &SB = MB.sierpinski;
  MorphismTable fl = lift_morphism(f, SA, SB);
  r.add(Verdict::pass("sierpinski.lift", {SB.algebra.name(canonical_realizer(fl))}));
  MorphismTable fm = lift_modified(f, MA, MB);
  r.add(Verdict::pass("modified.lift", {SB.algebra.name(canonical_realizer(fm))}));
  MorphismTable idm = lift_modified(MorphismTable::identity(f.source()), MA, MA);
  if (morphism_equiv(idm, MorphismTable(MA.algebra, MA.algebra, MA.closed.table())))
    r.add(Verdict::pass("modified.pseudofunctor"));
  else
    r.add(Verdict::fail("modified.pseudofunctor", {}, "modified lift of the identity is not isomorphic to c"));
  r.merge(check_closure_absorption(f, MA, MB));
  r.merge(pullback_condition(f, SA, SB));
  r.merge(check_delta_square(f, SA, SB));
  if (h) {
    MorphismTable hl = lift_morphism(*h, SB, SA);
    if (verify_adjoint(fl, hl))
      r.add(Verdict::pass("sierpinski.lift-adjoint"));
    else
      r.add(Verdict::fail("sierpinski.lift-adjoint", {}, "lifted right adjoint is not a right adjoint"));
    MorphismTable hm = lift_modified(*h, MB, MA);
    if (verify_adjoint(fm, hm))
      r.add(Verdict::pass("modified.adjoint"));
    else
      r.add(Verdict::fail("modified.adjoint", {}, "modified right adjoint is not a right adjoint"));
    MorphismTable ch = compose(MA.closed, hm.retarget(SB.algebra, SA.algebra));
    MorphismTable hc = compose(hl, MB.closed);
    if (morphism_equiv(ch, hc))
      r.add(Verdict::pass("modified.square"));
    else
      r.add(Verdict::fail("modified.square", {}, "c h^m is not isomorphic to h^-> c"));
  }
  return r;
}

/// (g f)^m -||- g^m f^m.
inline VerificationReport check_modified_composition(const MorphismTable& f, const MorphismTable& g, const Modified& MA,
                                                     const Modified& MB, const Modified& MC, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  MorphismTable lhs = lift_modified(compose(g, f), MA, MC);
  MorphismTable rhs = compose(lift_modified(g, MB, MC), lift_modified(f, MA, MB));
  MorphismTable ll = lift_morphism(compose(g, f), MA.sierpinski, MC.sierpinski);
  MorphismTable rl = compose(lift_morphism(g, MB.sierpinski, MC.sierpinski), lift_morphism(f, MA.sierpinski, MB.sierpinski));
  if (!morphism_equiv(ll, rl))
    r.add(Verdict::fail("modified.pseudofunctor", {}, "lift does not preserve composition"));
  else if (!morphism_equiv(lhs, rhs))
    r.add(Verdict::fail("modified.pseudofunctor", {}, "modified lift does not preserve composition"));
  else
    r.add(Verdict::pass("modified.pseudofunctor"));
  return r;
}

}  // namespace arrowlab

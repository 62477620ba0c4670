#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"
#include "arrowlab/morphism.hpp"

namespace arrowlab {

/// Total endofunction of a carrier, as a morphism from the algebra to itself.
template <class F>
  requires std::invocable<F, Elem>
inline MorphismTable endo(const ArrowAlgebra& A, F&& f) {
  return MorphismTable::from_function(A, A, std::forward<F>(f));
}

/// The three standard nucleus families, indexed by a parameter c, and the shift.
inline MorphismTable nucleus_guarded(const ArrowAlgebra& A, Elem c) {
  return endo(A, [&](Elem a) { return A.imp(c, a); });
}
inline MorphismTable nucleus_double(const ArrowAlgebra& A, Elem c) {
  return endo(A, [&](Elem a) { return A.imp(A.imp(a, c), c); });
}
inline MorphismTable nucleus_peirce(const ArrowAlgebra& A, Elem c) {
  return endo(A, [&](Elem a) { return A.imp(A.imp(a, c), a); });
}
inline MorphismTable nucleus_shift(const ArrowAlgebra& A) {
  return endo(A, [&](Elem a) { return A.shift(a); });
}

namespace detail {

inline void require_endo(const MorphismTable& j) {
  if (!j.source().same_as(j.target())) throw InputError("nucleus must be an endofunction of one algebra");
}

/// Adds a verdict for "meet of term(x) over the range is separated".
template <class Range, class Term, class Describe>
inline bool separated_meet(VerificationReport& r, const ArrowAlgebra& A, const char* law, const Range& xs,
                           Term&& term, Describe&& describe) {
  Elem m = A.top();
  std::optional<std::vector<std::string>> bad;
  for (const auto& x : xs) {
    Elem t = term(x);
    m = A.meet(m, t);
    if (!bad && !A.in_sep(t)) bad = describe(x);
  }
  if (A.in_sep(m)) {
    r.add(Verdict::pass(law, {A.name(m)}));
    return true;
  }
  r.add(Verdict::fail(law, bad.value_or(std::vector<std::string>{A.name(m)}),
                      "meet " + A.name(m) + " is not separated"));
  return false;
}

inline std::vector<Elem> all_elems(const ArrowAlgebra& A) {
  std::vector<Elem> v;
  for (Elem a : A.elements()) v.push_back(a);
  return v;
}
inline std::vector<std::pair<Elem, Elem>> all_pairs(const ArrowAlgebra& A) {
  std::vector<std::pair<Elem, Elem>> v;
  for (Elem a : A.elements())
    for (Elem b : A.elements()) v.emplace_back(a, b);
  return v;
}

inline bool check_monotone(VerificationReport& r, const MorphismTable& j, const char* law) {
  const auto& A = j.source();
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (A.leq(a, b) && !A.leq(j(a), j(b))) {
        r.add(Verdict::fail(law, A.names({a, b}), A.name(a) + " <= " + A.name(b) + " but j(" + A.name(a) + ") = " +
                                                      A.name(j(a)) + " is not below j(" + A.name(b) + ") = " +
                                                      A.name(j(b))));
        return false;
      }
  r.add(Verdict::pass(law));
  return true;
}

}  // namespace detail

/// Nucleus axioms: monotone, meet of a -> ja separated, meet of
/// (a -> jb) -> ja -> jb separated. On pass the derived laws are asserted too.
inline VerificationReport check_nucleus(const MorphismTable& j, std::string subject = {}) {
  detail::require_endo(j);
  const auto& A = j.source();
  VerificationReport r(std::move(subject));
  auto one = [&](Elem a) { return std::vector<std::string>{A.name(a)}; };
  auto two = [&](const std::pair<Elem, Elem>& p) { return A.names({p.first, p.second}); };
  const auto elems = detail::all_elems(A);
  const auto pairs = detail::all_pairs(A);
  bool ok = detail::check_monotone(r, j, "nucleus.monotone");
  ok = detail::separated_meet(r, A, "nucleus.inflationary", elems, [&](Elem a) { return A.imp(a, j(a)); },
                              one) &&
       ok;
  ok = detail::separated_meet(
           r, A, "nucleus.absorption", pairs,
           [&](const std::pair<Elem, Elem>& p) {
             auto [a, b] = p;
             return A.imp(A.imp(a, j(b)), A.imp(j(a), j(b)));
           },
           two) &&
       ok;
  if (!ok) return r;
  detail::separated_meet(r, A, "nucleus.idempotent", elems, [&](Elem a) { return A.imp(j(j(a)), j(a)); },
                         one);
  detail::separated_meet(
      r, A, "nucleus.implication-lift", pairs,
      [&](const std::pair<Elem, Elem>& p) { return A.imp(A.imp(p.first, p.second), A.imp(j(p.first), j(p.second))); },
      two);
  detail::separated_meet(
      r, A, "nucleus.application", pairs,
      [&](const std::pair<Elem, Elem>& p) {
        return A.imp(j(A.imp(p.first, p.second)), A.imp(j(p.first), j(p.second)));
      },
      two);
  return r;
}

/// Alternative axioms: monotone, inflationary, idempotent and application
/// (in place of absorption). Equivalent to `check_nucleus`.
inline VerificationReport check_nucleus_alternative(const MorphismTable& j, std::string subject = {}) {
  detail::require_endo(j);
  const auto& A = j.source();
  VerificationReport r(std::move(subject));
  auto one = [&](Elem a) { return std::vector<std::string>{A.name(a)}; };
  auto two = [&](const std::pair<Elem, Elem>& p) { return A.names({p.first, p.second}); };
  detail::check_monotone(r, j, "nucleus.monotone");
  detail::separated_meet(r, A, "nucleus.inflationary", detail::all_elems(A),
                         [&](Elem a) { return A.imp(a, j(a)); },
                         one);
  detail::separated_meet(r, A, "nucleus.idempotent", detail::all_elems(A),
                         [&](Elem a) { return A.imp(j(j(a)), j(a)); },
                         one);
  detail::separated_meet(
      r, A, "nucleus.application", detail::all_pairs(A),
      [&](const std::pair<Elem, Elem>& p) {
        return A.imp(j(A.imp(p.first, p.second)), A.imp(j(p.first), j(p.second)));
      },
      two);
  return r;
}

inline bool is_nucleus(const MorphismTable& j) { return check_nucleus(j).passed(); }

/// Quotient algebra: same carrier and order, a ->_j b = a -> jb, separator
/// {a | ja separated}. Throws InputError when j is not a nucleus and
/// LawViolation when the result fails verification.
inline ArrowAlgebra quotient(const MorphismTable& j) {
  detail::require_endo(j);
  auto rep = check_nucleus(j);
  if (!rep.passed()) throw InputError("quotient needs a nucleus: " + rep.first_failure()->law);
  const auto& A = j.source();
  std::vector<Elem> imp;
  std::vector<std::uint8_t> sep;
  for (Elem a : A.elements()) {
    sep.push_back(A.in_sep(j(a)));
    for (Elem b : A.elements()) imp.push_back(A.imp(a, j(b)));
  }
  ArrowAlgebra Q(A.lattice(), std::move(imp), std::move(sep));
  require_algebra(Q, "quotient");
  return Q;
}

/// Properties of the quotient: algebra, S contained in S_j, join
/// compatibility preserved, and a |-_j b iff a |- jb.
inline VerificationReport check_quotient(const MorphismTable& j, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto& A = j.source();
  ArrowAlgebra Q = quotient(j);
  auto vr = verify_algebra(Q);
  if (vr.passed())
    r.add(Verdict::pass("quotient.algebra"));
  else
    r.add(Verdict::fail("quotient.algebra", vr.first_failure()->witness, vr.first_failure()->detail));
  std::optional<Elem> outside;
  for (Elem a : A.elements())
    if (A.in_sep(a) && !Q.in_sep(a) && !outside) outside = a;
  if (outside)
    r.add(Verdict::fail("quotient.contains-separator", {A.name(*outside)}, "separated element is not j-separated"));
  else
    r.add(Verdict::pass("quotient.contains-separator"));
  if (A.compatible_with_joins()) {
    if (Q.compatible_with_joins())
      r.add(Verdict::pass("quotient.joins"));
    else
      r.add(Verdict::fail("quotient.joins", {}, "quotient of a join-compatible algebra is not join compatible"));
  }
  std::optional<std::pair<Elem, Elem>> bad;
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (!bad && logical_leq(Q, a, b) != logical_leq(A, a, j(b))) bad = {a, b};
  if (bad)
    r.add(Verdict::fail("quotient.logical-order", A.names({bad->first, bad->second}),
                        "quotient order disagrees with a |- jb"));
  else
    r.add(Verdict::pass("quotient.logical-order"));
  return r;
}

/// (id : A -> A_j, j : A_j -> A), verified as an adjoint pair.
inline AdjointPair quotient_surjection(const MorphismTable& j) {
  ArrowAlgebra Q = quotient(j);
  const auto& A = j.source();
  MorphismTable id(A, Q, detail::all_elems(A));
  MorphismTable back(Q, A, j.table());
  if (!is_implicative(id)) throw LawViolation("identity into the quotient is not implicative");
  auto p = verify_adjoint(id, back);
  if (!p) throw LawViolation("j is not right adjoint to the identity into the quotient");
  return *p;
}

/// j = Mh after Mf for a verified adjoint pair, checked to be a nucleus.
inline MorphismTable nucleus_from_adjoint(const AdjointPair& p) {
  if (!verify_adjoint(p.f, p.h)) throw InputError("pair is not a verified adjunction");
  MorphismTable mf = monotonize(p.f), mh = monotonize(p.h);
  MorphismTable j = compose(mh, mf);
  auto rep = check_nucleus(j);
  if (!rep.passed()) throw LawViolation("composite of the adjoint pair is not a nucleus: " + rep.first_failure()->law);
  return j;
}

struct Factorization {
  MorphismTable nucleus;
  ArrowAlgebra quotient;
  AdjointPair surjection;  ///< id : A -> A_j with j as right adjoint
  AdjointPair injection;   ///< Mf : A_j -> B with Mh as right adjoint
};

/// Surjection-inclusion factorization of a dense implicative morphism through
/// the quotient by j = Mh Mf.
inline Factorization factorize(const AdjointPair& p) {
  MorphismTable j = nucleus_from_adjoint(p);
  ArrowAlgebra Q = quotient(j);
  AdjointPair surj = quotient_surjection(j);
  MorphismTable mf = monotonize(p.f), mh = monotonize(p.h);
  MorphismTable middle = mf.retarget(Q, p.f.target());
  MorphismTable back = mh.retarget(p.f.target(), Q);
  if (!is_implicative(middle)) throw LawViolation("morphism out of the quotient is not implicative");
  auto inj = verify_adjoint(middle, back);
  if (!inj) throw LawViolation("monotonized right adjoint is not right adjoint out of the quotient");
  return {j, Q, surj, *inj};
}

/// Verdicts for a factorization: nucleus, surjection, injection, composite
/// isomorphic to f, and the middle map is an equivalence iff the pair is a
/// surjection.
inline VerificationReport check_factorization(const AdjointPair& p, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  Factorization F = factorize(p);
  r.add(Verdict::pass("factorization.nucleus"));
  auto cs = classify(F.surjection);
  if (cs.surjection)
    r.add(Verdict::pass("factorization.surjection"));
  else
    r.add(Verdict::fail("factorization.surjection", {}, "identity into the quotient is not a surjection"));
  auto ci = classify(F.injection);
  if (ci.injection)
    r.add(Verdict::pass("factorization.injection"));
  else
    r.add(Verdict::fail("factorization.injection", {}, "morphism out of the quotient is not an injection"));
  MorphismTable composite = compose(F.injection.f, F.surjection.f).retarget(p.f.source(), p.f.target());
  if (morphism_equiv(composite, p.f))
    r.add(Verdict::pass("factorization.composite"));
  else
    r.add(Verdict::fail("factorization.composite", {}, "composite of the factors is not isomorphic to f"));
  const bool surj = classify(p).surjection;
  std::string state = std::string("middle-equivalence=") + (ci.equivalence ? "yes" : "no") +
                      ", pair-surjection=" + (surj ? "yes" : "no");
  if (ci.equivalence == surj)
    r.add(Verdict::pass("factorization.equivalence-iff-inclusion", {}, state));
  else
    r.add(Verdict::fail("factorization.equivalence-iff-inclusion", {}, state));
  return r;
}

/// Both directions of the nucleus / closure-transformation correspondence.
/// Direction one (when j is a nucleus): postcomposition is cartesian,
/// inflationary and idempotent. Direction two (when j is an implicative
/// endomorphism with id |- j and jj -||- j): the monotonization of j is a
/// nucleus. Any failing clause is reported with its witness.
inline VerificationReport closure_roundtrip(const MorphismTable& j, std::string subject = {}) {
  detail::require_endo(j);
  const auto& A = j.source();
  VerificationReport r(std::move(subject));
  MorphismTable id = MorphismTable::identity(A);
  const bool implicative = is_implicative(j);

  auto cart = check_meet_preservation(j);
  const bool top_ok = logical_leq(A, A.top(), j(A.top()));
  if (implicative && cart.passed() && top_ok)
    r.add(Verdict::pass("closure.cartesian", cart.verdicts().front().witness));
  else
    r.add(Verdict::fail("closure.cartesian", {A.name(j(A.top()))},
                        !implicative ? "j is not an implicative morphism"
                                     : (top_ok ? "binary meets are not preserved" : "top is not preserved")));

  Elem infl = entailment_realizer(id, j);
  if (A.in_sep(infl))
    r.add(Verdict::pass("closure.inflationary", {A.name(infl)}));
  else
    r.add(Verdict::fail("closure.inflationary", {A.name(infl)}, "id |- j is not realized"));

  MorphismTable jj = compose(j, j);
  const bool idem = morphism_equiv(jj, j);
  if (idem) {
    r.add(Verdict::pass("closure.idempotent"));
  } else {
    std::vector<std::string> w;
    for (Elem a : A.elements())
      if (w.empty() && (!logical_leq(A, jj(a), j(a)) || !logical_leq(A, j(a), jj(a)))) w = {A.name(a)};
    if (w.empty()) w = {A.name(entailment_realizer(jj, j))};
    r.add(Verdict::fail("closure.idempotent", w, "jj and j are not isomorphic"));
  }

  if (implicative && A.in_sep(infl) && idem) {
    auto nr = check_nucleus(monotonize(j));
    if (nr.passed())
      r.add(Verdict::pass("closure.nucleus"));
    else
      r.add(Verdict::fail("closure.nucleus", nr.first_failure()->witness, nr.first_failure()->detail));
  } else {
    r.add(Verdict::fail("closure.nucleus", {}, "j is not an inflationary idempotent implicative endomorphism"));
  }
  return r;
}

}  // namespace arrowlab

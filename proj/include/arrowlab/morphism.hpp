#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"

namespace arrowlab {

/// Function between the carriers of two arrow algebras, with an optional
/// realizer certificate for the implication condition.
class MorphismTable {
 public:
  MorphismTable(ArrowAlgebra source, ArrowAlgebra target, std::vector<Elem> table,
                std::optional<Elem> certificate = std::nullopt)
      : source_(std::move(source)), target_(std::move(target)), table_(std::move(table)), cert_(certificate) {
    if (table_.size() != source_.size()) throw InputError("morphism table must be total on the source");
    for (Elem e : table_)
      if (e.index >= target_.size()) throw InputError("morphism table entry out of range");
    if (cert_) {
      for (Elem a : source_.elements())
        for (Elem b : source_.elements())
          if (!target_.leq(*cert_, target_.imp((*this)(source_.imp(a, b)), target_.imp((*this)(a), (*this)(b)))))
            throw InputError("certificate does not bound f(a -> b) -> f(a) -> f(b) at (" + source_.name(a) + ", " +
                             source_.name(b) + ")");
    }
  }

  template <class F>
    requires std::invocable<F, Elem>
  static MorphismTable from_function(ArrowAlgebra source, ArrowAlgebra target, F&& f) {
    std::vector<Elem> t;
    for (Elem a : source.elements()) t.push_back(f(a));
    return MorphismTable(std::move(source), std::move(target), std::move(t));
  }

  static MorphismTable identity(const ArrowAlgebra& A) {
    return from_function(A, A, [](Elem a) { return a; });
  }

  Elem operator()(Elem a) const { return table_[a.index]; }
  const ArrowAlgebra& source() const { return source_; }
  const ArrowAlgebra& target() const { return target_; }
  const std::vector<Elem>& table() const { return table_; }
  const std::optional<Elem>& certificate() const { return cert_; }

  MorphismTable with_certificate(Elem r) const { return MorphismTable(source_, target_, table_, r); }
  /// Same table viewed between different algebras on the same carriers.
  MorphismTable retarget(ArrowAlgebra source, ArrowAlgebra target) const {
    return MorphismTable(std::move(source), std::move(target), table_);
  }

 private:
  ArrowAlgebra source_, target_;
  std::vector<Elem> table_;
  std::optional<Elem> cert_;
};

/// f and a right adjoint h with realizers for id_A |- hf (unit) and
/// fh |- id_B (counit).
struct AdjointPair {
  MorphismTable f, h;
  Elem unit, counit;
};

struct Classification {
  bool surjection = false;
  bool injection = false;
  bool equivalence = false;
};

/// meet over a, a' of f(a -> a') -> f(a) -> f(a'): the least candidate
/// realizer, so condition (ii) holds iff it is separated.
inline Elem canonical_realizer(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  Elem m = B.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) m = B.meet(m, B.imp(f(A.imp(a, b)), B.imp(f(a), f(b))));
  return m;
}

/// Checks the three implicative-morphism conditions. The uniform condition on
/// families X ⊆ A x A is checked only at X_s = {(a,a') | s <= a -> a'} for
/// s in S_A: any X with separated meet s is contained in X_s, and the
/// conclusion for X_s implies it for X by upward closure.
inline VerificationReport check_implicative(const MorphismTable& f, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source(), &B = f.target();
  bool ok = true;
  for (Elem s : A.elements())
    if (A.in_sep(s) && !B.in_sep(f(s))) {
      r.add(Verdict::fail("morphism.preserves-separator", {A.name(s), B.name(f(s))},
                          A.name(s) + " is separated but its image " + B.name(f(s)) + " is not"));
      ok = false;
      break;
    }
  if (ok) r.add(Verdict::pass("morphism.preserves-separator"));

  Elem rz = canonical_realizer(f);
  if (B.in_sep(rz)) {
    r.add(Verdict::pass("morphism.realized", {B.name(rz)}));
  } else {
    // Report a pair whose term is not separated, if one exists; otherwise the
    // meet itself is the counterexample.
    std::vector<std::string> w{B.name(rz)};
    for (Elem a : A.elements())
      for (Elem b : A.elements())
        if (w.size() == 1 && !B.in_sep(B.imp(f(A.imp(a, b)), B.imp(f(a), f(b))))) w = {A.name(a), A.name(b)};
    r.add(Verdict::fail("morphism.realized", w, "meet of f(a -> a') -> f(a) -> f(a') is " + B.name(rz) +
                                                    ", which is not separated"));
  }

  ok = true;
  for (Elem s : A.elements()) {
    if (!A.in_sep(s)) continue;
    Elem m = B.top();
    for (Elem a : A.elements())
      for (Elem b : A.elements())
        if (A.leq(s, A.imp(a, b))) m = B.meet(m, B.imp(f(a), f(b)));
    if (!B.in_sep(m)) {
      r.add(Verdict::fail("morphism.uniform-entailment", {A.name(s), B.name(m)},
                          "pairs realized by " + A.name(s) + " map to a family with unseparated meet " + B.name(m)));
      ok = false;
      break;
    }
  }
  if (ok) r.add(Verdict::pass("morphism.uniform-entailment"));
  return r;
}

inline bool is_implicative(const MorphismTable& f) { return check_implicative(f).passed(); }

/// Returns f with its canonical certificate attached; throws LawViolation
/// when f is not implicative.
inline MorphismTable certify(const MorphismTable& f) {
  auto r = check_implicative(f);
  if (!r.passed()) throw LawViolation("not an implicative morphism: " + r.first_failure()->detail);
  return f.with_certificate(canonical_realizer(f));
}

/// meet over a of f(a) -> g(a), the least realizer of f |- g.
inline Elem entailment_realizer(const MorphismTable& f, const MorphismTable& g) {
  const auto& B = f.target();
  Elem m = B.top();
  for (Elem a : f.source().elements()) m = B.meet(m, B.imp(f(a), g(a)));
  return m;
}

inline void require_parallel(const MorphismTable& f, const MorphismTable& g) {
  if (f.source().size() != g.source().size() || f.target().size() != g.target().size())
    throw InputError("morphisms do not have matching endpoints");
}

/// f |- g iff meet over a of f(a) -> g(a) is separated.
inline bool morphism_leq(const MorphismTable& f, const MorphismTable& g) {
  require_parallel(f, g);
  return f.target().in_sep(entailment_realizer(f, g));
}
inline bool morphism_equiv(const MorphismTable& f, const MorphismTable& g) {
  return morphism_leq(f, g) && morphism_leq(g, f);
}

/// g after f, certified when both are implicative.
inline MorphismTable compose(const MorphismTable& g, const MorphismTable& f) {
  if (f.target().size() != g.source().size()) throw InputError("morphisms are not composable");
  std::vector<Elem> t;
  for (Elem a : f.source().elements()) t.push_back(g(f(a)));
  MorphismTable h(f.source(), g.target(), std::move(t));
  if (f.certificate() && g.certificate()) return certify(h);
  return h;
}

/// Mf(a) = meet over a <= a' of shift(f(a')): monotone, and isomorphic to f
/// whenever f is implicative.
inline MorphismTable monotonize(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  std::vector<Elem> t;
  for (Elem a : A.elements()) {
    Elem m = B.top();
    for (Elem b : A.elements())
      if (A.leq(a, b)) m = B.meet(m, B.shift(f(b)));
    t.push_back(m);
  }
  MorphismTable mf(A, B, std::move(t));
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (A.leq(a, b) && !B.leq(mf(a), mf(b))) throw LawViolation("monotonization is not monotone");
  if (is_implicative(f) && !morphism_equiv(f, mf))
    throw LawViolation("monotonization is not isomorphic to the morphism");
  return mf;
}

inline bool is_monotone(const MorphismTable& f) {
  for (Elem a : f.source().elements())
    for (Elem b : f.source().elements())
      if (f.source().leq(a, b) && !f.target().leq(f(a), f(b))) return false;
  return true;
}

/// Verifies a candidate right adjoint: h implicative, fh |- id_B and
/// id_A |- hf. Returns the pair with its realizers.
inline std::optional<AdjointPair> verify_adjoint(const MorphismTable& f, const MorphismTable& h) {
  const auto &A = f.source(), &B = f.target();
  Elem unit = A.top(), counit = B.top();
  for (Elem a : A.elements()) unit = A.meet(unit, A.imp(a, h(f(a))));
  if (!A.in_sep(unit)) return std::nullopt;
  for (Elem b : B.elements()) counit = B.meet(counit, B.imp(f(h(b)), b));
  if (!B.in_sep(counit)) return std::nullopt;
  if (!is_implicative(h)) return std::nullopt;
  return AdjointPair{f, h, unit, counit};
}

struct AdjointSearch {
  Status status = Status::fail;  ///< pass: found; fail: none exists; inconclusive: cap exceeded
  std::optional<AdjointPair> pair;
  std::size_t candidates = 0;  ///< size of the restricted search space
  std::string detail;
};

/// Right-adjoint search. Any adjoint h maps b into the |- -greatest class of
/// L_b = {a | f(a) |- b}: f h(b) |- b puts h(b) in L_b, and a in L_b gives
/// a |- hf(a) |- h(b). Candidates are tried in ascending lexicographic order
/// of tables; the first verified one is returned.
inline AdjointSearch find_right_adjoint(const MorphismTable& f, std::size_t cap = 1'000'000) {
  const auto &A = f.source(), &B = f.target();
  std::vector<std::vector<Elem>> classes;
  std::size_t product = 1;
  for (Elem b : B.elements()) {
    std::vector<Elem> L;
    for (Elem a : A.elements())
      if (logical_leq(B, f(a), b)) L.push_back(a);
    std::vector<Elem> top_class;
    for (Elem a : L) {
      bool greatest = true;
      for (Elem x : L)
        if (!logical_leq(A, x, a)) greatest = false;
      if (greatest) top_class.push_back(a);
    }
    if (top_class.empty())
      return {Status::fail, std::nullopt, 0, "no greatest element of f-preimage class below " + B.name(b)};
    product *= top_class.size();
    if (product > cap)
      return {Status::inconclusive, std::nullopt, product, "restricted adjoint search space exceeds cap"};
    classes.push_back(std::move(top_class));
  }
  std::vector<std::size_t> idx(B.size(), 0);
  while (true) {
    std::vector<Elem> t;
    for (std::size_t b = 0; b < B.size(); ++b) t.push_back(classes[b][idx[b]]);
    if (auto p = verify_adjoint(f, MorphismTable(B, A, std::move(t)))) return {Status::pass, std::move(p), product, {}};
    std::size_t k = B.size();
    while (k > 0 && ++idx[k - 1] == classes[k - 1].size()) idx[--k] = 0;
    if (k == 0) break;
  }
  return {Status::fail, std::nullopt, product, "no candidate in the restricted space is a right adjoint"};
}

inline Classification classify(const AdjointPair& p) {
  Classification c;
  c.surjection = morphism_equiv(compose(p.f, p.h), MorphismTable::identity(p.f.target()));
  c.injection = morphism_equiv(compose(p.h, p.f), MorphismTable::identity(p.f.source()));
  c.equivalence = c.surjection && c.injection;
  return c;
}

/// One-fiber existential: meet over a of (meet over t in T of t -> shift a)
/// -> shift shift a.
inline Elem fiber_exists(const ArrowAlgebra& A, const std::vector<Elem>& T) {
  Elem m = A.top();
  for (Elem a : A.elements()) {
    Elem sa = A.shift(a);
    Elem h = A.top();
    for (Elem t : T) h = A.meet(h, A.imp(t, sa));
    m = A.meet(m, A.imp(h, A.shift(sa)));
  }
  return m;
}

/// Regularity as one separated meet over all subsets T of the source:
/// meet of f(E(T)) -> E(f[T]). A concrete g : X -> Y and predicate only
/// ever needs a subfamily of these terms, and the packing of every subset as
/// a fiber realizes the converse. On join-compatible algebras the join form
/// meet of f(join T) -> join f[T] is computed and must agree.
inline VerificationReport is_regular(const MorphismTable& f, std::size_t cap = 12, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source(), &B = f.target();
  if (A.size() > cap) {
    r.add(Verdict::inconclusive("morphism.regular", "source carrier of size " + std::to_string(A.size()) +
                                                        " exceeds subset cap " + std::to_string(cap)));
    return r;
  }
  const std::size_t n = A.size();
  Elem m = B.top(), mj = B.top();
  std::optional<std::vector<std::string>> worst;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<Elem> T, fT;
    Elem jt = A.bottom(), jft = B.bottom();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        T.push_back(Elem{i});
        fT.push_back(f(Elem{i}));
        jt = A.join(jt, Elem{i});
        jft = B.join(jft, f(Elem{i}));
      }
    Elem term = B.imp(f(fiber_exists(A, T)), fiber_exists(B, fT));
    m = B.meet(m, term);
    if (!worst && !B.in_sep(term)) {
      worst = std::vector<std::string>{};
      for (Elem t : T) worst->push_back(A.name(t));
    }
    mj = B.meet(mj, B.imp(f(jt), jft));
  }
  const bool regular = B.in_sep(m);
  if (regular)
    r.add(Verdict::pass("morphism.regular", {B.name(m)}));
  else
    r.add(Verdict::fail("morphism.regular", worst.value_or(std::vector<std::string>{B.name(m)}),
                        "meet of f(E(T)) -> E(f[T]) is " + B.name(m) + ", which is not separated"));
  if (A.compatible_with_joins() && B.compatible_with_joins()) {
    if (B.in_sep(mj) == regular)
      r.add(Verdict::pass("morphism.regular-join-form", {B.name(mj)}));
    else
      r.add(Verdict::fail("morphism.regular-join-form", {B.name(mj)}, "join form disagrees with the general form"));
  }
  return r;
}

/// meet over a, b of (f a x f b) -> f(a x b).
inline VerificationReport check_meet_preservation(const MorphismTable& f, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source(), &B = f.target();
  Elem m = B.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) m = B.meet(m, B.imp(logical_meet(B, f(a), f(b)), f(logical_meet(A, a, b))));
  if (B.in_sep(m))
    r.add(Verdict::pass("morphism.meet-preservation", {B.name(m)}));
  else
    r.add(Verdict::fail("morphism.meet-preservation", {B.name(m)}, "realizer candidate is not separated"));
  return r;
}

/// f_*(x) = join{y | f(y) <= x}, the order-theoretic right adjoint.
inline MorphismTable frame_right_adjoint(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  return MorphismTable::from_function(B, A, [&](Elem x) {
    Elem j = A.bottom();
    for (Elem y : A.elements())
      if (B.leq(f(y), x)) j = A.join(j, y);
    return j;
  });
}

inline bool preserves_finite_meets(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  if (f(A.top()) != B.top()) return false;
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (f(A.meet(a, b)) != B.meet(f(a), f(b))) return false;
  return true;
}

inline bool preserves_joins(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  if (f(A.bottom()) != B.bottom()) return false;
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (f(A.join(a, b)) != B.join(f(a), f(b))) return false;
  return true;
}

inline bool is_frame_homomorphism(const MorphismTable& f) { return preserves_finite_meets(f) && preserves_joins(f); }

/// Between frames: implicative iff monotone and finite-meet preserving;
/// computationally dense iff frame homomorphism. Each verdict passes when
/// both sides of the equivalence agree on this instance.
inline VerificationReport frame_characterizations(const MorphismTable& f, std::string subject = {}) {
  if (!is_frame_derived(f.source()) || !is_frame_derived(f.target()))
    throw InputError("frame characterizations need frame-derived algebras");
  VerificationReport r(std::move(subject));
  const bool implicative = is_implicative(f);
  const bool meet_monotone = is_monotone(f) && preserves_finite_meets(f);
  std::string state = std::string("implicative=") + (implicative ? "yes" : "no") +
                      ", monotone-and-meet-preserving=" + (meet_monotone ? "yes" : "no");
  if (implicative == meet_monotone)
    r.add(Verdict::pass("morphism.frame-implicative", {}, state));
  else
    r.add(Verdict::fail("morphism.frame-implicative", {}, state));
  if (!implicative) return r;
  auto search = find_right_adjoint(f);
  if (search.status == Status::inconclusive) {
    r.add(Verdict::inconclusive("morphism.frame-dense", search.detail));
    return r;
  }
  const bool dense = search.status == Status::pass;
  const bool hom = is_frame_homomorphism(f);
  state = std::string("dense=") + (dense ? "yes" : "no") + ", frame-homomorphism=" + (hom ? "yes" : "no");
  if (dense == hom)
    r.add(Verdict::pass("morphism.frame-dense", {}, state));
  else
    r.add(Verdict::fail("morphism.frame-dense", {}, state));
  return r;
}

/// Two-element frame bot < top.
inline ArrowAlgebra two_frame() { return ArrowAlgebra::frame(FiniteLattice::chain(2, {"bot", "top"})); }

/// Characteristic function of the separator into the two-element frame.
inline MorphismTable characteristic(const ArrowAlgebra& A) {
  ArrowAlgebra two = two_frame();
  return MorphismTable::from_function(A, two, [&](Elem a) { return A.in_sep(a) ? two.top() : two.bottom(); });
}

/// Unique map into the one-element algebra.
inline MorphismTable to_terminal(const ArrowAlgebra& A) {
  ArrowAlgebra one = ArrowAlgebra::frame(FiniteLattice::chain(1, {"*"}));
  return MorphismTable::from_function(A, one, [](Elem) { return Elem{0u}; });
}

}  // namespace arrowlab

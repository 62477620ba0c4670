#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace arrowlab {

enum class Status { pass, fail, inconclusive };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// Outcome of checking one law on one subject. On pass, `witness` lists
/// realizers (element names) when the law has one; on fail it lists the
/// violating tuple. Fail and inconclusive verdicts always carry a `detail`.
struct Verdict {
  std::string law;
  Status status = Status::pass;
  std::vector<std::string> witness;
  std::string detail;

  static Verdict pass(std::string law, std::vector<std::string> witness = {}, std::string detail = {}) {
    return {std::move(law), Status::pass, std::move(witness), std::move(detail)};
  }
  static Verdict fail(std::string law, std::vector<std::string> witness, std::string detail) {
    return {std::move(law), Status::fail, std::move(witness), std::move(detail)};
  }
  static Verdict inconclusive(std::string law, std::string detail) {
    return {std::move(law), Status::inconclusive, {}, std::move(detail)};
  }
  bool passed() const { return status == Status::pass; }
};

class VerificationReport {
 public:
  VerificationReport() = default;
  explicit VerificationReport(std::string subject) : subject_(std::move(subject)) {}

  const std::string& subject() const { return subject_; }
  void set_subject(std::string s) { subject_ = std::move(s); }

  const std::vector<Verdict>& verdicts() const { return verdicts_; }

  VerificationReport& add(Verdict v) {
    verdicts_.push_back(std::move(v));
    return *this;
  }
  VerificationReport& merge(const VerificationReport& other) {
    verdicts_.insert(verdicts_.end(), other.verdicts_.begin(), other.verdicts_.end());
    return *this;
  }

  /// fail dominates inconclusive dominates pass. An empty report passes.
  Status status() const {
    Status s = Status::pass;
    for (const auto& v : verdicts_) {
      if (v.status == Status::fail) return Status::fail;
      if (v.status == Status::inconclusive) s = Status::inconclusive;
    }
    return s;
  }
  bool passed() const { return status() == Status::pass; }

  const Verdict* first_failure() const {
    for (const auto& v : verdicts_)
      if (v.status == Status::fail) return &v;
    return nullptr;
  }
  const Verdict* find(std::string_view law) const {
    for (const auto& v : verdicts_)
      if (v.law == law) return &v;
    return nullptr;
  }

 private:
  std::string subject_;
  std::vector<Verdict> verdicts_;
};

/// Versioned registry of law identifiers emitted in reports.
namespace laws {

inline constexpr std::string_view registry_version = "1";

struct LawInfo {
  std::string_view id;
  std::string_view description;
};

inline constexpr std::array registry = {
    LawInfo{"arrow.variance", "implication is antitone in its first and monotone in its second argument"},
    LawInfo{"separator.upward-closed", "separator is upward closed"},
    LawInfo{"separator.modus-ponens", "separator is closed under modus ponens"},
    LawInfo{"separator.contains-k", "separator contains the k combinator"},
    LawInfo{"separator.contains-s", "separator contains the s combinator"},
    LawInfo{"separator.contains-a", "separator contains the a combinator"},
    LawInfo{"separator.contains-i", "separator contains the identity combinator"},
    LawInfo{"separator.contains-b", "separator contains the composition combinator"},
    LawInfo{"algebra.shift-counit", "meet of (top -> a) -> a lies in the separator"},
    LawInfo{"algebra.compatible-with-joins", "(join B) -> a equals meet of b -> a"},
    LawInfo{"algebra.binary-implicative", "a -> (b meet c) equals (a -> b) meet (a -> c)"},
    LawInfo{"algebra.modifiable", "binary implicative and bottom -> a equals top"},
    LawInfo{"logic.heyting-prealgebra", "logical order is a Heyting prealgebra with x, + and ->"},
    LawInfo{"logic.tautology-instance", "instances of implicational tautologies lie in the separator"},
    LawInfo{"lambda.separator-closure", "interpretation of a lambda term on separator arguments lies in the separator"},
    LawInfo{"morphism.preserves-separator", "image of the source separator lies in the target separator"},
    LawInfo{"morphism.realized", "meet of f(a->a') -> f(a) -> f(a') lies in the target separator"},
    LawInfo{"morphism.uniform-entailment", "uniform families of entailments are preserved"},
    LawInfo{"morphism.meet-preservation", "meet of (f a x f b) -> f(a x b) lies in the target separator"},
    LawInfo{"morphism.monotonization", "monotonized morphism is monotone and isomorphic to the original"},
    LawInfo{"morphism.adjoint", "right adjoint exists and satisfies unit and counit"},
    LawInfo{"morphism.regular", "morphism preserves existential quantification"},
    LawInfo{"morphism.regular-join-form", "regularity via joins agrees on join-compatible algebras"},
    LawInfo{"morphism.frame-implicative", "between frames: implicative iff monotone and finite-meet preserving"},
    LawInfo{"morphism.frame-dense", "between frames: computationally dense iff frame homomorphism"},
    LawInfo{"nucleus.monotone", "nucleus is monotone"},
    LawInfo{"nucleus.inflationary", "meet of a -> ja lies in the separator"},
    LawInfo{"nucleus.absorption", "meet of (a -> jb) -> ja -> jb lies in the separator"},
    LawInfo{"nucleus.idempotent", "meet of jja -> ja lies in the separator"},
    LawInfo{"nucleus.implication-lift", "meet of (a -> b) -> ja -> jb lies in the separator"},
    LawInfo{"nucleus.application", "meet of j(a -> b) -> ja -> jb lies in the separator"},
    LawInfo{"quotient.algebra", "quotient by a nucleus is an arrow algebra"},
    LawInfo{"quotient.contains-separator", "the original separator is contained in the quotient separator"},
    LawInfo{"quotient.joins", "quotient of a join-compatible algebra is join compatible"},
    LawInfo{"quotient.logical-order", "quotient logical order is a |- jb"},
    LawInfo{"quotient.surjection", "identity into the quotient is an implicative surjection with j as right adjoint"},
    LawInfo{"closure.cartesian", "nucleus postcomposition preserves finite meets"},
    LawInfo{"closure.inflationary", "identity entails the closure"},
    LawInfo{"closure.idempotent", "closure composed with itself is isomorphic to itself"},
    LawInfo{"closure.nucleus", "monotonized closure endomorphism is a nucleus"},
    LawInfo{"factorization.nucleus", "composite of monotonized adjoint pair is a nucleus"},
    LawInfo{"factorization.surjection", "identity into the quotient is an implicative surjection"},
    LawInfo{"factorization.injection", "morphism out of the quotient is an implicative injection"},
    LawInfo{"factorization.composite", "composite of the factors is isomorphic to the morphism"},
    LawInfo{"factorization.equivalence-iff-inclusion", "middle map is an equivalence iff the pair is a surjection"},
    LawInfo{"tripos.power-algebra", "uniform power is an arrow algebra"},
    LawInfo{"tripos.exists-adjoint", "existential quantifier is left adjoint to reindexing"},
    LawInfo{"tripos.forall-adjoint", "universal quantifier is right adjoint to reindexing"},
    LawInfo{"tripos.exists-join-form", "join form of the existential agrees with the general form"},
    LawInfo{"tripos.beck-chevalley-exists", "Beck-Chevalley condition for existentials"},
    LawInfo{"tripos.beck-chevalley-forall", "Beck-Chevalley condition for universals"},
    LawInfo{"tripos.generic-element", "every predicate is a reindexing of the identity predicate"},
    LawInfo{"tripos.induced-monotone", "postcomposition is monotone in the indexed logical order"},
    LawInfo{"tripos.induced-cartesian", "postcomposition preserves top and binary meets"},
    LawInfo{"tripos.recover-morphism", "evaluating the transformation at the identity recovers the morphism"},
    LawInfo{"tripos.subtripos-equivalence", "fixed predicates of a nucleus form an equivalent subtripos"},
    LawInfo{"pca.applicative-poset", "application is monotone and downward defined"},
    LawInfo{"pca.filter", "filter is upward closed and closed under defined application"},
    LawInfo{"pca.k", "k a b is defined and below a"},
    LawInfo{"pca.s", "s a b is defined and s a b c is below a c (b c)"},
    LawInfo{"pca.bracket-defined", "bracket abstraction applied to all but the last argument is defined"},
    LawInfo{"pca.bracket-bound", "bracket abstraction applied to all arguments is Kleene-below the term"},
    LawInfo{"pca.bracket-filter", "bracket abstraction of a filter-constant term lies in the filter"},
    LawInfo{"pca.identity", "i a is below a"},
    LawInfo{"pca.dual-constant", "k-bar a b is below b"},
    LawInfo{"pca.pairing", "projections of a pair are below the components"},
    LawInfo{"pca.morphism", "map preserves filter, application and order up to realizers"},
    LawInfo{"pca.dense", "morphism is computationally dense"},
    LawInfo{"pca.density-adjoint", "explicit adjoint from a density witness is a right adjoint"},
    LawInfo{"pca.union-extension", "union extension is an implicative morphism of downset algebras"},
    LawInfo{"sierpinski.algebra", "Sierpinski construction is an arrow algebra"},
    LawInfo{"sierpinski.binary-implicative", "Sierpinski construction is binary implicative"},
    LawInfo{"sierpinski.lift", "lifted morphism is implicative"},
    LawInfo{"sierpinski.lift-adjoint", "lifted right adjoint is a right adjoint of the lift"},
    LawInfo{"sierpinski.projection-surjection", "second projection with the diagonal is an implicative surjection"},
    LawInfo{"sierpinski.open-nucleus", "open nucleus (bot, top) -> x is a nucleus"},
    LawInfo{"sierpinski.closed-nucleus", "closed nucleus x + (bot, top) is a nucleus"},
    LawInfo{"sierpinski.open-is-projection", "open nucleus is isomorphic to diagonal after projection"},
    LawInfo{"sierpinski.join-second-component", "second component of a logical join is the join of second components"},
    LawInfo{"sierpinski.delta-square", "lift commutes with projection and diagonal up to isomorphism"},
    LawInfo{"modified.predicates", "modified predicates coincide with the closed-nucleus fixed predicates"},
    LawInfo{"modified.lift", "modified lift is an implicative morphism"},
    LawInfo{"modified.pseudofunctor", "modified lift preserves identities and composition up to isomorphism"},
    LawInfo{"modified.adjoint", "modified lift of a right adjoint is a right adjoint"},
    LawInfo{"modified.square", "closed nucleus square commutes up to isomorphism"},
    LawInfo{"modified.closure-absorption", "c f c entails f c"},
    LawInfo{"modified.pullback-condition", "lift of (bot, top) is isomorphic to (bot, top)"},
};

inline bool known(std::string_view id) {
  return std::any_of(registry.begin(), registry.end(), [&](const LawInfo& l) { return l.id == id; });
}

}  // namespace laws
}  // namespace arrowlab

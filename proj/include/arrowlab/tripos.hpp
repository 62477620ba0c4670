#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"
#include "arrowlab/morphism.hpp"
#include "arrowlab/nucleus.hpp"

namespace arrowlab {

/// Table I -> A over the finite index {0, ..., I-1}.
using Predicate = std::vector<Elem>;

/// Total function between finite index sets.
struct FinMap {
  std::size_t dom = 0, cod = 0;
  std::vector<std::size_t> map;

  FinMap() = default;
  FinMap(std::size_t cod_size, std::vector<std::size_t> m) : dom(m.size()), cod(cod_size), map(std::move(m)) {
    for (std::size_t y : map)
      if (y >= cod) throw InputError("finite map value out of range");
  }
  static FinMap identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = i;
    return FinMap(n, std::move(m));
  }
  std::size_t operator()(std::size_t x) const { return map[x]; }
};

/// Every map dom -> cod, in lexicographic order.
inline std::vector<FinMap> all_maps(std::size_t dom, std::size_t cod) {
  std::vector<FinMap> out;
  if (cod == 0) {
    if (dom == 0) out.emplace_back(0, std::vector<std::size_t>{});
    return out;
  }
  std::vector<std::size_t> m(dom, 0);
  while (true) {
    out.emplace_back(cod, m);
    std::size_t k = dom;
    while (k > 0 && ++m[k - 1] == cod) m[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

/// phi |-_I psi iff meet over i of phi(i) -> psi(i) is separated.
inline bool entails(const ArrowAlgebra& A, const Predicate& phi, const Predicate& psi) {
  if (phi.size() != psi.size()) throw InputError("predicates over different index sets");
  Elem m = A.top();
  for (std::size_t i = 0; i < phi.size(); ++i) m = A.meet(m, A.imp(phi[i], psi[i]));
  return A.in_sep(m);
}
inline bool equivalent(const ArrowAlgebra& A, const Predicate& phi, const Predicate& psi) {
  return entails(A, phi, psi) && entails(A, psi, phi);
}

/// f* beta = beta after f.
inline Predicate reindex(const FinMap& f, const Predicate& beta) {
  if (beta.size() != f.cod) throw InputError("reindexing a predicate over the wrong index");
  Predicate out;
  for (std::size_t x = 0; x < f.dom; ++x) out.push_back(beta[f(x)]);
  return out;
}

/// exists_f(alpha)(i) = meet over a of (meet over j in the fiber of
/// alpha(j) -> shift a) -> shift shift a.
inline Predicate exists_along(const ArrowAlgebra& A, const FinMap& f, const Predicate& alpha) {
  if (alpha.size() != f.dom) throw InputError("quantifying a predicate over the wrong index");
  Predicate out;
  std::vector<Elem> fiber;
  for (std::size_t i = 0; i < f.cod; ++i) {
    fiber.clear();
    for (std::size_t j = 0; j < f.dom; ++j)
      if (f(j) == i) fiber.push_back(alpha[j]);
    out.push_back(fiber_exists(A, fiber));
  }
  return out;
}

/// Fiberwise join, the existential on join-compatible algebras.
inline Predicate exists_join(const ArrowAlgebra& A, const FinMap& f, const Predicate& alpha) {
  if (alpha.size() != f.dom) throw InputError("quantifying a predicate over the wrong index");
  Predicate out(f.cod, A.bottom());
  for (std::size_t j = 0; j < f.dom; ++j) out[f(j)] = A.join(out[f(j)], alpha[j]);
  return out;
}

/// forall_f(alpha)(i) = meet over j in the fiber of shift alpha(j).
inline Predicate forall_along(const ArrowAlgebra& A, const FinMap& f, const Predicate& alpha) {
  if (alpha.size() != f.dom) throw InputError("quantifying a predicate over the wrong index");
  Predicate out(f.cod, A.top());
  for (std::size_t j = 0; j < f.dom; ++j) out[f(j)] = A.meet(out[f(j)], A.shift(alpha[j]));
  return out;
}

inline Predicate pointwise(const Predicate& p, const std::function<Elem(Elem)>& g) {
  Predicate out;
  for (Elem e : p) out.push_back(g(e));
  return out;
}
inline Predicate pointwise(const Predicate& p, const Predicate& q, const std::function<Elem(Elem, Elem)>& g) {
  Predicate out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(g(p[i], q[i]));
  return out;
}

/// Predicates used for universally quantified checks: every table when
/// |A|^|I| <= exhaustive_cap, otherwise constants, two-valued indicator
/// tables and `samples` seeded random tables.
inline std::vector<Predicate> predicate_family(const ArrowAlgebra& A, std::size_t I, std::uint64_t seed = 0,
                                               std::size_t exhaustive_cap = 4096, std::size_t samples = 64) {
  std::vector<Predicate> out;
  const std::size_t n = A.size();
  std::size_t total = 1;
  bool small = true;
  for (std::size_t i = 0; i < I && small; ++i) {
    total *= n;
    if (total > exhaustive_cap) small = false;
  }
  if (small) {
    for (std::size_t code = 0; code < total; ++code) {
      Predicate p;
      std::size_t c = code;
      for (std::size_t i = 0; i < I; ++i) {
        p.push_back(Elem{c % n});
        c /= n;
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  std::set<Predicate> seen;
  auto add = [&](Predicate p) {
    if (seen.insert(p).second) out.push_back(std::move(p));
  };
  for (Elem a : A.elements()) add(Predicate(I, a));
  for (std::size_t i0 = 0; i0 < I; ++i0)
    for (Elem a : A.elements())
      for (Elem b : A.elements()) {
        Predicate p(I, b);
        p[i0] = a;
        add(std::move(p));
      }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    Predicate p;
    for (std::size_t i = 0; i < I; ++i) p.push_back(Elem{pick(rng)});
    add(std::move(p));
  }
  return out;
}

/// Uniform power A^I as a materialized algebra; elements are named
/// "(a,b,...)". Throws CapExceeded past `cap` elements.
inline ArrowAlgebra power_algebra(const ArrowAlgebra& A, std::size_t I, std::size_t cap = 512) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < I; ++i) {
    total *= A.size();
    if (total > cap) throw CapExceeded("power algebra exceeds " + std::to_string(cap) + " elements");
  }
  auto preds = predicate_family(A, I, 0, total);
  std::vector<std::string> names;
  for (const auto& p : preds) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + A.name(p[i]);
    names.push_back(s + ")");
  }
  auto code_of = [&](const Predicate& p) {
    std::size_t c = 0;
    for (std::size_t i = p.size(); i-- > 0;) c = c * A.size() + p[i].index;
    return c;
  };
  std::vector<std::uint8_t> leq(total * total, 0);
  std::vector<Elem> imp(total * total);
  std::vector<std::uint8_t> sep(total, 0);
  for (std::size_t x = 0; x < total; ++x) {
    Elem m = A.top();
    for (Elem e : preds[x]) m = A.meet(m, e);
    sep[x] = A.in_sep(m);
    for (std::size_t y = 0; y < total; ++y) {
      bool le = true;
      Predicate q;
      for (std::size_t i = 0; i < I; ++i) {
        le = le && A.leq(preds[x][i], preds[y][i]);
        q.push_back(A.imp(preds[x][i], preds[y][i]));
      }
      leq[x * total + y] = le;
      imp[x * total + y] = Elem{code_of(q)};
    }
  }
  return ArrowAlgebra(FiniteLattice(std::move(names), std::move(leq)), std::move(imp), std::move(sep));
}

namespace detail {

inline std::string show(const ArrowAlgebra& A, const Predicate& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + A.name(p[i]);
  return s + "]";
}
inline std::string show(const FinMap& f) {
  std::string s = "{";
  for (std::size_t i = 0; i < f.dom; ++i) s += (i ? "," : "") + std::to_string(i) + ":" + std::to_string(f(i));
  return s + "}";
}

}  // namespace detail

/// exists_f -| f* -| forall_f over predicate families on both sides, and the
/// join form of the existential on join-compatible algebras.
inline VerificationReport check_adjointness(const ArrowAlgebra& A, const FinMap& f, std::uint64_t seed = 0,
                                            std::string subject = {}) {
  VerificationReport r(std::move(subject));
  auto alphas = predicate_family(A, f.dom, seed);
  auto betas = predicate_family(A, f.cod, seed + 1);
  std::vector<Predicate> ex, all;
  for (const auto& a : alphas) {
    ex.push_back(exists_along(A, f, a));
    all.push_back(forall_along(A, f, a));
  }
  std::vector<Predicate> pulled;
  for (const auto& b : betas) pulled.push_back(reindex(f, b));
  std::optional<Verdict> ex_fail, all_fail;
  for (std::size_t i = 0; i < alphas.size() && !(ex_fail && all_fail); ++i)
    for (std::size_t k = 0; k < betas.size(); ++k) {
      if (!ex_fail && entails(A, ex[i], betas[k]) != entails(A, alphas[i], pulled[k]))
        ex_fail = Verdict::fail("tripos.exists-adjoint", {detail::show(f), detail::show(A, alphas[i]), detail::show(A, betas[k])},
                                "exists(alpha) |- beta disagrees with alpha |- f*beta");
      if (!all_fail && entails(A, pulled[k], alphas[i]) != entails(A, betas[k], all[i]))
        all_fail = Verdict::fail("tripos.forall-adjoint", {detail::show(f), detail::show(A, alphas[i]), detail::show(A, betas[k])},
                                 "f*beta |- alpha disagrees with beta |- forall(alpha)");
    }
  r.add(ex_fail.value_or(Verdict::pass("tripos.exists-adjoint")));
  r.add(all_fail.value_or(Verdict::pass("tripos.forall-adjoint")));
  if (A.compatible_with_joins()) {
    std::optional<Verdict> jf;
    for (std::size_t i = 0; i < alphas.size() && !jf; ++i)
      if (!equivalent(A, ex[i], exists_join(A, f, alphas[i])))
        jf = Verdict::fail("tripos.exists-join-form", {detail::show(f), detail::show(A, alphas[i])},
                           "join form is not isomorphic to the general existential");
    r.add(jf.value_or(Verdict::pass("tripos.exists-join-form")));
  }
  return r;
}

/// Pullback of k : W -> Z and h : Y -> Z, with projections p1 : X -> W and
/// p2 : X -> Y where X = {(w, y) | k(w) = h(y)} in lexicographic order.
struct PullbackSquare {
  FinMap k, h, p1, p2;

  static PullbackSquare of(const FinMap& k, const FinMap& h) {
    if (k.cod != h.cod) throw InputError("pullback needs a common codomain");
    std::vector<std::size_t> a, b;
    for (std::size_t w = 0; w < k.dom; ++w)
      for (std::size_t y = 0; y < h.dom; ++y)
        if (k(w) == h(y)) {
          a.push_back(w);
          b.push_back(y);
        }
    return {k, h, FinMap(k.dom, std::move(a)), FinMap(h.dom, std::move(b))};
  }
};

/// k* exists_h alpha -||- exists_p1 p2* alpha, and the same for forall.
inline VerificationReport check_beck_chevalley(const ArrowAlgebra& A, const PullbackSquare& sq, std::uint64_t seed = 0,
                                               std::string subject = {}) {
  VerificationReport r(std::move(subject));
  std::optional<Verdict> ef, af;
  for (const auto& alpha : predicate_family(A, sq.h.dom, seed)) {
    Predicate pulled = reindex(sq.p2, alpha);
    if (!ef && !equivalent(A, reindex(sq.k, exists_along(A, sq.h, alpha)), exists_along(A, sq.p1, pulled)))
      ef = Verdict::fail("tripos.beck-chevalley-exists", {detail::show(sq.k), detail::show(sq.h), detail::show(A, alpha)},
                         "k* exists_h alpha is not isomorphic to exists_p1 p2* alpha");
    if (!af && !equivalent(A, reindex(sq.k, forall_along(A, sq.h, alpha)), forall_along(A, sq.p1, pulled)))
      af = Verdict::fail("tripos.beck-chevalley-forall", {detail::show(sq.k), detail::show(sq.h), detail::show(A, alpha)},
                         "k* forall_h alpha is not isomorphic to forall_p1 p2* alpha");
    if (ef && af) break;
  }
  r.add(ef.value_or(Verdict::pass("tripos.beck-chevalley-exists")));
  r.add(af.value_or(Verdict::pass("tripos.beck-chevalley-forall")));
  return r;
}

/// Every predicate phi : I -> A equals phi*(id_A), the identity predicate
/// reindexed along phi seen as a map I -> A.
inline VerificationReport generic_element_check(const ArrowAlgebra& A, std::size_t max_index = 3, std::uint64_t seed = 0,
                                                std::string subject = {}) {
  VerificationReport r(std::move(subject));
  Predicate id;
  for (Elem a : A.elements()) id.push_back(a);
  for (std::size_t I = 0; I <= max_index; ++I)
    for (const auto& phi : predicate_family(A, I, seed + I)) {
      std::vector<std::size_t> m;
      for (Elem e : phi) m.push_back(e.index);
      if (reindex(FinMap(A.size(), std::move(m)), id) != phi) {
        r.add(Verdict::fail("tripos.generic-element", {detail::show(A, phi)}, "phi differs from phi*(id)"));
        return r;
      }
    }
  r.add(Verdict::pass("tripos.generic-element"));
  return r;
}

/// Postcomposition with an implicative morphism, as a map on predicates.
inline std::function<Predicate(const Predicate&)> induced_transformation(const MorphismTable& f) {
  return [f](const Predicate& phi) { return pointwise(phi, [&](Elem a) { return f(a); }); };
}

/// Evaluates a predicate transformation at the identity predicate on the
/// source carrier.
inline MorphismTable recover_morphism(const ArrowAlgebra& A, const ArrowAlgebra& B,
                                      const std::function<Predicate(const Predicate&)>& phi) {
  Predicate id;
  for (Elem a : A.elements()) id.push_back(a);
  Predicate out = phi(id);
  if (out.size() != A.size()) throw InputError("transformation changed the index set");
  return MorphismTable(A, B, std::move(out));
}

/// Postcomposition is monotone in |-_I, preserves top and binary meets up to
/// isomorphism, and evaluating it at the identity gives back f.
inline VerificationReport check_induced_transformation(const MorphismTable& f, std::size_t I, std::uint64_t seed = 0,
                                                       std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source(), &B = f.target();
  auto T = induced_transformation(f);
  auto preds = predicate_family(A, I, seed, 512, 32);
  std::optional<Verdict> mono, cart;
  for (const auto& p : preds)
    for (const auto& q : preds) {
      if (!mono && entails(A, p, q) && !entails(B, T(p), T(q)))
        mono = Verdict::fail("tripos.induced-monotone", {detail::show(A, p), detail::show(A, q)},
                             "entailment is not preserved by postcomposition");
      if (!cart) {
        Predicate lhs = T(pointwise(p, q, [&](Elem a, Elem b) { return logical_meet(A, a, b); }));
        Predicate rhs = pointwise(T(p), T(q), [&](Elem a, Elem b) { return logical_meet(B, a, b); });
        if (!equivalent(B, lhs, rhs))
          cart = Verdict::fail("tripos.induced-cartesian", {detail::show(A, p), detail::show(A, q)},
                               "binary meet is not preserved up to isomorphism");
      }
    }
  if (!cart && !equivalent(B, T(Predicate(I, A.top())), Predicate(I, B.top())))
    cart = Verdict::fail("tripos.induced-cartesian", {}, "top is not preserved up to isomorphism");
  r.add(mono.value_or(Verdict::pass("tripos.induced-monotone")));
  r.add(cart.value_or(Verdict::pass("tripos.induced-cartesian")));
  if (recover_morphism(A, B, T).table() == f.table())
    r.add(Verdict::pass("tripos.recover-morphism"));
  else
    r.add(Verdict::fail("tripos.recover-morphism", {}, "round trip changed the table"));
  return r;
}

/// Q_j(I) = {alpha | j alpha |-_I alpha} within the predicate family.
inline std::vector<Predicate> subtripos_qj(const MorphismTable& j, std::size_t I, std::uint64_t seed = 0) {
  const auto& A = j.source();
  std::vector<Predicate> out;
  for (const auto& a : predicate_family(A, I, seed)) {
    Predicate ja = pointwise(a, [&](Elem x) { return j(x); });
    if (entails(A, ja, a)) out.push_back(a);
  }
  return out;
}

/// The fixed-predicate presentation of the quotient tripos: j after - and
/// the identity are mutually inverse up to isomorphism, and j after - is left
/// adjoint to the inclusion j after - of Q_j(I) into P_A(I).
inline VerificationReport check_subtripos(const MorphismTable& j, std::size_t I, std::uint64_t seed = 0,
                                          std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto& A = j.source();
  ArrowAlgebra Q = quotient(j);
  auto J = [&](const Predicate& p) { return pointwise(p, [&](Elem x) { return j(x); }); };
  auto all = predicate_family(A, I, seed);
  auto fixed = subtripos_qj(j, I, seed);
  for (const auto& a : all)
    if (!equivalent(Q, J(a), a)) {
      r.add(Verdict::fail("tripos.subtripos-equivalence", {detail::show(A, a)},
                          "j alpha is not isomorphic to alpha in the quotient"));
      return r;
    }
  for (const auto& a : fixed)
    if (!equivalent(A, J(a), a)) {
      r.add(Verdict::fail("tripos.subtripos-equivalence", {detail::show(A, a)},
                          "fixed predicate is not isomorphic to its closure"));
      return r;
    }
  for (const auto& a : all)
    for (const auto& b : fixed)
      if (entails(A, J(a), b) != entails(A, a, J(b))) {
        r.add(Verdict::fail("tripos.subtripos-equivalence", {detail::show(A, a), detail::show(A, b)},
                            "closure is not left adjoint to the inclusion"));
        return r;
      }
  r.add(Verdict::pass("tripos.subtripos-equivalence", {}, std::to_string(fixed.size()) + " fixed predicates"));
  return r;
}

}  // namespace arrowlab

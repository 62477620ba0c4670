#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/elem.hpp"
#include "arrowlab/lattice.hpp"
#include "arrowlab/report.hpp"

namespace arrowlab {

/// Finite arrow structure plus a candidate separator. Construction validates
/// the lattice, the table dimensions and the variance law; whether the
/// separator is a genuine separator is decided by `verify_algebra`.
///
/// Immutable after construction. Derived values (combinators, the shift
/// table, the application table, flags) are computed once on first use and
/// shared between copies.
class ArrowAlgebra {
 public:
  /// `imp` is row-major: imp[a * n + b] = a -> b.
  ArrowAlgebra(FiniteLattice lattice, std::vector<Elem> imp, std::vector<std::uint8_t> separator) {
    auto d = std::make_shared<Data>(std::move(lattice));
    const std::size_t n = d->lat.size();
    if (imp.size() != n * n) throw InputError("implication table has wrong dimensions");
    if (separator.size() != n) throw InputError("separator membership table has wrong dimensions");
    for (Elem e : imp)
      if (e.index >= n) throw InputError("implication table entry out of range");
    d->imp = std::move(imp);
    d->sep = std::move(separator);
    check_variance(*d);
    data_ = std::move(d);
  }

  /// Same carrier, order and implication; different separator.
  ArrowAlgebra with_separator(std::vector<std::uint8_t> separator) const {
    return ArrowAlgebra(data_->lat, data_->imp, std::move(separator));
  }

  /// Heyting implication a -> b = join{c | c meet a <= b} on a finite
  /// distributive lattice. Throws StructureError when the lattice is not
  /// distributive (the candidate fails to be a relative pseudocomplement).
  static std::vector<Elem> heyting_implication(const FiniteLattice& lat) {
    const std::size_t n = lat.size();
    std::vector<Elem> imp(n * n);
    for (Elem a : lat.elements())
      for (Elem b : lat.elements()) {
        Elem h = lat.bottom();
        for (Elem c : lat.elements())
          if (lat.leq(lat.meet(c, a), b)) h = lat.join(h, c);
        if (!lat.leq(lat.meet(h, a), b))
          throw StructureError("lattice is not distributive, so it is not a frame",
                               {lat.name(a), lat.name(b)});
        imp[a.index * n + b.index] = h;
      }
    return imp;
  }

  /// Frame seen as an arrow algebra: Heyting implication, separator {top}.
  static ArrowAlgebra frame(const FiniteLattice& lat) {
    std::vector<std::uint8_t> sep(lat.size(), 0);
    sep[lat.top().index] = 1;
    return ArrowAlgebra(lat, heyting_implication(lat), std::move(sep));
  }

  /// Frame with an arbitrary upward-closed separator (a filter).
  static ArrowAlgebra frame(const FiniteLattice& lat, const std::vector<std::uint8_t>& separator) {
    return ArrowAlgebra(lat, heyting_implication(lat), separator);
  }

  const FiniteLattice& lattice() const { return data_->lat; }
  std::size_t size() const { return data_->lat.size(); }
  ElemRange elements() const { return data_->lat.elements(); }

  bool leq(Elem a, Elem b) const { return data_->lat.leq(a, b); }
  Elem meet(Elem a, Elem b) const { return data_->lat.meet(a, b); }
  Elem join(Elem a, Elem b) const { return data_->lat.join(a, b); }
  Elem top() const { return data_->lat.top(); }
  Elem bottom() const { return data_->lat.bottom(); }
  Elem imp(Elem a, Elem b) const { return data_->imp[a.index * size() + b.index]; }
  bool in_sep(Elem a) const { return data_->sep[a.index] != 0; }

  const std::string& name(Elem a) const { return data_->lat.name(a); }
  Elem at(std::string_view n) const { return data_->lat.at(n); }

  const std::vector<Elem>& imp_table() const { return data_->imp; }
  const std::vector<std::uint8_t>& separator() const { return data_->sep; }
  std::vector<Elem> separator_elements() const {
    std::vector<Elem> out;
    for (Elem a : elements())
      if (in_sep(a)) out.push_back(a);
    return out;
  }

  /// Names of `xs`, for report witnesses.
  std::vector<std::string> names(std::initializer_list<Elem> xs) const {
    std::vector<std::string> out;
    for (Elem x : xs) out.push_back(name(x));
    return out;
  }

  /// a -> b -> c.
  Elem imp(Elem a, Elem b, Elem c) const { return imp(a, imp(b, c)); }

  Elem k() const { return cache().k; }
  Elem s() const { return cache().s; }
  Elem a() const { return cache().a; }
  Elem i() const { return cache().i; }
  Elem b() const { return cache().b; }
  /// Shift: top -> a.
  Elem shift(Elem a) const { return cache().shift[a.index]; }
  Elem apply(Elem a, Elem b) const { return apply_table()[a.index * size() + b.index]; }

  bool compatible_with_joins() const { return cache().joins; }
  bool binary_implicative() const { return cache().binary; }
  bool modifiable() const { return cache().binary && cache().bottom_imp_top; }

  bool same_as(const ArrowAlgebra& other) const {
    if (data_ == other.data_) return true;
    return data_->lat.same_as(other.data_->lat) && data_->imp == other.data_->imp &&
           data_->sep == other.data_->sep;
  }

 private:
  struct Cache {
    Elem k, s, a, i, b;
    std::vector<Elem> shift;
    bool joins = false, binary = false, bottom_imp_top = false;
  };
  struct Data {
    explicit Data(FiniteLattice l) : lat(std::move(l)) {}
    FiniteLattice lat;
    std::vector<Elem> imp;
    std::vector<std::uint8_t> sep;
    mutable std::once_flag cache_once, apply_once;
    mutable Cache cache;
    mutable std::vector<Elem> apply;
  };

  static void check_variance(const Data& d) {
    const auto& L = d.lat;
    const std::size_t n = L.size();
    auto im = [&](Elem a, Elem b) { return d.imp[a.index * n + b.index]; };
    // Monotone in the second argument and antitone in the first on covers
    // implies the full law by transitivity; checking all pairs is still cheap.
    for (Elem a : L.elements())
      for (Elem b : L.elements())
        for (Elem x : L.elements()) {
          if (L.leq(a, b) && !L.leq(im(x, a), im(x, b)))
            throw StructureError("implication is not monotone in its second argument",
                                 {L.name(x), L.name(a), L.name(b)});
          if (L.leq(a, b) && !L.leq(im(b, x), im(a, x)))
            throw StructureError("implication is not antitone in its first argument",
                                 {L.name(a), L.name(b), L.name(x)});
        }
  }

  const Cache& cache() const;
  const std::vector<Elem>& apply_table() const;

  std::shared_ptr<const Data> data_;
};

namespace detail {

inline Elem compute_k(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) m = A.meet(m, A.imp(a, b, a));
  return m;
}

inline Elem compute_s(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) {
      Elem ab = A.imp(a, b);
      for (Elem c : A.elements())
        m = A.meet(m, A.imp(A.imp(a, b, c), A.imp(ab, A.imp(a, c))));
    }
  return m;
}

/// For fixed `a`, the smallest term u_X -> a -> v_X over X ⊆ A x A is reached
/// at some X = Z_t = {(b,c) | t <= a -> b -> c}: any X is contained in
/// Z_{u_X}, which has a larger u and a smaller v. So only |A| candidate
/// subsets per `a` need to be evaluated.
inline Elem compute_a(const ArrowAlgebra& A) {
  const std::size_t n = A.size();
  Elem m = A.top();
  std::vector<Elem> by_value(n);
  std::vector<std::uint8_t> present(n);
  for (Elem a : A.elements()) {
    std::fill(by_value.begin(), by_value.end(), A.top());
    std::fill(present.begin(), present.end(), 0);
    for (Elem b : A.elements())
      for (Elem c : A.elements()) {
        Elem bc = A.imp(b, c);
        Elem w = A.imp(a, bc);
        by_value[w.index] = A.meet(by_value[w.index], bc);
        present[w.index] = 1;
      }
    for (Elem t : A.elements()) {
      Elem u = A.top(), v = A.top();
      for (Elem x : A.elements())
        if (present[x.index] && A.leq(t, x)) {
          u = A.meet(u, x);
          v = A.meet(v, by_value[x.index]);
        }
      m = A.meet(m, A.imp(u, A.imp(a, v)));
    }
  }
  return m;
}

inline Elem compute_i(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements()) m = A.meet(m, A.imp(a, a));
  return m;
}

inline Elem compute_b(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) {
      Elem ab = A.imp(a, b);
      for (Elem c : A.elements()) m = A.meet(m, A.imp(A.imp(b, c), A.imp(ab, A.imp(a, c))));
    }
  return m;
}

}  // namespace detail

inline const ArrowAlgebra::Cache& ArrowAlgebra::cache() const {
  std::call_once(data_->cache_once, [this] {
    Cache& c = data_->cache;
    c.k = detail::compute_k(*this);
    c.s = detail::compute_s(*this);
    c.a = detail::compute_a(*this);
    c.i = detail::compute_i(*this);
    c.b = detail::compute_b(*this);
    c.shift.resize(size());
    for (Elem x : elements()) c.shift[x.index] = imp(top(), x);
    // Finite join compatibility reduces to the empty join and binary joins.
    c.joins = true;
    for (Elem x : elements()) {
      if (imp(bottom(), x) != top()) c.joins = false;
      for (Elem y : elements())
        for (Elem z : elements())
          if (imp(join(y, z), x) != meet(imp(y, x), imp(z, x))) c.joins = false;
    }
    c.bottom_imp_top = true;
    for (Elem x : elements())
      if (imp(bottom(), x) != top()) c.bottom_imp_top = false;
    c.binary = true;
    for (Elem x : elements())
      for (Elem y : elements())
        for (Elem z : elements())
          if (imp(x, meet(y, z)) != meet(imp(x, y), imp(x, z))) c.binary = false;
  });
  return data_->cache;
}

/// ab = meet{c -> d | a <= b -> c -> d}. Only the value w = c -> d matters,
/// so the meet ranges over the image of the implication table.
inline const std::vector<Elem>& ArrowAlgebra::apply_table() const {
  std::call_once(data_->apply_once, [this] {
    const std::size_t n = size();
    std::vector<std::uint8_t> in_image(n, 0);
    for (Elem w : data_->imp) in_image[w.index] = 1;
    std::vector<Elem> image;
    for (Elem w : elements())
      if (in_image[w.index]) image.push_back(w);
    auto& t = data_->apply;
    t.assign(n * n, top());
    for (Elem a : elements())
      for (Elem b : elements()) {
        Elem m = top();
        for (Elem w : image)
          if (leq(a, imp(b, w))) m = meet(m, w);
        t[a.index * n + b.index] = m;
      }
  });
  return data_->apply;
}

inline Elem combinator_k(const ArrowAlgebra& A) { return A.k(); }
inline Elem combinator_s(const ArrowAlgebra& A) { return A.s(); }
inline Elem combinator_a(const ArrowAlgebra& A) { return A.a(); }
inline Elem combinator_i(const ArrowAlgebra& A) { return A.i(); }
inline Elem combinator_b(const ArrowAlgebra& A) { return A.b(); }

/// The a combinator by reachable-pair fixpoint: for fixed a, the pairs
/// (meet of a -> b -> c, meet of b -> c) over subsets X ⊆ A x A are the
/// closure of (top, top) under componentwise meet with the generators.
inline Elem combinator_a_fixpoint(const ArrowAlgebra& A) {
  const std::size_t n = A.size();
  Elem m = A.top();
  std::vector<std::uint8_t> seen(n * n);
  for (Elem a : A.elements()) {
    std::vector<std::pair<Elem, Elem>> gens;
    for (Elem b : A.elements())
      for (Elem c : A.elements()) gens.emplace_back(A.imp(a, b, c), A.imp(b, c));
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::pair<Elem, Elem>> frontier{{A.top(), A.top()}};
    seen[A.top().index * n + A.top().index] = 1;
    while (!frontier.empty()) {
      auto [u, v] = frontier.back();
      frontier.pop_back();
      m = A.meet(m, A.imp(u, A.imp(a, v)));
      for (auto [gu, gv] : gens) {
        Elem nu = A.meet(u, gu), nv = A.meet(v, gv);
        auto& s = seen[nu.index * n + nv.index];
        if (!s) {
          s = 1;
          frontier.emplace_back(nu, nv);
        }
      }
    }
  }
  return m;
}

inline Elem apply(const ArrowAlgebra& A, Elem a, Elem b) { return A.apply(a, b); }

/// Abstraction of a total function given as a table: meet of x -> shift(f(x)).
inline Elem abstract(const ArrowAlgebra& A, std::span<const Elem> f) {
  if (f.size() != A.size()) throw InputError("abstraction needs a total table on the carrier");
  Elem m = A.top();
  for (Elem x : A.elements()) m = A.meet(m, A.imp(x, A.shift(f[x.index])));
  return m;
}

template <class F>
  requires std::invocable<F, Elem>
inline Elem abstract(const ArrowAlgebra& A, F&& f) {
  Elem m = A.top();
  for (Elem x : A.elements()) m = A.meet(m, A.imp(x, A.shift(f(x))));
  return m;
}

inline Elem partial_shift(const ArrowAlgebra& A, Elem a) { return A.shift(a); }

/// a |- b iff a -> b lies in the separator.
inline bool logical_leq(const ArrowAlgebra& A, Elem a, Elem b) { return A.in_sep(A.imp(a, b)); }
inline bool logical_equiv(const ArrowAlgebra& A, Elem a, Elem b) {
  return logical_leq(A, a, b) && logical_leq(A, b, a);
}

/// a x b = meet over z of z -> shift(z (shift a) (shift b)).
inline Elem logical_meet(const ArrowAlgebra& A, Elem a, Elem b) {
  Elem sa = A.shift(a), sb = A.shift(b);
  Elem m = A.top();
  for (Elem z : A.elements()) m = A.meet(m, A.imp(z, A.shift(A.apply(A.apply(z, sa), sb))));
  return m;
}

/// a + b = meet over c of (a -> shift c) -> (b -> shift c) -> shift c.
inline Elem logical_join(const ArrowAlgebra& A, Elem a, Elem b) {
  Elem m = A.top();
  for (Elem c : A.elements()) {
    Elem sc = A.shift(c);
    m = A.meet(m, A.imp(A.imp(a, sc), A.imp(A.imp(b, sc), sc)));
  }
  return m;
}

inline bool is_compatible_with_joins(const ArrowAlgebra& A) { return A.compatible_with_joins(); }
inline bool is_trivial(const ArrowAlgebra& A) { return A.in_sep(A.bottom()); }
inline bool is_binary_implicative(const ArrowAlgebra& A) { return A.binary_implicative(); }
inline bool is_modifiable(const ArrowAlgebra& A) { return A.modifiable(); }

/// Frame-derived: distributive lattice, Heyting implication, separator {top}.
inline bool is_frame_derived(const ArrowAlgebra& A) {
  for (Elem x : A.elements())
    if (A.in_sep(x) != (x == A.top())) return false;
  try {
    return ArrowAlgebra::heyting_implication(A.lattice()) == A.imp_table();
  } catch (const StructureError&) {
    return false;
  }
}

/// Witness of the first violated binary-implicativity equation, if any.
inline std::optional<std::vector<std::string>> binary_implicative_violation(const ArrowAlgebra& A) {
  for (Elem x : A.elements())
    for (Elem y : A.elements())
      for (Elem z : A.elements())
        if (A.imp(x, A.meet(y, z)) != A.meet(A.imp(x, y), A.imp(x, z))) return A.names({x, y, z});
  return std::nullopt;
}

/// Separator clauses, stopping at the first violated one. On pass the report
/// also asserts that i and b are separated.
inline VerificationReport verify_algebra(const ArrowAlgebra& A, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  r.add(Verdict::pass("arrow.variance"));
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (A.in_sep(a) && A.leq(a, b) && !A.in_sep(b)) {
        r.add(Verdict::fail("separator.upward-closed", A.names({a, b}),
                            A.name(a) + " is separated and below " + A.name(b) + ", which is not"));
        return r;
      }
  r.add(Verdict::pass("separator.upward-closed"));
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      if (A.in_sep(a) && A.in_sep(A.imp(a, b)) && !A.in_sep(b)) {
        r.add(Verdict::fail("separator.modus-ponens", A.names({a, b}),
                            A.name(a) + " and " + A.name(a) + " -> " + A.name(b) + " are separated but " +
                                A.name(b) + " is not"));
        return r;
      }
  r.add(Verdict::pass("separator.modus-ponens"));
  const std::pair<const char*, Elem> combinators[] = {
      {"separator.contains-k", A.k()}, {"separator.contains-s", A.s()}, {"separator.contains-a", A.a()}};
  for (auto [law, c] : combinators) {
    if (!A.in_sep(c)) {
      r.add(Verdict::fail(law, {A.name(c)}, "combinator value " + A.name(c) + " is not separated"));
      return r;
    }
    r.add(Verdict::pass(law, {A.name(c)}));
  }
  for (auto [law, c] : {std::pair<const char*, Elem>{"separator.contains-i", A.i()},
                        std::pair<const char*, Elem>{"separator.contains-b", A.b()}}) {
    if (A.in_sep(c))
      r.add(Verdict::pass(law, {A.name(c)}));
    else
      r.add(Verdict::fail(law, {A.name(c)}, "derived combinator " + A.name(c) + " is not separated"));
  }
  return r;
}

/// Throws LawViolation unless `verify_algebra` passes; used by constructions
/// that assert their output.
inline const ArrowAlgebra& require_algebra(const ArrowAlgebra& A, const std::string& what) {
  auto r = verify_algebra(A, what);
  if (!r.passed()) {
    const Verdict* v = r.first_failure();
    throw LawViolation(what + ": " + v->law + ": " + v->detail);
  }
  return A;
}

/// meet over a of (top -> a) -> a is separated.
inline VerificationReport check_shift_counit(const ArrowAlgebra& A, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  Elem m = A.top();
  for (Elem a : A.elements()) m = A.meet(m, A.imp(A.shift(a), a));
  if (A.in_sep(m))
    r.add(Verdict::pass("algebra.shift-counit", {A.name(m)}));
  else
    r.add(Verdict::fail("algebra.shift-counit", {A.name(m)}, "meet of (top -> a) -> a is not separated"));
  return r;
}

/// The logical order is a bounded preorder in which x is a meet, + a join
/// and -> the Heyting implication. Exhaustive over the carrier.
inline VerificationReport check_heyting_prealgebra(const ArrowAlgebra& A, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const std::size_t n = A.size();
  std::vector<std::uint8_t> le(n * n);
  std::vector<Elem> prod(n * n), sum(n * n);
  for (Elem a : A.elements())
    for (Elem b : A.elements()) {
      le[a.index * n + b.index] = logical_leq(A, a, b);
      prod[a.index * n + b.index] = logical_meet(A, a, b);
      sum[a.index * n + b.index] = logical_join(A, a, b);
    }
  auto L = [&](Elem a, Elem b) { return le[a.index * n + b.index] != 0; };
  auto P = [&](Elem a, Elem b) { return prod[a.index * n + b.index]; };
  auto J = [&](Elem a, Elem b) { return sum[a.index * n + b.index]; };
  auto fail = [&](std::initializer_list<Elem> w, std::string what) {
    r.add(Verdict::fail("logic.heyting-prealgebra", A.names(w), std::move(what)));
    return r;
  };
  for (Elem a : A.elements()) {
    if (!L(a, a)) return fail({a}, "logical order is not reflexive");
    if (!L(A.bottom(), a) || !L(a, A.top())) return fail({a}, "bottom or top is not a logical bound");
    for (Elem b : A.elements()) {
      if (!L(P(a, b), a) || !L(P(a, b), b)) return fail({a, b}, "a x b is not below both factors");
      if (!L(a, J(a, b)) || !L(b, J(a, b))) return fail({a, b}, "a + b is not above both summands");
      for (Elem c : A.elements()) {
        if (L(a, b) && L(b, c) && !L(a, c)) return fail({a, b, c}, "logical order is not transitive");
        if (L(c, a) && L(c, b) && !L(c, P(a, b))) return fail({a, b, c}, "a x b is not the greatest lower bound");
        if (L(a, c) && L(b, c) && !L(J(a, b), c)) return fail({a, b, c}, "a + b is not the least upper bound");
        if (L(P(c, a), b) != L(c, A.imp(a, b))) return fail({c, a, b}, "c x a |- b disagrees with c |- a -> b");
      }
    }
  }
  r.add(Verdict::pass("logic.heyting-prealgebra"));
  return r;
}

/// Meet of the separator, a compact certificate for "all of S".
inline Elem meet_of_separator(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem x : A.elements())
    if (A.in_sep(x)) m = A.meet(m, x);
  return m;
}

}  // namespace arrowlab

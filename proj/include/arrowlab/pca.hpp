#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"
#include "arrowlab/morphism.hpp"

namespace arrowlab {

/// Finite partial order given by a row-major leq matrix.
class FinitePoset {
 public:
  FinitePoset(std::vector<std::string> names, std::vector<std::uint8_t> leq) : FinitePoset(std::move(names), std::move(leq), true) {}

  /// Discrete order on the given names.
  static FinitePoset discrete(std::vector<std::string> names) {
    const std::size_t n = names.size();
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    return FinitePoset(std::move(names), std::move(leq), false);
  }

  /// Inclusion order on bitmasks; trusted, no validation.
  static FinitePoset of_sets(std::vector<std::string> names, const std::vector<std::uint64_t>& sets) {
    const std::size_t n = sets.size();
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) leq[a * n + b] = (sets[a] & ~sets[b]) == 0;
    return FinitePoset(std::move(names), std::move(leq), false);
  }

  std::size_t size() const { return names_.size(); }
  ElemRange elements() const { return ElemRange(size()); }
  bool leq(Elem a, Elem b) const { return leq_[a.index * size() + b.index] != 0; }
  const std::string& name(Elem a) const { return names_.at(a.index); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::uint8_t>& leq_table() const { return leq_; }
  Elem at(const std::string& n) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return Elem{i};
    throw InputError("unknown element '" + n + "'");
  }

 private:
  FinitePoset(std::vector<std::string> names, std::vector<std::uint8_t> leq, bool validate)
      : names_(std::move(names)), leq_(std::move(leq)) {
    const std::size_t n = names_.size();
    if (n == 0) throw InputError("empty carrier");
    if (leq_.size() != n * n) throw InputError("order table must be size x size");
    if (!validate) return;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (names_[i] == names_[j]) throw InputError("duplicate element name '" + names_[i] + "'");
    for (std::size_t a = 0; a < n; ++a) {
      if (!leq_[a * n + a]) throw StructureError("order is not reflexive", {names_[a]});
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && leq_[a * n + b] && leq_[b * n + a])
          throw StructureError("order is not antisymmetric", {names_[a], names_[b]});
        if (!leq_[a * n + b]) continue;
        for (std::size_t c = 0; c < n; ++c)
          if (leq_[b * n + c] && !leq_[a * n + c])
            throw StructureError("order is not transitive", {names_[a], names_[b], names_[c]});
      }
    }
  }

  std::vector<std::string> names_;
  std::vector<std::uint8_t> leq_;
};

/// Partial applicative poset: a finite poset with a partial application table.
class FinitePAP {
 public:
  FinitePAP(FinitePoset order, std::vector<std::optional<Elem>> app) : order_(std::move(order)), app_(std::move(app)) {
    if (app_.size() != order_.size() * order_.size()) throw InputError("application table must be size x size");
    for (const auto& e : app_)
      if (e && e->index >= order_.size()) throw InputError("application entry out of range");
  }

  const FinitePoset& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  ElemRange elements() const { return order_.elements(); }
  bool leq(Elem a, Elem b) const { return order_.leq(a, b); }
  const std::string& name(Elem a) const { return order_.name(a); }
  std::optional<Elem> apply(Elem a, Elem b) const { return app_[a.index * size() + b.index]; }
  std::optional<Elem> apply(std::optional<Elem> a, std::optional<Elem> b) const {
    if (!a || !b) return std::nullopt;
    return apply(*a, *b);
  }
  const std::vector<std::optional<Elem>>& app_table() const { return app_; }

 private:
  FinitePoset order_;
  std::vector<std::optional<Elem>> app_;
};

/// Kleene inequality e <~ e': if e' is defined then e is defined and e <= e'.
inline bool kleene_leq(const FinitePAP& P, std::optional<Elem> e, std::optional<Elem> e_bound) {
  if (!e_bound) return true;
  return e && P.leq(*e, *e_bound);
}

/// A finite PAP with a filter and designated k, s witnesses. The
/// constructor checks shapes only; verify_pca checks the axioms.
class FinitePCA {
 public:
  FinitePCA(FinitePAP pap, std::vector<std::uint8_t> filter, Elem k, Elem s)
      : d_(std::make_shared<Data>(Data{std::move(pap), std::move(filter), k, s})) {
    if (d_->filter.size() != d_->pap.size()) throw InputError("filter must have one flag per element");
    if (k.index >= size() || s.index >= size()) throw InputError("k or s witness out of range");
  }

  const FinitePAP& pap() const { return d_->pap; }
  std::size_t size() const { return d_->pap.size(); }
  ElemRange elements() const { return d_->pap.elements(); }
  bool leq(Elem a, Elem b) const { return d_->pap.leq(a, b); }
  const std::string& name(Elem a) const { return d_->pap.name(a); }
  Elem at(const std::string& n) const { return d_->pap.order().at(n); }
  std::optional<Elem> apply(Elem a, Elem b) const { return d_->pap.apply(a, b); }
  std::optional<Elem> apply(std::optional<Elem> a, std::optional<Elem> b) const { return d_->pap.apply(a, b); }
  bool in_filter(Elem a) const { return d_->filter[a.index] != 0; }
  const std::vector<std::uint8_t>& filter() const { return d_->filter; }
  std::vector<Elem> filter_elements() const {
    std::vector<Elem> out;
    for (Elem a : elements())
      if (in_filter(a)) out.push_back(a);
    return out;
  }
  Elem k() const { return d_->k; }
  Elem s() const { return d_->s; }

 private:
  struct Data {
    FinitePAP pap;
    std::vector<std::uint8_t> filter;
    Elem k, s;
  };
  std::shared_ptr<const Data> d_;
};

namespace detail {

inline bool valid_k(const FinitePAP& P, Elem k) {
  for (Elem a : P.elements())
    for (Elem b : P.elements()) {
      auto r = P.apply(P.apply(k, a), b);
      if (!r || !P.leq(*r, a)) return false;
    }
  return true;
}

inline std::optional<std::vector<std::string>> s_violation(const FinitePAP& P, Elem s) {
  for (Elem a : P.elements()) {
    auto sa = P.apply(s, a);
    for (Elem b : P.elements()) {
      auto sab = P.apply(sa, b);
      if (!sab) return std::vector<std::string>{P.name(a), P.name(b)};
      for (Elem c : P.elements()) {
        auto rhs = P.apply(P.apply(a, c), P.apply(b, c));
        if (!kleene_leq(P, P.apply(sab, c), rhs)) return std::vector<std::string>{P.name(a), P.name(b), P.name(c)};
      }
    }
  }
  return std::nullopt;
}

inline bool valid_s(const FinitePAP& P, Elem s) { return !s_violation(P, s); }

}  // namespace detail

/// Monotonicity of a partial applicative poset. Checking one argument at a
/// time is enough: a b <~ a' b <~ a' b'.
inline VerificationReport check_pap(const FinitePAP& P, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  for (Elem a : P.elements())
    for (Elem b : P.elements())
      for (Elem x : P.elements()) {
        if (P.leq(a, x) && !kleene_leq(P, P.apply(a, b), P.apply(x, b))) {
          r.add(Verdict::fail("pca.applicative-poset", {P.name(a), P.name(x), P.name(b)},
                              "application is not monotone in its first argument"));
          return r;
        }
        if (P.leq(b, x) && !kleene_leq(P, P.apply(a, b), P.apply(a, x))) {
          r.add(Verdict::fail("pca.applicative-poset", {P.name(a), P.name(b), P.name(x)},
                              "application is not monotone in its second argument"));
          return r;
        }
      }
  r.add(Verdict::pass("pca.applicative-poset"));
  return r;
}

inline VerificationReport check_filter(const FinitePAP& P, const std::vector<std::uint8_t>& filter,
                                       std::string subject = {}) {
  VerificationReport r(std::move(subject));
  if (filter.size() != P.size()) throw InputError("filter must have one flag per element");
  for (Elem a : P.elements()) {
    if (!filter[a.index]) continue;
    for (Elem b : P.elements()) {
      if (P.leq(a, b) && !filter[b.index]) {
        r.add(Verdict::fail("pca.filter", {P.name(a), P.name(b)}, "filter is not upward closed"));
        return r;
      }
      auto ab = P.apply(a, b);
      if (filter[b.index] && ab && !filter[ab->index]) {
        r.add(Verdict::fail("pca.filter", {P.name(a), P.name(b)}, "filter is not closed under application"));
        return r;
      }
    }
  }
  r.add(Verdict::pass("pca.filter"));
  return r;
}

inline VerificationReport verify_pca(const FinitePCA& P, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto& pap = P.pap();
  r.merge(check_pap(pap));
  r.merge(check_filter(pap, P.filter()));
  if (!P.in_filter(P.k()))
    r.add(Verdict::fail("pca.k", {P.name(P.k())}, "k is not in the filter"));
  else if (!detail::valid_k(pap, P.k()))
    r.add(Verdict::fail("pca.k", {P.name(P.k())}, "k a b is undefined or not below a"));
  else
    r.add(Verdict::pass("pca.k", {P.name(P.k())}));
  if (!P.in_filter(P.s()))
    r.add(Verdict::fail("pca.s", {P.name(P.s())}, "s is not in the filter"));
  else if (auto w = detail::s_violation(pap, P.s()))
    r.add(Verdict::fail("pca.s", *w, "s clause fails"));
  else
    r.add(Verdict::pass("pca.s", {P.name(P.s())}));
  return r;
}

inline const FinitePCA& require_pca(const FinitePCA& P, const std::string& what) {
  auto r = verify_pca(P);
  if (const Verdict* v = r.first_failure()) throw LawViolation(what + " fails " + v->law + ": " + v->detail);
  return P;
}

/// Smallest-index filter elements satisfying the k clause and the s clause,
/// each searched independently.
inline std::optional<std::pair<Elem, Elem>> find_ks(const FinitePAP& P, const std::vector<std::uint8_t>& filter) {
  if (filter.size() != P.size()) throw InputError("filter must have one flag per element");
  std::optional<Elem> k, s;
  for (Elem a : P.elements())
    if (filter[a.index] && detail::valid_k(P, a)) {
      k = a;
      break;
    }
  if (!k) return std::nullopt;
  for (Elem a : P.elements())
    if (filter[a.index] && detail::valid_s(P, a)) {
      s = a;
      break;
    }
  if (!s) return std::nullopt;
  return std::make_pair(*k, *s);
}

/// Variables, constants and application.
class PcaTerm {
 public:
  static PcaTerm var(std::string name) { return PcaTerm(std::make_shared<Node>(Node{Kind::var, std::move(name), {}, {}, {}})); }
  static PcaTerm constant(Elem e) { return PcaTerm(std::make_shared<Node>(Node{Kind::constant, {}, e, {}, {}})); }
  static PcaTerm app(PcaTerm f, PcaTerm a) {
    return PcaTerm(std::make_shared<Node>(Node{Kind::app, {}, {}, std::move(f.n_), std::move(a.n_)}));
  }
  PcaTerm operator()(PcaTerm a) const { return app(*this, std::move(a)); }

  bool is_var() const { return n_->kind == Kind::var; }
  bool is_constant() const { return n_->kind == Kind::constant; }
  bool is_app() const { return n_->kind == Kind::app; }
  const std::string& var_name() const { return n_->name; }
  Elem value() const { return n_->value; }
  PcaTerm fun() const { return PcaTerm(n_->fun); }
  PcaTerm arg() const { return PcaTerm(n_->arg); }

  bool mentions(const std::string& x) const {
    if (is_var()) return var_name() == x;
    if (is_app()) return fun().mentions(x) || arg().mentions(x);
    return false;
  }
  void constants(std::vector<Elem>& out) const {
    if (is_constant()) out.push_back(value());
    if (is_app()) {
      fun().constants(out);
      arg().constants(out);
    }
  }
  std::string to_string(const FinitePCA& P) const {
    if (is_var()) return var_name();
    if (is_constant()) return P.name(value());
    std::string a = arg().to_string(P);
    if (arg().is_app()) a = "(" + a + ")";
    return fun().to_string(P) + " " + a;
  }

 private:
  enum class Kind { var, constant, app };
  struct Node {
    Kind kind;
    std::string name;
    Elem value;
    std::shared_ptr<const Node> fun, arg;
  };
  explicit PcaTerm(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

/// Strict evaluation; undefined sub-applications make the whole term
/// undefined. Unbound variables are input errors.
inline std::optional<Elem> eval_term(const FinitePCA& P, const PcaTerm& t, const std::map<std::string, Elem>& env = {}) {
  if (t.is_constant()) return t.value();
  if (t.is_var()) {
    auto it = env.find(t.var_name());
    if (it == env.end()) throw InputError("unbound variable '" + t.var_name() + "'");
    return it->second;
  }
  auto f = eval_term(P, t.fun(), env);
  if (!f) return std::nullopt;
  auto a = eval_term(P, t.arg(), env);
  if (!a) return std::nullopt;
  return P.apply(*f, *a);
}

/// k/s bracket abstraction of one variable, as a term.
inline PcaTerm abstract_term(const FinitePCA& P, const std::string& x, const PcaTerm& t) {
  auto K = PcaTerm::constant(P.k());
  auto S = PcaTerm::constant(P.s());
  if (t.is_var() && t.var_name() == x) return S(K)(K);
  if (!t.is_app()) return K(t);
  return S(abstract_term(P, x, t.fun()))(abstract_term(P, x, t.arg()));
}

/// lambda* x1 ... xn . t as a closed combinator term.
inline PcaTerm bracket_term(const FinitePCA& P, const std::vector<std::string>& vars, const PcaTerm& t) {
  if (vars.empty()) throw InputError("bracket abstraction needs at least one variable");
  PcaTerm out = t;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) out = abstract_term(P, *it, out);
  return out;
}

/// Value of lambda* vars . t. Throws InputError on variables not in `vars`.
inline Elem bracket(const FinitePCA& P, const std::vector<std::string>& vars, const PcaTerm& t) {
  std::map<std::string, Elem> probe;
  for (const auto& v : vars) probe[v] = Elem{0u};
  (void)eval_term(P, t, probe);  // rejects unbound variables
  auto v = eval_term(P, bracket_term(P, vars, t));
  if (!v) throw LawViolation("bracket abstraction is undefined; k or s does not satisfy its clause");
  return *v;
}

/// Both bracket clauses over every argument tuple, and filter membership
/// when every constant of t lies in the filter.
inline VerificationReport verify_bracket(const FinitePCA& P, const std::vector<std::string>& vars, const PcaTerm& t,
                                         std::string subject = {}) {
  VerificationReport r(std::move(subject));
  Elem lam = bracket(P, vars, t);
  const std::size_t L = vars.size(), n = P.size();
  std::vector<Elem> args(L, Elem{0u});
  std::optional<Verdict> def, bound;
  auto names = [&](std::size_t upto) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < upto; ++i) w.push_back(P.name(args[i]));
    return w;
  };
  std::size_t total = 1;
  for (std::size_t i = 0; i < L; ++i) total *= n;
  for (std::size_t code = 0; code < total && !(def && bound); ++code) {
    std::size_t c = code;
    std::map<std::string, Elem> env;
    for (std::size_t i = 0; i < L; ++i) {
      args[i] = Elem{c % n};
      c /= n;
      env[vars[i]] = args[i];
    }
    std::optional<Elem> partial = lam;
    for (std::size_t i = 0; i + 1 < L; ++i) partial = P.apply(partial, std::optional<Elem>(args[i]));
    if (!def && !partial) def = Verdict::fail("pca.bracket-defined", names(L - 1), "partial application is undefined");
    auto full = P.apply(partial, std::optional<Elem>(args[L - 1]));
    if (!bound && !kleene_leq(P.pap(), full, eval_term(P, t, env)))
      bound = Verdict::fail("pca.bracket-bound", names(L), "abstraction applied to the arguments is not below the term");
  }
  r.add(def.value_or(Verdict::pass("pca.bracket-defined", {P.name(lam)})));
  r.add(bound.value_or(Verdict::pass("pca.bracket-bound", {P.name(lam)})));
  std::vector<Elem> cs;
  t.constants(cs);
  bool filtered = std::all_of(cs.begin(), cs.end(), [&](Elem e) { return P.in_filter(e); });
  if (!filtered)
    r.add(Verdict::pass("pca.bracket-filter", {}, "term has constants outside the filter"));
  else if (P.in_filter(lam))
    r.add(Verdict::pass("pca.bracket-filter", {P.name(lam)}));
  else
    r.add(Verdict::fail("pca.bracket-filter", {P.name(lam)}, "abstraction of a filter-constant term left the filter"));
  return r;
}

struct DerivedCombinators {
  Elem i, kbar, p, p0, p1;
};

inline DerivedCombinators derived_combinators(const FinitePCA& P) {
  auto x = PcaTerm::var("x"), y = PcaTerm::var("y"), z = PcaTerm::var("z");
  DerivedCombinators d;
  d.i = bracket(P, {"x"}, x);
  auto kbar = P.apply(P.k(), d.i);
  if (!kbar) throw LawViolation("k i is undefined");
  d.kbar = *kbar;
  d.p = bracket(P, {"x", "y", "z"}, z(x)(y));
  d.p0 = bracket(P, {"x"}, x(PcaTerm::constant(P.k())));
  d.p1 = bracket(P, {"x"}, x(PcaTerm::constant(d.kbar)));
  return d;
}

/// i a <= a, k-bar a b <= b, p0 (p a b) <= a and p1 (p a b) <= b, all defined.
inline VerificationReport check_derived_combinators(const FinitePCA& P, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  auto d = derived_combinators(P);
  auto below = [&](std::optional<Elem> e, Elem bound) { return e && P.leq(*e, bound); };
  auto one = [](Elem e) { return std::optional<Elem>(e); };
  std::optional<Verdict> id, dual, pair;
  for (Elem a : P.elements()) {
    if (!id && !below(P.apply(d.i, a), a)) id = Verdict::fail("pca.identity", {P.name(a)}, "i a is not below a");
    for (Elem b : P.elements()) {
      if (!dual && !below(P.apply(P.apply(d.kbar, a), one(b)), b))
        dual = Verdict::fail("pca.dual-constant", {P.name(a), P.name(b)}, "k-bar a b is not below b");
      auto pab = P.apply(P.apply(d.p, a), one(b));
      if (!pair && (!below(P.apply(one(d.p0), pab), a) || !below(P.apply(one(d.p1), pab), b)))
        pair = Verdict::fail("pca.pairing", {P.name(a), P.name(b)}, "a projection of p a b is not below its component");
    }
  }
  r.add(id.value_or(Verdict::pass("pca.identity", {P.name(d.i)})));
  r.add(dual.value_or(Verdict::pass("pca.dual-constant", {P.name(d.kbar)})));
  r.add(pair.value_or(Verdict::pass("pca.pairing", {P.name(d.p), P.name(d.p0), P.name(d.p1)})));
  return r;
}

inline FinitePCA one_element_pca() {
  FinitePAP pap(FinitePoset({"*"}, {1}), {Elem{0u}});
  return FinitePCA(std::move(pap), {1}, Elem{0u}, Elem{0u});
}

/// Downsets of a poset as bitmasks in ascending numeric order, so the empty
/// downset comes first. Throws CapExceeded past `cap` downsets.
template <class Leq>
std::vector<std::uint64_t> enumerate_downsets(std::size_t n, Leq&& leq, std::size_t cap) {
  if (n > 64) throw CapExceeded("downset enumeration supports at most 64 points");
  // Visit points in a linear extension so every lower point is decided first.
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> below_count(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && leq(b, a)) ++below_count[a];
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return below_count[a] < below_count[b]; });
  std::vector<std::uint64_t> lower(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && leq(b, a)) lower[a] |= std::uint64_t{1} << b;
  std::vector<std::uint64_t> out;
  auto rec = [&](std::size_t i, std::uint64_t mask, std::uint64_t excluded, auto& self) -> void {
    if (i == n) {
      if (out.size() >= cap) throw CapExceeded("more than " + std::to_string(cap) + " downsets");
      out.push_back(mask);
      return;
    }
    std::size_t x = order[i];
    std::uint64_t bit = std::uint64_t{1} << x;
    self(i + 1, mask, excluded | bit, self);
    if ((lower[x] & excluded) == 0 && (lower[x] & ~mask) == 0) self(i + 1, mask | bit, excluded, self);
  };
  rec(0, 0, 0, rec);
  std::sort(out.begin(), out.end());
  return out;
}

/// The downsets of a PCA carrier with a lookup from mask to index.
struct Downsets {
  FinitePCA base;
  std::vector<std::uint64_t> sets;
  std::unordered_map<std::uint64_t, std::uint32_t> index;

  static constexpr std::size_t default_cap = 4096;

  static Downsets of(const FinitePCA& P, std::size_t cap = default_cap) {
    if (P.size() > 64) throw CapExceeded("downsets support at most 64 base elements");
    Downsets D{P, enumerate_downsets(P.size(), [&](std::size_t a, std::size_t b) { return P.leq(Elem{a}, Elem{b}); }, cap), {}};
    for (std::size_t i = 0; i < D.sets.size(); ++i) D.index.emplace(D.sets[i], static_cast<std::uint32_t>(i));
    return D;
  }

  std::size_t size() const { return sets.size(); }
  Elem of_mask(std::uint64_t m) const {
    auto it = index.find(m);
    if (it == index.end()) throw LawViolation("set is not a downset");
    return Elem{it->second};
  }
  std::uint64_t mask(Elem a) const { return sets[a.index]; }
  bool contains(Elem alpha, Elem a) const { return (sets[alpha.index] >> a.index) & 1u; }
  std::uint64_t down_mask(std::uint64_t m) const {
    std::uint64_t out = 0;
    for (Elem x : base.elements())
      for (Elem y : base.elements())
        if (((m >> y.index) & 1u) && base.leq(x, y)) out |= std::uint64_t{1} << x.index;
    return out;
  }
  Elem principal(Elem a) const { return of_mask(down_mask(std::uint64_t{1} << a.index)); }
  std::string name(std::uint64_t m) const {
    std::string s = "{";
    bool first = true;
    for (Elem x : base.elements())
      if ((m >> x.index) & 1u) {
        s += (first ? "" : ",") + base.name(x);
        first = false;
      }
    return s + "}";
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto m : sets) out.push_back(name(m));
    return out;
  }
  bool meets_filter(std::uint64_t m) const {
    for (Elem x : base.elements())
      if (((m >> x.index) & 1u) && base.in_filter(x)) return true;
    return false;
  }
  /// Mask of the downward closure of {x y | y in beta} for a fixed x, or
  /// nothing when some x y is undefined.
  std::optional<std::uint64_t> apply_elem(Elem x, std::uint64_t beta) const {
    std::uint64_t img = 0;
    for (Elem y : base.elements()) {
      if (!((beta >> y.index) & 1u)) continue;
      auto xy = base.apply(x, y);
      if (!xy) return std::nullopt;
      img |= std::uint64_t{1} << xy->index;
    }
    return down_mask(img);
  }
  std::optional<std::uint64_t> apply(std::uint64_t alpha, std::uint64_t beta) const {
    std::uint64_t out = 0;
    for (Elem x : base.elements()) {
      if (!((alpha >> x.index) & 1u)) continue;
      auto r = apply_elem(x, beta);
      if (!r) return std::nullopt;
      out |= *r;
    }
    return out;
  }
};

/// Downset PCA: inclusion order, alpha . beta = down{x y} defined when every
/// x y is, filter = downsets meeting the base filter, witnesses down{k} and
/// down{s}. The result is verified before it is returned.
inline FinitePCA downset_pca(const FinitePCA& P, std::size_t cap = Downsets::default_cap) {
  auto D = Downsets::of(P, cap);
  const std::size_t n = D.size();
  std::vector<std::optional<Elem>> app(n * n);
  std::vector<std::uint8_t> filter(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    filter[a] = D.meets_filter(D.sets[a]);
    for (std::size_t b = 0; b < n; ++b)
      if (auto m = D.apply(D.sets[a], D.sets[b])) app[a * n + b] = D.of_mask(*m);
  }
  FinitePCA out(FinitePAP(FinitePoset::of_sets(D.names(), D.sets), std::move(app)), std::move(filter), D.principal(P.k()),
                D.principal(P.s()));
  return require_pca(out, "downset PCA");
}

/// Downset arrow algebra: alpha -> beta = {a | a . alpha defined and inside
/// beta}, separator = downsets meeting the filter. Checked with
/// verify_algebra and for join compatibility before it is returned.
inline ArrowAlgebra downset_arrow_algebra(const FinitePCA& P, std::size_t cap = Downsets::default_cap) {
  auto D = Downsets::of(P, cap);
  const std::size_t n = D.size();
  // acts[x * n + alpha]: x . alpha as a mask, or all ones when undefined.
  const std::uint64_t undefined = ~std::uint64_t{0};
  std::vector<std::uint64_t> acts(P.size() * n);
  for (Elem x : P.elements())
    for (std::size_t a = 0; a < n; ++a) acts[x.index * n + a] = D.apply_elem(x, D.sets[a]).value_or(undefined);
  std::vector<Elem> imp(n * n);
  std::vector<std::uint8_t> sep(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    sep[a] = D.meets_filter(D.sets[a]);
    for (std::size_t b = 0; b < n; ++b) {
      std::uint64_t m = 0;
      for (Elem x : P.elements()) {
        std::uint64_t act = acts[x.index * n + a];
        if (act != undefined && (act & ~D.sets[b]) == 0) m |= std::uint64_t{1} << x.index;
      }
      imp[a * n + b] = D.of_mask(m);
    }
  }
  ArrowAlgebra A(FiniteLattice::of_sets(D.names(), D.sets), std::move(imp), std::move(sep));
  require_algebra(A, "downset arrow algebra");
  if (!A.compatible_with_joins()) throw LawViolation("downset arrow algebra is not compatible with joins");
  return A;
}

/// Downward-closed, symmetric, transitive relations on the carrier ordered
/// by inclusion. Pair (a, a') is bit a * n + a'.
inline ArrowAlgebra per_arrow_algebra(const FinitePCA& P, std::size_t cap = Downsets::default_cap) {
  const std::size_t n = P.size();
  if (n * n > 64) throw CapExceeded("PER construction supports at most 8 base elements");
  auto bit = [&](std::size_t a, std::size_t b) { return std::uint64_t{1} << (a * n + b); };
  auto has = [&](std::uint64_t R, std::size_t a, std::size_t b) { return (R & bit(a, b)) != 0; };
  auto pair_leq = [&](std::size_t p, std::size_t q) {
    return P.leq(Elem{p / n}, Elem{q / n}) && P.leq(Elem{p % n}, Elem{q % n});
  };
  auto is_per = [&](std::uint64_t R) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (!has(R, a, b)) continue;
        if (!has(R, b, a)) return false;
        for (std::size_t c = 0; c < n; ++c)
          if (has(R, b, c) && !has(R, a, c)) return false;
      }
    return true;
  };
  std::vector<std::uint64_t> rels;
  for (auto R : enumerate_downsets(n * n, pair_leq, std::size_t{1} << 20))
    if (is_per(R)) {
      if (rels.size() >= cap) throw CapExceeded("more than " + std::to_string(cap) + " PERs");
      rels.push_back(R);
    }
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<std::string> names;
  std::vector<std::uint8_t> sep;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    index.emplace(rels[i], static_cast<std::uint32_t>(i));
    std::string s = "{";
    bool first = true, separated = false;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (has(rels[i], a, b)) {
          s += std::string(first ? "" : ",") + "(" + P.name(Elem{a}) + "," + P.name(Elem{b}) + ")";
          first = false;
          separated = separated || (P.in_filter(Elem{a}) && P.in_filter(Elem{b}));
        }
    names.push_back(s + "}");
    sep.push_back(separated);
  }
  const std::size_t N = rels.size();
  std::vector<Elem> imp(N * N);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t t = 0; t < N; ++t) {
      std::uint64_t raw = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t a2 = 0; a2 < n; ++a2) {
          bool ok = true;
          for (std::size_t x = 0; x < n && ok; ++x)
            for (std::size_t x2 = 0; x2 < n && ok; ++x2) {
              if (!has(rels[r], x, x2)) continue;
              auto u = P.apply(Elem{a}, Elem{x});
              auto v = P.apply(Elem{a2}, Elem{x2});
              ok = u && v && has(rels[t], u->index, v->index);
            }
          if (ok) raw |= bit(a, a2);
        }
      // The raw set is already a downward-closed PER: symmetry and
      // transitivity transfer from the argument and result relations.
      auto it = index.find(raw);
      if (it == index.end())
        throw LawViolation("PER implication " + names[r] + " -> " + names[t] + " is not a downward-closed PER");
      imp[r * N + t] = Elem{it->second};
    }
  ArrowAlgebra A(FiniteLattice::of_sets(std::move(names), rels), std::move(imp), std::move(sep));
  return require_algebra(A, "PER arrow algebra");
}

/// Total map between PCA carriers.
struct PcaMap {
  FinitePCA source, target;
  std::vector<Elem> table;

  PcaMap(FinitePCA s, FinitePCA t, std::vector<Elem> m) : source(std::move(s)), target(std::move(t)), table(std::move(m)) {
    if (table.size() != source.size()) throw InputError("PCA map must be total on the source");
    for (Elem e : table)
      if (e.index >= target.size()) throw InputError("PCA map entry out of range");
  }
  Elem operator()(Elem a) const { return table[a.index]; }
};

/// Filter preservation, application realized by some filter element t and
/// order realized by some filter element u, each found by exhaustive search.
inline VerificationReport pca_morphism_check(const PcaMap& f, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source, &B = f.target;
  for (Elem a : A.elements())
    if (A.in_filter(a) && !B.in_filter(f(a))) {
      r.add(Verdict::fail("pca.morphism", {A.name(a)}, "filter element mapped outside the filter"));
      return r;
    }
  auto one = [](Elem e) { return std::optional<Elem>(e); };
  auto realizes_app = [&](Elem t) {
    for (Elem a : A.elements())
      for (Elem b : A.elements()) {
        auto ab = A.apply(a, b);
        if (!ab) continue;
        auto lhs = B.apply(B.apply(t, f(a)), one(f(b)));
        if (!lhs || !B.leq(*lhs, f(*ab))) return false;
      }
    return true;
  };
  auto realizes_order = [&](Elem u) {
    for (Elem a : A.elements())
      for (Elem b : A.elements()) {
        if (!A.leq(a, b)) continue;
        auto lhs = B.apply(u, f(a));
        if (!lhs || !B.leq(*lhs, f(b))) return false;
      }
    return true;
  };
  std::optional<Elem> t, u;
  for (Elem c : B.filter_elements())
    if (realizes_app(c)) {
      t = c;
      break;
    }
  for (Elem c : B.filter_elements())
    if (realizes_order(c)) {
      u = c;
      break;
    }
  if (!t)
    r.add(Verdict::fail("pca.morphism", {}, "no filter element realizes preservation of application"));
  else if (!u)
    r.add(Verdict::fail("pca.morphism", {}, "no filter element realizes preservation of order"));
  else
    r.add(Verdict::pass("pca.morphism", {B.name(*t), B.name(*u)}));
  return r;
}

/// f <= f' iff some filter element s has s f(a) defined and below f'(a).
inline bool pca_morphism_leq(const PcaMap& f, const PcaMap& g) {
  for (Elem s : f.target.filter_elements()) {
    bool ok = true;
    for (Elem a : f.source.elements()) {
      auto v = f.target.apply(s, f(a));
      if (!v || !f.target.leq(*v, g(a))) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

/// a |-> down{a}, as a map into the downset PCA.
inline PcaMap delta_unit(const FinitePCA& P) {
  auto D = Downsets::of(P);
  std::vector<Elem> t;
  for (Elem a : P.elements()) t.push_back(D.principal(a));
  return PcaMap(P, downset_pca(P), std::move(t));
}

/// alpha |-> union of alpha, from the downsets of the downset PCA.
inline PcaMap union_mult(const FinitePCA& P) {
  auto DP = downset_pca(P);
  auto D = Downsets::of(P);
  auto DD = Downsets::of(DP);
  std::vector<Elem> t;
  for (auto m : DD.sets) {
    std::uint64_t u = 0;
    for (Elem x : DP.elements())
      if ((m >> x.index) & 1u) u |= D.mask(x);
    t.push_back(D.of_mask(u));
  }
  return PcaMap(downset_pca(DP), DP, std::move(t));
}

/// Union extension of f : A -> DB (the target must be downset_pca(B)) as a
/// morphism between the downset arrow algebras. When f is a morphism of
/// PCAs the result is checked to be implicative.
inline MorphismTable tilde(const PcaMap& f, const FinitePCA& B) {
  auto DA = Downsets::of(f.source);
  auto DB = Downsets::of(B);
  if (DB.size() != f.target.size()) throw InputError("tilde needs a map into the downsets of the given PCA");
  std::vector<Elem> t;
  for (auto m : DA.sets) {
    std::uint64_t u = 0;
    for (Elem a : f.source.elements())
      if ((m >> a.index) & 1u) u |= DB.mask(f(a));
    t.push_back(DB.of_mask(u));
  }
  MorphismTable out(downset_arrow_algebra(f.source), downset_arrow_algebra(B), std::move(t));
  if (pca_morphism_check(f).passed() && !is_implicative(out))
    throw LawViolation("union extension of a PCA morphism is not implicative");
  return out;
}

/// Computational density: some m in m_candidates such that for every s in
/// s_candidates there is r in the source filter with, for each a where
/// s f(a) is defined, r a and m f(r a) defined and m f(r a) <= s f(a).
/// Both candidate sets default to the target filter. The passing verdict
/// lists m.
inline VerificationReport pca_density_check(const PcaMap& f, std::optional<std::vector<Elem>> m_candidates = std::nullopt,
                                            std::optional<std::vector<Elem>> s_candidates = std::nullopt,
                                            std::string subject = {}) {
  VerificationReport r(std::move(subject));
  const auto &A = f.source, &B = f.target;
  auto ms = m_candidates.value_or(B.filter_elements());
  auto ss = s_candidates.value_or(B.filter_elements());
  auto works = [&](Elem m, Elem s, Elem rr) {
    for (Elem a : A.elements()) {
      auto sfa = B.apply(s, f(a));
      if (!sfa) continue;
      auto ra = A.apply(rr, a);
      if (!ra) return false;
      auto lhs = B.apply(m, f(*ra));
      if (!lhs || !B.leq(*lhs, *sfa)) return false;
    }
    return true;
  };
  auto sources = A.filter_elements();
  for (Elem m : ms) {
    bool all = std::all_of(ss.begin(), ss.end(), [&](Elem s) {
      return std::any_of(sources.begin(), sources.end(), [&](Elem rr) { return works(m, s, rr); });
    });
    if (all) {
      r.add(Verdict::pass("pca.dense", {B.name(m)}));
      return r;
    }
  }
  r.add(Verdict::fail("pca.dense", {}, "no candidate m works for every s"));
  return r;
}

/// Principal downsets of the filter elements of B, as elements of the
/// downset PCA: the candidates for partial applicative maps into DB.
inline std::vector<Elem> principal_filter(const FinitePCA& B) {
  auto D = Downsets::of(B);
  std::vector<Elem> out;
  for (Elem b : B.filter_elements()) out.push_back(D.principal(b));
  return out;
}

/// h(beta) = down{a | m f(a) defined and inside beta} for f : A -> DB and m
/// in B, as a morphism between the downset arrow algebras.
inline MorphismTable density_adjoint(const PcaMap& f, const FinitePCA& B, Elem m) {
  auto DA = Downsets::of(f.source);
  auto DB = Downsets::of(B);
  if (DB.size() != f.target.size()) throw InputError("density adjoint needs a map into the downsets of the given PCA");
  std::vector<Elem> t;
  for (auto beta : DB.sets) {
    std::uint64_t h = 0;
    for (Elem a : f.source.elements()) {
      auto mfa = DB.apply_elem(m, DB.mask(f(a)));
      if (mfa && (*mfa & ~beta) == 0) h |= std::uint64_t{1} << a.index;
    }
    t.push_back(DA.of_mask(DA.down_mask(h)));
  }
  return MorphismTable(downset_arrow_algebra(B), downset_arrow_algebra(f.source), std::move(t));
}

/// The explicit adjoint is a right adjoint of the union extension and is
/// isomorphic to the one found by generic search.
inline VerificationReport check_density_adjoint(const PcaMap& f, const FinitePCA& B, Elem m, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  auto ft = tilde(f, B);
  auto h = density_adjoint(f, B, m);
  if (!verify_adjoint(ft, h)) {
    r.add(Verdict::fail("pca.density-adjoint", {B.name(m)}, "explicit map is not a right adjoint of the union extension"));
    return r;
  }
  auto found = find_right_adjoint(ft);
  if (found.status == Status::inconclusive) {
    r.add(Verdict::inconclusive("pca.density-adjoint", found.detail));
  } else if (!found.pair || !morphism_equiv(found.pair->h, h)) {
    r.add(Verdict::fail("pca.density-adjoint", {B.name(m)}, "explicit adjoint disagrees with the searched adjoint"));
  } else {
    r.add(Verdict::pass("pca.density-adjoint", {B.name(m)}));
  }
  return r;
}

/// Step-bounded fragment of Kleene's first model on {0, ..., n_max}. An index
/// e = 4q + op denotes
///   op 0: m |-> m               (1 step)
///   op 1: m |-> q               (1 step)
///   op 2: m |-> m + q           (1 step)
///   op 3: m |-> m, after a loop of m * q steps (1 + m * q steps)
/// and e . m is undefined when the step count exceeds `step_budget` or the
/// result exceeds n_max. The order is discrete. This is not a verified PCA.
inline FinitePAP bounded_k1(std::size_t n_max, std::size_t step_budget) {
  if (step_budget == 0) throw InputError("step budget must be positive");
  const std::size_t n = n_max + 1;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  std::vector<std::optional<Elem>> app(n * n);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t q = e / 4, steps = 1, out = m;
      switch (e % 4) {
        case 1:
          out = q;
          break;
        case 2:
          out = m + q;
          break;
        case 3:
          steps += m * q;
          break;
        default:
          break;
      }
      if (steps <= step_budget && out <= n_max) app[e * n + m] = Elem{out};
    }
  return FinitePAP(FinitePoset::discrete(std::move(names)), std::move(app));
}

}  // namespace arrowlab

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"

namespace arrowlab {

/// Implicational propositional formula: a variable or an implication.
class Formula {
 public:
  static Formula var(std::size_t index) {
    Formula f;
    f.node_ = std::make_shared<Node>(Node{static_cast<int>(index), {}, {}});
    return f;
  }
  static Formula imp(Formula lhs, Formula rhs) {
    Formula f;
    f.node_ = std::make_shared<Node>(Node{-1, std::move(lhs.node_), std::move(rhs.node_)});
    return f;
  }

  bool is_var() const { return node_->var >= 0; }
  std::size_t var_index() const { return static_cast<std::size_t>(node_->var); }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }

  /// One more than the largest variable index.
  std::size_t var_count() const {
    if (is_var()) return var_index() + 1;
    return std::max(lhs().var_count(), rhs().var_count());
  }

  /// Variables print as p1, p2, ...; implication is right associative.
  std::string to_string() const {
    if (is_var()) return "p" + std::to_string(var_index() + 1);
    std::string l = lhs().to_string();
    if (!lhs().is_var()) l = "(" + l + ")";
    return l + " -> " + rhs().to_string();
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_var() || b.is_var()) return a.is_var() && b.is_var() && a.var_index() == b.var_index();
    return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }

 private:
  struct Node {
    int var;
    std::shared_ptr<const Node> lhs, rhs;
  };
  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses `p -> q -> p`, `(p -> q) -> p`. Identifiers become variables
/// numbered by first occurrence. Any other connective is an input error.
inline Formula parse_formula(std::string_view text, std::vector<std::string>* var_names = nullptr) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& what) -> InputError {
    return InputError("formula: " + what + " at offset " + std::to_string(pos));
  };
  auto parse_imp = [&](auto& self) -> Formula {
    skip();
    if (pos >= text.size()) throw fail("unexpected end of input");
    Formula lhs = [&] {
      if (text[pos] == '(') {
        ++pos;
        Formula inner = self(self);
        skip();
        if (pos >= text.size() || text[pos] != ')') throw fail("expected ')'");
        ++pos;
        return inner;
      }
      std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      if (start == pos) throw fail(std::string("unexpected '") + text[pos] + "'; only -> is supported");
      std::string id(text.substr(start, pos - start));
      auto it = std::find(names.begin(), names.end(), id);
      if (it == names.end()) {
        names.push_back(id);
        return Formula::var(names.size() - 1);
      }
      return Formula::var(static_cast<std::size_t>(it - names.begin()));
    }();
    skip();
    if (text.substr(pos, 2) == "->") {
      pos += 2;
      return Formula::imp(lhs, self(self));
    }
    return lhs;
  };
  Formula f = parse_imp(parse_imp);
  skip();
  if (pos != text.size()) throw fail(std::string("unexpected '") + text[pos] + "'; only -> is supported");
  if (var_names) *var_names = std::move(names);
  return f;
}

/// Finite Kripke model for the implicational fragment.
struct KripkeModel {
  std::size_t worlds = 0;
  std::vector<std::uint8_t> le;     ///< le[w * worlds + v]: w <= v (reflexive, transitive)
  std::vector<std::uint8_t> truth;  ///< truth[w * vars + p]; monotone along le
  std::size_t vars = 0;
  std::size_t root = 0;

  bool forces(std::size_t w, const Formula& f) const {
    if (f.is_var()) return f.var_index() < vars && truth[w * vars + f.var_index()];
    for (std::size_t v = 0; v < worlds; ++v)
      if (le[w * worlds + v] && forces(v, f.lhs()) && !forces(v, f.rhs())) return false;
    return true;
  }
};

struct TautologyResult {
  bool valid = false;
  std::optional<KripkeModel> countermodel;  ///< present iff not valid
};

namespace detail {

/// Hash-consed formulas so sequents are sets of small integers.
class FormulaPool {
 public:
  int var(std::size_t i) { return intern(static_cast<int>(i), -1, -1); }
  int imp(int a, int b) { return intern(-1, a, b); }
  int add(const Formula& f) { return f.is_var() ? var(f.var_index()) : imp(add(f.lhs()), add(f.rhs())); }
  bool is_var(int id) const { return nodes_[id].var >= 0; }
  int var_of(int id) const { return nodes_[id].var; }
  int lhs(int id) const { return nodes_[id].l; }
  int rhs(int id) const { return nodes_[id].r; }

 private:
  struct N {
    int var, l, r;
    auto operator<=>(const N&) const = default;
  };
  int intern(int v, int l, int r) {
    N n{v, l, r};
    auto [it, fresh] = index_.emplace(n, static_cast<int>(nodes_.size()));
    if (fresh) nodes_.push_back(n);
    return it->second;
  }
  std::vector<N> nodes_;
  std::map<N, int> index_;
};

/// Contraction-free sequent calculus for the implicational fragment. Every
/// rule premise is smaller in the multiset ordering of formula weights, so
/// the search terminates without loop checking. Contexts are sets.
class Prover {
 public:
  explicit Prover(FormulaPool& pool) : P_(pool) {}

  bool prove(std::vector<int> ctx, int goal) {
    normalize(ctx);
    auto key = std::make_pair(ctx, goal);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = search(ctx, goal);
    memo_.emplace(std::move(key), r);
    return r;
  }

 private:
  static void normalize(std::vector<int>& ctx) {
    std::sort(ctx.begin(), ctx.end());
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
  }
  static bool has(const std::vector<int>& ctx, int f) { return std::binary_search(ctx.begin(), ctx.end(), f); }
  static std::vector<int> without(const std::vector<int>& ctx, int f) {
    std::vector<int> out;
    for (int x : ctx)
      if (x != f) out.push_back(x);
    return out;
  }

  bool search(const std::vector<int>& ctx, int goal) {
    if (!P_.is_var(goal)) {
      auto next = ctx;
      next.push_back(P_.lhs(goal));
      return prove(std::move(next), P_.rhs(goal));
    }
    if (has(ctx, goal)) return true;
    // p, p -> B  =>  p, B  (invertible)
    for (int f : ctx)
      if (!P_.is_var(f) && P_.is_var(P_.lhs(f)) && has(ctx, P_.lhs(f))) {
        auto next = without(ctx, f);
        next.push_back(P_.rhs(f));
        return prove(std::move(next), goal);
      }
    // (C -> D) -> B: prove D from C, D -> B; then continue with B.
    for (int f : ctx) {
      if (P_.is_var(f) || P_.is_var(P_.lhs(f))) continue;
      int c = P_.lhs(P_.lhs(f)), d = P_.rhs(P_.lhs(f)), b = P_.rhs(f);
      auto rest = without(ctx, f);
      auto left = rest;
      left.push_back(P_.imp(d, b));
      left.push_back(c);
      if (!prove(std::move(left), d)) continue;
      auto right = rest;
      right.push_back(b);
      if (prove(std::move(right), goal)) return true;
    }
    return false;
  }

  FormulaPool& P_;
  std::map<std::pair<std::vector<int>, int>, bool> memo_;
};

inline void collect_subformulas(const Formula& f, std::vector<Formula>& out) {
  if (std::find(out.begin(), out.end(), f) != out.end()) return;
  out.push_back(f);
  if (!f.is_var()) {
    collect_subformulas(f.lhs(), out);
    collect_subformulas(f.rhs(), out);
  }
}

/// Removes worlds (never the root) while the model still refutes `f`.
/// Exact search over induced submodels when there are few worlds.
inline KripkeModel minimize(const KripkeModel& M, const Formula& f) {
  auto restrict = [&](const std::vector<std::size_t>& keep) {
    KripkeModel R;
    R.worlds = keep.size();
    R.vars = M.vars;
    R.le.assign(R.worlds * R.worlds, 0);
    R.truth.assign(R.worlds * R.vars, 0);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (keep[i] == M.root) R.root = i;
      for (std::size_t j = 0; j < keep.size(); ++j) R.le[i * R.worlds + j] = M.le[keep[i] * M.worlds + keep[j]];
      for (std::size_t p = 0; p < M.vars; ++p) R.truth[i * R.vars + p] = M.truth[keep[i] * M.vars + p];
    }
    return R;
  };
  std::vector<std::size_t> others;
  for (std::size_t w = 0; w < M.worlds; ++w)
    if (w != M.root) others.push_back(w);
  if (others.size() <= 12) {
    for (std::size_t k = 0; k <= others.size(); ++k) {
      // Subsets of size k in lexicographic order.
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        std::vector<std::size_t> keep{M.root};
        for (std::size_t i : idx) keep.push_back(others[i]);
        KripkeModel R = restrict(keep);
        if (!R.forces(R.root, f)) return R;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == others.size() - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    return M;
  }
  std::vector<std::size_t> keep{M.root};
  keep.insert(keep.end(), others.begin(), others.end());
  for (std::size_t i = 1; i < keep.size();) {
    auto trial = keep;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!restrict(trial).forces(0, f))
      keep = std::move(trial);
    else
      ++i;
  }
  return restrict(keep);
}

}  // namespace detail

/// Decides intuitionistic validity of an implicational formula. On failure a
/// countermodel is built from theories closed under provability (restricted to
/// subformulas), checked by the Kripke evaluator, and reduced to a smallest
/// refuting submodel.
inline TautologyResult taut_check(const Formula& f) {
  detail::FormulaPool pool;
  detail::Prover prover(pool);
  int goal = pool.add(f);
  if (prover.prove({}, goal)) return {true, std::nullopt};

  std::vector<Formula> sub;
  detail::collect_subformulas(f, sub);
  std::vector<int> sub_ids;
  for (const auto& s : sub) sub_ids.push_back(pool.add(s));

  auto closure = [&](const std::vector<int>& base) {
    std::vector<std::uint8_t> in(sub.size(), 0);
    for (std::size_t i = 0; i < sub.size(); ++i) in[i] = prover.prove(base, sub_ids[i]);
    return in;
  };
  auto members = [&](const std::vector<std::uint8_t>& w) {
    std::vector<int> out;
    for (std::size_t i = 0; i < sub.size(); ++i)
      if (w[i]) out.push_back(sub_ids[i]);
    return out;
  };

  std::vector<std::vector<std::uint8_t>> worlds{closure({})};
  for (std::size_t w = 0; w < worlds.size(); ++w)
    for (std::size_t i = 0; i < sub.size(); ++i) {
      if (sub[i].is_var() || worlds[w][i]) continue;
      auto base = members(worlds[w]);
      base.push_back(pool.add(sub[i].lhs()));
      auto child = closure(base);
      if (std::find(worlds.begin(), worlds.end(), child) == worlds.end()) worlds.push_back(std::move(child));
    }

  KripkeModel M;
  M.worlds = worlds.size();
  M.vars = f.var_count();
  M.le.assign(M.worlds * M.worlds, 0);
  M.truth.assign(M.worlds * M.vars, 0);
  for (std::size_t w = 0; w < M.worlds; ++w) {
    for (std::size_t v = 0; v < M.worlds; ++v) {
      bool sub_set = true;
      for (std::size_t i = 0; i < sub.size(); ++i)
        if (worlds[w][i] && !worlds[v][i]) sub_set = false;
      M.le[w * M.worlds + v] = sub_set;
    }
    for (std::size_t i = 0; i < sub.size(); ++i)
      if (sub[i].is_var() && worlds[w][i]) M.truth[w * M.vars + sub[i].var_index()] = 1;
  }
  if (M.forces(M.root, f)) throw LawViolation("countermodel construction failed for " + f.to_string());
  return {false, detail::minimize(M, f)};
}

/// Meet of the formula's value over all assignments of carrier elements to
/// its variables. Throws CapExceeded past `cap` assignments.
inline Elem intuitionistic_instance(const ArrowAlgebra& A, const Formula& f, std::size_t cap = 1'000'000) {
  const std::size_t vars = f.var_count();
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars; ++i) {
    total *= A.size();
    if (total > cap) throw CapExceeded("too many assignments for " + f.to_string());
  }
  std::vector<Elem> env(vars, Elem{0u});
  auto eval = [&](const Formula& g, auto& self) -> Elem {
    if (g.is_var()) return env[g.var_index()];
    return A.imp(self(g.lhs(), self), self(g.rhs(), self));
  };
  Elem m = A.top();
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < vars; ++i) {
      env[i] = Elem{c % A.size()};
      c /= A.size();
    }
    m = A.meet(m, eval(f, eval));
  }
  return m;
}

/// Implicational tautologies used as instance checks: the shapes of k, s, i,
/// b and a few standard consequences.
inline const std::vector<std::string>& standard_tautologies() {
  static const std::vector<std::string> list = {
      "p -> p",
      "p -> q -> p",
      "(p -> q -> r) -> (p -> q) -> p -> r",
      "(q -> r) -> (p -> q) -> p -> r",
      "(p -> q -> r) -> q -> p -> r",
      "(p -> p -> q) -> p -> q",
      "((((p -> q) -> p) -> p) -> q) -> q",
      "((p -> q) -> q) -> (p -> q) -> q",
  };
  return list;
}

/// Every listed formula is valid and its instance in A is separated.
inline VerificationReport check_tautology_instances(const ArrowAlgebra& A, const std::vector<std::string>& formulas,
                                                    std::string subject = {}) {
  VerificationReport r(std::move(subject));
  for (const auto& text : formulas) {
    Formula f = parse_formula(text);
    if (!taut_check(f).valid) throw InputError("not an intuitionistic tautology: " + text);
    Elem v = intuitionistic_instance(A, f);
    if (!A.in_sep(v)) {
      r.add(Verdict::fail("logic.tautology-instance", {f.to_string(), A.name(v)},
                          "instance " + A.name(v) + " is not separated"));
      return r;
    }
  }
  r.add(Verdict::pass("logic.tautology-instance", {}, std::to_string(formulas.size()) + " formulas"));
  return r;
}

}  // namespace arrowlab

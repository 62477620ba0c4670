#pragma once

// Brute-force oracles and seeded generators shared by the unit tests and the
// acceptance binary. Oracles evaluate definitions literally (every subset,
// every candidate table, every realizer) and never call the library's
// reduced algorithms.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "arrowlab/algebra.hpp"
#include "arrowlab/lattice.hpp"
#include "arrowlab/morphism.hpp"
#include "arrowlab/pca.hpp"

namespace oracle {

using arrowlab::ArrowAlgebra;
using arrowlab::Elem;
using arrowlab::FiniteLattice;
using arrowlab::MorphismTable;

inline std::vector<std::pair<Elem, Elem>> pairs_of(const ArrowAlgebra& A) {
  std::vector<std::pair<Elem, Elem>> out;
  for (Elem a : A.elements())
    for (Elem b : A.elements()) out.emplace_back(a, b);
  return out;
}

// k = meet over a, b of a -> b -> a.
inline Elem k(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements()) m = A.meet(m, A.imp(a, A.imp(b, a)));
  return m;
}

inline Elem s(const ArrowAlgebra& A) {
  Elem m = A.top();
  for (Elem a : A.elements())
    for (Elem b : A.elements())
      for (Elem c : A.elements())
        m = A.meet(m, A.imp(A.imp(a, A.imp(b, c)), A.imp(A.imp(a, b), A.imp(a, c))));
  return m;
}

// a = meet over a and every family of pairs (b_i, c_i), read as a subset X of
// A x A, of (meet_X a -> b -> c) -> a -> (meet_X b -> c).
inline Elem a(const ArrowAlgebra& A) {
  auto ps = pairs_of(A);
  if (ps.size() > 20) throw std::runtime_error("subset oracle limited to 20 pairs");
  Elem m = A.top();
  for (Elem x : A.elements())
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ps.size()); ++mask) {
      Elem u = A.top(), v = A.top();
      for (std::size_t i = 0; i < ps.size(); ++i)
        if (mask >> i & 1) {
          u = A.meet(u, A.imp(x, A.imp(ps[i].first, ps[i].second)));
          v = A.meet(v, A.imp(ps[i].first, ps[i].second));
        }
      m = A.meet(m, A.imp(u, A.imp(x, v)));
    }
  return m;
}

// The three separator clauses, with combinators from the oracles above.
inline bool is_arrow_algebra(const ArrowAlgebra& A) {
  for (Elem x : A.elements())
    for (Elem y : A.elements()) {
      if (A.in_sep(x) && A.leq(x, y) && !A.in_sep(y)) return false;
      if (A.in_sep(x) && A.in_sep(A.imp(x, y)) && !A.in_sep(y)) return false;
    }
  return A.in_sep(k(A)) && A.in_sep(s(A)) && A.in_sep(a(A));
}

// Every arrow algebra whose lattice is a chain of 1..max_n elements: all
// variance-respecting implication tables with every nonempty upset as
// separator candidate, filtered by `is_arrow_algebra`. Lattices with at most
// three elements are chains, so max_n <= 3 covers all of them.
inline std::vector<ArrowAlgebra> small_algebras(std::size_t max_n) {
  std::vector<ArrowAlgebra> out;
  for (std::size_t n = 1; n <= max_n; ++n) {
    auto L = FiniteLattice::chain(n);
    std::size_t tables = 1;
    for (std::size_t i = 0; i < n * n; ++i) tables *= n;
    for (std::size_t code = 0; code < tables; ++code) {
      std::vector<Elem> t;
      std::size_t c = code;
      for (std::size_t i = 0; i < n * n; ++i) {
        t.push_back(Elem{c % n});
        c /= n;
      }
      for (std::size_t lo = 0; lo < n; ++lo) {
        std::vector<std::uint8_t> sep(n, 0);
        for (std::size_t j = lo; j < n; ++j) sep[j] = 1;
        try {
          ArrowAlgebra A(L, t, sep);
          if (is_arrow_algebra(A)) out.push_back(A);
        } catch (const arrowlab::StructureError&) {
          break;  // variance fails for the table, whatever the separator
        }
      }
    }
  }
  return out;
}

// Implicative morphism, literally: (i) separator preserved, (ii) some
// separated r below every f(a -> a') -> f(a) -> f(a'), (iii) every subset
// X of A x A with separated meet of a -> a' has separated meet of
// f(a) -> f(a').
inline bool implicative(const MorphismTable& f) {
  const auto &A = f.source(), &B = f.target();
  for (Elem x : A.elements())
    if (A.in_sep(x) && !B.in_sep(f(x))) return false;
  bool realized = false;
  for (Elem r : B.elements()) {
    if (!B.in_sep(r)) continue;
    bool below = true;
    for (Elem x : A.elements())
      for (Elem y : A.elements())
        below = below && B.leq(r, B.imp(f(A.imp(x, y)), B.imp(f(x), f(y))));
    if (below) {
      realized = true;
      break;
    }
  }
  if (!realized) return false;
  auto ps = pairs_of(A);
  if (ps.size() > 20) throw std::runtime_error("subset oracle limited to 20 pairs");
  // Meets over each subset, built from the subset without its lowest pair.
  const std::uint64_t subsets = std::uint64_t{1} << ps.size();
  std::vector<Elem> ma(subsets, A.top()), mb(subsets, B.top());
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    std::size_t i = static_cast<std::size_t>(__builtin_ctzll(mask));
    std::uint64_t rest = mask & (mask - 1);
    ma[mask] = A.meet(ma[rest], A.imp(ps[i].first, ps[i].second));
    mb[mask] = B.meet(mb[rest], B.imp(f(ps[i].first), f(ps[i].second)));
  }
  for (std::uint64_t mask = 0; mask < subsets; ++mask)
    if (A.in_sep(ma[mask]) && !B.in_sep(mb[mask])) return false;
  return true;
}

// f |- g: some separated u below every f(a) -> g(a).
inline bool entails(const MorphismTable& f, const MorphismTable& g) {
  const auto& B = f.target();
  for (Elem u : B.elements()) {
    if (!B.in_sep(u)) continue;
    bool ok = true;
    for (Elem x : f.source().elements()) ok = ok && B.leq(u, B.imp(f(x), g(x)));
    if (ok) return true;
  }
  return false;
}

// Every table B -> A in lexicographic order.
inline std::vector<MorphismTable> all_tables(const ArrowAlgebra& from, const ArrowAlgebra& to) {
  std::vector<MorphismTable> out;
  std::vector<std::size_t> idx(from.size(), 0);
  while (true) {
    std::vector<Elem> t;
    for (auto i : idx) t.push_back(Elem{i});
    out.emplace_back(from, to, std::move(t));
    std::size_t k = from.size();
    while (k > 0 && ++idx[k - 1] == to.size()) idx[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

// Right adjoint by exhaustive search over all |A|^|B| tables. `h_ok`
// decides implicativity of a candidate (pass a memoized oracle).
inline std::optional<MorphismTable> right_adjoint(const MorphismTable& f, const std::vector<MorphismTable>& candidates,
                                                  const std::function<bool(std::size_t)>& h_ok) {
  auto idA = MorphismTable::identity(f.source()), idB = MorphismTable::identity(f.target());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& h = candidates[i];
    if (!h_ok(i)) continue;
    std::vector<Elem> hf, fh;
    for (Elem x : f.source().elements()) hf.push_back(h(f(x)));
    for (Elem y : f.target().elements()) fh.push_back(f(h(y)));
    if (entails(idA, MorphismTable(f.source(), f.source(), hf)) && entails(MorphismTable(f.target(), f.target(), fh), idB))
      return h;
  }
  return std::nullopt;
}

// Existential along g : X -> Y, straight from the quantifier formula.
inline std::vector<Elem> exists(const ArrowAlgebra& A, const std::vector<std::size_t>& g, std::size_t Y,
                                const std::vector<Elem>& alpha) {
  std::vector<Elem> out;
  for (std::size_t y = 0; y < Y; ++y) {
    Elem m = A.top();
    for (Elem a : A.elements()) {
      Elem da = A.imp(A.top(), a);
      Elem inner = A.top();
      for (std::size_t x = 0; x < g.size(); ++x)
        if (g[x] == y) inner = A.meet(inner, A.imp(alpha[x], da));
      m = A.meet(m, A.imp(inner, A.imp(A.top(), da)));
    }
    out.push_back(m);
  }
  return out;
}

// phi |-_Y psi: meet over y of phi(y) -> psi(y) separated.
inline bool entails_pointwise(const ArrowAlgebra& A, const std::vector<Elem>& phi, const std::vector<Elem>& psi) {
  Elem m = A.top();
  for (std::size_t i = 0; i < phi.size(); ++i) m = A.meet(m, A.imp(phi[i], psi[i]));
  return A.in_sep(m);
}

// Regularity over every g : X -> Y with |X|, |Y| <= max_index and every
// alpha : X -> A: f exists_g(alpha) |-_Y exists_g(f alpha).
inline bool regular(const MorphismTable& f, std::size_t max_index = 3) {
  const auto &A = f.source(), &B = f.target();
  for (std::size_t X = 0; X <= max_index; ++X)
    for (std::size_t Y = 0; Y <= max_index; ++Y) {
      if (Y == 0 && X > 0) continue;
      std::vector<std::size_t> g(X, 0);
      while (true) {
        std::vector<std::size_t> ai(X, 0);
        while (true) {
          std::vector<Elem> alpha, falpha;
          for (auto i : ai) {
            alpha.push_back(Elem{i});
            falpha.push_back(f(Elem{i}));
          }
          std::vector<Elem> lhs;
          for (Elem e : exists(A, g, Y, alpha)) lhs.push_back(f(e));
          if (!entails_pointwise(B, lhs, exists(B, g, Y, falpha))) return false;
          std::size_t k = X;
          while (k > 0 && ++ai[k - 1] == A.size()) ai[--k] = 0;
          if (k == 0) break;
        }
        std::size_t k = X;
        while (k > 0 && ++g[k - 1] == Y) g[--k] = 0;
        if (k == 0) break;
      }
    }
  return true;
}

// The same direct check with every exists_g(alpha) tabulated once per
// algebra, for sweeps over many maps between the same carriers.
class RegularityTables {
 public:
  explicit RegularityTables(const ArrowAlgebra& A, std::size_t max_index = 3) : n_(A.size()) {
    for (std::size_t X = 0; X <= max_index; ++X)
      for (std::size_t Y = 0; Y <= max_index; ++Y) {
        if (Y == 0 && X > 0) continue;
        std::vector<std::size_t> g(X, 0);
        while (true) {
          shapes_.push_back({X, Y, g});
          auto& vals = values_.emplace_back();
          std::size_t total = 1;
          for (std::size_t i = 0; i < X; ++i) total *= n_;
          for (std::size_t code = 0; code < total; ++code) vals.push_back(exists(A, g, Y, decode(code, X)));
          std::size_t k = X;
          while (k > 0 && ++g[k - 1] == Y) g[--k] = 0;
          if (k == 0) break;
        }
      }
  }

  std::vector<Elem> decode(std::size_t code, std::size_t X) const {
    std::vector<Elem> alpha(X, Elem{0u});
    for (std::size_t i = X; i-- > 0; code /= n_) alpha[i] = Elem{code % n_};
    return alpha;
  }

  std::size_t encode(const std::vector<Elem>& alpha) const {
    std::size_t code = 0;
    for (Elem e : alpha) code = code * n_ + e.index;
    return code;
  }

  // f exists_g(alpha) |-_Y exists_g(f alpha) for every tabulated g, alpha.
  static bool regular(const MorphismTable& f, const RegularityTables& ta, const RegularityTables& tb) {
    const auto& B = f.target();
    // fcode[X][code] is the code of f after the alpha with that code.
    std::vector<std::vector<std::size_t>> fcode;
    for (const auto& shape : ta.shapes_) {
      while (fcode.size() <= shape.X) {
        std::size_t X = fcode.size(), total = 1;
        for (std::size_t i = 0; i < X; ++i) total *= ta.n_;
        auto& row = fcode.emplace_back(total);
        for (std::size_t code = 0; code < total; ++code) {
          std::vector<Elem> falpha;
          for (Elem e : ta.decode(code, X)) falpha.push_back(f(e));
          row[code] = tb.encode(falpha);
        }
      }
    }
    for (std::size_t s = 0; s < ta.shapes_.size(); ++s) {
      const auto& row = fcode[ta.shapes_[s].X];
      for (std::size_t code = 0; code < ta.values_[s].size(); ++code) {
        const auto& lhs = ta.values_[s][code];
        const auto& rhs = tb.values_[s][row[code]];
        Elem m = B.top();
        for (std::size_t y = 0; y < lhs.size(); ++y) m = B.meet(m, B.imp(f(lhs[y]), rhs[y]));
        if (!B.in_sep(m)) return false;
      }
    }
    return true;
  }

 private:
  struct Shape {
    std::size_t X, Y;
    std::vector<std::size_t> g;
  };
  std::size_t n_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<std::vector<Elem>>> values_;
};

// Seeded generators.

// Frame of downsets of a random poset on `points` elements (a finite
// distributive lattice), named by its members.
inline ArrowAlgebra random_frame(std::mt19937_64& rng, std::size_t points) {
  std::vector<std::vector<bool>> le(points, std::vector<bool>(points, false));
  std::bernoulli_distribution edge(0.4);
  for (std::size_t i = 0; i < points; ++i) {
    le[i][i] = true;
    for (std::size_t j = i + 1; j < points; ++j) le[i][j] = edge(rng);
  }
  for (std::size_t k = 0; k < points; ++k)
    for (std::size_t i = 0; i < points; ++i)
      for (std::size_t j = 0; j < points; ++j)
        if (le[i][k] && le[k][j]) le[i][j] = true;
  auto sets = arrowlab::enumerate_downsets(points, [&](std::size_t a, std::size_t b) { return le[a][b]; }, 4096);
  std::vector<std::string> names;
  for (auto m : sets) {
    std::string s = "{";
    for (std::size_t i = 0; i < points; ++i)
      if (m >> i & 1) s += (s.size() > 1 ? "," : "") + std::to_string(i);
    names.push_back(s + "}");
  }
  return ArrowAlgebra::frame(FiniteLattice::of_sets(std::move(names), sets));
}

inline MorphismTable random_table(std::mt19937_64& rng, const ArrowAlgebra& A, const ArrowAlgebra& B) {
  std::uniform_int_distribution<std::size_t> pick(0, B.size() - 1);
  std::vector<Elem> t;
  for (std::size_t i = 0; i < A.size(); ++i) t.push_back(Elem{pick(rng)});
  return MorphismTable(A, B, std::move(t));
}

// Frames from the shipped corpus: chains 1..5, the diamond, the 8-element
// Boolean algebra.
inline std::vector<std::pair<std::string, ArrowAlgebra>> corpus_frames() {
  std::vector<std::pair<std::string, ArrowAlgebra>> out;
  for (std::size_t n = 1; n <= 5; ++n)
    out.emplace_back("chain" + std::to_string(n), ArrowAlgebra::frame(FiniteLattice::chain(n)));
  out.emplace_back("diamond", ArrowAlgebra::frame(FiniteLattice::diamond()));
  out.emplace_back("boolean8", ArrowAlgebra::frame(FiniteLattice::boolean(3)));
  return out;
}

// Every 2- or 3-element PAP table over the given poset, as (pap, filter, k, s)
// for the filters where find_ks succeeds. `visit` returns false to stop.
inline void for_each_small_pca(std::size_t n, const std::vector<std::uint8_t>& leq,
                               const std::function<bool(const arrowlab::FinitePCA&)>& visit) {
  using arrowlab::FinitePAP;
  using arrowlab::FinitePoset;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  FinitePoset order(names, leq);
  std::size_t cells = n * n, values = n + 1, total = 1;
  for (std::size_t i = 0; i < cells; ++i) total *= values;
  std::vector<std::vector<std::uint8_t>> filters;
  for (std::size_t f = 1; f < (std::size_t{1} << n); ++f) {
    std::vector<std::uint8_t> fl(n);
    bool up = true;
    for (std::size_t i = 0; i < n; ++i) fl[i] = f >> i & 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (fl[i] && leq[i * n + j] && !fl[j]) up = false;
    if (up) filters.push_back(fl);
  }
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::optional<Elem>> app;
    std::size_t c = code;
    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t v = c % values;
      c /= values;
      app.push_back(v == n ? std::nullopt : std::optional<Elem>(Elem{v}));
    }
    FinitePAP pap(order, std::move(app));
    if (!arrowlab::check_pap(pap).passed()) continue;
    for (const auto& fl : filters) {
      if (!arrowlab::check_filter(pap, fl).passed()) continue;
      auto ks = arrowlab::find_ks(pap, fl);
      if (!ks) continue;
      if (!visit(arrowlab::FinitePCA(pap, fl, ks->first, ks->second))) return;
    }
  }
}

}  // namespace oracle

namespace arrowlab {
inline void PrintTo(Elem e, std::ostream* os) { *os << "#" << e.index; }
}  // namespace arrowlab

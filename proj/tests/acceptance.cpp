// Acceptance run: one PASS/FAIL line per criterion with its tolerance,
// runtime limit and measured time. Exit status 0 iff every criterion passes.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "arrowlab/lambda.hpp"
#include "arrowlab/modified.hpp"
#include "arrowlab/pca.hpp"
#include "arrowlab/tripos.hpp"
#include "arrowlab/workspace.hpp"
#include "oracles.hpp"

using namespace arrowlab;

namespace {

// Counts checks and keeps the first failure.
class Tally {
 public:
  void check(bool ok, const std::function<std::string()>& what) {
    ++checks_;
    if (!ok && failure_.empty()) failure_ = what();
  }
  void report(const VerificationReport& r, const std::string& where) {
    ++checks_;
    if (!r.passed() && failure_.empty()) {
      auto f = r.first_failure();
      failure_ = where + ": " + (f ? f->law + " " + f->detail : std::string("inconclusive"));
    }
  }
  void note(std::string n) { notes_.push_back(std::move(n)); }
  bool ok() const { return failure_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    for (const auto& n : notes_) os << ", " << n;
    if (!failure_.empty()) os << "; first failure: " << failure_;
    return os.str();
  }

 private:
  std::size_t checks_ = 0;
  std::string failure_;
  std::vector<std::string> notes_;
};

struct Criterion {
  int id;
  std::string title, tolerance;
  double limit_seconds;
  std::function<void(Tally&)> run;
};

struct Fixtures {
  Workspace ws;
  Fixtures() { load_directory(ws, fixture_dir()); }
  std::vector<std::pair<std::string, const ArrowAlgebra*>> algebras() const {
    std::vector<std::pair<std::string, const ArrowAlgebra*>> out;
    for (const auto& [name, A] : ws.algebras) out.emplace_back(name, &A);
    return out;
  }
};

const Fixtures& fixtures() {
  static const Fixtures f;
  return f;
}

std::string count(std::size_t n, const char* what) { return std::to_string(n) + " " + what; }

// 1. Frame fixtures.
void frames(Tally& t) {
  for (const auto& [name, A] : oracle::corpus_frames()) {
    t.report(verify_algebra(A), name);
    for (Elem c : {A.k(), A.s(), A.a(), A.i(), A.b()}) t.check(c == A.top(), [&] { return name + ": combinator below top"; });
    for (Elem a : A.elements()) {
      t.check(A.shift(a) == a, [&] { return name + ": shift is not the identity"; });
      for (Elem b : A.elements()) {
        t.check(A.apply(a, b) == A.meet(a, b), [&] { return name + ": apply differs from meet"; });
        t.check(logical_meet(A, a, b) == A.meet(a, b), [&] { return name + ": logical meet differs from meet"; });
        t.check(logical_join(A, a, b) == A.join(a, b), [&] { return name + ": logical join differs from join"; });
        t.check(logical_leq(A, a, b) == A.leq(a, b), [&] { return name + ": entailment differs from order"; });
      }
    }
  }
}

// 2. Oracle equivalences on every arrow algebra with at most three elements.
void oracles(Tally& t) {
  const auto all = oracle::small_algebras(3);
  const std::size_t N = all.size();
  for (std::size_t i = 0; i < N; ++i) {
    Elem a = oracle::a(all[i]);
    t.check(combinator_a_fixpoint(all[i]) == a && all[i].a() == a, [&] { return "combinator a on algebra " + std::to_string(i); });
  }
  // Literal implicativity of every table, kept for the adjoint candidates.
  std::vector<std::vector<std::uint8_t>> literal(N * N);
  std::size_t tables = 0, implicative = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      auto& bits = literal[i * N + j];
      for (const auto& f : oracle::all_tables(all[i], all[j])) {
        bool expect = oracle::implicative(f);
        bits.push_back(expect);
        ++tables;
        implicative += expect;
        t.check(is_implicative(f) == expect, [&] { return "implicativity of a table " + std::to_string(i) + " -> " + std::to_string(j); });
      }
    }
  std::vector<oracle::RegularityTables> reg;
  for (const auto& A : all) reg.emplace_back(A);
  std::size_t adjoints = 0, regular = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const auto& bits = literal[i * N + j];
      const auto& back = literal[j * N + i];
      auto candidates = oracle::all_tables(all[j], all[i]);
      auto fs = oracle::all_tables(all[i], all[j]);
      for (std::size_t x = 0; x < fs.size(); ++x) {
        if (!bits[x]) continue;
        const auto& f = fs[x];
        auto where = [&] { return std::to_string(i) + " -> " + std::to_string(j) + " table " + std::to_string(x); };
        auto expect = oracle::right_adjoint(f, candidates, [&](std::size_t k) { return back[k] != 0; });
        auto got = find_right_adjoint(f);
        t.check(got.status != Status::inconclusive && got.pair.has_value() == expect.has_value(),
                [&] { return "adjoint existence, " + where(); });
        if (expect && got.pair) {
          ++adjoints;
          t.check(morphism_equiv(got.pair->h, *expect), [&] { return "adjoint differs, " + where(); });
        }
        bool reg_expect = oracle::RegularityTables::regular(f, reg[i], reg[j]);
        regular += reg_expect;
        t.check(is_regular(f).passed() == reg_expect, [&] { return "regularity, " + where(); });
      }
    }
  t.note(count(N, "algebras"));
  t.note(count(tables, "tables"));
  t.note(count(implicative, "implicative"));
  t.note(count(adjoints, "with adjoint"));
  t.note(count(regular, "regular"));
}

// 3. Separator closure of the lambda interpretation.
void separator_closure(Tally& t) {
  std::vector<std::pair<std::string, ArrowAlgebra>> targets;
  for (const auto& [name, A] : fixtures().algebras()) targets.emplace_back(name, *A);
  for (const auto& [name, P] : fixtures().ws.pcas) targets.emplace_back("D(" + name + ")", downset_arrow_algebra(P));
  for (const auto& [name, A] : targets) {
    TermGenerator gen(A, 2024);
    for (int k = 0; k < 250; ++k) {
      auto [term, env] = gen.next(8);
      t.check(term.size() <= 8, [&] { return name + ": generated term too large"; });
      for (const auto& [x, v] : env) t.check(A.in_sep(v), [&] { return name + ": environment not separated"; });
      t.report(check_separator_closure(A, term, env), name + " " + term.to_string());
    }
  }
  t.note(count(targets.size(), "algebras x 250 terms"));
}

// 4. PCA laws on every PCA over 2- and 3-element posets (up to isomorphism
// of the order) plus the one-element PCA.
std::vector<std::vector<std::uint8_t>> posets(std::size_t n) {
  auto rel = [n](std::initializer_list<std::pair<int, int>> lt) {
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    for (auto [a, b] : lt) leq[a * n + b] = 1;
    return leq;
  };
  if (n == 2) return {rel({}), rel({{0, 1}})};
  return {rel({}), rel({{0, 1}}), rel({{0, 1}, {1, 2}, {0, 2}}), rel({{0, 1}, {0, 2}}), rel({{0, 2}, {1, 2}})};
}

std::vector<PcaTerm> bracket_terms(const FinitePCA& P) {
  std::vector<PcaTerm> leaves{PcaTerm::var("x"), PcaTerm::var("y"), PcaTerm::var("z"), PcaTerm::constant(P.k()),
                              PcaTerm::constant(P.s())};
  std::vector<PcaTerm> two, out = leaves;
  for (const auto& a : leaves)
    for (const auto& b : leaves) two.push_back(a(b));
  out.insert(out.end(), two.begin(), two.end());
  for (const auto& a : leaves)
    for (const auto& b : two) {
      out.push_back(a(b));
      out.push_back(b(a));
    }
  return out;
}

void pca_laws(Tally& t) {
  std::vector<FinitePCA> pcas{one_element_pca()};
  for (std::size_t n = 2; n <= 3; ++n)
    for (const auto& leq : posets(n)) oracle::for_each_small_pca(n, leq, [&](const FinitePCA& P) {
        pcas.push_back(P);
        return true;
      });
  std::size_t brackets = 0;
  for (std::size_t idx = 0; idx < pcas.size(); ++idx) {
    const auto& P = pcas[idx];
    std::string where = "pca " + std::to_string(idx);
    t.report(verify_pca(P), where);
    t.report(check_derived_combinators(P), where);
    for (const auto& term : bracket_terms(P)) {
      t.report(verify_bracket(P, {"x", "y", "z"}, term), where + " " + term.to_string(P));
      ++brackets;
    }
    auto D = downset_arrow_algebra(P);
    t.report(verify_algebra(D), where + " downsets");
    t.check(D.compatible_with_joins(), [&] { return where + ": downset algebra not join compatible"; });
  }
  auto D1 = downset_arrow_algebra(one_element_pca());
  auto two = two_frame();
  t.check(D1.size() == 2 && D1.imp_table() == two.imp_table() && D1.separator() == two.separator() &&
              D1.leq(D1.bottom(), D1.top()),
          [] { return std::string("downsets of the one-element PCA are not the two-element frame"); });
  t.note(count(pcas.size(), "PCAs"));
  t.note(count(brackets, "bracket terms"));
}

// 5. Tripos slice.
void tripos(Tally& t) {
  std::vector<std::pair<std::string, ArrowAlgebra>> targets;
  for (const auto& [name, A] : fixtures().algebras())
    if (A->size() <= 4) targets.emplace_back(name, *A);
  targets.emplace_back("D(one)", downset_arrow_algebra(one_element_pca()));
  std::vector<FinMap> maps;
  for (std::size_t X = 0; X <= 3; ++X)
    for (std::size_t Y = 0; Y <= 3; ++Y)
      for (auto& f : all_maps(X, Y)) maps.push_back(std::move(f));
  std::size_t squares = 0, join_forms = 0;
  for (const auto& [name, A] : targets) {
    for (const auto& f : maps) {
      auto r = check_adjointness(A, f);
      t.report(r, name + " " + detail::show(f));
      join_forms += r.find("tripos.exists-join-form") != nullptr;
    }
    for (const auto& k : maps)
      for (const auto& h : maps) {
        if (k.cod != h.cod) continue;
        t.report(check_beck_chevalley(A, PullbackSquare::of(k, h)), name + " " + detail::show(k) + " " + detail::show(h));
        ++squares;
      }
    t.report(generic_element_check(A, 3), name);
  }
  t.note(count(targets.size(), "algebras"));
  t.note(count(maps.size(), "maps"));
  t.note(count(squares, "squares"));
  t.note(count(join_forms, "join-form comparisons"));
}

// 6. Nuclei, quotients and factorization.
void nuclei(Tally& t) {
  std::size_t checked = 0;
  for (const auto& [name, A] : fixtures().algebras()) {
    std::vector<std::pair<std::string, MorphismTable>> js;
    for (Elem c : A->elements()) {
      js.emplace_back("guarded(" + A->name(c) + ")", nucleus_guarded(*A, c));
      js.emplace_back("double(" + A->name(c) + ")", nucleus_double(*A, c));
      js.emplace_back("peirce(" + A->name(c) + ")", nucleus_peirce(*A, c));
    }
    for (const auto& [jn, j] : js) {
      std::string where = name + "/" + jn;
      t.report(check_nucleus(j), where);
      t.report(verify_algebra(quotient(j)), where + " quotient");
      t.report(check_quotient(j), where);
      t.check(classify(quotient_surjection(j)).surjection, [&] { return where + ": quotient map is not a surjection"; });
      t.report(closure_roundtrip(j), where);
      ++checked;
    }
  }
  const auto& ws = fixtures().ws;
  std::size_t pairs = 0;
  for (const auto& [name, f] : ws.morphisms) {
    auto found = find_right_adjoint(f);
    if (!found.pair) continue;
    t.report(check_factorization(*found.pair), name);
    ++pairs;
  }
  auto iff = [&](const std::string& name, bool surjection) {
    auto found = find_right_adjoint(ws.morphism(name));
    t.check(found.pair.has_value(), [&] { return name + ": no right adjoint"; });
    if (!found.pair) return;
    auto F = factorize(*found.pair);
    t.check(classify(*found.pair).surjection == surjection, [&] { return name + ": unexpected classification"; });
    t.check(classify(F.injection).equivalence == surjection, [&] { return name + ": middle map disagrees"; });
  };
  iff("hom-chain3-chain2", true);
  iff("hom-chain2-chain3", false);
  t.note(count(checked, "nuclei"));
  t.note(count(pairs, "factorized pairs"));
}

// 7. Modified realizability.
void modified(Tally& t) {
  std::vector<std::pair<std::string, Modified>> mods;
  for (const auto& [name, A] : fixtures().algebras()) {
    if (!A->modifiable()) continue;
    auto S = sierpinski(*A);
    t.report(check_sierpinski(S), name);
    t.check(S.algebra.binary_implicative(), [&] { return name + ": Sierpinski algebra not binary implicative"; });
    t.report(check_open_closed(S), name);
    auto oc = open_closed_nuclei(S);
    t.report(check_nucleus(oc.open), name + " open");
    t.report(check_nucleus(oc.closed), name + " closed");
    auto pd = pi1_delta(S);
    t.check(morphism_equiv(oc.open, compose(pd.h, pd.f)), [&] { return name + ": o is not delta after pi1"; });
    t.check(classify(pd).surjection, [&] { return name + ": (pi1, delta) is not a surjection"; });
    mods.emplace_back(name, modification(*A));
  }
  // Frame homomorphisms among the frame fixtures with at most five elements.
  std::vector<std::size_t> small;
  for (std::size_t i = 0; i < mods.size(); ++i)
    if (is_frame_derived(mods[i].second.sierpinski.base) && mods[i].second.sierpinski.base.size() <= 5) small.push_back(i);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<MorphismTable>> homs;
  std::size_t lifts = 0, composites = 0;
  for (auto i : small)
    for (auto j : small) {
      const auto &A = mods[i].second.sierpinski.base, &B = mods[j].second.sierpinski.base;
      auto& hs = homs[{i, j}];
      for (const auto& f : oracle::all_tables(A, B))
        if (is_frame_homomorphism(f)) hs.push_back(f);
      for (const auto& f : hs) {
        t.report(check_lifts(f, frame_right_adjoint(f), mods[i].second, mods[j].second), mods[i].first + " -> " + mods[j].first);
        ++lifts;
      }
    }
  for (auto a : small)
    for (auto b : small)
      for (auto c : small)
        for (const auto& f : homs[{a, b}])
          for (const auto& g : homs[{b, c}]) {
            t.report(check_modified_composition(f, g, mods[a].second, mods[b].second, mods[c].second),
                     mods[a].first + " -> " + mods[b].first + " -> " + mods[c].first);
            ++composites;
          }
  auto S = sierpinski(two_frame());
  const auto& X = S.algebra;
  auto c = open_closed_nuclei(S).closed;
  std::vector<Elem> expect{X.at("(bot,top)"), X.at("(bot,top)"), X.at("(top,top)")};
  t.check(c.table() == expect, [] { return std::string("closed nucleus table on the two-element frame"); });
  t.note(count(mods.size(), "modifiable fixtures"));
  t.note(count(lifts, "lifted homomorphisms"));
  t.note(count(composites, "composable pairs"));
}

// 8. Full suite determinism through the command-line tool.
struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  std::string cmd = "'" + std::string(ARROWLAB_CLI_PATH) + "' " + args;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void suite(Tally& t) {
  const std::string args = "--seed 0 --format structured suite";
  auto a = run_cli(args), b = run_cli(args);
  t.check(a.code == 0, [&] { return "first run exited " + std::to_string(a.code); });
  t.check(b.code == 0, [&] { return "second run exited " + std::to_string(b.code); });
  t.check(!a.out.empty() && a.out == b.out, [] { return std::string("structured reports differ"); });
  auto doc = nlohmann::json::parse(a.out, nullptr, false);
  t.check(!doc.is_discarded() && doc["summary"]["fail"] == 0, [] { return std::string("suite reports failures"); });
  if (!doc.is_discarded()) t.note(count(doc["summary"]["pass"].get<std::size_t>(), "passing laws"));
  t.note(count(a.out.size(), "bytes per report"));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "frame fixtures", "exact", 5, frames},
      {2, "oracle equivalences on carriers <= 3", "identical verdicts", 60, oracles},
      {3, "separator closure of lambda terms", "zero failures", 30, separator_closure},
      {4, "PCA laws on 1-3 element PCAs", "exact", 60, pca_laws},
      {5, "tripos slice, |A| <= 4, index <= 3", "exact (-||-)", 120, tripos},
      {6, "nuclei, quotients, factorization", "exact (-||-)", 60, nuclei},
      {7, "modified realizability", "exact (-||-)", 60, modified},
      {8, "suite determinism", "byte-identical", 300, suite},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Tally t;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(t);
    } catch (const std::exception& e) {
      t.check(false, [&] { return std::string("exception: ") + e.what(); });
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_seconds;
    bool pass = t.ok() && in_time;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << "  tolerance: " << c.tolerance
              << "  time: " << std::fixed << std::setprecision(2) << secs << " s (limit " << std::setprecision(0)
              << c.limit_seconds << " s" << (in_time ? "" : ", exceeded") << ")  " << t.summary() << std::endl;
  }
  return all ? 0 : 1;
}

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "arrowlab/algebra.hpp"
#include "arrowlab/formula.hpp"
#include "arrowlab/lambda.hpp"
#include "arrowlab/modified.hpp"
#include "arrowlab/morphism.hpp"
#include "arrowlab/nucleus.hpp"
#include "arrowlab/pca.hpp"
#include "arrowlab/report.hpp"
#include "arrowlab/tripos.hpp"

namespace arrowlab {

/// Enumeration bounds shared by every command.
struct Caps {
  std::size_t predicates = 4096;  ///< exhaustive predicate families up to this many tables
  std::size_t adjoint = 1'000'000;
  std::size_t downsets = 4096;
  std::size_t regular = 12;  ///< largest source carrier for the regularity check
  std::size_t index = 3;     ///< largest index set in the tripos slice
  std::size_t terms = 200;   ///< random lambda terms per algebra
  std::size_t term_size = 8;
  std::size_t tripos_carrier = 4;    ///< tripos slice runs on carriers up to this size
  std::size_t modified_carrier = 8;  ///< modified checks run on bases up to this size

  /// Applies "key=value" settings.
  void set(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("cap setting '" + kv + "' is not key=value");
    std::string key = kv.substr(0, eq);
    std::size_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("cap value in '" + kv + "' is not a number");
    }
    std::map<std::string, std::size_t*> slots = {
        {"predicates", &predicates}, {"adjoint", &adjoint},     {"downsets", &downsets},
        {"regular", &regular},       {"index", &index},         {"terms", &terms},
        {"term-size", &term_size},   {"tripos-carrier", &tripos_carrier}, {"modified-carrier", &modified_carrier}};
    auto it = slots.find(key);
    if (it == slots.end()) throw InputError("unknown cap '" + key + "'");
    *it->second = value;
  }
};

/// One verdict attributed to a subject.
struct ReportLine {
  std::string subject;
  Verdict verdict;
};

inline std::vector<ReportLine> flatten(const VerificationReport& r, const std::string& subject) {
  std::vector<ReportLine> out;
  for (const auto& v : r.verdicts()) out.push_back({subject, v});
  return out;
}

/// Stable sort by (subject, law).
inline void canonical_order(std::vector<ReportLine>& lines) {
  std::stable_sort(lines.begin(), lines.end(), [](const ReportLine& a, const ReportLine& b) {
    return std::tie(a.subject, a.verdict.law) < std::tie(b.subject, b.verdict.law);
  });
}

/// Folds repeated (subject, law) lines of sorted input: all-pass groups become
/// one pass counting the instances; otherwise only the non-pass lines stay,
/// each with its own counterexample.
inline std::vector<ReportLine> collapse(const std::vector<ReportLine>& sorted) {
  std::vector<ReportLine> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    bool all_pass = true;
    while (j < sorted.size() && sorted[j].subject == sorted[i].subject && sorted[j].verdict.law == sorted[i].verdict.law) {
      all_pass = all_pass && sorted[j].verdict.passed();
      ++j;
    }
    if (j - i == 1) {
      out.push_back(sorted[i]);
    } else if (all_pass) {
      out.push_back({sorted[i].subject, Verdict::pass(sorted[i].verdict.law, {}, std::to_string(j - i) + " instances")});
    } else {
      for (std::size_t k = i; k < j; ++k)
        if (!sorted[k].verdict.passed()) out.push_back(sorted[k]);
    }
    i = j;
  }
  return out;
}

inline int exit_code(const std::vector<ReportLine>& lines) {
  for (const auto& l : lines)
    if (l.verdict.status == Status::fail) return 1;
  return 0;
}

inline std::string render_text(const std::vector<ReportLine>& lines) {
  std::ostringstream os;
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& l : lines) {
    const auto& v = l.verdict;
    ++counts[static_cast<int>(v.status)];
    std::string tag = v.status == Status::pass ? "PASS" : v.status == Status::fail ? "FAIL" : "INCONCLUSIVE";
    os << tag << "  " << l.subject << "  " << v.law;
    if (!v.witness.empty()) {
      os << "  [";
      for (std::size_t i = 0; i < v.witness.size(); ++i) os << (i ? ", " : "") << v.witness[i];
      os << "]";
    }
    if (!v.detail.empty()) os << "  " << v.detail;
    os << "\n";
  }
  os << counts[0] << " passed, " << counts[1] << " failed, " << counts[2] << " inconclusive\n";
  return os.str();
}

inline nlohmann::ordered_json render_structured(const std::vector<ReportLine>& lines, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["registry_version"] = std::string(laws::registry_version);
  doc["seed"] = seed;
  auto& arr = doc["reports"] = nlohmann::ordered_json::array();
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& l : lines) {
    ++counts[static_cast<int>(l.verdict.status)];
    nlohmann::ordered_json e;
    e["subject"] = l.subject;
    e["law"] = l.verdict.law;
    e["status"] = std::string(to_string(l.verdict.status));
    e["witness"] = l.verdict.witness;
    e["detail"] = l.verdict.detail;
    arr.push_back(std::move(e));
  }
  doc["summary"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}};
  return doc;
}

/// Named objects loaded from definition files or derived by commands.
class Workspace {
 public:
  struct Term {
    LambdaTerm term;
    std::optional<std::string> algebra;
    std::map<std::string, std::string> env;  ///< variable -> element name
  };

  std::map<std::string, ArrowAlgebra> algebras;
  std::map<std::string, FinitePCA> pcas;
  std::map<std::string, MorphismTable> morphisms;
  std::set<std::string> nuclei;  ///< morphisms declared as nuclei
  std::map<std::string, PcaMap> pca_maps;
  std::map<std::string, Term> terms;
  std::vector<std::string> load_order;

  bool has(const std::string& name) const {
    return algebras.count(name) || pcas.count(name) || morphisms.count(name) || pca_maps.count(name) ||
           terms.count(name);
  }

  std::string kind_of(const std::string& name) const {
    if (algebras.count(name)) return "algebra";
    if (pcas.count(name)) return "pca";
    if (nuclei.count(name)) return "nucleus";
    if (morphisms.count(name)) return "morphism";
    if (pca_maps.count(name)) return "pca-morphism";
    if (terms.count(name)) return "term";
    throw InputError("unknown subject '" + name + "'");
  }

  const ArrowAlgebra& algebra(const std::string& name) const {
    auto it = algebras.find(name);
    if (it == algebras.end()) throw InputError("unknown algebra '" + name + "'");
    return it->second;
  }
  const FinitePCA& pca(const std::string& name) const {
    auto it = pcas.find(name);
    if (it == pcas.end()) throw InputError("unknown PCA '" + name + "'");
    return it->second;
  }
  const MorphismTable& morphism(const std::string& name) const {
    auto it = morphisms.find(name);
    if (it == morphisms.end()) throw InputError("unknown morphism '" + name + "'");
    return it->second;
  }
  const PcaMap& pca_map(const std::string& name) const {
    auto it = pca_maps.find(name);
    if (it == pca_maps.end()) throw InputError("unknown PCA morphism '" + name + "'");
    return it->second;
  }

  void add_algebra(const std::string& name, ArrowAlgebra A) {
    claim(name);
    algebras.emplace(name, std::move(A));
  }
  void add_pca(const std::string& name, FinitePCA P) {
    claim(name);
    pcas.emplace(name, std::move(P));
  }
  void add_morphism(const std::string& name, MorphismTable f, bool nucleus = false) {
    claim(name);
    if (nucleus) nuclei.insert(name);
    morphisms.emplace(name, std::move(f));
  }
  void add_pca_map(const std::string& name, PcaMap f) {
    claim(name);
    pca_maps.emplace(name, std::move(f));
  }
  void add_term(const std::string& name, Term t) {
    claim(name);
    terms.emplace(name, std::move(t));
  }

  /// Loads definition files. Each file holds a JSON object or an array of
  /// objects. Carriers (algebras, frames, PCAs) are built before morphisms
  /// and terms, so references may point into any of the files.
  void load_files(const std::vector<std::filesystem::path>& paths) {
    std::vector<Pending> pending;
    for (const auto& path : paths) {
      std::ifstream in(path);
      if (!in) throw InputError(path.string() + ": cannot open file");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
      }
      collect(std::move(doc), path.string(), path.stem().string(), pending);
    }
    resolve(pending);
  }
  void load_file(const std::filesystem::path& path) { load_files({path}); }

  void load_json(nlohmann::json doc, const std::string& origin, const std::string& default_name = {}) {
    std::vector<Pending> pending;
    collect(std::move(doc), origin, default_name, pending);
    resolve(pending);
  }

 private:
  struct Pending {
    nlohmann::json obj;
    std::string origin, ptr, default_name;
  };

  static void collect(nlohmann::json doc, const std::string& origin, const std::string& default_name,
                      std::vector<Pending>& out) {
    if (doc.is_array()) {
      for (std::size_t i = 0; i < doc.size(); ++i) out.push_back({std::move(doc[i]), origin, "/" + std::to_string(i), {}});
    } else {
      out.push_back({std::move(doc), origin, "", default_name});
    }
  }

  static int phase(const nlohmann::json& obj) {
    if (!obj.is_object() || !obj.contains("kind") || !obj.at("kind").is_string()) return 0;
    auto k = obj.at("kind").get<std::string>();
    if (k == "morphism" || k == "nucleus") return 1;
    if (k == "term") return 2;
    return 0;
  }

  void resolve(const std::vector<Pending>& pending) {
    for (int ph = 0; ph < 3; ++ph)
      for (const auto& p : pending)
        if (phase(p.obj) == ph) load_object(p.obj, p.origin, p.ptr, p.default_name);
  }

  void claim(const std::string& name) {
    if (name.empty()) throw InputError("object name must not be empty");
    if (has(name)) throw InputError("duplicate name '" + name + "'");
    load_order.push_back(name);
  }

  struct Ctx {
    const std::string& origin;
    std::string ptr;
    [[noreturn]] void fail(const std::string& at, const std::string& what) const {
      throw InputError(origin + ": " + (ptr + at).insert(0, (ptr + at).empty() ? "/" : "") + ": " + what);
    }
  };

  static const nlohmann::json& field(const Ctx& c, const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key)) c.fail("", std::string("missing field \"") + key + "\"");
    return obj.at(key);
  }
  static std::string str(const Ctx& c, const nlohmann::json& v, const std::string& at) {
    if (!v.is_string()) c.fail(at, "expected a string");
    return v.get<std::string>();
  }

  static std::vector<std::string> element_names(const Ctx& c, const nlohmann::json& obj) {
    const auto& e = field(c, obj, "elements");
    if (!e.is_array() || e.empty()) c.fail("/elements", "expected a nonempty array of names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < e.size(); ++i) {
      auto n = str(c, e[i], "/elements/" + std::to_string(i));
      if (std::find(names.begin(), names.end(), n) != names.end())
        c.fail("/elements/" + std::to_string(i), "duplicate element name '" + n + "'");
      names.push_back(n);
    }
    return names;
  }

  static std::size_t lookup(const Ctx& c, const std::vector<std::string>& names, const nlohmann::json& v,
                            const std::string& at) {
    auto n = str(c, v, at);
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) c.fail(at, "unknown element '" + n + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  /// "leq": [[a, b], ...] or {"hasse": [[a, b], ...]}; both are closed
  /// reflexively and transitively. Absent means discrete when allowed.
  static std::vector<std::uint8_t> order(const Ctx& c, const nlohmann::json& obj, const std::vector<std::string>& names,
                                         bool discrete_default) {
    const std::size_t n = names.size();
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    if (!obj.contains("leq")) {
      if (!discrete_default) c.fail("", "missing field \"leq\"");
      return leq;
    }
    const nlohmann::json* pairs = &obj.at("leq");
    std::string at = "/leq";
    if (pairs->is_object()) {
      if (!pairs->contains("hasse")) c.fail(at, "expected an array of pairs or {\"hasse\": [...]}");
      pairs = &pairs->at("hasse");
      at += "/hasse";
    }
    if (!pairs->is_array()) c.fail(at, "expected an array of pairs");
    for (std::size_t i = 0; i < pairs->size(); ++i) {
      const auto& p = (*pairs)[i];
      std::string pat = at + "/" + std::to_string(i);
      if (!p.is_array() || p.size() != 2) c.fail(pat, "expected a pair [lower, upper]");
      leq[lookup(c, names, p[0], pat + "/0") * n + lookup(c, names, p[1], pat + "/1")] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq[i * n + k])
          for (std::size_t j = 0; j < n; ++j)
            if (leq[k * n + j]) leq[i * n + j] = 1;
    return leq;
  }

  static std::vector<std::uint8_t> subset(const Ctx& c, const nlohmann::json& obj, const char* key,
                                          const std::vector<std::string>& names) {
    const auto& v = field(c, obj, key);
    std::string at = std::string("/") + key;
    if (!v.is_array()) c.fail(at, "expected an array of element names");
    std::vector<std::uint8_t> flags(names.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) flags[lookup(c, names, v[i], at + "/" + std::to_string(i))] = 1;
    return flags;
  }

  static FiniteLattice lattice(const Ctx& c, std::vector<std::string> names, std::vector<std::uint8_t> leq) {
    try {
      return FiniteLattice(std::move(names), std::move(leq));
    } catch (const StructureError& e) {
      std::string w;
      for (const auto& x : e.witness()) w += (w.empty() ? "" : ", ") + x;
      c.fail("/leq", std::string(e.what()) + (w.empty() ? "" : " (witness: " + w + ")"));
    }
  }

  std::vector<Elem> table(const Ctx& c, const nlohmann::json& obj, const std::vector<std::string>& from,
                          const std::vector<std::string>& to) const {
    const auto& t = field(c, obj, "table");
    if (!t.is_object()) c.fail("/table", "expected an object mapping source names to target names");
    std::vector<std::optional<Elem>> out(from.size());
    for (auto it = t.begin(); it != t.end(); ++it) {
      std::string at = "/table/" + it.key();
      auto src = std::find(from.begin(), from.end(), it.key());
      if (src == from.end()) c.fail(at, "unknown source element '" + it.key() + "'");
      out[static_cast<std::size_t>(src - from.begin())] = Elem{lookup(c, to, it.value(), at)};
    }
    std::vector<Elem> res;
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (!out[i]) c.fail("/table", "no image for '" + from[i] + "'");
      res.push_back(*out[i]);
    }
    return res;
  }

  static std::vector<std::string> names_of(const ArrowAlgebra& A) { return A.lattice().names(); }
  static std::vector<std::string> names_of(const FinitePCA& P) { return P.pap().order().names(); }

  void load_object(const nlohmann::json& obj, const std::string& origin, const std::string& ptr,
                   const std::string& default_name) {
    Ctx c{origin, ptr};
    if (!obj.is_object()) c.fail("", "expected an object");
    std::string kind = str(c, field(c, obj, "kind"), "/kind");
    std::string name = obj.contains("name") ? str(c, obj.at("name"), "/name") : default_name;
    if (name.empty()) c.fail("", "missing field \"name\"");
    if (has(name)) c.fail("/name", "duplicate name '" + name + "'");
    try {
      if (kind == "arrow-algebra") {
        auto names = element_names(c, obj);
        const std::size_t n = names.size();
        auto leq = order(c, obj, names, false);
        const auto& imp = field(c, obj, "imp");
        if (!imp.is_array() || imp.size() != n) c.fail("/imp", "expected " + std::to_string(n) + " rows");
        std::vector<Elem> t;
        for (std::size_t i = 0; i < n; ++i) {
          std::string at = "/imp/" + std::to_string(i);
          if (!imp[i].is_array() || imp[i].size() != n) c.fail(at, "expected " + std::to_string(n) + " entries");
          for (std::size_t j = 0; j < n; ++j) t.push_back(Elem{lookup(c, names, imp[i][j], at + "/" + std::to_string(j))});
        }
        auto sep = subset(c, obj, "separator", names);
        add_algebra(name, ArrowAlgebra(lattice(c, names, std::move(leq)), std::move(t), std::move(sep)));
      } else if (kind == "frame") {
        auto names = element_names(c, obj);
        auto leq = order(c, obj, names, false);
        FiniteLattice L = lattice(c, names, std::move(leq));
        if (obj.contains("separator"))
          add_algebra(name, ArrowAlgebra::frame(L, subset(c, obj, "separator", names)));
        else
          add_algebra(name, ArrowAlgebra::frame(L));
      } else if (kind == "pca") {
        auto names = element_names(c, obj);
        const std::size_t n = names.size();
        auto leq = order(c, obj, names, true);
        const auto& app = field(c, obj, "app");
        if (!app.is_array() || app.size() != n) c.fail("/app", "expected " + std::to_string(n) + " rows");
        std::vector<std::optional<Elem>> t;
        for (std::size_t i = 0; i < n; ++i) {
          std::string at = "/app/" + std::to_string(i);
          if (!app[i].is_array() || app[i].size() != n) c.fail(at, "expected " + std::to_string(n) + " entries");
          for (std::size_t j = 0; j < n; ++j) {
            std::string cell = at + "/" + std::to_string(j);
            if (app[i][j].is_string() && app[i][j].get<std::string>() == "-")
              t.emplace_back(std::nullopt);
            else
              t.emplace_back(Elem{lookup(c, names, app[i][j], cell)});
          }
        }
        FinitePAP pap(FinitePoset(names, std::move(leq)), std::move(t));
        auto filter = subset(c, obj, "filter", names);
        std::optional<Elem> k, s;
        if (obj.contains("k")) k = Elem{lookup(c, names, obj.at("k"), "/k")};
        if (obj.contains("s")) s = Elem{lookup(c, names, obj.at("s"), "/s")};
        if (!k || !s) {
          auto found = find_ks(pap, filter);
          if (!found) c.fail("", "no k/s witnesses given and none exist in the filter");
          if (!k) k = found->first;
          if (!s) s = found->second;
        }
        add_pca(name, FinitePCA(std::move(pap), std::move(filter), *k, *s));
      } else if (kind == "morphism" || kind == "nucleus") {
        std::string from, to;
        if (obj.contains("on")) {
          from = to = str(c, obj.at("on"), "/on");
        } else {
          from = str(c, field(c, obj, "from"), "/from");
          to = str(c, field(c, obj, "to"), "/to");
        }
        if (kind == "nucleus" && from != to) c.fail("", "a nucleus is an endomorphism");
        if (pcas.count(from) && pcas.count(to) && kind == "morphism") {
          const auto &A = pca(from), &B = pca(to);
          add_pca_map(name, PcaMap(A, B, table(c, obj, names_of(A), names_of(B))));
        } else {
          if (!algebras.count(from)) c.fail("/from", "unknown algebra '" + from + "'");
          if (!algebras.count(to)) c.fail("/to", "unknown algebra '" + to + "'");
          const auto &A = algebra(from), &B = algebra(to);
          add_morphism(name, MorphismTable(A, B, table(c, obj, names_of(A), names_of(B))), kind == "nucleus");
        }
      } else if (kind == "term") {
        Term t{parse_lambda(str(c, field(c, obj, "term"), "/term")), std::nullopt, {}};
        if (obj.contains("algebra")) {
          t.algebra = str(c, obj.at("algebra"), "/algebra");
          if (!algebras.count(*t.algebra)) c.fail("/algebra", "unknown algebra '" + *t.algebra + "'");
        }
        if (obj.contains("env")) {
          if (!obj.at("env").is_object()) c.fail("/env", "expected an object of variable bindings");
          for (auto it = obj.at("env").begin(); it != obj.at("env").end(); ++it)
            t.env[it.key()] = str(c, it.value(), "/env/" + it.key());
        }
        add_term(name, std::move(t));
      } else {
        c.fail("/kind", "unknown kind '" + kind + "'");
      }
    } catch (const StructureError& e) {
      std::string w;
      for (const auto& x : e.witness()) w += (w.empty() ? "" : ", ") + x;
      c.fail("", std::string(e.what()) + (w.empty() ? "" : " (witness: " + w + ")"));
    } catch (const InputError& e) {
      std::string msg = e.what();
      if (msg.rfind(origin + ":", 0) == 0) throw;
      c.fail("", msg);
    }
  }
};

/// Law selection: ids from the registry or group prefixes such as "nucleus".
class LawFilter {
 public:
  LawFilter() = default;
  explicit LawFilter(const std::vector<std::string>& patterns) {
    for (const auto& p : patterns) {
      bool ok = laws::known(p) || std::any_of(laws::registry.begin(), laws::registry.end(), [&](const laws::LawInfo& l) {
                  return l.id.substr(0, p.size() + 1) == p + ".";
                });
      if (!ok) throw InputError("unknown law '" + p + "'");
      patterns_.push_back(p);
    }
  }
  bool all() const { return patterns_.empty(); }
  bool selects(const std::string& law) const {
    if (patterns_.empty()) return true;
    for (const auto& p : patterns_)
      if (law == p || law.rfind(p + ".", 0) == 0) return true;
    return false;
  }
  /// Laws that only run when named explicitly.
  bool requests(const std::string& law) const { return !patterns_.empty() && selects(law); }
  bool requests_group(std::string_view group) const {
    return std::any_of(laws::registry.begin(), laws::registry.end(), [&](const laws::LawInfo& l) {
      return l.id.substr(0, group.size() + 1) == std::string(group) + "." && requests(std::string(l.id));
    });
  }

 private:
  std::vector<std::string> patterns_;
};

namespace detail {

inline VerificationReport property(bool holds, const char* law, const std::string& what) {
  VerificationReport r;
  if (holds)
    r.add(Verdict::pass(law));
  else
    r.add(Verdict::fail(law, {}, what));
  return r;
}

inline VerificationReport lambda_closure_sample(const ArrowAlgebra& A, std::uint64_t seed, const Caps& caps) {
  VerificationReport r;
  if (A.separator_elements().empty()) {
    r.add(Verdict::inconclusive("lambda.separator-closure", "separator is empty"));
    return r;
  }
  TermGenerator gen(A, seed);
  for (std::size_t i = 0; i < caps.terms; ++i) {
    auto [t, env] = gen.next(caps.term_size);
    auto one = check_separator_closure(A, t, env);
    if (!one.passed()) {
      r.merge(one);
      return r;
    }
  }
  r.add(Verdict::pass("lambda.separator-closure", {}, std::to_string(caps.terms) + " seeded terms"));
  return r;
}

}  // namespace detail

/// Dispatches checks by subject kind. Default laws always hold for a valid
/// subject of that kind; property laws (join compatibility, adjoint
/// existence, regularity, density) only run when requested.
class Checker {
 public:
  Checker(const Workspace& ws, std::uint64_t seed, Caps caps) : ws_(ws), seed_(seed), caps_(caps) {}

  std::vector<ReportLine> check(const std::string& subject, const LawFilter& filter = {}) const {
    VerificationReport r = run(subject, filter);
    std::vector<ReportLine> out;
    std::set<std::tuple<std::string, Status, std::vector<std::string>, std::string>> seen;
    for (const auto& v : r.verdicts())
      if (filter.selects(v.law) && seen.emplace(v.law, v.status, v.witness, v.detail).second) out.push_back({subject, v});
    if (!filter.all() && out.empty()) throw InputError("no selected law applies to '" + subject + "'");
    return out;
  }

  VerificationReport check_algebra(const ArrowAlgebra& A, const LawFilter& f) const {
    VerificationReport r;
    auto vr = verify_algebra(A);
    r.merge(vr);
    if (!vr.passed()) return r;
    r.merge(check_shift_counit(A));
    if (f.selects("logic.heyting-prealgebra")) r.merge(check_heyting_prealgebra(A));
    if (f.selects("logic.tautology-instance")) r.merge(check_tautology_instances(A, standard_tautologies()));
    if (f.selects("lambda.separator-closure")) r.merge(detail::lambda_closure_sample(A, seed_, caps_));
    if (f.requests("algebra.compatible-with-joins"))
      r.merge(detail::property(A.compatible_with_joins(), "algebra.compatible-with-joins", "join compatibility fails"));
    if (f.requests("algebra.binary-implicative")) {
      auto w = binary_implicative_violation(A);
      if (w)
        r.add(Verdict::fail("algebra.binary-implicative", *w, "a -> (b meet c) differs from (a -> b) meet (a -> c)"));
      else
        r.add(Verdict::pass("algebra.binary-implicative"));
    }
    if (f.requests("algebra.modifiable"))
      r.merge(detail::property(A.modifiable(), "algebra.modifiable", "algebra is not modifiable"));
    return r;
  }

  VerificationReport check_pca(const FinitePCA& P, const LawFilter&) const {
    VerificationReport r = verify_pca(P);
    if (!r.passed()) return r;
    r.merge(check_derived_combinators(P));
    for (const auto& [vars, t] : bracket_samples(P)) r.merge(verify_bracket(P, vars, t));
    return r;
  }

  VerificationReport check_morphism(const MorphismTable& f, const LawFilter& filt) const {
    VerificationReport r = check_implicative(f);
    if (!r.passed()) return r;
    MorphismTable mf = monotonize(f);
    r.add(Verdict::pass("morphism.monotonization", {f.target().name(entailment_realizer(f, mf))}));
    r.merge(check_meet_preservation(f));
    if (is_frame_derived(f.source()) && is_frame_derived(f.target())) r.merge(frame_characterizations(f));
    if (filt.requests("morphism.adjoint") || filt.requests("morphism.regular") ||
        filt.requests("morphism.regular-join-form")) {
      auto found = find_right_adjoint(f, caps_.adjoint);
      if (filt.requests("morphism.adjoint")) r.add(adjoint_verdict(found));
      if (filt.requests("morphism.regular") || filt.requests("morphism.regular-join-form"))
        r.merge(is_regular(f, caps_.regular));
    }
    if (filt.requests_group("nucleus") && f.source().same_as(f.target())) r.merge(check_nucleus(f));
    return r;
  }

  VerificationReport check_nucleus_subject(const MorphismTable& j) const {
    VerificationReport r = check_nucleus(j);
    if (!r.passed()) return r;
    r.merge(check_quotient(j));
    auto pair = quotient_surjection(j);
    r.merge(detail::property(classify(pair).surjection, "quotient.surjection",
                             "identity into the quotient is not a surjection"));
    r.merge(closure_roundtrip(j));
    for (std::size_t I = 0; I <= std::min<std::size_t>(caps_.index, 2); ++I) r.merge(check_subtripos(j, I, seed_));
    return r;
  }

  VerificationReport check_pca_map(const PcaMap& f, const LawFilter& filt) const {
    VerificationReport r = pca_morphism_check(f);
    if (filt.requests("pca.dense")) r.merge(pca_density_check(f));
    return r;
  }

  VerificationReport check_term(const Workspace::Term& t) const {
    VerificationReport r;
    std::vector<std::string> targets;
    if (t.algebra)
      targets.push_back(*t.algebra);
    else
      for (const auto& [n, A] : ws_.algebras) targets.push_back(n);
    for (const auto& n : targets) {
      const auto& A = ws_.algebra(n);
      Environment env;
      for (const auto& [x, v] : t.env) env[x] = A.at(v);
      auto free = t.term.free_vars();
      std::vector<std::string> open;
      for (const auto& x : free)
        if (!env.count(x)) open.push_back(x);
      auto sep = A.separator_elements();
      // Every separated assignment to the unbound variables.
      std::vector<std::size_t> idx(open.size(), 0);
      std::size_t count = 0;
      bool ok = true;
      while (ok) {
        for (std::size_t i = 0; i < open.size(); ++i) env[open[i]] = sep[idx[i]];
        auto one = check_separator_closure(A, t.term, env);
        ++count;
        if (!one.passed()) {
          auto v = one.verdicts().front();
          v.detail += " in " + n;
          r.add(v);
          ok = false;
          break;
        }
        std::size_t k = open.size();
        while (k > 0 && ++idx[k - 1] == sep.size()) idx[--k] = 0;
        if (k == 0 || count >= caps_.predicates) break;
      }
      if (ok) r.add(Verdict::pass("lambda.separator-closure", {n}, std::to_string(count) + " environments"));
    }
    return r;
  }

  static Verdict adjoint_verdict(const AdjointSearch& found) {
    if (found.status == Status::pass) {
      const auto& p = *found.pair;
      return Verdict::pass("morphism.adjoint", {p.f.source().name(p.unit), p.f.target().name(p.counit)});
    }
    if (found.status == Status::inconclusive) return Verdict::inconclusive("morphism.adjoint", found.detail);
    return Verdict::fail("morphism.adjoint", {}, found.detail);
  }

  static std::vector<std::pair<std::vector<std::string>, PcaTerm>> bracket_samples(const FinitePCA& P) {
    auto x = PcaTerm::var("x"), y = PcaTerm::var("y"), z = PcaTerm::var("z");
    auto k = PcaTerm::constant(P.k()), s = PcaTerm::constant(P.s());
    return {{{"x"}, x},
            {{"x", "y"}, x},
            {{"x", "y"}, y(x)},
            {{"x", "y"}, x(y)(y)},
            {{"x"}, s(x)(k)},
            {{"x", "y", "z"}, x(z)(y(z))},
            {{"x", "y", "z"}, z(x)(y)}};
  }

 private:
  VerificationReport run(const std::string& subject, const LawFilter& f) const {
    std::string kind = ws_.kind_of(subject);
    if (kind == "algebra") return check_algebra(ws_.algebra(subject), f);
    if (kind == "pca") return check_pca(ws_.pca(subject), f);
    if (kind == "nucleus") {
      VerificationReport r = check_morphism(ws_.morphism(subject), f);
      r.merge(check_nucleus_subject(ws_.morphism(subject)));
      return r;
    }
    if (kind == "morphism") return check_morphism(ws_.morphism(subject), f);
    if (kind == "pca-morphism") return check_pca_map(ws_.pca_map(subject), f);
    return check_term(ws_.terms.at(subject));
  }

  const Workspace& ws_;
  std::uint64_t seed_;
  Caps caps_;
};

inline const std::vector<std::string>& constructions() {
  static const std::vector<std::string> list = {"downset", "per",         "sierpinski",    "modify",
                                                "quotient", "power",      "monotonize",    "lift-arrow",
                                                "lift-modified", "adjoint", "factorize",   "tilde"};
  return list;
}

/// Builds a derived object and registers it under `as`. Returns the
/// verdicts produced along the way (adjoint search outcomes).
inline std::vector<ReportLine> run_derive(Workspace& ws, const std::string& construction,
                                          const std::vector<std::string>& args, const std::string& as, const Caps& caps) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw InputError("derive " + construction + " expects " + std::to_string(n) + " argument(s), got " +
                       std::to_string(args.size()));
  };
  if (ws.has(as)) throw InputError("duplicate name '" + as + "'");
  std::vector<ReportLine> out;
  auto lift_bases = [&](const MorphismTable& f, auto&& build) {
    return build(f.source(), f.target());
  };
  if (construction == "downset") {
    need(1);
    ws.add_algebra(as, downset_arrow_algebra(ws.pca(args[0]), caps.downsets));
  } else if (construction == "per") {
    need(1);
    ws.add_algebra(as, per_arrow_algebra(ws.pca(args[0]), caps.downsets));
  } else if (construction == "sierpinski") {
    need(1);
    ws.add_algebra(as, sierpinski(ws.algebra(args[0])).algebra);
  } else if (construction == "modify") {
    need(1);
    ws.add_algebra(as, modification(ws.algebra(args[0])).algebra);
  } else if (construction == "quotient") {
    need(1);
    ws.add_algebra(as, quotient(ws.morphism(args[0])));
  } else if (construction == "power") {
    need(2);
    std::size_t I = 0;
    try {
      I = std::stoull(args[1]);
    } catch (const std::exception&) {
      throw InputError("power index '" + args[1] + "' is not a number");
    }
    ws.add_algebra(as, power_algebra(ws.algebra(args[0]), I, caps.predicates));
  } else if (construction == "monotonize") {
    need(1);
    ws.add_morphism(as, monotonize(ws.morphism(args[0])));
  } else if (construction == "lift-arrow") {
    need(1);
    const auto& f = ws.morphism(args[0]);
    ws.add_morphism(as, lift_bases(f, [&](const ArrowAlgebra& A, const ArrowAlgebra& B) {
      return lift_morphism(f, sierpinski(A), sierpinski(B));
    }));
  } else if (construction == "lift-modified") {
    need(1);
    const auto& f = ws.morphism(args[0]);
    ws.add_morphism(as, lift_bases(f, [&](const ArrowAlgebra& A, const ArrowAlgebra& B) {
      return lift_modified(f, modification(A), modification(B));
    }));
  } else if (construction == "adjoint" || construction == "factorize") {
    need(1);
    const auto& f = ws.morphism(args[0]);
    auto found = find_right_adjoint(f, caps.adjoint);
    out.push_back({args[0], Checker::adjoint_verdict(found)});
    if (found.pair) {
      if (construction == "adjoint") {
        ws.add_morphism(as, found.pair->h);
      } else {
        auto F = factorize(*found.pair);
        ws.add_morphism(as, F.nucleus, true);
        ws.add_algebra(as + ".quotient", F.quotient);
        ws.add_morphism(as + ".surjection", F.surjection.f);
        ws.add_morphism(as + ".injection", F.injection.f);
        for (auto& l : flatten(check_factorization(*found.pair), args[0])) out.push_back(std::move(l));
      }
    }
  } else if (construction == "tilde") {
    need(1);
    // Union extension of delta after f, i.e. the downset functor on f.
    const auto& f = ws.pca_map(args[0]);
    auto d = delta_unit(f.target);
    std::vector<Elem> t;
    for (Elem a : f.source.elements()) t.push_back(d(f(a)));
    ws.add_morphism(as, tilde(PcaMap(f.source, d.target, std::move(t)), f.target));
  } else {
    throw InputError("unknown construction '" + construction + "'");
  }
  return out;
}

/// Every default law on every object, plus the generated instance
/// families: the three nucleus families for every parameter, the tripos
/// slice on small carriers, the Sierpinski and modified checks on
/// modifiable bases, downset and PER algebras of every PCA, and adjoint,
/// factorization and lift checks for every morphism with a right adjoint.
inline std::vector<ReportLine> run_suite(const Workspace& input, std::uint64_t seed, const Caps& caps) {
  Workspace ws = input;
  std::vector<ReportLine> out;
  auto emit = [&](const VerificationReport& r, const std::string& subject) {
    for (auto& l : flatten(r, subject)) out.push_back(std::move(l));
  };
  for (const auto& [name, P] : input.pcas) {
    ws.add_algebra(name + "/downset", downset_arrow_algebra(P, caps.downsets));
    emit(detail::property(ws.algebra(name + "/downset").compatible_with_joins(), "algebra.compatible-with-joins",
                          "downset algebra is not join compatible"),
         name + "/downset");
    emit(detail::property(ws.algebra(name + "/downset").modifiable(), "algebra.modifiable",
                          "downset algebra is not modifiable"),
         name + "/downset");
    if (P.size() <= 3) {
      ws.add_algebra(name + "/per", per_arrow_algebra(P, caps.downsets));
      emit(detail::property(ws.algebra(name + "/per").modifiable(), "algebra.modifiable", "PER algebra is not modifiable"),
           name + "/per");
    }
  }
  Checker checker(ws, seed, caps);
  for (const auto& [name, P] : ws.pcas) emit(checker.check_pca(P, {}), name);
  for (const auto& [name, f] : ws.pca_maps) {
    emit(checker.check_pca_map(f, {}), name);
    if (pca_morphism_check(f).passed()) {
      auto d = delta_unit(f.target);
      std::vector<Elem> t;
      for (Elem a : f.source.elements()) t.push_back(d(f(a)));
      auto ft = tilde(PcaMap(f.source, d.target, std::move(t)), f.target);
      emit(detail::property(is_implicative(ft), "pca.union-extension", "union extension is not implicative"), name);
    }
  }
  for (const auto& [name, A] : ws.algebras) {
    emit(checker.check_algebra(A, {}), name);
    if (!verify_algebra(A).passed()) continue;
    for (Elem c : A.elements()) {
      const std::string cn = A.name(c);
      std::pair<std::string, MorphismTable> fams[] = {{"guarded", nucleus_guarded(A, c)},
                                                      {"double", nucleus_double(A, c)},
                                                      {"peirce", nucleus_peirce(A, c)}};
      for (const auto& [fam, j] : fams) {
        std::string subj = name + "/" + fam + "(" + cn + ")";
        auto nr = check_nucleus(j);
        emit(nr, subj);
        if (nr.passed()) {
          emit(check_quotient(j), subj);
          emit(detail::property(classify(quotient_surjection(j)).surjection, "quotient.surjection",
                                "identity into the quotient is not a surjection"),
               subj);
        }
      }
    }
    if (A.size() <= caps.tripos_carrier) {
      for (std::size_t X = 0; X <= caps.index; ++X)
        for (std::size_t Y = 0; Y <= caps.index; ++Y)
          for (const auto& f : all_maps(X, Y)) emit(check_adjointness(A, f, seed), name + "/tripos");
      for (std::size_t Z = 1; Z <= caps.index; ++Z)
        for (std::size_t W = 0; W <= caps.index; ++W)
          for (std::size_t Y = 0; Y <= caps.index; ++Y)
            for (const auto& k : all_maps(W, Z))
              for (const auto& h : all_maps(Y, Z))
                emit(check_beck_chevalley(A, PullbackSquare::of(k, h), seed), name + "/tripos");
      emit(generic_element_check(A, caps.index, seed), name + "/tripos");
    }
    if (A.modifiable() && A.size() <= caps.modified_carrier) {
      auto M = modification(A);
      emit(check_sierpinski(M.sierpinski), name + "/sierpinski");
      emit(check_open_closed(M.sierpinski), name + "/sierpinski");
      emit(check_modified_predicates(M, 1, seed), name + "/modified");
      auto id = MorphismTable::identity(A);
      emit(check_lifts(id, id, M, M), name + "/modified");
    }
  }
  for (const auto& [name, f] : ws.morphisms) {
    bool nucleus = ws.nuclei.count(name) > 0;
    emit(checker.check_morphism(f, {}), name);
    if (nucleus) emit(checker.check_nucleus_subject(f), name);
    if (!is_implicative(f)) continue;
    auto found = find_right_adjoint(f, caps.adjoint);
    if (found.status == Status::inconclusive) emit(VerificationReport().add(Checker::adjoint_verdict(found)), name);
    if (!found.pair) continue;
    emit(VerificationReport().add(Checker::adjoint_verdict(found)), name);
    emit(is_regular(f, caps.regular), name);
    emit(check_factorization(*found.pair), name);
    const auto &A = f.source(), &B = f.target();
    if (A.modifiable() && B.modifiable() && A.size() <= caps.modified_carrier && B.size() <= caps.modified_carrier)
      emit(check_lifts(f, found.pair->h, modification(A), modification(B)), name);
  }
  for (const auto& [name, t] : ws.terms) emit(checker.check_term(t), name);
  canonical_order(out);
  return collapse(out);
}

/// Shipped fixture directory, fixed at build time.
inline std::filesystem::path fixture_dir() {
#ifdef ARROWLAB_FIXTURE_DIR
  return ARROWLAB_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

/// Loads every *.json file of a directory in name order.
inline void load_directory(Workspace& ws, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  ws.load_files(files);
}

}  // namespace arrowlab

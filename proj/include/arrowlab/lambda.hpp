#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arrowlab/algebra.hpp"

namespace arrowlab {

/// Untyped lambda term with constants referring to algebra elements by name.
class LambdaTerm {
 public:
  enum class Kind { var, app, abs, constant };

  static LambdaTerm var(std::string name) { return LambdaTerm(Kind::var, std::move(name), {}, {}); }
  static LambdaTerm constant(std::string name) { return LambdaTerm(Kind::constant, std::move(name), {}, {}); }
  static LambdaTerm app(LambdaTerm f, LambdaTerm a) { return LambdaTerm(Kind::app, {}, std::move(f), std::move(a)); }
  static LambdaTerm abs(std::string x, LambdaTerm body) {
    return LambdaTerm(Kind::abs, std::move(x), std::move(body), {});
  }

  Kind kind() const { return node_->kind; }
  /// Variable name, constant name, or the bound variable of an abstraction.
  const std::string& name() const { return node_->name; }
  LambdaTerm fun() const { return LambdaTerm(node_->left); }
  LambdaTerm arg() const { return LambdaTerm(node_->right); }
  LambdaTerm body() const { return LambdaTerm(node_->left); }

  std::size_t size() const {
    switch (kind()) {
      case Kind::app:
        return 1 + fun().size() + arg().size();
      case Kind::abs:
        return 1 + body().size();
      default:
        return 1;
    }
  }

  /// Free variables in order of first occurrence.
  std::vector<std::string> free_vars() const {
    std::vector<std::string> out, bound;
    collect_free(bound, out);
    return out;
  }

  /// Canonical form: `\x. M`, juxtaposition, parentheses only where needed.
  std::string to_string() const {
    switch (kind()) {
      case Kind::var:
        return name();
      case Kind::constant:
        return "#" + quote_constant(name());
      case Kind::abs:
        return "\\" + name() + ". " + body().to_string();
      case Kind::app: {
        std::string f = fun().to_string();
        if (fun().kind() == Kind::abs) f = "(" + f + ")";
        std::string a = arg().to_string();
        if (arg().kind() == Kind::app || arg().kind() == Kind::abs) a = "(" + a + ")";
        return f + " " + a;
      }
    }
    return {};
  }

  friend bool operator==(const LambdaTerm& a, const LambdaTerm& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name()) return false;
    switch (a.kind()) {
      case Kind::app:
        return a.fun() == b.fun() && a.arg() == b.arg();
      case Kind::abs:
        return a.body() == b.body();
      default:
        return true;
    }
  }

  static bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return true;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> left, right;
  };
  LambdaTerm() = default;
  explicit LambdaTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  LambdaTerm(Kind k, std::string name, LambdaTerm l, LambdaTerm r)
      : node_(std::make_shared<Node>(Node{k, std::move(name), std::move(l.node_), std::move(r.node_)})) {}

  static std::string quote_constant(const std::string& n) {
    bool plain = !n.empty();
    for (char c : n)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) plain = false;
    if (plain) return n;
    std::string out = "\"";
    for (char c : n) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }

  void collect_free(std::vector<std::string>& bound, std::vector<std::string>& out) const {
    switch (kind()) {
      case Kind::var:
        if (std::find(bound.begin(), bound.end(), name()) == bound.end() &&
            std::find(out.begin(), out.end(), name()) == out.end())
          out.push_back(name());
        break;
      case Kind::constant:
        break;
      case Kind::app:
        fun().collect_free(bound, out);
        arg().collect_free(bound, out);
        break;
      case Kind::abs:
        bound.push_back(name());
        body().collect_free(bound, out);
        bound.pop_back();
        break;
    }
  }

  std::shared_ptr<const Node> node_;
};

/// Grammar: `\x. M` or `λx. M` (body extends as far right as possible),
/// left-associative application by juxtaposition, parentheses, identifiers,
/// and constants `#name` or `#"any name"`.
inline LambdaTerm parse_lambda(std::string_view text) {
  std::size_t pos = 0;
  auto error = [&](const std::string& what) {
    return InputError("lambda syntax error at offset " + std::to_string(pos) + ": " + what);
  };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto at_lambda = [&] {
    return pos < text.size() && (text[pos] == '\\' || text.substr(pos, 2) == "\xCE\xBB");
  };
  auto ident = [&] {
    std::size_t start = pos;
    if (pos < text.size() && (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' || text[pos] == '\''))
        ++pos;
    }
    if (start == pos) throw error("expected identifier");
    return std::string(text.substr(start, pos - start));
  };

  auto term = [&](auto& self) -> LambdaTerm {
    skip();
    if (at_lambda()) {
      pos += text[pos] == '\\' ? 1 : 2;
      skip();
      std::string x = ident();
      skip();
      if (pos >= text.size() || text[pos] != '.') throw error("expected '.' after bound variable");
      ++pos;
      return LambdaTerm::abs(std::move(x), self(self));
    }
    std::optional<LambdaTerm> acc;
    while (true) {
      skip();
      if (pos >= text.size() || text[pos] == ')') break;
      LambdaTerm atom = [&]() -> LambdaTerm {
        if (at_lambda()) return self(self);
        if (text[pos] == '(') {
          ++pos;
          LambdaTerm inner = self(self);
          skip();
          if (pos >= text.size() || text[pos] != ')') throw error("expected ')'");
          ++pos;
          return inner;
        }
        if (text[pos] == '#') {
          ++pos;
          if (pos < text.size() && text[pos] == '"') {
            ++pos;
            std::string n;
            while (pos < text.size() && text[pos] != '"') {
              if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
              n += text[pos++];
            }
            if (pos >= text.size()) throw error("unterminated quoted constant");
            ++pos;
            return LambdaTerm::constant(std::move(n));
          }
          std::size_t start = pos;
          while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
          if (start == pos) throw error("expected constant name after '#'");
          return LambdaTerm::constant(std::string(text.substr(start, pos - start)));
        }
        return LambdaTerm::var(ident());
      }();
      acc = acc ? LambdaTerm::app(*acc, atom) : atom;
    }
    if (!acc) throw error(pos >= text.size() ? "unexpected end of input" : "unexpected ')'");
    return *acc;
  };
  LambdaTerm t = term(term);
  skip();
  if (pos != text.size()) throw error("unexpected '" + std::string(1, text[pos]) + "'");
  return t;
}

using Environment = std::map<std::string, Elem>;

namespace detail {

/// De Bruijn form: bound variables become indices so alpha-equivalent terms
/// compile to identical trees. Free variables and constants are resolved to
/// elements at compile time.
struct DbTerm {
  enum class Kind { bound, value, app, abs } kind;
  std::size_t index = 0;  // bound: de Bruijn index
  Elem value;             // value: resolved free variable or constant
  std::unique_ptr<DbTerm> left, right;
  std::size_t depth_needed = 0;  // number of enclosing binders the term reads
};

inline std::unique_ptr<DbTerm> compile(const ArrowAlgebra& A, const LambdaTerm& t, std::vector<std::string>& scope,
                                       const Environment& env) {
  auto d = std::make_unique<DbTerm>();
  switch (t.kind()) {
    case LambdaTerm::Kind::var: {
      for (std::size_t i = scope.size(); i-- > 0;)
        if (scope[i] == t.name()) {
          d->kind = DbTerm::Kind::bound;
          d->index = scope.size() - 1 - i;
          d->depth_needed = d->index + 1;
          return d;
        }
      auto it = env.find(t.name());
      if (it == env.end()) throw InputError("unbound variable '" + t.name() + "'");
      if (it->second.index >= A.size()) throw InputError("environment value out of range for '" + t.name() + "'");
      d->kind = DbTerm::Kind::value;
      d->value = it->second;
      return d;
    }
    case LambdaTerm::Kind::constant: {
      auto e = A.lattice().find(t.name());
      if (!e) throw InputError("unresolved constant '#" + t.name() + "'");
      d->kind = DbTerm::Kind::value;
      d->value = *e;
      return d;
    }
    case LambdaTerm::Kind::app:
      d->kind = DbTerm::Kind::app;
      d->left = compile(A, t.fun(), scope, env);
      d->right = compile(A, t.arg(), scope, env);
      d->depth_needed = std::max(d->left->depth_needed, d->right->depth_needed);
      return d;
    case LambdaTerm::Kind::abs:
      d->kind = DbTerm::Kind::abs;
      scope.push_back(t.name());
      d->left = compile(A, t.body(), scope, env);
      scope.pop_back();
      d->depth_needed = d->left->depth_needed > 0 ? d->left->depth_needed - 1 : 0;
      return d;
  }
  return d;
}

/// Evaluator with memoization keyed on the values of the variables a subterm
/// actually reads; nested abstractions otherwise cost |A|^depth.
class DbEvaluator {
 public:
  explicit DbEvaluator(const ArrowAlgebra& A) : A_(A) {}

  /// `ctx` holds bound values, innermost last.
  Elem eval(const DbTerm& t, std::vector<Elem>& ctx) {
    switch (t.kind) {
      case DbTerm::Kind::bound:
        return ctx[ctx.size() - 1 - t.index];
      case DbTerm::Kind::value:
        return t.value;
      case DbTerm::Kind::app:
        return A_.apply(eval(*t.left, ctx), eval(*t.right, ctx));
      case DbTerm::Kind::abs: {
        std::vector<std::uint32_t> key;
        key.reserve(t.depth_needed);
        for (std::size_t i = 0; i < t.depth_needed; ++i) key.push_back(ctx[ctx.size() - 1 - i].index);
        auto& table = memo_[&t];
        if (auto it = table.find(key); it != table.end()) return it->second;
        Elem m = A_.top();
        for (Elem b : A_.elements()) {
          ctx.push_back(b);
          Elem body = eval(*t.left, ctx);
          ctx.pop_back();
          m = A_.meet(m, A_.imp(b, A_.shift(body)));
        }
        table.emplace(std::move(key), m);
        return m;
      }
    }
    return A_.top();
  }

 private:
  const ArrowAlgebra& A_;
  std::map<const DbTerm*, std::map<std::vector<std::uint32_t>, Elem>> memo_;
};

}  // namespace detail

/// Variables project from the environment, application is the algebra's
/// application and abstraction is the algebra's abstraction of the body.
inline Elem interpret(const ArrowAlgebra& A, const LambdaTerm& t, const Environment& env = {}) {
  std::vector<std::string> scope;
  auto d = detail::compile(A, t, scope, env);
  detail::DbEvaluator ev(A);
  std::vector<Elem> ctx;
  return ev.eval(*d, ctx);
}

/// Passes iff the interpretation lies in the separator. Requires every
/// environment value to be separated.
inline VerificationReport check_separator_closure(const ArrowAlgebra& A, const LambdaTerm& t,
                                                  const Environment& env = {}, std::string subject = {}) {
  VerificationReport r(std::move(subject));
  for (const auto& [x, v] : env)
    if (v.index >= A.size() || !A.in_sep(v))
      throw InputError("environment value for '" + x + "' is not in the separator");
  Elem v = interpret(A, t, env);
  if (A.in_sep(v))
    r.add(Verdict::pass("lambda.separator-closure", {A.name(v)}, t.to_string()));
  else
    r.add(Verdict::fail("lambda.separator-closure", {t.to_string(), A.name(v)},
                        "interpretation " + A.name(v) + " is not separated"));
  return r;
}

/// Seeded generator of terms with at most `max_size` nodes. Free variables
/// are either abstracted or bound in the returned environment to separator
/// elements; constants are drawn from the separator.
class TermGenerator {
 public:
  TermGenerator(const ArrowAlgebra& A, std::uint64_t seed) : A_(A), rng_(seed), sep_(A.separator_elements()) {}

  std::pair<LambdaTerm, Environment> next(std::size_t max_size) {
    std::uniform_int_distribution<std::size_t> sz(1, max_size);
    std::size_t budget = sz(rng_);
    LambdaTerm t = gen(budget, 0);
    Environment env;
    auto free = t.free_vars();
    for (auto it = free.rbegin(); it != free.rend(); ++it) {
      if (t.size() < max_size && coin()) {
        t = LambdaTerm::abs(*it, t);
      } else {
        env[*it] = pick_sep();
      }
    }
    return {t, env};
  }

 private:
  bool coin() { return std::uniform_int_distribution<int>(0, 1)(rng_) == 1; }
  Elem pick_sep() { return sep_[std::uniform_int_distribution<std::size_t>(0, sep_.size() - 1)(rng_)]; }
  std::string var_name() {
    static const char* names[] = {"x", "y", "z", "w"};
    return names[std::uniform_int_distribution<int>(0, 3)(rng_)];
  }

  LambdaTerm gen(std::size_t budget, int depth) {
    if (budget <= 1) {
      if (std::uniform_int_distribution<int>(0, 4)(rng_) == 0) return LambdaTerm::constant(A_.name(pick_sep()));
      return LambdaTerm::var(var_name());
    }
    if (budget == 2 || coin()) return LambdaTerm::abs(var_name(), gen(budget - 1, depth + 1));
    std::size_t left = std::uniform_int_distribution<std::size_t>(1, budget - 2)(rng_);
    return LambdaTerm::app(gen(left, depth), gen(budget - 1 - left, depth));
  }

  const ArrowAlgebra& A_;
  std::mt19937_64 rng_;
  std::vector<Elem> sep_;
};

}  // namespace arrowlab

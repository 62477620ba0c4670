#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arrowlab/elem.hpp"

namespace arrowlab {

/// Finite complete lattice with a symbol table. Built from an order relation
/// and validated on construction: the relation must be a partial order in
/// which every subset has a greatest lower bound. Copies share storage.
class FiniteLattice {
 public:
  /// `leq` is row-major: leq[a * n + b] means a <= b.
  FiniteLattice(std::vector<std::string> names, std::vector<std::uint8_t> leq) {
    auto d = std::make_shared<Data>();
    d->n = names.size();
    d->names = std::move(names);
    d->leq = std::move(leq);
    build(*d);
    data_ = std::move(d);
  }

  /// Order generated by the reflexive-transitive closure of `covers`
  /// (pairs (a, b) meaning a <= b).
  static FiniteLattice from_hasse(std::vector<std::string> names,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& covers) {
    const std::size_t n = names.size();
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    for (auto [a, b] : covers) {
      if (a >= n || b >= n) throw InputError("hasse pair out of range");
      leq[a * n + b] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq[i * n + k])
          for (std::size_t j = 0; j < n; ++j)
            if (leq[k * n + j]) leq[i * n + j] = 1;
    return FiniteLattice(std::move(names), std::move(leq));
  }

  /// Chain 0 < 1 < ... < n-1 with names from `names` (or "0".."n-1").
  static FiniteLattice chain(std::size_t n, std::vector<std::string> names = {}) {
    if (names.empty())
      for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) leq[i * n + j] = 1;
    return FiniteLattice(std::move(names), std::move(leq));
  }

  /// Powerset of a `bits`-element set, ordered by inclusion; names are
  /// bitstrings such as "{0,2}".
  static FiniteLattice boolean(std::size_t bits) {
    const std::size_t n = std::size_t{1} << bits;
    std::vector<std::string> names;
    for (std::size_t m = 0; m < n; ++m) {
      std::string s = "{";
      bool first = true;
      for (std::size_t b = 0; b < bits; ++b)
        if (m >> b & 1) {
          if (!first) s += ',';
          s += std::to_string(b);
          first = false;
        }
      names.push_back(s + "}");
    }
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) leq[a * n + b] = (a & ~b) == 0;
    return FiniteLattice(std::move(names), std::move(leq));
  }

  /// bot < l, r < top.
  static FiniteLattice diamond() {
    return from_hasse({"bot", "l", "r", "top"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  }

  /// Family of subsets (bitmasks) ordered by inclusion, closed under
  /// intersection and containing the full union of the family. Meets are
  /// intersections; joins are the least member above the union. Avoids the
  /// cubic validation of the general constructor.
  static FiniteLattice of_sets(std::vector<std::string> names, const std::vector<std::uint64_t>& sets) {
    const std::size_t n = sets.size();
    if (names.size() != n) throw InputError("set lattice needs one name per set");
    auto d = std::make_shared<Data>();
    d->n = n;
    d->names = std::move(names);
    if (n == 0) throw StructureError("empty carrier has no top element", {});
    std::unordered_map<std::uint64_t, std::uint32_t> where;
    for (std::size_t i = 0; i < n; ++i) {
      if (!where.emplace(sets[i], static_cast<std::uint32_t>(i)).second)
        throw InputError("duplicate set in set lattice");
      if (!d->index.emplace(d->names[i], static_cast<std::uint32_t>(i)).second)
        throw InputError("duplicate element name '" + d->names[i] + "'");
    }
    std::uint64_t all = 0;
    for (auto m : sets) all |= m;
    auto top = where.find(all);
    if (top == where.end()) throw StructureError("set family has no top element", {});
    d->top = Elem{top->second};
    d->leq.assign(n * n, 0);
    d->meet.assign(n * n, Elem{});
    d->join.assign(n * n, Elem{});
    std::uint64_t none = all;
    for (auto m : sets) none &= m;
    auto bot = where.find(none);
    if (bot == where.end()) throw StructureError("set family has no bottom element", {});
    d->bottom = Elem{bot->second};
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        d->leq[a * n + b] = (sets[a] & ~sets[b]) == 0;
        auto it = where.find(sets[a] & sets[b]);
        if (it == where.end())
          throw StructureError("set family is not closed under intersection", {d->names[a], d->names[b]});
        d->meet[a * n + b] = Elem{it->second};
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        std::uint64_t u = sets[a] | sets[b];
        auto it = where.find(u);
        Elem j = d->top;
        if (it != where.end()) {
          j = Elem{it->second};
        } else {
          for (std::size_t c = 0; c < n; ++c)
            if ((u & ~sets[c]) == 0 && (sets[c] & ~sets[j.index]) == 0) j = Elem{c};
        }
        d->join[a * n + b] = d->join[b * n + a] = j;
      }
    FiniteLattice L;
    L.data_ = std::move(d);
    return L;
  }

  std::size_t size() const { return data_->n; }
  ElemRange elements() const { return ElemRange(data_->n); }

  bool leq(Elem a, Elem b) const { return data_->leq[a.index * data_->n + b.index] != 0; }
  Elem meet(Elem a, Elem b) const { return data_->meet[a.index * data_->n + b.index]; }
  Elem join(Elem a, Elem b) const { return data_->join[a.index * data_->n + b.index]; }
  Elem top() const { return data_->top; }
  Elem bottom() const { return data_->bottom; }

  /// Greatest lower bound; the empty meet is top.
  template <class Range>
  Elem meet_of(const Range& xs) const {
    Elem m = top();
    for (Elem x : xs) m = meet(m, x);
    return m;
  }
  /// Least upper bound; the empty join is bottom.
  template <class Range>
  Elem join_of(const Range& xs) const {
    Elem m = bottom();
    for (Elem x : xs) m = join(m, x);
    return m;
  }

  const std::string& name(Elem a) const { return data_->names[a.index]; }
  const std::vector<std::string>& names() const { return data_->names; }
  std::optional<Elem> find(std::string_view name) const {
    auto it = data_->index.find(std::string(name));
    if (it == data_->index.end()) return std::nullopt;
    return Elem{it->second};
  }
  Elem at(std::string_view name) const {
    if (auto e = find(name)) return *e;
    throw InputError("unknown element '" + std::string(name) + "'");
  }

  bool same_as(const FiniteLattice& other) const {
    if (data_ == other.data_) return true;
    return data_->names == other.data_->names && data_->leq == other.data_->leq;
  }

 private:
  FiniteLattice() = default;
  struct Data {
    std::size_t n = 0;
    std::vector<std::string> names;
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::uint8_t> leq;
    std::vector<Elem> meet, join;
    Elem top, bottom;
  };

  static void build(Data& d) {
    const std::size_t n = d.n;
    if (n == 0) throw StructureError("empty carrier has no top element", {});
    if (d.leq.size() != n * n) throw InputError("order relation has wrong dimensions");
    for (std::size_t i = 0; i < n; ++i) {
      if (!d.index.emplace(d.names[i], static_cast<std::uint32_t>(i)).second)
        throw InputError("duplicate element name '" + d.names[i] + "'");
    }
    auto le = [&](std::size_t a, std::size_t b) { return d.leq[a * n + b] != 0; };
    for (std::size_t a = 0; a < n; ++a) {
      if (!le(a, a)) throw StructureError("order is not reflexive", {d.names[a]});
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && le(a, b) && le(b, a))
          throw StructureError("order is not antisymmetric", {d.names[a], d.names[b]});
        if (!le(a, b)) continue;
        for (std::size_t c = 0; c < n; ++c)
          if (le(b, c) && !le(a, c))
            throw StructureError("order is not transitive", {d.names[a], d.names[b], d.names[c]});
      }
    }
    std::optional<std::size_t> top;
    for (std::size_t a = 0; a < n && !top; ++a) {
      bool all = true;
      for (std::size_t b = 0; b < n && all; ++b) all = le(b, a);
      if (all) top = a;
    }
    if (!top) throw StructureError("the empty subset has no greatest lower bound (no top)", {});
    d.top = Elem{*top};

    d.meet.assign(n * n, Elem{});
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        std::optional<std::size_t> best;
        for (std::size_t c = 0; c < n; ++c)
          if (le(c, a) && le(c, b) && (!best || le(*best, c))) best = c;
        bool ok = best.has_value();
        for (std::size_t c = 0; c < n && ok; ++c)
          if (le(c, a) && le(c, b) && !le(c, *best)) ok = false;
        if (!ok)
          throw StructureError("subset has no greatest lower bound", {d.names[a], d.names[b]});
        d.meet[a * n + b] = d.meet[b * n + a] = Elem{*best};
      }
    // Bottom is the meet of the whole carrier.
    Elem bot = d.top;
    for (std::size_t a = 0; a < n; ++a) bot = d.meet[bot.index * n + a];
    d.bottom = bot;

    // Joins: meet of upper bounds.
    d.join.assign(n * n, Elem{});
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        Elem j = d.top;
        for (std::size_t c = 0; c < n; ++c)
          if (le(a, c) && le(b, c)) j = d.meet[j.index * n + c];
        d.join[a * n + b] = d.join[b * n + a] = j;
      }
  }

  std::shared_ptr<const Data> data_;
};

}  // namespace arrowlab

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arrowlab {

/// Index of an element inside one finite carrier. Names live in the carrier's
/// symbol table; reports always print names.
struct Elem {
  std::uint32_t index = 0;

  constexpr Elem() = default;
  constexpr explicit Elem(std::uint32_t i) : index(i) {}
  constexpr explicit Elem(std::size_t i) : index(static_cast<std::uint32_t>(i)) {}
  constexpr explicit Elem(int i) : index(static_cast<std::uint32_t>(i)) {}

  friend constexpr auto operator<=>(Elem, Elem) = default;
};

/// Malformed input: bad table dimensions, unknown names, syntax errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A carrier that is not a finite complete lattice (or not a frame when one is
/// required). `witness` names the offending elements.
class StructureError : public InputError {
 public:
  StructureError(const std::string& what, std::vector<std::string> witness)
      : InputError(what), witness_(std::move(witness)) {}
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  std::vector<std::string> witness_;
};

/// Thrown when a construction's own post-condition check fails.
class LawViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration bound exceeded; callers turn this into an inconclusive verdict.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterable range [0, n) yielding Elem.
class ElemRange {
 public:
  class iterator {
   public:
    using value_type = Elem;
    using difference_type = std::ptrdiff_t;
    constexpr iterator() = default;
    constexpr explicit iterator(std::uint32_t i) : i_(i) {}
    constexpr Elem operator*() const { return Elem{i_}; }
    constexpr iterator& operator++() {
      ++i_;
      return *this;
    }
    constexpr iterator operator++(int) {
      auto t = *this;
      ++i_;
      return t;
    }
    friend constexpr bool operator==(iterator, iterator) = default;

   private:
    std::uint32_t i_ = 0;
  };
  constexpr explicit ElemRange(std::size_t n) : n_(static_cast<std::uint32_t>(n)) {}
  constexpr iterator begin() const { return iterator{0}; }
  constexpr iterator end() const { return iterator{n_}; }
  constexpr std::size_t size() const { return n_; }

 private:
  std::uint32_t n_;
};

}  // namespace arrowlab

template <>
struct std::hash<arrowlab::Elem> {
  std::size_t operator()(arrowlab::Elem e) const noexcept { return std::hash<std::uint32_t>{}(e.index); }
};

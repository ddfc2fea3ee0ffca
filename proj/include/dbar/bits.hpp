#ifndef DBAR_BITS_HPP
#define DBAR_BITS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dbar {

/// A finite binary string of past symbols, indexed by age: bit(0) is the
/// most recent symbol (lag -1), bit(i) the symbol at lag -(i+1).
///
/// Textual I/O uses chronological order, i.e. the string "x_{-k} ... x_{-1}"
/// with the most recent symbol last, matching how a path segment reads.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::vector<uint8_t> most_recent_first);

  /// Parses "0110"-style strings written oldest-to-newest.
  static Bits from_chronological(std::string_view s);
  std::string to_chronological() const;

  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  int bit(size_t i) const { return v_[i]; }

  /// Appends a symbol at lag -(size+1), i.e. one step further into the past.
  void push_older(int bit);

  /// The k most recent symbols.
  Bits prefix(size_t k) const;

  /// Age index of the most recent 1, if any.
  std::optional<size_t> first_one() const;
  bool all_zero() const { return !first_one().has_value(); }

  /// Packs the first `n` bits into an integer, bit i = symbol at lag -(i+1).
  uint32_t pack(size_t n) const;

  bool operator==(const Bits&) const = default;

 private:
  std::vector<uint8_t> v_;
};

/// Componentwise a <= b; requires equal lengths.
bool componentwise_leq(const Bits& a, const Bits& b);

}  // namespace dbar

#endif  // DBAR_BITS_HPP

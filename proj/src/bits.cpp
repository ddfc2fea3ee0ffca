#include "dbar/bits.hpp"

#include <stdexcept>

namespace dbar {

Bits::Bits(std::vector<uint8_t> most_recent_first) : v_(std::move(most_recent_first)) {
  for (uint8_t b : v_) {
    if (b > 1) throw std::invalid_argument("Bits: symbols must be 0 or 1");
  }
}

Bits Bits::from_chronological(std::string_view s) {
  Bits out;
  out.v_.reserve(s.size());
  // Chronological text ends with the most recent symbol, which lives at index 0.
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    if (*it == '0') {
      out.v_.push_back(0);
    } else if (*it == '1') {
      out.v_.push_back(1);
    } else {
      throw std::invalid_argument("Bits: expected a string of 0s and 1s, got '" +
                                  std::string(s) + "'");
    }
  }
  return out;
}

std::string Bits::to_chronological() const {
  std::string s(v_.size(), '0');
  for (size_t i = 0; i < v_.size(); ++i) {
    s[v_.size() - 1 - i] = v_[i] ? '1' : '0';
  }
  return s;
}

void Bits::push_older(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("Bits: symbols must be 0 or 1");
  v_.push_back(static_cast<uint8_t>(bit));
}

Bits Bits::prefix(size_t k) const {
  if (k > v_.size()) throw std::out_of_range("Bits::prefix: k exceeds length");
  return Bits(std::vector<uint8_t>(v_.begin(), v_.begin() + static_cast<ptrdiff_t>(k)));
}

std::optional<size_t> Bits::first_one() const {
  for (size_t i = 0; i < v_.size(); ++i) {
    if (v_[i]) return i;
  }
  return std::nullopt;
}

uint32_t Bits::pack(size_t n) const {
  if (n > 32 || n > v_.size()) throw std::out_of_range("Bits::pack: bad length");
  uint32_t code = 0;
  for (size_t i = 0; i < n; ++i) {
    code |= static_cast<uint32_t>(v_[i]) << i;
  }
  return code;
}

bool componentwise_leq(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a.bit(i) > b.bit(i)) return false;
  }
  return true;
}

}  // namespace dbar

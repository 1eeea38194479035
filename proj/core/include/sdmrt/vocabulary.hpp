#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sdmrt {

using TokenId = std::uint32_t;

// Interned token strings. Ids are dense, start with the five reserved
// symbols, and never change once assigned.
class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kNull = 2;
  static constexpr TokenId kMask = 3;
  static constexpr TokenId kUnk = 4;
  static constexpr TokenId kNumReserved = 5;

  Vocabulary();

  // Returns the id of `token`, interning it if new. Throws on a reserved
  // symbol string or a token containing whitespace.
  TokenId add(std::string_view token);

  std::optional<TokenId> find(std::string_view token) const;
  TokenId lookup_or_unk(std::string_view token) const;
  const std::string& token(TokenId id) const;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }
  bool contains(TokenId id) const noexcept { return id < tokens_.size(); }

  static bool is_reserved(TokenId id) noexcept { return id < kNumReserved; }
  static bool is_reserved_symbol(std::string_view token) noexcept;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace sdmrt

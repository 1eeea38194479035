#include "sdmrt/vocabulary.hpp"

#include <array>

#include "sdmrt/error.hpp"

namespace sdmrt {

namespace {

constexpr std::array<std::string_view, Vocabulary::kNumReserved> kReserved = {
    "<s>", "</s>", "<null>", "<mask>", "<unk>"};

}  // namespace

Vocabulary::Vocabulary() {
  for (auto sym : kReserved) {
    ids_.emplace(std::string(sym), static_cast<TokenId>(tokens_.size()));
    tokens_.emplace_back(sym);
  }
}

bool Vocabulary::is_reserved_symbol(std::string_view token) noexcept {
  for (auto sym : kReserved)
    if (sym == token) return true;
  return false;
}

TokenId Vocabulary::add(std::string_view token) {
  if (token.empty()) throw Error("empty token");
  if (is_reserved_symbol(token))
    throw Error("token '" + std::string(token) + "' collides with a reserved symbol");
  if (token.find_first_of(" \t\r\n") != std::string_view::npos)
    throw Error("token contains whitespace");
  auto it = ids_.find(std::string(token));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::lookup_or_unk(std::string_view token) const {
  auto id = find(token);
  return id ? *id : kUnk;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw Error("token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

}  // namespace sdmrt

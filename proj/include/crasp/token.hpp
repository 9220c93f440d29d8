#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crasp {

using SymbolId = std::uint32_t;

struct Token {
  enum class Kind : std::uint8_t { Finite, Signpost };

  Kind kind = Kind::Finite;
  std::uint64_t value = 0;  // symbol id or signpost index

  static Token finite(SymbolId id) { return {Kind::Finite, id}; }
  static Token signpost(std::uint64_t index) { return {Kind::Signpost, index}; }

  bool is_signpost() const { return kind == Kind::Signpost; }
  bool is_finite() const { return kind == Kind::Finite; }
  SymbolId symbol() const { return static_cast<SymbolId>(value); }

  friend auto operator<=>(const Token&, const Token&) = default;
};

struct TokenHash {
  std::size_t operator()(const Token& t) const noexcept {
    std::uint64_t h = t.value * 0x9E3779B97F4A7C15ull;
    return static_cast<std::size_t>(h ^ (h >> 29) ^ static_cast<std::uint64_t>(t.kind));
  }
};

using TokenSeq = std::vector<Token>;

// Ordered finite alphabet. Ids are dense and follow declaration order.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(const std::vector<std::string>& names);

  // Returns the id of name, adding it if absent.
  SymbolId add(std::string_view name);
  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId at(std::string_view name) const;  // throws TokenError
  const std::string& name(SymbolId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const { return find(name).has_value(); }
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> index_;
};

// "<n>" with n a positive natural.
std::optional<std::uint64_t> parse_signpost_text(std::string_view text);

std::string token_text(const SymbolTable& alphabet, const Token& t);
std::string tokens_text(const SymbolTable& alphabet, std::span<const Token> ts);

// Whitespace-separated tokens. A whitespace-free word that is not a known
// symbol is split into characters when every character is a known symbol.
TokenSeq parse_tokens(const SymbolTable& alphabet, std::string_view text);

}  // namespace crasp

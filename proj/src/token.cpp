#include "crasp/token.hpp"

#include <charconv>
#include <sstream>

#include "crasp/error.hpp"

namespace crasp {

SymbolTable::SymbolTable(const std::vector<std::string>& names) {
  for (const auto& n : names) add(n);
}

SymbolId SymbolTable::add(std::string_view name) {
  if (auto id = find(name)) return *id;
  auto id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolId SymbolTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw TokenError("unknown symbol '" + std::string(name) + "'");
}

std::optional<std::uint64_t> parse_signpost_text(std::string_view text) {
  if (text.size() < 3 || text.front() != '<' || text.back() != '>') return std::nullopt;
  auto digits = text.substr(1, text.size() - 2);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || p != digits.data() + digits.size() || v == 0) return std::nullopt;
  return v;
}

std::string token_text(const SymbolTable& alphabet, const Token& t) {
  if (t.is_signpost()) return "<" + std::to_string(t.value) + ">";
  return alphabet.name(t.symbol());
}

std::string tokens_text(const SymbolTable& alphabet, std::span<const Token> ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ' ';
    out += token_text(alphabet, ts[i]);
  }
  return out;
}

TokenSeq parse_tokens(const SymbolTable& alphabet, std::string_view text) {
  TokenSeq out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (auto sp = parse_signpost_text(word)) {
      out.push_back(Token::signpost(*sp));
      continue;
    }
    if (auto id = alphabet.find(word)) {
      out.push_back(Token::finite(*id));
      continue;
    }
    TokenSeq chars;
    for (char c : word) {
      auto id = alphabet.find(std::string_view(&c, 1));
      if (!id) throw TokenError("unknown token '" + word + "'");
      chars.push_back(Token::finite(*id));
    }
    out.insert(out.end(), chars.begin(), chars.end());
  }
  return out;
}

}  // namespace crasp

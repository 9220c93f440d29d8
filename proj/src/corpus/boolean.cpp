#include "crasp/corpus/boolean.hpp"

#include <mutex>
#include <sstream>

#include "crasp/error.hpp"

namespace crasp::corpus {

namespace {

const BigInt& counts(std::size_t n) {
  static std::mutex mu;
  static std::vector<BigInt> table{0, 2};
  std::lock_guard lock(mu);
  while (table.size() <= n) {
    std::size_t m = table.size();
    BigInt t = table[m - 1];
    BigInt pairs = 0;
    for (std::size_t a = 1; a + 1 < m; ++a) pairs += table[a] * table[m - 1 - a];
    t += 2 * pairs;
    table.push_back(t);
  }
  return table[n];
}

void append(BoolAst& out, const BoolAst& part, std::int32_t shift) {
  for (auto n : part.nodes) {
    if (n.left >= 0) n.left += shift;
    if (n.right >= 0) n.right += shift;
    out.nodes.push_back(n);
  }
}

const char* op_name(BoolKind k) { return k == BoolKind::And ? "AND" : "OR"; }

}  // namespace

std::vector<bool> BoolAst::values() const {
  std::vector<bool> v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    switch (n.kind) {
      case BoolKind::Literal: v[k] = n.value; break;
      case BoolKind::Not: v[k] = !v[n.left]; break;
      case BoolKind::And: v[k] = v[n.left] && v[n.right]; break;
      case BoolKind::Or: v[k] = v[n.left] || v[n.right]; break;
    }
  }
  return v;
}

BoolAst BoolAst::literal(bool v) {
  BoolAst f;
  f.nodes.push_back({BoolKind::Literal, v, -1, -1});
  return f;
}

BoolAst BoolAst::negation(const BoolAst& c) {
  BoolAst f = c;
  f.nodes.push_back({BoolKind::Not, false, c.root(), -1});
  return f;
}

BoolAst BoolAst::binary(BoolKind op, const BoolAst& l, const BoolAst& r) {
  BoolAst f = l;
  append(f, r, static_cast<std::int32_t>(l.size()));
  f.nodes.push_back({op, false, l.root(), static_cast<std::int32_t>(l.size()) + r.root()});
  return f;
}

BigInt count_formulas(std::size_t n) {
  if (n == 0) throw Error("count_formulas: size must be >= 1");
  return counts(n);
}

// Rank order within size n: NOT f (by rank of f), then AND over splits a =
// 1..n-2, then OR over the same splits; within a split, left rank major.
BoolAst unrank_formula(std::size_t n, BigInt rank) {
  if (n == 0) throw Error("unrank_formula: size must be >= 1");
  if (rank < 0 || rank >= counts(n)) throw Error("unrank_formula: rank out of range");
  if (n == 1) return BoolAst::literal(rank == 1);
  if (rank < counts(n - 1)) return BoolAst::negation(unrank_formula(n - 1, rank));
  rank -= counts(n - 1);
  for (BoolKind op : {BoolKind::And, BoolKind::Or})
    for (std::size_t a = 1; a + 1 < n; ++a) {
      std::size_t b = n - 1 - a;
      BigInt block = counts(a) * counts(b);
      if (rank < block) {
        BigInt l = rank / counts(b), r = rank % counts(b);
        return BoolAst::binary(op, unrank_formula(a, l), unrank_formula(b, r));
      }
      rank -= block;
    }
  throw Error("unrank_formula: internal count mismatch");
}

namespace {

std::size_t subtree_size(const BoolAst& f, std::int32_t k) {
  std::size_t s = 1;
  const auto& n = f.nodes[k];
  if (n.left >= 0) s += subtree_size(f, n.left);
  if (n.right >= 0) s += subtree_size(f, n.right);
  return s;
}

BigInt rank_at(const BoolAst& f, std::int32_t k) {
  const auto& node = f.nodes[k];
  std::size_t n = subtree_size(f, k);
  switch (node.kind) {
    case BoolKind::Literal: return node.value ? 1 : 0;
    case BoolKind::Not: return rank_at(f, node.left);
    default: break;
  }
  BigInt base = counts(n - 1);
  std::size_t a = subtree_size(f, node.left), b = n - 1 - a;
  for (BoolKind op : {BoolKind::And, BoolKind::Or})
    for (std::size_t s = 1; s + 1 < n; ++s) {
      if (op == node.kind && s == a) return base + rank_at(f, node.left) * counts(b) + rank_at(f, node.right);
      base += counts(s) * counts(n - 1 - s);
    }
  throw Error("rank_formula: malformed tree");
}

}  // namespace

BigInt rank_formula(const BoolAst& f) {
  if (f.nodes.empty()) throw Error("rank_formula: empty tree");
  return rank_at(f, f.root());
}

BoolAst sample_formula(std::size_t n, Rng& rng) {
  const BigInt total = count_formulas(n);
  const std::size_t bits = msb(total) + 1;
  for (;;) {
    BigInt r = 0;
    for (std::size_t got = 0; got < bits; got += 64) r = (r << 64) | BigInt(rng.next());
    r &= (BigInt(1) << bits) - 1;
    if (r < total) return unrank_formula(n, r);
  }
}

namespace {

void naive(const BoolAst& f, std::int32_t k, std::string& out) {
  const auto& n = f.nodes[k];
  switch (n.kind) {
    case BoolKind::Literal: out += n.value ? "true" : "false"; return;
    case BoolKind::Not:
      out += "NOT ";
      naive(f, n.left, out);
      return;
    default:
      out += "( ";
      naive(f, n.left, out);
      out += ' ';
      out += op_name(n.kind);
      out += ' ';
      naive(f, n.right, out);
      out += " )";
  }
}

void signpost(const BoolAst& f, std::int32_t k, std::uint64_t offset, std::string& out) {
  const auto& n = f.nodes[k];
  auto sp = [&](std::int32_t idx) { return "<" + std::to_string(offset + static_cast<std::uint64_t>(idx)) + ">"; };
  switch (n.kind) {
    case BoolKind::Literal:
      out += sp(k) + (n.value ? " true" : " false");
      return;
    case BoolKind::Not:
      out += "[ " + sp(n.left) + " ] " + sp(k) + " NOT ";
      signpost(f, n.left, offset, out);
      return;
    default:
      out += "( ";
      signpost(f, n.left, offset, out);
      out += " [ " + sp(n.left) + " , " + sp(n.right) + " ] " + sp(k) + ' ' + op_name(n.kind) + ' ';
      signpost(f, n.right, offset, out);
      out += " )";
  }
}

}  // namespace

std::string render_naive(const BoolAst& f) {
  std::string out;
  naive(f, f.root(), out);
  return out;
}

std::string render_signpost(const BoolAst& f, std::uint64_t offset) {
  std::string out;
  signpost(f, f.root(), offset, out);
  return out;
}

namespace {

// Grammar: or := and (OR and)*; and := not (AND not)*; not := NOT not | atom;
// atom := true | false | ( or ). Signposts and [ ... ] groups are skipped.
class BoolParser {
 public:
  explicit BoolParser(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string t;
    bool in_group = false;
    while (in >> t) {
      if (t == "[") {
        if (in_group) throw Error("nested signpost group");
        in_group = true;
      } else if (t == "]") {
        if (!in_group) throw Error("unbalanced ']'");
        in_group = false;
      } else if (!in_group && !(t.size() > 2 && t.front() == '<' && t.back() == '>')) {
        toks_.push_back(t);
      }
    }
    if (in_group) throw Error("unterminated signpost group");
  }

  bool run() {
    bool v = disj();
    if (pos_ != toks_.size()) throw Error("unexpected token '" + toks_[pos_] + "'");
    return v;
  }

 private:
  bool disj() {
    bool v = conj();
    while (peek("OR")) {
      ++pos_;
      bool w = conj();
      v = v || w;
    }
    return v;
  }
  bool conj() {
    bool v = neg();
    while (peek("AND")) {
      ++pos_;
      bool w = neg();
      v = v && w;
    }
    return v;
  }
  bool neg() {
    if (peek("NOT")) {
      ++pos_;
      return !neg();
    }
    return atom();
  }
  bool atom() {
    if (pos_ >= toks_.size()) throw Error("unexpected end of formula");
    const auto& t = toks_[pos_++];
    if (t == "true") return true;
    if (t == "false") return false;
    if (t == "(") {
      bool v = disj();
      if (!peek(")")) throw Error("missing ')'");
      ++pos_;
      return v;
    }
    throw Error("unexpected token '" + t + "'");
  }
  bool peek(const char* s) const { return pos_ < toks_.size() && toks_[pos_] == s; }

  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool parse_and_evaluate(std::string_view text) { return BoolParser(text).run(); }

}  // namespace crasp::corpus

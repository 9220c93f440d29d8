#include <algorithm>
#include <unordered_map>

#include "crasp/error.hpp"
#include "crasp/evaluate.hpp"
#include "detail.hpp"

namespace crasp {

namespace {

enum class Op : std::uint8_t {
  Query, Not, And, Or, Periodic, Const, Cmp, CountTop, CountOffset, Match, Cond, Add, Sub
};

struct Node {
  Op op;
  CompareOp cmp = CompareOp::Le;
  std::uint32_t a = 0, b = 0, c = 0;
  std::int64_t k = 0;  // constant, symbol id, offset, modulus or match slot
  std::int64_t r = 0;  // residue
};

constexpr std::uint32_t kNone = UINT32_MAX;

}  // namespace

class EvalPlan {
 public:
  explicit EvalPlan(const Program& p) : program(p) {
    for (const auto& d : p.defs()) def_node.push_back(lower(d.expr));
    ring_size.assign(nodes.size(), 0);
    for (const auto& n : nodes)
      if (n.op == Op::CountOffset && n.k > 0)
        ring_size[n.a] = std::max<std::uint32_t>(ring_size[n.a], static_cast<std::uint32_t>(n.k) + 1);
    ring_start.assign(nodes.size(), 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ring_start[i] = total;
      total += ring_size[i];
    }
    ring_total = total;
  }

  Program program;
  std::vector<Node> nodes;
  std::vector<std::uint32_t> def_node;
  struct MatchSpec {
    std::vector<MatchConjunct> conjuncts;
    std::uint32_t pred = kNone;
  };
  std::vector<MatchSpec> matches;
  std::vector<std::uint32_t> ring_size;
  std::vector<std::size_t> ring_start;
  std::size_t ring_total = 0;

 private:
  std::unordered_map<const Expr*, std::uint32_t> memo_;

  std::uint32_t push(Node n) {
    nodes.push_back(n);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  std::uint32_t lower(const ExprPtr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    std::uint32_t id = std::visit(
        [&](const auto& x) -> std::uint32_t {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Expr::SymbolQuery>) {
            return push({Op::Query, {}, 0, 0, 0, x.symbol, 0});
          } else if constexpr (std::is_same_v<T, Expr::Ref>) {
            return def_node.at(x.def);
          } else if constexpr (std::is_same_v<T, Expr::Not>) {
            return push({Op::Not, {}, lower(x.operand), 0, 0, 0, 0});
          } else if constexpr (std::is_same_v<T, Expr::And>) {
            auto l = lower(x.lhs), r = lower(x.rhs);
            return push({Op::And, {}, l, r, 0, 0, 0});
          } else if constexpr (std::is_same_v<T, Expr::Or>) {
            auto l = lower(x.lhs), r = lower(x.rhs);
            return push({Op::Or, {}, l, r, 0, 0, 0});
          } else if constexpr (std::is_same_v<T, Expr::Periodic>) {
            return push({Op::Periodic, {}, 0, 0, 0, x.modulus, x.residue});
          } else if constexpr (std::is_same_v<T, Expr::BoolConst>) {
            return push({Op::Const, {}, 0, 0, 0, x.value, 0});
          } else if constexpr (std::is_same_v<T, Expr::Compare>) {
            auto l = lower(x.lhs), r = lower(x.rhs);
            return push({Op::Cmp, x.op, l, r, 0, 0, 0});
          } else if constexpr (std::is_same_v<T, Expr::Count>) {
            auto p = lower(x.predicate);
            if (!x.relation.offset) return push({Op::CountTop, {}, p, 0, 0, 0, 0});
            return push({Op::CountOffset, {}, p, 0, 0, *x.relation.offset, 0});
          } else if constexpr (std::is_same_v<T, Expr::MatchCount>) {
            MatchSpec m{x.conjuncts, x.predicate ? lower(x.predicate) : kNone};
            matches.push_back(std::move(m));
            return push({Op::Match, {}, 0, 0, 0, static_cast<std::int64_t>(matches.size() - 1), 0});
          } else if constexpr (std::is_same_v<T, Expr::Conditional>) {
            auto g = lower(x.guard), a = lower(x.then_branch), b = lower(x.else_branch);
            return push({Op::Cond, {}, g, a, b, 0, 0});
          } else if constexpr (std::is_same_v<T, Expr::Arith>) {
            auto l = lower(x.lhs), r = lower(x.rhs);
            return push({x.op == ArithOp::Add ? Op::Add : Op::Sub, {}, l, r, 0, 0, 0});
          } else {
            return push({Op::Const, {}, 0, 0, 0, x.value, 0});
          }
        },
        e->node);
    memo_.emplace(e.get(), id);
    return id;
  }
};

std::shared_ptr<const EvalPlan> make_plan(const Program& p) {
  return std::make_shared<const EvalPlan>(p);
}

std::size_t IncrementalState::KeyHash::operator()(const std::vector<Token>& k) const noexcept {
  std::size_t h = k.size();
  TokenHash th;
  for (const auto& t : k) h = h * 0x100000001B3ull ^ th(t);
  return h;
}

IncrementalState::IncrementalState(std::shared_ptr<const EvalPlan> plan)
    : plan_(std::move(plan)),
      values_(plan_->nodes.size(), 0),
      scratch_(plan_->nodes.size(), 0),
      history_(plan_->ring_total, 0),
      match_(plan_->matches.size()) {}

IncrementalState::IncrementalState(const Program& p) : IncrementalState(make_plan(p)) {}
IncrementalState::IncrementalState(IncrementalState&&) noexcept = default;
IncrementalState& IncrementalState::operator=(IncrementalState&&) noexcept = default;
IncrementalState::IncrementalState(const IncrementalState&) = default;
IncrementalState::~IncrementalState() = default;

const Program& IncrementalState::program() const { return plan_->program; }

std::int64_t IncrementalState::value(std::size_t def) const {
  if (tokens_.empty()) throw Error("no position evaluated yet");
  return values_[plan_->def_node.at(def)];
}

namespace {

// Neighbourhood key of position j for insertion; false if out of range.
bool source_key(std::span<const Token> w, std::size_t j, const std::vector<MatchConjunct>& cs,
                std::vector<Token>& key) {
  key.clear();
  for (const auto& c : cs) {
    if (j <= c.source_offset) return false;
    key.push_back(w[j - c.source_offset - 1]);
  }
  return true;
}

// Key that a source position must carry to match query position i.
bool query_key(std::span<const Token> w, std::size_t i, const std::vector<MatchConjunct>& cs,
               std::vector<Token>& key) {
  key.clear();
  for (const auto& c : cs) {
    if (i <= c.query_offset) return false;
    Token b = w[i - c.query_offset - 1];
    if (c.shift != 0) {
      if (!b.is_signpost()) return false;
      std::int64_t v = static_cast<std::int64_t>(b.value) + c.shift;
      if (v < 1) return false;
      b = Token::signpost(static_cast<std::uint64_t>(v));
    }
    key.push_back(b);
  }
  return true;
}

}  // namespace

void IncrementalState::append(Token t) {
  const auto& plan = *plan_;
  check_token(plan.program, t);
  const std::size_t i = tokens_.size() + 1;
  tokens_.push_back(t);
  std::vector<std::vector<Token>> inserts(plan.matches.size());
  std::vector<bool> insert_ok(plan.matches.size(), false);
  try {
    std::vector<Token> qk;
    auto& cur = scratch_;
    for (std::size_t n = 0; n < plan.nodes.size(); ++n) {
      const Node& nd = plan.nodes[n];
      std::int64_t v = 0;
      switch (nd.op) {
        case Op::Query: v = t.is_finite() && t.value == static_cast<std::uint64_t>(nd.k); break;
        case Op::Not: v = !cur[nd.a]; break;
        case Op::And: v = cur[nd.a] && cur[nd.b]; break;
        case Op::Or: v = cur[nd.a] || cur[nd.b]; break;
        case Op::Periodic: v = static_cast<std::int64_t>(i % nd.k) == nd.r; break;
        case Op::Const: v = nd.k; break;
        case Op::Cmp: v = detail::compare(nd.cmp, cur[nd.a], cur[nd.b]); break;
        case Op::CountTop: v = detail::checked_add(values_[n], cur[nd.a] != 0); break;
        case Op::CountOffset: {
          auto d = static_cast<std::size_t>(nd.k);
          if (d == 0) v = cur[nd.a] != 0;
          else if (i > d) v = history_[plan.ring_start[nd.a] + (i - d) % plan.ring_size[nd.a]] != 0;
          break;
        }
        case Op::Match: {
          auto slot = static_cast<std::size_t>(nd.k);
          const auto& ms = plan.matches[slot];
          bool pred = ms.pred == kNone || cur[ms.pred] != 0;
          insert_ok[slot] = pred && source_key(tokens_, i, ms.conjuncts, inserts[slot]);
          if (query_key(tokens_, i, ms.conjuncts, qk)) {
            auto it = match_[slot].find(qk);
            if (it != match_[slot].end()) v = it->second;
            if (insert_ok[slot] && inserts[slot] == qk) ++v;
          }
          break;
        }
        case Op::Cond: v = cur[nd.a] ? cur[nd.b] : cur[nd.c]; break;
        case Op::Add: v = detail::checked_add(cur[nd.a], cur[nd.b]); break;
        case Op::Sub: v = detail::checked_sub(cur[nd.a], cur[nd.b]); break;
      }
      cur[n] = v;
    }
  } catch (...) {
    tokens_.pop_back();
    throw;
  }
  std::swap(values_, scratch_);
  for (std::size_t n = 0; n < plan.nodes.size(); ++n)
    if (plan.ring_size[n]) history_[plan.ring_start[n] + i % plan.ring_size[n]] = values_[n];
  for (std::size_t s = 0; s < match_.size(); ++s)
    if (insert_ok[s]) ++match_[s][std::move(inserts[s])];
}

}  // namespace crasp

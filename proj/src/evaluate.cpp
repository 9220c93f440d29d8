#include "crasp/evaluate.hpp"

#include "crasp/error.hpp"
#include "detail.hpp"

namespace crasp {

std::int64_t EvaluationTable::at(std::string_view name, std::size_t position) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k].at(position - 1);
  throw Error("no definition '" + std::string(name) + "'");
}

void check_token(const Program& p, const Token& t) {
  if (t.is_signpost()) {
    if (p.dialect() != Dialect::CStarRasp)
      throw DialectError("signpost token in a finite-alphabet program");
    if (t.value == 0) throw TokenError("signpost index must be positive");
    return;
  }
  if (t.value >= p.alphabet().size()) throw TokenError("finite token outside the alphabet");
}

namespace detail {

bool conjunct_holds(std::span<const Token> w, std::size_t i, std::size_t j,
                    const MatchConjunct& c) {
  if (j <= c.source_offset || i <= c.query_offset) return false;
  const Token& a = w[j - c.source_offset - 1];
  const Token& b = w[i - c.query_offset - 1];
  if (c.shift == 0) return a == b;
  if (!a.is_signpost() || !b.is_signpost()) return false;
  return static_cast<std::int64_t>(b.value) + c.shift == static_cast<std::int64_t>(a.value);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("count overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("count overflow");
  return r;
}

bool compare(CompareOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CompareOp::Le: return a <= b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Eq: return a == b;
  }
  return false;
}

}  // namespace detail

namespace {

using Column = std::vector<std::int64_t>;

class BatchEvaluator {
 public:
  BatchEvaluator(const Program& p, std::span<const Token> w) : p_(p), w_(w) {}

  Column column(const Expr& e) {
    const std::size_t n = w_.size();
    Column out(n, 0);
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Expr::SymbolQuery>) {
            for (std::size_t i = 0; i < n; ++i)
              out[i] = w_[i].is_finite() && w_[i].symbol() == x.symbol;
          } else if constexpr (std::is_same_v<T, Expr::Ref>) {
            out = table_.at(x.def);
          } else if constexpr (std::is_same_v<T, Expr::Not>) {
            auto a = column(*x.operand);
            for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
          } else if constexpr (std::is_same_v<T, Expr::And>) {
            auto a = column(*x.lhs), b = column(*x.rhs);
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] && b[i];
          } else if constexpr (std::is_same_v<T, Expr::Or>) {
            auto a = column(*x.lhs), b = column(*x.rhs);
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] || b[i];
          } else if constexpr (std::is_same_v<T, Expr::Periodic>) {
            for (std::size_t i = 0; i < n; ++i) out[i] = (i + 1) % x.modulus == x.residue;
          } else if constexpr (std::is_same_v<T, Expr::BoolConst>) {
            for (auto& v : out) v = x.value;
          } else if constexpr (std::is_same_v<T, Expr::Compare>) {
            auto a = column(*x.lhs), b = column(*x.rhs);
            for (std::size_t i = 0; i < n; ++i) out[i] = detail::compare(x.op, a[i], b[i]);
          } else if constexpr (std::is_same_v<T, Expr::Count>) {
            auto pred = column(*x.predicate);
            if (!x.relation.offset) {
              std::int64_t acc = 0;
              for (std::size_t i = 0; i < n; ++i) out[i] = acc += pred[i];
            } else {
              std::size_t d = *x.relation.offset;
              for (std::size_t i = d; i < n; ++i) out[i] = pred[i - d];
            }
          } else if constexpr (std::is_same_v<T, Expr::MatchCount>) {
            Column pred(n, 1);
            if (x.predicate) pred = column(*x.predicate);
            for (std::size_t i = 1; i <= n; ++i) {
              std::int64_t c = 0;
              for (std::size_t j = 1; j <= i; ++j) {
                if (!pred[j - 1]) continue;
                bool all = true;
                for (const auto& k : x.conjuncts)
                  if (!detail::conjunct_holds(w_, i, j, k)) { all = false; break; }
                c += all;
              }
              out[i - 1] = c;
            }
          } else if constexpr (std::is_same_v<T, Expr::Conditional>) {
            auto g = column(*x.guard), a = column(*x.then_branch), b = column(*x.else_branch);
            for (std::size_t i = 0; i < n; ++i) out[i] = g[i] ? a[i] : b[i];
          } else if constexpr (std::is_same_v<T, Expr::Arith>) {
            auto a = column(*x.lhs), b = column(*x.rhs);
            for (std::size_t i = 0; i < n; ++i)
              out[i] = x.op == ArithOp::Add ? detail::checked_add(a[i], b[i])
                                            : detail::checked_sub(a[i], b[i]);
          } else {
            for (auto& v : out) v = x.value;
          }
        },
        e.node);
    return out;
  }

  EvaluationTable run() {
    EvaluationTable t;
    for (const auto& d : p_.defs()) {
      table_.push_back(column(*d.expr));
      t.names.push_back(d.name);
      t.types.push_back(d.expr->type);
    }
    t.values = std::move(table_);
    return t;
  }

 private:
  const Program& p_;
  std::span<const Token> w_;
  std::vector<Column> table_;
};

}  // namespace

EvaluationTable evaluate(const Program& p, std::span<const Token> w) {
  if (w.empty()) throw Error("evaluate needs a nonempty token sequence");
  for (const auto& t : w) check_token(p, t);
  return BatchEvaluator(p, w).run();
}

}  // namespace crasp

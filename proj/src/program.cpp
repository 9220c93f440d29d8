#include "crasp/program.hpp"

#include <cctype>
#include <stdexcept>

#include "crasp/error.hpp"

namespace crasp {

std::string_view dialect_name(Dialect d) {
  switch (d) {
    case Dialect::Crasp: return "CRASP";
    case Dialect::CraspPos: return "CRASP_POS";
    case Dialect::CStarRasp: return "CSTAR_RASP";
  }
  return "?";
}

std::optional<Dialect> dialect_from_name(std::string_view s) {
  if (s == "CRASP") return Dialect::Crasp;
  if (s == "CRASP_POS") return Dialect::CraspPos;
  if (s == "CSTAR_RASP") return Dialect::CStarRasp;
  return std::nullopt;
}

namespace {

ExprPtr make(Expr::Node n, ValueType t) {
  return std::make_shared<const Expr>(Expr{std::move(n), t});
}

void need(const ExprPtr& e, ValueType t, const char* what) {
  if (!e) throw std::invalid_argument(std::string(what) + ": missing operand");
  if (e->type != t) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                (t == ValueType::Bool ? "Boolean" : "count") + " operand");
  }
}

bool eq(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index() || a.type != b.type) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Expr::SymbolQuery>) return x.symbol == y.symbol;
        else if constexpr (std::is_same_v<T, Expr::Ref>) return x.def == y.def;
        else if constexpr (std::is_same_v<T, Expr::Not>) return eq(x.operand, y.operand);
        else if constexpr (std::is_same_v<T, Expr::And> || std::is_same_v<T, Expr::Or>)
          return eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, Expr::Periodic>)
          return x.modulus == y.modulus && x.residue == y.residue;
        else if constexpr (std::is_same_v<T, Expr::BoolConst>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, Expr::Compare>)
          return x.op == y.op && eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, Expr::Count>)
          return x.relation == y.relation && eq(x.predicate, y.predicate);
        else if constexpr (std::is_same_v<T, Expr::MatchCount>)
          return x.conjuncts == y.conjuncts && eq(x.predicate, y.predicate);
        else if constexpr (std::is_same_v<T, Expr::Conditional>)
          return eq(x.guard, y.guard) && eq(x.then_branch, y.then_branch) &&
                 eq(x.else_branch, y.else_branch);
        else if constexpr (std::is_same_v<T, Expr::Arith>)
          return x.op == y.op && eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
        else return x.value == y.value;
      },
      a.node);
}

bool is_pointwise(const Expr& e) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Count> || std::is_same_v<T, Expr::MatchCount>)
          return false;
        else if constexpr (std::is_same_v<T, Expr::Not>) return is_pointwise(*x.operand);
        else if constexpr (std::is_same_v<T, Expr::And> || std::is_same_v<T, Expr::Or> ||
                           std::is_same_v<T, Expr::Compare> || std::is_same_v<T, Expr::Arith>)
          return is_pointwise(*x.lhs) && is_pointwise(*x.rhs);
        else if constexpr (std::is_same_v<T, Expr::Conditional>)
          return is_pointwise(*x.guard) && is_pointwise(*x.then_branch) &&
                 is_pointwise(*x.else_branch);
        else return true;
      },
      e.node);
}

namespace ex {

ExprPtr q(SymbolId s) { return make(Expr::SymbolQuery{s}, ValueType::Bool); }
ExprPtr ref(std::size_t def, ValueType t) { return make(Expr::Ref{def}, t); }

ExprPtr not_(ExprPtr e) {
  need(e, ValueType::Bool, "not");
  return make(Expr::Not{std::move(e)}, ValueType::Bool);
}

ExprPtr and_(ExprPtr a, ExprPtr b) {
  need(a, ValueType::Bool, "and");
  need(b, ValueType::Bool, "and");
  return make(Expr::And{std::move(a), std::move(b)}, ValueType::Bool);
}

ExprPtr or_(ExprPtr a, ExprPtr b) {
  need(a, ValueType::Bool, "or");
  need(b, ValueType::Bool, "or");
  return make(Expr::Or{std::move(a), std::move(b)}, ValueType::Bool);
}

ExprPtr periodic(std::uint32_t m, std::uint32_t r) {
  if (m == 0) throw std::invalid_argument("periodic: modulus must be at least 1");
  if (r >= m) throw std::invalid_argument("periodic: residue must be below the modulus");
  return make(Expr::Periodic{m, r}, ValueType::Bool);
}

ExprPtr truth(bool v) { return make(Expr::BoolConst{v}, ValueType::Bool); }

ExprPtr cmp(CompareOp op, ExprPtr a, ExprPtr b) {
  need(a, ValueType::Count, "comparison");
  need(b, ValueType::Count, "comparison");
  return make(Expr::Compare{op, std::move(a), std::move(b)}, ValueType::Bool);
}

ExprPtr count(LocalRelation rel, ExprPtr pred) {
  need(pred, ValueType::Bool, "count predicate");
  if (!is_pointwise(*pred)) throw std::invalid_argument("count predicate may not contain counts");
  return make(Expr::Count{rel, std::move(pred)}, ValueType::Count);
}

ExprPtr match(std::vector<MatchConjunct> conj, ExprPtr pred) {
  if (conj.empty()) throw std::invalid_argument("match: needs at least one conjunct");
  if (pred) {
    need(pred, ValueType::Bool, "match predicate");
    if (!is_pointwise(*pred)) throw std::invalid_argument("match predicate may not contain counts");
  }
  return make(Expr::MatchCount{std::move(conj), std::move(pred)}, ValueType::Count);
}

ExprPtr cond(ExprPtr g, ExprPtr a, ExprPtr b) {
  need(g, ValueType::Bool, "conditional guard");
  need(a, ValueType::Count, "conditional branch");
  need(b, ValueType::Count, "conditional branch");
  return make(Expr::Conditional{std::move(g), std::move(a), std::move(b)}, ValueType::Count);
}

ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b) {
  need(a, ValueType::Count, "arithmetic");
  need(b, ValueType::Count, "arithmetic");
  return make(Expr::Arith{op, std::move(a), std::move(b)}, ValueType::Count);
}

ExprPtr lit(std::int64_t v) {
  if (v < 0) throw std::invalid_argument("integer literal must be nonnegative");
  return make(Expr::IntConst{v}, ValueType::Count);
}

ExprPtr any_of(const std::vector<ExprPtr>& es) {
  if (es.empty()) return truth(false);
  ExprPtr acc = es.front();
  for (std::size_t i = 1; i < es.size(); ++i) acc = or_(acc, es[i]);
  return acc;
}

ExprPtr all_of(const std::vector<ExprPtr>& es) {
  if (es.empty()) return truth(true);
  ExprPtr acc = es.front();
  for (std::size_t i = 1; i < es.size(); ++i) acc = and_(acc, es[i]);
  return acc;
}

ExprPtr sum(const std::vector<ExprPtr>& es) {
  if (es.empty()) return lit(0);
  ExprPtr acc = es.front();
  for (std::size_t i = 1; i < es.size(); ++i) acc = arith(ArithOp::Add, acc, es[i]);
  return acc;
}

}  // namespace ex

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

namespace {

bool reserved_name(std::string_view s) {
  static const char* words[] = {"and", "or", "not", "if", "then", "else", "true", "false",
                                "top", "periodic", "i", "j", "OUTPUT", "OUTPUT_SIGNPOST",
                                "dialect", "alphabet", "input", "sep", "eos"};
  for (auto* w : words)
    if (s == w) return true;
  return s.size() >= 2 && s[0] == 'Q' && s[1] == '_';
}

void validate(const Expr& e, Dialect d, const SymbolTable& alphabet,
              const std::vector<Definition>& defs, std::size_t self) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::SymbolQuery>) {
          if (x.symbol >= alphabet.size()) throw TokenError("symbol id out of range");
        } else if constexpr (std::is_same_v<T, Expr::Ref>) {
          if (x.def >= self) throw ParseError("reference to a later definition", 0, 0);
          if (defs[x.def].expr->type != e.type)
            throw ParseError("reference type mismatch for '" + defs[x.def].name + "'", 0, 0);
        } else if constexpr (std::is_same_v<T, Expr::Not>) {
          validate(*x.operand, d, alphabet, defs, self);
        } else if constexpr (std::is_same_v<T, Expr::And> || std::is_same_v<T, Expr::Or> ||
                             std::is_same_v<T, Expr::Compare> || std::is_same_v<T, Expr::Arith>) {
          validate(*x.lhs, d, alphabet, defs, self);
          validate(*x.rhs, d, alphabet, defs, self);
        } else if constexpr (std::is_same_v<T, Expr::Periodic>) {
          if (d != Dialect::CraspPos)
            throw DialectError("periodic positional predicates need dialect CRASP_POS");
        } else if constexpr (std::is_same_v<T, Expr::Count>) {
          if (x.relation.offset && d == Dialect::Crasp)
            throw DialectError("local offset relations are not part of dialect CRASP");
          validate(*x.predicate, d, alphabet, defs, self);
        } else if constexpr (std::is_same_v<T, Expr::MatchCount>) {
          if (d != Dialect::CStarRasp)
            throw DialectError("match counts need dialect CSTAR_RASP");
          if (x.predicate) validate(*x.predicate, d, alphabet, defs, self);
        } else if constexpr (std::is_same_v<T, Expr::Conditional>) {
          validate(*x.guard, d, alphabet, defs, self);
          validate(*x.then_branch, d, alphabet, defs, self);
          validate(*x.else_branch, d, alphabet, defs, self);
        }
      },
      e.node);
}

}  // namespace

Program::Program(Dialect dialect, SymbolTable alphabet, std::vector<Definition> defs)
    : dialect_(dialect), alphabet_(std::move(alphabet)), defs_(std::move(defs)) {
  for (const auto& s : alphabet_.names()) {
    if (s.empty()) throw TokenError("empty symbol name");
    if (parse_signpost_text(s)) throw TokenError("symbol '" + s + "' collides with signpost syntax");
  }
  for (std::size_t k = 0; k < defs_.size(); ++k) {
    check_definition(dialect_, alphabet_, defs_, k);
    if (!index_.emplace(defs_[k].name, k).second)
      throw ParseError("duplicate definition '" + defs_[k].name + "'", 0, 0);
  }
}

void Program::check_definition(Dialect dialect, const SymbolTable& alphabet,
                               const std::vector<Definition>& defs, std::size_t k) {
  const auto& d = defs.at(k);
  if (!is_identifier(d.name) || reserved_name(d.name))
    throw ParseError("invalid definition name '" + d.name + "'", 0, 0);
  if (!d.expr) throw ParseError("definition '" + d.name + "' has no expression", 0, 0);
  validate(*d.expr, dialect, alphabet, defs, k);
}

std::optional<std::size_t> Program::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const Program& a, const Program& b) {
  if (a.dialect_ != b.dialect_ || !(a.alphabet_ == b.alphabet_) ||
      a.defs_.size() != b.defs_.size())
    return false;
  for (std::size_t k = 0; k < a.defs_.size(); ++k) {
    if (a.defs_[k].name != b.defs_[k].name) return false;
    if (!structurally_equal(*a.defs_[k].expr, *b.defs_[k].expr)) return false;
  }
  return true;
}

ExprPtr ProgramBuilder::define(std::string name, ExprPtr e) {
  if (index_.count(name)) throw std::invalid_argument("duplicate definition '" + name + "'");
  auto t = e->type;
  std::size_t k = defs_.size();
  index_.emplace(name, k);
  defs_.push_back({std::move(name), std::move(e)});
  return ex::ref(k, t);
}

ExprPtr ProgramBuilder::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::invalid_argument("no definition '" + std::string(name) + "'");
  return ex::ref(it->second, defs_[it->second].expr->type);
}

}  // namespace crasp

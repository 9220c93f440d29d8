#include "crasp/dsl.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>

#include "crasp/error.hpp"

namespace crasp {

namespace {

bool is_delim(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
         c == ']' || c == ',' || c == ';' || c == '"';
}

// Strips a trailing comment, honouring quoted symbols.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    else if (line[k] == ';' && !quoted) return line.substr(0, k);
  }
  return line;
}

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ + 1); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const {
    throw ParseError(msg, line_, pos + 1);
  }

  std::size_t line() const { return line_; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::size_t pos() {
    skip_ws();
    return pos_;
  }
  std::string_view rest() {
    skip_ws();
    return s_.substr(pos_);
  }

  bool try_lit(std::string_view lit) {
    skip_ws();
    if (s_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view lit) {
    if (!try_lit(lit)) fail("expected '" + std::string(lit) + "'");
  }

  bool peek_ident_start() {
    skip_ws();
    return pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_');
  }
  std::string peek_ident() {
    auto save = pos_;
    std::string id = peek_ident_start() ? read_ident() : "";
    pos_ = save;
    return id;
  }
  // Keyword match requiring a word boundary.
  bool try_word(std::string_view w) {
    auto save = pos_;
    if (peek_ident_start() && read_ident() == w) return true;
    pos_ = save;
    return false;
  }
  std::string read_ident() {
    skip_ws();
    auto start = pos_;
    if (!peek_ident_start()) fail("expected identifier");
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  std::int64_t read_int(bool allow_sign = false) {
    skip_ws();
    auto start = pos_;
    bool neg = false;
    if (allow_sign && pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || p == s_.data() + pos_) fail_at("expected integer", start);
    pos_ = static_cast<std::size_t>(p - s_.data());
    return neg ? -v : v;
  }
  bool peek_digit() {
    skip_ws();
    return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
  }
  std::string read_symbol() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected symbol");
    if (s_[pos_] == '"') {
      auto end = s_.find('"', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated quoted symbol");
      std::string sym(s_.substr(pos_ + 1, end - pos_ - 1));
      if (sym.empty()) fail("empty symbol");
      pos_ = end + 1;
      return sym;
    }
    auto start = pos_;
    if (s_[pos_] == '<') {
      auto k = pos_ + 1;
      while (k < s_.size() && s_[k] != '>' && !is_delim(s_[k])) ++k;
      if (k < s_.size() && s_[k] == '>') {
        pos_ = k + 1;
        return std::string(s_.substr(start, pos_ - start));
      }
    }
    while (pos_ < s_.size() && !is_delim(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected symbol");
    return std::string(s_.substr(start, pos_ - start));
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct Clauses {
  std::vector<std::pair<std::string, std::string>> outputs;  // symbol, guard
  struct Sig {
    std::uint32_t k;
    std::int32_t d;
    std::string guard;
    std::size_t line;
  };
  std::vector<Sig> signposts;
  std::vector<std::size_t> output_lines;
  std::optional<std::vector<std::string>> input;
  std::optional<std::string> sep, eos;
  std::size_t first_cot_line = 0;
};

class Parser {
 public:
  Program program;
  Clauses clauses;

  void parse(std::string_view source) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
      auto end = source.find('\n', start);
      if (end == std::string_view::npos) end = source.size();
      ++line_no;
      auto line = strip_comment(source.substr(start, end - start));
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      Cursor c(line, line_no);
      if (!c.at_end()) statement(c, line_no);
      start = end + 1;
    }
    if (!dialect_) throw ParseError("missing 'dialect' line", 0, 0);
    program = Program(*dialect_, alphabet_, std::move(defs_));
  }

 private:
  std::optional<Dialect> dialect_;
  bool have_alphabet_ = false;
  SymbolTable alphabet_;
  std::vector<Definition> defs_;
  std::unordered_map<std::string, std::size_t> names_;

  void statement(Cursor& c, std::size_t line_no) {
    auto word = c.peek_ident();
    if (word == "dialect") {
      c.read_ident();
      if (dialect_) c.fail("duplicate 'dialect' line");
      auto name = c.read_ident();
      dialect_ = dialect_from_name(name);
      if (!dialect_) c.fail("unknown dialect '" + name + "'");
    } else if (word == "alphabet") {
      c.read_ident();
      if (have_alphabet_) c.fail("duplicate 'alphabet' line");
      if (!defs_.empty()) c.fail("'alphabet' must precede definitions");
      have_alphabet_ = true;
      while (!c.at_end()) {
        auto at = c.pos();
        auto s = c.read_symbol();
        if (alphabet_.contains(s)) c.fail_at("duplicate symbol '" + s + "'", at);
        if (parse_signpost_text(s)) c.fail_at("symbol '" + s + "' looks like a signpost", at);
        alphabet_.add(s);
      }
    } else if (word == "input") {
      c.read_ident();
      if (clauses.input) c.fail("duplicate 'input' line");
      note_cot(line_no);
      std::vector<std::string> syms;
      while (!c.at_end()) syms.push_back(c.read_symbol());
      clauses.input = std::move(syms);
    } else if (word == "sep" || word == "eos") {
      c.read_ident();
      note_cot(line_no);
      auto& slot = word == "sep" ? clauses.sep : clauses.eos;
      if (slot) c.fail("duplicate '" + word + "' line");
      slot = c.read_symbol();
    } else if (word == "OUTPUT") {
      c.read_ident();
      note_cot(line_no);
      c.expect("(");
      auto sym = c.read_symbol();
      c.expect(")");
      c.expect(":=");
      auto guard = c.read_ident();
      if (!c.at_end()) c.fail("trailing text");
      clauses.outputs.emplace_back(sym, guard);
      clauses.output_lines.push_back(line_no);
    } else if (word == "OUTPUT_SIGNPOST") {
      c.read_ident();
      note_cot(line_no);
      c.expect("(");
      auto k = c.read_int();
      c.expect(",");
      auto d = c.read_int(true);
      c.expect(")");
      c.expect(":=");
      auto guard = c.read_ident();
      if (!c.at_end()) c.fail("trailing text");
      if (k < 1 || k > UINT32_MAX) c.fail("anchor offset out of range");
      if (d < -1 || d > 1) c.fail("direction must be -1, 0 or +1");
      clauses.signposts.push_back(
          {static_cast<std::uint32_t>(k), static_cast<std::int32_t>(d), guard, line_no});
    } else {
      definition(c);
    }
  }

  void note_cot(std::size_t line_no) {
    if (!clauses.first_cot_line) clauses.first_cot_line = line_no;
  }

  void definition(Cursor& c) {
    if (!dialect_) c.fail("'dialect' must precede definitions");
    auto at = c.pos();
    auto name = c.read_ident();
    c.expect("(");
    if (!c.try_word("i")) c.fail("definitions are written Name(i)");
    c.expect(")");
    c.expect(":=");
    auto e = expr(c, "i");
    if (!c.at_end()) c.fail("unexpected text '" + std::string(c.rest()) + "'");
    if (!is_identifier(name) || (name.size() >= 2 && name[0] == 'Q' && name[1] == '_'))
      c.fail_at("invalid definition name '" + name + "'", at);
    if (names_.count(name)) c.fail_at("duplicate definition '" + name + "'", at);
    names_.emplace(name, defs_.size());
    defs_.push_back({std::move(name), std::move(e)});
    try {
      Program::check_definition(*dialect_, alphabet_, defs_, defs_.size() - 1);
    } catch (const DialectError& err) {
      throw DialectError("line " + std::to_string(c.line()) + ": " + err.what());
    } catch (const ParseError& err) {
      c.fail_at(err.what(), at);
    }
  }

  template <class F>
  ExprPtr typed(Cursor& c, std::size_t at, F&& make) {
    try {
      return make();
    } catch (const std::invalid_argument& err) {
      c.fail_at(err.what(), at);
    }
  }

  ExprPtr expr(Cursor& c, const std::string& var) {
    auto at = c.pos();
    if (c.try_word("if")) {
      auto g = expr(c, var);
      if (!c.try_word("then")) c.fail("expected 'then'");
      auto a = expr(c, var);
      if (!c.try_word("else")) c.fail("expected 'else'");
      auto b = expr(c, var);
      return typed(c, at, [&] { return ex::cond(g, a, b); });
    }
    return disj(c, var);
  }

  ExprPtr disj(Cursor& c, const std::string& var) {
    auto lhs = conj(c, var);
    for (;;) {
      auto at = c.pos();
      if (!c.try_word("or")) return lhs;
      auto rhs = conj(c, var);
      lhs = typed(c, at, [&] { return ex::or_(lhs, rhs); });
    }
  }

  ExprPtr conj(Cursor& c, const std::string& var) {
    auto lhs = negation(c, var);
    for (;;) {
      auto at = c.pos();
      if (!c.try_word("and")) return lhs;
      auto rhs = negation(c, var);
      lhs = typed(c, at, [&] { return ex::and_(lhs, rhs); });
    }
  }

  ExprPtr negation(Cursor& c, const std::string& var) {
    auto at = c.pos();
    if (c.try_word("not")) {
      auto e = negation(c, var);
      return typed(c, at, [&] { return ex::not_(e); });
    }
    return comparison(c, var);
  }

  ExprPtr comparison(Cursor& c, const std::string& var) {
    auto lhs = sum(c, var);
    auto at = c.pos();
    std::optional<CompareOp> op;
    if (c.try_lit("<=")) op = CompareOp::Le;
    else if (c.try_lit(">=")) op = CompareOp::Ge;
    else if (c.try_lit("<")) op = CompareOp::Lt;
    else if (c.try_lit(">")) op = CompareOp::Gt;
    else if (c.try_lit("=")) op = CompareOp::Eq;
    if (!op) return lhs;
    auto rhs = sum(c, var);
    return typed(c, at, [&] { return ex::cmp(*op, lhs, rhs); });
  }

  ExprPtr sum(Cursor& c, const std::string& var) {
    auto lhs = atom(c, var);
    for (;;) {
      auto at = c.pos();
      std::optional<ArithOp> op;
      if (c.try_lit("+")) op = ArithOp::Add;
      else if (c.try_lit("-")) op = ArithOp::Sub;
      if (!op) return lhs;
      auto rhs = atom(c, var);
      lhs = typed(c, at, [&] { return ex::arith(*op, lhs, rhs); });
    }
  }

  void position_arg(Cursor& c, const std::string& var) {
    c.expect("(");
    auto at = c.pos();
    if (!c.try_word(var)) c.fail_at("expected position variable '" + var + "'", at);
    c.expect(")");
  }

  ExprPtr symbol_query(Cursor& c, const std::string& var) {
    auto at = c.pos();
    auto sym = c.read_symbol();
    auto id = alphabet_.find(sym);
    if (!id) c.fail_at("unknown symbol '" + sym + "'", at);
    position_arg(c, var);
    return ex::q(*id);
  }

  bool predicate_follows(Cursor& c) {
    auto r = c.rest();
    if (r.empty()) return false;
    if (r[0] == '(') return true;
    if (r.substr(0, 2) == "Q_") return true;
    auto w = c.peek_ident();
    if (w.empty()) return false;
    return w != "and" && w != "or" && w != "then" && w != "else";
  }

  ExprPtr predicate(Cursor& c) {
    auto at = c.pos();
    auto p = atom(c, "j");
    if (p->type != ValueType::Bool) c.fail_at("count predicate must be Boolean", at);
    if (!is_pointwise(*p)) c.fail_at("count predicate may not contain counts", at);
    return p;
  }

  ExprPtr atom(Cursor& c, const std::string& var) {
    auto at = c.pos();
    if (c.try_lit("#match[")) {
      std::vector<MatchConjunct> conj;
      do {
        c.expect("(");
        auto d = c.read_int();
        c.expect(",");
        auto g = c.read_int();
        c.expect(",");
        auto t = c.read_int(true);
        c.expect(")");
        if (d < 0 || g < 0 || d > UINT32_MAX || g > UINT32_MAX) c.fail_at("offset out of range", at);
        if (t < INT32_MIN || t > INT32_MAX) c.fail_at("shift out of range", at);
        conj.push_back({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(g),
                        static_cast<std::int32_t>(t)});
      } while (c.try_lit(","));
      c.expect("]");
      ExprPtr pred = predicate_follows(c) ? predicate(c) : nullptr;
      return typed(c, at, [&] { return ex::match(conj, pred); });
    }
    if (c.try_lit("#[")) {
      if (!c.try_word("j")) c.fail("expected 'j<=i'");
      c.expect("<=");
      if (!c.try_word("i")) c.fail("expected 'j<=i'");
      LocalRelation rel;
      if (c.try_lit(",")) {
        if (c.try_word("top")) {
        } else {
          if (!c.try_word("i")) c.fail("expected 'top' or 'i=j+<nat>'");
          c.expect("=");
          if (!c.try_word("j")) c.fail("expected 'i=j+<nat>'");
          std::int64_t d = 0;
          if (c.try_lit("+")) d = c.read_int();
          if (d < 0 || d > UINT32_MAX) c.fail("offset out of range");
          rel.offset = static_cast<std::uint32_t>(d);
        }
      }
      c.expect("]");
      auto pred = predicate(c);
      return typed(c, at, [&] { return ex::count(rel, pred); });
    }
    if (c.try_lit("(")) {
      auto e = expr(c, var);
      c.expect(")");
      return e;
    }
    if (c.peek_digit()) return ex::lit(c.read_int());
    if (c.rest().substr(0, 2) == "Q_") {
      c.try_lit("Q_");
      return symbol_query(c, var);
    }
    if (c.try_word("true")) return ex::truth(true);
    if (c.try_word("false")) return ex::truth(false);
    if (c.try_word("periodic")) {
      c.expect("[");
      auto m = c.read_int();
      c.expect(",");
      auto r = c.read_int();
      c.expect("]");
      position_arg(c, var);
      if (m < 1 || m > UINT32_MAX || r < 0 || r >= m) c.fail_at("invalid periodic predicate", at);
      return ex::periodic(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(r));
    }
    if (c.peek_ident_start()) {
      auto name = c.read_ident();
      auto it = names_.find(name);
      if (it == names_.end()) c.fail_at("undefined name or forward reference '" + name + "'", at);
      position_arg(c, var);
      return ex::ref(it->second, defs_[it->second].expr->type);
    }
    c.fail("expected expression");
  }
};

SymbolId cot_symbol(const SymbolTable& a, const std::string& s, std::size_t line) {
  auto id = a.find(s);
  if (!id) throw ParseError("unknown symbol '" + s + "'", line, 1);
  return *id;
}

}  // namespace

Program parse_program(std::string_view source) {
  Parser p;
  p.parse(source);
  if (p.clauses.first_cot_line)
    throw ParseError("CoT lines in a plain program (parse it as a CoT program)",
                     p.clauses.first_cot_line, 1);
  return std::move(p.program);
}

CotProgram parse_cot_program(std::string_view source) {
  Parser p;
  p.parse(source);
  const auto& a = p.program.alphabet();
  const auto& cl = p.clauses;
  std::vector<SymbolId> input;
  if (cl.input)
    for (const auto& s : *cl.input) input.push_back(cot_symbol(a, s, cl.first_cot_line));
  auto sep = cot_symbol(a, cl.sep.value_or("<SEP>"), 0);
  auto eos = cot_symbol(a, cl.eos.value_or("<EOS>"), 0);
  auto guard = [&](const std::string& name, std::size_t line) {
    auto g = p.program.find(name);
    if (!g) throw ParseError("unknown guard '" + name + "'", line, 1);
    return *g;
  };
  std::vector<OutputClause> outs;
  for (std::size_t k = 0; k < cl.outputs.size(); ++k) {
    const auto& [sym, g] = cl.outputs[k];
    outs.push_back({cot_symbol(a, sym, cl.output_lines[k]), guard(g, cl.output_lines[k])});
  }
  std::vector<SignpostClause> sigs;
  for (const auto& s : cl.signposts) sigs.push_back({s.k, s.d, guard(s.guard, s.line)});
  return CotProgram(std::move(p.program), std::move(input), std::move(outs), std::move(sigs), sep, eos);
}

std::string render_symbol(std::string_view s) {
  bool bare = !s.empty();
  for (char c : s)
    if (is_delim(c)) bare = false;
  if (bare && s.front() == '<') {
    auto k = s.find('>');
    if (k != std::string_view::npos && k + 1 != s.size()) bare = false;
  }
  if (bare) return std::string(s);
  if (s.find('"') != std::string_view::npos || s.find('\n') != std::string_view::npos ||
      s.find(';') != std::string_view::npos)
    throw TokenError("symbol '" + std::string(s) + "' cannot be written in the DSL");
  return "\"" + std::string(s) + "\"";
}

namespace {

std::string_view op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Le: return "<=";
    case CompareOp::Lt: return "<";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
    case CompareOp::Eq: return "=";
  }
  return "?";
}

class Renderer {
 public:
  explicit Renderer(const Program& p) : p_(p) {}

  // Precedence: 0 if, 1 or, 2 and, 3 not, 4 comparison, 5 sum, 6 atom.
  std::string render(const Expr& e, int ctx, std::string_view var) {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Expr::SymbolQuery>) {
            return "Q_" + render_symbol(p_.alphabet().name(x.symbol)) + "(" + std::string(var) + ")";
          } else if constexpr (std::is_same_v<T, Expr::Ref>) {
            return p_.defs().at(x.def).name + "(" + std::string(var) + ")";
          } else if constexpr (std::is_same_v<T, Expr::Not>) {
            return wrap("not " + render(*x.operand, 3, var), ctx > 3);
          } else if constexpr (std::is_same_v<T, Expr::And>) {
            return wrap(render(*x.lhs, 2, var) + " and " + render(*x.rhs, 3, var), ctx > 2);
          } else if constexpr (std::is_same_v<T, Expr::Or>) {
            return wrap(render(*x.lhs, 1, var) + " or " + render(*x.rhs, 2, var), ctx > 1);
          } else if constexpr (std::is_same_v<T, Expr::Periodic>) {
            return "periodic[" + std::to_string(x.modulus) + "," + std::to_string(x.residue) + "](" +
                   std::string(var) + ")";
          } else if constexpr (std::is_same_v<T, Expr::BoolConst>) {
            return x.value ? "true" : "false";
          } else if constexpr (std::is_same_v<T, Expr::Compare>) {
            return wrap(render(*x.lhs, 5, var) + " " + std::string(op_text(x.op)) + " " +
                            render(*x.rhs, 5, var),
                        ctx > 4);
          } else if constexpr (std::is_same_v<T, Expr::Count>) {
            std::string rel;
            if (x.relation.offset) {
              rel = *x.relation.offset ? ", i=j+" + std::to_string(*x.relation.offset) : ", i=j";
            }
            return "#[j<=i" + rel + "] " + predicate(*x.predicate);
          } else if constexpr (std::is_same_v<T, Expr::MatchCount>) {
            std::string s = "#match[";
            for (std::size_t k = 0; k < x.conjuncts.size(); ++k) {
              const auto& c = x.conjuncts[k];
              if (k) s += ",";
              s += "(" + std::to_string(c.source_offset) + "," + std::to_string(c.query_offset) + "," +
                   (c.shift > 0 ? "+" : "") + std::to_string(c.shift) + ")";
            }
            s += "]";
            if (x.predicate) s += " " + predicate(*x.predicate);
            return s;
          } else if constexpr (std::is_same_v<T, Expr::Conditional>) {
            return wrap("if " + render(*x.guard, 0, var) + " then " + render(*x.then_branch, 0, var) +
                            " else " + render(*x.else_branch, 0, var),
                        ctx > 0);
          } else if constexpr (std::is_same_v<T, Expr::Arith>) {
            return wrap(render(*x.lhs, 5, var) + (x.op == ArithOp::Add ? " + " : " - ") +
                            render(*x.rhs, 6, var),
                        ctx > 5);
          } else {
            return std::to_string(x.value);
          }
        },
        e.node);
  }

 private:
  const Program& p_;

  static std::string wrap(std::string s, bool paren) { return paren ? "(" + s + ")" : s; }

  std::string predicate(const Expr& e) {
    bool simple = std::holds_alternative<Expr::SymbolQuery>(e.node) ||
                  std::holds_alternative<Expr::Ref>(e.node) ||
                  std::holds_alternative<Expr::BoolConst>(e.node) ||
                  std::holds_alternative<Expr::Periodic>(e.node);
    if (simple) return render(e, 6, "j");
    return "(" + render(e, 0, "j") + ")";
  }
};

void render_header(std::ostringstream& out, const Program& p) {
  out << "dialect " << dialect_name(p.dialect()) << "\n";
  out << "alphabet";
  for (const auto& s : p.alphabet().names()) out << " " << render_symbol(s);
  out << "\n";
}

void render_defs(std::ostringstream& out, const Program& p) {
  Renderer r(p);
  for (const auto& d : p.defs()) out << d.name << "(i) := " << r.render(*d.expr, 0, "i") << "\n";
}

}  // namespace

std::string render_expr(const Program& p, const Expr& e, std::string_view var) {
  return Renderer(p).render(e, 0, var);
}

std::string render_program(const Program& p) {
  std::ostringstream out;
  render_header(out, p);
  render_defs(out, p);
  return out.str();
}

std::string render_cot_program(const CotProgram& cp) {
  const auto& p = cp.base();
  const auto& a = p.alphabet();
  std::ostringstream out;
  render_header(out, p);
  out << "input";
  for (auto s : cp.input_alphabet()) out << " " << render_symbol(a.name(s));
  out << "\n";
  out << "sep " << render_symbol(a.name(cp.sep())) << "\n";
  out << "eos " << render_symbol(a.name(cp.eos())) << "\n";
  render_defs(out, p);
  for (const auto& c : cp.outputs())
    out << "OUTPUT(" << render_symbol(a.name(c.target)) << ") := " << p.defs()[c.guard].name << "\n";
  for (const auto& c : cp.signpost_outputs())
    out << "OUTPUT_SIGNPOST(" << c.anchor_offset << ", " << (c.direction > 0 ? "+" : "")
        << c.direction << ") := " << p.defs()[c.guard].name << "\n";
  return out.str();
}

}  // namespace crasp

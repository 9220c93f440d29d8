#include "crasp/tm_compiler.hpp"

#include <cctype>
#include <map>

namespace crasp::tm {

namespace {

using namespace crasp::ex;

// Injective map from symbol names to identifier fragments.
std::string mangle(const std::string& s) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      out += static_cast<char>(c);
    } else {
      out += '_';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::size_t def_index(const ExprPtr& ref) { return std::get<Expr::Ref>(ref->node).def; }

ExprPtr at_least_one(ExprPtr count) { return cmp(CompareOp::Ge, std::move(count), lit(1)); }
ExprPtr equals(ExprPtr a, std::int64_t v) { return cmp(CompareOp::Eq, std::move(a), lit(v)); }

class Compiler {
 public:
  Compiler(const TmSpec& m, const CompileOptions& opt) : m_(m), opt_(opt) {
    T_ = m.tapes;
    E_ = T_ == 1 ? 1 : 2;
    L_ = T_ + 2 + E_ * T_;
    o_ = m.output_tape;
  }

  CompiledTm run();

 private:
  struct Reader {
    std::vector<ExprPtr> balance;  // per tape symbol
    std::vector<ExprPtr> sym;      // per tape symbol, balance == 1
  };

  ExprPtr def(const std::string& name, ExprPtr e) { return b_->define(name, std::move(e)); }
  ExprPtr Q(SymbolId s) const { return q(s); }
  // X held at position i - d.
  ExprPtr back(const std::string& name, ExprPtr x, std::size_t d) {
    if (d == 0) return def(name, std::move(x));
    return def(name, at_least_one(count(LocalRelation{static_cast<std::uint32_t>(d)}, std::move(x))));
  }
  const std::string& sym_name(std::size_t s) const { return m_.symbols[s]; }

  void build_alphabet();
  void globals();
  Reader reader(const std::string& prefix, std::size_t tape, std::uint32_t query_offset, std::int32_t shift);

  const TmSpec& m_;
  CompileOptions opt_;
  std::size_t T_, E_, L_, o_;

  SymbolTable alphabet_;
  std::vector<SymbolId> state_sym_;
  std::vector<std::optional<SymbolId>> tape_sym_;
  std::vector<std::vector<std::optional<SymbolId>>> write_sym_;
  std::vector<SymbolId> tape_id_;
  SymbolId begin_{}, dollar_{}, keep_{}, rew_{}, sep_{}, eos_{};
  std::optional<ProgramBuilder> b_;

  ExprPtr is_state_, is_sig_, num_state_, num_sep_, prev_sig_, prev_rew_, prev_sep_, first_sig_,
      at_cell1_, in_output_, is_out_sym_;
  std::vector<ExprPtr> state_at_;  // [s] state at i - s
  std::vector<ExprPtr> halt_at_;   // [s] halting state at i - s
  std::vector<ExprPtr> prev_input_;  // per tape symbol, null unless an input symbol
  std::vector<std::vector<std::vector<ExprPtr>>> write_ev_;  // [tape][from][to]
};

void Compiler::build_alphabet() {
  tape_sym_.assign(m_.symbols.size(), std::nullopt);
  for (auto s : m_.input) tape_sym_[s] = alphabet_.add(m_.symbols[s]);
  for (std::size_t s = 0; s < m_.symbols.size(); ++s)
    if (s != m_.blank && !tape_sym_[s]) tape_sym_[s] = alphabet_.add(m_.symbols[s]);
  begin_ = alphabet_.add("<BEGIN>");
  for (const auto& name : m_.states) state_sym_.push_back(alphabet_.add(name));
  dollar_ = alphabet_.add("$");
  keep_ = alphabet_.add("KEEP");
  rew_ = alphabet_.add("REW");
  sep_ = alphabet_.add("<SEP>");
  eos_ = alphabet_.add("<EOS>");
  write_sym_.assign(m_.symbols.size(), std::vector<std::optional<SymbolId>>(m_.symbols.size()));
  for (std::size_t a = 0; a < m_.symbols.size(); ++a)
    for (std::size_t c = 0; c < m_.symbols.size(); ++c)
      if (a != c) write_sym_[a][c] = alphabet_.add("WRITE(" + m_.symbols[a] + "->" + m_.symbols[c] + ")");
  if (T_ > 1)
    for (std::size_t t = 1; t <= T_; ++t) tape_id_.push_back(alphabet_.add("<T" + std::to_string(t) + ">"));
}

void Compiler::globals() {
  std::vector<ExprPtr> states, halting, finite, prompt, out_syms;
  for (std::size_t k = 0; k < state_sym_.size(); ++k) {
    states.push_back(Q(state_sym_[k]));
    if (m_.halting[k]) halting.push_back(Q(state_sym_[k]));
  }
  for (SymbolId s = 0; s < alphabet_.size(); ++s) finite.push_back(Q(s));
  for (auto s : m_.input) prompt.push_back(Q(*tape_sym_[s]));
  prompt.push_back(Q(begin_));
  for (std::size_t s = 0; s < m_.symbols.size(); ++s)
    if (tape_sym_[s]) out_syms.push_back(Q(*tape_sym_[s]));

  is_state_ = def("IsState", any_of(states));
  auto is_halt = def("IsHalt", any_of(halting));
  is_sig_ = def("IsSig", not_(any_of(finite)));
  auto prompt_sym = def("PromptSym", any_of(prompt));
  is_out_sym_ = def("IsOutSym", any_of(out_syms));
  num_state_ = def("NumState", count({}, is_state_));
  num_sep_ = def("NumSep", count({}, Q(sep_)));
  auto num_prompt = def("NumPromptSym", count({}, prompt_sym));
  auto prev_prompt = back("PrevPromptSym", prompt_sym, 1);
  prev_sig_ = back("PrevIsSig", is_sig_, 1);
  prev_rew_ = back("PrevIsRew", Q(rew_), 1);
  prev_sep_ = back("PrevIsSep", Q(sep_), 1);
  in_output_ = def("InOutput", at_least_one(num_sep_));
  first_sig_ = def("FirstSig", all_of({is_sig_, prev_prompt, equals(num_prompt, 1)}));
  at_cell1_ = def("AtCell1", at_least_one(match({{0, 0, 0}}, first_sig_)));
  state_at_.push_back(is_state_);
  halt_at_.push_back(is_halt);
  for (std::size_t s = 1; s <= T_ + 1; ++s) {
    state_at_.push_back(back("StateAt" + std::to_string(s), is_state_, s));
    halt_at_.push_back(back("HaltAt" + std::to_string(s), is_halt, s));
  }
  prev_input_.assign(m_.symbols.size(), nullptr);
  for (auto s : m_.input)
    prev_input_[s] = def("PrevSym_" + mangle(sym_name(s)),
                         and_(at_least_one(count(LocalRelation{1}, Q(*tape_sym_[s]))), equals(num_sep_, 0)));
  write_ev_.assign(T_, std::vector<std::vector<ExprPtr>>(m_.symbols.size(),
                                                         std::vector<ExprPtr>(m_.symbols.size())));
  for (std::size_t t = 0; t < T_; ++t) {
    ExprPtr prev_tape;
    if (E_ == 2) prev_tape = back("PrevTape" + std::to_string(t + 1), Q(tape_id_[t]), 1);
    for (std::size_t a = 0; a < m_.symbols.size(); ++a)
      for (std::size_t c = 0; c < m_.symbols.size(); ++c) {
        if (a == c) continue;
        auto w = Q(*write_sym_[a][c]);
        write_ev_[t][a][c] = def("WriteEv" + std::to_string(t + 1) + "_" + mangle(sym_name(a)) + "_" +
                                     mangle(sym_name(c)),
                                 prev_tape ? and_(w, prev_tape) : w);
      }
  }
}

// Symbol on `tape` at the cell addressed by token(i - query_offset) + shift.
Compiler::Reader Compiler::reader(const std::string& prefix, std::size_t tape, std::uint32_t query_offset,
                                  std::int32_t shift) {
  const std::size_t n = m_.symbols.size();
  const auto t = tape - 1;
  const auto delta = static_cast<std::uint32_t>(E_ * tape + T_ + 1 - tape);
  const std::string tag = prefix + std::to_string(tape) + "_";
  std::vector<std::vector<ExprPtr>> flow(n, std::vector<ExprPtr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      if (a != c)
        flow[a][c] = def(tag + "N_" + mangle(sym_name(a)) + "_" + mangle(sym_name(c)),
                         match({{delta, query_offset, shift}}, write_ev_[t][a][c]));
  std::vector<ExprPtr> init(n);
  if (tape == 1) {
    std::vector<ExprPtr> hits;
    for (std::size_t s = 0; s < n; ++s) {
      if (!prev_input_[s]) {
        init[s] = lit(0);
        continue;
      }
      auto hit = def(tag + "Init_" + mangle(sym_name(s)),
                     at_least_one(match({{0, query_offset, shift}}, prev_input_[s])));
      hits.push_back(hit);
      init[s] = cond(hit, lit(1), lit(0));
    }
    init[m_.blank] = cond(any_of(hits), lit(0), lit(1));
  } else {
    for (std::size_t s = 0; s < n; ++s) init[s] = lit(s == m_.blank ? 1 : 0);
  }
  Reader r;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<ExprPtr> in{init[s]}, out;
    for (std::size_t a = 0; a < n; ++a)
      if (a != s) {
        in.push_back(flow[a][s]);
        out.push_back(flow[s][a]);
      }
    auto bal = def(tag + "B_" + mangle(sym_name(s)), arith(ArithOp::Sub, sum(in), sum(out)));
    r.balance.push_back(bal);
    r.sym.push_back(def(tag + "Sym_" + mangle(sym_name(s)), equals(bal, 1)));
  }
  return r;
}

CompiledTm Compiler::run() {
  build_alphabet();
  b_.emplace(Dialect::CStarRasp, alphabet_);
  globals();
  const std::size_t n = m_.symbols.size();

  // Configuration at each $: state T+1 back, head of tape t at T+1-t back.
  std::vector<ExprPtr> cur_state(m_.states.size());
  for (std::size_t k = 0; k < m_.states.size(); ++k)
    if (!m_.halting[k])
      cur_state[k] = def("CurState_" + mangle(m_.states[k]),
                         and_(Q(dollar_), at_least_one(count(LocalRelation{static_cast<std::uint32_t>(T_ + 1)},
                                                             Q(state_sym_[k])))));
  std::vector<std::vector<ExprPtr>> cur_symb(T_);
  std::vector<std::vector<std::size_t>> balance_defs(T_);
  std::vector<ExprPtr> cell1(T_);
  for (std::size_t t = 1; t <= T_; ++t) {
    auto gamma = static_cast<std::uint32_t>(T_ + 1 - t);
    auto r = reader("Cur", t, gamma, 0);
    for (std::size_t s = 0; s < n; ++s) {
      balance_defs[t - 1].push_back(def_index(r.balance[s]));
      cur_symb[t - 1].push_back(def("CurSymb" + std::to_string(t) + "_" + mangle(sym_name(s)),
                                    and_(Q(dollar_), r.sym[s])));
    }
    cell1[t - 1] = def("AtCell1_" + std::to_string(t), at_least_one(match({{0, gamma, 0}}, first_sig_)));
  }

  // One predicate per transition, then the finite case distinctions.
  std::vector<ExprPtr> next_q(m_.states.size()), move_l(T_), move_r(T_), move_s(T_), keep(T_);
  std::vector<std::vector<std::vector<ExprPtr>>> next_w(T_, std::vector<std::vector<ExprPtr>>(n, std::vector<ExprPtr>(n)));
  {
    std::vector<std::vector<ExprPtr>> by_state(m_.states.size());
    std::vector<std::vector<ExprPtr>> ml(T_), mr(T_), ms(T_), kp(T_);
    std::vector<std::vector<std::vector<std::vector<ExprPtr>>>> wr(
        T_, std::vector<std::vector<std::vector<ExprPtr>>>(n, std::vector<std::vector<ExprPtr>>(n)));
    for (const auto& rule : m_.rules()) {
      std::string name = "Tr_" + mangle(m_.states[rule.state]);
      std::vector<ExprPtr> parts{cur_state[rule.state]};
      for (std::size_t t = 0; t < T_; ++t) {
        name += "_" + mangle(sym_name(rule.read[t]));
        parts.push_back(cur_symb[t][rule.read[t]]);
      }
      auto tr = def(name, all_of(parts));
      by_state[rule.action->next].push_back(tr);
      for (std::size_t t = 0; t < T_; ++t) {
        auto mv = rule.action->move[t];
        if (opt_.swap_left_right && mv != Move::S) mv = mv == Move::L ? Move::R : Move::L;
        (mv == Move::L ? ml : mv == Move::R ? mr : ms)[t].push_back(tr);
        auto from = rule.read[t], to = rule.action->write[t];
        if (from == to) kp[t].push_back(tr);
        else wr[t][from][to].push_back(tr);
      }
    }
    for (std::size_t k = 0; k < m_.states.size(); ++k)
      next_q[k] = def("NextQ_" + mangle(m_.states[k]), any_of(by_state[k]));
    for (std::size_t t = 0; t < T_; ++t) {
      auto tn = std::to_string(t + 1);
      keep[t] = def("NextKeep" + tn, any_of(kp[t]));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c)
          if (a != c)
            next_w[t][a][c] = def("NextW" + tn + "_" + mangle(sym_name(a)) + "_" + mangle(sym_name(c)),
                                  any_of(wr[t][a][c]));
      auto l = def("MoveL" + tn, any_of(ml[t]));
      auto r = def("MoveR" + tn, any_of(mr[t]));
      auto s = def("MoveS" + tn, any_of(ms[t]));
      // A left move on cell 1 stays put.
      move_l[t] = def("HeadDown" + tn, and_(l, not_(cell1[t])));
      move_s[t] = def("HeadStay" + tn, or_(s, and_(l, cell1[t])));
      move_r[t] = def("HeadUp" + tn, r);
    }
  }

  // Clause guards, collected per output symbol and per (k, d).
  std::map<SymbolId, std::vector<ExprPtr>> out;
  std::map<std::pair<std::uint32_t, std::int32_t>, std::vector<ExprPtr>> sig;

  // Slots after $: tape id t at 2(t-1), event t at E*t-1, state at E*T,
  // head t at E*T+t (copied from the previous block, L-1 back).
  if (E_ == 2)
    for (std::size_t t = 1; t <= T_; ++t)
      out[tape_id_[t - 1]].push_back(back("EmitTapeId" + std::to_string(t), Q(dollar_), 2 * (t - 1)));
  for (std::size_t t = 1; t <= T_; ++t) {
    auto d = E_ * t - 1;
    auto tn = std::to_string(t);
    out[keep_].push_back(back("EmitKeep" + tn, keep[t - 1], d));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c)
        if (a != c)
          out[*write_sym_[a][c]].push_back(back(
              "EmitW" + tn + "_" + mangle(sym_name(a)) + "_" + mangle(sym_name(c)), next_w[t - 1][a][c], d));
  }
  for (std::size_t k = 0; k < m_.states.size(); ++k)
    out[state_sym_[k]].push_back(back("EmitQ_" + mangle(m_.states[k]), next_q[k], E_ * T_));
  auto copy_k = static_cast<std::uint32_t>(L_ - 1);
  for (std::size_t t = 1; t <= T_; ++t) {
    auto tn = std::to_string(t);
    auto d = E_ * T_ + t;
    sig[{copy_k, -1}].push_back(back("EmitHeadDown" + tn, move_l[t - 1], d));
    sig[{copy_k, 0}].push_back(back("EmitHeadStay" + tn, move_s[t - 1], d));
    sig[{copy_k, 1}].push_back(back("EmitHeadUp" + tn, move_r[t - 1], d));
  }
  auto heads_done = state_at_[T_];
  out[dollar_].push_back(def("EmitDollar", and_(heads_done, not_(halt_at_[T_]))));

  // Initial block: every head starts on the first prompt signpost.
  for (std::size_t s = 0; s < T_; ++s)
    sig[{static_cast<std::uint32_t>(s + 1), 0}].push_back(
        def("InitHead" + std::to_string(s + 1), and_(equals(num_state_, 1), state_at_[s])));

  // Rewinds: from the prompt end to cell 1 before the first block, and from
  // the output head to cell 1 after halting.
  auto halt_tail = def("HaltTail", and_(heads_done, halt_at_[T_]));
  auto prompt_end = def("PromptEnd", all_of({is_sig_, b_->get("PrevPromptSym"), equals(num_sep_, 0),
                                             equals(num_state_, 0)}));
  auto rewind_sig = def("RewindSig", and_(is_sig_, prev_rew_));
  std::vector<ExprPtr> cand{prompt_end, rewind_sig};
  if (o_ == T_) cand.push_back(halt_tail);
  auto candidate = def("RewindCandidate", any_of(cand));
  auto emit_rew = and_(candidate, not_(at_cell1_));
  if (o_ != T_) emit_rew = or_(emit_rew, halt_tail);
  out[rew_].push_back(def("EmitRew", emit_rew));
  auto done = def("RewindDone", and_(candidate, at_cell1_));
  out[state_sym_[m_.start]].push_back(def("StartSim", and_(done, equals(num_state_, 0))));
  out[sep_].push_back(def("StartOutput", and_(done, at_least_one(num_state_))));
  auto dec = and_(Q(rew_), prev_sig_);
  if (o_ != T_) {
    dec = and_(dec, not_(halt_at_[T_ + 1]));
    sig[{static_cast<std::uint32_t>(T_ - o_ + 1), 0}].push_back(
        def("HaltCopy", and_(Q(rew_), halt_at_[T_ + 1])));
  }
  sig[{1, -1}].push_back(def("RewindStep", dec));

  // Output phase: read cell 1 at <SEP>, then alternate symbol and signpost.
  auto first = reader("OutFirst", o_, 1, 0);
  auto next = reader("OutNext", o_, 0, 1);
  for (std::size_t s = 0; s < n; ++s) {
    auto target = s == m_.blank ? eos_ : *tape_sym_[s];
    auto g = or_(and_(Q(sep_), first.sym[s]), all_of({in_output_, is_sig_, next.sym[s]}));
    out[target].push_back(def("EmitOut_" + mangle(sym_name(s)), g));
  }
  sig[{2, 0}].push_back(def("OutFirstCell", and_(prev_sep_, is_out_sym_)));
  sig[{1, 1}].push_back(def("OutNextCell", all_of({in_output_, prev_sig_, is_out_sym_})));

  std::vector<OutputClause> outputs;
  for (auto& [symbol, guards] : out) {
    auto name = "Out_" + mangle(alphabet_.name(symbol));
    outputs.push_back({symbol, def_index(guards.size() == 1 ? guards[0] : def(name, any_of(guards)))});
  }
  std::vector<SignpostClause> signposts;
  for (auto& [kd, guards] : sig) {
    auto name = "Sig_" + std::to_string(kd.first) + (kd.second < 0 ? "_dn" : kd.second > 0 ? "_up" : "_st");
    signposts.push_back({kd.first, kd.second, def_index(guards.size() == 1 ? guards[0] : def(name, any_of(guards)))});
  }
  std::vector<SymbolId> input;
  for (auto s : m_.input) input.push_back(*tape_sym_[s]);
  input.push_back(begin_);
  CotProgram cp(b_->build(), input, std::move(outputs), std::move(signposts), sep_, eos_);
  return CompiledTm{m_, std::move(cp), BlockLayout{T_, E_, L_, o_}, state_sym_, tape_sym_, write_sym_,
                    tape_id_, begin_, dollar_, keep_, rew_, sep_, eos_, std::move(balance_defs)};
}

}  // namespace

CompiledTm compile(const TmSpec& m, const CompileOptions& options) {
  m.validate();
  return Compiler(m, options).run();
}

TokenSeq compiled_prompt(const CompiledTm& c, const Word& w, std::uint64_t offset) {
  if (offset < 1) throw Error("signpost offset must be at least 1");
  if (w.empty()) return {Token::finite(c.begin), Token::signpost(offset)};
  TokenSeq x;
  for (auto s : w) {
    if (s >= c.tape_symbol.size() || !c.machine.is_input_symbol(s)) throw Error("input symbol outside the input alphabet");
    x.push_back(Token::finite(*c.tape_symbol[s]));
  }
  return annotate(x, offset);
}

}  // namespace crasp::tm

#include "crasp/cot.hpp"

#include <algorithm>
#include <set>

namespace crasp {

CotProgram::CotProgram(Program base, std::vector<SymbolId> input_alphabet,
                       std::vector<OutputClause> outputs, std::vector<SignpostClause> signpost_outputs,
                       SymbolId sep, SymbolId eos)
    : base_(std::move(base)),
      input_(std::move(input_alphabet)),
      outputs_(std::move(outputs)),
      signposts_(std::move(signpost_outputs)),
      sep_(sep),
      eos_(eos) {
  const auto& a = base_.alphabet();
  auto check_sym = [&](SymbolId s) {
    if (s >= a.size()) throw TokenError("clause symbol outside the alphabet");
  };
  check_sym(sep_);
  check_sym(eos_);
  if (sep_ == eos_) throw ParseError("SEP and EOS must differ", 0, 0);
  for (auto s : input_) {
    check_sym(s);
    if (s == sep_ || s == eos_) throw ParseError("SEP and EOS may not be input symbols", 0, 0);
  }
  auto check_guard = [&](std::size_t g) {
    if (g >= base_.defs().size()) throw ParseError("unknown guard", 0, 0);
    if (base_.type_of(g) != ValueType::Bool)
      throw ParseError("guard '" + base_.defs()[g].name + "' is not Boolean", 0, 0);
  };
  std::set<SymbolId> seen;
  for (const auto& c : outputs_) {
    check_sym(c.target);
    check_guard(c.guard);
    if (!seen.insert(c.target).second)
      throw ParseError("symbol '" + a.name(c.target) + "' has two OUTPUT clauses", 0, 0);
  }
  if (!signposts_.empty() && base_.dialect() != Dialect::CStarRasp)
    throw DialectError("signpost outputs need dialect CSTAR_RASP");
  std::set<std::pair<std::uint32_t, std::int32_t>> kd;
  for (const auto& c : signposts_) {
    check_guard(c.guard);
    if (c.anchor_offset == 0) throw ParseError("signpost anchor offset must be positive", 0, 0);
    if (c.direction < -1 || c.direction > 1)
      throw ParseError("signpost direction must be -1, 0 or +1", 0, 0);
    if (!kd.insert({c.anchor_offset, c.direction}).second)
      throw ParseError("duplicate OUTPUT_SIGNPOST clause", 0, 0);
  }
  plan_ = make_plan(base_);
}

bool operator==(const CotProgram& a, const CotProgram& b) {
  auto oc = [](const OutputClause& x, const OutputClause& y) {
    return x.target == y.target && x.guard == y.guard;
  };
  auto sc = [](const SignpostClause& x, const SignpostClause& y) {
    return x.anchor_offset == y.anchor_offset && x.direction == y.direction && x.guard == y.guard;
  };
  return a.base_ == b.base_ && a.input_ == b.input_ && a.sep_ == b.sep_ && a.eos_ == b.eos_ &&
         std::equal(a.outputs_.begin(), a.outputs_.end(), b.outputs_.begin(), b.outputs_.end(), oc) &&
         std::equal(a.signposts_.begin(), a.signposts_.end(), b.signposts_.begin(),
                    b.signposts_.end(), sc);
}

std::string_view generation_error_name(GenerationError::Kind k) {
  switch (k) {
    case GenerationError::Kind::ZeroActive: return "ZeroActive";
    case GenerationError::Kind::MultipleActive: return "MultipleActive";
    case GenerationError::Kind::AnchorNotSignpost: return "AnchorNotSignpost";
    case GenerationError::Kind::IndexUnderflow: return "IndexUnderflow";
  }
  return "?";
}

GenerationError::GenerationError(Kind kind, std::size_t step, const std::string& detail)
    : Error(std::string(generation_error_name(kind)) + " at step " + std::to_string(step) +
            (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      step_(step) {}

Token next_token(const CotProgram& cp, const IncrementalState& state, std::size_t step) {
  using K = GenerationError::Kind;
  const auto& defs = cp.base().defs();
  const OutputClause* out = nullptr;
  const SignpostClause* sig = nullptr;
  std::vector<std::string> active;
  for (const auto& c : cp.outputs()) {
    if (state.truth(c.guard)) {
      out = &c;
      active.push_back(defs[c.guard].name);
    }
  }
  for (const auto& c : cp.signpost_outputs()) {
    if (state.truth(c.guard)) {
      sig = &c;
      active.push_back(defs[c.guard].name);
    }
  }
  if (active.empty()) throw GenerationError(K::ZeroActive, step, "");
  if (active.size() > 1) {
    std::string names;
    for (const auto& n : active) names += (names.empty() ? "" : ", ") + n;
    throw GenerationError(K::MultipleActive, step, names);
  }
  if (out) return Token::finite(out->target);
  const auto w = state.tokens();
  if (w.size() <= sig->anchor_offset)
    throw GenerationError(K::AnchorNotSignpost, step, "anchor before the first position");
  const Token& anchor = w[w.size() - 1 - sig->anchor_offset];
  if (!anchor.is_signpost())
    throw GenerationError(K::AnchorNotSignpost, step, "guard " + defs[sig->guard].name);
  std::int64_t idx = static_cast<std::int64_t>(anchor.value) + sig->direction;
  if (idx < 1) throw GenerationError(K::IndexUnderflow, step, "guard " + defs[sig->guard].name);
  return Token::signpost(static_cast<std::uint64_t>(idx));
}

Token next_token(const CotProgram& cp, std::span<const Token> prefix) {
  if (prefix.empty()) throw Error("next_token needs a nonempty prefix");
  IncrementalState s(cp.plan());
  for (const auto& t : prefix) s.append(t);
  return next_token(cp, s, 0);
}

GenerationResult generate(const CotProgram& cp, std::span<const Token> prompt, std::size_t budget,
                          const GenerationObserver& observer) {
  if (budget == 0) throw Error("generation budget must be at least 1");
  if (prompt.empty()) throw Error("generation needs a nonempty prompt");
  IncrementalState s(cp.plan());
  for (const auto& t : prompt) s.append(t);
  GenerationResult r;
  const Token eos = Token::finite(cp.eos());
  const Token sep = Token::finite(cp.sep());
  while (r.step_count < budget) {
    Token t = next_token(cp, s, r.step_count + 1);
    s.append(t);
    r.trace.push_back(t);
    ++r.step_count;
    if (observer) observer(s);
    if (t == eos) {
      r.status = GenerationResult::Status::Completed;
      auto it = std::find(r.trace.rbegin() + 1, r.trace.rend(), sep);
      if (it != r.trace.rend()) r.answer.assign(it.base(), r.trace.end() - 1);
      else r.answer.assign(r.trace.begin(), r.trace.end() - 1);
      return r;
    }
  }
  return r;
}

TokenSeq annotate(std::span<const Token> w, std::uint64_t start_offset) {
  if (start_offset == 0) throw Error("annotation offset must be at least 1");
  TokenSeq out;
  out.reserve(2 * w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!w[k].is_finite()) throw MalformedAnnotation("annotate expects finite symbols");
    out.push_back(w[k]);
    out.push_back(Token::signpost(start_offset + k));
  }
  return out;
}

TokenSeq deannotate(std::span<const Token> x) {
  if (x.size() % 2) throw MalformedAnnotation("odd annotated length");
  TokenSeq out;
  for (std::size_t k = 0; k < x.size(); k += 2) {
    if (!x[k].is_finite() || !x[k + 1].is_signpost())
      throw MalformedAnnotation("expected symbol/signpost alternation at " + std::to_string(k + 1));
    if (k > 0 && x[k + 1].value != x[k - 1].value + 1)
      throw MalformedAnnotation("non-consecutive signpost at " + std::to_string(k + 2));
    out.push_back(x[k]);
  }
  return out;
}

}  // namespace crasp

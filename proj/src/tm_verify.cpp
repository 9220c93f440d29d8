#include "crasp/tm_verify.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace crasp::tm {

namespace {

struct SymbolRoles {
  std::unordered_map<SymbolId, std::size_t> state, tape;
  std::unordered_map<SymbolId, std::pair<std::size_t, std::size_t>> write;
  std::unordered_map<SymbolId, std::size_t> tape_id;
};

SymbolRoles roles(const CompiledTm& c) {
  SymbolRoles r;
  for (std::size_t k = 0; k < c.state_symbol.size(); ++k) r.state[c.state_symbol[k]] = k;
  for (std::size_t s = 0; s < c.tape_symbol.size(); ++s)
    if (c.tape_symbol[s]) r.tape[*c.tape_symbol[s]] = s;
  for (std::size_t a = 0; a < c.write_symbol.size(); ++a)
    for (std::size_t b = 0; b < c.write_symbol[a].size(); ++b)
      if (c.write_symbol[a][b]) r.write[*c.write_symbol[a][b]] = {a, b};
  for (std::size_t t = 0; t < c.tape_id.size(); ++t) r.tape_id[c.tape_id[t]] = t;
  return r;
}

bool is(const Token& t, SymbolId s) { return t.is_finite() && t.symbol() == s; }

}  // namespace

ParsedTrace parse_trace(const CompiledTm& c, std::span<const Token> x) {
  ParsedTrace p;
  const auto R = roles(c);
  const auto& L = c.layout;
  const auto& names = c.program.alphabet();
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) {
    if (p.error.empty())
      p.error = "token " + std::to_string(pos + 1) + " (" + (pos < x.size() ? token_text(names, x[pos]) : "end") +
                "): " + what;
  };
  auto rewind = [&](std::size_t& tokens) {
    while (pos < x.size() && is(x[pos], c.rew)) {
      if (pos + 1 == x.size()) {
        p.truncated = true;
        return false;
      }
      if (!x[pos + 1].is_signpost()) {
        ++pos;
        fail("expected a signpost after REW");
        return false;
      }
      pos += 2;
      tokens += 2;
    }
    return true;
  };
  if (!rewind(p.rewind_in_tokens)) return p;

  while (pos < x.size()) {
    auto st = x[pos].is_finite() ? R.state.find(x[pos].symbol()) : R.state.end();
    if (st == R.state.end()) {
      if (p.blocks.empty() && !p.tail) fail("expected a state");
      break;
    }
    ParsedBlock b;
    b.state = st->second;
    ++pos;
    for (std::size_t t = 0; t < L.tapes; ++t, ++pos) {
      if (pos == x.size()) {
        p.truncated = true;
        return p;
      }
      if (!x[pos].is_signpost()) {
        fail("expected a head signpost");
        return p;
      }
      b.heads.push_back(x[pos].value);
    }
    if (pos == x.size()) {
      p.truncated = true;
      p.tail = b;  // a halting tail or the head of an unfinished block
      if (!c.machine.halting[b.state]) p.tail.reset();
      return p;
    }
    if (!is(x[pos], c.dollar)) {
      if (!c.machine.halting[b.state]) {
        fail("expected $ after a non-halting configuration");
        return p;
      }
      p.tail = b;
      break;
    }
    if (c.machine.halting[b.state]) {
      fail("$ after a halting state");
      return p;
    }
    ++pos;
    for (std::size_t t = 0; t < L.tapes; ++t) {
      if (L.event_width == 2) {
        if (pos == x.size()) {
          p.truncated = true;
          return p;
        }
        auto id = x[pos].is_finite() ? R.tape_id.find(x[pos].symbol()) : R.tape_id.end();
        if (id == R.tape_id.end() || id->second != t) {
          fail("expected tape id " + std::to_string(t + 1));
          return p;
        }
        ++pos;
      }
      if (pos == x.size()) {
        p.truncated = true;
        return p;
      }
      Event e;
      if (!is(x[pos], c.keep)) {
        auto w = x[pos].is_finite() ? R.write.find(x[pos].symbol()) : R.write.end();
        if (w == R.write.end()) {
          fail("expected KEEP or WRITE");
          return p;
        }
        e = {true, w->second.first, w->second.second};
      }
      b.events.push_back(e);
      ++pos;
    }
    p.blocks.push_back(std::move(b));
  }
  if (pos == x.size()) {
    p.truncated = true;
    return p;
  }
  if (!rewind(p.rewind_out_tokens)) return p;
  if (pos == x.size()) {
    p.truncated = true;
    return p;
  }
  if (!is(x[pos], c.sep)) {
    fail("expected <SEP>");
    return p;
  }
  ++pos;
  p.output_tokens = 1;
  while (pos < x.size() && !is(x[pos], c.eos)) {
    bool symbol = p.answer.size() % 2 == 0;
    if (symbol ? !(x[pos].is_finite() && R.tape.count(x[pos].symbol())) : !x[pos].is_signpost()) {
      fail(symbol ? "expected an output symbol" : "expected an output signpost");
      return p;
    }
    p.answer.push_back(x[pos]);
    ++p.output_tokens;
    ++pos;
  }
  if (pos == x.size()) {
    p.truncated = true;
    return p;
  }
  ++p.output_tokens;
  ++pos;
  if (p.answer.size() % 2 != 0) fail("output symbol without signpost");
  if (pos != x.size()) fail("tokens after <EOS>");
  p.complete = true;
  return p;
}

LengthReport length_report(const CompiledTm& c, const Word& w, const RunResult& oracle, const ParsedTrace& t,
                           std::size_t total_generated) {
  LengthReport r;
  const auto T = c.layout.tapes;
  r.steps = oracle.steps;
  r.input_length = w.size();
  r.rewind_in_tokens = t.rewind_in_tokens;
  r.simulation_tokens = t.simulation_tokens(c.layout);
  r.tail_tokens = t.tail_tokens();
  r.rewind_out_tokens = t.rewind_out_tokens;
  r.output_tokens = t.output_tokens;
  r.total_tokens = total_generated;
  r.bound = kLengthConstant * T * std::max<std::size_t>(1, r.steps + r.input_length);
  r.simulation_ok = r.simulation_tokens == c.layout.block_length * r.steps;
  r.output_ok = r.output_tokens <= 2 + 2 * (r.steps + r.input_length);
  r.bound_ok = r.total_tokens <= r.bound;
  return r;
}

namespace {

// Answer tokens the compiled program must produce for the oracle output.
TokenSeq expected_answer(const CompiledTm& c, const Word& out, std::uint64_t offset) {
  TokenSeq x;
  for (auto s : out) x.push_back(Token::finite(*c.tape_symbol[s]));
  return annotate(x, offset);
}

std::string heads_text(const std::vector<std::size_t>& h) {
  std::string s;
  for (auto v : h) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

std::string event_text(const TmSpec& m, const Event& e) {
  return e.write ? "WRITE(" + m.symbols[e.from] + "->" + m.symbols[e.to] + ")" : "KEEP";
}

}  // namespace

CaseReport verify_input(const CompiledTm& c, const Word& w, const VerifyOptions& opt) {
  const auto& m = c.machine;
  CaseReport r;
  r.input = w;
  auto oracle = simulate(m, w, opt.max_steps);
  r.tm_halted = oracle.halted;
  r.tm_steps = oracle.steps;
  r.budget = generation_budget(c, oracle.steps, w.size(), opt.budget_factor);
  auto set_failure = [&](const std::string& kind, const std::string& detail, std::optional<std::size_t> step = {}) {
    if (!r.ok) return;
    r.ok = false;
    r.failure = kind;
    r.detail = detail;
    r.divergent_step = step;
  };

  // Balance invariant at every $: exactly one symbol per tape has balance 1
  // and it is the oracle's symbol under that head.
  std::size_t dollars = 0;
  std::string balance_error;
  std::optional<std::size_t> balance_step;
  GenerationObserver observer;
  if (opt.check_balance)
    observer = [&](const IncrementalState& s) {
      if (!is(s.tokens().back(), c.dollar)) return;
      auto k = dollars++;
      if (k >= oracle.step_log.size() || !balance_error.empty()) return;
      for (std::size_t t = 0; t < c.layout.tapes; ++t) {
        std::size_t ones = 0, which = 0;
        for (std::size_t sym = 0; sym < m.symbols.size(); ++sym)
          if (s.value(c.balance_defs[t][sym]) == 1) {
            ++ones;
            which = sym;
          }
        ++r.balance_checks;
        if (ones != 1 || which != oracle.step_log[k].read[t]) {
          balance_error = "tape " + std::to_string(t + 1) + ": " + std::to_string(ones) +
                          " symbols with balance 1, oracle reads " + m.symbols[oracle.step_log[k].read[t]];
          balance_step = k;
          return;
        }
      }
    };

  auto prompt = compiled_prompt(c, w, opt.offset);
  GenerationResult g;
  try {
    g = generate(c.program, prompt, r.budget, observer);
  } catch (const GenerationError& e) {
    set_failure("generation", e.what(), dollars);
    return r;
  }
  r.cot_completed = g.completed();
  r.trace_tokens = g.trace.size();

  auto parsed = parse_trace(c, g.trace);
  if (!parsed.error.empty()) set_failure("block", parsed.error, parsed.blocks.size());

  // Per-step agreement of state, heads and events.
  auto cells = [&](const std::vector<std::uint64_t>& sig) {
    std::vector<std::size_t> h;
    for (auto v : sig) h.push_back(v >= opt.offset ? static_cast<std::size_t>(v - opt.offset + 1) : 0);
    return h;
  };
  std::size_t n = std::min(parsed.blocks.size(), oracle.step_log.size());
  for (std::size_t k = 0; k < n && r.ok; ++k) {
    const auto& b = parsed.blocks[k];
    const auto& s = oracle.step_log[k];
    if (b.state != s.state)
      set_failure("step", "state " + m.states[b.state] + ", oracle " + m.states[s.state], k);
    else if (cells(b.heads) != s.heads)
      set_failure("step", "heads " + heads_text(cells(b.heads)) + ", oracle " + heads_text(s.heads), k);
    else
      for (std::size_t t = 0; t < s.events.size(); ++t)
        if (!(b.events[t] == s.events[t])) {
          set_failure("step", "tape " + std::to_string(t + 1) + " event " + event_text(m, b.events[t]) +
                                  ", oracle " + event_text(m, s.events[t]),
                      k);
          break;
        }
  }
  if (!balance_error.empty()) set_failure("balance", balance_error, balance_step);

  if (oracle.halted) {
    if (parsed.blocks.size() != oracle.steps)
      set_failure("step", std::to_string(parsed.blocks.size()) + " blocks for " + std::to_string(oracle.steps) +
                              " steps", std::min(parsed.blocks.size(), oracle.steps));
    else if (!parsed.tail)
      set_failure("block", "missing halting configuration", oracle.steps);
    else if (parsed.tail->state != oracle.final_state || cells(parsed.tail->heads) != oracle.final_heads)
      set_failure("step", "halting configuration differs", oracle.steps);
    if (!g.completed()) set_failure("halting", "oracle halts after " + std::to_string(oracle.steps) +
                                                   " steps, trace has no <EOS> within " + std::to_string(r.budget));
    else if (g.answer != expected_answer(c, *oracle.output, opt.offset))
      set_failure("answer", "answer " + tokens_text(c.program.alphabet(), g.answer) + ", oracle " +
                                m.word_text(*oracle.output));
    auto len = length_report(c, w, oracle, parsed, g.trace.size());
    if (!len.ok())
      set_failure("length", "simulation " + std::to_string(len.simulation_tokens) + ", output " +
                                std::to_string(len.output_tokens) + ", total " + std::to_string(len.total_tokens) +
                                " of bound " + std::to_string(len.bound));
    r.length = len;
  } else if (g.completed() || std::any_of(g.trace.begin(), g.trace.end(), [&](const Token& t) { return is(t, c.eos); })) {
    set_failure("halting", "oracle runs past " + std::to_string(oracle.steps) + " steps, trace emitted <EOS>");
  }
  return r;
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseReport& c) { return !c.ok; }));
}

VerifyReport verify_equivalence(const CompiledTm& c, const std::vector<Word>& inputs, const VerifyOptions& opt) {
  VerifyReport rep;
  rep.cases.resize(inputs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < inputs.size();) rep.cases[k] = verify_input(c, inputs[k], opt);
  };
  std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, inputs.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rep;
}

LengthReport trace_length_check(const CompiledTm& c, const Word& w, const VerifyOptions& opt) {
  auto oracle = simulate(c.machine, w, opt.max_steps);
  if (!oracle.halted)
    throw Error("machine does not halt within " + std::to_string(opt.max_steps) + " steps");
  auto budget = generation_budget(c, oracle.steps, w.size(), opt.budget_factor);
  auto g = generate(c.program, compiled_prompt(c, w, opt.offset), budget);
  auto parsed = parse_trace(c, g.trace);
  return length_report(c, w, oracle, parsed, g.trace.size());
}

std::vector<Word> all_inputs(const TmSpec& m, std::size_t max_len) {
  std::vector<Word> out{{}};
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k].size() < max_len)
      for (auto s : m.input) {
        auto w = out[k];
        w.push_back(s);
        out.push_back(std::move(w));
      }
  return out;
}

std::string report_text(const CompiledTm& c, const VerifyReport& r) {
  std::ostringstream out;
  for (const auto& k : r.cases) {
    if (k.ok) continue;
    out << "MISMATCH input '" << c.machine.word_text(k.input) << "': " << k.failure;
    if (k.divergent_step) out << " at step " << *k.divergent_step;
    out << ": " << k.detail << "\n";
  }
  if (r.ok())
    out << "all " << r.cases.size() << " inputs OK\n";
  else
    out << r.failures() << " of " << r.cases.size() << " inputs failed\n";
  return out.str();
}

std::string report_jsonl(const CompiledTm& c, const VerifyReport& r) {
  using nlohmann::json;
  std::ostringstream out;
  out << json{{"schema", "crasp-forge/verify"}, {"version", 1}}.dump() << "\n";
  for (const auto& k : r.cases) {
    json j{{"input", c.machine.word_text(k.input)},
           {"ok", k.ok},
           {"tm_halted", k.tm_halted},
           {"tm_steps", k.tm_steps},
           {"cot_completed", k.cot_completed},
           {"trace_tokens", k.trace_tokens},
           {"budget", k.budget},
           {"balance_checks", k.balance_checks}};
    if (!k.ok) {
      j["failure"] = k.failure;
      j["detail"] = k.detail;
      j["divergent_step"] = k.divergent_step ? json(*k.divergent_step) : json(nullptr);
    }
    if (k.length)
      j["length"] = {{"simulation", k.length->simulation_tokens}, {"tail", k.length->tail_tokens},
                     {"rewind_in", k.length->rewind_in_tokens},   {"rewind_out", k.length->rewind_out_tokens},
                     {"output", k.length->output_tokens},         {"total", k.length->total_tokens},
                     {"bound", k.length->bound}};
    out << j.dump() << "\n";
  }
  out << json{{"summary", true}, {"inputs", r.cases.size()}, {"failures", r.failures()}}.dump() << "\n";
  return out.str();
}

}  // namespace crasp::tm

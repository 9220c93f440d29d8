#include "crasp/turing.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

namespace crasp::tm {

std::size_t TmSpec::key(std::size_t state, const std::vector<std::size_t>& read) const {
  if (state >= states.size() || read.size() != tapes) throw TmLoadError("bad transition key");
  std::size_t k = state;
  for (auto s : read) {
    if (s >= symbols.size()) throw TmLoadError("symbol id out of range");
    k = k * symbols.size() + s;
  }
  return k;
}

void TmSpec::set_transition(std::size_t state, const std::vector<std::size_t>& read, Transition t) {
  std::size_t size = states.size();
  for (std::size_t k = 0; k < tapes; ++k) size *= symbols.size();
  if (delta_.size() != size) delta_.assign(size, std::nullopt);
  delta_[key(state, read)] = std::move(t);
}

const Transition* TmSpec::transition(std::size_t state, const std::vector<std::size_t>& read) const {
  auto k = key(state, read);
  if (k >= delta_.size() || !delta_[k]) return nullptr;
  return &*delta_[k];
}

std::size_t TmSpec::state_id(std::string_view name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) throw TmLoadError("unknown state '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - states.begin());
}

std::size_t TmSpec::symbol_id(std::string_view name) const {
  auto it = std::find(symbols.begin(), symbols.end(), name);
  if (it == symbols.end()) throw TmLoadError("symbol '" + std::string(name) + "' not in tape alphabet");
  return static_cast<std::size_t>(it - symbols.begin());
}

bool TmSpec::is_input_symbol(std::size_t s) const {
  return std::find(input.begin(), input.end(), s) != input.end();
}

std::vector<TmSpec::Rule> TmSpec::rules() const {
  std::vector<Rule> out;
  std::vector<std::size_t> read(tapes, 0);
  for (std::size_t q = 0; q < states.size(); ++q) {
    if (halting[q]) continue;
    std::fill(read.begin(), read.end(), 0);
    for (;;) {
      if (auto* t = transition(q, read)) out.push_back({q, read, t});
      std::size_t k = tapes;
      while (k > 0 && ++read[k - 1] == symbols.size()) read[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

Word TmSpec::parse_word(std::string_view text) const {
  Word w;
  bool spaced = std::any_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  auto add = [&](std::string_view name) {
    auto it = std::find(symbols.begin(), symbols.end(), name);
    if (it == symbols.end() || !is_input_symbol(static_cast<std::size_t>(it - symbols.begin())))
      throw TmLoadError("'" + std::string(name) + "' is not an input symbol");
    w.push_back(static_cast<std::size_t>(it - symbols.begin()));
  };
  if (spaced) {
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) add(tok);
  } else {
    for (char c : text) add(std::string_view(&c, 1));
  }
  return w;
}

std::string TmSpec::word_text(const Word& w) const {
  bool single = std::all_of(symbols.begin(), symbols.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k && !single) out += ' ';
    out += symbols.at(w[k]);
  }
  return out;
}

namespace {

bool reserved(const std::string& s) {
  if (s.empty() || s == "*" || s == "$" || s == "KEEP" || s == "REW" || s == "->") return true;
  if (s.front() == '<' || s.rfind("WRITE(", 0) == 0) return true;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')' || c == ';' ||
        c == '"')
      return true;
  return false;
}

}  // namespace

void TmSpec::validate() const {
  if (states.empty()) throw TmLoadError("no states");
  if (symbols.empty()) throw TmLoadError("empty tape alphabet");
  if (tapes < 1) throw TmLoadError("need at least one tape");
  if (output_tape < 1 || output_tape > tapes) throw TmLoadError("output_tape out of range");
  if (halting.size() != states.size()) throw TmLoadError("halting set size mismatch");
  if (blank >= symbols.size()) throw TmLoadError("blank not in tape alphabet");
  if (start >= states.size()) throw TmLoadError("start state unknown");
  std::set<std::string> names;
  for (const auto& s : states) {
    if (reserved(s)) throw TmLoadError("reserved or malformed state name '" + s + "'");
    if (!names.insert(s).second) throw TmLoadError("duplicate name '" + s + "'");
  }
  for (const auto& s : symbols) {
    if (reserved(s)) throw TmLoadError("reserved or malformed symbol name '" + s + "'");
    if (!names.insert(s).second) throw TmLoadError("name '" + s + "' used twice (states and symbols must be distinct)");
  }
  std::set<std::size_t> in;
  for (auto s : input) {
    if (s >= symbols.size()) throw TmLoadError("input symbol not in tape alphabet");
    if (s == blank) throw TmLoadError("blank may not be an input symbol");
    if (!in.insert(s).second) throw TmLoadError("duplicate input symbol");
  }
  std::vector<std::size_t> read(tapes, 0);
  for (std::size_t q = 0; q < states.size(); ++q) {
    if (halting[q]) continue;
    std::fill(read.begin(), read.end(), 0);
    for (;;) {
      const auto* t = transition(q, read);
      if (!t) {
        std::string r;
        for (auto s : read) r += (r.empty() ? "" : ",") + symbols[s];
        throw TmLoadError("missing transition for " + states[q] + ", (" + r + ")");
      }
      if (t->next >= states.size() || t->write.size() != tapes || t->move.size() != tapes)
        throw TmLoadError("malformed transition");
      for (auto s : t->write)
        if (s >= symbols.size()) throw TmLoadError("written symbol out of range");
      std::size_t k = tapes;
      while (k > 0 && ++read[k - 1] == symbols.size()) read[--k] = 0;
      if (k == 0) break;
    }
  }
}

namespace {

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Tokens of a transition line: words, "(", ")", ",", "->".
std::vector<std::string> lex_rule(std::string_view s, std::size_t line) {
  std::vector<std::string> out;
  std::size_t k = 0;
  while (k < s.size()) {
    char c = s[k];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++k;
    } else if (c == '(' || c == ')' || c == ',') {
      out.emplace_back(1, c);
      ++k;
    } else if (s.substr(k, 2) == "->") {
      out.emplace_back("->");
      k += 2;
    } else {
      auto start = k;
      while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k])) && s[k] != '(' &&
             s[k] != ')' && s[k] != ',' && s.substr(k, 2) != "->")
        ++k;
      out.emplace_back(s.substr(start, k - start));
    }
  }
  if (out.empty()) throw TmLoadError("empty transition", line);
  return out;
}

struct RawRule {
  std::string state;
  std::vector<std::string> read;
  std::string next;
  std::vector<std::pair<std::string, char>> actions;
  std::size_t line;
};

RawRule parse_rule(std::string_view text, std::size_t line) {
  auto toks = lex_rule(text, line);
  std::size_t p = 0;
  auto expect = [&](const char* t) {
    if (p >= toks.size() || toks[p] != t)
      throw TmLoadError(std::string("expected '") + t + "' in transition", line);
    ++p;
  };
  auto word = [&]() {
    if (p >= toks.size() || toks[p] == "(" || toks[p] == ")" || toks[p] == "," || toks[p] == "->")
      throw TmLoadError("expected a name in transition", line);
    return toks[p++];
  };
  RawRule r;
  r.line = line;
  r.state = word();
  expect(",");
  expect("(");
  r.read.push_back(word());
  while (p < toks.size() && toks[p] == ",") {
    ++p;
    r.read.push_back(word());
  }
  expect(")");
  expect("->");
  r.next = word();
  do {
    expect(",");
    expect("(");
    auto sym = word();
    expect(",");
    auto dir = word();
    expect(")");
    if (dir != "L" && dir != "R" && dir != "S") throw TmLoadError("direction must be L, R or S", line);
    r.actions.emplace_back(sym, dir[0]);
  } while (p < toks.size() && toks[p] == ",");
  if (p != toks.size()) throw TmLoadError("trailing text in transition", line);
  return r;
}

}  // namespace

TmSpec load_tm(std::string_view source) {
  TmSpec m;
  std::unordered_map<std::string, std::vector<std::string>> header;
  std::unordered_map<std::string, std::size_t> header_line;
  std::vector<RawRule> raw;
  std::size_t line_no = 0, start = 0;
  while (start <= source.size()) {
    auto end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    ++line_no;
    std::string line(source.substr(start, end - start));
    start = end + 1;
    if (auto c = line.find(';'); c != std::string::npos) line.resize(c);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line.erase(0, first);
    auto colon = line.find(':');
    auto arrow = line.find("->");
    if (colon != std::string::npos && (arrow == std::string::npos || colon < arrow)) {
      std::string key(line.substr(0, colon));
      while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
      static const std::set<std::string> known{"states", "input", "tape", "blank", "start",
                                               "halt", "tapes", "output_tape"};
      if (!known.count(key)) throw TmLoadError("unknown header '" + key + "'", line_no);
      if (header.count(key)) throw TmLoadError("duplicate header '" + key + "'", line_no);
      header[key] = split_list(line.substr(colon + 1));
      header_line[key] = line_no;
    } else {
      raw.push_back(parse_rule(line, line_no));
    }
  }
  for (const char* k : {"states", "input", "tape", "blank", "start"})
    if (!header.count(k)) throw TmLoadError(std::string("missing header '") + k + ":'");
  auto single = [&](const char* k) {
    const auto& v = header.at(k);
    if (v.size() != 1) throw TmLoadError(std::string("'") + k + ":' takes one value", header_line[k]);
    return v[0];
  };
  auto number = [&](const char* k, std::size_t dflt) -> std::size_t {
    if (!header.count(k)) return dflt;
    auto s = single(k);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw TmLoadError(std::string("'") + k + ":' needs a number", header_line[k]);
    return std::stoul(s);
  };
  m.states = header["states"];
  m.symbols = header["tape"];
  m.tapes = number("tapes", 1);
  m.output_tape = number("output_tape", 1);
  if (m.tapes < 1) throw TmLoadError("tapes must be at least 1", header_line["tapes"]);
  if (m.output_tape < 1 || m.output_tape > m.tapes)
    throw TmLoadError("output_tape out of range", header_line.count("output_tape") ? header_line["output_tape"] : 0);
  auto lookup_symbol = [&](const std::string& s, std::size_t line) {
    auto it = std::find(m.symbols.begin(), m.symbols.end(), s);
    if (it == m.symbols.end()) throw TmLoadError("symbol '" + s + "' not in tape alphabet", line);
    return static_cast<std::size_t>(it - m.symbols.begin());
  };
  auto lookup_state = [&](const std::string& s, std::size_t line) {
    auto it = std::find(m.states.begin(), m.states.end(), s);
    if (it == m.states.end()) throw TmLoadError("unknown state '" + s + "'", line);
    return static_cast<std::size_t>(it - m.states.begin());
  };
  m.blank = lookup_symbol(single("blank"), header_line["blank"]);
  for (const auto& s : header["input"]) m.input.push_back(lookup_symbol(s, header_line["input"]));
  m.start = lookup_state(single("start"), header_line["start"]);
  m.halting.assign(m.states.size(), false);
  if (header.count("halt"))
    for (const auto& s : header["halt"]) m.halting[lookup_state(s, header_line["halt"])] = true;

  // First matching line wins; '*' in a read slot matches any symbol and in a
  // write slot keeps the symbol read on that tape.
  std::set<std::pair<std::size_t, std::vector<std::string>>> seen;
  std::vector<std::size_t> read(m.tapes);
  for (const auto& r : raw) {
    auto q = lookup_state(r.state, r.line);
    if (m.halting[q]) throw TmLoadError("transition out of halting state '" + r.state + "'", r.line);
    if (r.read.size() != m.tapes || r.actions.size() != m.tapes)
      throw TmLoadError("transition arity differs from tapes: " + std::to_string(m.tapes), r.line);
    if (!seen.insert({q, r.read}).second) throw TmLoadError("duplicate transition", r.line);
    auto next = lookup_state(r.next, r.line);
    std::vector<std::optional<std::size_t>> pat, wr;
    for (const auto& s : r.read) pat.push_back(s == "*" ? std::nullopt : std::optional(lookup_symbol(s, r.line)));
    for (const auto& [s, d] : r.actions) wr.push_back(s == "*" ? std::nullopt : std::optional(lookup_symbol(s, r.line)));
    std::fill(read.begin(), read.end(), 0);
    for (;;) {
      bool matches = true;
      for (std::size_t t = 0; t < m.tapes; ++t)
        if (pat[t] && *pat[t] != read[t]) matches = false;
      if (matches && !m.transition(q, read)) {
        Transition tr{next, {}, {}};
        for (std::size_t t = 0; t < m.tapes; ++t) {
          tr.write.push_back(wr[t] ? *wr[t] : read[t]);
          char d = r.actions[t].second;
          tr.move.push_back(d == 'L' ? Move::L : d == 'R' ? Move::R : Move::S);
        }
        m.set_transition(q, read, std::move(tr));
      }
      std::size_t k = m.tapes;
      while (k > 0 && ++read[k - 1] == m.symbols.size()) read[--k] = 0;
      if (k == 0) break;
    }
  }
  m.validate();
  return m;
}

RunResult simulate(const TmSpec& m, const Word& w, std::size_t max_steps) {
  std::vector<std::unordered_map<std::size_t, std::size_t>> tape(m.tapes);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] != m.blank) tape[0][k + 1] = w[k];
  auto cell = [&](std::size_t t, std::size_t c) {
    auto it = tape[t].find(c);
    return it == tape[t].end() ? m.blank : it->second;
  };
  RunResult r;
  std::size_t q = m.start;
  std::vector<std::size_t> heads(m.tapes, 1), read(m.tapes);
  while (!m.halting[q] && r.steps < max_steps) {
    for (std::size_t t = 0; t < m.tapes; ++t) read[t] = cell(t, heads[t]);
    const Transition* tr = m.transition(q, read);
    if (!tr) throw Error("machine has no transition (machine not validated)");
    StepRecord rec{q, heads, read, {}};
    for (std::size_t t = 0; t < m.tapes; ++t) {
      Event e;
      if (tr->write[t] != read[t]) {
        e = {true, read[t], tr->write[t]};
        if (tr->write[t] == m.blank) tape[t].erase(heads[t]);
        else tape[t][heads[t]] = tr->write[t];
      }
      rec.events.push_back(e);
      if (tr->move[t] == Move::R) ++heads[t];
      else if (tr->move[t] == Move::L && heads[t] > 1) --heads[t];
    }
    r.step_log.push_back(std::move(rec));
    q = tr->next;
    ++r.steps;
  }
  r.halted = m.halting[q];
  r.final_state = q;
  r.final_heads = heads;
  for (auto& t : tape) r.final_tapes.emplace_back(t.begin(), t.end());
  if (r.halted) {
    Word out;
    for (std::size_t c = 1;; ++c) {
      auto s = cell(m.output_tape - 1, c);
      if (s == m.blank) break;
      out.push_back(s);
    }
    r.output = std::move(out);
  }
  return r;
}

std::vector<std::vector<ValueChange>> value_change_log(const RunResult& r) {
  std::size_t tapes = r.final_heads.size();
  std::vector<std::vector<ValueChange>> log(tapes);
  for (std::size_t s = 0; s < r.step_log.size(); ++s) {
    const auto& rec = r.step_log[s];
    for (std::size_t t = 0; t < rec.events.size(); ++t)
      if (rec.events[t].write && rec.events[t].from != rec.events[t].to)
        log[t].push_back({t + 1, s, rec.heads[t], rec.events[t].from, rec.events[t].to});
  }
  return log;
}

}  // namespace crasp::tm

#include "crasp/corpus/tasks.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "crasp/error.hpp"

namespace crasp::corpus {

namespace {

constexpr std::array<std::string_view, 4> kTaskNames{"parity", "boolean", "s5", "binary"};
constexpr std::array<std::string_view, 5> kFormatNames{"naive", "value-change", "signpost", "signpost-tape",
                                                       "signpost-value-change"};

std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::string join(const std::vector<std::string>& v, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  std::string out;
  for (std::size_t k = from; k < std::min(to, v.size()); ++k) {
    if (!out.empty()) out += ' ';
    out += v[k];
  }
  return out;
}

std::string sp(std::uint64_t id) { return "<" + std::to_string(id) + ">"; }

bool is_signpost(const std::string& t) {
  return t.size() > 2 && t.front() == '<' && t.back() == '>' &&
         std::all_of(t.begin() + 1, t.end() - 1, [](char c) { return c >= '0' && c <= '9'; });
}

std::uint64_t signpost_value(const std::string& t) { return std::stoull(t.substr(1, t.size() - 2)); }

char var_name(int v) { return static_cast<char>('A' + v); }

int var_index(const std::string& t) {
  if (t.size() == 1 && t[0] >= 'A' && t[0] < 'A' + static_cast<int>(kVariables)) return t[0] - 'A';
  return -1;
}

std::string strip_eot(std::string_view trace) {
  if (trace.size() < kEndOfText.size() || trace.substr(trace.size() - kEndOfText.size()) != kEndOfText)
    throw Error("trace does not end with " + std::string(kEndOfText));
  return std::string(trace.substr(0, trace.size() - kEndOfText.size()));
}

}  // namespace

std::string_view task_name(Task t) { return kTaskNames[static_cast<std::size_t>(t)]; }
std::string_view format_name(Format f) { return kFormatNames[static_cast<std::size_t>(f)]; }
std::string_view split_name(Split s) { return s == Split::Train ? "train" : "test"; }

std::optional<Task> parse_task(std::string_view s) {
  for (std::size_t k = 0; k < kTaskNames.size(); ++k)
    if (kTaskNames[k] == s) return static_cast<Task>(k);
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view s) {
  for (std::size_t k = 0; k < kFormatNames.size(); ++k)
    if (kFormatNames[k] == s) return static_cast<Format>(k);
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

bool valid_pair(Task t, Format f) {
  switch (t) {
    case Task::Parity: return f == Format::Naive || f == Format::ValueChange;
    case Task::BooleanEval: return f == Format::Naive || f == Format::Signpost;
    case Task::S5Perm: return f == Format::Naive || f == Format::Signpost || f == Format::SignpostTape;
    case Task::BinaryPerm:
      return f == Format::Naive || f == Format::Signpost || f == Format::SignpostValueChange;
  }
  return false;
}

void TaskConfig::validate() const {
  if (!valid_pair(task, format))
    throw Error("format " + std::string(format_name(format)) + " is not defined for task " +
                std::string(task_name(task)));
  if (min_len < 1) throw Error("min_len must be >= 1");
  if (max_len < min_len) throw Error("max_len must be >= min_len");
  if (!(repetitive_ratio >= 0.0 && repetitive_ratio <= 1.0)) throw Error("repetitive_ratio must be in [0, 1]");
  if (!(repeat_prob >= 0.0 && repeat_prob <= 1.0)) throw Error("repeat_prob must be in [0, 1]");
}

// ---- parity ----

std::string render_parity_prompt(const std::vector<bool>& bits) {
  std::string out;
  for (bool b : bits) {
    if (!out.empty()) out += ' ';
    out += b ? '1' : '0';
  }
  return out;
}

std::string render_parity_trace(const std::vector<bool>& bits, Format f) {
  std::string out;
  bool odd = false;
  if (f == Format::ValueChange) out += "E ";
  for (bool b : bits) {
    odd ^= b;
    if (f == Format::Naive || b) out += odd ? "O " : "E ";
  }
  return out + "answer " + (odd ? "O" : "E") + std::string(kEndOfText);
}

// ---- boolean ----

std::string render_boolean_prompt(const BoolAst& f, Format fmt, std::uint64_t offset) {
  return fmt == Format::Signpost ? render_signpost(f, offset) : render_naive(f);
}

std::string render_boolean_trace(const BoolAst& f, Format fmt, std::uint64_t offset) {
  std::string out;
  auto v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (fmt == Format::Signpost) out += sp(offset + k) + ' ';
    out += v[k] ? "T " : "F ";
  }
  return out + "answer: " + (v.back() ? "T" : "F") + std::string(kEndOfText);
}

// ---- permutations ----

const std::vector<std::string>& s5_pool() {
  static const std::vector<std::string> pool{
      "Cat",     "Dog",      "Hat",           "Book",          "Tea Cup",         "Toy Car",
      "Red Pen", "Blue Box", "Old Gold Coin", "Big Red Ball",  "Small Glass Jar", "Green Paper Kite"};
  return pool;
}

PermState apply_swaps(const PermState& init, const std::vector<std::pair<int, int>>& ops) {
  PermState s = init;
  for (auto [x, y] : ops) std::swap(s[x], s[y]);
  return s;
}

std::string perm_answer(const PermState& s) {
  std::string out;
  for (const auto& o : s) {
    if (!out.empty()) out += ' ';
    out += o;
  }
  return out;
}

namespace {

std::string state_text(const PermState& s) {
  std::string out;
  for (std::size_t v = 0; v < kVariables; ++v) {
    if (v) out += ' ';
    out += var_name(static_cast<int>(v));
    out += ' ';
    out += s[v];
  }
  return out;
}

std::string swap_text(std::pair<int, int> op) {
  return std::string("swap ") + var_name(op.first) + ' ' + var_name(op.second);
}

void check_instance(const PermInstance& p, Format f) {
  for (auto [x, y] : p.ops)
    if (x < 0 || y < 0 || x >= static_cast<int>(kVariables) || y >= static_cast<int>(kVariables) || x == y)
      throw Error("malformed swap");
  if (f != Format::Naive && p.ids.size() != p.ops.size()) throw Error("one signpost id per operation required");
  if (f == Format::SignpostTape) {
    auto sorted = p.listing;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if (sorted[k] != k || sorted.size() != p.ops.size()) throw Error("listing is not a permutation");
  }
}

}  // namespace

std::string render_perm_prompt(const PermInstance& p, Format f) {
  check_instance(p, f);
  std::string out = "init " + state_text(p.init);
  if (f == Format::SignpostTape) {
    out += " tape";
    for (auto id : p.ids) out += ' ' + sp(id);
    out += " end operation";
    for (auto k : p.listing) out += ' ' + sp(p.ids[k]) + ' ' + swap_text(p.ops[k]) + " .";
    return out;
  }
  out += " operation";
  for (std::size_t k = 0; k < p.ops.size(); ++k) {
    if (f == Format::Naive)
      out += ' ' + swap_text(p.ops[k]) + " .";
    else
      out += ' ' + sp(p.ids[k]) + ' ' + swap_text(p.ops[k]) + ' ' + sp(p.ids[k]) + " .";
  }
  return out + " end .";
}

std::string render_perm_trace(const PermInstance& p, Format f) {
  check_instance(p, f);
  std::string out;
  PermState s = p.init;
  std::vector<std::pair<std::string, std::string>> moves[kVariables];  // per variable: (from, to)
  for (std::size_t k = 0; k < p.ops.size(); ++k) {
    auto [x, y] = p.ops[k];
    PermState prev = s;
    std::swap(s[x], s[y]);
    if (f == Format::Naive) {
      out += swap_text(p.ops[k]) + " write " + state_text(s) + " . ";
    } else if (f == Format::SignpostValueChange) {
      out += "load " + sp(p.ids[k]) + " . " + sp(p.ids[k]) + ' ' + swap_text(p.ops[k]);
      for (int v : {x, y}) {
        if (prev[v] != s[v]) {
          out += std::string(" W_") + var_name(v) + ' ' + prev[v] + '_' + s[v];
          moves[v].emplace_back(prev[v], s[v]);
        } else {
          out += std::string(" K_") + var_name(v);
        }
      }
      out += ' ';
    } else {
      out += "load " + sp(p.ids[k]) + " . line " + sp(p.ids[k]) + ' ' + swap_text(p.ops[k]) + " write " +
             state_text(s) + ' ';
    }
  }
  if (f == Format::Naive) {
    out += "end";
  } else if (f == Format::SignpostValueChange) {
    out += "load end . res";
    for (std::size_t v = 0; v < kVariables; ++v) {
      const auto& init = p.init[v];
      std::size_t in = 0, outgoing = 0;
      for (const auto& [from, to] : moves[v]) {
        in += to == init;
        outgoing += from == init;
      }
      std::string cmp = in == outgoing ? "==" : in < outgoing ? "<" : ">";
      out += std::string(" <") + var_name(static_cast<int>(v)) + "> init " + init + " IN " + cmp + " OUT final " +
             s[v];
    }
  } else {
    out += "load end . end";
  }
  return out + " answer " + perm_answer(s) + std::string(kEndOfText);
}

// ---- oracles ----

namespace {

struct ParsedPerm {
  PermState init;
  std::vector<std::pair<int, int>> ops;  // execution order
  std::vector<std::uint64_t> ids;        // execution order; empty for naive prompts
};

// Reads `A obj B obj ... E obj` starting at tokens[k]; stops at the first
// token after E's object that is in `stop` or is not an object word.
PermState read_state(const std::vector<std::string>& t, std::size_t& k, const std::set<std::string>& stop) {
  PermState s;
  for (std::size_t v = 0; v < kVariables; ++v) {
    if (k >= t.size() || var_index(t[k]) != static_cast<int>(v))
      throw Error(std::string("expected variable ") + var_name(static_cast<int>(v)));
    ++k;
    std::vector<std::string> words;
    while (k < t.size() && var_index(t[k]) < 0 && !stop.count(t[k]) && !is_signpost(t[k])) words.push_back(t[k++]);
    if (words.empty()) throw Error(std::string("variable ") + var_name(static_cast<int>(v)) + " has no object");
    s[v] = join(words);
  }
  return s;
}

std::pair<int, int> read_swap(const std::vector<std::string>& t, std::size_t& k) {
  if (k + 2 >= t.size() || t[k] != "swap") throw Error("expected swap");
  int x = var_index(t[k + 1]), y = var_index(t[k + 2]);
  if (x < 0 || y < 0 || x == y) throw Error("malformed swap operands");
  k += 3;
  return {x, y};
}

void expect(const std::vector<std::string>& t, std::size_t& k, const char* what) {
  if (k >= t.size() || t[k] != what) throw Error(std::string("expected '") + what + "'");
  ++k;
}

ParsedPerm parse_perm_prompt(std::string_view prompt) {
  auto t = split_ws(prompt);
  std::size_t k = 0;
  expect(t, k, "init");
  ParsedPerm p;
  p.init = read_state(t, k, {"operation", "tape"});
  std::vector<std::uint64_t> tape;
  bool has_tape = k < t.size() && t[k] == "tape";
  if (has_tape) {
    ++k;
    while (k < t.size() && t[k] != "end") {
      if (!is_signpost(t[k])) throw Error("tape holds signposts only");
      tape.push_back(signpost_value(t[k++]));
    }
    expect(t, k, "end");
  }
  expect(t, k, "operation");
  std::vector<std::pair<int, int>> listed;
  std::vector<std::uint64_t> listed_ids;
  bool ended = false;
  while (k < t.size()) {
    if (t[k] == "end") {
      ++k;
      expect(t, k, ".");
      ended = true;
      break;
    }
    std::optional<std::uint64_t> id;
    if (is_signpost(t[k])) id = signpost_value(t[k++]);
    auto op = read_swap(t, k);
    if (id && !has_tape) {
      if (k >= t.size() || !is_signpost(t[k]) || signpost_value(t[k]) != *id)
        throw Error("operation signpost is not repeated after the swap");
      ++k;
    }
    expect(t, k, ".");
    if (has_tape != id.has_value() && has_tape) throw Error("tape prompt operation lacks a signpost");
    listed.push_back(op);
    if (id) listed_ids.push_back(*id);
  }
  if (k != t.size()) throw Error("trailing tokens after end");
  if (!has_tape && !ended) throw Error("missing 'end .'");
  if (!listed_ids.empty() && listed_ids.size() != listed.size()) throw Error("signposts on some operations only");
  if (std::set<std::uint64_t>(listed_ids.begin(), listed_ids.end()).size() != listed_ids.size())
    throw Error("duplicate operation signpost");
  if (has_tape) {
    if (tape.size() != listed.size()) throw Error("tape and operations differ in length");
    for (auto id : tape) {
      auto it = std::find(listed_ids.begin(), listed_ids.end(), id);
      if (it == listed_ids.end()) throw Error("tape signpost " + sp(id) + " names no operation");
      p.ops.push_back(listed[static_cast<std::size_t>(it - listed_ids.begin())]);
      p.ids.push_back(id);
    }
  } else {
    p.ops = listed;
    p.ids = listed_ids;
  }
  return p;
}

}  // namespace

std::string task_oracle(Task t, std::string_view prompt) {
  switch (t) {
    case Task::Parity: {
      std::size_t ones = 0, bits = 0;
      for (char c : prompt) {
        if (c == '1') ++ones;
        if (c == '0' || c == '1') ++bits;
        else if (c != ' ') throw Error(std::string("unexpected character '") + c + "' in parity prompt");
      }
      if (bits == 0) throw Error("empty parity prompt");
      return ones % 2 ? "O" : "E";
    }
    case Task::BooleanEval: return parse_and_evaluate(prompt) ? "T" : "F";
    case Task::S5Perm:
    case Task::BinaryPerm: {
      auto p = parse_perm_prompt(prompt);
      return perm_answer(apply_swaps(p.init, p.ops));
    }
  }
  throw Error("unknown task");
}

std::string trace_answer(std::string_view trace) {
  auto t = split_ws(strip_eot(trace));
  for (std::size_t k = t.size(); k-- > 0;)
    if (t[k] == "answer" || t[k] == "answer:") {
      if (k + 1 == t.size()) throw Error("empty answer");
      return join(t, k + 1);
    }
  throw Error("trace has no answer");
}

// ---- generation ----

namespace {

std::pair<int, int> random_swap(Rng& rng) {
  int x = static_cast<int>(rng.below(kVariables));
  int y = static_cast<int>(rng.below(kVariables - 1));
  if (y >= x) ++y;
  return {x, y};
}

bool same_pair(std::pair<int, int> a, std::pair<int, int> b) {
  return std::minmax(a.first, a.second) == std::minmax(b.first, b.second);
}

}  // namespace

CorpusRecord gen_record(const TaskConfig& cfg, std::uint64_t index) {
  cfg.validate();
  CorpusRecord r;
  auto& m = r.meta;
  m.task = cfg.task;
  m.format = cfg.format;
  m.index = index;
  m.split = cfg.split;
  m.seed = record_seed(cfg.seed, index);
  Rng rng(m.seed);
  const std::size_t len = rng.between(cfg.min_len, cfg.max_len);
  m.length = len;
  if (cfg.offsets) m.position_offset = rng.between(0, cfg.max_test_len > len ? cfg.max_test_len - len : 0);

  switch (cfg.task) {
    case Task::Parity: {
      std::vector<bool> bits(len);
      for (std::size_t k = 0; k < len; ++k) bits[k] = rng.next() >> 63;
      r.prompt = render_parity_prompt(bits);
      r.trace = render_parity_trace(bits, cfg.format);
      break;
    }
    case Task::BooleanEval: {
      std::size_t half = cfg.max_test_len / 2;
      if (cfg.offsets && cfg.format == Format::Signpost) m.signpost_offset = rng.between(0, half > len ? half - len : 0);
      auto f = sample_formula(len, rng);
      r.prompt = render_boolean_prompt(f, cfg.format, m.signpost_offset);
      r.trace = render_boolean_trace(f, cfg.format, m.signpost_offset);
      break;
    }
    case Task::S5Perm:
    case Task::BinaryPerm: {
      PermInstance p;
      if (cfg.task == Task::S5Perm) {
        auto pick = rng.distinct(0, s5_pool().size() - 1, kVariables);
        for (std::size_t v = 0; v < kVariables; ++v) p.init[v] = s5_pool()[pick[v]];
      } else {
        for (;;) {
          for (auto& o : p.init) o = kBinaryObjects[rng.below(2)];
          if (std::any_of(p.init.begin(), p.init.end(), [&](const std::string& o) { return o != p.init[0]; }))
            break;
        }
      }
      m.repetitive = cfg.repetitive_ratio > 0 && rng.bernoulli(cfg.repetitive_ratio);
      for (std::size_t k = 0; k < len; ++k) {
        if (k == 0) {
          p.ops.push_back(random_swap(rng));
        } else if (m.repetitive && rng.bernoulli(cfg.repeat_prob)) {
          p.ops.push_back(p.ops.back());
        } else if (m.repetitive) {
          auto op = random_swap(rng);
          while (same_pair(op, p.ops.back())) op = random_swap(rng);
          p.ops.push_back(op);
        } else {
          p.ops.push_back(random_swap(rng));
        }
      }
      if (cfg.format != Format::Naive) {
        std::size_t hi = std::max(cfg.max_test_len / 2, len);
        p.ids = rng.distinct(1, hi, len);
      }
      if (cfg.format == Format::SignpostTape) {
        p.listing.resize(len);
        for (std::size_t k = 0; k < len; ++k) p.listing[k] = k;
        if (cfg.split == Split::Train) rng.shuffle(p.listing);
      }
      r.prompt = render_perm_prompt(p, cfg.format);
      r.trace = render_perm_trace(p, cfg.format);
      break;
    }
  }
  r.answer = trace_answer(r.trace);
  return r;
}

// ---- consistency checks ----

namespace {

void check_parity(const CorpusRecord& r, const std::vector<std::string>& t, std::vector<std::string>& bad) {
  std::vector<std::string> want;
  bool odd = false;
  if (r.meta.format == Format::ValueChange) want.push_back("E");
  for (char c : r.prompt) {
    if (c != '0' && c != '1') continue;
    odd ^= c == '1';
    if (r.meta.format == Format::Naive || c == '1') want.push_back(odd ? "O" : "E");
  }
  std::vector<std::string> got(t.begin(), std::find(t.begin(), t.end(), "answer"));
  if (got != want) bad.push_back("parity states '" + join(got) + "' expected '" + join(want) + "'");
}

void check_boolean(const CorpusRecord& r, const std::vector<std::string>& t, std::vector<std::string>& bad) {
  // Defining signposts in the prompt are followed by a literal or operator.
  auto p = split_ws(r.prompt);
  std::set<std::uint64_t> defs;
  std::size_t nodes = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& w = p[k];
    nodes += w == "true" || w == "false" || w == "NOT" || w == "AND" || w == "OR";
    if (is_signpost(w) && k + 1 < p.size()) {
      const auto& n = p[k + 1];
      if (n == "true" || n == "false" || n == "NOT" || n == "AND" || n == "OR")
        if (!defs.insert(signpost_value(w)).second) bad.push_back("duplicate signpost " + w);
    }
  }
  std::vector<std::uint64_t> idx;
  std::size_t values = 0;
  for (const auto& w : t) {
    if (w == "answer:") break;
    if (is_signpost(w)) idx.push_back(signpost_value(w));
    else if (w == "T" || w == "F") ++values;
    else bad.push_back("unexpected boolean trace token " + w);
  }
  if (values != nodes) bad.push_back("boolean trace has " + std::to_string(values) + " values for " +
                                     std::to_string(nodes) + " nodes");
  if (r.meta.format == Format::Signpost) {
    if (idx.size() != values) bad.push_back("boolean signpost trace lacks indices");
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] != r.meta.signpost_offset + k) {
        bad.push_back("boolean trace indices are not ascending from the offset");
        break;
      }
    if (defs.size() != nodes) bad.push_back("prompt signposts do not cover every node");
  }
}

void check_perm(const CorpusRecord& r, const std::vector<std::string>& t, std::vector<std::string>& bad) {
  ParsedPerm p;
  try {
    p = parse_perm_prompt(r.prompt);
  } catch (const Error& e) {
    bad.push_back(std::string("prompt: ") + e.what());
    return;
  }
  const Format f = r.meta.format;
  PermState s = p.init;
  std::size_t k = 0, step = 0;
  std::map<int, std::vector<std::pair<std::string, std::string>>> moves;
  try {
    for (;; ++step) {
      if (f == Format::Naive) {
        if (t.at(k) == "end") {
          ++k;
          break;
        }
      } else {
        expect(t, k, "load");
        if (t.at(k) == "end") {
          ++k;
          expect(t, k, ".");
          break;
        }
        if (!is_signpost(t[k]) || step >= p.ids.size() || signpost_value(t[k]) != p.ids[step])
          throw Error("load signpost differs from the execution order");
        ++k;
        expect(t, k, ".");
        if (f != Format::SignpostValueChange) expect(t, k, "line");
        if (!is_signpost(t.at(k)) || signpost_value(t[k]) != p.ids[step]) throw Error("line signpost mismatch");
        ++k;
      }
      if (step >= p.ops.size()) throw Error("trace has more steps than the prompt");
      auto op = read_swap(t, k);
      if (op != p.ops[step]) throw Error("swap differs from the prompt at step " + std::to_string(step + 1));
      PermState prev = s;
      std::swap(s[op.first], s[op.second]);
      if (f == Format::SignpostValueChange) {
        for (int v : {op.first, op.second}) {
          std::string w = std::string("W_") + var_name(v), kk = std::string("K_") + var_name(v);
          if (prev[v] != s[v]) {
            expect(t, k, w.c_str());
            if (t.at(k) != prev[v] + "_" + s[v]) throw Error("wrong transition token for " + w);
            moves[v].emplace_back(prev[v], s[v]);
            ++k;
          } else {
            expect(t, k, kk.c_str());
          }
        }
      } else {
        expect(t, k, "write");
        auto got = read_state(t, k, {".", "load"});
        if (got != s) throw Error("written state is wrong at step " + std::to_string(step + 1));
        if (f == Format::Naive) expect(t, k, ".");
      }
    }
    if (step != p.ops.size()) throw Error("trace stops before the last operation");
    if (f == Format::SignpostValueChange) {
      expect(t, k, "res");
      for (std::size_t v = 0; v < kVariables; ++v) {
        std::string tag = std::string("<") + var_name(static_cast<int>(v)) + ">";
        expect(t, k, tag.c_str());
        expect(t, k, "init");
        if (t.at(k++) != p.init[v]) throw Error("resolution init differs for " + tag);
        expect(t, k, "IN");
        std::string cmp = t.at(k++);
        expect(t, k, "OUT");
        expect(t, k, "final");
        std::string fin = t.at(k++);
        if ((cmp == "==") != (fin == p.init[v])) throw Error("comparator disagrees with the final object of " + tag);
        if (cmp != "==" && cmp != "<") throw Error("unexpected comparator " + cmp);
        std::size_t in = 0, out = 0;
        for (const auto& [a, b] : moves[static_cast<int>(v)]) {
          in += b == p.init[v];
          out += a == p.init[v];
        }
        if ((in == out) != (cmp == "==")) throw Error("comparator disagrees with the logged transitions of " + tag);
        if (fin != s[v]) throw Error("resolved final differs from the fold for " + tag);
      }
    } else {
      if (f != Format::Naive) expect(t, k, "end");
    }
    if (t.at(k) != "answer") throw Error("expected answer");
  } catch (const std::out_of_range&) {
    bad.push_back("trace ends early");
  } catch (const Error& e) {
    bad.push_back(e.what());
  }
}

}  // namespace

std::vector<std::string> check_record(const CorpusRecord& r) {
  std::vector<std::string> bad;
  std::string oracle;
  try {
    oracle = task_oracle(r.meta.task, r.prompt);
  } catch (const Error& e) {
    bad.push_back(std::string("oracle: ") + e.what());
  }
  if (!oracle.empty() && oracle != r.answer) bad.push_back("oracle answer " + oracle + " != record answer " + r.answer);
  std::vector<std::string> t;
  try {
    if (trace_answer(r.trace) != r.answer) bad.push_back("trace answer differs from the record answer");
    t = split_ws(strip_eot(r.trace));
  } catch (const Error& e) {
    bad.push_back(e.what());
    return bad;
  }
  switch (r.meta.task) {
    case Task::Parity: check_parity(r, t, bad); break;
    case Task::BooleanEval: check_boolean(r, t, bad); break;
    default: check_perm(r, t, bad); break;
  }
  return bad;
}

}  // namespace crasp::corpus

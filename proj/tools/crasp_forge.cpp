#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crasp/corpus/dataset.hpp"
#include "crasp/dsl.hpp"
#include "crasp/evaluate.hpp"
#include "crasp/tm_compiler.hpp"
#include "crasp/tm_verify.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace crasp;

enum Exit { kOk = 0, kUsage = 2, kMismatch = 3, kBudget = 4, kIo = 5, kGeneration = 6 };

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int code, std::string kind, std::string message) {
  throw Failure{code, std::move(kind), std::move(message)};
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  bool quiet = false;
  std::string format = "text";

  bool structured() const { return format == "structured"; }

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("CRASP_FORGE_SEED")) {
      try {
        std::size_t used = 0;
        auto v = std::stoull(env, &used);
        if (used == std::string(env).size()) return v;
      } catch (const std::exception&) {
      }
      fail(kUsage, "usage", std::string("CRASP_FORGE_SEED is not a natural number: ") + env);
    }
    return 0;
  }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kIo, "io", "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) fail(kIo, "io", "cannot read " + path);
  return s.str();
}

// Writes to path.tmp and renames, so a failed run leaves no partial file.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) fail(kIo, "io", "write to stdout failed");
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      fail(kIo, "io", "cannot write " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    fail(kIo, "io", "cannot write " + path + ": " + ec.message());
  }
}

void emit(const std::string& text) { write_text("", text); }

bool looks_like_cot(const std::string& source) {
  std::istringstream in(source);
  for (std::string line; std::getline(in, line);) {
    auto at = line.find_first_not_of(" \t");
    if (at != std::string::npos && line.compare(at, 6, "OUTPUT") == 0) return true;
  }
  return false;
}

tm::TmSpec load_machine(const std::string& path) { return tm::load_tm(read_text(path)); }

// ---- parse / eval / generate ----

struct ProgramArgs {
  std::string program;
  std::string input;
  std::string out;
  std::string machine;
  std::uint64_t offset = 1;
};

int cmd_parse(const Globals& g, const ProgramArgs& a) {
  auto src = read_text(a.program);
  if (looks_like_cot(src)) {
    auto cp = parse_cot_program(src);
    if (g.structured()) {
      Json j{{"schema", "crasp-forge/parse"},
             {"version", 1},
             {"kind", "cot"},
             {"dialect", dialect_name(cp.base().dialect())},
             {"alphabet", cp.alphabet().names()},
             {"definitions", cp.base().defs().size()},
             {"outputs", cp.outputs().size()},
             {"signpost_outputs", cp.signpost_outputs().size()}};
      emit(j.dump() + "\n");
    } else {
      emit(render_cot_program(cp));
    }
  } else {
    auto p = parse_program(src);
    if (g.structured()) {
      Json j{{"schema", "crasp-forge/parse"},
             {"version", 1},
             {"kind", "program"},
             {"dialect", dialect_name(p.dialect())},
             {"alphabet", p.alphabet().names()},
             {"definitions", p.defs().size()}};
      emit(j.dump() + "\n");
    } else {
      emit(render_program(p));
    }
  }
  return kOk;
}

int cmd_eval(const Globals& g, const ProgramArgs& a) {
  auto src = read_text(a.program);
  Program p = looks_like_cot(src) ? parse_cot_program(src).base() : parse_program(src);
  auto w = parse_tokens(p.alphabet(), a.input);
  auto table = evaluate(p, w);
  if (g.structured()) {
    Json defs = Json::array();
    for (std::size_t d = 0; d < table.names.size(); ++d)
      defs.push_back({{"name", table.names[d]},
                      {"type", table.types[d] == ValueType::Bool ? "bool" : "count"},
                      {"values", table.values[d]}});
    Json tokens = Json::array();
    for (const auto& t : w) tokens.push_back(token_text(p.alphabet(), t));
    emit(Json{{"schema", "crasp-forge/eval"}, {"version", 1}, {"tokens", tokens}, {"definitions", defs}}.dump() +
         "\n");
    return kOk;
  }
  std::ostringstream out;
  out << "tokens";
  for (const auto& t : w) out << ' ' << token_text(p.alphabet(), t);
  out << "\n";
  for (std::size_t d = 0; d < table.names.size(); ++d) {
    out << table.names[d];
    for (auto v : table.values[d]) out << ' ' << v;
    out << "\n";
  }
  emit(out.str());
  return kOk;
}

int cmd_generate(const Globals& g, const ProgramArgs& a) {
  if (a.program.empty() == a.machine.empty()) fail(kUsage, "usage", "generate needs exactly one of --program, --machine");
  std::optional<CotProgram> owned;
  std::optional<tm::CompiledTm> compiled;
  TokenSeq prompt;
  if (!a.program.empty()) {
    owned = parse_cot_program(read_text(a.program));
    prompt = parse_tokens(owned->alphabet(), a.input);
  } else {
    compiled = tm::compile(load_machine(a.machine));
    prompt = tm::compiled_prompt(*compiled, compiled->machine.parse_word(a.input), a.offset);
  }
  const CotProgram& cp = owned ? *owned : compiled->program;
  std::size_t budget = g.budget.value_or(10000);
  auto r = generate(cp, prompt, budget);
  auto text = tokens_text(cp.alphabet(), r.trace);
  if (g.structured()) {
    Json j{{"schema", "crasp-forge/generate"},
           {"version", 1},
           {"status", r.completed() ? "completed" : "budget_exhausted"},
           {"prompt", tokens_text(cp.alphabet(), prompt)},
           {"trace", text},
           {"answer", tokens_text(cp.alphabet(), r.answer)},
           {"tokens", r.trace.size()},
           {"budget", budget}};
    emit(j.dump() + "\n");
  } else {
    emit(text + "\n");
  }
  if (!r.completed()) fail(kBudget, "budget", "no <EOS> within " + std::to_string(budget) + " tokens");
  return kOk;
}

// ---- machines ----

struct MachineArgs {
  std::string machine;
  std::string input;
  std::string out;
  std::size_t max_steps = 10000;
  bool log = false;
  bool swap_left_right = false;
};

int cmd_compile(const Globals& g, const MachineArgs& a) {
  auto m = load_machine(a.machine);
  auto c = tm::compile(m, {a.swap_left_right});
  auto text = render_cot_program(c.program);
  write_text(a.out, text);
  if (!g.quiet && !a.out.empty() && a.out != "-") {
    if (g.structured())
      std::cerr << Json{{"schema", "crasp-forge/compile"},
                        {"version", 1},
                        {"tapes", c.layout.tapes},
                        {"block_length", c.layout.block_length},
                        {"alphabet", c.program.alphabet().size()},
                        {"definitions", c.program.base().defs().size()}}
                       .dump()
                << "\n";
    else
      std::cerr << "compiled " << a.machine << ": " << c.program.base().defs().size() << " definitions, block length "
                << c.layout.block_length << "\n";
  }
  return kOk;
}

int cmd_simulate(const Globals& g, const MachineArgs& a) {
  auto m = load_machine(a.machine);
  auto w = m.parse_word(a.input);
  auto r = tm::simulate(m, w, a.max_steps);
  auto cells = [&](const std::vector<std::size_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  if (g.structured()) {
    Json j{{"schema", "crasp-forge/simulate"},
           {"version", 1},
           {"halted", r.halted},
           {"steps", r.steps},
           {"final_state", m.states[r.final_state]},
           {"final_heads", r.final_heads}};
    j["output"] = r.output ? Json(m.word_text(*r.output)) : Json(nullptr);
    if (a.log) {
      Json log = Json::array();
      for (const auto& s : r.step_log) {
        Json ev = Json::array();
        for (const auto& e : s.events)
          ev.push_back(e.write ? "WRITE(" + m.symbols[e.from] + "->" + m.symbols[e.to] + ")" : "KEEP");
        std::vector<std::string> read;
        for (auto x : s.read) read.push_back(m.symbols[x]);
        log.push_back({{"state", m.states[s.state]}, {"heads", s.heads}, {"read", read}, {"events", ev}});
      }
      j["step_log"] = log;
    }
    emit(j.dump() + "\n");
  } else {
    std::ostringstream out;
    if (a.log)
      for (std::size_t k = 0; k < r.step_log.size(); ++k) {
        const auto& s = r.step_log[k];
        out << "step " << k << ": " << m.states[s.state] << " heads " << cells(s.heads) << " read";
        for (auto x : s.read) out << ' ' << m.symbols[x];
        for (const auto& e : s.events)
          out << ' ' << (e.write ? "WRITE(" + m.symbols[e.from] + "->" + m.symbols[e.to] + ")" : "KEEP");
        out << "\n";
      }
    if (r.halted)
      out << "halted in " << m.states[r.final_state] << " after " << r.steps << " steps; output: "
          << m.word_text(*r.output) << "\n";
    else
      out << "no halt within " << a.max_steps << " steps\n";
    emit(out.str());
  }
  if (!r.halted) fail(kBudget, "budget", "machine did not halt within " + std::to_string(a.max_steps) + " steps");
  return kOk;
}

struct VerifyArgs {
  std::string machine;
  std::vector<std::string> inputs;
  std::string inputs_file;
  std::optional<std::size_t> exhaustive_len;
  std::optional<std::size_t> random;
  std::size_t max_len = 10;
  std::size_t budget_factor = 10;
  std::size_t max_steps = 10000;
  std::size_t jobs = 1;
  std::uint64_t offset = 1;
  std::string out;
  bool swap_left_right = false;
};

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  auto m = load_machine(a.machine);
  std::vector<tm::Word> words;
  for (const auto& s : a.inputs) words.push_back(m.parse_word(s));
  if (!a.inputs_file.empty()) {
    std::istringstream in(read_text(a.inputs_file));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      words.push_back(m.parse_word(line));
    }
  }
  if (a.exhaustive_len) {
    auto all = tm::all_inputs(m, *a.exhaustive_len);
    words.insert(words.end(), all.begin(), all.end());
  }
  if (a.random) {
    corpus::Rng rng(corpus::splitmix64(g.resolved_seed()));
    for (std::size_t k = 0; k < *a.random; ++k) {
      tm::Word w(rng.below(a.max_len + 1));
      for (auto& s : w) s = m.input[rng.below(m.input.size())];
      words.push_back(w);
    }
  }
  if (words.empty()) fail(kUsage, "usage", "verify needs --input, --inputs-file, --exhaustive-len or --random");
  auto c = tm::compile(m, {a.swap_left_right});
  tm::VerifyOptions opt;
  opt.budget_factor = a.budget_factor;
  opt.max_steps = a.max_steps;
  opt.offset = a.offset;
  opt.jobs = a.jobs;
  auto rep = tm::verify_equivalence(c, words, opt);
  auto text = g.structured() ? tm::report_jsonl(c, rep) : tm::report_text(c, rep);
  if (!g.quiet || g.structured() || !a.out.empty()) write_text(a.out, text);
  if (!rep.ok())
    fail(kMismatch, "mismatch", std::to_string(rep.failures()) + " of " + std::to_string(rep.cases.size()) +
                                    " inputs disagree with the simulator");
  return kOk;
}

// ---- dataset ----

struct DatasetArgs {
  std::string task, format;
  std::size_t min_len = 1, max_len = 10, max_test_len = 100, count = 1, jobs = 1;
  double repetitive_ratio = 0.0, repeat_prob = 0.9;
  std::string split = "train";
  bool plain = false, no_offsets = false;
  std::string out;
};

int cmd_dataset(const Globals& g, const DatasetArgs& a) {
  corpus::TaskConfig cfg;
  auto task = corpus::parse_task(a.task);
  auto format = corpus::parse_format(a.format);
  auto split = corpus::parse_split(a.split);
  if (!task) fail(kUsage, "usage", "unknown task '" + a.task + "' (parity, boolean, s5, binary)");
  if (!format)
    fail(kUsage, "usage",
         "unknown format '" + a.format + "' (naive, value-change, signpost, signpost-tape, signpost-value-change)");
  if (!split) fail(kUsage, "usage", "unknown split '" + a.split + "' (train, test)");
  cfg.task = *task;
  cfg.format = *format;
  cfg.split = *split;
  cfg.min_len = a.min_len;
  cfg.max_len = a.max_len;
  cfg.max_test_len = a.max_test_len;
  cfg.seed = g.resolved_seed();
  cfg.repetitive_ratio = a.repetitive_ratio;
  cfg.repeat_prob = a.repeat_prob;
  cfg.offsets = !a.no_offsets;
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(kUsage, "usage", e.what());
  }
  if (a.count == 0) fail(kUsage, "usage", "--count must be >= 1");

  auto lf = a.plain ? corpus::LineFormat::Plain : corpus::LineFormat::Json;
  const bool to_stdout = a.out.empty() || a.out == "-";
  corpus::DatasetSummary sum;
  if (to_stdout) {
    try {
      sum = corpus::gen_dataset(cfg, a.count, std::cout, lf, a.jobs);
    } catch (const corpus::SinkError& e) {
      fail(kIo, "io", e.what());
    }
  } else {
    std::string tmp = a.out + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) fail(kIo, "io", "cannot write " + a.out);
      try {
        sum = corpus::gen_dataset(cfg, a.count, out, lf, a.jobs);
      } catch (const corpus::SinkError& e) {
        out.close();
        std::remove(tmp.c_str());
        fail(kIo, "io", std::string(e.what()) + " (" + a.out + ")");
      }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, a.out, ec);
    if (ec) {
      std::remove(tmp.c_str());
      fail(kIo, "io", "cannot write " + a.out + ": " + ec.message());
    }
  }
  if (!g.quiet) {
    std::ostream& s = to_stdout ? std::cerr : std::cout;
    if (g.structured()) {
      Json lengths = Json::object();
      for (auto [len, n] : sum.per_length) lengths[std::to_string(len)] = n;
      s << Json{{"schema", "crasp-forge/dataset"},
                {"version", 1},
                {"task", corpus::task_name(cfg.task)},
                {"format", corpus::format_name(cfg.format)},
                {"count", sum.count},
                {"seed", sum.seed},
                {"sha256", sum.sha256},
                {"per_length", lengths}}
               .dump()
        << "\n";
    } else {
      s << "wrote " << sum.count << " records, seed " << sum.seed << ", sha256 " << sum.sha256 << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-RASP programs, chain-of-thought generation, Turing machine compilation and task corpora"};
  app.name("crasp_forge");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed (falls back to CRASP_FORGE_SEED, then 0)");
  app.add_option("--budget", g.budget, "token budget for generate (default 10000)");
  app.add_flag("--quiet", g.quiet, "suppress summaries");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"text", "structured"}));

  ProgramArgs pa;
  auto* parse = app.add_subcommand("parse", "parse a program and print its canonical form");
  parse->add_option("--program", pa.program, "program file")->required();
  auto* eval = app.add_subcommand("eval", "evaluate every definition of a program on a token sequence");
  eval->add_option("--program", pa.program, "program file")->required();
  eval->add_option("--input", pa.input, "whitespace-separated tokens")->required();
  auto* gen = app.add_subcommand("generate", "run a CoT program (or a compiled machine) on a prompt");
  gen->add_option("--program", pa.program, "CoT program file");
  gen->add_option("--machine", pa.machine, "machine file; compiled before generation");
  gen->add_option("--input", pa.input, "prompt tokens, or the machine input word")->required();
  gen->add_option("--offset", pa.offset, "first signpost index for --machine")->check(CLI::PositiveNumber);

  MachineArgs ma;
  auto* comp = app.add_subcommand("compile-tm", "compile a machine to a CoT program");
  comp->add_option("--machine", ma.machine, "machine file")->required();
  comp->add_option("--out", ma.out, "output file (default stdout)");
  comp->add_flag("--swap-left-right", ma.swap_left_right, "mutation: exchange L and R gating");
  auto* sim = app.add_subcommand("simulate-tm", "run a machine directly");
  sim->add_option("--machine", ma.machine, "machine file")->required();
  sim->add_option("--input", ma.input, "input word")->required();
  sim->add_option("--max-steps", ma.max_steps, "step cap");
  sim->add_flag("--log", ma.log, "print the step log");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "compare the compiled CoT against the simulator");
  ver->add_option("--machine", va.machine, "machine file")->required();
  ver->add_option("--input", va.inputs, "input word (repeatable)");
  ver->add_option("--inputs-file", va.inputs_file, "file with one input word per line");
  ver->add_option("--exhaustive-len", va.exhaustive_len, "all inputs up to this length");
  ver->add_option("--random", va.random, "number of random inputs (uses --seed)");
  ver->add_option("--max-len", va.max_len, "maximum length of random inputs");
  ver->add_option("--budget-factor", va.budget_factor, "budget = factor * tapes * (N + |w| + 1)");
  ver->add_option("--max-steps", va.max_steps, "simulator step cap");
  ver->add_option("--jobs", va.jobs, "worker threads")->check(CLI::PositiveNumber);
  ver->add_option("--offset", va.offset, "first signpost index")->check(CLI::PositiveNumber);
  ver->add_option("--out", va.out, "report file (default stdout)");
  ver->add_flag("--swap-left-right", va.swap_left_right, "mutation: exchange L and R gating");

  DatasetArgs da;
  auto* ds = app.add_subcommand("dataset", "generate a task corpus");
  ds->add_option("--task", da.task, "parity, boolean, s5, binary")->required();
  ds->add_option("--format", da.format, "naive, value-change, signpost, signpost-tape, signpost-value-change")
      ->required();
  ds->add_option("--min-len", da.min_len, "minimum instance length");
  ds->add_option("--max-len", da.max_len, "maximum instance length");
  ds->add_option("--max-test-len", da.max_test_len, "longest test length; bounds the offsets");
  ds->add_option("--count", da.count, "number of records");
  ds->add_option("--repetitive-ratio", da.repetitive_ratio, "share of repetitive permutation instances");
  ds->add_option("--repeat-prob", da.repeat_prob, "repeat probability inside repetitive instances");
  ds->add_option("--split", da.split, "train or test");
  ds->add_flag("--plain", da.plain, "emit 'PROMPT ### trace TRACE' lines");
  ds->add_flag("--no-offsets", da.no_offsets, "fix o_p and o_c at 0");
  ds->add_option("--jobs", da.jobs, "worker threads")->check(CLI::PositiveNumber);
  ds->add_option("--out", da.out, "output file (default stdout)");

  // dataset has its own --format; the report format goes before the subcommand name there.

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[usage]: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*parse) return cmd_parse(g, pa);
    if (*eval) return cmd_eval(g, pa);
    if (*gen) return cmd_generate(g, pa);
    if (*comp) return cmd_compile(g, ma);
    if (*sim) return cmd_simulate(g, ma);
    if (*ver) return cmd_verify(g, va);
    if (*ds) return cmd_dataset(g, da);
  } catch (const Failure& f) {
    std::cerr << "error[" << f.kind << "]: " << f.message << "\n";
    return f.code;
  } catch (const GenerationError& e) {
    std::cerr << "error[generation]: " << e.what() << "\n";
    return kGeneration;
  } catch (const Error& e) {
    std::cerr << "error[parse]: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}

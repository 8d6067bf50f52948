#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ittmbb/composer.h"
#include "ittmbb/format.h"
#include "ittmbb/search.h"
#include "json.hpp"

using namespace ittmbb;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kUndetermined = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Either --machine <file> or --code <compact encoding>.
struct MachineSource {
  std::string file, code;

  void Add(CLI::App* cmd) {
    cmd->add_option("--machine", file, "machine document");
    cmd->add_option("--code", code, "compact machine encoding");
  }

  MachineDocument Load(bool ittm_code) const {
    if (file.empty() == code.empty()) throw InputError("give exactly one of --machine and --code");
    if (!file.empty()) {
      try {
        return ParseMachine(ReadFile(file));
      } catch (const ParseError& e) {
        throw InputError(file + ":" + e.what());
      }
    }
    if (ittm_code) return ITTMDocument{ITTMachine::Decode(code), LimitRule::kLimsup};
    return ClassicalMachine::Decode(code);
  }

  ClassicalMachine Classical() const {
    auto doc = Load(false);
    if (auto* m = std::get_if<ClassicalMachine>(&doc)) return *m;
    throw InputError("expected a classical machine");
  }

  ITTMDocument ITTM() const {
    auto doc = Load(true);
    if (auto* m = std::get_if<ITTMDocument>(&doc)) return *m;
    throw InputError("expected an ITTM");
  }
};

struct BudgetFlags {
  uint64_t max_block_steps = 10000;
  uint64_t max_limits = 8;
  std::string detection = "drift";
  std::string rule;

  void Add(CLI::App* cmd, uint64_t block_default, uint64_t limits_default) {
    max_block_steps = block_default;
    max_limits = limits_default;
    cmd->add_option("--max-block-steps", max_block_steps, "successor steps per omega-block")->capture_default_str();
    cmd->add_option("--max-limits", max_limits, "largest limit multiple of omega")->capture_default_str();
    cmd->add_option("--detection", detection, "cycle or drift")
        ->check(CLI::IsMember({"cycle", "drift"}))
        ->capture_default_str();
    cmd->add_option("--rule", rule, "limsup or liminf (default: the document's rule)")
        ->check(CLI::IsMember({"limsup", "liminf"}));
  }

  ExecBudget Budget() const {
    ExecBudget b{max_block_steps, max_limits, detection == "cycle" ? Detection::kCycleOnly : Detection::kCycleAndDrift};
    b.Validate();
    return b;
  }

  LimitRule Rule(LimitRule fallback) const { return rule.empty() ? fallback : ParseRule(rule); }
};

struct Common {
  std::string ledger;
  int workers = 1;

  void Add(CLI::App* cmd) {
    cmd->add_option("--ledger", ledger, "JSONL results ledger");
    cmd->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  }
};

std::string Symbol(const std::string& quantity) {
  if (quantity == "sigma") return "Σ";
  if (quantity == "stime") return "S";
  return "Σ∞";
}

void PrintReport(const SearchReport& r) {
  std::cout << Symbol(r.quantity) << "(" << r.n << ")" << (r.status == SearchReport::Status::kExact ? "=" : ">=")
            << r.value << " " << StatusName(r.status) << "\n";
  std::cout << "champion " << (r.champion.empty() ? "-" : r.champion) << "\n";
  std::cout << r.Summary() << "\n";
}

void PrintSnapshot(const Snapshot& s) {
  std::cout << "input " << s.input.ToString() << "\n";
  std::cout << "output " << s.output.ToString() << "\n";
  std::cout << "scratch " << s.scratch.ToString() << "\n";
}

int Verify(const std::string& certificate, const std::string& ledger) {
  if (certificate.empty() == ledger.empty()) throw InputError("give exactly one of --certificate and --ledger");
  std::vector<std::string> texts;
  if (!certificate.empty()) {
    std::string text = certificate;
    if (text.find('{') == std::string::npos) text = ReadFile(certificate);
    texts.push_back(text);
  } else {
    std::istringstream in(ReadFile(ledger));
    for (std::string line; std::getline(in, line);) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      if (j.contains("certificate") && j.at("certificate").is_object()) texts.push_back(j.at("certificate").dump());
      for (const char* key : {"sigma", "stime"}) {
        if (j.contains(key) && j.at(key).is_object()) texts.push_back(j.at(key).at("certificate").dump());
      }
    }
  }
  uint64_t bad = 0;
  for (const auto& text : texts) {
    Certificate c;
    try {
      c = Certificate::FromJson(text);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    const bool ok = VerifyCertificate(c);
    if (!ok) ++bad;
    std::cout << (ok ? "verified " : "REJECTED ") << c.machine << " " << c.stage.ToString() << " score=" << c.score
              << "\n";
  }
  std::cout << texts.size() - bad << "/" << texts.size() << " certificates verified\n";
  return bad == 0 ? kOk : kUndetermined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical and infinite-time Turing machine workbench"};
  app.require_subcommand(1);

  // sim
  auto* sim = app.add_subcommand("sim", "run a classical machine from the blank tape");
  MachineSource sim_src;
  sim_src.Add(sim);
  uint64_t sim_budget = 1000000;
  sim->add_option("--budget", sim_budget, "step budget")->capture_default_str();
  Common sim_common;
  sim_common.Add(sim);

  // itsim
  auto* itsim = app.add_subcommand("itsim", "run an ITTM through transfinite stages");
  MachineSource it_src;
  it_src.Add(itsim);
  BudgetFlags it_budget;
  it_budget.Add(itsim, 10000, 8);
  std::string it_input;
  itsim->add_option("--input", it_input, "input tape, e.g. 111 or 1(10)");
  bool it_trace = false;
  itsim->add_flag("--trace", it_trace, "print trace events as JSON lines");
  Common it_common;
  it_common.Add(itsim);

  // sigma / stime
  auto add_search = [&](const std::string& name, const std::string& help, ClassicalSearchOptions& o,
                        std::string& convention, Common& common) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--n", o.n, "number of states")->required();
    cmd->add_option("--budget", o.step_budget, "step budget per machine")->capture_default_str();
    cmd->add_option("--max-n", o.max_n, "largest n accepted")->capture_default_str();
    cmd->add_option("--split-depth", o.split_depth, "tree depth of work units")->capture_default_str();
    if (name == "sigma") {
      cmd->add_option("--convention", convention, "rado or clean")
          ->check(CLI::IsMember({"rado", "clean"}))
          ->capture_default_str();
    }
    common.Add(cmd);
    return cmd;
  };
  ClassicalSearchOptions sigma_opts, stime_opts;
  std::string sigma_conv = "rado", stime_conv = "rado";
  Common sigma_common, stime_common;
  auto* sigma = add_search("sigma", "busy beaver score by exhaustive search", sigma_opts, sigma_conv, sigma_common);
  auto* stime = add_search("stime", "busy beaver step count by exhaustive search", stime_opts, stime_conv, stime_common);

  // sigma-inf-lb
  auto* inf = app.add_subcommand("sigma-inf-lb", "certified lower bound on the infinite-time busy beaver");
  SigmaInfOptions inf_opts;
  inf->add_option("--n", inf_opts.n, "number of ordinary states")->required();
  inf->add_option("--max-n", inf_opts.max_n, "largest n accepted")->capture_default_str();
  inf->add_option("--split-depth", inf_opts.split_depth, "tree depth of work units")->capture_default_str();
  BudgetFlags inf_budget;
  inf_budget.Add(inf, inf_opts.budget.max_block_steps, inf_opts.budget.max_limit_stages);
  Common inf_common;
  inf_common.Add(inf);

  // compose
  auto* compose = app.add_subcommand("compose", "build the composed machine for a one-tape m and x");
  MachineSource comp_src;
  comp_src.Add(compose);
  uint64_t comp_x = 0;
  compose->add_option("--x", comp_x, "number of ones to write")->required();
  std::string comp_out;
  compose->add_option("--out", comp_out, "write the machine document here instead of stdout");
  Common comp_common;
  comp_common.Add(compose);

  // fstar
  auto* fstar = app.add_subcommand("fstar", "the unary partial function of an ITTM at n");
  MachineSource fs_src;
  fs_src.Add(fstar);
  uint64_t fs_n = 0;
  fstar->add_option("--n", fs_n, "argument")->required();
  BudgetFlags fs_budget;
  fs_budget.Add(fstar, 10000, 8);
  Common fs_common;
  fs_common.Add(fstar);

  // verify
  auto* verify = app.add_subcommand("verify", "re-simulate certificates");
  std::string cert;
  verify->add_option("--certificate", cert, "certificate JSON, or a file holding one");
  Common verify_common;
  verify_common.Add(verify);

  // encode / decode
  auto* encode = app.add_subcommand("encode", "unary tape of a natural number");
  uint64_t enc_n = 0;
  encode->add_option("n", enc_n, "number")->required();
  Common enc_common;
  enc_common.Add(encode);
  auto* decode = app.add_subcommand("decode", "natural number of a unary tape");
  std::string dec_tape;
  decode->add_option("tape", dec_tape, "tape, e.g. 110 or 11(0)")->required();
  Common dec_common;
  dec_common.Add(decode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*sim) {
      const auto m = sim_src.Classical();
      if (sim_budget < 1) throw InputError("budget must be positive");
      const auto run = RunClassical(m, sim_budget);
      if (!run.halted()) {
        std::cout << "Undetermined after " << run.last.steps << " steps\n";
        return kUndetermined;
      }
      const auto clean = CleanScore(run.last.tape);
      std::cout << "Halted at " << OrdinalStage{0, run.last.steps}.ToString() << "\n";
      std::cout << "steps " << run.last.steps << "\n";
      std::cout << "ones " << ScoreRado(run.last.tape) << "\n";
      std::cout << "clean " << (clean ? std::to_string(*clean) : "-") << "\n";
      return kOk;
    }
    if (*itsim) {
      const auto doc = it_src.ITTM();
      const auto rule = it_budget.Rule(doc.rule);
      const EPTape input = it_input.empty() ? EPTape() : EPTape::Parse(it_input);
      TraceOptions trace{[](const TraceEvent& e) { std::cout << e.ToJsonLine() << "\n"; }, false};
      const auto out = RunTransfinite(doc.machine, input, it_budget.Budget(), rule, it_trace ? &trace : nullptr);
      std::cout << out.Describe() << "\n";
      if (const auto* h = std::get_if<Halted>(&out.result)) {
        PrintSnapshot(h->final);
        const auto v = DecodeUnary(h->final.output);
        std::cout << "value " << (v ? std::to_string(*v) : "undefined") << "\n";
        return kOk;
      }
      if (const auto* c = std::get_if<NonHaltingCertified>(&out.result)) {
        std::cout << "witnesses " << c->first.ToString() << " " << c->second.ToString() << "\n";
        return kOk;
      }
      return kUndetermined;
    }
    if (*sigma || *stime) {
      auto o = *sigma ? sigma_opts : stime_opts;
      const auto& common = *sigma ? sigma_common : stime_common;
      o.convention = ParseConvention(*sigma ? sigma_conv : stime_conv);
      o.workers = common.workers;
      o.ledger_path = common.ledger;
      const auto r = SearchClassical(o);
      const auto& report = *sigma ? r.sigma : r.stime;
      PrintReport(report);
      if (!report.champion.empty()) {
        const auto c = ClassicalCertificate(ClassicalMachine::Decode(report.champion),
                                            *sigma ? o.convention : Convention::kRado, o.step_budget);
        std::cout << "certificate " << c.ToJson() << "\n";
      }
      return kOk;
    }
    if (*inf) {
      auto o = inf_opts;
      o.budget = inf_budget.Budget();
      o.rule = inf_budget.Rule(LimitRule::kLimsup);
      o.workers = inf_common.workers;
      o.ledger_path = inf_common.ledger;
      const auto r = SigmaInfLowerBound(o);
      PrintReport(r.report);
      std::cout << "values=" << r.values << " undefined=" << r.undefined << " certified=" << r.certified << "\n";
      for (const auto& c : r.certificates) {
        if (c.machine == r.best.champion) std::cout << "certificate " << c.ToJson() << "\n";
      }
      return kOk;
    }
    if (*compose) {
      const auto doc = comp_src.ITTM();
      const auto t = ComposeTheorem1(OneTapeITTM(doc.machine, TapeId::kInput), comp_x);
      std::ostringstream text;
      text << "# x=" << t.x << " C=" << t.c << " h(C)=" << t.h << " s(x)=" << t.s << "\n";
      text << Serialize(t.machine, doc.rule);
      if (comp_out.empty()) {
        std::cout << text.str();
      } else {
        std::ofstream(comp_out) << text.str();
        std::cout << "x=" << t.x << " C=" << t.c << " h(C)=" << t.h << " s(x)=" << t.s << "\n";
      }
      return kOk;
    }
    if (*fstar) {
      const auto doc = fs_src.ITTM();
      const auto v = FStar(doc.machine, fs_n, fs_budget.Budget(), fs_budget.Rule(doc.rule));
      std::cout << v.outcome.Describe() << "\n";
      if (OneTapeITTM::IsOneTape(doc.machine, TapeId::kInput)) {
        // Input-tape machines keep their answer on the input tape.
        if (const auto* h = std::get_if<Halted>(&v.outcome.result)) {
          const auto in = DecodeUnary(h->final.input);
          std::cout << "input tape value " << (in ? std::to_string(*in) : "undefined") << "\n";
        }
      }
      switch (v.kind) {
        case FStarValue::Kind::kValue:
          std::cout << "f*(" << fs_n << ")=" << v.value << "\n";
          return kOk;
        case FStarValue::Kind::kUndefined:
          std::cout << "f*(" << fs_n << ") undefined\n";
          return kOk;
        case FStarValue::Kind::kUndetermined:
          std::cout << "f*(" << fs_n << ") undetermined\n";
          return kUndetermined;
      }
    }
    if (*verify) return Verify(cert, verify_common.ledger);
    if (*encode) {
      std::cout << EncodeUnary(enc_n).ToString() << "\n";
      return kOk;
    }
    if (*decode) {
      const auto v = DecodeUnary(EPTape::Parse(dec_tape));
      if (!v) throw InputError("not a unary tape: " + dec_tape);
      std::cout << *v << "\n";
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}

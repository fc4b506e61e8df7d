#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dpia/eval_fn.hpp"
#include "dpia/harness.hpp"
#include "dpia/pipeline.hpp"
#include "dpia/pretty.hpp"

namespace fs = std::filesystem;
using namespace dpia;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitType = 3;
constexpr int kExitIO = 66;
constexpr int kExitInternal = 70;

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::Parse:
      return kExitParse;
    case ErrorClass::Type:
      return kExitType;
    case ErrorClass::Internal:
      return kExitInternal;
  }
  return kExitInternal;
}

struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write " + path.string());
  out << text;
}

// "dir/dot.dpia" -> "dir/dot"
fs::path stem_path(const std::string& file) {
  fs::path p(file);
  return p.parent_path() / p.stem();
}

Target parse_target(const std::string& s) {
  if (s == "pseudo-c") return Target::PseudoC;
  if (s == "c-openmp") return Target::COpenMP;
  return Target::OpenCL;
}

Launch parse_launch(const std::string& s) {
  Launch l;
  auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--launch", "expected G,L");
  l.groups = std::stoi(s.substr(0, comma));
  l.local = std::stoi(s.substr(comma + 1));
  if (l.groups < 1 || l.local < 1) throw CLI::ValidationError("--launch", "G and L must be >= 1");
  return l;
}

struct Common {
  std::string target = "pseudo-c";
  bool dump_stages = false;
  bool init_new = false;
  bool use_float = false;
  bool use_int = false;
  bool check_only = false;
  bool heap = false;
  std::string simplify = "on";
  std::string launch = "2,4";
  std::string output;
  bool cl_check = false;
};

PipelineOptions pipeline_options(const Common& c) {
  PipelineOptions o;
  o.codegen.target = parse_target(c.target);
  o.codegen.mode = c.use_int ? NumMode::Int : NumMode::Float;
  o.codegen.init_new = c.init_new;
  o.codegen.heap = c.heap;
  o.codegen.simplify = c.simplify == "on";
  o.check_only = c.check_only;
  if (o.codegen.target == Target::OpenCL) o.function_name = "KERNEL";
  return o;
}

void dump_stages(const Compilation& comp, const fs::path& stem) {
  if (comp.stage1) write_file(stem.string() + ".stage1.dpia", pretty_print(comp.stage1) + "\n");
  if (comp.stage2) write_file(stem.string() + ".stage2.dpia", pretty_print(comp.stage2) + "\n");
}

// Runs an external OpenCL front-end on the kernel when one is installed.
void cl_syntax_check(const fs::path& cl_file) {
  if (std::system("command -v clang >/dev/null 2>&1") != 0) {
    std::cerr << "note: clang not found, OpenCL syntax check skipped\n";
    return;
  }
  std::string cmd = "clang -x cl -cl-std=CL1.2 -Xclang -finclude-default-header -fsyntax-only '" +
                    cl_file.string() + "'";
  if (std::system(cmd.c_str()) != 0) internal_error("OpenCL front-end rejected " + cl_file.string());
}

int do_compile(const std::string& file, const Common& c) {
  PipelineOptions o = pipeline_options(c);
  Compilation comp = compile_source(read_file(file), o);
  fs::path stem = stem_path(file);
  if (c.dump_stages) dump_stages(comp, stem);
  if (c.check_only) {
    std::cout << file << ": ok\n";
    return 0;
  }
  if (comp.kernel) {
    for (auto& w : comp.kernel->warnings) std::cerr << "warning: " << w << "\n";
  }
  if (c.output == "-") {
    std::cout << comp.code;
    return 0;
  }
  fs::path out = c.output.empty() ? fs::path(stem.string() + target_extension(o.codegen.target))
                                  : fs::path(c.output);
  write_file(out, comp.code);
  if (c.cl_check && o.codegen.target == Target::OpenCL) cl_syntax_check(out);
  std::cout << out.string() << "\n";
  return 0;
}

// key=value lines; '#' starts a comment. Values are bracketed literals.
std::map<std::string, std::string> read_bindings(const std::string& path) {
  std::map<std::string, std::string> r;
  std::istringstream in(read_file(path));
  std::string line;
  std::string pending_key, pending_val;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!pending_key.empty()) r[pending_key] += " " + line;
      continue;
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    pending_key = trim(line.substr(0, eq));
    r[pending_key] = trim(line.substr(eq + 1));
  }
  return r;
}

int do_run(const std::string& file, const std::string& inputs, const std::string& engine,
           Common c) {
  if (engine == "kernel") c.target = "opencl";
  PipelineOptions o = pipeline_options(c);
  // The interpreters run the default integer domain unless --float is given.
  NumMode mode = c.use_float ? NumMode::Float : NumMode::Int;
  o.codegen.mode = mode;
  Compilation comp = compile_source(read_file(file), o);
  const Program& prog = comp.prog;
  auto bind = inputs.empty() ? std::map<std::string, std::string>{} : read_bindings(inputs);

  NatEnv sigma;
  for (auto& n : prog.nats) {
    auto it = bind.find(n);
    if (it == bind.end()) type_error("no value for size parameter " + n);
    sigma[n] = std::stoull(it->second);
  }
  Store store;
  for (auto& p : prog.params) {
    Data d = p.type->k == PhraseTypeNode::K::Exp || p.type->k == PhraseTypeNode::K::Acc
                 ? p.type->data
                 : as_var_type(p.type);
    auto it = bind.find(p.name);
    if (it != bind.end()) {
      store[p.name] = parse_value(it->second, d, sigma, mode);
    } else if (p.type->k == PhraseTypeNode::K::Exp) {
      type_error("no value for input " + p.name);
    } else {
      store[p.name] = zero_value(d, sigma, mode);
    }
  }

  Store result;
  if (engine == "fn") {
    ValueEnv env(store.begin(), store.end());
    result[prog.output] = eval_fn(prog.body, env, sigma, mode);
  } else {
    ImpOptions io;
    io.mode = mode;
    ExecResult r;
    if (engine == "imp") {
      r = exec(comp.stage2, store, sigma, io);
    } else if (engine == "c") {
      r = exec_c(*comp.unit, store, sigma, io);
    } else {
      r = simulate_kernel(*comp.kernel, store, sigma, parse_launch(c.launch), io);
    }
    for (auto& v : r.races) std::cerr << "race: " << v.describe() << "\n";
    if (!r.races.empty()) return 1;
    for (auto& p : prog.params) {
      if (p.type->k != PhraseTypeNode::K::Exp) result[p.name] = r.store.at(p.name);
    }
  }
  for (auto& [name, v] : result) std::cout << name << " = " << value_to_string(v) << "\n";
  return 0;
}

int do_fuzz(size_t seeds, int depth, int max_size, uint64_t first, const std::string& junit,
            bool fault, unsigned threads) {
  FuzzOptions o;
  o.seeds = seeds;
  o.depth = depth;
  o.max_size = max_size;
  o.first_seed = first;
  o.check.fault_flip_split = fault;
  o.threads = threads;
  auto cases = fuzz(o);
  size_t failed = 0;
  for (auto& fc : cases) {
    if (fc.report.pass) continue;
    ++failed;
    std::cout << "FAIL seed " << fc.seed << " [" << fc.report.stage << "] " << fc.report.message
              << "\n"
              << (fc.shrunk.empty() ? fc.program : fc.shrunk);
  }
  std::cout << (cases.size() - failed) << "/" << cases.size() << " passed\n";
  if (!junit.empty()) {
    std::ofstream out(junit);
    if (!out) throw IOError("cannot write " + junit);
    write_junit(out, cases);
  }
  return failed == 0 ? 0 : 1;
}

void add_codegen_flags(CLI::App* sub, Common& c) {
  sub->add_option("--target", c.target, "pseudo-c, c-openmp or opencl")
      ->check(CLI::IsMember({"pseudo-c", "c-openmp", "opencl"}));
  auto* f = sub->add_flag("--float", c.use_float, "float scalars (default for compile)");
  auto* i = sub->add_flag("--int", c.use_int, "64-bit integer scalars");
  f->excludes(i);
  sub->add_flag("--init-new", c.init_new, "emit zero-initialization of temporaries");
  sub->add_flag("--heap", c.heap, "allocate C temporaries with malloc");
  sub->add_option("--simplify-indices", c.simplify, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--launch", c.launch, "work-groups and work-items per group, G,L");
  sub->add_flag("--dump-stages", c.dump_stages, "write .stage1.dpia and .stage2.dpia");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpiac: compiler and workbench for DPIA programs"};
  app.require_subcommand(1);
  Common c;
  std::string file, inputs, engine = "imp", junit;
  size_t seeds = 100;
  int depth = 3, max_size = 8;
  uint64_t first_seed = 1;
  bool fault = false;
  unsigned threads = 0;

  auto* compile = app.add_subcommand("compile", "compile a .dpia file");
  compile->add_option("file", file, "input program")->required();
  compile->add_option("-o,--output", c.output, "output path, - for stdout");
  compile->add_flag("--check-only", c.check_only, "stop after type checking");
  compile->add_flag("--cl-check", c.cl_check, "syntax-check the kernel with clang if present");
  add_codegen_flags(compile, c);

  auto* check = app.add_subcommand("check", "parse and type check a .dpia file");
  check->add_option("file", file, "input program")->required();

  auto* run = app.add_subcommand("run", "evaluate a program on key=value inputs");
  run->add_option("file", file, "input program")->required();
  run->add_option("inputs", inputs, "input bindings file");
  run->add_option("--engine", engine, "fn, imp, c or kernel")
      ->check(CLI::IsMember({"fn", "imp", "c", "kernel"}));
  add_codegen_flags(run, c);

  auto* fz = app.add_subcommand("fuzz", "differential testing on generated programs");
  fz->add_option("--seeds", seeds, "number of programs");
  fz->add_option("--depth", depth, "generator depth")->check(CLI::Range(1, 4));
  fz->add_option("--max-size", max_size, "largest array dimension")->check(CLI::Range(1, 64));
  fz->add_option("--first-seed", first_seed, "seed of the first program");
  fz->add_option("--junit", junit, "write a JUnit XML report");
  fz->add_option("--threads", threads, "worker threads, 0 for all cores");
  fz->add_flag("--fault-flip-split", fault, "inject the split index fault");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) return do_compile(file, c);
    if (*check) {
      c.check_only = true;
      return do_compile(file, c);
    }
    if (*run) return do_run(file, inputs, engine, c);
    if (*fz) return do_fuzz(seeds, depth, max_size, first_seed, junit, fault, threads);
  } catch (const DpiaError& e) {
    std::cerr << file << ":" << e.describe() << "\n";
    return exit_code(e.cls());
  } catch (const IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIO;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "../common/c_normalize.hpp"
#include "dpia/checker.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/harness.hpp"
#include "dpia/lower.hpp"
#include "dpia/opencl.hpp"
#include "dpia/parser.hpp"
#include "dpia/pipeline.hpp"
#include "dpia/prims.hpp"
#include "dpia/simplify.hpp"
#include "dpia/translate.hpp"

using namespace dpia;

namespace {

// Pinned limits.
constexpr double kGoldenSeconds = 1.0;
constexpr double kTypePreservationSeconds = 60.0;
constexpr double kCoincidenceSeconds = 120.0;
constexpr double kFloatRelTol = 1e-5;
constexpr size_t kFuzzPrograms = 1000;
constexpr int kFuzzDepth = 3;
constexpr int kFuzzMaxSize = 8;
constexpr size_t kPropertyInstances = 100;
constexpr int kPropertyMaxSize = 16;
constexpr int64_t kSimplifyMaxRange = 64;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string read_program(const std::string& name) {
  std::ifstream in(std::string(DPIA_EXAMPLES_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing test program " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome fail(std::string why) { return Outcome{false, std::move(why)}; }

std::string diff_lines(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  std::string s = "got:\n" + cnorm::join_lines(got) + "want:\n" + cnorm::join_lines(want);
  return s;
}

Compilation compile(const std::string& text, Target t, NumMode mode = NumMode::Float,
                    bool simplify = true) {
  PipelineOptions o;
  o.codegen.target = t;
  o.codegen.mode = mode;
  o.codegen.simplify = simplify;
  if (t == Target::OpenCL) o.function_name = "KERNEL";
  return compile_source(text, o);
}

Store int_inputs(const Program& p, const NatEnv& sigma, uint64_t seed) {
  return random_inputs(p, sigma, seed, NumMode::Int);
}

Store with_outputs(const Program& p, Store s, const NatEnv& sigma, NumMode mode) {
  for (auto& prm : p.params) {
    if (prm.type->k == PhraseTypeNode::K::Exp) continue;
    Data d = prm.type->k == PhraseTypeNode::K::Acc ? prm.type->data : as_var_type(prm.type);
    s[prm.name] = zero_value(d, sigma, mode);
  }
  return s;
}

Value reference(const Program& p, const Store& in, const NatEnv& sigma, NumMode mode) {
  ValueEnv env(in.begin(), in.end());
  return eval_fn(p.body, env, sigma, mode);
}

// 1. Simple dot product against the pseudo-C listing.
Outcome golden_dot() {
  const char* program =
      "(param xs (exp (arr 8 num))) (param ys (exp (arr 8 num)))"
      "(reduce (+) 0 (map (lam x (* (fst x) (snd x))) (zip xs ys)))";
  const char* listing = R"(
float tmp[N];
parfor (int i = 0; i < N; i += 1)
  tmp[i] = xs[i] * ys[i];
float accum = 0.0;
for (int i = 0; i < N; i += 1)
  accum = accum + tmp[i];
output = accum;
)";
  Compilation c = compile(program, Target::PseudoC);
  cnorm::Options o;
  o.externals = {"xs", "ys", "out"};
  o.substitute = {{"N", "8"}, {"output", "out"}};
  auto got = cnorm::normalize(c.code, o), want = cnorm::normalize(listing, o);
  if (got != want) return fail(diff_lines(got, want));

  Store in = int_inputs(c.prog, {}, 11);
  CodegenOptions io = c.unit->opts;
  io.mode = NumMode::Int;
  CUnit u = codegen_program(c.prog, c.stage2, io);
  ExecResult r = exec_c(u, with_outputs(c.prog, in, {}, NumMode::Int), {});
  if (!value_equal(r.store.at("out"), reference(c.prog, in, {}, NumMode::Int))) {
    return fail("emitted code computes a different dot product");
  }
  return Outcome{true, std::to_string(got.size()) + " statements match"};
}

// 2. Tiled dot product: loop nest shape plus differential execution.
Outcome golden_tiled() {
  const char* listing = R"(
float tmp[N/2048];
parfor (int i = 0; i < N/(2048*128); i += 1) {
  parfor (int j = 0; j < 128; j += 1) {
    float accum = 0.0;
    for (int k = 0; k < 2048; k += 1) {
      accum = (xs[(2048*128 * i) + (128 * j) + k]
             * ys[(2048*128 * i) + (128 * j) + k]) + accum; }
    tmp[((128 * i) + j)] = accum;
  }
}
float accum = 0.0;
for (int i = 0; i < N/2048; i += 1) {
  accum = accum + tmp[i];
}
output = accum;
)";
  std::string tiled = read_program("tiled.dpia");
  Compilation c = compile(tiled, Target::PseudoC, NumMode::Int);
  std::string got = cnorm::loop_shape(c.code), want = cnorm::loop_shape(listing);
  if (got != want) return fail("loop shape " + got + ", expected " + want);

  NatEnv sigma{{"n", 2}};
  Store in = int_inputs(c.prog, sigma, 22);
  Value ref = reference(c.prog, in, sigma, NumMode::Int);
  ExecResult r = exec_c(*c.unit, with_outputs(c.prog, in, sigma, NumMode::Int), sigma);
  if (!value_equal(r.store.at("out"), ref)) return fail("tiled code disagrees with eval-fn");
  Program dot = parse_program(read_program("dot.dpia"));
  Value simple = reference(dot, in, {{"n", 64}}, NumMode::Int);
  if (!value_equal(simple, ref)) return fail("tiled and simple dot products differ");
  return Outcome{true, "shape " + got + ", out = " + value_to_string(ref)};
}

// 3. Vectorised OpenCL kernel.
Outcome golden_kernel() {
  const char* listing = R"(
kernel void KERNEL(global float *out, const global float *restrict xs,
                   const global float *restrict ys, int N) {
 for (int g_id = get_group_id(0); g_id < N; g_id += get_num_groups(0)){
  for (int l_id = get_local_id(0); l_id < 4; l_id += get_local_size(0)){
    float4 accum;
    accum = (float4)(0.0, 0.0, 0.0, 0.0);
    for (int i = 0; i < 8; i += 1) {
      accum = (accum +
               (vload4(((8 * l_id) + (32 * g_id) + i), xs) *
                vload4(((8 * l_id) + (32 * g_id) + i), ys))); }
    vstore4(accum, ((4 * g_id) + l_id), out); } } }
)";
  std::string src = read_program("dotvec.dpia");
  Compilation c = compile(src, Target::OpenCL);
  for (const char* needle : {"get_group_id", "get_local_id", "vload4", "vstore4", "float4"}) {
    if (c.code.find(needle) == std::string::npos) return fail(std::string("kernel lacks ") + needle);
  }
  cnorm::Options o;
  o.externals = {"xs", "ys", "out", "n"};
  o.substitute = {{"N", "n"}};
  auto got = cnorm::normalize(c.code, o), want = cnorm::normalize(listing, o);
  if (got != want) return fail(diff_lines(got, want));

  NatEnv sigma{{"n", 2}};
  Launch launch{2, 4};
  Store in = int_inputs(c.prog, sigma, 33);
  Compilation ci = compile(src, Target::OpenCL, NumMode::Int);
  ExecResult ri = simulate_kernel(*ci.kernel, with_outputs(c.prog, in, sigma, NumMode::Int), sigma,
                                  launch, ImpOptions{NumMode::Int, false});
  if (!ri.races.empty()) return fail(ri.races.front().describe());
  if (!value_equal(ri.store.at("out"), reference(c.prog, in, sigma, NumMode::Int))) {
    return fail("integer simulation differs from eval-fn");
  }

  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Store fin;
  for (auto& p : c.prog.params) {
    if (p.type->k != PhraseTypeNode::K::Exp) continue;
    std::vector<Value> xs;
    for (uint64_t k = 0; k < nat_eval(p.type->data->size, sigma); ++k) xs.push_back(value_numf(u(rng)));
    fin[p.name] = value_array(std::move(xs));
  }
  ExecResult rf = simulate_kernel(*c.kernel, with_outputs(c.prog, fin, sigma, NumMode::Float),
                                  sigma, launch, ImpOptions{NumMode::Float, false});
  if (!value_close(rf.store.at("out"), reference(c.prog, fin, sigma, NumMode::Float), kFloatRelTol)) {
    return fail("float simulation outside relative tolerance");
  }
  return Outcome{true, std::to_string(got.size()) + " statements match, int exact, float within 1e-5"};
}

std::vector<std::string> fuzz_corpus() {
  std::vector<std::string> v;
  for (uint64_t s = 1; s <= kFuzzPrograms; ++s) v.push_back(generate_program(s, kFuzzDepth, kFuzzMaxSize));
  return v;
}

// 4. Stage I output re-checks at comm.
Outcome type_preservation(const std::vector<std::string>& corpus) {
  size_t failures = 0;
  std::string first;
  for (size_t i = 0; i < corpus.size(); ++i) {
    try {
      Program p = parse_program(corpus[i]);
      recheck_comm(p, translate_program(p).comm);
    } catch (const std::exception& e) {
      if (failures++ == 0) first = "seed " + std::to_string(i + 1) + ": " + e.what();
    }
  }
  if (failures) return fail(std::to_string(failures) + " failures; " + first);
  return Outcome{true, std::to_string(corpus.size()) + " programs, 0 failures"};
}

// 5. exec of Stage II writes eval(E) to the output and nothing else.
Outcome coincidence(const std::vector<std::string>& corpus) {
  size_t failures = 0;
  std::string first;
  for (size_t i = 0; i < corpus.size(); ++i) {
    try {
      Program p = parse_program(corpus[i]);
      Phrase s2 = lower(translate_program(p).comm);
      Store in = int_inputs(p, {}, 1000 + i);
      Store init = with_outputs(p, in, {}, NumMode::Int);
      ExecResult r = exec(s2, init, {});
      Store want = init;
      want[p.output] = reference(p, in, {}, NumMode::Int);
      bool same = r.store.size() == want.size();
      for (auto& [name, v] : want) same = same && value_equal(r.store.at(name), v);
      if (!same) throw std::runtime_error("final store differs");
    } catch (const std::exception& e) {
      if (failures++ == 0) first = "seed " + std::to_string(i + 1) + ": " + e.what();
    }
  }
  if (failures) return fail(std::to_string(failures) + " failures; " + first);
  return Outcome{true, std::to_string(corpus.size()) + " programs, 0 failures"};
}

// 6. Equivalence suite.
Outcome equivalences() {
  std::string summary;
  for (auto& r : equivalence_suite(6, kPropertyInstances, kPropertyMaxSize)) {
    if (r.failures || r.instances < kPropertyInstances) return fail(r.name + ": " + r.first_failure);
    summary += (summary.empty() ? "" : ", ") + r.name;
  }
  return Outcome{true, summary + ": " + std::to_string(kPropertyInstances) + " instances each"};
}

// 7. Footprint disjointness and order independence, plus the seeded race.
Outcome race_freedom(const std::vector<std::string>& corpus) {
  size_t violations = 0, loops = 0;
  std::string first;
  auto count = [&](const std::string& what, const CheckReport& r) {
    loops += r.parallel_loops;
    if (!r.pass) {
      if (violations++ == 0) first = what + " [" + r.stage + "] " + r.message;
    }
  };
  for (size_t i = 0; i < corpus.size(); ++i) count("seed " + std::to_string(i + 1), differential_check(corpus[i]));
  CheckOptions golden;
  golden.sigma = {{"n", 2}};
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    count(f, differential_check(read_program(f), golden));
  }
  if (violations) return fail(std::to_string(violations) + " violations; " + first);

  Program racy = parse_program(read_program("racy.dpia"), false);
  NatEnv sigma{{"n", 4}};
  Store s = with_outputs(racy, int_inputs(racy, sigma, 7), sigma, NumMode::Int);
  ExecResult r = exec(lower(racy.body), s, sigma);
  if (r.races.empty()) return fail("seeded racy parfor was not reported");
  return Outcome{true, "0 violations over " + std::to_string(loops) +
                           " parallel loop runs; seeded fault: " + r.races.front().describe()};
}

// 8. The racy parfor is rejected by the checker.
Outcome interference() {
  try {
    parse_program(read_program("racy.dpia"));
  } catch (const DpiaError& e) {
    std::string m = e.what();
    if (e.cls() == ErrorClass::Type && m.find("passiv") != std::string::npos &&
        m.find("'b'") != std::string::npos) {
      return Outcome{true, e.describe()};
    }
    return fail("wrong diagnostic: " + e.describe());
  }
  return fail("racy parfor type-checked");
}

// 9. Allocation hoisting.
Outcome hoisting() {
  Compilation c = compile(read_program("hoist.dpia"), Target::OpenCL, NumMode::Int);
  HoistResult h = hoist_allocations(c.stage2);
  if (h.buffers.size() != 1) return fail(std::to_string(h.buffers.size()) + " hoisted buffers");
  const HoistedBuffer& b = h.buffers[0];
  Nat total(1);
  Data d = b.type;
  while (d->k == DataTypeNode::K::Array) {
    total = total * d->size;
    d = d->a;
  }
  if (!nat_equal(total, Nat::var("n") * Nat(1024)) || d->k != DataTypeNode::K::Num) {
    return fail("buffer type " + data_to_string(b.type));
  }
  if (count_prims(h.body, [](const std::string& n) { return n == "newGlobal"; }) != 0) {
    return fail("newGlobal left in the body");
  }
  auto top = match_prim(h.body);
  if (!top || top->name != "parforGlobal") return fail("body does not start with parforGlobal");
  std::string i = top->args[1]->name;
  size_t indexed = 0, bare = 0;
  std::function<void(const Phrase&)> walk = [&](const Phrase& p) {
    if (!p) return;
    if (auto m = match_prim(p); m && (m->name == "idx" || m->name == "idxAcc")) {
      const Phrase& a = m->args[0];
      if (a->k == PhraseNode::K::Proj && a->a->k == PhraseNode::K::Ident && a->a->name == b.name) {
        if (m->args[1]->k == PhraseNode::K::Ident && m->args[1]->name == i) ++indexed;
        else ++bare;
        return;
      }
    }
    if (p->k == PhraseNode::K::Ident && p->name == b.name) ++bare;
    walk(p->a);
    walk(p->b);
  };
  walk(h.body);
  if (indexed != 2 || bare != 0) {
    return fail(std::to_string(indexed) + " indexed and " + std::to_string(bare) + " other uses");
  }

  NatEnv sigma{{"n", 2}};
  Store in = int_inputs(c.prog, sigma, 9);
  Store init = with_outputs(c.prog, in, sigma, NumMode::Int);
  CodegenOptions nested = c.kernel->unit.opts;
  nested.allow_nested_alloc = true;
  Kernel before = build_kernel(c.prog, c.stage2, nested);
  ImpOptions io{NumMode::Int, false};
  ExecResult rb = simulate_kernel(before, init, sigma, {2, 4}, io);
  ExecResult ra = simulate_kernel(*c.kernel, init, sigma, {2, 4}, io);
  std::vector<Value> want;
  for (int64_t row = 0; row < 2; ++row) {
    int64_t acc = 0;
    for (int64_t j = 0; j < 1024; ++j) acc += in["xs"].xs[1024 * row + j].i * in["ys"].xs[1024 * row + j].i;
    want.push_back(value_num(acc));
  }
  Value oracle = value_array(want);
  if (!value_equal(rb.store.at("out"), oracle) || !value_equal(ra.store.at("out"), oracle)) {
    return fail("simulation before/after hoisting disagrees with the row sums");
  }
  return Outcome{true, "buffer " + b.name + " : " + data_to_string(b.type) + ", 2 indexed uses"};
}

// 10. Index simplification soundness.
Outcome simplification() {
  using c::ExprP;
  std::mt19937_64 rng(10);
  auto pick = [&](int64_t n) { return static_cast<int64_t>(rng() % static_cast<uint64_t>(n)); };
  const int64_t consts[] = {1, 2, 3, 4, 5, 8, 16};
  auto k = [&] { return c::int_lit(consts[pick(7)]); };

  struct Case {
    ExprP e;
    c::RangeEnv env;
  };
  auto random_env = [&] {
    c::RangeEnv env;
    for (const char* v : {"i", "j"}) {
      int64_t lo = pick(4) == 0 ? -pick(8) : 0;
      int64_t hi = lo + pick(kSimplifyMaxRange);
      env[v] = {lo, hi};
    }
    return env;
  };
  std::function<ExprP(int)> gen = [&](int depth) -> ExprP {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(3)) {
        case 0:
          return c::var("i");
        case 1:
          return c::var("j");
        default:
          return c::int_lit(pick(9));
      }
    }
    static const char ops[] = {'+', '+', '-', '*', '/', '%'};
    char op = ops[pick(6)];
    if (op == '/' || op == '%') return c::bin(op, gen(depth - 1), k());
    if (op == '*' && pick(2)) return c::bin(op, k(), gen(depth - 1));
    return c::bin(op, gen(depth - 1), gen(depth - 1));
  };
  // Shapes each rule is written for, with random parts.
  auto templated = [&]() -> ExprP {
    ExprP a = gen(2), c1 = k(), c2 = k();
    switch (pick(8)) {
      case 0:
        return c::bin('/', c::bin('+', c::bin('*', a, c1), gen(1)), c1);
      case 1:
        return c::bin('%', c::bin('+', c::bin('*', c1, a), gen(1)), c1);
      case 2:
        return c::bin('/', c::bin('/', a, c1), c2);
      case 3:
        return c::bin('%', c::bin('%', a, c::int_lit(c2->i * consts[pick(7)])), c2);
      case 4:
        return c::bin('+', c::bin('*', c1, c::bin('/', a, c1)), c::bin('%', a, c1));
      case 5:
        return c::bin('+', c::bin('*', c::int_lit(3), c::bin('*', c1, c::bin('/', a, c1))),
                      c::bin('*', c::int_lit(3), c::bin('%', a, c1)));
      case 6:
        return c::bin('+', c::bin('+', a, c::int_lit(0)), c::bin('*', c::int_lit(1), gen(1)));
      default:
        return c::bin('/', c::var(pick(2) ? "i" : "j"), c::int_lit(kSimplifyMaxRange + 8));
    }
  };

  auto agree = [](const ExprP& a, const ExprP& b, const c::RangeEnv& env) {
    auto [ilo, ihi] = env.at("i");
    auto [jlo, jhi] = env.at("j");
    for (int64_t i = ilo; i <= ihi; ++i) {
      for (int64_t j = jlo; j <= jhi; ++j) {
        std::map<std::string, int64_t> vs{{"i", i}, {"j", j}};
        auto x = c::eval_index(a, vs);
        if (!x) continue;
        auto y = c::eval_index(b, vs);
        if (!y || *x != *y) return false;
      }
    }
    return true;
  };

  std::map<std::string, size_t> fired;
  size_t checked = 0;
  for (int n = 0; n < 4000; ++n) {
    ExprP e = n % 2 ? gen(4) : templated();
    c::RangeEnv env = random_env();
    for (auto& rule : c::simplify_rules()) {
      auto r = rule.apply(e, env);
      if (!r) continue;
      ++fired[rule.name];
      ++checked;
      if (!agree(e, *r, env)) {
        return fail("rule " + rule.name + " unsound on " + render_expr(e, {}) + " -> " +
                    render_expr(*r, {}));
      }
    }
    ExprP s = c::simplify_index(e, env);
    if (!agree(e, s, env)) {
      return fail("simplify_index unsound on " + render_expr(e, {}) + " -> " + render_expr(s, {}));
    }
  }
  for (auto& rule : c::simplify_rules()) {
    if (!fired.count(rule.name)) return fail("rule " + rule.name + " never fired");
  }

  // The tiled layout read back element by element.
  const char* layout =
      "(nat n) (param xs (exp (arr (* n 32) num))) (param ys (exp (arr (* n 32) num)))"
      "(join (join (mapWorkgroup (lam zs1 (mapLocal (lam zs2 (map (lam x (fst x)) zs2))"
      " (split 8 zs1))) (split 32 (zip xs ys)))))";
  NatEnv sigma{{"n", 2}};
  for (const char* text : {layout}) {
    Compilation on = compile(text, Target::PseudoC, NumMode::Int, true);
    Compilation off = compile(text, Target::PseudoC, NumMode::Int, false);
    Store in;
    std::vector<Value> xs, ys;
    for (int64_t e = 0; e < 64; ++e) {
      xs.push_back(value_num(e + 1));
      ys.push_back(value_num(-e - 1));
    }
    in["xs"] = value_array(xs);
    in["ys"] = value_array(ys);
    Value ref = reference(on.prog, in, sigma, NumMode::Int);
    for (auto* comp : {&on, &off}) {
      ExecResult r = exec_c(*comp->unit, with_outputs(comp->prog, in, sigma, NumMode::Int), sigma);
      if (!value_equal(r.store.at("out"), ref)) return fail("tiled layout index disagrees with eval-fn");
    }
    if (on.code.find('/') != std::string::npos || on.code.find('%') != std::string::npos) {
      return fail("simplified tiled index still divides");
    }
  }
  Compilation tiled = compile(read_program("tiled.dpia"), Target::PseudoC, NumMode::Int, true);
  Store in = int_inputs(tiled.prog, sigma, 101);
  ExecResult r = exec_c(*tiled.unit, with_outputs(tiled.prog, in, sigma, NumMode::Int), sigma);
  if (!value_equal(r.store.at("out"), reference(tiled.prog, in, sigma, NumMode::Int))) {
    return fail("tiled dot product disagrees with eval-fn");
  }
  std::string rules;
  for (auto& [name, count] : fired) rules += " " + name + "=" + std::to_string(count);
  return Outcome{true, std::to_string(checked) + " rewrites checked exhaustively;" + rules};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, double limit, const std::function<Outcome()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0 && secs >= limit) {
      o.pass = false;
      o.detail += " (took " + std::to_string(secs) + " s, limit " + std::to_string(limit) + " s)";
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %-28s %7.3f s  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  };

  std::vector<std::string> corpus = fuzz_corpus();
  report(1, "golden dot product", kGoldenSeconds, golden_dot);
  report(2, "golden tiled dot product", kGoldenSeconds, golden_tiled);
  report(3, "golden OpenCL kernel", kGoldenSeconds, golden_kernel);
  report(4, "type preservation", kTypePreservationSeconds, [&] { return type_preservation(corpus); });
  report(5, "coincidence", kCoincidenceSeconds, [&] { return coincidence(corpus); });
  report(6, "equivalence suite", 0, equivalences);
  report(7, "data-race freedom", 0, [&] { return race_freedom(corpus); });
  report(8, "interference rejection", 0, interference);
  report(9, "allocation hoisting", 0, hoisting);
  report(10, "index simplification", 0, simplification);
  return failed == 0 ? 0 : 1;
}

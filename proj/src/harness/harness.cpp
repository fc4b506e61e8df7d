#include "dpia/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <thread>

#include "dpia/checker.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/opencl.hpp"
#include "dpia/pipeline.hpp"
#include "dpia/prims.hpp"

namespace dpia {

namespace {

constexpr uint64_t kMaxDim = 64;

// Where a generated map sits in the OpenCL hierarchy; keeps programs
// kernel-legal so the simulator gets exercised.
enum class Level { Top, Global, Workgroup, Local };

class Generator {
 public:
  Generator(uint64_t seed, int depth, int max_size)
      : rng_(seed), depth_(std::max(1, depth)),
        max_(std::clamp<uint64_t>(static_cast<uint64_t>(std::max(1, max_size)), 1, kMaxDim)) {}

  std::string run() {
    Data t = output_type();
    std::string body = gen(t, depth_, Level::Top);
    std::string s;
    for (auto& [name, d] : params_) s += "(param " + name + " (exp " + data_to_sexpr(d) + "))\n";
    return s + body + "\n";
  }

 private:
  struct Var {
    std::string name;
    Data type;
  };

  std::mt19937_64 rng_;
  int depth_;
  uint64_t max_;
  std::vector<std::pair<std::string, Data>> params_;
  std::vector<Var> scope_;
  int counter_ = 0;

  uint64_t pick(uint64_t n) { return rng_() % n; }
  bool coin(uint64_t num = 1, uint64_t den = 2) { return pick(den) < num; }

  uint64_t size() { return std::max<uint64_t>(1, max_ >> pick(3)); }

  static Data vec4() { return dt::vec(4); }
  static Data num() { return dt::num(); }
  static Data pair_nn() { return dt::pair(dt::num(), dt::num()); }
  static uint64_t dim(const Data& d) { return nat_eval(d->size, {}); }
  static Data arr(uint64_t n, Data e) { return dt::array(Nat(n), std::move(e)); }

  Data output_type() {
    uint64_t n = size();
    switch (pick(7)) {
      case 0:
        return num();
      case 1:
        return pair_nn();
      case 2:
        return arr(n, arr(size(), num()));
      case 3:
        return arr(n, pair_nn());
      case 4:
        return arr(std::max<uint64_t>(1, n / 4), vec4());
      default:
        return arr(n, num());
    }
  }

  std::string fresh(const char* base) { return base + std::to_string(++counter_); }

  std::string param(const Data& t) {
    std::vector<std::string> same;
    for (auto& [name, d] : params_) {
      if (data_equal(d, t)) same.push_back(name);
    }
    if (!same.empty() && coin(2, 3)) return same[pick(same.size())];
    std::string name = "xs" + std::to_string(params_.size() + 1);
    params_.emplace_back(name, t);
    return name;
  }

  std::vector<const Var*> vars_of(const std::function<bool(const Data&)>& ok) {
    std::vector<const Var*> r;
    for (auto& v : scope_) {
      if (ok(v.type)) r.push_back(&v);
    }
    return r;
  }

  std::string leaf(const Data& t) {
    std::vector<std::string> uses;
    for (auto* v : vars_of([&](const Data& d) { return data_equal(d, t); })) uses.push_back(v->name);
    if (t->k == DataTypeNode::K::Num) {
      for (auto* v : vars_of([](const Data& d) { return data_equal(d, pair_nn()); })) {
        uses.push_back("(fst " + v->name + ")");
        uses.push_back("(snd " + v->name + ")");
      }
    }
    if (!uses.empty() && coin(4, 5)) return uses[pick(uses.size())];
    switch (t->k) {
      case DataTypeNode::K::Num:
        return std::to_string(pick(6));
      case DataTypeNode::K::Vec:
        return "(lit " + std::to_string(pick(4)) + " (vec 4))";
      default:
        return param(t);
    }
  }

  template <class Fn>
  std::string bind(std::vector<Var> vs, Fn&& fn) {
    size_t mark = scope_.size();
    for (auto& v : vs) scope_.push_back(std::move(v));
    std::string r = fn();
    scope_.resize(mark);
    return r;
  }

  std::string gen(const Data& t, int d, Level lv) {
    if (d <= 0) return leaf(t);
    if (coin(1, 12)) {
      uint64_t n = size();
      return "(idx " + gen(arr(n, t), d - 1, lv) + " (lit " + std::to_string(pick(n)) +
             " (idx " + std::to_string(n) + ")))";
    }
    switch (t->k) {
      case DataTypeNode::K::Num:
        return gen_scalar(t, d, lv);
      case DataTypeNode::K::Vec:
        return gen_scalar(t, d, lv);
      case DataTypeNode::K::Pair:
        if (coin(1, 4)) return leaf(t);
        return "(pair " + gen(t->a, d - 1, lv) + " " + gen(t->b, d - 1, lv) + ")";
      case DataTypeNode::K::Array:
        return gen_array(t, d, lv);
      default:
        return leaf(t);
    }
  }

  std::string gen_scalar(const Data& t, int d, Level lv) {
    bool is_vec = t->k == DataTypeNode::K::Vec;
    uint64_t c = pick(is_vec ? 6 : 8);
    if (c < 2) {
      static const char* ops[] = {"+", "-", "*", "+", "-", "*", "/"};
      return std::string("(") + ops[pick(7)] + " " + gen(t, d - 1, lv) + " " +
             gen(t, d - 1, lv) + ")";
    }
    if (c < 4) return gen_reduce(t, d, lv);
    if (c == 4) return leaf(t);
    if (!is_vec && c == 5) return "(negate " + gen(t, d - 1, lv) + ")";
    if (!is_vec) return std::string(coin() ? "(fst " : "(snd ") + gen(pair_nn(), d - 1, lv) + ")";
    return leaf(t);
  }

  // Source array for a reduce or map whose element satisfies `ok`; prefers
  // arrays already in scope.
  Data source(uint64_t n, const std::function<bool(const Data&)>& ok,
              const std::function<Data()>& fallback) {
    auto arrays = vars_of([&](const Data& v) {
      return v->k == DataTypeNode::K::Array && (n == 0 || dim(v) == n) && ok(v->a);
    });
    if (!arrays.empty() && coin()) return arrays[pick(arrays.size())]->type;
    return arr(n == 0 ? size() : n, fallback());
  }

  std::string gen_reduce(const Data& t, int d, Level lv) {
    bool is_vec = t->k == DataTypeNode::K::Vec;
    Data src = source(
        0, [&](const Data& e) { return data_equal(e, t) || (!is_vec && data_equal(e, pair_nn())); },
        [&] { return is_vec ? vec4() : (coin() ? num() : pair_nn()); });
    std::string x = fresh("x"), a = fresh("a");
    std::string xs = gen(src, d - 1, lv);
    std::string init = leaf(t);
    std::string body = bind({{x, src->a}, {a, t}}, [&] {
      Data et = src->a;
      std::string item = data_equal(et, t) ? x : "(* (fst " + x + ") (snd " + x + "))";
      if (coin(1, 4)) return gen(t, d - 1, lv);
      if (coin()) return "(+ " + item + " " + a + ")";
      return "(+ " + gen(t, d - 1, lv) + " " + a + ")";
    });
    return "(reduce (lam " + x + " " + a + " " + body + ") " + init + " " + xs + ")";
  }

  std::string gen_array(const Data& t, int d, Level lv) {
    uint64_t n = dim(t);
    const Data& e = t->a;
    std::vector<std::function<std::string()>> opts;
    auto add = [&](int weight, std::function<std::string()> f) {
      for (int i = 0; i < weight; ++i) opts.push_back(f);
    };
    add(5, [&] { return gen_map(t, d, lv); });
    add(1, [&] { return leaf(t); });
    if (e->k == DataTypeNode::K::Pair) {
      add(3, [&] {
        return "(zip " + gen(arr(n, e->a), d - 1, lv) + " " + gen(arr(n, e->b), d - 1, lv) + ")";
      });
    }
    if (e->k == DataTypeNode::K::Array && n * dim(e) <= kMaxDim) {
      add(2, [&] {
        return "(split " + std::to_string(dim(e)) + " " + gen(arr(n * dim(e), e->a), d - 1, lv) +
               ")";
      });
    }
    if (n >= 2) {
      add(2, [&] {
        uint64_t b = uint64_t{2} << pick(3);
        while (n % b != 0) b /= 2;
        return "(join " + gen(arr(n / b, arr(b, e)), d - 1, lv) + ")";
      });
    }
    if (e->k == DataTypeNode::K::Num && n % 4 == 0) {
      add(2, [&] { return "(asScalar 4 " + gen(arr(n / 4, vec4()), d - 1, lv) + ")"; });
    }
    if (e->k == DataTypeNode::K::Vec && n * 4 <= kMaxDim) {
      add(3, [&] { return "(asVector 4 " + gen(arr(n * 4, num()), d - 1, lv) + ")"; });
    }
    return opts[pick(opts.size())]();
  }

  std::string gen_map(const Data& t, int d, Level lv) {
    uint64_t n = dim(t);
    std::vector<std::pair<const char*, Level>> variants = {{"map", lv}, {"mapSeq", lv}};
    if (lv == Level::Top) {
      variants.push_back({"mapGlobal", Level::Global});
      variants.push_back({"mapWorkgroup", Level::Workgroup});
    }
    if (lv == Level::Workgroup) variants.push_back({"mapLocal", Level::Local});
    auto [name, inner] = variants[pick(variants.size())];
    Data src = source(
        n, [](const Data&) { return true; },
        [&]() -> Data {
          switch (pick(4)) {
            case 0:
              return pair_nn();
            case 1:
              return arr(size(), num());
            case 2:
              return vec4();
            default:
              return num();
          }
        });
    std::string x = fresh("x");
    std::string xs = gen(src, d - 1, lv);
    std::string body = bind({{x, src->a}}, [&] { return gen(t->a, d - 1, inner); });
    std::string f = "(lam " + x + " " + body + ")";
    if (coin(1, 6)) {
      std::vector<const char*> to = {"toGlobal", "toPrivate"};
      if (lv == Level::Workgroup || lv == Level::Local) to.push_back("toLocal");
      std::string y = fresh("ys");
      return std::string("(") + to[pick(to.size())] + " (lam " + y + " (" + name + " " + f +
             " " + y + ")) " + xs + ")";
    }
    return std::string("(") + name + " " + f + " " + xs + ")";
  }
};

size_t c_loops(const std::vector<c::StmtP>& body) {
  size_t n = 0;
  for (auto& s : body) {
    if (s->k == c::Stmt::K::For) ++n;
    n += c_loops(s->body);
  }
  return n;
}

std::string first_difference(const Value& got, const Value& want) {
  std::vector<const Value*> a, b;
  value_leaves(got, a);
  value_leaves(want, b);
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (!value_equal(*a[i], *b[i])) {
      return "leaf " + std::to_string(i) + ": got " + value_to_string(*a[i]) + ", expected " +
             value_to_string(*b[i]);
    }
  }
  return "got " + value_to_string(got) + ", expected " + value_to_string(want);
}

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<':
        r += "&lt;";
        break;
      case '>':
        r += "&gt;";
        break;
      case '&':
        r += "&amp;";
        break;
      case '"':
        r += "&quot;";
        break;
      default:
        r += c;
    }
  }
  return r;
}

}  // namespace

std::string generate_program(uint64_t seed, int depth, int max_size) {
  return Generator(seed, depth, max_size).run();
}

std::map<std::string, size_t> prim_coverage(const Program& prog) {
  std::map<std::string, size_t> r;
  std::function<void(const Phrase&)> walk = [&](const Phrase& p) {
    if (!p) return;
    if (p->k == PhraseNode::K::Prim) {
      auto v = vec_prim(p->name);
      ++r[v ? v->base : p->name];
    }
    walk(p->a);
    walk(p->b);
  };
  walk(prog.body);
  return r;
}

Store random_inputs(const Program& prog, const NatEnv& sigma, uint64_t seed, NumMode mode) {
  std::mt19937_64 rng(seed);
  Store s;
  for (auto& p : prog.params) {
    if (p.type->k == PhraseTypeNode::K::Exp) s[p.name] = random_value(p.type->data, sigma, mode, rng);
  }
  return s;
}

size_t count_loops(const Phrase& p) {
  return count_prims(p, [](const std::string& n) { return n == "for" || is_parfor_family(n); });
}

size_t expected_loops(const Program& prog, size_t assign_mapIs) {
  return assign_mapIs + count_prims(prog.body, [](const std::string& n) {
           return is_map_family(n) || n == "reduce";
         });
}

CheckReport differential_check(const std::string& text, const CheckOptions& o,
                               std::optional<Store> inputs) {
  CheckReport r;
  auto fail = [&](std::string stage, std::string msg) {
    r.pass = false;
    r.stage = std::move(stage);
    r.message = std::move(msg);
    return r;
  };
  try {
    PipelineOptions po;
    po.codegen.mode = NumMode::Int;
    po.codegen.fault_flip_split = o.fault_flip_split;
    Compilation c;
    try {
      c = compile_source(text, po);
    } catch (const StageError& e) {
      return fail(e.stage(), e.describe());
    }
    const Program& prog = c.prog;
    NatEnv sigma = o.sigma;
    for (auto& n : prog.nats) sigma.emplace(n, 8);
    Store in = inputs ? *inputs : random_inputs(prog, sigma, 1);
    for (auto& [name, v] : in) {
      std::vector<const Value*> leaves;
      value_leaves(v, leaves);
      r.input_leaves += leaves.size();
    }

    Store init = in;
    std::vector<std::string> outputs;
    for (auto& p : prog.params) {
      if (p.type->k == PhraseTypeNode::K::Exp) continue;
      outputs.push_back(p.name);
      Data d = p.type->k == PhraseTypeNode::K::Acc ? p.type->data : as_var_type(p.type);
      if (!d) return fail("harness", "parameter " + p.name + " has no storage type");
      if (!init.count(p.name)) init[p.name] = zero_value(d, sigma, NumMode::Int);
    }

    bool functional = check_program(prog).type->k != PhraseTypeNode::K::Comm;
    std::optional<Value> ref;
    if (functional) {
      ValueEnv env(in.begin(), in.end());
      ref = eval_fn(prog.body, env, sigma, NumMode::Int);
    }

    // Compares a final store with the reference: the output receives eval(E),
    // every other cell keeps its initial value.
    auto compare = [&](const char* stage, const Store& got, const Store& want) -> bool {
      for (auto& [name, v] : want) {
        auto it = got.find(name);
        if (it == got.end()) {
          fail(stage, "cell " + name + " missing from the final store");
          return false;
        }
        if (!value_equal(it->second, v)) {
          fail(stage, "cell " + name + " differs: " + first_difference(it->second, v));
          return false;
        }
      }
      return true;
    };
    Store want = init;
    ImpOptions fwd, rev;
    rev.reverse_parfor = true;

    ExecResult e1 = exec(c.stage2, init, sigma, fwd);
    if (!e1.races.empty()) return fail("exec", e1.races.front().describe());
    if (ref) {
      want[prog.output] = *ref;
    } else {
      want = e1.store;
    }
    if (!compare("exec", e1.store, want)) return r;
    r.parallel_loops = e1.parallel_loops;
    if (o.reverse) {
      ExecResult e2 = exec(c.stage2, init, sigma, rev);
      if (!e2.races.empty()) return fail("exec-reverse", e2.races.front().describe());
      if (!compare("exec-reverse", e2.store, want)) return r;
    }

    r.loops = count_loops(c.stage2);
    size_t expect = expected_loops(prog, c.assign_mapIs);
    if (functional && r.loops != expect) {
      return fail("structure", "Stage II has " + std::to_string(r.loops) + " loops, expected " +
                                   std::to_string(expect));
    }
    size_t emitted = c_loops(c.unit->fn.body);
    if (emitted != r.loops) {
      return fail("structure", "emitted C has " + std::to_string(emitted) +
                                   " loops, Stage II has " + std::to_string(r.loops));
    }

    ExecResult c1 = exec_c(*c.unit, init, sigma, fwd);
    if (!c1.races.empty()) return fail("exec-c", c1.races.front().describe());
    if (!compare("exec-c", c1.store, want)) return r;
    if (o.reverse) {
      ExecResult c2 = exec_c(*c.unit, init, sigma, rev);
      if (!c2.races.empty()) return fail("exec-c-reverse", c2.races.front().describe());
      if (!compare("exec-c-reverse", c2.store, want)) return r;
    }

    if (o.opencl && hierarchy_lint(c.stage2).empty()) {
      CodegenOptions ko = po.codegen;
      ko.target = Target::OpenCL;
      std::optional<Kernel> k;
      try {
        k = build_kernel(prog, c.stage2, ko);
      } catch (const DpiaError& e) {
        if (e.cls() != ErrorClass::Type) throw;
      }
      if (k) {
        r.opencl_checked = true;
        ExecResult k1 = simulate_kernel(*k, init, sigma, o.launch, fwd);
        if (!k1.races.empty()) return fail("kernel", k1.races.front().describe());
        if (!compare("kernel", k1.store, want)) return r;
        if (o.reverse) {
          ExecResult k2 = simulate_kernel(*k, init, sigma, o.launch, rev);
          if (!k2.races.empty()) return fail("kernel-reverse", k2.races.front().describe());
          if (!compare("kernel-reverse", k2.store, want)) return r;
        }
      }
    }
  } catch (const DpiaError& e) {
    return fail("internal", e.describe());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return r;
}

std::string shrink(uint64_t seed, int depth, int max_size, const CheckOptions& o) {
  std::string best = generate_program(seed, depth, max_size);
  CheckReport first = differential_check(best, o);
  if (first.pass) return best;
  size_t best_leaves = first.input_leaves;
  for (int s = max_size / 2; s >= 1; s /= 2) {
    std::string t = generate_program(seed, depth, s);
    CheckReport r = differential_check(t, o);
    if (r.pass) break;
    if (r.input_leaves <= best_leaves) {
      best = t;
      best_leaves = r.input_leaves;
    }
  }
  return best;
}

std::vector<FuzzCase> fuzz(const FuzzOptions& o) {
  std::vector<FuzzCase> cases(o.seeds);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < o.seeds; i = next++) {
      FuzzCase& fc = cases[i];
      auto t0 = std::chrono::steady_clock::now();
      fc.seed = o.first_seed + i;
      fc.program = generate_program(fc.seed, o.depth, o.max_size);
      fc.report = differential_check(fc.program, o.check);
      if (!fc.report.pass) fc.shrunk = shrink(fc.seed, o.depth, o.max_size, o.check);
      fc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  unsigned n = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<size_t>(n, std::max<size_t>(1, o.seeds)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cases;
}

void write_junit(std::ostream& os, const std::vector<FuzzCase>& cases, const std::string& suite) {
  size_t failures = 0;
  double total = 0;
  for (auto& c : cases) {
    failures += c.report.pass ? 0 : 1;
    total += c.seconds;
  }
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<testsuite name=\"" << xml_escape(suite) << "\" tests=\"" << cases.size()
     << "\" failures=\"" << failures << "\" time=\"" << total << "\">\n";
  for (auto& c : cases) {
    os << "  <testcase classname=\"" << xml_escape(suite) << "\" name=\"seed-" << c.seed
       << "\" time=\"" << c.seconds << "\"";
    if (c.report.pass) {
      os << "/>\n";
      continue;
    }
    os << ">\n    <failure message=\"" << xml_escape(c.report.stage + ": " + c.report.message)
       << "\">" << xml_escape(c.program);
    if (!c.shrunk.empty() && c.shrunk != c.program) os << "\nshrunk:\n" << xml_escape(c.shrunk);
    os << "</failure>\n  </testcase>\n";
  }
  os << "</testsuite>\n";
}

}  // namespace dpia

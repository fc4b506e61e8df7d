#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dpia/eval_imp.hpp"
#include "dpia/program.hpp"

namespace dpia {

// Random well-typed functional program in surface syntax. Deterministic in
// (seed, depth, max_size); sizes are powers of two no larger than max_size
// except where split or asVector multiply them, capped at 64.
std::string generate_program(uint64_t seed, int depth = 3, int max_size = 8);

// Occurrences of each primitive in a parsed program body.
std::map<std::string, size_t> prim_coverage(const Program& prog);

// Inputs drawn for every exp parameter, seeded.
Store random_inputs(const Program& prog, const NatEnv& sigma, uint64_t seed,
                    NumMode mode = NumMode::Int);

struct CheckOptions {
  bool fault_flip_split = false;
  bool opencl = true;
  bool reverse = true;
  Launch launch{2, 3};
  NatEnv sigma;  // values for nat parameters; missing ones default to 8
};

struct CheckReport {
  bool pass = true;
  std::string stage;    // where the first divergence showed up
  std::string message;
  bool opencl_checked = false;
  size_t parallel_loops = 0;
  size_t loops = 0;     // loops in the Stage II output
  size_t input_leaves = 0;
};

// eval-fn against exec on Stage II, exec_c on the emitted C tree and the
// simulated kernel when the program is hierarchy-clean, with race,
// reverse-order and loop-count checks. Missing inputs are drawn from seed 1.
CheckReport differential_check(const std::string& text, const CheckOptions& o = {},
                               std::optional<Store> inputs = std::nullopt);

// Loops the source program is expected to produce: one per map and reduce
// plus the copy loops of array assignments.
size_t expected_loops(const Program& prog, size_t assign_mapIs);
size_t count_loops(const Phrase& p);

struct FuzzCase {
  uint64_t seed = 0;
  std::string program;
  CheckReport report;
  // Smallest failing program found by halving sizes, when the case failed.
  std::string shrunk;
  double seconds = 0;
};

struct FuzzOptions {
  uint64_t first_seed = 1;
  size_t seeds = 100;
  int depth = 3;
  int max_size = 8;
  CheckOptions check;
  unsigned threads = 0;  // 0: hardware concurrency
};

std::vector<FuzzCase> fuzz(const FuzzOptions& o);

// Regenerates the program with halved size caps while it keeps failing.
std::string shrink(uint64_t seed, int depth, int max_size, const CheckOptions& o);

// Store-equality checks of the program equivalences behind the translation:
// map (mapI against assignment of map), temp-storage, reduce (reduceI
// against reduce) and the four layout/acceptor agreements (pair, zip, split,
// join). Each runs `instances` random cases with sizes up to max_size.
struct PropertyResult {
  std::string name;
  size_t instances = 0;
  size_t failures = 0;
  std::string first_failure;
};
std::vector<PropertyResult> equivalence_suite(uint64_t seed, size_t instances, int max_size = 16);

void write_junit(std::ostream& os, const std::vector<FuzzCase>& cases,
                 const std::string& suite = "dpia-fuzz");

}  // namespace dpia

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpia/codegen.hpp"
#include "dpia/phrase.hpp"
#include "dpia/value.hpp"

namespace dpia {

// A scalar leaf: a cell plus indices into it. Field selectors are encoded as
// -1 and -2.
struct LeafAddress {
  std::string cell;
  std::vector<int64_t> path;
  auto operator<=>(const LeafAddress&) const = default;
  std::string str() const;
};

struct RaceViolation {
  std::string loop;
  int64_t iter_a = 0, iter_b = 0;
  LeafAddress address;
  std::string describe() const;
};

// Pairwise disjointness of per-iteration write footprints.
std::optional<RaceViolation> check_race(const std::vector<std::set<LeafAddress>>& footprints,
                                        const std::string& loop = "parfor");

using Store = std::map<std::string, Value>;

struct ImpOptions {
  NumMode mode = NumMode::Int;
  bool reverse_parfor = false;  // run parallel iterations last to first
};

struct ExecResult {
  Store store;
  std::vector<RaceViolation> races;
  size_t parallel_loops = 0;  // parallel loop executions observed
};

// Runs a purely imperative comm phrase. Free identifiers are cells of
// `store`; cells introduced by new are zero-initialized and removed on exit.
ExecResult exec(const Phrase& p, Store store, const NatEnv& sigma, const ImpOptions& o = {});

struct Launch {
  int groups = 2;
  int local = 4;
};

// Interprets the emitted C tree. Inputs and the result are keyed by DPIA
// parameter name; missing parameters start zeroed. Kernel loops honour the
// id-stride semantics under `launch`, all work-items executed in turn.
ExecResult exec_c(const CUnit& u, const Store& inputs, const NatEnv& sigma,
                  const ImpOptions& o = {}, Launch launch = {});

// Storage conversion between DPIA values and the flattened C layout.
Value to_c_layout(const Value& v, const Data& d, Target t);
Value from_c_layout(const Value& v, const Data& d, const NatEnv& sigma, Target t);

}  // namespace dpia

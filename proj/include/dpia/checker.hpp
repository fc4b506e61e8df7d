#pragma once

#include <map>
#include <string>

#include "dpia/phrase.hpp"
#include "dpia/program.hpp"
#include "dpia/types.hpp"

namespace dpia {

using KindContext = std::map<std::string, Kind>;

// Passive zone Pi and active zone Gamma.
struct TypingContext {
  std::map<std::string, PType> passive;
  std::map<std::string, PType> active;
};

enum class Usage { Passive, Active };
using UsageReport = std::map<std::string, Usage>;

struct CheckResult {
  PType type;
  UsageReport usage;
};

void check_kind(const KindContext& delta, const Nat& n, SrcSpan span = {});
void check_kind(const KindContext& delta, const Data& d, SrcSpan span = {});
void check_kind(const KindContext& delta, const PType& t, SrcSpan span = {});

bool types_equal(const PType& a, const PType& b);

// Algorithmic SCIR checking. When `expected` is given the phrase is checked
// against it (unannotated lambdas are allowed there). Throws DpiaError.
CheckResult type_check(const KindContext& delta, const TypingContext& ctx, const Phrase& p,
                       const PType& expected = nullptr);

// Parameters of phrase type exp go to the passive zone, all others to the
// active zone.
CheckResult check_program(const Program& prog);
void program_contexts(const Program& prog, KindContext& delta, TypingContext& ctx);

// Type synthesis without kind, interference or passivity checks.
using TypeEnv = std::map<std::string, PType>;
PType synth_type(const TypeEnv& env, const Phrase& p);

}  // namespace dpia

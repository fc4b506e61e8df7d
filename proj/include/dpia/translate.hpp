#pragma once

#include <functional>
#include <set>
#include <string>

#include "dpia/phrase.hpp"
#include "dpia/program.hpp"

namespace dpia {

using Continuation = std::function<Phrase(const Phrase&)>;

// Stage I: acceptor- and continuation-passing translation of functional
// expressions. Input phrases must carry all type arguments explicitly.
class Translator {
 public:
  // Names in `avoid` are never produced as fresh binders.
  explicit Translator(std::set<std::string> avoid = {});

  Phrase gen_assign(const Phrase& A, const Data& d, const Phrase& E);
  Phrase acceptor(const Phrase& E, const Data& d, const Phrase& A);
  Phrase continuation(const Phrase& E, const Data& d, const Continuation& C);

  // mapI nodes introduced by gen_assign at array types.
  size_t assign_mapIs() const { return assign_mapIs_; }

 private:
  std::set<std::string> avoid_;
  int counter_ = 0;
  size_t assign_mapIs_ = 0;

  std::string fresh(const std::string& base);
  // Splits F into a binder and body, applying F to a fresh identifier when it
  // is not a lambda.
  std::pair<std::string, Phrase> open_fn(const Phrase& F, const std::string& base);
  Phrase reify(const Data& d, const Continuation& C);
  // lam x y o. acceptor(F x y, d2, o)
  Phrase reduce_fn(const Phrase& F, const Data& d1, const Data& d2);
};

// True when E contains no map, reduce or toX primitive.
bool is_trivial_exp(const Phrase& E);

struct Stage1 {
  Phrase comm;
  size_t assign_mapIs = 0;
};

// The program's body translated into its output acceptor. Bodies of type
// comm are returned unchanged.
Stage1 translate_program(const Program& prog);
// Acceptor phrase for the output parameter (x, or x.1 for var parameters).
Phrase output_acceptor(const Program& prog);

}  // namespace dpia

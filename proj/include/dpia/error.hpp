#pragma once

#include <stdexcept>
#include <string>

#include "dpia/phrase.hpp"

namespace dpia {

enum class ErrorClass { Parse, Type, Internal };

class DpiaError : public std::runtime_error {
 public:
  DpiaError(ErrorClass cls, const std::string& msg, SrcSpan span = {})
      : std::runtime_error(msg), cls_(cls), span_(span) {}

  ErrorClass cls() const { return cls_; }
  SrcSpan span() const { return span_; }
  // "line:col: message" when a span is known.
  std::string describe() const {
    return span_.valid() ? span_.str() + ": " + what() : std::string(what());
  }

 private:
  ErrorClass cls_;
  SrcSpan span_;
};

[[noreturn]] inline void parse_error(const std::string& msg, SrcSpan span = {}) {
  throw DpiaError(ErrorClass::Parse, msg, span);
}
[[noreturn]] inline void type_error(const std::string& msg, SrcSpan span = {}) {
  throw DpiaError(ErrorClass::Type, msg, span);
}
[[noreturn]] inline void internal_error(const std::string& msg, SrcSpan span = {}) {
  throw DpiaError(ErrorClass::Internal, msg, span);
}

}  // namespace dpia

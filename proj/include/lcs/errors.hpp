#pragma once

#include <stdexcept>
#include <string>

namespace lcs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LCS_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

LCS_DEFINE_ERROR(UnknownGenerator);
LCS_DEFINE_ERROR(BudgetExceeded);
LCS_DEFINE_ERROR(InvalidPresentation);
LCS_DEFINE_ERROR(Inconsistent);
LCS_DEFINE_ERROR(NotNormal);
LCS_DEFINE_ERROR(NotAbelianQuotient);
LCS_DEFINE_ERROR(AmbiguousIsolator);
LCS_DEFINE_ERROR(PeelFailure);
LCS_DEFINE_ERROR(NotAutomorphism);
LCS_DEFINE_ERROR(NotAction);
LCS_DEFINE_ERROR(NotNSeries);
LCS_DEFINE_ERROR(NotPTorsionSeries);
LCS_DEFINE_ERROR(NotFiltered);
LCS_DEFINE_ERROR(UnknownName);
LCS_DEFINE_ERROR(DuplicateName);
LCS_DEFINE_ERROR(SyntaxError);

#undef LCS_DEFINE_ERROR

}  // namespace lcs

#pragma once

#include <stdexcept>
#include <string>

namespace smw {

// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SMW_DEFINE_ERROR(Name)                       \
  class Name : public Error {                        \
   public:                                           \
    explicit Name(const std::string& what)           \
        : Error(std::string(#Name ": ") + what) {}   \
  }

// codec
SMW_DEFINE_ERROR(MalformedSD);
SMW_DEFINE_ERROR(NondeterministicSD);
SMW_DEFINE_ERROR(NotWellFormed);
SMW_DEFINE_ERROR(Unsatisfiable);
SMW_DEFINE_ERROR(InvalidNumber);

// oracle / supermachine
SMW_DEFINE_ERROR(MetaMachineRejected);
SMW_DEFINE_ERROR(ConstraintUnsatisfiable);
SMW_DEFINE_ERROR(PrefixIncomplete);
SMW_DEFINE_ERROR(StoreError);

// logic
SMW_DEFINE_ERROR(ParseError);
SMW_DEFINE_ERROR(UnknownAtom);
SMW_DEFINE_ERROR(TooManyAtoms);
SMW_DEFINE_ERROR(DefinitionCycle);

// corpus
SMW_DEFINE_ERROR(CatalogError);

#undef SMW_DEFINE_ERROR

}  // namespace smw

#ifndef ARTINFLUENCE_ERROR_HPP
#define ARTINFLUENCE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace artinfluence {

/// Base of every error raised by the library. Data errors map to CLI exit
/// code 1; ConfigError maps to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& why)
      : Error(source + ":" + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define ARTINFLUENCE_SIMPLE_ERROR(Name)                            \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

ARTINFLUENCE_SIMPLE_ERROR(DimensionMismatch)
ARTINFLUENCE_SIMPLE_ERROR(ReferentialError)
ARTINFLUENCE_SIMPLE_ERROR(TooManyDescriptors)
ARTINFLUENCE_SIMPLE_ERROR(IOError)
ARTINFLUENCE_SIMPLE_ERROR(InsufficientData)
ARTINFLUENCE_SIMPLE_ERROR(DegenerateLabels)
ARTINFLUENCE_SIMPLE_ERROR(EmptyCorpus)
ARTINFLUENCE_SIMPLE_ERROR(InsufficientSamples)
ARTINFLUENCE_SIMPLE_ERROR(EmptySet)
ARTINFLUENCE_SIMPLE_ERROR(InvalidQ)
ARTINFLUENCE_SIMPLE_ERROR(InvalidK)
ARTINFLUENCE_SIMPLE_ERROR(DisconnectedGraph)
ARTINFLUENCE_SIMPLE_ERROR(EmptyGroundTruth)
ARTINFLUENCE_SIMPLE_ERROR(AllInfinite)
ARTINFLUENCE_SIMPLE_ERROR(InvalidInput)
ARTINFLUENCE_SIMPLE_ERROR(ConfigError)

#undef ARTINFLUENCE_SIMPLE_ERROR

}  // namespace artinfluence

#endif  // ARTINFLUENCE_ERROR_HPP

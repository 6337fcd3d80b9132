#ifndef PROPHET_LAB_ERRORS_HPP
#define PROPHET_LAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prophet_lab {

struct BadParams : std::runtime_error {
  explicit BadParams(const std::string& msg) : std::runtime_error("BadParams: " + msg) {}
};

struct IndexOutOfRange : std::runtime_error {
  explicit IndexOutOfRange(const std::string& msg) : std::runtime_error("IndexOutOfRange: " + msg) {}
};

struct WrongFamily : std::runtime_error {
  explicit WrongFamily(const std::string& msg) : std::runtime_error("WrongFamily: " + msg) {}
};

struct MalformedFamily : std::runtime_error {
  explicit MalformedFamily(const std::string& msg) : std::runtime_error("MalformedFamily: " + msg) {}
};

struct Overflow : std::runtime_error {
  explicit Overflow(const std::string& msg) : std::runtime_error("Overflow: " + msg) {}
};

struct TooLarge : std::runtime_error {
  explicit TooLarge(const std::string& msg) : std::runtime_error("TooLarge: " + msg) {}
};

struct ZeroMass : std::runtime_error {
  explicit ZeroMass(const std::string& msg) : std::runtime_error("ZeroMass: " + msg) {}
};

struct UnknownGenerator : std::runtime_error {
  explicit UnknownGenerator(const std::string& msg) : std::runtime_error("UnknownGenerator: " + msg) {}
};

struct UndeclaredRandomness : std::runtime_error {
  explicit UndeclaredRandomness(const std::string& msg)
      : std::runtime_error("UndeclaredRandomness: " + msg) {}
};

// Thrown by the evaluation harness when a policy accepts an element that
// would make the selected set infeasible.
struct PolicyBug : std::logic_error {
  explicit PolicyBug(const std::string& msg) : std::logic_error("PolicyBug: " + msg) {}
};

}  // namespace prophet_lab

#endif

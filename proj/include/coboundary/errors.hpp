#ifndef COBOUNDARY_ERRORS_HPP
#define COBOUNDARY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coboundary {

// A stated precondition of an operation does not hold. The message carries
// the exact violated quantity (e.g. the nonzero integral as a rational).
class precondition_error : public std::runtime_error {
public:
  explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument lies outside the domain of the function/transformation.
class domain_mismatch_error : public std::runtime_error {
public:
  explicit domain_mismatch_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A point fell on the finite exceptional set of an interval exchange.
class undefined_point_error : public std::runtime_error {
public:
  explicit undefined_point_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The configured denominator guard (or another resource cap) was exceeded.
class resource_limit_error : public std::runtime_error {
public:
  explicit resource_limit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A combinatorial search that must succeed by theory found no assignment.
class search_exhausted_error : public std::runtime_error {
public:
  explicit search_exhausted_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A serialized object violates its schema or internal invariants.
class structural_error : public std::runtime_error {
public:
  explicit structural_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace coboundary

#endif

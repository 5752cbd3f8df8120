#pragma once

#include <stdexcept>
#include <string>

namespace icec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class ThresholdError : public Error { using Error::Error; };
class ExtrapolationError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double a, double b) : Error(what), a_(a), b_(b) {}
  // bracket for root finding, last two estimates for quadrature
  double first() const { return a_; }
  double second() const { return b_; }

 private:
  double a_, b_;
};

}  // namespace icec

#pragma once

#include <stdexcept>
#include <string>

namespace trimsvm {

/// Base class for all library errors.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class missing_file_error : public error {
  public:
    explicit missing_file_error(const std::string& path) : error("file not found: " + path) {}
};

class empty_file_error : public error {
  public:
    explicit empty_file_error(const std::string& path) : error("empty file: " + path) {}
};

/// Parse failure; carries the 1-based line number of the offending row.
class parse_error : public error {
  public:
    parse_error(const std::string& msg, std::size_t line)
        : error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class dimension_error : public error {
  public:
    explicit dimension_error(const std::string& msg) : error(msg) {}
};

class non_finite_error : public error {
  public:
    explicit non_finite_error(const std::string& msg) : error(msg) {}
};

/// nu*m or mu*m is not an integer and strict level handling was requested.
class non_integer_level_error : public error {
  public:
    explicit non_integer_level_error(const std::string& msg) : error(msg) {}
};

/// After snapping to the sample grid the levels collapsed (mu >= nu or nu >= 1),
/// so the trimmed objective is undefined for this sample size.
class degenerate_levels_error : public error {
  public:
    explicit degenerate_levels_error(const std::string& msg) : error(msg) {}
};

class single_class_error : public error {
  public:
    single_class_error() : error("training data contains a single class") {}
};

/// The QP subproblem polytope is empty. For the robust SVM this is the
/// unboundedness signal of the primal problem, not a programming error.
class infeasible_error : public error {
  public:
    explicit infeasible_error(const std::string& msg) : error(msg) {}
};

class too_large_error : public error {
  public:
    explicit too_large_error(const std::string& msg) : error(msg) {}
};

class empty_region_error : public error {
  public:
    explicit empty_region_error(const std::string& msg) : error(msg) {}
};

class count_too_large_error : public error {
  public:
    explicit count_too_large_error(const std::string& msg) : error(msg) {}
};

class too_few_samples_error : public error {
  public:
    explicit too_few_samples_error(const std::string& msg) : error(msg) {}
};

class mu_too_large_error : public error {
  public:
    explicit mu_too_large_error(const std::string& msg) : error(msg) {}
};

}  // namespace trimsvm

#pragma once

#include <stdexcept>
#include <string>

namespace pinsync {

/// Base class for all library errors. `code()` is a stable, grep-friendly
/// tag that the CLI prints as the first token of every diagnostic line.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Shape mismatch between operands.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& what) : error("E_DIM", what) {}
};

/// Invalid value, malformed input file, or violated precondition.
class validation_error : public error {
public:
    explicit validation_error(const std::string& what) : error("E_VALIDATE", what) {}
};

/// Iterative numeric routine failed to converge.
class convergence_error : public error {
public:
    explicit convergence_error(const std::string& what) : error("E_CONVERGE", what) {}
};

/// A computed value left the representable range.
class numeric_overflow : public error {
public:
    explicit numeric_overflow(const std::string& what) : error("E_OVERFLOW", what) {}
};

/// Not enough samples or grid points to produce a result.
class insufficient_data_error : public error {
public:
    explicit insufficient_data_error(const std::string& what) : error("E_DATA", what) {}
};

/// A simulation trace unusable for rate fitting (zero norms in the window).
class degenerate_trace_error : public error {
public:
    explicit degenerate_trace_error(const std::string& what) : error("E_TRACE", what) {}
};

} // namespace pinsync

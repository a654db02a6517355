#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace credible {

// Base class for all library failures.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (CSV, schema, score file). Carries a 1-based line number when known.
class parse_error : public error {
public:
    explicit parse_error(const std::string& msg, std::size_t line = 0)
        : error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A caller violated a precondition or an input violated a semantic contract.
class contract_error : public error {
public:
    using error::error;
};

// The request exceeds an implementation limit (state-space overflow, variable cap,
// candidate explosion).
class resource_error : public error {
public:
    using error::error;
};

}  // namespace credible

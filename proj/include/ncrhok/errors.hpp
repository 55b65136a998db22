#pragma once

#include <stdexcept>
#include <string>

namespace ncrhok {

/** Bad user input: unreadable/malformed files, invalid generator or CLI parameters. */
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Structural mismatch: tensor shapes, model/graph size disagreement, config conflicts. */
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Numeric failure: non-finite loss or gradients, divergent optimisation. */
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ncrhok

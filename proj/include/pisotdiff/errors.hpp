#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pisotdiff {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Ring parameters violate the class constraints (p >= q >= 1, irrational root).
class invalid_ring_error : public error {
public:
    explicit invalid_ring_error(const std::string& what) : error(what) {}
};

/// Two elements from different rings were combined.
class ring_mismatch_error : public error {
public:
    explicit ring_mismatch_error(const std::string& what) : error(what) {}
};

/// The working precision cannot separate a value from an integer.
/// Retry with more bits.
class precision_exhausted_error : public error {
public:
    explicit precision_exhausted_error(const std::string& what) : error(what) {}
};

/// A requested word or patch would exceed the configured size cap.
class size_cap_error : public error {
public:
    size_cap_error(const std::string& what, std::size_t predicted)
        : error(what), predicted_size(predicted) {}
    std::size_t predicted_size;
};

/// The operation does not accept this kind of input.
class refused_input_error : public error {
public:
    explicit refused_input_error(const std::string& what) : error(what) {}
};

/// Invalid run configuration (CLI / config file).
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

} // namespace pisotdiff

#pragma once

#include <stdexcept>
#include <string>

namespace nct {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-supplied parameters (sizes, ranges, coprimality, ...).
class parameter_error : public error {
public:
    using error::error;
};

// Shape mismatches between matrices / operators.
class dimension_error : public error {
public:
    using error::error;
};

// A numerical precondition of an operation does not hold
// (non-Hermitian input, band-limit violation, non-commuting pivot, ...).
class contract_error : public error {
public:
    using error::error;
};

// A matrix that must be invertible is numerically singular.
// Carries the offending smallest singular value.
class singular_error : public error {
public:
    singular_error(const std::string& msg, double min_sv)
        : error(msg), min_singular_value(min_sv) {}
    double min_singular_value;
};

// Problems with experiment configuration files.
class config_error : public error {
public:
    using error::error;
};

} // namespace nct

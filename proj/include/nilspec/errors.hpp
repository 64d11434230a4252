#pragma once

#include <stdexcept>

namespace nilspec {

/// A value was computed but its tail bound or quadrature tolerance could not
/// be certified at the requested level.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query went beyond the cutoff up to which an eigenvalue stream is complete.
class CompletenessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation requested at (or too close to) the pole of a zeta function.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace nilspec

#pragma once

#include <stdexcept>
#include <string>

namespace qvfe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// Energies handed to the metric assembly violate variance or variational bounds.
class InvalidEnergies : public Error {
public:
    using Error::Error;
};

class SizeExceeded : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// The requested case is handled by a different solver (e.g. the two-qubit closed forms).
class DelegationNotice : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationFailure : public Error {
public:
    using Error::Error;
};

class DegenerateRelaxation : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class TruncationInsufficient : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace qvfe

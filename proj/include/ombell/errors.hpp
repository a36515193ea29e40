#pragma once

#include <stdexcept>
#include <string>

namespace ombell {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

// Physically inadmissible or malformed parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Precondition of a pure function violated (bad index, wrong shape).
class DomainError : public Error {
public:
    using Error::Error;
};

class StiffnessError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// No detector click: the run is discarded by postselection.
class NoClickError : public Error {
public:
    using Error::Error;
};

class DegenerateStateError : public Error {
public:
    using Error::Error;
};

}  // namespace ombell

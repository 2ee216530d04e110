#pragma once

#include <stdexcept>
#include <string>

namespace gbmos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed a parameter outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input data cannot be processed (empty ROI, singular system, ...).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace gbmos

#pragma once

#include <stdexcept>
#include <string>

namespace procassess {

/// Invalid argument or violated value invariant (bad interval, unknown task tag, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input files that are missing, unreadable, or fail schema validation.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model response or prediction dump that cannot be interpreted.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transport-level failure talking to an inference endpoint.
class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace procassess

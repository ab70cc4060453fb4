#pragma once

#include <stdexcept>
#include <string>

namespace edpcgrl {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One subclass per failure family so callers (and the CLI exit-code mapping)
// can discriminate without parsing messages.
class RangeError : public Error { using Error::Error; };
class InvalidActionError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class DegenerateInputError : public Error { using Error::Error; };
class IntegrityError : public Error { using Error::Error; };
class LengthError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class SamplingError : public Error { using Error::Error; };

} // namespace edpcgrl

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sindy_lom {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input data.
class DataError : public Error {
   public:
    using Error::Error;
};

/// Shapes that do not agree with a library or model.
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A model evaluation produced a non-finite or out-of-bound state.
class DivergenceError : public Error {
   public:
    using Error::Error;
};

/// A configuration value violates its documented range.
class ConfigError : public Error {
   public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
   public:
    using Error::Error;
};

/// A serialized document is truncated, malformed, or of an unknown version.
class FormatError : public Error {
   public:
    using Error::Error;
};

namespace detail {

// 17 significant digits round-trips every finite double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

}  // namespace sindy_lom

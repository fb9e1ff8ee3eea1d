#pragma once

#include <stdexcept>
#include <string>

namespace camel {

// Base class for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected inputs: dimension mismatches, bad labels, layout mismatches.
class InputError : public Error {
public:
    using Error::Error;
};

// Configuration problems: schema violations, invalid hyperparameters. Exit 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Dataset problems: missing files, unreadable images, malformed caches. Exit 3.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace camel

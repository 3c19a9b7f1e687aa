#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cadmine {

// Exit-code mapping used by the CLI: UsageError -> 1, DataError -> 2,
// anything else -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

// Schema violations, malformed files, unsatisfiable preconditions on data.
class DataError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public DataError {
public:
    using DataError::DataError;
};

template <typename... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    (os << ... << std::forward<Args>(args));
    return os.str();
}

} // namespace cadmine

#pragma once

#include <stdexcept>
#include <string>

namespace viewrank {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed files, bad arguments, unresolvable ids. CLI exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

/// A component returned data outside its declared contract, e.g. a scorer
/// producing a value outside [0,1]. CLI exit code 2.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Transport failure talking to a remote service. CLI exit code 1.
class ServiceError : public Error {
public:
    ServiceError(const std::string& what, std::size_t chunk_index)
        : Error(what), chunk_index_(chunk_index) {}

    std::size_t chunk_index() const noexcept { return chunk_index_; }

private:
    std::size_t chunk_index_;
};

}  // namespace viewrank

#pragma once

#include <stdexcept>
#include <string>

namespace hrvem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MeshError : public Error {
public:
    enum class Kind { parse, topology, planarity, geometry };

    MeshError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace hrvem

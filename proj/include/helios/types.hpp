#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace helios {

// Planar coordinates in meters (east, north). Velocities in m/s.
using Point2 = Eigen::Vector2d;
using WindVector = Eigen::Vector2d;

using Seconds = double;
using Watts = double;
using WattsPerSquareMeter = double;
using Joules = double;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NoRouteError : Error {
    using Error::Error;
};

struct DegenerateGeometryError : Error {
    using Error::Error;
};

struct AlreadyPassedError : Error {
    using Error::Error;
};

struct OutOfRangeError : Error {
    using Error::Error;
};

struct TooShortError : Error {
    using Error::Error;
};

struct GridMismatchError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct InvariantError : Error {
    using Error::Error;
};

struct UnknownParamError : Error {
    using Error::Error;
};

}  // namespace helios

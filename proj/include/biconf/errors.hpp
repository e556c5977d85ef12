#pragma once

#include <stdexcept>
#include <string>

namespace biconf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Division by a quantity that vanishes at the base point: the sample point
// lies on the singular set of the expression (x = a, |x| = 1, ...).
struct SingularityError : Error {
    using Error::Error;
};

// Jets with different dimension, base point or scalar mode were combined.
struct ShapeError : Error {
    using Error::Error;
};

// Truncation degree too low for the requested derivative.
struct DegreeError : Error {
    using Error::Error;
};

// Point outside a chart, image outside the target chart, or a nonpositive
// conformal factor.
struct InadmissiblePointError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct SamplingError : Error {
    using Error::Error;
};

// Radial interpolation saw samples inconsistent with the assumed degree.
struct DegreeUnderestimateError : Error {
    using Error::Error;
};

// An operation was asked for a model combination it does not support.
struct ModelError : Error {
    using Error::Error;
};

}  // namespace biconf

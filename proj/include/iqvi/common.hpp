#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace iqvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, invalid parameters, bad ordering.
class InputError : public Error {
public:
    using Error::Error;
};

/// Non-finite arithmetic or a failed numerical run.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Constants fall outside the regime a theorem-level routine requires.
class ParameterError : public Error {
public:
    using Error::Error;
};

inline void requireSameDim(Eigen::Index expected, Eigen::Index got, const char* what) {
    if (expected != got) {
        throw InputError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expected) + ", got " + std::to_string(got) + ")");
    }
}

inline void requireFinite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite value");
    }
}

inline Vector makeVector(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace iqvi

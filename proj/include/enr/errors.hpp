#pragma once

#include <stdexcept>
#include <string>

namespace enr {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& w = "matrix is singular") : Error(w) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& w = "matrix is not positive definite") : Error(w) {}
};

struct NotNegativeDefinite : Error {
    explicit NotNegativeDefinite(const std::string& w = "lattice is not negative definite") : Error(w) {}
};

struct UnsupportedParameter : Error {
    explicit UnsupportedParameter(const std::string& w) : Error(w) {}
};

struct TrivialFunctional : Error {
    explicit TrivialFunctional(const std::string& w = "functional vanishes mod p on the whole lattice") : Error(w) {}
};

struct DegenerateForm : Error {
    explicit DegenerateForm(const std::string& w = "finite quadratic form is degenerate") : Error(w) {}
};

struct UnsupportedShape : Error {
    explicit UnsupportedShape(const std::string& w = "finite form has a non-elementary part") : Error(w) {}
};

struct OddLength : Error {
    explicit OddLength(const std::string& w = "p-part has odd length, no Witt type") : Error(w) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& w = "input exceeds brute-force budget") : Error(w) {}
};

struct BadPrime : Error {
    explicit BadPrime(const std::string& w = "invalid neighbor prime") : Error(w) {}
};

struct NotAnIsometry : Error {
    explicit NotAnIsometry(const std::string& w = "matrix does not preserve the bilinear form") : Error(w) {}
};

struct ConstructionFailed : Error {
    explicit ConstructionFailed(const std::string& w) : Error(w) {}
};

struct SeedNotFound : Error {
    explicit SeedNotFound(const std::string& w) : Error(w) {}
};

struct SeedRejected : Error {
    explicit SeedRejected(const std::string& w) : Error(w) {}
};

struct CacheCorrupt : Error {
    explicit CacheCorrupt(const std::string& w) : Error(w) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(w) {}
};

} // namespace enr

#pragma once

#include <stdexcept>
#include <string>

namespace noether {

struct SingularHessian : std::runtime_error {
    explicit SingularHessian(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NoSignChange : std::runtime_error {
    explicit NoSignChange(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct Singularity : std::runtime_error {
    explicit Singularity(const std::string& what) : std::runtime_error(what) {}
};

struct Collision : std::runtime_error {
    explicit Collision(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateEnergy : std::runtime_error {
    explicit DegenerateEnergy(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroAngularMomentum : std::runtime_error {
    explicit ZeroAngularMomentum(const std::string& what) : std::runtime_error(what) {}
};

struct PoleSingularity : std::runtime_error {
    explicit PoleSingularity(const std::string& what) : std::runtime_error(what) {}
};

struct SigmaZeroCrossing : std::runtime_error {
    explicit SigmaZeroCrossing(const std::string& what) : std::runtime_error(what) {}
};

struct NotApplicable : std::runtime_error {
    explicit NotApplicable(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace noether

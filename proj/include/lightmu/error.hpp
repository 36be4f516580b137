// error.hpp: exception hierarchy shared by all lightmu modules

#pragma once

#include <stdexcept>
#include <string>

namespace lightmu {

// Base of every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define LIGHTMU_DEFINE_ERROR(Name, tag)                                       \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(tag, what) {}          \
    };

LIGHTMU_DEFINE_ERROR(ArgumentError, "argument")
LIGHTMU_DEFINE_ERROR(IndexError, "index")
LIGHTMU_DEFINE_ERROR(CapacityError, "capacity")
LIGHTMU_DEFINE_ERROR(ConsistencyError, "consistency")
LIGHTMU_DEFINE_ERROR(DegeneracyError, "degeneracy")
LIGHTMU_DEFINE_ERROR(SolverError, "solver")
LIGHTMU_DEFINE_ERROR(UndefinedError, "undefined")
LIGHTMU_DEFINE_ERROR(SingularityError, "singularity")
LIGHTMU_DEFINE_ERROR(BreakdownError, "breakdown")
LIGHTMU_DEFINE_ERROR(NumericalError, "numerical")
LIGHTMU_DEFINE_ERROR(IntegrationError, "integration")
LIGHTMU_DEFINE_ERROR(FitQualityError, "fit_quality")
LIGHTMU_DEFINE_ERROR(ConfigError, "config")

#undef LIGHTMU_DEFINE_ERROR

} // namespace lightmu

#include "stratflow/stratification.hpp"

#include "stratflow/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace stratflow {

StratificationProfile StratificationProfile::exponential(double rho00, double H)
{
    return {ProfileKind::Exponential, rho00, H, 0.0};
}

StratificationProfile StratificationProfile::linear(double rho00, double a)
{
    return {ProfileKind::Linear, rho00, 0.0, a};
}

StratificationProfile StratificationProfile::constant(double rho00)
{
    return {ProfileKind::Constant, rho00, 0.0, 0.0};
}

void StratificationProfile::validate(double height) const
{
    if (!(rho00 > 0.0)) {
        throw ConfigurationError("rho00 must be positive");
    }
    switch (kind) {
    case ProfileKind::Exponential:
        if (!(H > 0.0)) {
            throw ConfigurationError("stratification scale H must be positive");
        }
        break;
    case ProfileKind::Linear:
        if (a < 0.0) {
            throw ConfigurationError("linear gradient a must be non-negative (stable)");
        }
        if (!(rho00 - a * height > 0.0)) {
            throw ConfigurationError("linear profile becomes non-positive below the lid");
        }
        break;
    case ProfileKind::Constant:
        break;
    }
}

double rho0_unchecked(const StratificationProfile& profile, double z)
{
    switch (profile.kind) {
    case ProfileKind::Exponential:
        return profile.rho00 * std::exp(-z / profile.H);
    case ProfileKind::Linear:
        return profile.rho00 - profile.a * z;
    case ProfileKind::Constant:
        break;
    }
    return profile.rho00;
}

double rho0(const StratificationProfile& profile, double z, double height)
{
    if (z < 0.0 || z > height) {
        throw DomainError("z = " + std::to_string(z) + " outside [0, " +
                          std::to_string(height) + "]");
    }
    return rho0_unchecked(profile, z);
}

double buoyancy_frequency(const StratificationProfile& profile)
{
    switch (profile.kind) {
    case ProfileKind::Exponential:
        return std::sqrt(kGravity / profile.H);
    case ProfileKind::Linear:
        return std::sqrt(kGravity * profile.a / profile.rho00);
    case ProfileKind::Constant:
        break;
    }
    return 0.0;
}

double max_linear_phase_speed(const StratificationProfile& profile, double depth)
{
    return buoyancy_frequency(profile) * depth / std::numbers::pi;
}

} // namespace stratflow

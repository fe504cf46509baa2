#pragma once

namespace stratflow {

/// Gravitational acceleration, m/s^2.
inline constexpr double kGravity = 9.81;

enum class ProfileKind { Exponential, Linear, Constant };

/// Background density rho0(z).
///   exponential: rho00 * exp(-z / H)
///   linear:      rho00 - a * z
///   constant:    rho00
struct StratificationProfile {
    ProfileKind kind = ProfileKind::Exponential;
    double rho00 = 1000.0;
    double H = 6.23;  ///< e-folding scale, m (exponential)
    double a = 0.0;   ///< gradient magnitude, kg/m^4 (linear)

    static StratificationProfile exponential(double rho00, double H);
    static StratificationProfile linear(double rho00, double a);
    static StratificationProfile constant(double rho00);

    /// Throws ConfigurationError unless the profile is positive and
    /// statically stable over [0, height].
    void validate(double height) const;
};

/// Background density at height z. `height` bounds the admissible range;
/// z outside [0, height] throws DomainError.
double rho0(const StratificationProfile& profile, double z, double height);

/// Unchecked evaluation, for callers that already know z is in range.
double rho0_unchecked(const StratificationProfile& profile, double z);

/// Brunt-Vaisala frequency N (rad/s); the linear kind is evaluated at z = 0.
double buoyancy_frequency(const StratificationProfile& profile);

/// Fastest linear internal-wave phase speed in a channel of the given
/// depth, N * depth / pi.
double max_linear_phase_speed(const StratificationProfile& profile, double depth);

} // namespace stratflow

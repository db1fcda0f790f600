#pragma once

#include <cstdint>
#include <optional>

namespace d2d {

/*!
 * Closed-form parameter bundle.
 *
 * Thresholds are in dB everywhere and are converted to linear exactly once,
 * inside sir_ccdf. The transmission probability defaults to the optimum 1/N.
 */
struct AnalyticParams
{
    double lambda_u = 0.1;  //!< density of concurrent transmitters
    int N = 4;              //!< potential D2D pairs
    double tau_db = 0;
    double R = 1;
    double alpha = 4;
    double eta = 0.9;
    std::optional<double> transmission_probability;

    void validate() const;
    double T_o() const;

    friend bool operator==(AnalyticParams const&, AnalyticParams const&) = default;
};

//! T_o (1 - T_o)^(N-1): a given pair transmits alone in a slot.
double p_nc(double T_o, int N);

double optimal_to(int N);

//! p_nc evaluated at the optimal transmission probability 1/N.
double p_nc_star(int N);

//! 2 / alpha, after checking alpha > 2.
double spatial_exponent(double alpha);

//! pi^2 delta s^delta / sin(pi delta).
double g_function(double s, double alpha);

//! pi Gamma(1 + delta) Gamma(1 - delta) s^delta; the same quantity by the gamma route.
double g_function_gamma(double s, double alpha);

//! Laplace transform of Rayleigh-faded PPP interference: exp(-lambda_u G(s, alpha)).
double laplace_interference(double s, double lambda_u, double alpha);

//! P(SIR >= tau) for a link of length R.
double sir_ccdf(AnalyticParams const& params);
double sir_ccdf(AnalyticParams const& params, double tau_db);

//! No-collision probability times SIR coverage.
double p_success(AnalyticParams const& params);

//! 1 - (1 - p)^n.
double p_at_least_one(double p_success, std::int64_t n);

/*!
 * Smallest n with p_at_least_one(p, n) >= eta.
 *
 * Throws UnreachableTargetError when p = 0 (or when the answer does not fit
 * in 64 bits); returns 1 when p = 1.
 */
std::int64_t required_slots(double p_success, double eta);
std::int64_t required_slots(AnalyticParams const& params);

}  // namespace d2d

#include "d2d/analytic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "d2d/channel.hpp"
#include "d2d/errors.hpp"

namespace d2d {

namespace {

void check_probability(double p, char const* name)
{
    if (!(p >= 0 && p <= 1))
        throw ParameterError(fmt::format("{} must lie in [0, 1], got {}", name, p));
}

void check_pairs(int N)
{
    if (N < 1)
        throw ParameterError(fmt::format("N must be >= 1, got {}", N));
}

}  // namespace

void AnalyticParams::validate() const
{
    if (!(lambda_u >= 0) || !std::isfinite(lambda_u))
        throw ParameterError(fmt::format("lambda_u must be >= 0, got {}", lambda_u));
    check_pairs(N);
    if (!std::isfinite(tau_db))
        throw ParameterError(fmt::format("tau_db must be finite, got {}", tau_db));
    if (!(R > 0) || !std::isfinite(R))
        throw ParameterError(fmt::format("R must be positive, got {}", R));
    if (!(alpha > 2) || !std::isfinite(alpha))
        throw ParameterError(fmt::format("alpha must exceed 2, got {}", alpha));
    if (!(eta > 0 && eta < 1))
        throw ParameterError(fmt::format("eta must lie in (0, 1), got {}", eta));
    if (transmission_probability)
        check_probability(*transmission_probability, "T_o");
}

double AnalyticParams::T_o() const
{
    return transmission_probability.value_or(optimal_to(N));
}

double p_nc(double T_o, int N)
{
    check_probability(T_o, "T_o");
    check_pairs(N);
    return T_o * std::pow(1 - T_o, N - 1);
}

double optimal_to(int N)
{
    check_pairs(N);
    return 1.0 / N;
}

double p_nc_star(int N)
{
    return p_nc(optimal_to(N), N);
}

double spatial_exponent(double alpha)
{
    if (!(alpha > 2) || !std::isfinite(alpha))
        throw ParameterError(
            fmt::format("alpha must exceed 2 for finite interference, got {}", alpha));
    return 2 / alpha;
}

double g_function(double s, double alpha)
{
    double const delta = spatial_exponent(alpha);
    if (!(s >= 0))
        throw ParameterError(fmt::format("Laplace argument must be >= 0, got {}", s));
    constexpr double pi = std::numbers::pi;
    return pi * pi * delta * std::pow(s, delta) / std::sin(pi * delta);
}

double g_function_gamma(double s, double alpha)
{
    double const delta = spatial_exponent(alpha);
    if (!(s >= 0))
        throw ParameterError(fmt::format("Laplace argument must be >= 0, got {}", s));
    return std::numbers::pi * std::tgamma(1 + delta) * std::tgamma(1 - delta)
           * std::pow(s, delta);
}

double laplace_interference(double s, double lambda_u, double alpha)
{
    if (!(lambda_u >= 0))
        throw ParameterError(fmt::format("lambda_u must be >= 0, got {}", lambda_u));
    return std::exp(-lambda_u * g_function(s, alpha));
}

double sir_ccdf(AnalyticParams const& params, double tau_db)
{
    params.validate();
    double const tau = db_to_linear(tau_db);
    return laplace_interference(tau * std::pow(params.R, params.alpha),
                                params.lambda_u,
                                params.alpha);
}

double sir_ccdf(AnalyticParams const& params)
{
    return sir_ccdf(params, params.tau_db);
}

double p_success(AnalyticParams const& params)
{
    params.validate();
    return p_nc(params.T_o(), params.N) * sir_ccdf(params);
}

double p_at_least_one(double p_success, std::int64_t n)
{
    check_probability(p_success, "p_success");
    if (n < 0)
        throw ParameterError(fmt::format("slot count must be >= 0, got {}", n));
    if (n == 0)
        return 0;
    if (p_success == 1)
        return 1;
    return -std::expm1(static_cast<double>(n) * std::log1p(-p_success));
}

std::int64_t required_slots(double p_success, double eta)
{
    check_probability(p_success, "p_success");
    if (!(eta > 0 && eta < 1))
        throw ParameterError(fmt::format("eta must lie in (0, 1), got {}", eta));
    if (p_success == 0)
        throw UnreachableTargetError("success probability is zero; eta is unreachable");
    if (p_success == 1)
        return 1;

    double const ratio = std::log1p(-eta) / std::log1p(-p_success);
    if (!(ratio < 1e15))
        throw UnreachableTargetError(
            fmt::format("required slot count {} exceeds the representable range", ratio));

    auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ratio)));
    // The log ratio can be off by one ulp at the boundary; settle it on the
    // same expression callers use to check coverage.
    while (p_at_least_one(p_success, n) < eta)
        ++n;
    while (n > 1 && p_at_least_one(p_success, n - 1) >= eta)
        --n;
    return n;
}

std::int64_t required_slots(AnalyticParams const& params)
{
    return required_slots(p_success(params), params.eta);
}

}  // namespace d2d

#include "d2d/channel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "d2d/errors.hpp"

namespace d2d {

void ChannelParams::validate() const
{
    if (!(alpha > 2) || !std::isfinite(alpha))
        throw ParameterError(fmt::format("alpha must exceed 2, got {}", alpha));
    if (!(shadowing_sigma_db >= 0) || !std::isfinite(shadowing_sigma_db))
        throw ParameterError(
            fmt::format("shadowing_sigma_db must be >= 0, got {}", shadowing_sigma_db));
    if (!(min_distance > 0))
        throw ParameterError(fmt::format("min_distance must be positive, got {}", min_distance));
}

void PowerConfig::validate() const
{
    if (!std::isfinite(ue_tx_power_dbm) || !std::isfinite(bs_tx_power_dbm))
        throw ParameterError("transmit powers must be finite");
}

SirSample::SirSample(double linear) : value_(linear)
{
    if (!(linear >= 0))
        throw ParameterError(fmt::format("SIR must be non-negative, got {}", linear));
}

double SirSample::db() const noexcept
{
    return linear_to_db(value_);
}

bool SirSample::passes(double tau_db) const noexcept
{
    return value_ >= db_to_linear(tau_db);
}

double db_to_linear(double db) noexcept
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) noexcept
{
    return 10.0 * std::log10(linear);
}

double path_loss(double distance, double alpha, double min_distance)
{
    if (!(distance >= min_distance))
        throw SingularityError(fmt::format(
            "link distance {} below minimum {}", distance, min_distance));
    return std::pow(distance, -alpha);
}

double sample_fading(Rng& rng)
{
    std::exponential_distribution<double> dist(1.0);
    return dist(rng);
}

double sample_shadowing(double sigma_db, Rng& rng)
{
    if (!(sigma_db >= 0))
        throw ParameterError(fmt::format("sigma_db must be >= 0, got {}", sigma_db));
    if (sigma_db == 0)
        return 1.0;
    std::normal_distribution<double> dist(0.0, sigma_db);
    return db_to_linear(dist(rng));
}

namespace {

// Path loss from a squared distance; alpha = 4 avoids pow in the hot loop.
double path_loss_sq(double d2, double alpha, double min_distance)
{
    if (!(d2 >= min_distance * min_distance))
        throw SingularityError(fmt::format(
            "link distance {} below minimum {}", std::sqrt(d2), min_distance));
    if (alpha == 4)
        return 1 / (d2 * d2);
    return std::pow(d2, -alpha / 2);
}

double draw_gain(ChannelParams const& params, Rng& rng)
{
    double g = sample_fading(rng);
    if (params.shadowing_enabled)
        g *= sample_shadowing(params.shadowing_sigma_db, rng);
    return g;
}

}  // namespace

LinkGains draw_link_gains(std::size_t interferer_count, ChannelParams const& params, Rng& rng)
{
    LinkGains gains;
    gains.signal = draw_gain(params, rng);
    gains.interferers.resize(interferer_count);
    for (auto& g : gains.interferers)
        g = draw_gain(params, rng);
    return gains;
}

SirSample evaluate_sir(Point tx,
                       Point rx,
                       std::span<Point const> interferers,
                       LinkGains const& gains,
                       ChannelParams const& params,
                       double tx_power_dbm)
{
    if (gains.interferers.size() != interferers.size())
        throw ParameterError(fmt::format("{} interferer gains for {} interferers",
                                         gains.interferers.size(),
                                         interferers.size()));
    double const power = db_to_linear(tx_power_dbm);
    double const signal = power * gains.signal
                          * path_loss_sq(distance_squared(tx, rx), params.alpha, params.min_distance);
    if (interferers.empty())
        return SirSample::infinite();

    double interference = 0;
    for (std::size_t i = 0; i < interferers.size(); ++i)
    {
        interference += power * gains.interferers[i]
                        * path_loss_sq(distance_squared(interferers[i], rx),
                                       params.alpha,
                                       params.min_distance);
    }
    if (interference == 0)
        return SirSample::infinite();
    return SirSample(signal / interference);
}

SirSample compute_sir(Point tx,
                      Point rx,
                      std::span<Point const> interferers,
                      ChannelParams const& params,
                      Rng& rng)
{
    LinkGains const gains = draw_link_gains(interferers.size(), params, rng);
    return evaluate_sir(tx, rx, interferers, gains, params);
}

}  // namespace d2d

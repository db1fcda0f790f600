#pragma once

#include <limits>
#include <span>
#include <vector>

#include "d2d/geometry.hpp"
#include "d2d/random.hpp"

namespace d2d {

inline constexpr double kDefaultMinDistance = 1e-6;

struct ChannelParams
{
    double alpha = 4;  //!< path-loss exponent, must exceed 2
    double shadowing_sigma_db = 4;
    bool shadowing_enabled = false;
    InterfererGeometry interferer_geometry = InterfererGeometry::whole_plane;
    double min_distance = kDefaultMinDistance;

    void validate() const;
    friend bool operator==(ChannelParams const&, ChannelParams const&) = default;
};

//! Transmit powers. Every transmitter uses the UE power, so it cancels in SIR.
struct PowerConfig
{
    double ue_tx_power_dbm = 23;
    double bs_tx_power_dbm = 40;

    void validate() const;
    friend bool operator==(PowerConfig const&, PowerConfig const&) = default;
};

//! Linear SIR; +infinity encodes "no interferers".
class SirSample
{
  public:
    constexpr SirSample() = default;
    explicit SirSample(double linear);

    static constexpr SirSample infinite()
    {
        SirSample s;
        s.value_ = std::numeric_limits<double>::infinity();
        return s;
    }

    double value() const noexcept { return value_; }
    bool is_infinite() const noexcept { return value_ == std::numeric_limits<double>::infinity(); }
    double db() const noexcept;
    bool passes(double tau_db) const noexcept;

    friend bool operator==(SirSample const&, SirSample const&) = default;

  private:
    double value_ = 0;
};

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

//! distance^-alpha; throws SingularityError below min_distance.
double path_loss(double distance, double alpha, double min_distance = kDefaultMinDistance);

//! Rayleigh fading power: Exponential(mean 1).
double sample_fading(Rng& rng);

//! Log-normal shadowing multiplier 10^(g/10), g ~ N(0, sigma_db^2).
double sample_shadowing(double sigma_db, Rng& rng);

//! Per-link power gains (fading times shadowing) for one evaluation.
struct LinkGains
{
    double signal = 1;
    std::vector<double> interferers;
};

//! Fresh i.i.d. gains: signal link first, then each interferer in order.
LinkGains draw_link_gains(std::size_t interferer_count, ChannelParams const& params, Rng& rng);

//! SIR at rx for the given gains; tx power applies equally to every link.
SirSample evaluate_sir(Point tx,
                       Point rx,
                       std::span<Point const> interferers,
                       LinkGains const& gains,
                       ChannelParams const& params,
                       double tx_power_dbm = 0);

SirSample compute_sir(Point tx,
                      Point rx,
                      std::span<Point const> interferers,
                      ChannelParams const& params,
                      Rng& rng);

}  // namespace d2d

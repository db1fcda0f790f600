#include "d2d/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "d2d/errors.hpp"

namespace d2d {

ShortfallError::ShortfallError(int found, int requested)
    : std::runtime_error(fmt::format(
        "pair shortfall: {} qualifying pairs, {} requested", found, requested))
    , found_(found)
    , requested_(requested)
{
}

double distance_squared(Point a, Point b) noexcept
{
    double const dx = a.x - b.x;
    double const dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Point a, Point b) noexcept
{
    return std::sqrt(distance_squared(a, b));
}

double Window::area() const noexcept
{
    return std::numbers::pi * radius * radius;
}

bool Window::contains(Point p) const noexcept
{
    return distance_squared(p, center) <= radius * radius;
}

void Window::validate() const
{
    if (!(radius > 0) || !std::isfinite(radius))
        throw ParameterError(fmt::format("window radius must be positive, got {}", radius));
}

namespace {

// Rejection from the bounding square; cheaper than polar sampling here and
// exact for the uniform law on the annulus.
Point uniform_in_annulus(Window const& w, double inner, Rng& rng)
{
    std::uniform_real_distribution<double> coord(-w.radius, w.radius);
    double const lo2 = inner * inner;
    double const hi2 = w.radius * w.radius;
    for (;;)
    {
        double const dx = coord(rng);
        double const dy = coord(rng);
        double const d2 = dx * dx + dy * dy;
        if (d2 > lo2 && d2 <= hi2)
            return {w.center.x + dx, w.center.y + dy};
    }
}

}  // namespace

std::vector<Point>
sample_ppp_annulus(double density, Window const& window, double inner_radius, Rng& rng)
{
    if (!(density >= 0) || !std::isfinite(density))
        throw ParameterError(fmt::format("PPP density must be >= 0, got {}", density));
    window.validate();
    if (!(inner_radius >= 0) || inner_radius >= window.radius)
        throw ParameterError(fmt::format(
            "inner radius {} must lie in [0, {})", inner_radius, window.radius));

    std::vector<Point> points;
    if (density == 0)
        return points;

    double const area = std::numbers::pi
                        * (window.radius * window.radius - inner_radius * inner_radius);
    std::poisson_distribution<long> count_dist(density * area);
    long const count = count_dist(rng);
    points.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
    {
        points.push_back(uniform_in_annulus(window, inner_radius, rng));
    }
    return points;
}

std::vector<Point> sample_ppp(double density, Window const& window, Rng& rng)
{
    return sample_ppp_annulus(density, window, 0.0, rng);
}

std::size_t nearest_index(std::span<Point const> points, Point origin)
{
    if (points.empty())
        throw ParameterError("nearest point requested from an empty set");
    std::size_t best = 0;
    double best_d2 = distance_squared(points[0], origin);
    for (std::size_t i = 1; i < points.size(); ++i)
    {
        double const d2 = distance_squared(points[i], origin);
        if (d2 < best_d2)
        {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

Point representative_cell(std::span<Point const> bs_points, Point origin)
{
    if (bs_points.empty())
        throw ParameterError("representative cell needs at least one BS");
    return bs_points[nearest_index(bs_points, origin)];
}

std::vector<D2DPair>
pair_users(std::span<Point const> ue_points, double distance_threshold, int count)
{
    if (!(distance_threshold > 0))
        throw ParameterError(
            fmt::format("pairing threshold must be positive, got {}", distance_threshold));

    std::vector<D2DPair> pairs;
    if (count <= 0)
        return pairs;

    std::size_t const n = ue_points.size();
    std::vector<bool> matched(n, false);
    double const threshold2 = distance_threshold * distance_threshold;

    for (std::size_t i = 0; i < n && static_cast<int>(pairs.size()) < count; ++i)
    {
        if (matched[i])
            continue;
        std::size_t best = n;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j == i || matched[j])
                continue;
            double const d2 = distance_squared(ue_points[i], ue_points[j]);
            if (d2 < best_d2)
            {
                best = j;
                best_d2 = d2;
            }
        }
        if (best == n)
            break;
        if (best_d2 > threshold2 || best_d2 == 0)
            continue;

        matched[i] = matched[best] = true;
        D2DPair pair;
        pair.id = static_cast<int>(pairs.size()) + 1;
        pair.tx = ue_points[i];
        pair.rx = ue_points[best];
        pair.separation = distance(pair.tx, pair.rx);
        pairs.push_back(pair);
    }

    if (static_cast<int>(pairs.size()) < count)
        throw ShortfallError(static_cast<int>(pairs.size()), count);
    return pairs;
}

NetworkRealization place_fixed_pair(double R,
                                    double interferer_density,
                                    Window const& window,
                                    InterfererGeometry geometry,
                                    Rng& rng)
{
    window.validate();
    if (!(R > 0) || R >= window.radius)
        throw ParameterError(fmt::format(
            "fixed pair distance R={} must lie in (0, window radius {})", R, window.radius));

    NetworkRealization out;
    out.window = window;

    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    double const theta = angle(rng);
    D2DPair pair;
    pair.id = 1;
    pair.rx = window.center;
    pair.tx = {window.center.x + R * std::cos(theta), window.center.y + R * std::sin(theta)};
    pair.separation = R;
    out.pairs.push_back(pair);

    double const inner = geometry == InterfererGeometry::guard_zone ? R : 0.0;
    out.ue_points = sample_ppp_annulus(interferer_density, window, inner, rng);
    return out;
}

double truncation_radius(double link_distance, double density)
{
    double radius = 10 * link_distance;
    if (density > 0)
        radius = std::max(radius, 5 / std::sqrt(density));
    return radius;
}

}  // namespace d2d

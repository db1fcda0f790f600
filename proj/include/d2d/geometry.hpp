#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2d/random.hpp"

namespace d2d {

struct Point
{
    double x = 0;
    double y = 0;

    friend bool operator==(Point const&, Point const&) = default;
};

double distance(Point a, Point b) noexcept;
double distance_squared(Point a, Point b) noexcept;

//! Disc-shaped simulation window standing in for the unbounded plane.
struct Window
{
    Point center;
    double radius = 1;

    double area() const noexcept;
    bool contains(Point p) const noexcept;
    void validate() const;
};

struct D2DPair
{
    int id = 0;
    Point tx;
    Point rx;
    double separation = 0;
};

//! Where interferers may fall relative to the receiver of interest.
enum class InterfererGeometry
{
    whole_plane,  //!< anywhere in the window
    guard_zone,   //!< outside the disc of radius R around the receiver
};

/*!
 * One sampled spatial snapshot.
 *
 * In fixed-pair mode \c ue_points holds the interferer field around the
 * single pair; in paired-users mode the pairs are drawn from \c ue_points.
 */
struct NetworkRealization
{
    std::vector<Point> bs_points;
    std::vector<Point> ue_points;
    std::vector<D2DPair> pairs;
    Window window;
    std::uint64_t seed = 0;
};

// Homogeneous PPP on a disc: Poisson count, then i.i.d. uniform placement.
std::vector<Point> sample_ppp(double density, Window const& window, Rng& rng);

// PPP restricted to the annulus inner_radius < |p - center| <= radius.
std::vector<Point>
sample_ppp_annulus(double density, Window const& window, double inner_radius, Rng& rng);

//! Index of the point nearest to origin; ties go to the lowest index.
std::size_t nearest_index(std::span<Point const> points, Point origin);

//! Serving BS of the representative cell: nearest-BS association.
Point representative_cell(std::span<Point const> bs_points, Point origin);

/*!
 * Greedy nearest-neighbour matching of user equipments into D2D pairs.
 *
 * UEs are visited in index order; each unmatched UE is matched with its
 * nearest unmatched neighbour when that neighbour is within the threshold.
 * Pair ids run 1..count in formation order. Throws ShortfallError when fewer
 * than \p count pairs qualify.
 */
std::vector<D2DPair>
pair_users(std::span<Point const> ue_points, double distance_threshold, int count);

/*!
 * Single pair with the receiver at the window center and the transmitter at
 * exactly distance R, plus an interferer field of the given density.
 */
NetworkRealization place_fixed_pair(double R,
                                    double interferer_density,
                                    Window const& window,
                                    InterfererGeometry geometry,
                                    Rng& rng);

//! Smallest truncation radius allowed for a link of the given length.
double truncation_radius(double link_distance, double density);

}  // namespace d2d

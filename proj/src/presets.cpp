#include "d2d/config.hpp"

#include <fmt/format.h>

namespace d2d {

namespace {

std::vector<double> grid(double from, double to, double step)
{
    std::vector<double> out;
    for (int i = 0; from + i * step <= to + 1e-9; ++i)
        out.push_back(from + i * step);
    return out;
}

// Normalized geometry: R = 1, alpha = 4. Densities are chosen so that
// lambda_u * G(tau R^alpha) stays O(1); at the literal 30 m link every
// coverage probability underflows (see the table1 preset).
ExperimentConfig normalized()
{
    ExperimentConfig c;
    c.analytic.R = 1;
    c.set_alpha(4);
    c.analytic.eta = 0.9;
    c.lambda_b = 0.2;
    return c;
}

std::vector<Series> per_pair_count(ExperimentConfig const& base)
{
    std::vector<Series> out;
    for (int n : {2, 4, 6, 8})
    {
        ExperimentConfig c = base;
        c.analytic.N = n;
        out.push_back({fmt::format("N{}", n), c});
    }
    return out;
}

}  // namespace

std::vector<std::string_view> preset_names()
{
    return {"default", "table1", "fig2", "fig3", "fig4", "fig5", "fig6"};
}

std::vector<std::string_view> figure_names()
{
    return {"fig2", "fig3", "fig4", "fig5", "fig6"};
}

std::vector<Series> preset(std::string_view name)
{
    if (name == "default")
        return {{"default", ExperimentConfig{}}};

    if (name == "table1")
    {
        // Literal parameter table; coverage is ~0 throughout.
        ExperimentConfig c;
        c.analytic.R = 30;
        c.set_alpha(4);
        c.analytic.N = 2;
        c.analytic.eta = 0.9;
        c.analytic.tau_db = 20;
        c.lambda_b = 0.2;
        c.power = {23, 40};
        c.channel.shadowing_enabled = true;
        c.channel.shadowing_sigma_db = 4;
        c.trials = 1000;
        c.slots_cap = 10;
        c.tau_grid_db = grid(-20, 20, 5);
        c.sweep = {SweepParam::lambda_u, std::vector<double>{0.001, 0.01, 0.1}};
        return {{"table1", c}};
    }

    if (name == "fig2")
    {
        // SIR coverage against density, several thresholds.
        ExperimentConfig c = normalized();
        c.analytic.N = 2;
        c.analytic.tau_db = -10;
        c.trials = 10000;
        c.tau_grid_db = grid(-20, 20, 5);
        c.sweep = {SweepParam::lambda_u,
                   std::vector<double>{0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0}};
        return {{"fig2", c}};
    }

    if (name == "fig3")
    {
        // SIR coverage against threshold at two densities.
        ExperimentConfig c = normalized();
        c.analytic.N = 2;
        c.analytic.tau_db = -10;
        c.trials = 10000;
        c.tau_grid_db = grid(-20, 20, 2);
        c.sweep = {SweepParam::lambda_u, std::vector<double>{0.5, 0.7}};
        return {{"fig3", c}};
    }

    if (name == "fig4" || name == "fig6")
    {
        // Success probability / required slots against density at tau = 20 dB.
        ExperimentConfig c = normalized();
        c.analytic.tau_db = 20;
        c.trials = name == "fig4" ? 2000 : 1000;
        c.tau_grid_db = {20};
        c.sweep = {SweepParam::lambda_u,
                   std::vector<double>{0.001, 0.002, 0.005, 0.01, 0.02, 0.05}};
        return per_pair_count(c);
    }

    if (name == "fig5")
    {
        // Slots-to-success CDF, one curve per N. The density is scaled down
        // by 100 from the figure caption so coverage at 20 dB is not ~0.
        ExperimentConfig c = normalized();
        c.analytic.lambda_u = 0.004;
        c.analytic.tau_db = 20;
        c.trials = 2000;
        c.tau_grid_db = {20};
        c.sweep = {SweepParam::N, std::vector<double>{2, 4, 6, 8}};
        return {{"fig5", c}};
    }

    throw ConfigError(fmt::format("unknown preset '{}'", name), "preset");
}

}  // namespace d2d

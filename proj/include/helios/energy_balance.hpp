#pragma once

#include <vector>

#include <Eigen/Core>

#include "helios/cloud_field.hpp"
#include "helios/types.hpp"

namespace helios {

struct PvPlant {
    int id = 0;
    Point2 position{0.0, 0.0};
    double area_s = 0.0;   // m^2
    double coeff_k = 0.0;  // conversion efficiency, (0, 1]
    Watts rated_power = 0.0;
};

struct Load {
    int id = 0;
    Point2 position{0.0, 0.0};
    Watts base_power = 0.0;
    Watts lighting_coeff = 0.0;  // extra power at full occlusion
    double hvac_coeff = 0.0;     // W per degC of setpoint deviation
    double t_setpoint = 20.0;    // degC
    Watts deferrable_power = 0.0;
    Seconds deferrable_window = 0.0;  // restoration must finish within this
};

// Uniformly sampled series: sample i sits at t0 + i*dt and owns the slab
// [t_i, t_i + dt) for rectangle-rule energy accounting.
struct PowerSeries {
    Seconds t0 = 0.0;
    Seconds dt = 1.0;
    Eigen::VectorXd p;

    Eigen::Index size() const { return p.size(); }
    Seconds t(Eigen::Index i) const { return t0 + static_cast<double>(i) * dt; }
    Seconds t_back() const { return t(p.size() - 1); }
    bool same_grid(const PowerSeries& other) const {
        return t0 == other.t0 && dt == other.dt && p.size() == other.p.size();
    }
};

// Piecewise constant ambient temperature: drops by cloud_step_c while local
// occlusion exceeds 0.5.
struct TemperatureProfile {
    double base_c = 20.0;
    double cloud_step_c = 0.0;

    double at(double occlusion) const { return occlusion > 0.5 ? base_c - cloud_step_c : base_c; }
};

// min(k * S * I, rated_power)
Watts pv_power(const PvPlant& plant, WattsPerSquareMeter irradiance);

// coeff_k * area_S * trapezoidal integral of the sampled irradiance over
// [t0, t1]; exact for piecewise-linear integrands on the sample grid.
// Throws OutOfRangeError when the bounds leave the series span.
Joules delta_energy(const PvPlant& plant, const PowerSeries& irradiance, Seconds t0, Seconds t1);

// base + lighting_coeff * occlusion + hvac_coeff * |temperature - setpoint|,
// occlusion = 1 - irradiance/clear_sky_now (0 when the sky is dark).
Watts load_power(const Load& load, WattsPerSquareMeter irradiance,
                 WattsPerSquareMeter clear_sky_now, double temperature);

// Sum of load draws minus sum of plant outputs, each at its own position.
// Positive = net consumption.
Watts net_power(const std::vector<Load>& loads, const std::vector<PvPlant>& plants,
                const CloudField& field, const TemperatureProfile& temperature, Seconds t);

// max |p[i+1] - p[i]| / dt; throws TooShortError below 2 samples.
double ramp_metric(const PowerSeries& series);

// Rectangle-rule total: sum(p) * dt. The conserved quantity for load
// deferral bookkeeping.
Joules series_energy(const PowerSeries& series);

}  // namespace helios

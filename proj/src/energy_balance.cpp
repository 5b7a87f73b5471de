#include "helios/energy_balance.hpp"

#include <algorithm>
#include <cmath>

namespace helios {

Watts pv_power(const PvPlant& plant, WattsPerSquareMeter irradiance) {
    return std::min(plant.coeff_k * plant.area_s * irradiance, plant.rated_power);
}

namespace {

double interp(const PowerSeries& s, Seconds t) {
    const double u = (t - s.t0) / s.dt;
    const auto i = std::min(static_cast<Eigen::Index>(std::floor(u)), s.size() - 2);
    const double frac = u - static_cast<double>(i);
    return s.p(i) + frac * (s.p(i + 1) - s.p(i));
}

// Integral of the piecewise-linear interpolant between two points inside
// one sample interval or across many.
double integrate_linear(const PowerSeries& s, Seconds a, Seconds b) {
    const auto ia = static_cast<Eigen::Index>(std::floor((a - s.t0) / s.dt));
    const auto ib = static_cast<Eigen::Index>(std::ceil((b - s.t0) / s.dt));
    const Eigen::Index first = std::clamp<Eigen::Index>(ia, 0, s.size() - 1);
    const Eigen::Index last = std::clamp<Eigen::Index>(ib, 0, s.size() - 1);

    if (last <= first + 1) return 0.5 * (interp(s, a) + interp(s, b)) * (b - a);

    double total = 0.5 * (interp(s, a) + s.p(first + 1)) * (s.t(first + 1) - a);
    for (Eigen::Index i = first + 1; i + 1 < last; ++i)
        total += 0.5 * (s.p(i) + s.p(i + 1)) * s.dt;
    total += 0.5 * (s.p(last - 1) + interp(s, b)) * (b - s.t(last - 1));
    return total;
}

}  // namespace

Joules delta_energy(const PvPlant& plant, const PowerSeries& irradiance, Seconds t0, Seconds t1) {
    if (irradiance.size() < 2) throw TooShortError("irradiance series needs at least 2 samples");
    if (!(t0 < t1)) throw OutOfRangeError("integration bounds must satisfy t0 < t1");
    if (t0 < irradiance.t0 || t1 > irradiance.t_back())
        throw OutOfRangeError("integration bounds exceed the sampled span");
    return plant.coeff_k * plant.area_s * integrate_linear(irradiance, t0, t1);
}

Watts load_power(const Load& load, WattsPerSquareMeter irradiance,
                 WattsPerSquareMeter clear_sky_now, double temperature) {
    const double occlusion = clear_sky_now > 0.0 ? 1.0 - irradiance / clear_sky_now : 0.0;
    return load.base_power + load.lighting_coeff * occlusion +
           load.hvac_coeff * std::abs(temperature - load.t_setpoint);
}

Watts net_power(const std::vector<Load>& loads, const std::vector<PvPlant>& plants,
                const CloudField& field, const TemperatureProfile& temperature, Seconds t) {
    const double clear = clear_sky_irradiance(field.clear_sky, t) * field.ambient;
    Watts total = 0.0;
    for (const Load& load : loads) {
        const double irr = irradiance_at(field, load.position, t);
        const double occlusion = clear > 0.0 ? 1.0 - irr / clear : 0.0;
        total += load_power(load, irr, clear, temperature.at(occlusion));
    }
    for (const PvPlant& plant : plants)
        total -= pv_power(plant, irradiance_at(field, plant.position, t));
    return total;
}

double ramp_metric(const PowerSeries& series) {
    if (series.size() < 2) throw TooShortError("ramp metric needs at least 2 samples");
    return (series.p.tail(series.size() - 1) - series.p.head(series.size() - 1))
               .cwiseAbs()
               .maxCoeff() /
           series.dt;
}

Joules series_energy(const PowerSeries& series) { return series.p.sum() * series.dt; }

}  // namespace helios

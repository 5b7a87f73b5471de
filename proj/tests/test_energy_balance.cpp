#include <doctest.h>

#include <cmath>
#include <random>

#include "helios/energy_balance.hpp"

using namespace helios;

namespace {

constexpr double kPi = 3.14159265358979323846;

PvPlant plant_of(double k, double s, double rated) {
    PvPlant p;
    p.id = 1;
    p.area_s = s;
    p.coeff_k = k;
    p.rated_power = rated;
    return p;
}

PowerSeries constant_series(double value, double t0, double dt, Eigen::Index n) {
    PowerSeries s;
    s.t0 = t0;
    s.dt = dt;
    s.p = Eigen::VectorXd::Constant(n, value);
    return s;
}

// Half-sine irradiance over [0, span] sampled every dt, endpoints included.
PowerSeries half_sine_series(double peak, double span, double dt) {
    PowerSeries s;
    s.t0 = 0.0;
    s.dt = dt;
    const auto n = static_cast<Eigen::Index>(std::llround(span / dt)) + 1;
    s.p.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.p(i) = peak * std::sin(kPi * s.t(i) / span);
    return s;
}

}  // namespace

TEST_CASE("pv_power scales irradiance and clips at the rating") {
    CHECK(pv_power(plant_of(0.15, 10.0, 10000.0), 0.0) == 0.0);
    CHECK(pv_power(plant_of(0.15, 10.0, 10000.0), 1000.0) == 1500.0);
    CHECK(pv_power(plant_of(0.2, 10000.0, 1.0e6), 800.0) == 1.0e6);
}

TEST_CASE("pv_power never exceeds the rating") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> irr(0.0, 1400.0);
    const PvPlant p = plant_of(0.18, 5000.0, 8.0e5);
    for (int i = 0; i < 200; ++i) CHECK(pv_power(p, irr(rng)) <= p.rated_power);
}

TEST_CASE("constant irradiance for an hour yields 5.4e6 J") {
    const PowerSeries irr = constant_series(1000.0, 0.0, 600.0, 7);
    const double e = delta_energy(plant_of(0.15, 10.0, 1.0e9), irr, 0.0, 3600.0);
    CHECK(e == doctest::Approx(5.4e6).epsilon(1e-12));
}

TEST_CASE("zero irradiance integrates to zero") {
    const PowerSeries irr = constant_series(0.0, 0.0, 100.0, 11);
    CHECK(delta_energy(plant_of(0.15, 10.0, 1.0e9), irr, 0.0, 1000.0) == 0.0);
}

TEST_CASE("a linear ramp integrates to the triangle area") {
    PowerSeries irr;
    irr.t0 = 0.0;
    irr.dt = 100.0;
    irr.p.resize(7);
    for (Eigen::Index i = 0; i < 7; ++i)
        irr.p(i) = std::min(irr.t(i), 600.0) * (1000.0 / 600.0);
    const double e = delta_energy(plant_of(1.0, 1.0, 1.0e9), irr, 0.0, 600.0);
    CHECK(e == doctest::Approx(3.0e5).epsilon(1e-12));
}

TEST_CASE("partial intervals integrate the interpolant exactly") {
    const PowerSeries irr = constant_series(1000.0, 0.0, 600.0, 7);
    const PvPlant p = plant_of(0.15, 10.0, 1.0e9);
    CHECK(delta_energy(p, irr, 300.0, 900.0) == doctest::Approx(9.0e5).epsilon(1e-12));
    CHECK(delta_energy(p, irr, 450.0, 550.0) == doctest::Approx(1.5e5).epsilon(1e-12));
}

TEST_CASE("integration bounds are validated") {
    const PowerSeries irr = constant_series(500.0, 100.0, 10.0, 11);
    const PvPlant p = plant_of(0.1, 1.0, 1.0e9);
    CHECK_THROWS_AS((void)delta_energy(p, irr, 50.0, 150.0), OutOfRangeError);
    CHECK_THROWS_AS((void)delta_energy(p, irr, 150.0, 250.0), OutOfRangeError);
    CHECK_THROWS_AS((void)delta_energy(p, irr, 150.0, 150.0), OutOfRangeError);
    CHECK_THROWS_AS((void)delta_energy(p, irr, 180.0, 120.0), OutOfRangeError);

    PowerSeries lone = constant_series(500.0, 0.0, 10.0, 1);
    CHECK_THROWS_AS((void)delta_energy(p, lone, 0.0, 0.0), TooShortError);
}

TEST_CASE("delta_energy is additive across a split point") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> level(0.0, 1000.0);
    const PvPlant p = plant_of(0.2, 50.0, 1.0e12);
    for (int trial = 0; trial < 30; ++trial) {
        PowerSeries irr;
        irr.t0 = 0.0;
        irr.dt = 60.0;
        irr.p.resize(31);
        for (Eigen::Index i = 0; i < 31; ++i) irr.p(i) = level(rng);

        std::uniform_real_distribution<double> pick(0.0, 1800.0);
        double a = pick(rng), b = pick(rng), c = pick(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        if (!(a < b && b < c)) continue;

        const double whole = delta_energy(p, irr, a, c);
        const double split = delta_energy(p, irr, a, b) + delta_energy(p, irr, b, c);
        CHECK(split == doctest::Approx(whole).epsilon(1e-9));
    }
}

TEST_CASE("delta_energy is linear in the efficiency and the area") {
    const PowerSeries irr = half_sine_series(900.0, 1200.0, 60.0);
    const double base = delta_energy(plant_of(0.1, 100.0, 1.0e12), irr, 0.0, 1200.0);
    CHECK(delta_energy(plant_of(0.3, 100.0, 1.0e12), irr, 0.0, 1200.0) ==
          doctest::Approx(3.0 * base).epsilon(1e-12));
    CHECK(delta_energy(plant_of(0.1, 700.0, 1.0e12), irr, 0.0, 1200.0) ==
          doctest::Approx(7.0 * base).epsilon(1e-12));
}

TEST_CASE("halving the step shrinks the quadrature error fourfold") {
    const PvPlant p = plant_of(1.0, 1.0, 1.0e12);
    const double span = 3600.0;
    const double exact = 1000.0 * 2.0 * span / kPi;  // integral of the half-sine

    const double e1 = std::abs(
        delta_energy(p, half_sine_series(1000.0, span, 60.0), 0.0, span) - exact);
    const double e2 = std::abs(
        delta_energy(p, half_sine_series(1000.0, span, 30.0), 0.0, span) - exact);
    const double e3 = std::abs(
        delta_energy(p, half_sine_series(1000.0, span, 15.0), 0.0, span) - exact);

    CHECK(e1 / e2 > 3.6);
    CHECK(e1 / e2 < 4.4);
    CHECK(e2 / e3 > 3.6);
    CHECK(e2 / e3 < 4.4);
}

TEST_CASE("load_power combines base, lighting, and hvac terms") {
    Load l;
    l.base_power = 1000.0;
    l.lighting_coeff = 200.0;
    l.hvac_coeff = 50.0;
    l.t_setpoint = 20.0;

    CHECK(load_power(l, 800.0, 800.0, 20.0) == 1000.0);   // clear sky at setpoint
    CHECK(load_power(l, 0.0, 800.0, 20.0) == 1200.0);     // full occlusion
    CHECK(load_power(l, 400.0, 800.0, 22.0) == 1200.0);   // 1000 + 100 + 100
    CHECK(load_power(l, 400.0, 800.0, 18.0) == 1200.0);   // cooling and heating match
    CHECK(load_power(l, 0.0, 0.0, 20.0) == 1000.0);       // dark sky: occlusion 0
}

TEST_CASE("load_power never drops below the base draw") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    std::uniform_real_distribution<double> temp(-10.0, 45.0);
    Load l;
    l.base_power = 750.0;
    l.lighting_coeff = 120.0;
    l.hvac_coeff = 35.0;
    for (int i = 0; i < 200; ++i) {
        const double clear = 1000.0 * frac(rng);
        const double irr = clear * frac(rng);
        CHECK(load_power(l, irr, clear, temp(rng)) >= l.base_power);
    }
}

TEST_CASE("temperature profile steps down under heavy occlusion") {
    TemperatureProfile tp;
    tp.base_c = 18.0;
    tp.cloud_step_c = 3.0;
    CHECK(tp.at(0.4) == 18.0);
    CHECK(tp.at(0.6) == 15.0);
}

TEST_CASE("net_power is loads minus plants") {
    CloudField field;
    field.clear_sky = {1000.0, 21600.0, 64800.0};
    const TemperatureProfile tp;

    PvPlant p = plant_of(0.15, 10.0, 1.0e4);
    p.position = {0.0, 0.0};
    CHECK(net_power({}, {p}, field, tp, 43200.0) == -1500.0);

    Load a, b;
    a.base_power = 2000.0;
    b.base_power = 1000.0;
    CHECK(net_power({a, b}, {p}, field, tp, 43200.0) == 1500.0);
}

TEST_CASE("a cloud over plant and load raises net by drop plus lighting") {
    CloudField field;
    field.clear_sky = {1000.0, 21600.0, 64800.0};
    const TemperatureProfile tp;

    PvPlant p = plant_of(0.15, 10.0, 1.0e9);
    p.position = {0.0, 0.0};
    Load l;
    l.position = {10.0, 0.0};
    l.base_power = 1000.0;
    l.lighting_coeff = 200.0;

    const double before = net_power({l}, {p}, field, tp, 43200.0);
    field.discs.push_back({{0.0, 0.0}, 50.0, 0.4, {0.0, 0.0}});
    const double after = net_power({l}, {p}, field, tp, 43200.0);

    const double plant_drop = 1500.0 - 0.15 * 10.0 * 600.0;
    const double lighting = 200.0 * 0.4;
    CHECK(after - before == doctest::Approx(plant_drop + lighting).epsilon(1e-12));
}

TEST_CASE("an unclipped 1 MW plant drops by exactly the disc opacity") {
    CloudField field;
    field.clear_sky = {1000.0, 21600.0, 64800.0};
    PvPlant p = plant_of(0.1, 10000.0, 1.0e6);  // k*S*i_max equals the rating
    p.position = {0.0, 0.0};

    const double pre = pv_power(p, irradiance_at(field, p.position, 43200.0));
    CHECK(pre == 1.0e6);
    for (double opacity : {0.1, 0.2, 0.3, 0.4}) {
        CloudField covered = field;
        covered.discs.push_back({{0.0, 0.0}, 100.0, opacity, {0.0, 0.0}});
        const double now = pv_power(p, irradiance_at(covered, p.position, 43200.0));
        const double drop = (pre - now) / pre;
        CHECK(drop == doctest::Approx(opacity).epsilon(1e-6));
    }
}

TEST_CASE("ramp_metric is the worst per-step gradient") {
    PowerSeries s = constant_series(500.0, 0.0, 10.0, 8);
    CHECK(ramp_metric(s) == 0.0);

    s.p(4) = 1500.0;  // one 1000 W step at dt 10
    CHECK(ramp_metric(s) == 100.0);

    PowerSeries rising;
    rising.t0 = 0.0;
    rising.dt = 5.0;
    rising.p.resize(6);
    rising.p << 0.0, 10.0, 30.0, 60.0, 100.0, 150.0;
    CHECK(ramp_metric(rising) == 10.0);  // largest step is 50 W over 5 s

    PowerSeries lone = constant_series(1.0, 0.0, 10.0, 1);
    CHECK_THROWS_AS((void)ramp_metric(lone), TooShortError);
}

TEST_CASE("series_energy is the rectangle-rule sum") {
    PowerSeries s;
    s.t0 = 0.0;
    s.dt = 10.0;
    s.p.resize(3);
    s.p << 1.0, 2.0, 3.0;
    CHECK(series_energy(s) == 60.0);
}

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "helios/control.hpp"

using namespace helios;

namespace {

Load deferrable_load(int id, double capacity, double window = 0.0) {
    Load l;
    l.id = id;
    l.base_power = 2.0e6;
    l.deferrable_power = capacity;
    l.deferrable_window = window;
    return l;
}

PvPlant plant_with_id(int id) {
    PvPlant p;
    p.id = id;
    p.area_s = 10000.0;
    p.coeff_k = 0.1;
    p.rated_power = 1.0e6;
    return p;
}

RampForecast forecast_of(int target, double t_arrival, double depth, double confidence) {
    RampForecast fc;
    fc.target_id = target;
    fc.t_arrival = t_arrival;
    fc.depth = depth;
    fc.confidence = confidence;
    return fc;
}

ControlPolicy wide_policy() {
    ControlPolicy policy;
    policy.lead_time = 600.0;
    policy.spread = 600.0;
    policy.confidence_threshold = 0.5;
    return policy;
}

double planned_energy(const std::vector<ControlAction>& actions, int load_id) {
    double joules = 0.0;
    for (const ControlAction& a : actions)
        if (a.load_id == load_id) joules += a.power_delta * a.duration;
    return joules;
}

double planned_magnitude(const std::vector<ControlAction>& actions, int load_id) {
    double joules = 0.0;
    for (const ControlAction& a : actions)
        if (a.load_id == load_id) joules += std::abs(a.power_delta) * a.duration;
    return joules;
}

PowerSeries step_series(double before, double after, Eigen::Index step_at, Eigen::Index n,
                        double dt = 10.0) {
    PowerSeries s;
    s.t0 = 0.0;
    s.dt = dt;
    s.p.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.p(i) = i < step_at ? before : after;
    return s;
}

}  // namespace

TEST_CASE("gates leave the plan empty") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const ControlPolicy policy = wide_policy();

    SUBCASE("no forecasts") {
        const ControlPlan plan = plan_actions({}, loads, plants, policy, power, 10.0, 0.0, 2000.0);
        CHECK(plan.actions.empty());
        CHECK(plan.committed_by_load.empty());
        CHECK(plan.planned_targets.empty());
    }
    SUBCASE("confidence below the threshold") {
        const auto fc = forecast_of(7, 300.0, 0.3, 0.4);
        CHECK(plan_actions({fc}, loads, plants, policy, power, 10.0, 0.0, 2000.0).actions.empty());
    }
    SUBCASE("arrival farther out than the lead time") {
        const auto fc = forecast_of(7, 700.0, 0.3, 1.0);
        CHECK(plan_actions({fc}, loads, plants, policy, power, 10.0, 0.0, 2000.0).actions.empty());
    }
    SUBCASE("arrival already in the past") {
        const auto fc = forecast_of(7, 100.0, 0.3, 1.0);
        CHECK(plan_actions({fc}, loads, plants, policy, power, 10.0, 200.0, 2000.0).actions.empty());
    }
    SUBCASE("target is not a known plant") {
        const auto fc = forecast_of(99, 300.0, 0.3, 1.0);
        const std::map<int, Watts> stray{{99, 1.0e6}};
        CHECK(plan_actions({fc}, loads, plants, policy, stray, 10.0, 0.0, 2000.0).actions.empty());
    }
    SUBCASE("plant currently produces nothing") {
        const std::map<int, Watts> dark{{7, 0.0}};
        const auto fc = forecast_of(7, 300.0, 0.3, 1.0);
        CHECK(plan_actions({fc}, loads, plants, policy, dark, 10.0, 0.0, 2000.0).actions.empty());
    }
    SUBCASE("no deferrable capacity anywhere") {
        const std::vector<Load> rigid{deferrable_load(1, 0.0)};
        const auto fc = forecast_of(7, 300.0, 0.3, 1.0);
        CHECK(plan_actions({fc}, rigid, plants, policy, power, 10.0, 0.0, 2000.0).actions.empty());
    }
    SUBCASE("too little horizon left for a staircase") {
        const auto fc = forecast_of(7, 300.0, 0.3, 1.0);
        CHECK(plan_actions({fc}, loads, plants, policy, power, 10.0, 0.0, 330.0).actions.empty());
    }
}

TEST_CASE("a 0.3-depth forecast on a 1 MW plant defers 300 kW") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.3, 1.0);

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 2000.0);
    REQUIRE_FALSE(plan.actions.empty());

    CHECK(plan.committed_by_load.at(1) == doctest::Approx(3.0e5).epsilon(1e-12));
    CHECK(plan.planned_targets == std::vector<int>{7});

    // the opposing step lands on the arrival tick
    const ControlAction& first = plan.actions.front();
    CHECK(first.t_start == 300.0);
    CHECK(first.power_delta == doctest::Approx(-3.0e5).epsilon(1e-12));

    // deferral, not curtailment: the plan nets to zero energy
    const double net = planned_energy(plan.actions, 1);
    const double scale = planned_magnitude(plan.actions, 1);
    CHECK(std::abs(net) <= 1e-9 * scale);
}

TEST_CASE("off-grid arrival times are quantized to the next tick") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};

    const auto fc = forecast_of(7, 295.0, 0.3, 1.0);
    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 2000.0);
    REQUIRE_FALSE(plan.actions.empty());
    CHECK(plan.actions.front().t_start == 300.0);
}

TEST_CASE("demand is split across loads in order until covered") {
    const std::vector<Load> loads{deferrable_load(1, 2.0e5), deferrable_load(2, 2.5e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.3, 1.0);

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 2000.0);
    CHECK(plan.committed_by_load.at(1) == doctest::Approx(2.0e5).epsilon(1e-12));
    CHECK(plan.committed_by_load.at(2) == doctest::Approx(1.0e5).epsilon(1e-12));

    for (int id : {1, 2}) {
        const double net = planned_energy(plan.actions, id);
        CHECK(std::abs(net) <= 1e-9 * planned_magnitude(plan.actions, id));
    }
}

TEST_CASE("capacity caps the deferral below the wanted depth") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.5, 1.0);  // wants 500 kW

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 2000.0);
    CHECK(plan.committed_by_load.at(1) == doctest::Approx(4.0e5).epsilon(1e-12));
}

TEST_CASE("all planned actions start at or after now") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 45.0, 0.3, 1.0);

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 40.0, 2000.0);
    REQUIRE_FALSE(plan.actions.empty());
    for (const ControlAction& a : plan.actions) CHECK(a.t_start >= 40.0);
}

TEST_CASE("a load's own window shortens its payback staircase") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5, 200.0)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.3, 1.0);

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 2000.0);
    REQUIRE_FALSE(plan.actions.empty());
    double last_end = 0.0;
    for (const ControlAction& a : plan.actions)
        last_end = std::max(last_end, a.t_start + a.duration);
    CHECK(last_end <= 500.0);  // arrival 300 plus the 200 s window
}

TEST_CASE("apply_actions with no actions is the identity") {
    const PowerSeries s = step_series(100.0, 200.0, 3, 8);
    const PowerSeries out = apply_actions(s, {});
    CHECK(out.p == s.p);
    CHECK(out.t0 == s.t0);
    CHECK(out.dt == s.dt);
}

TEST_CASE("apply_actions spreads a delta over the covered slabs") {
    PowerSeries s = step_series(0.0, 0.0, 0, 6);

    SUBCASE("aligned interval hits whole slabs") {
        const PowerSeries out = apply_actions(s, {{1, 20.0, 20.0, 1000.0}});
        CHECK(out.p(1) == 0.0);
        CHECK(out.p(2) == 1000.0);
        CHECK(out.p(3) == 1000.0);
        CHECK(out.p(4) == 0.0);
    }
    SUBCASE("an interval straddling a tick splits pro rata") {
        const PowerSeries out = apply_actions(s, {{1, 5.0, 10.0, 1000.0}});
        CHECK(out.p(0) == doctest::Approx(500.0).epsilon(1e-12));
        CHECK(out.p(1) == doctest::Approx(500.0).epsilon(1e-12));
        CHECK(out.p(2) == 0.0);
    }
    SUBCASE("the final slab is writable up to its end") {
        const PowerSeries out = apply_actions(s, {{1, 50.0, 10.0, 700.0}});
        CHECK(out.p(5) == doctest::Approx(700.0).epsilon(1e-12));
    }
    SUBCASE("intervals outside the span throw") {
        CHECK_THROWS_AS((void)apply_actions(s, {{1, -10.0, 10.0, 100.0}}), OutOfRangeError);
        CHECK_THROWS_AS((void)apply_actions(s, {{1, 55.0, 10.0, 100.0}}), OutOfRangeError);
    }
    SUBCASE("non-positive durations are rejected") {
        CHECK_THROWS_AS((void)apply_actions(s, {{1, 10.0, 0.0, 100.0}}), Error);
    }
}

TEST_CASE("applying a zero-net plan preserves series energy") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.3, 1.0);
    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 1000.0);

    const PowerSeries before = step_series(-1.0e6, -7.0e5, 30, 101);
    const PowerSeries after = apply_actions(before, plan.actions);
    CHECK(series_energy(after) ==
          doctest::Approx(series_energy(before)).epsilon(1e-9));
}

TEST_CASE("evaluate compares ramps on a shared grid") {
    const PowerSeries flat = step_series(100.0, 100.0, 0, 10);
    const PowerSeries stepped = step_series(100.0, 600.0, 5, 10);

    SUBCASE("identical series yield zero reduction") {
        const ControlReport r = evaluate(stepped, stepped);
        CHECK(r.ramp_controlled == r.ramp_uncontrolled);
        CHECK(r.reduction_fraction == 0.0);
    }
    SUBCASE("a flattened series yields full reduction") {
        const ControlReport r = evaluate(flat, stepped);
        CHECK(r.ramp_controlled == 0.0);
        CHECK(r.ramp_uncontrolled == 50.0);
        CHECK(r.reduction_fraction == 1.0);
    }
    SUBCASE("zero uncontrolled ramp reports zero reduction") {
        const ControlReport r = evaluate(stepped, flat);
        CHECK(r.reduction_fraction == 0.0);
    }
    SUBCASE("mismatched grids throw") {
        PowerSeries other = stepped;
        other.dt = 5.0;
        CHECK_THROWS_AS((void)evaluate(other, stepped), GridMismatchError);
    }
}

TEST_CASE("cancelling a forecast step flattens the worst gradient") {
    const std::vector<Load> loads{deferrable_load(1, 4.0e5)};
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.3, 1.0);

    const ControlPlan plan =
        plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 1000.0);
    const PowerSeries uncontrolled = step_series(-1.0e6, -7.0e5, 30, 101);
    const PowerSeries controlled = apply_actions(uncontrolled, plan.actions);

    const ControlReport r = evaluate(controlled, uncontrolled);
    CHECK(r.ramp_uncontrolled == doctest::Approx(3.0e4).epsilon(1e-12));
    CHECK(r.ramp_controlled < r.ramp_uncontrolled);
    CHECK(r.reduction_fraction > 0.5);
}

TEST_CASE("more capacity never worsens the controlled ramp") {
    const std::vector<PvPlant> plants{plant_with_id(7)};
    const std::map<int, Watts> power{{7, 1.0e6}};
    const auto fc = forecast_of(7, 300.0, 0.5, 1.0);  // 500 kW step incoming
    const PowerSeries uncontrolled = step_series(-1.0e6, -5.0e5, 30, 101);

    double previous = 1.0e18;
    for (double capacity : {0.0, 1.0e5, 2.0e5, 3.0e5, 4.0e5, 5.0e5}) {
        const std::vector<Load> loads{deferrable_load(1, capacity)};
        const ControlPlan plan =
            plan_actions({fc}, loads, plants, wide_policy(), power, 10.0, 0.0, 1000.0);
        const PowerSeries controlled = apply_actions(uncontrolled, plan.actions);
        const double ramp = evaluate(controlled, uncontrolled).ramp_controlled;
        CHECK(ramp <= previous);
        previous = ramp;
    }
}

#pragma once

#include <map>
#include <vector>

#include "helios/energy_balance.hpp"
#include "helios/nowcast.hpp"
#include "helios/types.hpp"

namespace helios {

struct ControlAction {
    int load_id = 0;
    Seconds t_start = 0.0;
    Seconds duration = 0.0;
    Watts power_delta = 0.0;  // negative = defer consumption, positive = restore
};

struct ControlPolicy {
    Seconds lead_time = 60.0;  // commit a plan once arrival is this close
    Seconds spread = 600.0;    // window over which deferred energy is paid back
    double confidence_threshold = 0.5;
};

struct ControlReport {
    double ramp_controlled = 0.0;    // W/s
    double ramp_uncontrolled = 0.0;  // W/s
    double reduction_fraction = 0.0;
};

struct ControlPlan {
    std::vector<ControlAction> actions;
    std::map<int, Watts> committed_by_load;  // deferral booked against each load
    std::vector<int> planned_targets;        // plant ids that received a plan
};

// Greedy ramp-shaper. For each credible forecast whose arrival falls within
// lead_time of `now`, defers min(total deferrable, depth * plant power now)
// as an opposing step at the arrival tick, then pays the energy back with a
// low-gradient staircase over min(spread, deferrable_window), shrunk to fit
// under `horizon` (skipped when less than four ticks remain). Per load the
// actions net to exactly zero energy. Returns an empty plan when nothing is
// deferrable or no forecast qualifies.
ControlPlan plan_actions(const std::vector<RampForecast>& forecasts,
                         const std::vector<Load>& loads, const std::vector<PvPlant>& plants,
                         const ControlPolicy& policy,
                         const std::map<int, Watts>& plant_power_now, Seconds dt, Seconds now,
                         Seconds horizon);

// Adds each action's power_delta onto the samples overlapping its interval,
// weighted by the overlapped fraction of each dt slab, so sum(p)*dt moves by
// exactly power_delta * duration per action. Throws OutOfRangeError when an
// action leaves the series span.
PowerSeries apply_actions(const PowerSeries& net_uncontrolled,
                          const std::vector<ControlAction>& actions);

// Throws GridMismatchError when the two series do not share a grid.
ControlReport evaluate(const PowerSeries& controlled, const PowerSeries& uncontrolled);

}  // namespace helios

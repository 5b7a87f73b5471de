#include "helios/control.hpp"

#include <algorithm>
#include <cmath>

namespace helios {

namespace {

// Defer `amount` as one opposing step at the arrival tick, then return the
// energy along a triangular staircase whose per-tick increments stay near
// 3*amount/m. Levels k=0..m-1 occupy [t_arrival + k*dt, +dt each) and sum
// to zero.
void emit_plan(std::vector<ControlAction>& out, int load_id, Seconds t_arrival, Watts amount,
               Seconds window, Seconds dt) {
    const auto m =
        std::max<Eigen::Index>(4, static_cast<Eigen::Index>(std::floor(window / dt + 1e-9)));
    const Eigen::Index h = m / 2;
    const double peak = amount * static_cast<double>(h + 1) / static_cast<double>(m);

    Eigen::VectorXd levels(m);
    levels(0) = -amount;
    for (Eigen::Index k = 1; k <= h; ++k)
        levels(k) = -amount + (peak + amount) * static_cast<double>(k) / static_cast<double>(h);
    for (Eigen::Index k = h + 1; k < m; ++k)
        levels(k) = peak * static_cast<double>(m - k) / static_cast<double>(m - h);
    levels(h) -= levels.sum();  // pin the net energy to zero

    for (Eigen::Index k = 0; k < m; ++k) {
        if (levels(k) == 0.0) continue;
        out.push_back({load_id, t_arrival + static_cast<double>(k) * dt, dt, levels(k)});
    }
}

}  // namespace

ControlPlan plan_actions(const std::vector<RampForecast>& forecasts,
                         const std::vector<Load>& loads, const std::vector<PvPlant>& plants,
                         const ControlPolicy& policy,
                         const std::map<int, Watts>& plant_power_now, Seconds dt, Seconds now,
                         Seconds horizon) {
    ControlPlan plan;
    std::map<int, Watts> remaining;
    for (const Load& load : loads) remaining[load.id] = load.deferrable_power;

    for (const RampForecast& fc : forecasts) {
        if (fc.confidence < policy.confidence_threshold) continue;
        if (fc.t_arrival <= now || fc.t_arrival - now > policy.lead_time) continue;
        auto power_it = plant_power_now.find(fc.target_id);
        if (power_it == plant_power_now.end() || power_it->second <= 0.0) continue;
        const bool is_plant = std::any_of(plants.begin(), plants.end(), [&](const PvPlant& p) {
            return p.id == fc.target_id;
        });
        if (!is_plant) continue;

        // land the opposing step on the tick where the drop materializes
        const Seconds arrival_tick = std::ceil(fc.t_arrival / dt - 1e-9) * dt;
        if (arrival_tick < now) continue;

        Watts want = fc.depth * power_it->second;
        bool planned = false;
        for (const Load& load : loads) {
            const Watts share = std::min(want, remaining[load.id]);
            if (share <= 0.0) continue;
            Seconds window = policy.spread;
            if (load.deferrable_window > 0.0) window = std::min(window, load.deferrable_window);
            window = std::min(window, horizon - arrival_tick);
            if (window < 4.0 * dt) continue;
            emit_plan(plan.actions, load.id, arrival_tick, share, window, dt);
            plan.committed_by_load[load.id] += share;
            remaining[load.id] -= share;
            want -= share;
            planned = true;
            if (want <= 0.0) break;
        }
        if (planned) plan.planned_targets.push_back(fc.target_id);
    }
    return plan;
}

PowerSeries apply_actions(const PowerSeries& net_uncontrolled,
                          const std::vector<ControlAction>& actions) {
    PowerSeries out = net_uncontrolled;
    const Seconds span_end = out.t0 + static_cast<double>(out.size()) * out.dt;
    for (const ControlAction& action : actions) {
        if (action.duration <= 0.0) throw Error("action duration must be positive");
        const Seconds a = action.t_start;
        const Seconds b = action.t_start + action.duration;
        if (a < out.t0 || b > span_end)
            throw OutOfRangeError("action interval leaves the series span");
        auto i0 = static_cast<Eigen::Index>(std::floor((a - out.t0) / out.dt));
        i0 = std::clamp<Eigen::Index>(i0, 0, out.size() - 1);
        for (Eigen::Index i = i0; i < out.size(); ++i) {
            const Seconds slab_a = out.t(i);
            if (slab_a >= b) break;
            const double overlap = std::min(b, slab_a + out.dt) - std::max(a, slab_a);
            if (overlap > 0.0) out.p(i) += action.power_delta * overlap / out.dt;
        }
    }
    return out;
}

ControlReport evaluate(const PowerSeries& controlled, const PowerSeries& uncontrolled) {
    if (!controlled.same_grid(uncontrolled))
        throw GridMismatchError("controlled and uncontrolled series use different grids");
    ControlReport report;
    report.ramp_controlled = ramp_metric(controlled);
    report.ramp_uncontrolled = ramp_metric(uncontrolled);
    report.reduction_fraction =
        report.ramp_uncontrolled > 0.0
            ? 1.0 - report.ramp_controlled / report.ramp_uncontrolled
            : 0.0;
    return report;
}

}  // namespace helios

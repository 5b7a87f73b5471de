#include "helios/nowcast.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace helios {

std::optional<FrontEvent> detect_front(const std::vector<Measurement>& history,
                                       const Point2& node_position,
                                       const ClearSkyModel& clear_sky, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error("detection threshold must lie in (0, 1)");
    for (const Measurement& m : history) {
        const double clear = clear_sky_irradiance(clear_sky, m.t);
        if (clear <= 0.0) continue;
        const double ratio = m.irradiance / clear;
        if (ratio < 1.0 - threshold) {
            FrontEvent event;
            event.node_id = m.node_id;
            event.t_cross = m.t;
            event.depth = std::clamp(1.0 - ratio, 0.0, 1.0);
            event.position = node_position;
            return event;
        }
    }
    return std::nullopt;
}

MotionEstimate estimate_motion(const std::vector<FrontEvent>& events) {
    const auto n = static_cast<Eigen::Index>(events.size());
    if (n < 3)
        throw DegenerateGeometryError("planar fit needs at least 3 events, got " +
                                      std::to_string(events.size()));

    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = events[i].position.x();
        a(i, 2) = events[i].position.y();
        b(i) = events[i].t_cross;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 3)
        throw DegenerateGeometryError("event positions are collinear; front plane underdetermined");
    const Eigen::Vector3d x = qr.solve(b);

    MotionEstimate est;
    est.t0 = x(0);
    est.slowness = x.tail<2>();
    const double s2 = est.slowness.squaredNorm();
    if (std::sqrt(s2) < 1e-12)
        throw DegenerateGeometryError("fitted slowness below 1e-12 s/m; no resolvable motion");
    est.velocity = est.slowness / s2;
    est.residual = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n));
    est.n_events = static_cast<int>(n);
    return est;
}

RampForecast predict_arrival(const MotionEstimate& estimate, const FrontEvent& reference,
                             int target_id, const Point2& target, Seconds sample_period) {
    const double lag = (target - reference.position).dot(estimate.slowness);
    if (lag < 0.0)
        throw AlreadyPassedError("target " + std::to_string(target_id) +
                                 " lies behind the detected front");
    RampForecast fc;
    fc.target_id = target_id;
    fc.t_arrival = reference.t_cross + lag;
    fc.depth = reference.depth;
    fc.confidence = std::clamp(std::exp(-estimate.residual / sample_period), 0.0, 1.0);
    return fc;
}

}  // namespace helios

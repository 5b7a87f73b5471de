#pragma once

#include <optional>
#include <vector>

#include "helios/cloud_field.hpp"
#include "helios/sensor_mesh.hpp"
#include "helios/types.hpp"

namespace helios {

// First threshold crossing of normalized irradiance at one sensor.
struct FrontEvent {
    int node_id = 0;
    Seconds t_cross = 0.0;
    double depth = 0.0;  // 1 - I/I_clear at the crossing, in [0, 1]
    Point2 position{0.0, 0.0};
};

struct MotionEstimate {
    WindVector velocity{0.0, 0.0};  // m/s, front speed along its normal
    Eigen::Vector2d slowness{0.0, 0.0};  // s/m, fitted; velocity = s/|s|^2
    Seconds t0 = 0.0;                    // fitted crossing time at the origin
    Seconds residual = 0.0;              // RMS timing residual of the fit
    int n_events = 0;
};

struct RampForecast {
    int target_id = 0;
    Seconds t_arrival = 0.0;
    double depth = 0.0;
    double confidence = 0.0;  // exp(-residual / sample_period), in [0, 1]
};

// Scans a time-ordered single-node history for the first sample where
// I/I_clear < 1 - threshold (with I_clear > 0). Position is attached to the
// event since measurements do not carry it.
std::optional<FrontEvent> detect_front(const std::vector<Measurement>& history,
                                       const Point2& node_position,
                                       const ClearSkyModel& clear_sky, double threshold);

// Least-squares fit of the planar-front model t_cross ~= t0 + position . s
// over the unknowns (t0, s). Throws DegenerateGeometryError when the
// positions are collinear (rank-deficient fit) or |s| < 1e-12 s/m.
MotionEstimate estimate_motion(const std::vector<FrontEvent>& events);

// Extrapolates the fitted front plane to `target`:
//   t_arrival = reference.t_cross + (target - reference.position) . s
// Depth is carried over unchanged (frozen-cloud assumption). Throws
// AlreadyPassedError when the target sits behind the front.
RampForecast predict_arrival(const MotionEstimate& estimate, const FrontEvent& reference,
                             int target_id, const Point2& target, Seconds sample_period);

}  // namespace helios

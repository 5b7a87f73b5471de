#pragma once

#include <vector>

#include "helios/types.hpp"

namespace helios {

// Diurnal irradiance envelope: half-sine between sunrise and sunset, zero
// outside. Times are seconds of day.
struct ClearSkyModel {
    WattsPerSquareMeter i_max = 1000.0;
    Seconds t_sunrise = 21600.0;
    Seconds t_sunset = 64800.0;
};

// Hard-edged opaque disc drifting with its own velocity. `center` is the
// disc position at the field's current time; advect() moves it.
struct CloudDisc {
    Point2 center{0.0, 0.0};
    double radius = 0.0;       // m
    double opacity = 0.0;      // [0,1]; 1 = fully opaque
    WindVector velocity{0.0, 0.0};
};

struct CloudField {
    ClearSkyModel clear_sky;
    std::vector<CloudDisc> discs;
    double ambient = 1.0;  // background transmissivity in (0,1]
};

WattsPerSquareMeter clear_sky_irradiance(const ClearSkyModel& model, Seconds t);

// Irradiance at point p: clear-sky envelope times ambient transmissivity
// times (1 - opacity) for every disc currently covering p.
WattsPerSquareMeter irradiance_at(const CloudField& field, const Point2& p, Seconds t);

// Field as it looks dt seconds later: every disc translated by velocity*dt.
CloudField advect(const CloudField& field, Seconds dt);

}  // namespace helios

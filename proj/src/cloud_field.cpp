#include "helios/cloud_field.hpp"

#include <algorithm>
#include <cmath>

namespace helios {

WattsPerSquareMeter clear_sky_irradiance(const ClearSkyModel& model, Seconds t) {
    if (t <= model.t_sunrise || t >= model.t_sunset) {
        return 0.0;
    }
    const double phase = (t - model.t_sunrise) / (model.t_sunset - model.t_sunrise);
    return model.i_max * std::max(0.0, std::sin(M_PI * phase));
}

WattsPerSquareMeter irradiance_at(const CloudField& field, const Point2& p, Seconds t) {
    double irradiance = clear_sky_irradiance(field.clear_sky, t) * field.ambient;
    for (const CloudDisc& disc : field.discs) {
        if ((p - disc.center).norm() <= disc.radius) {
            irradiance *= 1.0 - disc.opacity;
        }
    }
    return irradiance;
}

CloudField advect(const CloudField& field, Seconds dt) {
    CloudField moved = field;
    for (CloudDisc& disc : moved.discs) {
        disc.center += disc.velocity * dt;
    }
    return moved;
}

}  // namespace helios

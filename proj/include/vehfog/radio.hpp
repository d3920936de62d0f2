#pragma once

#include "vehfog/geometry.hpp"

namespace vehfog {

/// Link budget in dB units. Defaults model a 5.9 GHz DSRC radio.
struct LinkBudget {
    double tx_power_dbm = 20.0;
    double gain_tx_dbi = 0.0;
    double gain_rx_dbi = 0.0;
    double freq_mhz = 5900.0;
    double sensitivity_dbm = -85.0;
    double margin_db = 3.0;  // uncertain band merged into "shadowed"
};

/// Per-wall and per-meter building attenuation.
struct AttenuationParams {
    double alpha_db = 9.0;
    double beta_db_per_m = 0.4;
};

enum class Loc : int { clear = 0, shadowed = 1 };

struct ReceiverClass {
    Loc loc = Loc::clear;
    double p_r_dbm = 0.0;
    double path_loss_db = 0.0;
    double o_shadow_db = 0.0;
    Obstruction obstruction{};
};

/// Free-space loss, d in meters, f in MHz: 32.44 + 20 log10(d_km) + 20 log10(f).
double fspl_db(double d_m, double f_mhz);

/// Inverse of fspl_db.
double distance_from_loss(double loss_db, double f_mhz);

double obstacle_attenuation(const Obstruction& o, const AttenuationParams& params);

double received_power(const LinkBudget& link, double path_loss_db, double o_shadow_db);

/// loc = shadowed iff the line of sight crosses a wall and the predicted power
/// falls below sensitivity + margin.
ReceiverClass classify(const LinkBudget& link, const AttenuationParams& params, double d_m,
                       const Obstruction& o);

/// Full classification from geometry. Throws RangeError when |tx - rx| > range_m.
ReceiverClass classify_receiver(const ObstacleMap& map, const LinkBudget& link,
                                const AttenuationParams& params, double range_m, Point tx,
                                Point rx);

}  // namespace vehfog

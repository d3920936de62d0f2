#include "vehfog/radio.hpp"

#include <cmath>

#include "vehfog/error.hpp"

namespace vehfog {

namespace {
constexpr double kFsplConstant = 32.44;
}

double fspl_db(double d_m, double f_mhz) {
    if (!(d_m > 0.0) || !(f_mhz > 0.0)) throw DomainError("fspl_db: distance and frequency must be positive");
    return kFsplConstant + 20.0 * std::log10(d_m / 1000.0) + 20.0 * std::log10(f_mhz);
}

double distance_from_loss(double loss_db, double f_mhz) {
    if (!(f_mhz > 0.0)) throw DomainError("distance_from_loss: frequency must be positive");
    return std::pow(10.0, (loss_db - kFsplConstant - 20.0 * std::log10(f_mhz)) / 20.0) * 1000.0;
}

double obstacle_attenuation(const Obstruction& o, const AttenuationParams& params) {
    if (o.n < 0 || !(o.l_obs >= 0.0)) throw DomainError("obstacle_attenuation: negative obstruction");
    return params.alpha_db * o.n + params.beta_db_per_m * o.l_obs;
}

double received_power(const LinkBudget& link, double path_loss_db, double o_shadow_db) {
    return link.tx_power_dbm + link.gain_tx_dbi + link.gain_rx_dbi - path_loss_db - o_shadow_db;
}

ReceiverClass classify(const LinkBudget& link, const AttenuationParams& params, double d_m,
                       const Obstruction& o) {
    ReceiverClass rc;
    rc.obstruction = o;
    rc.path_loss_db = fspl_db(d_m, link.freq_mhz);
    rc.o_shadow_db = obstacle_attenuation(o, params);
    rc.p_r_dbm = received_power(link, rc.path_loss_db, rc.o_shadow_db);
    const bool weak = rc.p_r_dbm < link.sensitivity_dbm + link.margin_db;
    rc.loc = (o.n > 0 && weak) ? Loc::shadowed : Loc::clear;
    return rc;
}

ReceiverClass classify_receiver(const ObstacleMap& map, const LinkBudget& link,
                                const AttenuationParams& params, double range_m, Point tx,
                                Point rx) {
    const double d = distance(tx, rx);
    if (d > range_m) throw RangeError("classify_receiver: receiver beyond transmission range");
    return classify(link, params, d, los_obstruction(map, tx, rx));
}

}  // namespace vehfog

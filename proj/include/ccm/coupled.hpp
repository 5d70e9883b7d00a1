#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "ccm/pool.hpp"

namespace ccm {

// Compound two-pool analytics over the shared four-reserve state
// (x, y1, y2, z): a y/x pool and a z/y pool chained through the y asset.
// Purchases route x -> y -> z; liquidations route z -> y -> x. Every metric
// is parameterized by the drift mu_y the compound trade puts on the pool
// where the y leg executes.

struct CoupledState {
    double x = 0.0;       // x reserve of the y/x pool
    double y1 = 0.0;      // y reserve of the y/x pool
    double y2 = 0.0;      // y reserve of the z/y pool
    double z = 0.0;       // z reserve of the z/y pool
    double gamma1 = 1.0;  // y/x pool discount
    double gamma2 = 1.0;  // z/y pool discount

    PoolState pool_yx() const { return {x, y1, gamma1, Invariant::ConstantProduct}; }
    PoolState pool_zy() const { return {y2, z, gamma2, Invariant::ConstantProduct}; }
};

inline void validate(const CoupledState& state) {
    validate(state.pool_yx());
    validate(state.pool_zy());
}

struct CompoundTrade {
    double amount_out = 0.0;
    CoupledState post;
};

namespace detail {

inline void require_nonnegative_amount(double amount, const char* what) {
    if (!(amount >= 0.0) || !std::isfinite(amount)) {
        throw std::domain_error(std::string(what) + ": amount must be nonnegative and finite");
    }
}

}  // namespace detail

// State transition for a purchase: x += Delta, y1 -= Lambda, y2 += Lambda,
// z -= Gamma. The y asset only moves between the two pools.
inline CoupledState transition_purchase(const CoupledState& state, double delta_x) {
    validate(state);
    detail::require_nonnegative_amount(delta_x, "transition_purchase");
    const double lambda = swap_out(state.pool_yx(), delta_x);
    const double gamma_out = swap_out(state.pool_zy(), lambda);
    CoupledState post = state;
    post.x += delta_x;
    post.y1 -= lambda;
    post.y2 += lambda;
    post.z -= gamma_out;
    return post;
}

// Compound purchase via the single closed form for the chained constant
// product pools. The sequential two-leg execution is the independent oracle
// for this expression.
inline CompoundTrade purchase_compound(const CoupledState& state, double delta_x) {
    validate(state);
    detail::require_nonnegative_amount(delta_x, "purchase_compound");
    const double g1d = state.gamma1 * delta_x;
    const double gamma_out = state.y1 * state.z * state.gamma2 * g1d /
                             (state.x * state.y2 + (state.y2 + state.gamma2 * state.y1) * g1d);
    return {gamma_out, transition_purchase(state, delta_x)};
}

// Decoupled baseline: the y/x pool is treated as infinitely deep, so the y
// amount entering the z market is fixed by the pre-trade spot price.
inline double purchase_decoupled(const CoupledState& state, double delta_x) {
    validate(state);
    detail::require_nonnegative_amount(delta_x, "purchase_decoupled");
    const double p_y = spot_price(state.pool_yx(), Asset::Quote);  // x per y
    return swap_out(state.pool_zy(), state.gamma1 * delta_x / p_y);
}

// Liquidation transition: z += Gamma, y2 -= Lambda, y1 += Lambda,
// x -= Delta.
inline CoupledState transition_liquidation(const CoupledState& state, double gamma_z) {
    validate(state);
    detail::require_nonnegative_amount(gamma_z, "transition_liquidation");
    const double lambda = swap_out(state.pool_zy().flipped(), gamma_z);
    const double delta_out = swap_out(state.pool_yx().flipped(), lambda);
    CoupledState post = state;
    post.z += gamma_z;
    post.y2 -= lambda;
    post.y1 += lambda;
    post.x -= delta_out;
    return post;
}

inline CompoundTrade liquidate_compound(const CoupledState& state, double gamma_z) {
    validate(state);
    detail::require_nonnegative_amount(gamma_z, "liquidate_compound");
    const double g2g = state.gamma2 * gamma_z;
    const double delta_out = state.x * state.gamma1 * state.y2 * g2g /
                             (state.y1 * (state.z + g2g) + state.gamma1 * state.y2 * g2g);
    return {delta_out, transition_liquidation(state, gamma_z)};
}

// Basket value discrepancy between the coupled and decoupled purchase, in x
// units, with each z basket valued at its own post-trade marginal price and
// the coupled basket carrying the (mu_y + 1) repricing of y.
inline double value_discrepancy_purchase(const CoupledState& state, double mu_y) {
    validate(state);
    const PoolState p1 = state.pool_yx();
    const PoolState p2 = state.pool_zy();
    const double delta = input_for_drift(p1, mu_y);
    const double p_y = spot_price(p1, Asset::Quote);
    const double lambda_coupled = swap_out(p1, delta);
    const double lambda_decoupled = state.gamma1 * delta / p_y;
    const double z_coupled = swap_out(p2, lambda_coupled);
    const double z_decoupled = swap_out(p2, lambda_decoupled);
    const double pz_coupled = state.gamma2 / swap_out_d1(p2, lambda_coupled);
    const double pz_decoupled = state.gamma2 / swap_out_d1(p2, lambda_decoupled);
    return p_y * ((mu_y + 1.0) * pz_coupled * z_coupled - pz_decoupled * z_decoupled);
}

// Net value discrepancy on liquidation: x received for the y proceeds versus
// the same y valued at the untouched fee-augmented spot price. Nonpositive.
inline double value_discrepancy_liquidation(const CoupledState& state, double mu_y) {
    validate(state);
    const PoolState p2_sell = state.pool_zy().flipped();
    const PoolState p1_sell = state.pool_yx().flipped();
    const double gamma_z = input_for_drift(p2_sell, mu_y);
    const double lambda = swap_out(p2_sell, gamma_z);
    const double delta_out = swap_out(p1_sell, lambda);
    const double p_y = spot_price(state.pool_yx(), Asset::Quote);
    return delta_out - state.gamma1 * p_y * lambda;
}

struct IndicatorPoint {
    double value = 0.0;
    // The indicator is derived for trade sizes small against the y/x pool's
    // notional; beyond half of it the point is flagged out of regime.
    bool in_regime = true;
};

// Inflation indicator l(mu_y): positive means the coupled purchase basket is
// inflated relative to the decoupled baseline, negative deflated, zero
// parity.
inline IndicatorPoint inflation_indicator(const CoupledState& state, double mu_y) {
    validate(state);
    const PoolState p1 = state.pool_yx();
    const PoolState p2 = state.pool_zy();
    const double delta = input_for_drift(p1, mu_y);
    const double p_y = spot_price(p1, Asset::Quote);
    IndicatorPoint point;
    point.in_regime = delta <= 0.5 * p_y * state.y1;
    if (mu_y == 0.0) {
        return point;  // both scenarios coincide at zero trade
    }
    const double lambda_coupled = swap_out(p1, delta);
    const double lambda_decoupled = state.gamma1 * delta / p_y;
    const double ratio = (swap_out(p2, lambda_decoupled) / swap_out(p2, lambda_coupled)) *
                         (swap_out_d1(p2, lambda_coupled) / swap_out_d1(p2, lambda_decoupled));
    point.value = mu_y + 1.0 - ratio;
    return point;
}

// Drift transmission on purchase: the z-market drift produced by the y
// amount that a mu_y drift trade pushes through. Closed form for chained
// constant products; validated against sequential measurement.
inline double drift_transmission_purchase(const CoupledState& state, double mu_y) {
    validate(state);
    detail::require_nonnegative_amount(mu_y, "drift_transmission_purchase");
    const double u = std::sqrt(mu_y + 1.0);
    const double num = state.y2 * u + state.gamma2 * state.y1 * (u - 1.0);
    return num * num / (state.y2 * state.y2 * (mu_y + 1.0)) - 1.0;
}

inline double drift_transmission_liquidation(const CoupledState& state, double mu_y) {
    validate(state);
    detail::require_nonnegative_amount(mu_y, "drift_transmission_liquidation");
    const double u = std::sqrt(mu_y + 1.0);
    const double num = state.y1 * u + state.gamma1 * state.y2 * (u - 1.0);
    return num * num / (state.y1 * state.y1 * (mu_y + 1.0)) - 1.0;
}

// Supremum of the transmitted drift: the drift from pushing the entire y
// reserve of the source pool into the destination pool.
inline double transmission_bound_purchase(const CoupledState& state) {
    return drift_quote(state.pool_zy(), state.y1);
}

inline double transmission_bound_liquidation(const CoupledState& state) {
    return drift_quote(state.pool_yx().flipped(), state.y2);
}

struct ExpansionReport {
    double order1 = 0.0;           // linear coefficient in delta mu_y
    double order2 = 0.0;           // quadratic coefficient in delta mu_y
    double exact_delta = 0.0;      // output-reserve change between the two drift coordinates
    double predicted_delta = 0.0;  // order1*dmu + order2*dmu^2
    double residual = 0.0;         // exact - predicted, O(dmu^3)
};

struct CompoundCurvature {
    double kappa_first = 0.0;   // kappa_y: curvature of the y leg
    double kappa_second = 0.0;  // kappa_z on purchase, kappa_x on liquidation
    double second_order = 0.0;  // a2 on purchase, b2 on liquidation
};

namespace detail {

inline void require_d_mu(double d_mu) {
    if (!(d_mu > 0.0) || d_mu > 0.1) {
        throw std::domain_error("marginal output: d_mu must lie in (0, 0.1]");
    }
}

// Second-order expansion of a two-leg composite out(in) = leg2(leg1(in)),
// with the perturbation expressed in the drift coordinate of the first leg.
inline ExpansionReport expand_two_leg(const PoolState& first, const PoolState& second,
                                      double mu, double d_mu,
                                      double exact_lo, double exact_hi) {
    const double in_lo = input_for_drift(first, mu);
    const double leg1 = swap_out(first, in_lo);
    const double l1 = swap_out_d1(first, in_lo);
    const double l2 = swap_out_d2(first, in_lo);
    const double g1 = swap_out_d1(second, leg1);
    const double g2 = swap_out_d2(second, leg1);
    const double comp1 = g1 * l1;                  // d out / d in
    const double comp2 = g2 * l1 * l1 + g1 * l2;   // d^2 out / d in^2
    const double din = input_per_drift(first, mu);
    const double din2 = input_per_drift_slope(first, mu);
    ExpansionReport report;
    report.order1 = -comp1 * din;
    report.order2 = -0.5 * (comp2 * din * din + comp1 * din2);
    report.exact_delta = exact_hi - exact_lo;
    report.predicted_delta = report.order1 * d_mu + report.order2 * d_mu * d_mu;
    report.residual = report.exact_delta - report.predicted_delta;
    return report;
}

}  // namespace detail

// Second-order marginal output expansion for a purchase, in mu_y space. The
// exact change applies the purchase transition at the two drift coordinates
// and reads off the output-reserve move, computed as the difference of the
// compound outputs so it is not washed out by the reserve magnitudes.
inline ExpansionReport marginal_output_purchase(const CoupledState& state, double mu_y, double d_mu) {
    validate(state);
    detail::require_nonnegative_amount(mu_y, "marginal_output_purchase");
    detail::require_d_mu(d_mu);
    const PoolState p1 = state.pool_yx();
    const double out_lo = purchase_compound(state, input_for_drift(p1, mu_y)).amount_out;
    const double out_hi = purchase_compound(state, input_for_drift(p1, mu_y + d_mu)).amount_out;
    return detail::expand_two_leg(p1, state.pool_zy(), mu_y, d_mu, -out_lo, -out_hi);
}

inline ExpansionReport marginal_output_liquidation(const CoupledState& state, double mu_y, double d_mu) {
    validate(state);
    detail::require_nonnegative_amount(mu_y, "marginal_output_liquidation");
    detail::require_d_mu(d_mu);
    const PoolState p2_sell = state.pool_zy().flipped();
    const double out_lo = liquidate_compound(state, input_for_drift(p2_sell, mu_y)).amount_out;
    const double out_hi = liquidate_compound(state, input_for_drift(p2_sell, mu_y + d_mu)).amount_out;
    return detail::expand_two_leg(p2_sell, state.pool_yx().flipped(), mu_y, d_mu, -out_lo, -out_hi);
}

// Trade curvatures of the two legs and the compound second-order coefficient
// a2 for a purchase at drift mu_y. -2*a2 is the compound purchase curvature.
// In depth terms kappa_y = gamma1 / (P_y (mu_y+1)^2 D_y) with D_y the global
// drift sensitivity of the y leg, and likewise for kappa_z; a2 folds them as
// -1/2 (kappa_y gamma2 / P_z' + kappa_z gamma1^2 / P_y'^2).
inline CompoundCurvature compound_curvature_purchase(const CoupledState& state, double mu_y) {
    validate(state);
    const PoolState p1 = state.pool_yx();
    const PoolState p2 = state.pool_zy();
    const double delta = input_for_drift(p1, mu_y);
    const double lambda = swap_out(p1, delta);
    CompoundCurvature c;
    c.kappa_first = -swap_out_d2(p1, delta);
    c.kappa_second = -swap_out_d2(p2, lambda);
    const double py_post = spot_price(p1, Asset::Quote) * (mu_y + 1.0);
    const double mu_z = drift_transmission_purchase(state, mu_y);
    const double pz_post = spot_price(p2, Asset::Quote) * (mu_z + 1.0);
    c.second_order = -0.5 * (c.kappa_first * state.gamma2 / pz_post +
                             c.kappa_second * state.gamma1 * state.gamma1 / (py_post * py_post));
    return c;
}

// Liquidation counterpart: kappa_y on the z/y sale, kappa_x on the y/x sale,
// and b2 = -(gamma2^2 P_z^2 kappa_x / (mu_y+1)^2 + kappa_y gamma1 P_y /
// (mu_x+1)). -2*b2 is the compound liquidation curvature.
inline CompoundCurvature compound_curvature_liquidation(const CoupledState& state, double mu_y) {
    validate(state);
    const PoolState p2_sell = state.pool_zy().flipped();
    const PoolState p1_sell = state.pool_yx().flipped();
    const double gamma_z = input_for_drift(p2_sell, mu_y);
    const double lambda = swap_out(p2_sell, gamma_z);
    CompoundCurvature c;
    c.kappa_first = -swap_out_d2(p2_sell, gamma_z);
    c.kappa_second = -swap_out_d2(p1_sell, lambda);
    const double p_z = spot_price(p2_sell, Asset::Base);  // y per z
    const double p_y = spot_price(state.pool_yx(), Asset::Quote);
    const double mu_x = drift_transmission_liquidation(state, mu_y);
    const double g2pz = state.gamma2 * p_z;
    c.second_order = -(g2pz * g2pz * c.kappa_second / ((mu_y + 1.0) * (mu_y + 1.0)) +
                       c.kappa_first * state.gamma1 * p_y / (mu_x + 1.0));
    return c;
}

// One sweep point of the compound metrics at a given drift coordinate.
struct MetricsSample {
    double mu_y = 0.0;
    double trade_in = 0.0;           // delta_x on purchase, gamma_z on liquidation
    double value_discrepancy = 0.0;  // x-denominated
    double indicator = 0.0;          // purchase only
    double transmitted_drift = 0.0;  // mu_z on purchase, mu_x on liquidation
    double marginal_output = 0.0;    // leading expansion coefficient
    double curvature_compound = 0.0; // -2 a2 or -2 b2
    double kappa_y = 0.0;
    double kappa_z_or_x = 0.0;
    double depth_marg_y = 0.0;
};

inline MetricsSample sample_purchase(const CoupledState& state, double mu_y) {
    const double kExpansionStep = 1e-3;
    MetricsSample s;
    s.mu_y = mu_y;
    s.trade_in = input_for_drift(state.pool_yx(), mu_y);
    s.value_discrepancy = value_discrepancy_purchase(state, mu_y);
    s.indicator = inflation_indicator(state, mu_y).value;
    s.transmitted_drift = drift_transmission_purchase(state, mu_y);
    s.marginal_output = marginal_output_purchase(state, mu_y, kExpansionStep).order1;
    const CompoundCurvature c = compound_curvature_purchase(state, mu_y);
    s.curvature_compound = -2.0 * c.second_order;
    s.kappa_y = c.kappa_first;
    s.kappa_z_or_x = c.kappa_second;
    s.depth_marg_y = marginal_depth(state.pool_yx(), mu_y);
    return s;
}

inline MetricsSample sample_liquidation(const CoupledState& state, double mu_y) {
    const double kExpansionStep = 1e-3;
    MetricsSample s;
    s.mu_y = mu_y;
    s.trade_in = input_for_drift(state.pool_zy().flipped(), mu_y);
    s.value_discrepancy = value_discrepancy_liquidation(state, mu_y);
    s.transmitted_drift = drift_transmission_liquidation(state, mu_y);
    s.marginal_output = marginal_output_liquidation(state, mu_y, kExpansionStep).order1;
    const CompoundCurvature c = compound_curvature_liquidation(state, mu_y);
    s.curvature_compound = -2.0 * c.second_order;
    s.kappa_y = c.kappa_first;
    s.kappa_z_or_x = c.kappa_second;
    s.depth_marg_y = marginal_depth(state.pool_zy().flipped(), mu_y);
    return s;
}

}  // namespace ccm

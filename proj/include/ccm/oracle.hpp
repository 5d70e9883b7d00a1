#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccm/coupled.hpp"
#include "ccm/numeric.hpp"
#include "ccm/pool.hpp"

namespace ccm {

// Independent numerical oracles: sequential-swap brute force for the compound
// closed forms, finite-difference checks for every derivative identity, and
// the cross-check suite behind the CLI verify command. The oracle routes
// never share an implementation path with the expressions they check.

enum class TradeDirection { Purchase, Liquidation };

struct OracleReport {
    std::string name;
    double max_rel_error = 0.0;
    int samples = 0;
    std::string worst_case_input;
    double tolerance = 0.0;
    bool passed = false;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

inline double rel_error(double got, double expected) {
    const double scale = std::max({std::abs(got), std::abs(expected), 1e-300});
    return std::abs(got - expected) / scale;
}

// Gold standard for the compound trades: both legs executed through
// swap_exact_in only, never through a compound closed form.
inline std::pair<double, CoupledState> sequential_swap_oracle(const CoupledState& state,
                                                              double amount,
                                                              TradeDirection direction) {
    validate(state);
    CoupledState post = state;
    if (direction == TradeDirection::Purchase) {
        const TradeResult leg1 = swap_exact_in(state.pool_yx(), amount);
        const TradeResult leg2 = swap_exact_in(state.pool_zy(), leg1.amount_out);
        post.x += amount;
        post.y1 -= leg1.amount_out;
        post.y2 += leg1.amount_out;
        post.z -= leg2.amount_out;
        return {leg2.amount_out, post};
    }
    const TradeResult leg1 = swap_exact_in(state.pool_zy().flipped(), amount);
    const TradeResult leg2 = swap_exact_in(state.pool_yx().flipped(), leg1.amount_out);
    post.z += amount;
    post.y2 -= leg1.amount_out;
    post.y1 += leg1.amount_out;
    post.x -= leg2.amount_out;
    return {leg2.amount_out, post};
}

// Randomized coupled states spanning the case-study and stress scales:
// log-uniform reserves in [1e3, 1e12], discounts from a fixed menu.
inline std::vector<CoupledState> random_states(int n, std::uint64_t seed = kDefaultSeed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_reserve(3.0, 12.0);
    const double gammas[] = {1.0, 0.997, 0.97, 0.9};
    std::uniform_int_distribution<int> gamma_pick(0, 3);
    std::vector<CoupledState> states;
    states.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        CoupledState s;
        s.x = std::pow(10.0, log_reserve(rng));
        s.y1 = std::pow(10.0, log_reserve(rng));
        s.y2 = std::pow(10.0, log_reserve(rng));
        s.z = std::pow(10.0, log_reserve(rng));
        s.gamma1 = gammas[gamma_pick(rng)];
        s.gamma2 = gammas[gamma_pick(rng)];
        states.push_back(s);
    }
    return states;
}

namespace oracle_detail {

inline std::string describe(const CoupledState& s, double value, const char* label) {
    std::ostringstream out;
    out.precision(17);
    out << "state{x=" << s.x << ",y1=" << s.y1 << ",y2=" << s.y2 << ",z=" << s.z
        << ",g1=" << s.gamma1 << ",g2=" << s.gamma2 << "} " << label << "=" << value;
    return out.str();
}

// Local constant-product swap math, deliberately re-stated here so the depth
// and derivative oracles do not flow through pool.hpp's formulas.
inline double cp_out(double base, double quote, double gamma, double in) {
    return quote * gamma * in / (base + gamma * in);
}

inline double cp_post_price_quote(double base, double quote, double gamma, double in) {
    // Quote-asset price read off the invariant-side reserves after the trade.
    const double b = base + gamma * in;
    const double q = quote - cp_out(base, quote, gamma, in);
    return b / q;
}

}  // namespace oracle_detail

// Generic accumulator: fold per-sample relative errors into a report.
class OracleCheck {
  public:
    OracleCheck(std::string name, double tolerance)
        : report_{std::move(name), 0.0, 0, "", tolerance, true} {}

    void sample(double got, double expected, const std::string& input_desc) {
        const double err = rel_error(got, expected);
        ++report_.samples;
        if (err > report_.max_rel_error) {
            report_.max_rel_error = err;
            report_.worst_case_input = input_desc;
        }
    }

    // For sign/ordering style checks: record a violation magnitude directly.
    void violation(double magnitude, const std::string& input_desc) {
        ++report_.samples;
        if (magnitude > report_.max_rel_error) {
            report_.max_rel_error = magnitude;
            report_.worst_case_input = input_desc;
        }
    }

    OracleReport finish() {
        report_.passed = report_.max_rel_error <= report_.tolerance;
        return report_;
    }

  private:
    OracleReport report_;
};

using CompoundFn = std::function<double(const CoupledState&, double)>;

// Compound closed form versus sequential two-leg execution. `candidate` is
// injectable so a corrupted closed form is reported, not asserted.
inline OracleReport check_composition(const CoupledState& state,
                                      const std::vector<double>& grid,
                                      TradeDirection direction,
                                      const CompoundFn& candidate,
                                      const std::string& name,
                                      double tolerance = 1e-12) {
    OracleCheck check(name, tolerance);
    const PoolState entry = direction == TradeDirection::Purchase
                                ? state.pool_yx()
                                : state.pool_zy().flipped();
    for (double mu : grid) {
        const double amount = input_for_drift(entry, mu);
        const double expected = sequential_swap_oracle(state, amount, direction).first;
        check.sample(candidate(state, amount), expected,
                     oracle_detail::describe(state, amount, "amount"));
    }
    return check.finish();
}

// Transmission closed form versus the drift measured on the destination pool
// after a sequential trade.
inline OracleReport check_transmission(const CoupledState& state,
                                       const std::vector<double>& grid,
                                       TradeDirection direction,
                                       double tolerance = 1e-9) {
    const bool purchase = direction == TradeDirection::Purchase;
    OracleCheck check(purchase ? "transmission_purchase" : "transmission_liquidation", tolerance);
    const PoolState entry = purchase ? state.pool_yx() : state.pool_zy().flipped();
    for (double mu : grid) {
        const double amount = input_for_drift(entry, mu);
        const CoupledState pre = state;
        double measured;
        if (purchase) {
            const double lambda = swap_exact_in(pre.pool_yx(), amount).amount_out;
            measured = drift_quote(pre.pool_zy(), lambda);
        } else {
            const double lambda = swap_exact_in(pre.pool_zy().flipped(), amount).amount_out;
            measured = drift_quote(pre.pool_yx().flipped(), lambda);
        }
        const double closed = purchase ? drift_transmission_purchase(state, mu)
                                       : drift_transmission_liquidation(state, mu);
        check.sample(closed, measured, oracle_detail::describe(state, mu, "mu_y"));
    }
    return check.finish();
}

// Marginal depth against the reciprocal finite difference of the incremental
// drift (price move relative to the current post-drift price), built from
// the oracle's own constant-product math.
inline OracleReport check_depth_fd(const PoolState& pool,
                                   const std::vector<double>& grid,
                                   const std::string& name,
                                   double tolerance = 1e-6) {
    OracleCheck check(name, tolerance);
    for (double mu : grid) {
        const double delta = input_for_drift(pool, mu);
        const double p_here =
            oracle_detail::cp_post_price_quote(pool.base, pool.quote, pool.gamma, delta);
        // Differentiate in base-reserve units so the step picks up the pool's
        // scale instead of an absolute epsilon.
        auto incremental_drift = [&](double t) {
            return oracle_detail::cp_post_price_quote(pool.base, pool.quote, pool.gamma,
                                                      delta + t * pool.base) / p_here - 1.0;
        };
        const double slope = fd_derivative(incremental_drift, 0.0, 1) / pool.base;
        CoupledState tag;  // describe() wants a coupled state; reuse for the pool
        tag.x = pool.base;
        tag.y1 = pool.quote;
        tag.y2 = tag.z = 1.0;
        tag.gamma1 = tag.gamma2 = pool.gamma;
        check.sample(marginal_depth(pool, mu), 1.0 / slope,
                     oracle_detail::describe(tag, mu, "mu"));
    }
    return check.finish();
}

// Step-halving of the second-order expansion residual: cubic decay means
// each halving shrinks the residual by a factor near 8.
inline OracleReport check_expansion_cubic(const CoupledState& state,
                                          TradeDirection direction,
                                          const std::string& name) {
    // Tolerance expressed on |ratio - 8| / 8; [6, 10] maps to 0.25.
    OracleCheck check(name, 0.25);
    const double mus[] = {0.05, 0.5, 1.5};
    const double steps[] = {1e-2, 5e-3, 2.5e-3};
    for (double mu : mus) {
        double prev = 0.0;
        for (int i = 0; i < 3; ++i) {
            const ExpansionReport report =
                direction == TradeDirection::Purchase
                    ? marginal_output_purchase(state, mu, steps[i])
                    : marginal_output_liquidation(state, mu, steps[i]);
            const double res = std::abs(report.residual);
            if (i > 0) {
                const double ratio = prev / res;
                check.sample(ratio, 8.0, oracle_detail::describe(state, mu, "mu_y"));
            }
            prev = res;
        }
    }
    return check.finish();
}

// Full cross-check suite over a drift grid. Deterministic given (state,
// grid); an empty grid yields an empty report list.
inline std::vector<OracleReport> run_suite(const CoupledState& state,
                                           const std::vector<double>& grid) {
    validate(state);
    std::vector<OracleReport> reports;
    if (grid.empty()) return reports;

    reports.push_back(check_composition(
        state, grid, TradeDirection::Purchase,
        [](const CoupledState& s, double a) { return purchase_compound(s, a).amount_out; },
        "composition_purchase"));
    reports.push_back(check_composition(
        state, grid, TradeDirection::Liquidation,
        [](const CoupledState& s, double a) { return liquidate_compound(s, a).amount_out; },
        "composition_liquidation"));

    {
        OracleCheck check("invariant_preservation", 1e-12);
        for (double mu : grid) {
            for (const PoolState& pool : {state.pool_yx(), state.pool_zy()}) {
                const double delta = input_for_drift(pool, mu);
                const double out = swap_out(pool, delta);
                const double k = invariant_value(pool);
                const double k_post =
                    invariant_at(pool, pool.base + pool.gamma * delta, pool.quote - out);
                check.sample(k_post, k, oracle_detail::describe(state, delta, "delta"));
            }
        }
        reports.push_back(check.finish());
    }

    {
        OracleCheck check("y_conservation", 1e-12);
        for (double mu : grid) {
            const double dx = input_for_drift(state.pool_yx(), mu);
            const CoupledState p = transition_purchase(state, dx);
            check.sample(p.y1 + p.y2, state.y1 + state.y2,
                         oracle_detail::describe(state, dx, "delta_x"));
            const double gz = input_for_drift(state.pool_zy().flipped(), mu);
            const CoupledState l = transition_liquidation(state, gz);
            check.sample(l.y1 + l.y2, state.y1 + state.y2,
                         oracle_detail::describe(state, gz, "gamma_z"));
        }
        reports.push_back(check.finish());
    }

    {
        OracleCheck check("decoupled_ordering", 0.0);
        for (double mu : grid) {
            const double dx = input_for_drift(state.pool_yx(), mu);
            const double coupled = purchase_compound(state, dx).amount_out;
            const double decoupled = purchase_decoupled(state, dx);
            check.violation(std::max(0.0, coupled - decoupled),
                            oracle_detail::describe(state, dx, "delta_x"));
        }
        reports.push_back(check.finish());
    }

    {
        OracleCheck sign_purchase("purchase_inflation_sign", 0.0);
        OracleCheck sign_liq("liquidation_deflation_sign", 0.0);
        OracleCheck agreement("indicator_sign_agreement", 0.0);
        for (double mu : grid) {
            const double vp = value_discrepancy_purchase(state, mu);
            const double vl = value_discrepancy_liquidation(state, mu);
            sign_purchase.violation(mu > 0.0 ? std::max(0.0, -vp) : std::abs(vp),
                                    oracle_detail::describe(state, mu, "mu_y"));
            sign_liq.violation(mu > 0.0 ? std::max(0.0, vl) : std::abs(vl),
                               oracle_detail::describe(state, mu, "mu_y"));
            const IndicatorPoint l = inflation_indicator(state, mu);
            if (l.in_regime) {
                const bool agree = (l.value > 0.0) == (vp > 0.0) && (l.value < 0.0) == (vp < 0.0);
                agreement.violation(agree ? 0.0 : 1.0,
                                    oracle_detail::describe(state, mu, "mu_y"));
            }
        }
        reports.push_back(sign_purchase.finish());
        reports.push_back(sign_liq.finish());
        reports.push_back(agreement.finish());
    }

    reports.push_back(check_transmission(state, grid, TradeDirection::Purchase));
    reports.push_back(check_transmission(state, grid, TradeDirection::Liquidation));

    {
        OracleCheck check("transmission_bound", 0.0);
        const double sup_p = transmission_bound_purchase(state);
        const double sup_l = transmission_bound_liquidation(state);
        for (double mu : grid) {
            check.violation(std::max(0.0, drift_transmission_purchase(state, mu) - sup_p),
                            oracle_detail::describe(state, mu, "mu_y"));
            check.violation(std::max(0.0, drift_transmission_liquidation(state, mu) - sup_l),
                            oracle_detail::describe(state, mu, "mu_y"));
        }
        reports.push_back(check.finish());
    }

    {
        OracleCheck check("drift_roundtrip", 1e-10);
        for (double mu : grid) {
            if (mu == 0.0) continue;
            const double delta = input_for_drift(state.pool_yx(), mu);
            check.sample(drift_quote(state.pool_yx(), delta), mu,
                         oracle_detail::describe(state, mu, "mu_y"));
        }
        reports.push_back(check.finish());
    }

    reports.push_back(check_depth_fd(state.pool_yx(), grid, "depth_fd_yx"));
    reports.push_back(check_depth_fd(state.pool_zy().flipped(), grid, "depth_fd_zy"));

    reports.push_back(check_expansion_cubic(state, TradeDirection::Purchase,
                                            "expansion_cubic_purchase"));
    reports.push_back(check_expansion_cubic(state, TradeDirection::Liquidation,
                                            "expansion_cubic_liquidation"));

    {
        // Cross-check fixture: for chained constant products the purchase
        // value discrepancy collapses to gamma2 * x * (sqrt(mu+1) - 1)^2 and
        // the liquidation one to the matching rational form.
        OracleCheck purchase_form("value_purchase_closed_form", 1e-9);
        OracleCheck liq_form("value_liquidation_closed_form", 1e-9);
        for (double mu : grid) {
            const double u = std::sqrt(mu + 1.0);
            const double vp_closed = state.gamma2 * state.x * (u - 1.0) * (u - 1.0);
            purchase_form.sample(value_discrepancy_purchase(state, mu), vp_closed,
                                 oracle_detail::describe(state, mu, "mu_y"));
            const double lam = state.y2 * (u - 1.0) / u;
            const double g1l = state.gamma1 * lam;
            const double vl_closed = -state.x * state.gamma1 * g1l * lam /
                                     (state.y1 * (state.y1 + g1l));
            liq_form.sample(value_discrepancy_liquidation(state, mu), vl_closed,
                            oracle_detail::describe(state, mu, "mu_y"));
        }
        reports.push_back(purchase_form.finish());
        reports.push_back(liq_form.finish());
    }

    return reports;
}

}  // namespace ccm

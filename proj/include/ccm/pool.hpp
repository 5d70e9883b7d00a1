#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "ccm/numeric.hpp"

namespace ccm {

// Single-pool CFMM primitives: invariant evaluation, swap execution, spot and
// marginal execution prices, price drift and its inverse, and swap depth.
// Orientation convention: a swap takes the pool's base asset in and pays the
// quote asset out. Selling the quote asset is done on flipped().

enum class Asset { Base, Quote };

enum class Invariant { ConstantProduct };

struct PoolState {
    double base = 0.0;   // reserve of the base asset (x)
    double quote = 0.0;  // reserve of the quote asset (y)
    double gamma = 1.0;  // discount factor, 1 - fee
    Invariant kind = Invariant::ConstantProduct;

    PoolState flipped() const { return {quote, base, gamma, kind}; }
};

inline void validate(const PoolState& pool) {
    if (!(pool.base > 0.0) || !std::isfinite(pool.base) ||
        !(pool.quote > 0.0) || !std::isfinite(pool.quote)) {
        throw std::domain_error("PoolState: reserves must be positive and finite");
    }
    if (!(pool.gamma > 0.0) || pool.gamma > 1.0) {
        throw std::domain_error("PoolState: gamma must lie in (0, 1]");
    }
}

// phi evaluated at arbitrary reserves for the pool's invariant kind.
inline double invariant_at(const PoolState& pool, double base, double quote) {
    switch (pool.kind) {
        case Invariant::ConstantProduct:
            return base * quote;
    }
    throw std::logic_error("invariant_at: unknown invariant kind");
}

inline double invariant_value(const PoolState& pool) {
    validate(pool);
    return invariant_at(pool, pool.base, pool.quote);
}

// Spot price of the named asset, denominated in the other asset. For the
// constant product this is the plain reserve ratio.
inline double spot_price(const PoolState& pool, Asset of) {
    validate(pool);
    switch (pool.kind) {
        case Invariant::ConstantProduct:
            return of == Asset::Base ? pool.quote / pool.base : pool.base / pool.quote;
    }
    throw std::logic_error("spot_price: unknown invariant kind");
}

namespace detail {

inline void require_nonnegative_input(double delta_in, const char* what) {
    if (!(delta_in >= 0.0) || !std::isfinite(delta_in)) {
        throw std::domain_error(std::string(what) + ": input amount must be nonnegative and finite");
    }
}

}  // namespace detail

// Output amount for an exact-in swap: the Lambda with
// phi(base + gamma*delta, quote - Lambda) = k. Closed form per invariant kind.
inline double swap_out(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "swap_out");
    switch (pool.kind) {
        case Invariant::ConstantProduct:
            return pool.quote * pool.gamma * delta_in / (pool.base + pool.gamma * delta_in);
    }
    throw std::logic_error("swap_out: unknown invariant kind");
}

// Same quantity solved from the invariant residual by bracketed root finding.
// Extension path for non-closed-form invariants; also the dual route the
// tests hold the closed form against.
inline double swap_out_numeric(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "swap_out_numeric");
    if (delta_in == 0.0) return 0.0;
    const double k = invariant_value(pool);
    const double in_side = pool.base + pool.gamma * delta_in;
    auto residual = [&](double lambda) {
        return invariant_at(pool, in_side, pool.quote - lambda) - k;
    };
    const double hi = pool.quote * (1.0 - 1e-16);
    return find_root_bracketed(residual, 0.0, hi, 1e-14, 200);
}

// dLambda/dDelta at the given executed size.
inline double swap_out_d1(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "swap_out_d1");
    switch (pool.kind) {
        case Invariant::ConstantProduct: {
            const double s = pool.base + pool.gamma * delta_in;
            return pool.gamma * pool.base * pool.quote / (s * s);
        }
    }
    throw std::logic_error("swap_out_d1: unknown invariant kind");
}

// d^2Lambda/dDelta^2 at the given executed size. Negative for any concave
// invariant.
inline double swap_out_d2(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "swap_out_d2");
    switch (pool.kind) {
        case Invariant::ConstantProduct: {
            const double s = pool.base + pool.gamma * delta_in;
            return -2.0 * pool.gamma * pool.gamma * pool.base * pool.quote / (s * s * s);
        }
    }
    throw std::logic_error("swap_out_d2: unknown invariant kind");
}

inline double marginal_exec_price(const PoolState& pool, double delta_in) {
    return swap_out_d1(pool, delta_in);
}

struct TradeResult {
    double amount_in = 0.0;
    double amount_out = 0.0;
    PoolState post_state;
    double effective_price = 0.0;    // amount_in / amount_out
    double marginal_exec_price = 0.0;  // dLambda/dDelta at the executed size
};

// Executes an exact-in swap. The post state credits the full input to the
// base reserve; the invariant constant is recomputed from the post state, so
// sequential swaps stay well-defined.
inline TradeResult swap_exact_in(const PoolState& pool, double delta_in) {
    const double out = swap_out(pool, delta_in);
    const double d1 = swap_out_d1(pool, delta_in);
    TradeResult result;
    result.amount_in = delta_in;
    result.amount_out = out;
    result.post_state = pool;
    result.post_state.base = pool.base + delta_in;
    result.post_state.quote = pool.quote - out;
    result.marginal_exec_price = d1;
    // Zero size is a valid degenerate trade; report the limiting price.
    result.effective_price = delta_in > 0.0 ? delta_in / out : 1.0 / d1;
    return result;
}

struct DriftPoint {
    double mu = 0.0;
    Asset asset = Asset::Base;
};

struct DriftPair {
    DriftPoint base;
    DriftPoint quote;
};

// Relative drift of the quote asset's price caused by a base-in trade. Zero
// at zero size, strictly increasing for the constant product. Written in the
// cancellation-free form t(2x + t)/x^2 with t = gamma*delta, so small drifts
// keep full relative precision.
inline double drift_quote(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "drift_quote");
    switch (pool.kind) {
        case Invariant::ConstantProduct: {
            const double t = pool.gamma * delta_in;
            return t * (2.0 * pool.base + t) / (pool.base * pool.base);
        }
    }
    throw std::logic_error("drift_quote: unknown invariant kind");
}

inline DriftPair price_drift(const PoolState& pool, double delta_in) {
    validate(pool);
    detail::require_nonnegative_input(delta_in, "price_drift");
    switch (pool.kind) {
        case Invariant::ConstantProduct: {
            const double t = pool.gamma * delta_in;
            const double s = pool.base + t;
            DriftPair drift;
            // Magnitude of the base price's relative decline, 1 - x^2/s^2,
            // in the same cancellation-free form.
            drift.base = {t * (2.0 * pool.base + t) / (s * s), Asset::Base};
            drift.quote = {drift_quote(pool, delta_in), Asset::Quote};
            return drift;
        }
    }
    throw std::logic_error("price_drift: unknown invariant kind");
}

namespace detail {

inline void require_nonnegative_drift(double mu, const char* what) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw std::domain_error(std::string(what) + ": drift must be nonnegative and finite");
    }
}

}  // namespace detail

// Inverse of drift_quote: the input amount that produces the target quote
// drift.
inline double input_for_drift(const PoolState& pool, double mu_quote) {
    validate(pool);
    detail::require_nonnegative_drift(mu_quote, "input_for_drift");
    switch (pool.kind) {
        case Invariant::ConstantProduct:
            // x (sqrt(mu+1) - 1) / gamma, with the difference rewritten as
            // mu / (sqrt(mu+1) + 1) to avoid cancellation at small drift.
            return pool.base * mu_quote / ((std::sqrt(mu_quote + 1.0) + 1.0) * pool.gamma);
    }
    throw std::logic_error("input_for_drift: unknown invariant kind");
}

// Marginal swap depth at drift level mu: input liquidity absorbed per unit of
// additional relative price move, measured against the current (post-drift)
// price. Equals -Lambda'/Lambda'' on the trade trajectory.
inline double marginal_depth(const PoolState& pool, double mu_quote) {
    const double delta = input_for_drift(pool, mu_quote);
    const double d1 = swap_out_d1(pool, delta);
    const double d2 = swap_out_d2(pool, delta);
    if (!(d2 < 0.0)) {
        throw std::domain_error("marginal_depth: invariant is not strictly concave here");
    }
    return -d1 / d2;
}

// dDelta/dmu from the pre-trade state: the global drift sensitivity that
// enters the compound expansion coefficients. Differs from marginal_depth by
// a factor of (mu + 1).
inline double input_per_drift(const PoolState& pool, double mu_quote) {
    return marginal_depth(pool, mu_quote) / (mu_quote + 1.0);
}

// d^2Delta/dmu^2.
inline double input_per_drift_slope(const PoolState& pool, double mu_quote) {
    validate(pool);
    detail::require_nonnegative_drift(mu_quote, "input_per_drift_slope");
    switch (pool.kind) {
        case Invariant::ConstantProduct:
            return -input_per_drift(pool, mu_quote) / (2.0 * (mu_quote + 1.0));
    }
    throw std::logic_error("input_per_drift_slope: unknown invariant kind");
}

// Total depth: marginal depth integrated over [0, mu].
inline double total_depth(const PoolState& pool, double mu_quote) {
    validate(pool);
    detail::require_nonnegative_drift(mu_quote, "total_depth");
    if (mu_quote == 0.0) return 0.0;
    auto integrand = [&](double mu) { return marginal_depth(pool, mu); };
    return adaptive_simpson(integrand, 0.0, mu_quote, 1e-12 * pool.base);
}

}  // namespace ccm

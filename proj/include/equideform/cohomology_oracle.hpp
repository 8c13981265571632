#ifndef EQUIDEFORM_COHOMOLOGY_ORACLE_HPP
#define EQUIDEFORM_COHOMOLOGY_ORACLE_HPP

// Brute-force H^1 of cyclic groups on truncated modules of vector fields.
//
// For R > first, Q = x^first k[[x]] d/dx / x^R k[[x]] d/dx is itself a
// G-module (sigma preserves the x-adic filtration), so its action and trace
// matrices are exact. H^1 of the untruncated module is read off inside a
// window of degrees <= W: cocycles of Q projected to the window, modulo the
// projected coboundaries. Truncation artefacts near degree R are pushed away
// by the buffer R - W and detected by a precision bump.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <equideform/error.hpp>
#include <equideform/linalg.hpp>
#include <equideform/node_local.hpp>
#include <equideform/series.hpp>
#include <equideform/smooth_local.hpp>

namespace equideform::oracle {

/// Smooth: k[[x]] d/dx (basis from degree 0). NodeBranch: x k[[x]] d/dx, one
/// summand of the node module.
enum class Shape { Smooth, NodeBranch };

inline int first_degree(Shape s) { return s == Shape::Smooth ? 0 : 1; }

/// Basis x^i d/dx for first <= i < top.
struct TruncatedModule {
    u64 p;
    int first;
    int top;
    FpMatrix action;  // generator
    FpMatrix trace;   // sum over the abstract group Z/p^n

    std::size_t dim() const { return static_cast<std::size_t>(top - first); }
};

/// Builds the module from the generator series alone: column i holds
/// (x^i o s) / s', and the trace is sum_{k < p^n} A^k.
inline TruncatedModule truncated_module(const smooth::CyclicSmoothAction& a, int first, int top) {
    const u64 p = a.p();
    if (first < 0 || top <= first) throw HypothesisError("empty truncated module");
    if (a.precision() < top + 1) {
        throw PrecisionError("truncated module up to degree " + std::to_string(top) + " needs precision " +
                             std::to_string(top + 1) + ", action has " + std::to_string(a.precision()));
    }
    const std::size_t d = static_cast<std::size_t>(top - first);
    const std::size_t len = static_cast<std::size_t>(top);
    const Series& s = a.generator().image();
    const Series ds_inv = inverse(derivative(s));
    FpMatrix A(d, d, p);
    std::vector<u64> pw = detail::pow_trunc(s.coefficients(), static_cast<u64>(first), len, p);
    for (std::size_t c = 0; c < d; ++c) {
        const std::vector<u64> col = detail::mul_trunc(pw, ds_inv.coefficients(), len, p);
        for (std::size_t r = 0; r < d; ++r) A.set(r, c, col[r + static_cast<std::size_t>(first)]);
        if (c + 1 < d) pw = detail::mul_trunc(pw, s.coefficients(), len, p);
    }
    FpMatrix T(d, d, p);
    FpMatrix P = FpMatrix::identity(d, p);
    for (u64 k = 0; k < a.group_order(); ++k) {
        T = T + P;
        P = P * A;
    }
    if (!(P == FpMatrix::identity(d, p))) throw DataError("generator^(p^n) does not act trivially on the module");
    return TruncatedModule{p, first, top, std::move(A), std::move(T)};
}

namespace detail_oracle {

inline void check_rank_nullity(const FpMatrix& m) {
    if (m.rank() + m.nullity() != m.cols()) throw InternalError("rank + nullity != number of columns");
}

} // namespace detail_oracle

/// dim pi(ker Tr) - dim pi(im(1 - sigma)), pi the projection to degrees <= window.
inline int h1_in_window(const TruncatedModule& M, int window) {
    if (window < M.first || window >= M.top) throw HypothesisError("window outside the module");
    const std::size_t low = static_cast<std::size_t>(window - M.first + 1);
    detail_oracle::check_rank_nullity(M.trace);
    const std::vector<std::vector<u64>> z = M.trace.nullspace();
    FpMatrix Z(low, z.size(), M.p);
    for (std::size_t c = 0; c < z.size(); ++c) {
        for (std::size_t r = 0; r < low; ++r) Z.set(r, c, z[c][r]);
    }
    // (1 - sigma) x^i d/dx has valuation > i, so only low generators reach the window.
    const FpMatrix cob = (FpMatrix::identity(M.dim(), M.p) - M.action).columns(0, low).rows_range(0, low);
    detail_oracle::check_rank_nullity(cob);
    const int zdim = static_cast<int>(Z.rank());
    const int bdim = static_cast<int>(cob.rank());
    if (bdim > zdim) throw InternalError("coboundaries exceed cocycles in the window");
    return zdim - bdim;
}

/// 2*different + p.
inline int default_window(const smooth::RamificationProfile& prof) {
    return 2 * prof.different + static_cast<int>(prof.p);
}

/// different + largest jump + 1.
inline int default_buffer(const smooth::RamificationProfile& prof) {
    return prof.different + (prof.jumps.empty() ? 0 : prof.jumps.back()) + 1;
}

/// Precision an action needs for a run at (window, ambient), bump included.
inline int required_precision(u64 p, int ambient) { return ambient + 2 * static_cast<int>(p) + 1; }

namespace detail_oracle {

inline int branch_h1(const smooth::CyclicSmoothAction& a, Shape shape, int window, int ambient) {
    const TruncatedModule M = truncated_module(a, first_degree(shape), ambient);
    return h1_in_window(M, window);
}

inline void check_ambient(const smooth::CyclicSmoothAction& a, int window, int ambient) {
    const smooth::RamificationProfile prof = smooth::ramification_profile(a);
    if (ambient < window + default_buffer(prof)) {
        throw HypothesisError("ambient precision " + std::to_string(ambient) + " is below window + buffer = " +
                              std::to_string(window + default_buffer(prof)));
    }
}

} // namespace detail_oracle

/// H^1(G, M) for the smooth module or a single node branch, stable under
/// (window, ambient) -> (window + p, ambient + 2p).
inline int h1_dimension_bruteforce(const smooth::CyclicSmoothAction& a, Shape shape, int window, int ambient) {
    detail_oracle::check_ambient(a, window, ambient);
    const int p = static_cast<int>(a.p());
    const int first = detail_oracle::branch_h1(a, shape, window, ambient);
    const int bumped = detail_oracle::branch_h1(a, shape, window + p, ambient + 2 * p);
    if (first != bumped) {
        throw StabilizationFailure(first, bumped,
                                   "H^1 not stable at window " + std::to_string(window) + ", ambient " +
                                       std::to_string(ambient));
    }
    return first;
}

/// H^1(G, x k[[x]] d/dx + y k[[y]] d/dy), summed over the branches.
inline int h1_dimension_bruteforce(const node::CyclicNodeAction& a, int window, int ambient) {
    return h1_dimension_bruteforce(a.x_branch(), Shape::NodeBranch, window, ambient) +
           h1_dimension_bruteforce(a.y_branch(), Shape::NodeBranch, window, ambient);
}

struct OracleRun {
    int dimension;
    int window;
    int ambient;
    int attempts;
};

/// Default window and buffer; on StabilizationFailure the buffer doubles up to
/// buffer_cap. build(N) must return the same action at precision N.
inline OracleRun h1_dimension_auto(const std::function<smooth::CyclicSmoothAction(int)>& build, Shape shape,
                                   int buffer_cap = 512) {
    const int p0 = 64;
    const smooth::CyclicSmoothAction probe = build(p0);
    const smooth::RamificationProfile prof = smooth::ramification_profile(probe);
    const int window = default_window(prof);
    int buffer = default_buffer(prof);
    int attempts = 0;
    for (;;) {
        ++attempts;
        const int ambient = window + buffer;
        const smooth::CyclicSmoothAction a = build(required_precision(probe.p(), ambient));
        try {
            return OracleRun{h1_dimension_bruteforce(a, shape, window, ambient), window, ambient, attempts};
        } catch (const StabilizationFailure&) {
            if (2 * buffer > buffer_cap) throw;
            buffer *= 2;
        }
    }
}

/// Window and ambient for a node: the larger of the two branch defaults.
inline std::pair<int, int> node_settings(const node::CyclicNodeAction& a) {
    int window = 1, ambient = 2;
    for (node::Branch b : {node::Branch::X, node::Branch::Y}) {
        const smooth::RamificationProfile prof = smooth::ramification_profile(a.branch(b));
        window = std::max(window, default_window(prof));
        ambient = std::max(ambient, default_window(prof) + default_buffer(prof));
    }
    ambient = std::max(ambient, window + 1);
    return {window, ambient};
}

/// Whether the 1-cocycle with value c on the generator is a coboundary, by a
/// linear solve in the truncated module. c must satisfy Tr c = 0.
inline bool cocycle_class_is_zero(const smooth::CyclicSmoothAction& a, Shape shape, const Series& c,
                                  std::optional<int> window_opt = std::nullopt) {
    const smooth::RamificationProfile prof = smooth::ramification_profile(a);
    const int window = window_opt.value_or(default_window(prof));
    const int ambient = window + default_buffer(prof);
    const int first = first_degree(shape);
    if (c.precision() < ambient) {
        throw PrecisionError("cocycle known to " + std::to_string(c.precision()) + ", need " + std::to_string(ambient));
    }
    for (int i = 0; i < first; ++i) {
        if (c[static_cast<std::size_t>(i)] != 0) throw DataError("cocycle value lies outside the module");
    }
    const TruncatedModule M = truncated_module(a, first, ambient);
    std::vector<u64> v(M.dim());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = c[r + static_cast<std::size_t>(first)];
    for (u64 t : M.trace.apply(v)) {
        if (t != 0) throw DataError("not a cocycle: its trace does not vanish");
    }
    const std::size_t low = static_cast<std::size_t>(window - first + 1);
    const FpMatrix cob = (FpMatrix::identity(M.dim(), M.p) - M.action).columns(0, low).rows_range(0, low);
    v.resize(low);
    return cob.solve(v).has_value();
}

/// r = min nu_z(theta(x^i d/dx)), 0 <= i < p, for an order-p action; when
/// 2m + 1 = 0 mod p this must equal (2m+1)(p-1)/p.
inline int trace_image_principal_valuation(const smooth::CyclicSmoothAction& a) {
    const u64 p = a.p();
    if (a.faithful_order() != p || !a.is_faithful()) throw HypothesisError("requires a faithful action of order p");
    const smooth::RamificationProfile prof = smooth::ramification_profile(a);
    const int N = a.precision();
    const Series z = smooth::norm_parameter(a);
    std::optional<int> r;
    for (u64 i = 0; i < p; ++i) {
        const Series t = smooth::theta(a, smooth::VectorField(Series::monomial(p, 1, static_cast<int>(i), N)), z);
        const Valuation v = t.valuation();
        if (v.is_finite()) r = r ? std::min(*r, v.value()) : v.value();
    }
    if (!r) throw PrecisionError("theta vanishes on every basis field at this precision");
    const long long m = *prof.conductor;
    const long long P = static_cast<long long>(p);
    if ((2 * m + 1) % P == 0) {
        const long long expect = (2 * m + 1) * (P - 1) / P;
        if (*r != expect) {
            throw InternalError("principal valuation " + std::to_string(*r) + " differs from (2m+1)(p-1)/p = " +
                                std::to_string(expect));
        }
    }
    return *r;
}

/// Searches all f = 1 + c_1 x + ... + c_{M-1} x^{M-1} for Tr(f d/dx) = 0 mod x^M.
/// Complete: a unit witness for the full module reduces to one here.
inline std::optional<Series> exhaustive_unit_witness_search(const smooth::CyclicSmoothAction& a, int M) {
    const TruncatedModule Q = truncated_module(a, 0, M);
    const u64 p = Q.p;
    const FpMatrix rest = Q.trace.columns(1, Q.dim());
    std::vector<u64> rhs(Q.dim());
    for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = fp::neg(Q.trace.at(r, 0), p);
    const auto sol = rest.solve(rhs);
    if (!sol) return std::nullopt;
    std::vector<u64> c(Q.dim(), 0);
    c[0] = 1;
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = (*sol)[i - 1];
    return Series::from_raw(p, std::move(c));
}

/// Default search precision: window + buffer of the action.
inline int default_search_precision(const smooth::CyclicSmoothAction& a) {
    const smooth::RamificationProfile prof = smooth::ramification_profile(a);
    return default_window(prof) + default_buffer(prof);
}

} // namespace equideform::oracle

#endif

#ifndef EQUIDEFORM_TOWER_HPP
#define EQUIDEFORM_TOWER_HPP

// Order-p^2 actions on k[[x]] from Artin-Schreier-Witt towers.
//
// Over the u-line, take y0^p - y0 = u and y1^p - y1 = F(y0) with
// F = a1(u) + C(y0, u), C(a, b) = (a^p + b^p - (a + b)^p) / p. The Witt
// generator acts by y0 -> y0 + 1, y1 -> y1 + G(y0), G = C(y0, 1). Above u = oo
// the tower is totally ramified; after removing p-th powers from F its degree
// d is prime to p, and x = (c / y1)^{1/d} (c the leading coefficient of F) is a
// uniformizer in which the generator becomes an explicit series.

#include <string>
#include <vector>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>
#include <equideform/series.hpp>
#include <equideform/smooth_local.hpp>

namespace equideform::tower {

/// Dense polynomial over F_p, coefficient of t^i at index i.
using Poly = std::vector<u64>;

namespace detail_poly {

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly add(const Poly& a, const Poly& b, u64 p) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = fp::add(c[i], a[i], p);
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = fp::add(c[i], b[i], p);
    trim(c);
    return c;
}

inline Poly scale(const Poly& a, u64 s, u64 p) {
    Poly c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = fp::mul(a[i], s, p);
    trim(c);
    return c;
}

inline Poly mul(const Poly& a, const Poly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = fp::add(c[i + j], fp::mul(a[i], b[j], p), p);
    }
    trim(c);
    return c;
}

inline Poly pow(const Poly& a, u64 e, u64 p) {
    Poly r{1};
    for (u64 i = 0; i < e; ++i) r = mul(r, a, p);
    return r;
}

/// f(g) for polynomials.
inline Poly compose(const Poly& f, const Poly& g, u64 p) {
    Poly r;
    for (std::size_t k = f.size(); k-- > 0;) r = add(mul(r, g, p), Poly{f[k]}, p);
    return r;
}

/// C(a, b) = (a^p + b^p - (a+b)^p) / p = -sum_{0<i<p} binom(p,i)/p a^i b^{p-i},
/// for polynomials a, b in one variable.
inline Poly witt_carry(const Poly& a, const Poly& b, u64 p) {
    Poly r;
    u64 binom = 1;  // binom(p, i) over the integers, exact for small p
    for (u64 i = 1; i < p; ++i) {
        binom = binom * (p - i + 1) / i;
        const u64 coef = fp::neg((binom / p) % p, p);
        r = add(r, scale(mul(pow(a, i, p), pow(b, p - i, p), p), coef, p), p);
    }
    return r;
}

} // namespace detail_poly

struct TowerSpec {
    u64 p = 2;
    /// a1(u) as a polynomial in u.
    std::vector<i64> a1;
    /// Tame base change x = x'^e, p not dividing e; multiplies the jumps by e.
    int base_change = 1;
};

struct TowerData {
    Poly F;   // reduced right-hand side in y0, degree d prime to p
    Poly G;   // y1 -> y1 + G(y0)
    int d = 0;
    u64 c = 0;
};

/// Reduces y1^p - y1 = F(y0) until deg F is prime to p, tracking G.
inline TowerData tower_data(const TowerSpec& spec) {
    using namespace detail_poly;
    const u64 p = spec.p;
    fp::check_modulus(p);
    if (p > 13) throw HypothesisError("tower construction is limited to p <= 13");
    Poly a1;
    for (i64 v : spec.a1) a1.push_back(fp::reduce(v, p));
    trim(a1);
    Poly u(p + 1, 0);
    u[p] = 1;
    u[1] = fp::neg(1, p);
    TowerData t;
    t.F = add(compose(a1, u, p), witt_carry(Poly{0, 1}, u, p), p);
    t.G = witt_carry(Poly{0, 1}, Poly{1}, p);
    for (;;) {
        if (t.F.empty()) throw DataError("tower equation degenerates (F = 0)");
        const std::size_t deg = t.F.size() - 1;
        if (deg == 0) throw DataError("tower equation has constant right-hand side");
        if (deg % p != 0) break;
        // y1 -> y1 - c y0^k removes c y0^{pk} in favour of c y0^k.
        const u64 c = t.F[deg];
        const std::size_t k = deg / p;
        Poly mono(k + 1, 0);
        mono[k] = c;
        t.F[deg] = 0;
        t.F = add(t.F, mono, p);
        const Poly shifted = compose(mono, Poly{1, 1}, p);
        t.G = add(t.G, scale(add(shifted, scale(mono, fp::neg(1, p), p), p), fp::neg(1, p), p), p);
    }
    t.d = static_cast<int>(t.F.size() - 1);
    t.c = t.F.back();
    if (static_cast<std::size_t>(t.d) <= p * (t.G.empty() ? 0 : t.G.size() - 1)) {
        throw DataError("tower generator is not regular at the totally ramified point");
    }
    return t;
}

/// sigma(x) for the Witt generator of the tower described by spec.
inline Series tower_series(const TowerSpec& spec, int precision) {
    const u64 p = spec.p;
    const TowerData t = tower_data(spec);
    const int e = spec.base_change;
    if (e <= 0 || static_cast<u64>(e) % p == 0) throw HypothesisError("base change degree must be prime to p");
    const int N = precision;  // precision of the unit parts, in x
    const int d = t.d;
    const u64 cinv = fp::inv(t.c, p);
    // Fr(T) = T^d F(1/T), constant term c.
    std::vector<i64> fr(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 0; i <= d; ++i) fr[static_cast<std::size_t>(d - i)] = static_cast<i64>(t.F[static_cast<std::size_t>(i)]);
    const Series frpoly(p, fr, std::max(d + 1, N));
    // U^d (1 - x^{d(p-1)}) = c^{-1} Fr(x^p U), U(0) = 1; each pass fixes p more terms.
    const Series denom = sub(Series::constant(p, 1, N), Series::monomial(p, 1, d * static_cast<int>(p - 1), N));
    Series U = Series::constant(p, 1, N);
    for (int pass = 0; pass * static_cast<int>(p) <= N + 1; ++pass) {
        const Series T = shift_up(U, static_cast<int>(p)).truncate(N);
        const Series rhs = divide(scale(compose(frpoly, T).truncate(N), static_cast<i64>(cinv)), denom);
        U = nth_root(rhs, d);
    }
    // sigma(x) = x (1 + c^{-1} sum_j g_j x^{d - p j} U^{-j})^{-1/d}.
    Series inner = Series::constant(p, 1, N);
    const Series Uinv = inverse(U);
    for (std::size_t j = 0; j < t.G.size(); ++j) {
        if (t.G[j] == 0) continue;
        const int deg = d - static_cast<int>(p * j);
        const Series term = mul(Series::monomial(p, static_cast<i64>(fp::mul(t.G[j], cinv, p)), deg, N),
                                power(Uinv, static_cast<i64>(j)));
        inner = add(inner, term.truncate(N));
    }
    const Series v = rational_power(inner, -1, d);  // sigma(x) / x
    if (e == 1) return shift_up(v, 1).truncate(precision);
    // x = x'^e: sigma'(x') = x' v(x'^e)^{1/e}.
    const Series xe = Series::monomial(p, 1, e, precision);
    const Series ve = compose(v, xe).truncate(precision - 1);
    return shift_up(rational_power(ve, 1, e), 1);
}

inline smooth::CyclicSmoothAction tower_action(const TowerSpec& spec, int precision) {
    return smooth::CyclicSmoothAction::make(smooth::SmoothAutomorphism(tower_series(spec, precision)), 2);
}

/// A tower spec with its expected lower jumps, for tests and sweeps.
struct CatalogEntry {
    TowerSpec spec;
    int m0;
    int m1;
};

/// Desk-scale order-p^2 actions with known jump pairs.
inline std::vector<CatalogEntry> desk_towers(u64 p) {
    std::vector<CatalogEntry> out;
    if (p == 2) {
        out.push_back({{2, {0, 0, 1}, 1}, 1, 3});
        out.push_back({{2, {0, 0, 0, 1}, 1}, 1, 5});
        out.push_back({{2, {0, 0, 0, 0, 0, 1}, 1}, 1, 9});
        out.push_back({{2, {0, 0, 1}, 3}, 3, 9});
    } else if (p == 3) {
        out.push_back({{3, {}, 1}, 1, 7});
        out.push_back({{3, {0, 0, 0, 0, 1}, 1}, 1, 10});
        out.push_back({{3, {0, 0, 0, 0, 0, 1}, 1}, 1, 13});
        out.push_back({{3, {}, 2}, 2, 14});
    }
    return out;
}

} // namespace equideform::tower

#endif

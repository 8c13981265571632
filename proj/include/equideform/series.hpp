#ifndef EQUIDEFORM_SERIES_HPP
#define EQUIDEFORM_SERIES_HPP

// Truncated formal power series over a prime field F_p.
//
// A Series is a coefficient vector c_0..c_{N-1} together with its precision N:
// the value is known modulo x^N and nothing is assumed beyond. Every operation
// documents the precision of its result. Values are immutable.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>

namespace equideform {

/// Either a finite valuation or "zero at precision N". The two states are
/// never conflated: a series that vanishes to its precision has no finite
/// valuation, only a lower bound.
class Valuation {
public:
    static Valuation finite(int v) { return Valuation(v, true); }
    static Valuation zero_to(int precision) { return Valuation(precision, false); }

    bool is_finite() const noexcept { return finite_; }
    bool is_zero_to_precision() const noexcept { return !finite_; }

    int value() const {
        if (!finite_) {
            throw PrecisionError("series is indistinguishable from 0 at precision " +
                                 std::to_string(v_));
        }
        return v_;
    }
    /// Lower bound that is always valid: the valuation itself, or the precision.
    int lower_bound() const noexcept { return v_; }
    int precision() const {
        if (finite_) throw InternalError("precision() queried on a finite valuation");
        return v_;
    }

    friend bool operator==(const Valuation& a, const Valuation& b) noexcept {
        return a.finite_ == b.finite_ && a.v_ == b.v_;
    }

    std::string to_string() const {
        return finite_ ? std::to_string(v_) : "zero-at-precision-" + std::to_string(v_);
    }

private:
    Valuation(int v, bool finite) : v_(v), finite_(finite) {}
    int v_;
    bool finite_;
};

namespace detail {

// c = a * b truncated to `len` terms; a and b may be shorter than len.
inline std::vector<u64> mul_trunc(const std::vector<u64>& a, const std::vector<u64>& b, std::size_t len,
                                  u64 p) {
    std::vector<u64> c(len, 0);
    if (a.empty() || b.empty()) return c;
    const std::size_t na = std::min(a.size(), len);
    const std::size_t nb = std::min(b.size(), len);
    if (p < (u64{1} << 16)) {
        // products < 2^32: a u64 accumulator absorbs 2^32 of them.
        std::vector<u64> acc(len, 0);
        for (std::size_t i = 0; i < na; ++i) {
            const u64 ai = a[i];
            if (ai == 0) continue;
            const std::size_t lim = std::min(nb, len - i);
            u64* out = acc.data() + i;
            for (std::size_t j = 0; j < lim; ++j) out[j] += ai * b[j];
        }
        for (std::size_t k = 0; k < len; ++k) c[k] = acc[k] % p;
    } else {
        std::vector<unsigned __int128> acc(len, 0);
        for (std::size_t i = 0; i < na; ++i) {
            const u64 ai = a[i];
            if (ai == 0) continue;
            const std::size_t lim = std::min(nb, len - i);
            for (std::size_t j = 0; j < lim; ++j) acc[i + j] += static_cast<unsigned __int128>(ai * b[j]);
        }
        for (std::size_t k = 0; k < len; ++k) c[k] = static_cast<u64>(acc[k] % p);
    }
    return c;
}

// Inverse of a unit a, to len terms.
inline std::vector<u64> inv_trunc(const std::vector<u64>& a, std::size_t len, u64 p) {
    std::vector<u64> b(len, 0);
    if (len == 0) return b;
    const u64 a0inv = fp::inv(a.at(0), p);
    b[0] = a0inv;
    for (std::size_t k = 1; k < len; ++k) {
        unsigned __int128 s = 0;
        const std::size_t lim = std::min(k, a.size() - 1);
        for (std::size_t j = 1; j <= lim; ++j) s += static_cast<unsigned __int128>(a[j] * b[k - j]);
        b[k] = fp::mul(fp::neg(static_cast<u64>(s % p), p), a0inv, p);
    }
    return b;
}

inline std::vector<u64> pow_trunc(std::vector<u64> base, u64 e, std::size_t len, u64 p) {
    std::vector<u64> r(len, 0);
    if (len == 0) return r;
    r[0] = 1 % p;
    base.resize(std::min(base.size(), len));
    while (e != 0) {
        if (e & 1U) r = mul_trunc(r, base, len, p);
        e >>= 1U;
        if (e != 0) base = mul_trunc(base, base, len, p);
    }
    return r;
}

// f(g) truncated to len terms, g(0) = 0, g of valuation vg >= 1.
inline std::vector<u64> compose_trunc(const std::vector<u64>& f, const std::vector<u64>& g, std::size_t len,
                                      std::size_t vg, u64 p) {
    std::vector<u64> r(len, 0);
    if (len == 0 || f.empty()) return r;
    std::size_t top = std::min(f.size() - 1, (len - 1) / vg);
    r[0] = f[top];
    for (std::size_t k = top; k-- > 0;) {
        r = mul_trunc(r, g, len, p);
        r[0] = fp::add(r[0], f[k], p);
    }
    return r;
}

} // namespace detail

class Series {
public:
    /// Coefficients c_0, c_1, ... of degree < precision; shorter vectors are
    /// zero-padded. Entries are reduced mod p (negative values allowed).
    Series(u64 p, const std::vector<i64>& coeffs, int precision) : p_(p) {
        fp::check_modulus(p);
        if (precision < 0) throw HypothesisError("negative precision");
        if (coeffs.size() > static_cast<std::size_t>(precision)) {
            throw HypothesisError("coefficient vector longer than the stated precision");
        }
        c_.assign(static_cast<std::size_t>(precision), 0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) c_[i] = fp::reduce(coeffs[i], p);
    }

    static Series from_raw(u64 p, std::vector<u64> coeffs) {
        Series s;
        s.p_ = p;
        s.c_ = std::move(coeffs);
        return s;
    }

    static Series zero(u64 p, int precision) { return Series(p, {}, precision); }
    static Series constant(u64 p, i64 c, int precision) {
        return precision == 0 ? zero(p, 0) : Series(p, {c}, precision);
    }
    static Series monomial(u64 p, i64 c, int degree, int precision) {
        if (degree < 0) throw HypothesisError("negative monomial degree");
        Series s = zero(p, precision);
        if (degree < precision) s.c_[static_cast<std::size_t>(degree)] = fp::reduce(c, p);
        return s;
    }
    /// The series x, known to the given precision.
    static Series variable(u64 p, int precision) { return monomial(p, 1, 1, precision); }

    u64 modulus() const noexcept { return p_; }
    int precision() const noexcept { return static_cast<int>(c_.size()); }
    const std::vector<u64>& coefficients() const noexcept { return c_; }

    u64 operator[](int k) const {
        if (k < 0 || k >= precision()) {
            throw PrecisionError("coefficient of degree " + std::to_string(k) +
                                 " requested at precision " + std::to_string(precision()));
        }
        return c_[static_cast<std::size_t>(k)];
    }
    FpScalar coeff(int k) const { return FpScalar(static_cast<i64>((*this)[k]), p_); }

    Valuation valuation() const {
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k] != 0) return Valuation::finite(static_cast<int>(k));
        }
        return Valuation::zero_to(precision());
    }
    bool is_zero_to_precision() const { return valuation().is_zero_to_precision(); }

    /// Forget everything from degree `precision` on.
    Series truncate(int precision) const {
        if (precision > this->precision()) {
            throw PrecisionError("cannot raise precision from " + std::to_string(this->precision()) + " to " +
                                 std::to_string(precision));
        }
        if (precision < 0) precision = 0;
        return from_raw(p_, std::vector<u64>(c_.begin(), c_.begin() + precision));
    }

    std::vector<i64> to_ints() const { return {c_.begin(), c_.end()}; }

    std::string to_string(const std::string& var = "x") const {
        std::ostringstream os;
        bool first = true;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k] == 0) continue;
            if (!first) os << " + ";
            first = false;
            if (k == 0) {
                os << c_[k];
            } else {
                if (c_[k] != 1) os << c_[k] << "*";
                os << var;
                if (k > 1) os << "^" << k;
            }
        }
        if (first) os << "0";
        os << " + O(" << var << "^" << c_.size() << ")";
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Series& s) { return os << s.to_string(); }

private:
    Series() = default;

    u64 p_ = 2;
    std::vector<u64> c_;
};

inline void check_same_field(const Series& a, const Series& b) {
    if (a.modulus() != b.modulus()) {
        throw ModulusMismatch("series over F_" + std::to_string(a.modulus()) + " and F_" +
                              std::to_string(b.modulus()));
    }
}

/// True when a and b agree up to the smaller of their precisions (or `upto`
/// if given and smaller).
inline bool agree(const Series& a, const Series& b, std::optional<int> upto = std::nullopt) {
    check_same_field(a, b);
    int n = std::min(a.precision(), b.precision());
    if (upto) n = std::min(n, *upto);
    for (int k = 0; k < n; ++k) {
        if (a.coefficients()[static_cast<std::size_t>(k)] != b.coefficients()[static_cast<std::size_t>(k)]) {
            return false;
        }
    }
    return true;
}

/// Precision min(prec a, prec b).
inline Series add(const Series& a, const Series& b) {
    check_same_field(a, b);
    const u64 p = a.modulus();
    const std::size_t n = static_cast<std::size_t>(std::min(a.precision(), b.precision()));
    std::vector<u64> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = fp::add(a.coefficients()[k], b.coefficients()[k], p);
    return Series::from_raw(p, std::move(c));
}

inline Series negate(const Series& a) {
    std::vector<u64> c = a.coefficients();
    for (auto& v : c) v = fp::neg(v, a.modulus());
    return Series::from_raw(a.modulus(), std::move(c));
}

inline Series sub(const Series& a, const Series& b) { return add(a, negate(b)); }

inline Series scale(const Series& a, i64 c) {
    const u64 p = a.modulus();
    const u64 cr = fp::reduce(c, p);
    std::vector<u64> out = a.coefficients();
    for (auto& v : out) v = fp::mul(v, cr, p);
    return Series::from_raw(p, std::move(out));
}

inline Series scale(const Series& a, const FpScalar& c) {
    if (c.modulus() != a.modulus()) throw ModulusMismatch("scalar and series over different fields");
    return scale(a, static_cast<i64>(c.value()));
}

/// Cauchy product. The result is known to min(N_a + v_b, N_b + v_a), where v
/// is the valuation (or the precision, for a series zero at its precision).
inline Series mul(const Series& a, const Series& b) {
    check_same_field(a, b);
    const int va = a.valuation().lower_bound();
    const int vb = b.valuation().lower_bound();
    const int n = std::min(a.precision() + vb, b.precision() + va);
    return Series::from_raw(a.modulus(),
                            detail::mul_trunc(a.coefficients(), b.coefficients(), static_cast<std::size_t>(n),
                                              a.modulus()));
}

/// Multiplicative inverse of a unit; same precision.
inline Series inverse(const Series& a) {
    if (a.precision() == 0 || a.coefficients()[0] == 0) {
        throw HypothesisError("inverse of a series with zero constant term");
    }
    return Series::from_raw(a.modulus(),
                            detail::inv_trunc(a.coefficients(), static_cast<std::size_t>(a.precision()), a.modulus()));
}

/// a / b for a unit b; precision min(prec a, prec b).
inline Series divide(const Series& a, const Series& b) {
    check_same_field(a, b);
    const int n = std::min(a.precision(), b.precision());
    return mul(a.truncate(n), inverse(b.truncate(n))).truncate(n);
}

/// Multiplication by x^k; precision grows by k.
inline Series shift_up(const Series& a, int k) {
    if (k < 0) throw HypothesisError("negative shift");
    std::vector<u64> c(static_cast<std::size_t>(k), 0);
    c.insert(c.end(), a.coefficients().begin(), a.coefficients().end());
    return Series::from_raw(a.modulus(), std::move(c));
}

/// Exact division by x^k; requires every coefficient below k to vanish.
/// Precision drops by k.
inline Series shift_down(const Series& a, int k) {
    if (k < 0) throw HypothesisError("negative shift");
    if (k > a.precision()) throw PrecisionError("cannot divide by x^" + std::to_string(k) + " at precision " +
                                                std::to_string(a.precision()));
    for (int i = 0; i < k; ++i) {
        if (a.coefficients()[static_cast<std::size_t>(i)] != 0) {
            throw HypothesisError("series is not divisible by x^" + std::to_string(k));
        }
    }
    return Series::from_raw(a.modulus(), std::vector<u64>(a.coefficients().begin() + k, a.coefficients().end()));
}

/// Non-negative powers of any series, negative powers of units.
inline Series power(const Series& a, i64 e) {
    if (e < 0) return power(inverse(a), -e);
    if (e == 0) return Series::constant(a.modulus(), 1, a.precision());
    const int v = a.valuation().lower_bound();
    // a^e is known to N + (e-1) v.
    const i64 n64 = static_cast<i64>(a.precision()) + (e - 1) * static_cast<i64>(v);
    if (n64 > (i64{1} << 24)) throw PrecisionError("power: result precision too large");
    const int len = static_cast<int>(n64);
    return Series::from_raw(a.modulus(),
                            detail::pow_trunc(a.coefficients(), static_cast<u64>(e), static_cast<std::size_t>(len),
                                              a.modulus()));
}

/// f(g(x)) for g(0) = 0. Known to min(N_f * v_g, N_g).
inline Series compose(const Series& f, const Series& g) {
    check_same_field(f, g);
    if (g.precision() == 0) return Series::zero(f.modulus(), 0);
    if (g.coefficients()[0] != 0) throw HypothesisError("compose: inner series has nonzero constant term");
    const Valuation vg = g.valuation();
    const i64 v = vg.lower_bound();
    const i64 n = std::min<i64>(static_cast<i64>(f.precision()) * v, g.precision());
    return Series::from_raw(f.modulus(),
                            detail::compose_trunc(f.coefficients(), g.coefficients(), static_cast<std::size_t>(n),
                                                  static_cast<std::size_t>(v), f.modulus()));
}

/// d/dx; loses one order of precision.
inline Series derivative(const Series& f) {
    const u64 p = f.modulus();
    const int n = std::max(f.precision() - 1, 0);
    std::vector<u64> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        c[static_cast<std::size_t>(k)] = fp::mul(f.coefficients()[static_cast<std::size_t>(k + 1)], static_cast<u64>(k + 1) % p, p);
    }
    return Series::from_raw(p, std::move(c));
}

/// The unique v with v(0) = 1 and v^m = u, for u(0) = 1 and p not dividing m.
/// Same precision as u. Computed by Newton iteration, which needs only the
/// invertibility of m (no division by the degree, unlike the ODE recurrence).
inline Series nth_root(const Series& u, i64 m) {
    const u64 p = u.modulus();
    if (m <= 0) throw HypothesisError("nth_root: m must be positive");
    if (static_cast<u64>(m) % p == 0) throw HypothesisError("nth_root: p divides m");
    if (u.precision() == 0) return u;
    if (u.coefficients()[0] != 1) throw HypothesisError("nth_root: constant term must be 1");
    if (m == 1) return u;
    const std::size_t n = static_cast<std::size_t>(u.precision());
    const u64 minv = fp::inv(static_cast<u64>(m) % p, p);
    std::vector<u64> v{1};
    std::size_t cur = 1;
    while (cur < n) {
        cur = std::min(n, 2 * cur);
        v.resize(cur, 0);
        // v <- v - (v^m - u) / (m v^(m-1))
        const std::vector<u64> vm1 = detail::pow_trunc(v, static_cast<u64>(m - 1), cur, p);
        const std::vector<u64> vm = detail::mul_trunc(vm1, v, cur, p);
        std::vector<u64> diff(cur);
        for (std::size_t k = 0; k < cur; ++k) diff[k] = fp::sub(vm[k], u.coefficients()[k], p);
        std::vector<u64> step = detail::mul_trunc(diff, detail::inv_trunc(vm1, cur, p), cur, p);
        for (std::size_t k = 0; k < cur; ++k) v[k] = fp::sub(v[k], fp::mul(step[k], minv, p), p);
    }
    return Series::from_raw(p, std::move(v));
}

/// u^(a/m) for a unit u: an m-th root c0 of u(0) is taken in F_p (the smallest
/// one), then result = c0^a * nth_root(u / u(0), m)^a, so result^m = u^a.
/// Same precision as u.
inline Series rational_power(const Series& u, i64 a, i64 m) {
    const u64 p = u.modulus();
    if (m <= 0) throw HypothesisError("rational_power: denominator must be positive");
    if (static_cast<u64>(m) % p == 0) throw HypothesisError("rational_power: p divides the denominator");
    if (u.precision() == 0) return u;
    const u64 c = u.coefficients()[0];
    if (c == 0) throw HypothesisError("rational_power: series is not a unit");
    const std::optional<u64> c0 = fp::root(c, static_cast<u64>(m), p);
    if (!c0) {
        throw HypothesisError("rational_power: " + std::to_string(c) + " has no " + std::to_string(m) +
                              "-th root in F_" + std::to_string(p));
    }
    const Series normalized = scale(u, static_cast<i64>(fp::inv(c, p)));
    const Series w = power(nth_root(normalized, m), a);
    return scale(w, static_cast<i64>(fp::pow_signed(*c0, a, p)));
}

/// Compositional inverse r of s (s(0) = 0, s'(0) != 0): s(r(x)) = x = r(s(x)).
/// Same precision as s.
inline Series reversion(const Series& s) {
    const u64 p = s.modulus();
    const std::size_t n = static_cast<std::size_t>(s.precision());
    if (n == 0) return s;
    if (s.coefficients()[0] != 0) throw HypothesisError("reversion: constant term must vanish");
    if (n < 2 || s.coefficients()[1] == 0) throw HypothesisError("reversion: linear coefficient is not a unit");
    const std::vector<u64> ds = derivative(s).coefficients();
    // r1 = 1/s1, then Newton: r <- r - (s(r) - x) / s'(r).
    std::vector<u64> r{0, fp::inv(s.coefficients()[1], p)};
    std::size_t cur = 2;
    while (cur < n) {
        cur = std::min(n, 2 * cur);
        r.resize(cur, 0);
        std::vector<u64> sr = detail::compose_trunc(s.coefficients(), r, cur, 1, p);
        sr[1] = fp::sub(sr[1], 1, p);
        const std::vector<u64> dsr = detail::compose_trunc(ds, r, cur, 1, p);
        const std::vector<u64> step = detail::mul_trunc(sr, detail::inv_trunc(dsr, cur, p), cur, p);
        for (std::size_t k = 0; k < cur; ++k) r[k] = fp::sub(r[k], step[k], p);
    }
    r.resize(n);
    return Series::from_raw(p, std::move(r));
}

/// Rewrites F(x) as R(w), where w(x) has valuation q and leading coefficient 1
/// and F is invariant under the group whose norm is w: R(w(x)) = F(x).
///
/// Greedy elimination: subtract c * w^k against the lowest term of F. Every
/// lowest degree met must be divisible by q, otherwise F was not invariant and
/// InternalError is raised. R is known to ceil(min(N_F, N_w) / q).
inline Series expand_in_parameter(const Series& F, const Series& w) {
    check_same_field(F, w);
    const u64 p = F.modulus();
    const Valuation vw = w.valuation();
    if (!vw.is_finite() || vw.value() == 0) throw InternalError("expansion parameter must have positive valuation");
    const int q = vw.value();
    if (w[q] != 1) throw InternalError("expansion parameter must have leading coefficient 1");
    const int n = std::min(F.precision(), w.precision());
    const int out_len = (n + q - 1) / q;
    std::vector<u64> rest(F.coefficients().begin(), F.coefficients().begin() + n);
    std::vector<u64> out(static_cast<std::size_t>(out_len), 0);
    std::vector<u64> wk(static_cast<std::size_t>(n), 0);
    if (n > 0) wk[0] = 1;
    int k = 0;
    for (int deg = 0; deg < n; ++deg) {
        const u64 c = rest[static_cast<std::size_t>(deg)];
        if (c == 0) continue;
        if (deg % q != 0) {
            throw InternalError("series is not invariant: term of degree " + std::to_string(deg) +
                                " is not a multiple of " + std::to_string(q));
        }
        const int target = deg / q;
        while (k < target) {
            wk = detail::mul_trunc(wk, w.coefficients(), static_cast<std::size_t>(n), p);
            ++k;
        }
        out[static_cast<std::size_t>(target)] = c;
        for (int j = deg; j < n; ++j) {
            rest[static_cast<std::size_t>(j)] =
                fp::sub(rest[static_cast<std::size_t>(j)], fp::mul(c, wk[static_cast<std::size_t>(j)], p), p);
        }
    }
    return Series::from_raw(p, std::move(out));
}

inline Series operator+(const Series& a, const Series& b) { return add(a, b); }
inline Series operator-(const Series& a, const Series& b) { return sub(a, b); }
inline Series operator-(const Series& a) { return negate(a); }
inline Series operator*(const Series& a, const Series& b) { return mul(a, b); }

} // namespace equideform

#endif

#ifndef EQUIDEFORM_FP_HPP
#define EQUIDEFORM_FP_HPP

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include <equideform/error.hpp>

namespace equideform {

using u64 = std::uint64_t;
using i64 = std::int64_t;

namespace fp {

inline constexpr u64 max_modulus = u64{1} << 31;

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

/// Throws unless p is a prime in [2, 2^31].
inline void check_modulus(u64 p) {
    if (p < 2 || p > max_modulus || !is_prime(p)) {
        throw HypothesisError("modulus " + std::to_string(p) + " is not a prime in [2, 2^31]");
    }
}

inline u64 reduce(i64 v, u64 p) {
    const i64 r = v % static_cast<i64>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(p) : r);
}

inline u64 add(u64 a, u64 b, u64 p) {
    const u64 s = a + b;
    return s >= p ? s - p : s;
}

inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 neg(u64 a, u64 p) { return a == 0 ? 0 : p - a; }

inline u64 mul(u64 a, u64 b, u64 p) { return (a * b) % p; }

inline u64 pow(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e != 0) {
        if (e & 1U) r = mul(r, a, p);
        a = mul(a, a, p);
        e >>= 1U;
    }
    return r;
}

inline u64 inv(u64 a, u64 p) {
    if (a % p == 0) throw HypothesisError("division by zero in F_" + std::to_string(p));
    return pow(a, p - 2, p);
}

/// Signed exponent: negative powers go through the inverse.
inline u64 pow_signed(u64 a, i64 e, u64 p) {
    if (e >= 0) return pow(a, static_cast<u64>(e), p);
    return pow(inv(a, p), static_cast<u64>(-e), p);
}

/// Inverse of a modulo n (n need not be prime); nullopt when gcd(a, n) != 1.
inline std::optional<u64> inverse_mod(u64 a, u64 n) {
    i64 old_r = static_cast<i64>(a % n), r = static_cast<i64>(n);
    i64 old_s = 1, s = 0;
    while (r != 0) {
        const i64 q = old_r / r;
        i64 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) return std::nullopt;
    return reduce(old_s, n);
}

/// Smallest r in F_p with r^m = c, if any.
inline std::optional<u64> root(u64 c, u64 m, u64 p) {
    c %= p;
    if (m == 0) throw HypothesisError("0-th root requested");
    if (c == 0) return u64{0};
    if (p == 2) return c;
    const u64 g = std::gcd(m, p - 1);
    if (g == 1) {
        // x -> x^m permutes F_p^*, so the root is unique.
        return pow(c, *inverse_mod(m % (p - 1), p - 1), p);
    }
    if (pow(c, (p - 1) / g, p) != 1) return std::nullopt;
    for (u64 r = 1; r < p; ++r) {
        if (pow(r, m, p) == c) return r;
    }
    return std::nullopt;
}

} // namespace fp

/// An element of the prime field F_p.
class FpScalar {
public:
    FpScalar(i64 value, u64 p) : p_(p), value_(0) {
        fp::check_modulus(p);
        value_ = fp::reduce(value, p);
    }

    u64 value() const noexcept { return value_; }
    u64 modulus() const noexcept { return p_; }
    bool is_zero() const noexcept { return value_ == 0; }

    friend FpScalar operator+(const FpScalar& a, const FpScalar& b) {
        check_same(a, b);
        return raw(fp::add(a.value_, b.value_, a.p_), a.p_);
    }
    friend FpScalar operator-(const FpScalar& a, const FpScalar& b) {
        check_same(a, b);
        return raw(fp::sub(a.value_, b.value_, a.p_), a.p_);
    }
    friend FpScalar operator*(const FpScalar& a, const FpScalar& b) {
        check_same(a, b);
        return raw(fp::mul(a.value_, b.value_, a.p_), a.p_);
    }
    friend FpScalar operator/(const FpScalar& a, const FpScalar& b) {
        check_same(a, b);
        return raw(fp::mul(a.value_, fp::inv(b.value_, a.p_), a.p_), a.p_);
    }
    FpScalar operator-() const { return raw(fp::neg(value_, p_), p_); }
    FpScalar inverse() const { return raw(fp::inv(value_, p_), p_); }

    friend bool operator==(const FpScalar& a, const FpScalar& b) noexcept {
        return a.p_ == b.p_ && a.value_ == b.value_;
    }

    friend std::ostream& operator<<(std::ostream& os, const FpScalar& a) { return os << a.value_; }

private:
    static FpScalar raw(u64 v, u64 p) {
        FpScalar s;
        s.p_ = p;
        s.value_ = v;
        return s;
    }
    FpScalar() = default;

    static void check_same(const FpScalar& a, const FpScalar& b) {
        if (a.p_ != b.p_) {
            throw ModulusMismatch("F_" + std::to_string(a.p_) + " vs F_" + std::to_string(b.p_));
        }
    }

    u64 p_ = 2;
    u64 value_ = 0;
};

} // namespace equideform

#endif

#ifndef EQUIDEFORM_SMOOTH_LOCAL_HPP
#define EQUIDEFORM_SMOOTH_LOCAL_HPP

// Cyclic p-group actions on k[[x]]: ramification data, the trace of vector
// fields, trace-zero witnesses and the dimension of Ext^1_G(Omega, R).

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>
#include <equideform/linalg.hpp>
#include <equideform/series.hpp>

namespace equideform::smooth {

inline u64 ipow(u64 base, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// Ring automorphism of k[[x]] given by the image s = sigma(x).
class SmoothAutomorphism {
public:
    explicit SmoothAutomorphism(Series s) : s_(std::move(s)) {
        if (s_.precision() < 2) throw PrecisionError("automorphism needs precision at least 2");
        if (s_[0] != 0) throw HypothesisError("sigma(x) must have zero constant term");
        if (s_[1] == 0) throw HypothesisError("sigma(x) must have a unit linear coefficient");
    }

    static SmoothAutomorphism identity(u64 p, int precision) {
        return SmoothAutomorphism(Series::variable(p, precision));
    }

    const Series& image() const noexcept { return s_; }
    u64 modulus() const noexcept { return s_.modulus(); }
    int precision() const noexcept { return s_.precision(); }

    /// sigma(f) = f(s).
    Series apply(const Series& f) const { return compose(f, s_); }

    bool is_identity() const { return agree(s_, Series::variable(modulus(), precision())); }

private:
    Series s_;
};

/// phi = f d/dx, identified with phi(dx) = f.
struct VectorField {
    Series f;
    explicit VectorField(Series coeff) : f(std::move(coeff)) {}
};

/// (sigma . phi)(dx) = f(sigma(x)) / sigma'(x). Precision min(N_f, N_s - 1).
inline VectorField act_on_vector_field(const SmoothAutomorphism& sigma, const VectorField& phi) {
    const Series ds = derivative(sigma.image());
    const Series fs = sigma.apply(phi.f);
    const int n = std::min(fs.precision(), ds.precision());
    return VectorField(mul(fs.truncate(n), inverse(ds.truncate(n))).truncate(n));
}

/// s(x) = x / (1 + x^m)^{1/m}: an order-p automorphism of conductor m.
inline Series standard_series(u64 p, int m, int precision) {
    fp::check_modulus(p);
    if (m <= 0) throw HypothesisError("conductor must be a positive integer");
    if (static_cast<u64>(m) % p == 0) throw HypothesisError("p | m: conductor must be prime to p");
    if (precision < 2) throw PrecisionError("precision must be at least 2");
    const Series u = add(Series::constant(p, 1, precision - 1), Series::monomial(p, 1, m, precision - 1));
    return shift_up(rational_power(u, -1, m), 1);
}

struct RamificationProfile {
    u64 p = 2;
    std::vector<int> jumps;        // lower numbering, increasing
    std::optional<int> conductor;  // first jump; nullopt is infinity
    int different = 0;
    u64 group_order = 1;           // |G_0|
    int faithful_exponent = 0;     // n_0
};

/// The abstract cyclic group Z/p^n acting through a generator. The iterates
/// sigma^i(x) for i below the faithful order, and 1/(sigma^i)', are computed
/// once at construction.
class CyclicSmoothAction {
public:
    static CyclicSmoothAction make(const SmoothAutomorphism& generator, int n) {
        const u64 p = generator.modulus();
        if (n < 0) throw HypothesisError("group exponent must be non-negative");
        if (generator.image()[1] != 1) {
            throw HypothesisError("p-group actions must have sigma'(0) = 1");
        }
        CyclicSmoothAction a;
        a.p_ = p;
        a.n_ = n;
        a.generator_ = std::make_shared<SmoothAutomorphism>(generator);
        const int N = generator.precision();
        const Series x = Series::variable(p, N);
        const u64 order_bound = ipow(p, n);
        a.iterates_.push_back(x);
        Series cur = generator.image();
        u64 i = 1;
        while (!agree(cur, x)) {
            if (i >= order_bound) {
                throw DataError("generator^(p^" + std::to_string(n) + ") is not the identity to precision " +
                                std::to_string(N));
            }
            a.iterates_.push_back(cur);
            cur = compose(cur, generator.image());
            ++i;
        }
        // i is the order of the image; it must be a power of p.
        int n0 = 0;
        u64 q = 1;
        while (q < i) {
            q *= p;
            ++n0;
        }
        if (q != i) throw DataError("generator image has order " + std::to_string(i) + ", not a power of p");
        a.n0_ = n0;
        for (const Series& s : a.iterates_) a.inv_ds_.push_back(inverse(derivative(s)));
        return a;
    }

    u64 p() const noexcept { return p_; }
    int n() const noexcept { return n_; }
    int faithful_exponent() const noexcept { return n0_; }
    u64 faithful_order() const noexcept { return iterates_.size(); }
    u64 group_order() const noexcept { return ipow(p_, n_); }
    bool is_faithful() const noexcept { return n0_ == n_; }
    int precision() const noexcept { return generator_->precision(); }
    const SmoothAutomorphism& generator() const noexcept { return *generator_; }

    /// sigma^i(x) for 0 <= i < |G_0|; other exponents are reduced.
    const Series& iterate(u64 i) const { return iterates_[i % iterates_.size()]; }
    /// 1 / (sigma^i)'(x), precision N - 1.
    const Series& inverse_derivative(u64 i) const { return inv_ds_[i % inv_ds_.size()]; }

    /// Multiplicity of each element of G_0 in the abstract group, reduced mod p.
    u64 kernel_multiplicity() const { return n0_ == n_ ? 1 : 0; }

    /// The subgroup generated by sigma^(p^j), as an action of Z/p^(n-j).
    CyclicSmoothAction subgroup(int j) const {
        if (j < 0 || j > n_) throw HypothesisError("subgroup index out of range");
        const u64 k = ipow(p_, j);
        if (k >= faithful_order()) {
            return make(SmoothAutomorphism::identity(p_, precision()), n_ - j);
        }
        return make(SmoothAutomorphism(iterate(k)), n_ - j);
    }

private:
    CyclicSmoothAction() = default;

    u64 p_ = 2;
    int n_ = 0;
    int n0_ = 0;
    std::shared_ptr<const SmoothAutomorphism> generator_;
    std::vector<Series> iterates_;
    std::vector<Series> inv_ds_;
};

inline CyclicSmoothAction standard_action(u64 p, int m, int precision) {
    return CyclicSmoothAction::make(SmoothAutomorphism(standard_series(p, m, precision)), 1);
}

/// Jumps from nu(sigma^(p^j)(x) - x) - 1, with the different
/// sum_i (|G_i| - 1) cross-checked against (p-1) sum_i p^i (m_{n0-i-1} + 1).
inline RamificationProfile ramification_profile(const CyclicSmoothAction& a) {
    RamificationProfile prof;
    prof.p = a.p();
    prof.faithful_exponent = a.faithful_exponent();
    prof.group_order = a.faithful_order();
    const u64 p = a.p();
    const int n0 = a.faithful_exponent();
    const Series x = Series::variable(p, a.precision());
    for (int j = 0; j < n0; ++j) {
        const Valuation v = sub(a.iterate(ipow(p, j)), x).valuation();
        if (!v.is_finite()) {
            throw PrecisionError("jump at level " + std::to_string(j) + " not resolved at precision " +
                                 std::to_string(a.precision()));
        }
        prof.jumps.push_back(v.value() - 1);
    }
    if (n0 == 0) return prof;
    for (std::size_t j = 1; j < prof.jumps.size(); ++j) {
        if (prof.jumps[j] <= prof.jumps[j - 1]) throw DataError("ramification jumps are not increasing");
    }
    const int m0 = prof.jumps[0];
    if (static_cast<u64>(m0) % p == 0) throw DataError("p divides the conductor " + std::to_string(m0));
    for (int m : prof.jumps) {
        if ((static_cast<u64>(m) - static_cast<u64>(m0)) % p != 0) {
            throw DataError("jump " + std::to_string(m) + " is not congruent to the conductor mod p");
        }
    }
    prof.conductor = m0;
    long long by_filtration = 0;
    int prev = -1;
    for (int j = 0; j < n0; ++j) {
        by_filtration += static_cast<long long>(prof.jumps[j] - prev) *
                         static_cast<long long>(ipow(p, n0 - j) - 1);
        prev = prof.jumps[j];
    }
    long long closed = 0;
    for (int i = 0; i < n0; ++i) {
        closed += static_cast<long long>(ipow(p, i)) * (prof.jumps[n0 - i - 1] + 1);
    }
    closed *= static_cast<long long>(p - 1);
    if (closed != by_filtration) throw InternalError("different formulas disagree");
    prof.different = static_cast<int>(closed);
    return prof;
}

/// Columns: (Tr_G x^i d/dx)(dx) for i = first .. first+count-1, rows are the
/// coefficients of degree < rows.
inline FpMatrix trace_matrix(const CyclicSmoothAction& a, int first, int count, int rows) {
    const u64 p = a.p();
    if (rows > a.precision() - 1) throw PrecisionError("trace matrix needs precision " + std::to_string(rows + 1));
    FpMatrix out(static_cast<std::size_t>(rows), static_cast<std::size_t>(count), p);
    if (a.kernel_multiplicity() == 0 || count == 0 || rows == 0) return out;
    const std::size_t len = static_cast<std::size_t>(rows);
    std::vector<std::vector<u64>> acc(static_cast<std::size_t>(count), std::vector<u64>(len, 0));
    for (u64 i = 0; i < a.faithful_order(); ++i) {
        const std::vector<u64>& s = a.iterate(i).coefficients();
        std::vector<u64> pw = detail::pow_trunc(s, static_cast<u64>(first), len, p);
        for (int k = 0; k < count; ++k) {
            const std::vector<u64> term = detail::mul_trunc(pw, a.inverse_derivative(i).coefficients(), len, p);
            std::vector<u64>& dst = acc[static_cast<std::size_t>(k)];
            for (std::size_t r = 0; r < len; ++r) dst[r] = fp::add(dst[r], term[r], p);
            if (k + 1 < count) pw = detail::mul_trunc(pw, s, len, p);
        }
    }
    for (int k = 0; k < count; ++k) out.set_column(static_cast<std::size_t>(k), acc[static_cast<std::size_t>(k)]);
    return out;
}

/// Columns: ((1 - sigma) x^i d/dx)(dx) for i = first .. first+count-1, rows
/// the coefficients of degree < rows.
inline FpMatrix coboundary_matrix(const CyclicSmoothAction& a, int first, int count, int rows) {
    const u64 p = a.p();
    if (rows > a.precision() - 1) throw PrecisionError("coboundary matrix needs precision " + std::to_string(rows + 1));
    FpMatrix out(static_cast<std::size_t>(rows), static_cast<std::size_t>(count), p);
    if (count == 0 || rows == 0) return out;
    const std::size_t len = static_cast<std::size_t>(rows);
    const std::vector<u64>& s = a.iterate(1).coefficients();
    const std::vector<u64>& ids = a.inverse_derivative(1).coefficients();
    std::vector<u64> pw = detail::pow_trunc(s, static_cast<u64>(first), len, p);
    for (int k = 0; k < count; ++k) {
        std::vector<u64> col = detail::mul_trunc(pw, ids, len, p);
        for (std::size_t r = 0; r < len; ++r) col[r] = fp::neg(col[r], p);
        const std::size_t deg = static_cast<std::size_t>(first + k);
        if (deg < len) col[deg] = fp::add(col[deg], 1, p);
        out.set_column(static_cast<std::size_t>(k), col);
        if (k + 1 < count) pw = detail::mul_trunc(pw, s, len, p);
    }
    return out;
}

/// Tr_G phi = sum over the abstract group. A non-faithful action counts each
/// element of G_0 p^(n-n0) times, so the trace vanishes.
/// Precision min(N_f, N - 1).
inline VectorField trace(const CyclicSmoothAction& a, const VectorField& phi) {
    const int n = std::min(phi.f.precision(), a.precision() - 1);
    std::vector<u64> acc(static_cast<std::size_t>(std::max(n, 0)), 0);
    if (a.kernel_multiplicity() != 0) {
        const u64 p = a.p();
        for (u64 i = 0; i < a.faithful_order(); ++i) {
            const Series fs = compose(phi.f, a.iterate(i)).truncate(n);
            const std::vector<u64> term =
                detail::mul_trunc(fs.coefficients(), a.inverse_derivative(i).coefficients(), acc.size(), p);
            for (std::size_t r = 0; r < acc.size(); ++r) acc[r] = fp::add(acc[r], term[r], p);
        }
    }
    return VectorField(Series::from_raw(a.p(), std::move(acc)));
}

/// z = prod over G_0 of tau(x); nu_x(z) = |G_0|, leading coefficient 1.
/// Precision N + |G_0| - 1.
inline Series norm_parameter(const CyclicSmoothAction& a) {
    Series z = a.iterate(0);
    for (u64 i = 1; i < a.faithful_order(); ++i) z = mul(z, a.iterate(i));
    return z;
}

/// theta(phi) = (Tr phi)(dz) = (Tr phi)(dx) z'(x), rewritten as a series in z.
inline Series theta(const CyclicSmoothAction& a, const VectorField& phi, const Series& z) {
    const VectorField tr = trace(a, phi);
    return expand_in_parameter(mul(tr.f, derivative(z)), z);
}

inline Series theta(const CyclicSmoothAction& a, const VectorField& phi) {
    return theta(a, phi, norm_parameter(a));
}

/// nu_z(theta(f d/dx)) predicted from the jumps and l = nu_x(f). Requires
/// 2 m_0 + 1 = 0 mod p and l + (p-1) sum_{i<=n-2} p^i (2 m_{n-1-i} + 1) = 0 mod p^n.
inline int predict_trace_valuation(const RamificationProfile& prof, int ell) {
    const int n = prof.faithful_exponent;
    if (n == 0) throw HypothesisError("trivial action: no ramification jumps");
    if (ell < 0) throw HypothesisError("valuation must be non-negative");
    const long long p = static_cast<long long>(prof.p);
    const long long m0 = prof.jumps[0];
    if ((2 * m0 + 1) % p != 0) {
        throw HypothesisError("2*m0+1 = " + std::to_string(2 * m0 + 1) + " is not divisible by p");
    }
    const long long pn = static_cast<long long>(ipow(prof.p, n));
    long long partial = ell;
    long long pi = 1;
    for (int i = 0; i <= n - 2; ++i) {
        partial += (p - 1) * pi * (2LL * prof.jumps[n - 1 - i] + 1);
        pi *= p;
    }
    if (partial % pn != 0) {
        throw HypothesisError("valuation " + std::to_string(ell) + " violates the congruence mod p^" +
                              std::to_string(n));
    }
    long long total = ell;
    pi = 1;
    for (int i = 0; i <= n - 1; ++i) {
        total += (p - 1) * pi * (2LL * prof.jumps[n - 1 - i] + 1);
        pi *= p;
    }
    if (total % pn != 0) throw InternalError("predicted valuation is not an integer");
    return static_cast<int>(total / pn);
}

/// Order p, 2m+1 = 0 mod p, p not dividing q: f with nu_x(f) = q and
/// Tr(f d/dx) = 0, from f = z^l (x^q' - g(z)), g = theta(x^q' d/dx)/theta(d/dx).
inline VectorField trace_zero_with_valuation(const CyclicSmoothAction& a, int q) {
    const u64 p = a.p();
    if (a.faithful_order() != p) throw HypothesisError("action must have image of order p");
    const RamificationProfile prof = ramification_profile(a);
    const int m = *prof.conductor;
    if ((2 * static_cast<u64>(m) + 1) % p != 0) throw HypothesisError("2m+1 must be divisible by p");
    if (q <= 0 || static_cast<u64>(q) % p == 0) throw HypothesisError("q must be positive and prime to p");
    const int qp = static_cast<int>(static_cast<u64>(q) % p);
    const int ell = static_cast<int>(static_cast<u64>(q) / p);
    const int N = a.precision();
    const Series z = norm_parameter(a);
    const Series t_one = theta(a, VectorField(Series::constant(p, 1, N)), z);
    const Series t_q = theta(a, VectorField(Series::monomial(p, 1, qp, N)), z);
    const Valuation r = t_one.valuation();
    if (!r.is_finite()) throw PrecisionError("theta(d/dx) vanishes at precision " + std::to_string(N));
    const Valuation rq = t_q.valuation();
    if (rq.is_finite() && rq.value() < r.value()) {
        throw InternalError("theta(d/dx) does not generate the image of theta");
    }
    const int n = std::min(t_one.precision(), t_q.precision());
    if (n <= r.value()) throw PrecisionError("precision too small to divide by theta(d/dx)");
    const Series g = divide(shift_down(t_q.truncate(n), r.value()), shift_down(t_one.truncate(n), r.value()));
    const Series gx = compose(g, z);
    const Series core = sub(Series::monomial(p, 1, qp, N), gx);
    const Series f = mul(power(z, ell), core);
    const Valuation vf = f.valuation();
    if (!vf.is_finite() || vf.value() != q) {
        throw PrecisionError("could not certify nu_x(f) = " + std::to_string(q) + " at precision " +
                             std::to_string(f.precision()));
    }
    if (!trace(a, VectorField(f)).f.is_zero_to_precision()) {
        throw InternalError("trace of the constructed field does not vanish");
    }
    return VectorField(f);
}

/// True iff some unit vector field has vanishing trace: G != G_0, or
/// 2*different + 1 is not divisible by |G_0|.
inline bool trace_zero_basis_exists(const CyclicSmoothAction& a) {
    if (!a.is_faithful()) return true;
    const RamificationProfile prof = ramification_profile(a);
    return (2 * static_cast<u64>(prof.different) + 1) % prof.group_order != 0;
}

struct TraceZeroWitness {
    VectorField field;
    std::string method;
    int verified_precision;
};

/// Solves Tr((1 + sum_{1<=i<M} c_i x^i) d/dx) = 0 mod x^M. The result is known
/// to precision M.
inline std::optional<Series> trace_zero_linear(const CyclicSmoothAction& a, int M) {
    const u64 p = a.p();
    const FpMatrix A = trace_matrix(a, 1, M - 1, M);
    const FpMatrix t0 = trace_matrix(a, 0, 1, M);
    std::vector<u64> rhs(static_cast<std::size_t>(M));
    for (int r = 0; r < M; ++r) rhs[static_cast<std::size_t>(r)] = fp::neg(t0.at(static_cast<std::size_t>(r), 0), p);
    const auto sol = A.solve(rhs);
    if (!sol) return std::nullopt;
    std::vector<u64> c(static_cast<std::size_t>(M), 0);
    c[0] = 1;
    for (int i = 1; i < M; ++i) c[static_cast<std::size_t>(i)] = (*sol)[static_cast<std::size_t>(i - 1)];
    return Series::from_raw(p, std::move(c));
}

/// Working precision for linear witness searches.
inline int linear_search_precision(const CyclicSmoothAction& a, const RamificationProfile& prof) {
    const int want = 3 * prof.different + static_cast<int>(a.faithful_order()) + 2 * static_cast<int>(a.p()) + 4;
    return std::min(want, a.precision() - 1);
}

namespace detail_witness {

inline TraceZeroWitness certify(const CyclicSmoothAction& a, Series f, std::string method) {
    if (f.precision() == 0 || f[0] == 0) throw InternalError("witness is not a unit");
    const VectorField tr = trace(a, VectorField(f));
    if (!tr.f.is_zero_to_precision()) throw InternalError("witness (" + method + ") has nonzero trace");
    const int prec = tr.f.precision();
    return TraceZeroWitness{VectorField(std::move(f)), std::move(method), prec};
}

inline TraceZeroWitness linear_witness(const CyclicSmoothAction& a, const RamificationProfile& prof) {
    const int M = linear_search_precision(a, prof);
    auto f = trace_zero_linear(a, M);
    if (!f) throw InternalError("linear witness search failed although a witness exists");
    return certify(a, *f, "linear-solve");
}

// (1 - x^{m(p-1)})^{a/m} with a p + b m = 1: b = -1 when m = -1 mod p,
// otherwise b = m^{-1} mod p.
inline Series closed_form_witness(u64 p, int m, int precision) {
    const long long pp = static_cast<long long>(p);
    long long b;
    if ((m + 1) % pp == 0) {
        b = -1;
    } else {
        b = static_cast<long long>(*fp::inverse_mod(static_cast<u64>(m) % p, p));
    }
    const long long num = 1 - b * m;
    if (num % pp != 0) throw InternalError("Bezout relation failed");
    const long long aexp = num / pp;
    const Series u = sub(Series::constant(p, 1, precision), Series::monomial(p, 1, m * static_cast<int>(p - 1), precision));
    return rational_power(u, aexp, m);
}

} // namespace detail_witness

/// Unit vector field with vanishing trace, re-verified by direct trace.
/// Supports |G_0| in {1, p, p^2}.
inline TraceZeroWitness trace_zero_basis_construct(const CyclicSmoothAction& a) {
    if (!trace_zero_basis_exists(a)) {
        throw ExistenceFails("2*different+1 is divisible by |G_0| and the action is faithful");
    }
    const u64 p = a.p();
    const int N = a.precision();
    if (!a.is_faithful()) {
        return detail_witness::certify(a, Series::constant(p, 1, N - 1), "non-faithful");
    }
    const RamificationProfile prof = ramification_profile(a);
    const int n0 = prof.faithful_exponent;
    if (n0 > 2) throw HypothesisError("witness construction supports |G_0| <= p^2");
    const int m0 = prof.jumps[0];
    if (n0 == 1) {
        if ((2 * static_cast<u64>(m0) + 1) % p == 0) throw InternalError("existence criterion inconsistent");
        if (agree(a.generator().image(), standard_series(p, m0, N))) {
            return detail_witness::certify(a, detail_witness::closed_form_witness(p, m0, N - 1), "closed-form");
        }
        return detail_witness::linear_witness(a, prof);
    }
    if ((2 * static_cast<u64>(m0) + 1) % p != 0) {
        // A witness for the order-p subgroup H has Tr_G = Tr_{G/H} Tr_H = 0.
        const CyclicSmoothAction h = a.subgroup(1);
        const RamificationProfile hprof = ramification_profile(h);
        TraceZeroWitness w = detail_witness::linear_witness(h, hprof);
        return detail_witness::certify(a, w.field.f, "subgroup-" + w.method);
    }
    // Descent through y = norm of H: the quotient acts on k[[y]] with
    // conductor m0, h = (Tr_H d/dx)(dy) has nu_y(h) = q prime to p.
    const CyclicSmoothAction hact = a.subgroup(1);
    const Series y = norm_parameter(hact);
    const Series sy = expand_in_parameter(compose(y, a.generator().image()), y);
    const CyclicSmoothAction quotient = CyclicSmoothAction::make(SmoothAutomorphism(sy), 1);
    const Series hser = theta(hact, VectorField(Series::constant(p, 1, N)), y);
    const Valuation qv = hser.valuation();
    if (!qv.is_finite()) throw PrecisionError("(Tr_H d/dx)(dy) vanishes at this precision");
    const int q = qv.value();
    if (static_cast<u64>(q) % p == 0) {
        throw InternalError("descent valuation divisible by p");
    }
    const VectorField f = trace_zero_with_valuation(quotient, q);
    const int n = std::min(f.f.precision(), hser.precision());
    const Series ratio = divide(shift_down(f.f.truncate(n), q), shift_down(hser.truncate(n), q));
    return detail_witness::certify(a, compose(ratio, y), "descent");
}

/// dim Ext^1_G(Omega, R) = floor(2d / p^n) - ceil(d / p^n) for a faithful
/// action of order p^n with different d.
inline int ext1_dimension_smooth(const RamificationProfile& prof, int n) {
    const u64 order = ipow(prof.p, n);
    if (prof.group_order != order) throw HypothesisError("action must be faithful of order p^n");
    const long long d = prof.different;
    const long long q = static_cast<long long>(order);
    return static_cast<int>((2 * d) / q - (d + q - 1) / q);
}

/// Compares Tr_G phi with Tr_{G/H}((Tr_H phi)(dy) d/dy), H the order-p
/// subgroup of G_0 and y its norm, both sides evaluated on dy.
inline bool tower_trace_identity_check(const CyclicSmoothAction& a, const VectorField& phi) {
    const u64 p = a.p();
    const int n0 = a.faithful_exponent();
    if (n0 == 0) return true;
    const CyclicSmoothAction hact = a.subgroup(n0 - 1);
    const Series y = norm_parameter(hact);
    const Series dy = derivative(y);
    const Series lhs = mul(trace(a, phi).f, dy);
    const Series inner = theta(hact, phi, y);
    Series rhs_y = inner;
    if (n0 > 1) {
        const Series sy = expand_in_parameter(compose(y, a.generator().image()), y);
        const CyclicSmoothAction quotient = CyclicSmoothAction::make(SmoothAutomorphism(sy), n0 - 1);
        rhs_y = trace(quotient, VectorField(inner)).f;
    }
    Series rhs = compose(rhs_y, y);
    if (a.kernel_multiplicity() == 0) rhs = scale(rhs, 0);
    return agree(lhs, rhs);
}

} // namespace equideform::smooth

#endif

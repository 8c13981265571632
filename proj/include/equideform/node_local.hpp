#ifndef EQUIDEFORM_NODE_LOCAL_HPP
#define EQUIDEFORM_NODE_LOCAL_HPP

// Cyclic p-group actions on the formal node k[[x,y]]/(xy) that fix both
// branches: conductor and different pairs, the dimension counts for
// topologically trivial deformations, first-order lifts to xy = lambda*eps,
// and the relevability trichotomy.

#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>
#include <equideform/linalg.hpp>
#include <equideform/series.hpp>
#include <equideform/smooth_local.hpp>

namespace equideform::node {

/// A branch conductor: a positive integer or infinity (trivial branch action).
class Conductor {
public:
    static Conductor finite(int m) {
        if (m <= 0) throw HypothesisError("conductor must be a positive integer or inf");
        return Conductor(m);
    }
    static Conductor infinity() { return Conductor(0); }

    bool is_infinite() const noexcept { return m_ == 0; }
    bool is_finite() const noexcept { return m_ != 0; }
    int value() const {
        if (m_ == 0) throw HypothesisError("infinite conductor has no integer value");
        return m_;
    }
    bool equals(int m) const noexcept { return m_ != 0 && m_ == m; }

    std::string to_string() const { return m_ == 0 ? "inf" : std::to_string(m_); }

    friend bool operator==(const Conductor& a, const Conductor& b) noexcept { return a.m_ == b.m_; }
    friend std::ostream& operator<<(std::ostream& os, const Conductor& c) { return os << c.to_string(); }

private:
    explicit Conductor(int m) : m_(m) {}
    int m_;
};

inline Conductor parse_conductor(const std::string& s) {
    if (s == "inf") return Conductor::infinity();
    std::size_t used = 0;
    int m = 0;
    try {
        m = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw HypothesisError("invalid conductor '" + s + "'");
    }
    if (used != s.size()) throw HypothesisError("invalid conductor '" + s + "'");
    return Conductor::finite(m);
}

enum class Branch { X, Y };

enum class RelevabilityClass { Unconditional, Conditional, NonRelevable };

inline std::string to_string(RelevabilityClass r) {
    switch (r) {
    case RelevabilityClass::Unconditional: return "Unconditional";
    case RelevabilityClass::Conditional: return "Conditional";
    case RelevabilityClass::NonRelevable: return "NonRelevable";
    }
    return "?";
}

inline RelevabilityClass parse_relevability(const std::string& s) {
    if (s == "Unconditional") return RelevabilityClass::Unconditional;
    if (s == "Conditional") return RelevabilityClass::Conditional;
    if (s == "NonRelevable") return RelevabilityClass::NonRelevable;
    throw DataError("unknown relevability class '" + s + "'");
}

/// sigma(x) = P0(x), sigma(y) = P1(y).
struct NodeAutomorphism {
    Series P0;
    Series P1;

    NodeAutomorphism(Series p0, Series p1) : P0(std::move(p0)), P1(std::move(p1)) {
        check_same_field(P0, P1);
        smooth::SmoothAutomorphism check_x(P0);
        smooth::SmoothAutomorphism check_y(P1);
    }
};

/// Z/p^n acting on the node through a branch-preserving generator.
class CyclicNodeAction {
public:
    static CyclicNodeAction make(const NodeAutomorphism& g, int n) {
        return CyclicNodeAction(g, n);
    }

    u64 p() const noexcept { return x_.p(); }
    int n() const noexcept { return x_.n(); }
    u64 group_order() const noexcept { return x_.group_order(); }
    int precision() const noexcept { return std::min(x_.precision(), y_.precision()); }
    const NodeAutomorphism& generator() const noexcept { return g_; }
    const smooth::CyclicSmoothAction& branch(Branch b) const noexcept { return b == Branch::X ? x_ : y_; }
    const smooth::CyclicSmoothAction& x_branch() const noexcept { return x_; }
    const smooth::CyclicSmoothAction& y_branch() const noexcept { return y_; }

private:
    CyclicNodeAction(const NodeAutomorphism& g, int n)
        : g_(g),
          x_(smooth::CyclicSmoothAction::make(smooth::SmoothAutomorphism(g.P0), n)),
          y_(smooth::CyclicSmoothAction::make(smooth::SmoothAutomorphism(g.P1), n)) {}

    NodeAutomorphism g_;
    smooth::CyclicSmoothAction x_;
    smooth::CyclicSmoothAction y_;
};

inline Series branch_series(u64 p, const Conductor& m, int precision) {
    if (m.is_infinite()) return Series::variable(p, precision);
    return smooth::standard_series(p, m.value(), precision);
}

/// sigma(x) = x/(1+x^m)^{1/m}, sigma(y) = y/(1+y^m')^{1/m'}; identity on a
/// branch with infinite conductor.
inline CyclicNodeAction standard_node_action(u64 p, const Conductor& m, const Conductor& mp, int precision) {
    return CyclicNodeAction::make(NodeAutomorphism(branch_series(p, m, precision), branch_series(p, mp, precision)), 1);
}

struct NodeProfile {
    u64 p = 2;
    u64 group_order = 1;
    Conductor conductor_x = Conductor::infinity();
    Conductor conductor_y = Conductor::infinity();
    int different_x = 0;
    int different_y = 0;
    u64 image_order_x = 1;
    u64 image_order_y = 1;
};

inline NodeProfile node_profile(const CyclicNodeAction& a) {
    NodeProfile prof;
    prof.p = a.p();
    prof.group_order = a.group_order();
    const smooth::RamificationProfile px = smooth::ramification_profile(a.x_branch());
    const smooth::RamificationProfile py = smooth::ramification_profile(a.y_branch());
    prof.conductor_x = px.conductor ? Conductor::finite(*px.conductor) : Conductor::infinity();
    prof.conductor_y = py.conductor ? Conductor::finite(*py.conductor) : Conductor::infinity();
    prof.different_x = px.different;
    prof.different_y = py.different;
    prof.image_order_x = px.group_order;
    prof.image_order_y = py.group_order;
    return prof;
}

/// m + m' + 2 + floor(m/p) - ceil((2m+1)/p) + floor(m'/p) - ceil((2m'+1)/p).
inline int h1_ext0_formula(u64 p, int m, int mp) {
    const long long P = static_cast<long long>(p);
    auto part = [P](long long c) { return c + 1 + c / P - (2 * c + 1 + P - 1) / P; };
    return static_cast<int>(part(m) + part(mp));
}

/// dim H^1(G, Ext^0(Omega, R)) for an order-p action, faithful on both branches.
inline int h1_ext0_dimension(const CyclicNodeAction& a) {
    if (a.n() != 1) throw HypothesisError("h1_ext0 formula requires a group of order p");
    const NodeProfile prof = node_profile(a);
    if (prof.conductor_x.is_infinite() || prof.conductor_y.is_infinite()) {
        throw HypothesisError("h1_ext0 formula requires finite conductors on both branches (got (" +
                              prof.conductor_x.to_string() + ", " + prof.conductor_y.to_string() + "))");
    }
    return h1_ext0_formula(a.p(), prof.conductor_x.value(), prof.conductor_y.value());
}

/// a + a' with a = 0 iff m < oo and m + 1 != 0 mod p.
inline int phi_kernel_formula(u64 p, const Conductor& m, const Conductor& mp) {
    auto part = [p](const Conductor& c) {
        return (c.is_finite() && (static_cast<u64>(c.value()) + 1) % p != 0) ? 0 : 1;
    };
    return part(m) + part(mp);
}

inline int phi_kernel_dimension(const CyclicNodeAction& a) {
    if (a.n() != 1) throw HypothesisError("phi-kernel count requires a group of order p");
    const NodeProfile prof = node_profile(a);
    return phi_kernel_formula(a.p(), prof.conductor_x, prof.conductor_y);
}

struct CoboundaryResult {
    bool is_coboundary = false;
    /// Explicit primitive (1 - x^{m(p-1)})^{(m+1)/(pm)} - 1 when m + 1 = 0 mod p
    /// and the branch is in standard form; satisfies (1 - sigma)(f d/dx) = -phi(sigma).
    std::optional<Series> explicit_primitive;
    bool explicit_primitive_verified = false;
};

/// phi(sigma) = d/dx - sigma(d/dx), i.e. phi(sigma)(dx) = 1 - 1/sigma'.
inline Series phi_cocycle_value(const smooth::CyclicSmoothAction& b) {
    const Series one = Series::constant(b.p(), 1, b.inverse_derivative(1).precision());
    return sub(one, b.inverse_derivative(1));
}

/// Decides whether phi is a coboundary inside x k[[x]] d/dx by solving
/// f - f(s)/s' = 1 - 1/s' with f in x k[[x]], modulo x^M.
inline CoboundaryResult phi_cocycle_is_coboundary(const CyclicNodeAction& a, Branch which) {
    const smooth::CyclicSmoothAction& b = a.branch(which);
    const u64 p = b.p();
    CoboundaryResult res;
    if (b.faithful_order() == 1) {
        res.is_coboundary = true;
        return res;
    }
    const smooth::RamificationProfile prof = smooth::ramification_profile(b);
    const int M = smooth::linear_search_precision(b, prof);
    const FpMatrix A = smooth::coboundary_matrix(b, 1, M - 1, M);
    const Series c = phi_cocycle_value(b).truncate(M);
    std::vector<u64> rhs(c.coefficients().begin(), c.coefficients().end());
    res.is_coboundary = A.solve(rhs).has_value();
    const int m = *prof.conductor;
    const int N = b.precision();
    if (b.faithful_order() == p && (static_cast<u64>(m) + 1) % p == 0 &&
        agree(b.generator().image(), smooth::standard_series(p, m, N))) {
        const Series u = sub(Series::constant(p, 1, N), Series::monomial(p, 1, m * static_cast<int>(p - 1), N));
        const Series f = sub(rational_power(u, (m + 1) / static_cast<int>(p), m),
                             Series::constant(p, 1, N));
        const smooth::VectorField image = smooth::act_on_vector_field(b.generator(), smooth::VectorField(f));
        const Series cob = sub(f, image.f);
        res.explicit_primitive_verified = agree(add(cob, phi_cocycle_value(b)), Series::zero(p, N));
        res.explicit_primitive = f;
    }
    return res;
}

/// A first-order lift sigma_eps of the generator to xy = lambda*eps.
struct FirstOrderNodeLift {
    FpScalar lambda;
    Series f0;  // in x k[[x]]
    Series f1;  // in y k[[y]]
};

/// v_{sigma,0}, v_{sigma,1}: the degree-2 coefficients of sigma(x), sigma(y).
inline std::pair<u64, u64> degree_two_coefficients(const CyclicNodeAction& a) {
    return {a.generator().P0[2], a.generator().P1[2]};
}

namespace detail_lift {

// f in x k[[x]] with Tr((f - v) d/dx) = 0 mod x^M.
inline std::optional<Series> solve_branch(const smooth::CyclicSmoothAction& b, u64 v) {
    const u64 p = b.p();
    if (v == 0 || b.kernel_multiplicity() == 0) return Series::zero(p, b.precision() - 1);
    const smooth::RamificationProfile prof = smooth::ramification_profile(b);
    const int M = smooth::linear_search_precision(b, prof);
    const FpMatrix A = smooth::trace_matrix(b, 1, M - 1, M);
    const FpMatrix t0 = smooth::trace_matrix(b, 0, 1, M);
    std::vector<u64> rhs(static_cast<std::size_t>(M));
    for (int r = 0; r < M; ++r) rhs[static_cast<std::size_t>(r)] = fp::mul(t0.at(static_cast<std::size_t>(r), 0), v, p);
    const auto sol = A.solve(rhs);
    if (!sol) return std::nullopt;
    std::vector<u64> c(static_cast<std::size_t>(M), 0);
    for (int i = 1; i < M; ++i) c[static_cast<std::size_t>(i)] = (*sol)[static_cast<std::size_t>(i - 1)];
    return Series::from_raw(p, std::move(c));
}

} // namespace detail_lift

/// Lift with lambda = 1: solves Tr((f0 - v1) d/dx) = 0 = Tr((f1 - v0) d/dy).
inline FirstOrderNodeLift lift_first_order(const CyclicNodeAction& a) {
    const auto [v0, v1] = degree_two_coefficients(a);
    const auto f0 = detail_lift::solve_branch(a.x_branch(), v1);
    if (!f0) throw NotLiftable("trace equation on the x-branch has no solution");
    const auto f1 = detail_lift::solve_branch(a.y_branch(), v0);
    if (!f1) throw NotLiftable("trace equation on the y-branch has no solution");
    return FirstOrderNodeLift{FpScalar(1, a.p()), *f0, *f1};
}

/// Element X(x) + Y(y) + eps (R(x) + S(y)) of k[eps][[x,y]]/(xy - lambda eps);
/// constants live in X and R.
struct EpsNodeElement {
    Series X, Y, R, S;
};

namespace detail_ring {

// A(x) B(y) in k[[x,y]]/(xy) = A B(0) + A(0) (B - B(0)): the part in the first
// variable (with constant) and the part in the second (without).
inline std::pair<Series, Series> mixed(const Series& A, const Series& B) {
    const u64 a0 = A.precision() > 0 ? A[0] : 0;
    const u64 b0 = B.precision() > 0 ? B[0] : 0;
    Series ypart = scale(B, static_cast<i64>(a0));
    if (ypart.precision() > 0) ypart = sub(ypart, Series::constant(A.modulus(), static_cast<i64>(fp::mul(a0, b0, A.modulus())), ypart.precision()));
    return {scale(A, static_cast<i64>(b0)), ypart};
}

inline Series constant_free(const Series& s) {
    if (s.precision() == 0) return s;
    return sub(s, Series::constant(s.modulus(), static_cast<i64>(s[0]), s.precision()));
}

} // namespace detail_ring

inline EpsNodeElement eps_mul(const EpsNodeElement& e, const EpsNodeElement& f, u64 lambda) {
    using detail_ring::mixed;
    const u64 p = e.X.modulus();
    EpsNodeElement out{mul(e.X, f.X), mul(e.Y, f.Y), Series::zero(p, 0), Series::zero(p, 0)};
    // Constants of X times Y-series stay in Y; the nonconstant cross terms
    // x A(x) * y B(y) = lambda eps A(x) B(y).
    const u64 ex0 = e.X[0], fx0 = f.X[0];
    out.Y = add(add(out.Y, scale(f.Y, static_cast<i64>(ex0))), scale(e.Y, static_cast<i64>(fx0)));
    Series R = Series::zero(p, std::min(e.R.precision(), f.R.precision()));
    Series S = Series::zero(p, std::min(e.S.precision(), f.S.precision()));
    auto cross = [&](const Series& Xs, const Series& Ys) {
        const Series A = shift_down(detail_ring::constant_free(Xs), 1);
        const Series B = shift_down(Ys, 1);
        auto [xp, yp] = mixed(A, B);
        R = add(R, scale(xp, static_cast<i64>(lambda)));
        S = add(S, scale(yp, static_cast<i64>(lambda)));
    };
    cross(e.X, f.Y);
    cross(f.X, e.Y);
    // eps parts, multiplied in k[[x,y]]/(xy).
    auto eps_part = [&](const EpsNodeElement& a, const EpsNodeElement& b) {
        // (X_a + Y_a)(R_b + S_b): X*S and Y*R only see constants.
        R = add(R, mul(a.X, b.R));
        S = add(S, mul(a.Y, b.S));
        S = add(S, scale(b.S, static_cast<i64>(a.X[0])));
        S = add(S, scale(a.Y, static_cast<i64>(b.R[0])));
    };
    eps_part(e, f);
    eps_part(f, e);
    out.R = R;
    out.S = S;
    return out;
}

/// The lift sigma_eps of the generator built from (lambda, f0, f1):
/// sigma_eps(x) = P0 + eps(-lambda E1(y) + h0(x)), E1 = (P1 - y)/(y P1),
/// h0 = f0 P0', and symmetrically for y.
class EpsLift {
public:
    EpsLift(const CyclicNodeAction& a, const FirstOrderNodeLift& lift) : p_(a.p()), lambda_(lift.lambda.value()) {
        if (lift.lambda.modulus() != p_) throw ModulusMismatch("lambda and action over different fields");
        P0_ = a.generator().P0;
        P1_ = a.generator().P1;
        E0_ = fraction(P0_);
        E1_ = fraction(P1_);
        h0_ = mul(lift.f0, derivative(P0_));
        h1_ = mul(lift.f1, derivative(P1_));
    }

    /// sigma_eps applied to an element: X(P0 + eps D0) = X(P0) + eps X'(P0) D0.
    EpsNodeElement apply(const EpsNodeElement& e) const {
        const Series dX = compose(derivative(e.X), P0_);
        const Series dY = compose(derivative(e.Y), P1_);
        Series R = add(compose(e.R, P0_), mul(dX, h0_));
        Series S = add(compose(e.S, P1_), mul(dY, h1_));
        const i64 ml = -static_cast<i64>(lambda_);
        const auto [rx, sy] = detail_ring::mixed(dX, E1_);
        const auto [ry, sx] = detail_ring::mixed(E0_, dY);
        R = add(R, add(scale(rx, ml), scale(ry, ml)));
        S = add(S, add(scale(sy, ml), scale(sx, ml)));
        return {compose(e.X, P0_), compose(e.Y, P1_), R, S};
    }

    EpsNodeElement image_of_x() const { return apply(coordinate(Branch::X)); }
    EpsNodeElement image_of_y() const { return apply(coordinate(Branch::Y)); }

    EpsNodeElement coordinate(Branch b) const {
        const int N = P0_.precision();
        const Series x = Series::variable(p_, N);
        const Series z = Series::zero(p_, N);
        if (b == Branch::X) return {x, z, z, z};
        return {Series::zero(p_, N), Series::variable(p_, N), z, z};
    }

    u64 lambda() const noexcept { return lambda_; }

private:
    // (P - t)/(t P) as a series in t; constant term is the t^2 coefficient of P.
    static Series fraction(const Series& P) {
        const u64 p = P.modulus();
        const int N = P.precision();
        const Series num = shift_down(sub(P, Series::variable(p, N)), 2);
        const Series den = shift_down(P, 1);
        return divide(num, den);
    }

    u64 p_;
    u64 lambda_;
    Series P0_ = Series::zero(2, 0), P1_ = Series::zero(2, 0);
    Series E0_ = Series::zero(2, 0), E1_ = Series::zero(2, 0);
    Series h0_ = Series::zero(2, 0), h1_ = Series::zero(2, 0);
};

inline bool eps_is(const EpsNodeElement& e, const EpsNodeElement& target) {
    return agree(e.X, target.X) && agree(e.Y, target.Y) && agree(e.R, target.R) && agree(e.S, target.S);
}

inline int eps_precision(const EpsNodeElement& e) {
    return std::min({e.X.precision(), e.Y.precision(), e.R.precision(), e.S.precision()});
}

/// Checks that sigma_eps preserves (xy - lambda eps) and that
/// sigma_eps^(p^n) = id to first order in eps.
inline bool verify_lift(const CyclicNodeAction& a, const FirstOrderNodeLift& lift) {
    const u64 p = a.p();
    const EpsLift L(a, lift);
    const EpsNodeElement sx = L.image_of_x();
    const EpsNodeElement sy = L.image_of_y();
    const EpsNodeElement prod = eps_mul(sx, sy, L.lambda());
    const int np = eps_precision(prod);
    if (np < 2) throw PrecisionError("lift verification lost all precision");
    const Series z = Series::zero(p, np);
    const EpsNodeElement lam{z, z, Series::constant(p, static_cast<i64>(L.lambda()), np), z};
    if (!eps_is(prod, lam)) return false;
    for (Branch b : {Branch::X, Branch::Y}) {
        const EpsNodeElement start = L.coordinate(b);
        EpsNodeElement cur = start;
        for (u64 k = 0; k < a.group_order(); ++k) cur = L.apply(cur);
        if (eps_precision(cur) < 2) throw PrecisionError("lift verification lost all precision");
        if (!eps_is(cur, start)) return false;
    }
    return true;
}

/// Branch condition of the relevability criterion: (relevable, unconditional).
inline std::pair<bool, bool> branch_condition(int different, u64 image_order, u64 group_order) {
    const bool trace_ok = (2 * static_cast<u64>(different) + 1) % image_order != 0;
    return {trace_ok || image_order != group_order, trace_ok};
}

/// Relevability from numeric local data.
inline RelevabilityClass classify_relevability(const NodeProfile& prof) {
    const bool one_x = prof.conductor_x.equals(1);
    const bool one_y = prof.conductor_y.equals(1);
    if (!one_x && !one_y) return RelevabilityClass::Unconditional;
    bool relevable = true, unconditional = true;
    // A conductor 1 on one branch puts the condition on the other branch.
    if (one_y) {
        const auto [r, u] = branch_condition(prof.different_x, prof.image_order_x, prof.group_order);
        relevable = relevable && r;
        unconditional = unconditional && u;
    }
    if (one_x) {
        const auto [r, u] = branch_condition(prof.different_y, prof.image_order_y, prof.group_order);
        relevable = relevable && r;
        unconditional = unconditional && u;
    }
    if (unconditional) return RelevabilityClass::Unconditional;
    return relevable ? RelevabilityClass::Conditional : RelevabilityClass::NonRelevable;
}

inline RelevabilityClass classify_relevability(const CyclicNodeAction& a) {
    return classify_relevability(node_profile(a));
}

} // namespace equideform::node

#endif

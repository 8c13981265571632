// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <equideform/equideform.hpp>

using namespace equideform;

namespace {

using node::Conductor;

struct Outcome {
    bool pass = true;
    long checks = 0;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
    void check(bool ok, const std::string& why) {
        ++checks;
        if (!ok) fail(why);
    }
};

std::vector<int> desk_conductors(u64 p) {
    std::vector<int> out;
    for (int m = 1; m <= 7; ++m) {
        if (static_cast<u64>(m) % p != 0) out.push_back(m);
    }
    return out;
}

const std::vector<u64> kPrimes{2, 3, 5};

// Stabilization failures seen anywhere in the oracle sweeps.
long g_oracle_runs = 0;
std::vector<std::string> g_unstable;

std::string tag(u64 p, int m) { return "p=" + std::to_string(p) + " m=" + std::to_string(m); }
std::string tag(u64 p, int m, int mp) { return tag(p, m) + " m'=" + std::to_string(mp); }

Outcome criterion1() {
    Outcome o;
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            const smooth::RamificationProfile prof = smooth::ramification_profile(smooth::standard_action(p, m, 64));
            const int W = oracle::default_window(prof);
            const int A = W + oracle::default_buffer(prof);
            const smooth::CyclicSmoothAction a = smooth::standard_action(p, m, oracle::required_precision(p, A));
            ++g_oracle_runs;
            try {
                const int h = oracle::h1_dimension_bruteforce(a, oracle::Shape::Smooth, W, A);
                const int f = smooth::ext1_dimension_smooth(prof, 1);
                o.check(h == f, tag(p, m) + ": formula " + std::to_string(f) + ", oracle " + std::to_string(h));
            } catch (const StabilizationFailure& e) {
                g_unstable.push_back(tag(p, m) + ": " + e.what());
                o.fail(tag(p, m) + ": " + e.what());
            }
        }
    }
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            for (int mp : desk_conductors(p)) {
                const Conductor cm = Conductor::finite(m), cmp = Conductor::finite(mp);
                const auto [W, A] = oracle::node_settings(node::standard_node_action(p, cm, cmp, 64));
                const node::CyclicNodeAction a = node::standard_node_action(p, cm, cmp, oracle::required_precision(p, A));
                ++g_oracle_runs;
                try {
                    const int h = oracle::h1_dimension_bruteforce(a, W, A);
                    const int f = node::h1_ext0_dimension(a);
                    o.check(h == f, tag(p, m, mp) + ": formula " + std::to_string(f) + ", oracle " + std::to_string(h));
                } catch (const StabilizationFailure& e) {
                    g_unstable.push_back(tag(p, m, mp) + ": " + e.what());
                    o.fail(tag(p, m, mp) + ": " + e.what());
                }
            }
        }
    }
    return o;
}

void check_trace_zero(Outcome& o, const smooth::CyclicSmoothAction& a, const std::string& name) {
    const bool exists = smooth::trace_zero_basis_exists(a);
    const auto found = oracle::exhaustive_unit_witness_search(a, oracle::default_search_precision(a));
    if (exists) {
        try {
            const smooth::TraceZeroWitness w = smooth::trace_zero_basis_construct(a);
            const bool unit = w.field.f.precision() > 0 && w.field.f[0] != 0;
            const bool zero = smooth::trace(a, w.field).f.is_zero_to_precision();
            o.check(unit && zero, name + ": witness (" + w.method + ") is not a unit with vanishing trace");
        } catch (const std::exception& e) {
            o.fail(name + ": construction failed: " + e.what());
        }
        o.check(found.has_value(), name + ": criterion true but the linear search finds no unit witness");
    } else {
        o.check(!found.has_value(), name + ": criterion false but the linear search finds a unit witness");
    }
}

Outcome criterion3() {
    Outcome o;
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            const smooth::RamificationProfile prof = smooth::ramification_profile(smooth::standard_action(p, m, 64));
            const int M = oracle::default_window(prof) + oracle::default_buffer(prof);
            check_trace_zero(o, smooth::standard_action(p, m, M + 2), tag(p, m));
            // The same generator inside Z/p^2 acts non-faithfully.
            const smooth::CyclicSmoothAction nf =
                smooth::CyclicSmoothAction::make(smooth::SmoothAutomorphism(smooth::standard_series(p, m, M + 2)), 2);
            check_trace_zero(o, nf, tag(p, m) + " in Z/p^2");
        }
    }
    for (u64 p : {2u, 3u}) {
        for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
            const smooth::CyclicSmoothAction probe = tower::tower_action(e.spec, 100);
            const smooth::CyclicSmoothAction a = tower::tower_action(e.spec, oracle::default_search_precision(probe) + 2);
            check_trace_zero(o, a, "tower p=" + std::to_string(p) + " (" + std::to_string(e.m0) + "," +
                                       std::to_string(e.m1) + ")");
        }
    }
    return o;
}

void check_lift(Outcome& o, const node::CyclicNodeAction& a, const std::string& name) {
    const node::RelevabilityClass cls = node::classify_relevability(a);
    if (a.p() == 2) o.check(cls != node::RelevabilityClass::NonRelevable, name + ": p = 2 action not relevable");
    bool lifted = true;
    try {
        const node::FirstOrderNodeLift lift = node::lift_first_order(a);
        o.check(node::verify_lift(a, lift), name + ": produced lift fails verification");
    } catch (const NotLiftable&) {
        lifted = false;
    }
    o.check(lifted == (cls != node::RelevabilityClass::NonRelevable),
            name + ": class " + node::to_string(cls) + " but lift " + (lifted ? "succeeds" : "fails"));
}

Outcome criterion4() {
    Outcome o;
    for (u64 p : kPrimes) {
        std::vector<Conductor> cs{Conductor::infinity()};
        for (int m : desk_conductors(p)) cs.push_back(Conductor::finite(m));
        const int N = 3 * static_cast<int>(p - 1) * 8 + 30;
        for (const Conductor& m : cs) {
            for (const Conductor& mp : cs) {
                check_lift(o, node::standard_node_action(p, m, mp, N),
                           "p=" + std::to_string(p) + " (" + m.to_string() + "," + mp.to_string() + ")");
            }
        }
    }
    // Order p^2: a tower on one branch against a standard or tower branch.
    for (u64 p : {2u, 3u}) {
        const std::vector<tower::CatalogEntry> cat = tower::desk_towers(p);
        for (const tower::CatalogEntry& e : cat) {
            const int d = static_cast<int>(p - 1) * ((e.m1 + 1) + static_cast<int>(p) * (e.m0 + 1));
            const int N = 3 * d + 40;
            const Series t = tower::tower_series(e.spec, N);
            std::vector<std::pair<Series, std::string>> others;
            for (int m : desk_conductors(p)) {
                if (m <= 3) others.emplace_back(smooth::standard_series(p, m, N), "std " + std::to_string(m));
            }
            others.emplace_back(Series::variable(p, N), "trivial");
            for (const tower::CatalogEntry& f : cat) {
                others.emplace_back(tower::tower_series(f.spec, N),
                                    "tower (" + std::to_string(f.m0) + "," + std::to_string(f.m1) + ")");
            }
            const std::string name = "p=" + std::to_string(p) + " tower (" + std::to_string(e.m0) + "," +
                                     std::to_string(e.m1) + ") x ";
            for (const auto& [s, label] : others) {
                check_lift(o, node::CyclicNodeAction::make(node::NodeAutomorphism(t, s), 2), name + label);
                check_lift(o, node::CyclicNodeAction::make(node::NodeAutomorphism(s, t), 2), label + " x " + name);
            }
        }
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    std::mt19937_64 rng(5);
    auto run = [&](const smooth::CyclicSmoothAction& a, const std::string& name) {
        const smooth::RamificationProfile prof = smooth::ramification_profile(a);
        const u64 p = a.p();
        const Series z = smooth::norm_parameter(a);
        std::uniform_int_distribution<i64> d(0, static_cast<i64>(p) - 1);
        std::uniform_int_distribution<i64> nz(1, static_cast<i64>(p) - 1);
        for (int ell = 0; ell <= 2 * static_cast<int>(p * p); ++ell) {
            int predicted;
            try {
                predicted = smooth::predict_trace_valuation(prof, ell);
            } catch (const HypothesisError&) {
                continue;
            }
            const int len = a.precision() - 1 - ell;
            std::vector<i64> c(static_cast<std::size_t>(len));
            for (i64& v : c) v = d(rng);
            c[0] = nz(rng);
            const Series f = shift_up(Series(p, c, len), ell);
            const Valuation v = smooth::theta(a, smooth::VectorField(f), z).valuation();
            o.check(v == Valuation::finite(predicted), name + " l=" + std::to_string(ell) + ": predicted " +
                                                           std::to_string(predicted) + ", computed " + v.to_string());
        }
    };
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            if ((2 * static_cast<u64>(m) + 1) % p != 0) continue;
            const int pp = static_cast<int>(p);
            run(smooth::standard_action(p, m, pp * (2 * pp + 2 * m + 6) + 10), tag(p, m));
        }
    }
    for (u64 p : {2u, 3u}) {
        for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
            if ((2 * static_cast<u64>(e.m0) + 1) % p != 0) continue;
            run(tower::tower_action(e.spec, 360), "tower p=" + std::to_string(p) + " (" + std::to_string(e.m0) + "," +
                                                      std::to_string(e.m1) + ")");
        }
    }
    if (o.checks == 0) o.fail("no admissible (profile, l) pairs were tested");
    return o;
}

Outcome criterion6() {
    Outcome o;
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            const smooth::RamificationProfile prof = smooth::ramification_profile(smooth::standard_action(p, m, 64));
            const int N = oracle::default_window(prof) + oracle::default_buffer(prof) + 4;
            const node::CyclicNodeAction a = node::standard_node_action(p, Conductor::finite(m), Conductor::infinity(), N);
            const bool expect = (static_cast<u64>(m) + 1) % p == 0;
            const node::CoboundaryResult r = node::phi_cocycle_is_coboundary(a, node::Branch::X);
            const bool independent = oracle::cocycle_class_is_zero(a.x_branch(), oracle::Shape::NodeBranch,
                                                                   node::phi_cocycle_value(a.x_branch()));
            o.check(r.is_coboundary == expect, tag(p, m) + ": solver says " + (r.is_coboundary ? "true" : "false"));
            o.check(independent == expect, tag(p, m) + ": oracle says " + (independent ? "true" : "false"));
            if (expect) {
                o.check(r.explicit_primitive.has_value() && r.explicit_primitive_verified,
                        tag(p, m) + ": explicit primitive missing or wrong");
            }
        }
        const node::CyclicNodeAction inf = node::standard_node_action(p, Conductor::infinity(), Conductor::finite(1), 40);
        o.check(node::phi_cocycle_is_coboundary(inf, node::Branch::X).is_coboundary,
                "p=" + std::to_string(p) + " m=inf: not a coboundary");
    }
    return o;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion7() {
    Outcome o;
    const std::string dir = EQUIDEFORM_SCENARIOS;
    try {
        for (const char* name : {"smooth_example_5.json", "smooth_example_14.json"}) {
            const global::GlobalCurveSpec s = global::parse_spec_text(read_file(dir + "/" + name));
            const global::DimensionReport r = global::dim_ext1_stable_curve(s);
            o.check(r.dim_ext1_total && *r.dim_ext1_total == global::dim_ext1_smooth_curve(s),
                    std::string(name) + ": stable and smooth formulas differ");
        }
        // Node-free grid: one component, ramification orbits of order p.
        for (u64 p : kPrimes) {
            for (int g = 0; g <= 3; ++g) {
                for (int m : desk_conductors(p)) {
                    const int d = static_cast<int>(p - 1) * (m + 1);
                    const int pp = static_cast<int>(p);
                    for (int k = 1; k <= 2; ++k) {
                        const int twice = pp * (2 * g - 2) + k * d;  // 2 g(C) - 2
                        if (twice < 2 || twice % 2 != 0) continue;
                        global::json j{{"p", p}, {"group_order", p}, {"singular_orbits", global::json::array()}};
                        j["components"] = {{{"id", "C"}, {"quotient_genus", g}, {"component_genus", twice / 2 + 1},
                                            {"stabilizer_order", p}, {"inertia_order", 1}}};
                        j["ramification_orbits"] = global::json::array();
                        for (int i = 0; i < k; ++i) {
                            j["ramification_orbits"].push_back(
                                {{"component", "C"}, {"different", d}, {"stabilizer_order", p}, {"image_group_order", p}});
                        }
                        j["flags"] = {{"all_stabilizers_cyclic", true},
                                      {"components_genus_ge_2", twice / 2 + 1 >= 2},
                                      {"action_free_on_dense_open", true}};
                        const global::GlobalCurveSpec s = global::parse_spec(j);
                        const global::DimensionReport r = global::dim_ext1_stable_curve(s);
                        const int per_orbit = 3 * g - 3 + k * ((2 * d) / pp);
                        o.check(*r.dim_ext1_total == per_orbit && r.dim_smooth_global == r.dim_ext1_total,
                                tag(p, m) + " g=" + std::to_string(g) + ": node-free total differs");
                    }
                }
            }
        }
        for (auto [base, want] : {std::pair{"global_example_15", 15}, std::pair{"global_example_12", 12}}) {
            const global::DimensionReport num =
                global::dim_ext1_stable_curve(global::parse_spec_text(read_file(dir + "/" + base + ".json")));
            const global::DimensionReport ser =
                global::dim_ext1_stable_curve(global::parse_spec_text(read_file(dir + "/" + base + "_series.json")));
            o.check(num.dim_ext1_total && *num.dim_ext1_total == want,
                    std::string(base) + ": numeric total " + std::to_string(num.dim_ext1_total.value_or(-1)));
            o.check(global::to_json(num) == global::to_json(ser), std::string(base) + ": series and numeric reports differ");
        }
    } catch (const std::exception& e) {
        o.fail(e.what());
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    o.checks = g_oracle_runs;
    for (const std::string& s : g_unstable) o.fail(s);
    // A larger bump on a sample of the sweep must not move the result either.
    for (u64 p : kPrimes) {
        for (int m : desk_conductors(p)) {
            const smooth::RamificationProfile prof = smooth::ramification_profile(smooth::standard_action(p, m, 64));
            const int W = oracle::default_window(prof);
            const int B = oracle::default_buffer(prof);
            const smooth::CyclicSmoothAction a = smooth::standard_action(p, m, oracle::required_precision(p, W + 2 * B + 2 * static_cast<int>(p)));
            try {
                const int base = oracle::h1_dimension_bruteforce(a, oracle::Shape::Smooth, W, W + B);
                const int wide = oracle::h1_dimension_bruteforce(a, oracle::Shape::Smooth, W + static_cast<int>(p), W + 2 * B);
                o.check(base == wide, tag(p, m) + ": result moves under a larger bump");
            } catch (const StabilizationFailure& e) {
                o.fail(tag(p, m) + ": " + e.what());
            }
        }
    }
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const std::vector<Criterion> criteria{
        {1, "formula-oracle equivalence, smooth", criterion1, 30},
        {2, "formula-oracle equivalence, node", criterion2, 60},
        {3, "trace-zero criterion vs construction and search", criterion3, 0},
        {4, "lifting trichotomy", criterion4, 0},
        {5, "valuation law", criterion5, 0},
        {6, "cocycle classes of phi_x", criterion6, 0},
        {7, "global consistency", criterion7, 5},
        {8, "oracle stabilization", criterion8, 0},
    };
    bool all = true;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("uncaught: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_seconds) + " s");
        }
        all = all && o.pass;
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << "criterion " << c.id << " [" << c.name << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << o.checks
             << " checks, " << secs << " s)";
        if (!o.pass) line << " - " << o.detail;
        std::cout << line.str() << std::endl;
    }
    return all ? 0 : 1;
}

// equideform: local and global invariants of equivariant deformations.
//
// Exit codes: 0 success, 2 hypothesis violation or invalid input, 1 internal
// error (including oracle instability and sweep mismatches).

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <equideform/equideform.hpp>

using namespace equideform;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitHypothesis = 2;

json coefficients(const Series& s, int limit) {
    json a = json::array();
    const std::vector<i64> c = s.to_ints();
    for (std::size_t i = 0; i < c.size() && static_cast<int>(i) < limit; ++i) a.push_back(c[i]);
    return a;
}

std::string show_series(const Series& s, int limit) {
    std::ostringstream os;
    const std::vector<i64> c = s.to_ints();
    os << "[";
    for (std::size_t i = 0; i < c.size() && static_cast<int>(i) < limit; ++i) os << (i ? " " : "") << c[i];
    if (static_cast<int>(c.size()) > limit) os << " ...";
    os << "] (precision " << s.precision() << ")";
    return os.str();
}

/// --precision, else EQUIDEFORM_PRECISION, else 4 (different + 1) p.
int choose_precision(int flag, int different, u64 p) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("EQUIDEFORM_PRECISION")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        throw HypothesisError(std::string("EQUIDEFORM_PRECISION must be a positive integer, got '") + env + "'");
    }
    return 4 * (different + 1) * static_cast<int>(p);
}

int different_from_jumps(u64 p, const std::vector<int>& jumps) {
    long long d = 0;
    const int n = static_cast<int>(jumps.size());
    for (int i = 0; i < n; ++i) d += static_cast<long long>(smooth::ipow(p, i)) * (jumps[n - 1 - i] + 1);
    return static_cast<int>(d * static_cast<long long>(p - 1));
}

void print_json_or_text(const json& j, bool as_json) {
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::cout << std::left << std::setw(22) << it.key() << " ";
        if (it->is_string()) std::cout << it->get<std::string>();
        else std::cout << it->dump();
        std::cout << "\n";
    }
}

// --- smooth ---------------------------------------------------------------

struct SmoothOptions {
    u64 p = 0;
    std::vector<int> m;
    int n = 0;
    int precision = 0;
    bool json = false;
};

smooth::SmoothAutomorphism smooth_generator(const SmoothOptions& o, int N) {
    if (o.m.size() == 1) return smooth::SmoothAutomorphism(smooth::standard_series(o.p, o.m[0], N));
    if (o.m.size() == 2) {
        for (const tower::CatalogEntry& e : tower::desk_towers(o.p)) {
            if (e.m0 == o.m[0] && e.m1 == o.m[1]) return smooth::SmoothAutomorphism(tower::tower_series(e.spec, N));
        }
        throw HypothesisError("no order-p^2 action with jumps (" + std::to_string(o.m[0]) + ", " +
                              std::to_string(o.m[1]) + ") in the built-in tower catalog for p = " +
                              std::to_string(o.p));
    }
    throw HypothesisError("give one conductor (order p) or two jumps (order p^2)");
}

int cmd_smooth(const SmoothOptions& o) {
    fp::check_modulus(o.p);
    for (int m : o.m) {
        if (m <= 0) throw HypothesisError("conductor must be a positive integer");
        if (static_cast<u64>(m) % o.p == 0) {
            throw HypothesisError("p | m: conductor " + std::to_string(m) + " is divisible by p = " + std::to_string(o.p));
        }
    }
    const int n = o.n > 0 ? o.n : static_cast<int>(o.m.size());
    if (n < static_cast<int>(o.m.size())) throw HypothesisError("group exponent n is smaller than the number of jumps");
    const int N = choose_precision(o.precision, different_from_jumps(o.p, o.m), o.p);
    const smooth::CyclicSmoothAction a = smooth::CyclicSmoothAction::make(smooth_generator(o, N), n);
    const smooth::RamificationProfile prof = smooth::ramification_profile(a);
    json j;
    j["command"] = "smooth";
    j["p"] = o.p;
    j["n"] = n;
    j["precision"] = N;
    j["faithful"] = a.is_faithful();
    j["jumps"] = prof.jumps;
    j["conductor"] = prof.conductor ? json(*prof.conductor) : json("inf");
    j["different"] = prof.different;
    if (a.is_faithful()) {
        j["ext1_dimension"] = smooth::ext1_dimension_smooth(prof, n);
    } else {
        j["ext1_dimension"] = nullptr;
        j["ext1_inapplicable"] = "the action is not faithful";
    }
    const bool exists = smooth::trace_zero_basis_exists(a);
    j["trace_zero_exists"] = exists;
    if (exists) {
        const smooth::TraceZeroWitness w = smooth::trace_zero_basis_construct(a);
        j["witness"] = {{"method", w.method},
                        {"verified_precision", w.verified_precision},
                        {"coefficients", coefficients(w.field.f, 16)}};
        if (!o.json) j["witness"] = w.method + ", trace zero to precision " + std::to_string(w.verified_precision) +
                                    ", f = " + show_series(w.field.f, 12);
    }
    print_json_or_text(j, o.json);
    return kExitOk;
}

// --- node -----------------------------------------------------------------

struct NodeOptions {
    u64 p = 0;
    std::string m;
    std::string mp = "inf";
    int precision = 0;
    bool json = false;
};

int cmd_node(const NodeOptions& o) {
    fp::check_modulus(o.p);
    const node::Conductor m = node::parse_conductor(o.m);
    const node::Conductor mp = node::parse_conductor(o.mp);
    for (const node::Conductor& c : {m, mp}) {
        if (c.is_finite() && static_cast<u64>(c.value()) % o.p == 0) {
            throw HypothesisError("p | m: conductor " + c.to_string() + " is divisible by p = " + std::to_string(o.p));
        }
    }
    auto dif = [&](const node::Conductor& c) {
        return c.is_finite() ? static_cast<int>(o.p - 1) * (c.value() + 1) : 0;
    };
    const int N = choose_precision(o.precision, std::max(dif(m), dif(mp)), o.p);
    const node::CyclicNodeAction a = node::standard_node_action(o.p, m, mp, N);
    const node::NodeProfile prof = node::node_profile(a);
    json j;
    j["command"] = "node";
    j["p"] = o.p;
    j["precision"] = N;
    j["conductors"] = {prof.conductor_x.to_string(), prof.conductor_y.to_string()};
    j["differents"] = {prof.different_x, prof.different_y};
    try {
        j["h1_ext0_dimension"] = node::h1_ext0_dimension(a);
    } catch (const HypothesisError& e) {
        j["h1_ext0_dimension"] = nullptr;
        j["h1_ext0_inapplicable"] = e.what();
    }
    j["phi_kernel_dimension"] = node::phi_kernel_dimension(a);
    j["phi_x_coboundary"] = node::phi_cocycle_is_coboundary(a, node::Branch::X).is_coboundary;
    j["phi_y_coboundary"] = node::phi_cocycle_is_coboundary(a, node::Branch::Y).is_coboundary;
    const node::RelevabilityClass cls = node::classify_relevability(a);
    j["relevability"] = node::to_string(cls);
    if (cls != node::RelevabilityClass::NonRelevable) {
        const node::FirstOrderNodeLift lift = node::lift_first_order(a);
        const bool ok = node::verify_lift(a, lift);
        if (!ok) throw InternalError("lift produced by the solver does not verify");
        if (o.json) {
            j["lift"] = {{"lambda", lift.lambda.value()},
                         {"f0", coefficients(lift.f0, 16)},
                         {"f1", coefficients(lift.f1, 16)},
                         {"verified", ok}};
        } else {
            j["lift"] = "lambda = " + std::to_string(lift.lambda.value()) + ", f0 = " + show_series(lift.f0, 10) +
                        ", f1 = " + show_series(lift.f1, 10) + ", verified";
        }
    }
    print_json_or_text(j, o.json);
    return kExitOk;
}

// --- global ---------------------------------------------------------------

int cmd_global(const std::string& path, bool as_json) {
    std::ifstream in(path);
    if (!in) throw HypothesisError("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const global::GlobalCurveSpec spec = global::parse_spec_text(ss.str());
    const global::DimensionReport r = global::dim_ext1_stable_curve(spec);
    const json j = global::to_json(r);
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }
    auto show = [](const json& v) { return v.is_null() ? std::string("n/a") : v.dump(); };
    for (const char* k : {"dim_ext1_total", "dim_smooth_global", "node_term", "component_term",
                          "dim_H1_local_global_term", "G_dimension", "F_dimension", "unconditional_count"}) {
        std::cout << std::left << std::setw(26) << k << " " << show(j[k]) << "\n";
    }
    for (std::size_t i = 0; i < r.node_relevability.size(); ++i) {
        std::cout << "node " << i << " relevability        " << node::to_string(r.node_relevability[i]) << "\n";
    }
    for (const auto& [k, why] : r.inapplicable) std::cout << "inapplicable " << k << ": " << why << "\n";
    for (const std::string& h : r.hypotheses_checked) std::cout << "checked: " << h << "\n";
    for (const std::string& w : r.warnings) std::cout << "warning: " << w << "\n";
    return kExitOk;
}

// --- sweep ----------------------------------------------------------------

struct SweepOptions {
    std::vector<u64> p_list;
    int m_max = 7;
    int precision = 0;
    unsigned long long seed = 20241;
    bool json = false;
};

bool telescoping_holds(const smooth::CyclicSmoothAction& a, std::mt19937_64& rng) {
    const u64 p = a.p();
    const int N = std::min(a.precision(), 24);
    std::uniform_int_distribution<i64> d(0, static_cast<i64>(p) - 1);
    std::vector<i64> c(static_cast<std::size_t>(N));
    for (i64& v : c) v = d(rng);
    const smooth::VectorField phi(Series(p, c, N));
    const smooth::VectorField sphi = smooth::act_on_vector_field(a.generator(), phi);
    return smooth::trace(a, smooth::VectorField(sub(phi.f, sphi.f))).f.is_zero_to_precision();
}

int cmd_sweep(const SweepOptions& o) {
    if (o.p_list.empty()) throw HypothesisError("empty parameter list: give --p-list");
    if (o.m_max < 1) throw HypothesisError("--m-max must be at least 1");
    std::vector<u64> ps = o.p_list;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (u64 p : ps) fp::check_modulus(p);
    std::mt19937_64 rng(o.seed);
    json rows = json::array();
    int mismatches = 0;
    auto add_row = [&](const std::string& kind, const std::string& params, int formula, int oracle, bool extra) {
        const bool match = formula == oracle && extra;
        if (!match) ++mismatches;
        rows.push_back({{"kind", kind}, {"params", params}, {"formula", formula}, {"oracle", oracle}, {"match", match}});
    };
    for (u64 p : ps) {
        for (int m = 1; m <= o.m_max; ++m) {
            if (static_cast<u64>(m) % p == 0) continue;
            auto build = [&](int N) { return smooth::standard_action(p, m, std::max(N, o.precision)); };
            const oracle::OracleRun run = oracle::h1_dimension_auto(build, oracle::Shape::Smooth);
            const smooth::CyclicSmoothAction a = build(64);
            const int formula = smooth::ext1_dimension_smooth(smooth::ramification_profile(a), 1);
            add_row("smooth", "p=" + std::to_string(p) + " m=" + std::to_string(m), formula, run.dimension,
                    telescoping_holds(a, rng));
        }
        for (int m = 1; m <= o.m_max; ++m) {
            for (int mp = 1; mp <= o.m_max; ++mp) {
                if (static_cast<u64>(m) % p == 0 || static_cast<u64>(mp) % p == 0) continue;
                const node::Conductor cm = node::Conductor::finite(m), cmp = node::Conductor::finite(mp);
                const auto [W, A] = oracle::node_settings(node::standard_node_action(p, cm, cmp, 64));
                const int N = std::max(oracle::required_precision(p, A), o.precision);
                const node::CyclicNodeAction a = node::standard_node_action(p, cm, cmp, N);
                add_row("node", "p=" + std::to_string(p) + " m=" + std::to_string(m) + " m'=" + std::to_string(mp),
                        node::h1_ext0_dimension(a), oracle::h1_dimension_bruteforce(a, W, A), true);
            }
        }
    }
    if (o.json) {
        std::cout << json{{"command", "sweep"}, {"seed", o.seed}, {"rows", rows}, {"mismatches", mismatches}}.dump(2)
                  << "\n";
    } else {
        std::cout << std::left << std::setw(8) << "kind" << std::setw(20) << "params" << std::setw(9) << "formula"
                  << std::setw(8) << "oracle" << "match\n";
        for (const json& r : rows) {
            std::cout << std::left << std::setw(8) << r["kind"].get<std::string>() << std::setw(20)
                      << r["params"].get<std::string>() << std::setw(9) << r["formula"].get<int>() << std::setw(8)
                      << r["oracle"].get<int>() << (r["match"].get<bool>() ? "yes" : "NO") << "\n";
        }
        std::cout << rows.size() << " rows, " << mismatches << " mismatches (seed " << o.seed << ")\n";
    }
    return mismatches == 0 ? kExitOk : kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariants of equivariant first-order deformations of curves in characteristic p"};
    app.require_subcommand(1);

    SmoothOptions so;
    CLI::App* smooth_cmd = app.add_subcommand("smooth", "ramification, Ext^1 dimension and trace-zero witness");
    smooth_cmd->add_option("--p", so.p, "characteristic")->required();
    smooth_cmd->add_option("--m", so.m, "conductor, or two jumps for an order-p^2 action")->required();
    smooth_cmd->add_option("--n", so.n, "exponent of the abstract group Z/p^n (default: number of jumps)");
    smooth_cmd->add_option("--precision", so.precision, "series precision");
    smooth_cmd->add_flag("--json", so.json, "machine-readable output");

    NodeOptions no;
    CLI::App* node_cmd = app.add_subcommand("node", "conductor pair, dimensions, relevability and lift");
    node_cmd->add_option("--p", no.p, "characteristic")->required();
    node_cmd->add_option("--m", no.m, "x-branch conductor (integer or inf)")->required();
    node_cmd->add_option("--mp", no.mp, "y-branch conductor (integer or inf)");
    node_cmd->add_option("--precision", no.precision, "series precision");
    node_cmd->add_flag("--json", no.json, "machine-readable output");

    std::string spec_path;
    bool global_json = false;
    CLI::App* global_cmd = app.add_subcommand("global", "dimension report for a global curve spec");
    global_cmd->add_option("spec", spec_path, "JSON spec file")->required();
    global_cmd->add_flag("--json", global_json, "machine-readable output");

    SweepOptions sw;
    std::string p_list;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "formula against brute-force oracle");
    sweep_cmd->add_option("--p-list", p_list, "comma-separated primes")->required();
    sweep_cmd->add_option("--m-max", sw.m_max, "largest conductor");
    sweep_cmd->add_option("--precision", sw.precision, "minimum series precision");
    sweep_cmd->add_option("--seed", sw.seed, "seed for the randomized checks");
    sweep_cmd->add_flag("--json", sw.json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitHypothesis;
    }

    try {
        if (*smooth_cmd) return cmd_smooth(so);
        if (*node_cmd) return cmd_node(no);
        if (*global_cmd) return cmd_global(spec_path, global_json);
        if (*sweep_cmd) {
            std::stringstream ss(p_list);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.empty()) continue;
                try {
                    sw.p_list.push_back(std::stoull(item));
                } catch (const std::exception&) {
                    throw HypothesisError("invalid prime '" + item + "' in --p-list");
                }
            }
            return cmd_sweep(sw);
        }
    } catch (const HypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

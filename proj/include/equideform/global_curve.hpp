#ifndef EQUIDEFORM_GLOBAL_CURVE_HPP
#define EQUIDEFORM_GLOBAL_CURVE_HPP

// Dimension bookkeeping for a stable curve C with an action of a cyclic
// p-group G, described orbit by orbit: components of the normalisation,
// ramified points of the normalisation and nodes, one representative each.
//
// Spec format (JSON, unknown keys rejected):
//   p, group_order,
//   components[]:          id, quotient_genus, component_genus, stabilizer_order, inertia_order
//   ramification_orbits[]: component, different, stabilizer_order, image_group_order
//                          | component, local_action{group_exponent, series}
//   singular_orbits[]:     x_component, y_component, conductors[2], differents[2],
//                          image_group_orders[2], stabilizer_order, permutes_branches,
//                          relevability?  | ... local_action{group_exponent, x_series, y_series}
//   flags:                 all_stabilizers_cyclic, components_genus_ge_2, action_free_on_dense_open
// Conductors are integers or "inf". Series are coefficient lists of sigma(x).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>
#include <equideform/node_local.hpp>
#include <equideform/smooth_local.hpp>

namespace equideform::global {

using nlohmann::json;
using node::Conductor;
using node::RelevabilityClass;

/// Schema or consistency error at a JSON pointer.
class SpecError : public DataError {
public:
    SpecError(std::string pointer, const std::string& what)
        : DataError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

/// A node stabilizer swaps the two branches.
class PermutingNodeError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

struct ComponentOrbit {
    std::string id;
    int quotient_genus = 0;
    int component_genus = 0;
    u64 stabilizer_order = 1;
    u64 inertia_order = 1;
};

struct RamificationOrbit {
    std::string component;
    int different = 0;
    u64 stabilizer_order = 1;
    u64 image_group_order = 1;
    bool from_series = false;
};

struct SingularOrbit {
    std::string x_component;
    std::string y_component;
    node::NodeProfile local;  // conductors, differents, image orders, group_order = |D_p|
    bool permutes_branches = false;
    std::optional<RelevabilityClass> relevability;  // as supplied
    bool from_series = false;
    bool lift_checked = false;
};

struct Flags {
    bool all_stabilizers_cyclic = true;
    bool components_genus_ge_2 = true;
    bool action_free_on_dense_open = false;
};

struct GlobalCurveSpec {
    u64 p = 2;
    u64 group_order = 1;
    std::vector<ComponentOrbit> components;
    std::vector<RamificationOrbit> ramification_orbits;
    std::vector<SingularOrbit> singular_orbits;
    Flags flags;
};

namespace detail_spec {

inline std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

inline void only_keys(const json& j, const std::string& at, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SpecError(at, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw SpecError(ptr(at, it.key()), "unknown field");
    }
}

inline const json& need(const json& j, const std::string& at, const char* key) {
    if (!j.contains(key)) throw SpecError(ptr(at, key), "missing required field");
    return j.at(key);
}

inline long long integer(const json& j, const std::string& at, long long min_value) {
    if (!j.is_number_integer()) throw SpecError(at, "expected an integer");
    const long long v = j.get<long long>();
    if (v < min_value) throw SpecError(at, "expected an integer >= " + std::to_string(min_value));
    return v;
}

inline u64 order(const json& j, const std::string& at, u64 p) {
    const long long v = integer(j, at, 1);
    u64 q = static_cast<u64>(v);
    while (q % p == 0) q /= p;
    if (q != 1) throw SpecError(at, "order " + std::to_string(v) + " is not a power of p = " + std::to_string(p));
    return static_cast<u64>(v);
}

inline bool boolean(const json& j, const std::string& at) {
    if (!j.is_boolean()) throw SpecError(at, "expected a boolean");
    return j.get<bool>();
}

inline std::string string(const json& j, const std::string& at) {
    if (!j.is_string()) throw SpecError(at, "expected a string");
    return j.get<std::string>();
}

inline Conductor conductor(const json& j, const std::string& at, u64 p) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Conductor::infinity();
        throw SpecError(at, "conductor must be a positive integer or \"inf\"");
    }
    const long long m = integer(j, at, 1);
    if (static_cast<u64>(m) % p == 0) throw SpecError(at, "p divides the conductor " + std::to_string(m));
    return Conductor::finite(static_cast<int>(m));
}

inline const json& pair(const json& j, const std::string& at) {
    if (!j.is_array() || j.size() != 2) throw SpecError(at, "expected a two-element array [x-branch, y-branch]");
    return j;
}

inline Series series(const json& j, const std::string& at, u64 p) {
    if (!j.is_array() || j.size() < 3) throw SpecError(at, "expected a coefficient list of length >= 3");
    std::vector<i64> c;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer()) throw SpecError(ptr(at, i), "expected an integer coefficient");
        c.push_back(j[i].get<i64>());
    }
    return Series(p, c, static_cast<int>(c.size()));
}

inline int group_exponent(const json& j, const std::string& at) {
    return static_cast<int>(integer(j, at, 0));
}

// Runs a local computation and reports its failure at the given pointer.
template <class F>
auto at_pointer(const std::string& at, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const SpecError&) {
        throw;
    } catch (const HypothesisError& e) {
        throw SpecError(at, e.what());
    }
}

inline ComponentOrbit parse_component(const json& j, const std::string& at, u64 p) {
    only_keys(j, at, {"id", "quotient_genus", "component_genus", "stabilizer_order", "inertia_order"});
    ComponentOrbit c;
    c.id = string(need(j, at, "id"), ptr(at, "id"));
    c.quotient_genus = static_cast<int>(integer(need(j, at, "quotient_genus"), ptr(at, "quotient_genus"), 0));
    c.component_genus = static_cast<int>(integer(need(j, at, "component_genus"), ptr(at, "component_genus"), 0));
    c.stabilizer_order = order(need(j, at, "stabilizer_order"), ptr(at, "stabilizer_order"), p);
    c.inertia_order = order(need(j, at, "inertia_order"), ptr(at, "inertia_order"), p);
    if (c.stabilizer_order % c.inertia_order != 0) {
        throw SpecError(ptr(at, "inertia_order"), "inertia order must divide the stabilizer order");
    }
    return c;
}

inline RamificationOrbit parse_ramification(const json& j, const std::string& at, u64 p) {
    only_keys(j, at, {"id", "component", "different", "stabilizer_order", "image_group_order", "local_action"});
    if (j.contains("id")) string(j.at("id"), ptr(at, "id"));
    RamificationOrbit r;
    r.component = string(need(j, at, "component"), ptr(at, "component"));
    std::optional<int> different;
    std::optional<u64> stab, image;
    if (j.contains("different")) different = static_cast<int>(integer(j.at("different"), ptr(at, "different"), 0));
    if (j.contains("stabilizer_order")) stab = order(j.at("stabilizer_order"), ptr(at, "stabilizer_order"), p);
    if (j.contains("image_group_order")) image = order(j.at("image_group_order"), ptr(at, "image_group_order"), p);
    if (j.contains("local_action")) {
        const std::string la = ptr(at, "local_action");
        const json& l = j.at("local_action");
        only_keys(l, la, {"group_exponent", "series"});
        const int n = group_exponent(need(l, la, "group_exponent"), ptr(la, "group_exponent"));
        const Series s = series(need(l, la, "series"), ptr(la, "series"), p);
        const smooth::RamificationProfile prof = at_pointer(la, [&] {
            return smooth::ramification_profile(smooth::CyclicSmoothAction::make(smooth::SmoothAutomorphism(s), n));
        });
        const u64 stab_s = smooth::ipow(p, n);
        if (different && *different != prof.different) {
            throw SpecError(ptr(at, "different"), "declared " + std::to_string(*different) + " but the series gives " +
                                                      std::to_string(prof.different));
        }
        if (stab && *stab != stab_s) throw SpecError(ptr(at, "stabilizer_order"), "does not match p^group_exponent");
        if (image && *image != prof.group_order) {
            throw SpecError(ptr(at, "image_group_order"), "declared " + std::to_string(*image) +
                                                              " but the series gives " + std::to_string(prof.group_order));
        }
        different = prof.different;
        stab = stab_s;
        image = prof.group_order;
        r.from_series = true;
    }
    if (!different) throw SpecError(ptr(at, "different"), "missing required field");
    if (!stab) throw SpecError(ptr(at, "stabilizer_order"), "missing required field");
    if (!image) throw SpecError(ptr(at, "image_group_order"), "missing required field");
    r.different = *different;
    r.stabilizer_order = *stab;
    r.image_group_order = *image;
    if (r.stabilizer_order % r.image_group_order != 0) {
        throw SpecError(ptr(at, "image_group_order"), "image order must divide the stabilizer order");
    }
    if ((r.different == 0) != (r.image_group_order == 1)) {
        throw SpecError(ptr(at, "different"), "the different vanishes exactly when the image group is trivial");
    }
    if (r.image_group_order > 1) {
        const long long g = static_cast<long long>(r.image_group_order);
        if (r.different % static_cast<long long>(p - 1) != 0 || r.different < 2 * (g - 1)) {
            throw SpecError(ptr(at, "different"), "not the different of a wild p-group action of order " +
                                                      std::to_string(g));
        }
    }
    return r;
}

inline void check_branch(const Conductor& m, int d, u64 image, u64 p, const std::string& at) {
    if (m.is_infinite() != (image == 1) || (d == 0) != (image == 1)) {
        throw SpecError(at, "conductor inf, different 0 and trivial image must go together");
    }
    if (m.is_infinite()) return;
    const long long lower = static_cast<long long>(image - 1) * (m.value() + 1);
    if (d % static_cast<long long>(p - 1) != 0 || d < lower) {
        throw SpecError(at, "different " + std::to_string(d) + " is incompatible with conductor " + m.to_string() +
                                " and image order " + std::to_string(image));
    }
    if (image == p && d != static_cast<long long>(p - 1) * (m.value() + 1)) {
        throw SpecError(at, "an order-p image with conductor " + m.to_string() + " has different " +
                                std::to_string((p - 1) * static_cast<u64>(m.value() + 1)));
    }
}

inline SingularOrbit parse_singular(const json& j, const std::string& at, u64 p) {
    only_keys(j, at, {"id", "x_component", "y_component", "conductors", "differents", "image_group_orders",
                      "stabilizer_order", "permutes_branches", "relevability", "local_action"});
    if (j.contains("id")) string(j.at("id"), ptr(at, "id"));
    SingularOrbit s;
    s.x_component = string(need(j, at, "x_component"), ptr(at, "x_component"));
    s.y_component = string(need(j, at, "y_component"), ptr(at, "y_component"));
    s.permutes_branches = j.contains("permutes_branches")
                              ? boolean(j.at("permutes_branches"), ptr(at, "permutes_branches"))
                              : false;
    if (s.permutes_branches) {
        throw PermutingNodeError(
            at + ": the node stabilizer permutes the branches; replace it by the index-2 subgroup fixing both "
                 "branches and describe the node through that subgroup before applying these formulas");
    }
    std::optional<std::pair<Conductor, Conductor>> cond;
    std::optional<std::pair<int, int>> diff;
    std::optional<std::pair<u64, u64>> img;
    std::optional<u64> stab;
    if (j.contains("conductors")) {
        const std::string a = ptr(at, "conductors");
        const json& c = pair(j.at("conductors"), a);
        cond = {conductor(c[0], ptr(a, 0), p), conductor(c[1], ptr(a, 1), p)};
    }
    if (j.contains("differents")) {
        const std::string a = ptr(at, "differents");
        const json& c = pair(j.at("differents"), a);
        diff = {static_cast<int>(integer(c[0], ptr(a, 0), 0)), static_cast<int>(integer(c[1], ptr(a, 1), 0))};
    }
    if (j.contains("image_group_orders")) {
        const std::string a = ptr(at, "image_group_orders");
        const json& c = pair(j.at("image_group_orders"), a);
        img = {order(c[0], ptr(a, 0), p), order(c[1], ptr(a, 1), p)};
    }
    if (j.contains("stabilizer_order")) stab = order(j.at("stabilizer_order"), ptr(at, "stabilizer_order"), p);
    if (j.contains("relevability")) {
        const std::string a = ptr(at, "relevability");
        s.relevability = at_pointer(a, [&] { return node::parse_relevability(string(j.at("relevability"), a)); });
    }
    if (j.contains("local_action")) {
        const std::string la = ptr(at, "local_action");
        const json& l = j.at("local_action");
        only_keys(l, la, {"group_exponent", "x_series", "y_series"});
        const int n = group_exponent(need(l, la, "group_exponent"), ptr(la, "group_exponent"));
        const Series xs = series(need(l, la, "x_series"), ptr(la, "x_series"), p);
        const Series ys = series(need(l, la, "y_series"), ptr(la, "y_series"), p);
        const node::CyclicNodeAction a =
            at_pointer(la, [&] { return node::CyclicNodeAction::make(node::NodeAutomorphism(xs, ys), n); });
        const node::NodeProfile prof = at_pointer(la, [&] { return node::node_profile(a); });
        if (cond && !(cond->first == prof.conductor_x && cond->second == prof.conductor_y)) {
            throw SpecError(ptr(at, "conductors"), "declared (" + cond->first.to_string() + ", " +
                                                       cond->second.to_string() + ") but the series give (" +
                                                       prof.conductor_x.to_string() + ", " +
                                                       prof.conductor_y.to_string() + ")");
        }
        if (diff && (diff->first != prof.different_x || diff->second != prof.different_y)) {
            throw SpecError(ptr(at, "differents"), "declared values differ from the series (" +
                                                       std::to_string(prof.different_x) + ", " +
                                                       std::to_string(prof.different_y) + ")");
        }
        if (img && (img->first != prof.image_order_x || img->second != prof.image_order_y)) {
            throw SpecError(ptr(at, "image_group_orders"), "declared values differ from the series");
        }
        if (stab && *stab != prof.group_order) {
            throw SpecError(ptr(at, "stabilizer_order"), "does not match p^group_exponent");
        }
        // The lifting solver must agree with the criterion on the series themselves.
        const RelevabilityClass cls = node::classify_relevability(prof);
        bool lifted = true;
        try {
            const node::FirstOrderNodeLift lift = node::lift_first_order(a);
            if (!node::verify_lift(a, lift)) throw InternalError(la + ": produced lift does not verify");
        } catch (const NotLiftable&) {
            lifted = false;
        }
        if (lifted != (cls != RelevabilityClass::NonRelevable)) {
            throw InternalError(la + ": lifting solver disagrees with the relevability criterion");
        }
        s.local = prof;
        s.from_series = true;
        s.lift_checked = true;
        return s;
    }
    if (!cond) throw SpecError(ptr(at, "conductors"), "missing required field");
    if (!diff) throw SpecError(ptr(at, "differents"), "missing required field");
    if (!img) throw SpecError(ptr(at, "image_group_orders"), "missing required field");
    if (!stab) throw SpecError(ptr(at, "stabilizer_order"), "missing required field");
    s.local.p = p;
    s.local.group_order = *stab;
    s.local.conductor_x = cond->first;
    s.local.conductor_y = cond->second;
    s.local.different_x = diff->first;
    s.local.different_y = diff->second;
    s.local.image_order_x = img->first;
    s.local.image_order_y = img->second;
    for (int b = 0; b < 2; ++b) {
        const u64 im = b == 0 ? img->first : img->second;
        if (*stab % im != 0) {
            throw SpecError(ptr(ptr(at, "image_group_orders"), static_cast<std::size_t>(b)),
                            "image order must divide the stabilizer order");
        }
        check_branch(b == 0 ? cond->first : cond->second, b == 0 ? diff->first : diff->second, im, p,
                     ptr(ptr(at, "differents"), static_cast<std::size_t>(b)));
    }
    return s;
}

} // namespace detail_spec

/// Strict parse plus validation; errors carry JSON pointers.
inline GlobalCurveSpec parse_spec(const json& j) {
    using namespace detail_spec;
    only_keys(j, "", {"description", "p", "group_order", "components", "ramification_orbits", "singular_orbits",
                      "flags"});
    if (j.contains("description")) string(j.at("description"), "/description");
    GlobalCurveSpec s;
    const long long p = integer(need(j, "", "p"), "/p", 2);
    if (!fp::is_prime(static_cast<u64>(p))) throw SpecError("/p", "p must be prime");
    s.p = static_cast<u64>(p);
    s.group_order = order(need(j, "", "group_order"), "/group_order", s.p);
    const json& comps = need(j, "", "components");
    if (!comps.is_array() || comps.empty()) throw SpecError("/components", "expected a non-empty array");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string at = ptr("/components", i);
        ComponentOrbit c = parse_component(comps[i], at, s.p);
        if (s.group_order % c.stabilizer_order != 0) {
            throw SpecError(ptr(at, "stabilizer_order"), "must divide the group order");
        }
        if (!index.emplace(c.id, i).second) throw SpecError(ptr(at, "id"), "duplicate component id");
        s.components.push_back(std::move(c));
    }
    auto component_of = [&](const std::string& id, const std::string& at) -> const ComponentOrbit& {
        auto it = index.find(id);
        if (it == index.end()) throw SpecError(at, "unknown component \"" + id + "\"");
        return s.components[it->second];
    };
    const json empty = json::array();
    const json& rams = j.contains("ramification_orbits") ? j.at("ramification_orbits") : empty;
    if (!rams.is_array()) throw SpecError("/ramification_orbits", "expected an array");
    for (std::size_t i = 0; i < rams.size(); ++i) {
        const std::string at = ptr("/ramification_orbits", i);
        RamificationOrbit r = parse_ramification(rams[i], at, s.p);
        const ComponentOrbit& c = component_of(r.component, ptr(at, "component"));
        if (c.stabilizer_order % r.stabilizer_order != 0) {
            throw SpecError(ptr(at, "stabilizer_order"), "point stabilizer must divide the component stabilizer");
        }
        if (r.image_group_order * c.inertia_order != r.stabilizer_order) {
            throw SpecError(ptr(at, "image_group_order"),
                            "image order times the component inertia must equal the point stabilizer order");
        }
        s.ramification_orbits.push_back(std::move(r));
    }
    const json& sings = j.contains("singular_orbits") ? j.at("singular_orbits") : empty;
    if (!sings.is_array()) throw SpecError("/singular_orbits", "expected an array");
    for (std::size_t i = 0; i < sings.size(); ++i) {
        const std::string at = ptr("/singular_orbits", i);
        SingularOrbit o = parse_singular(sings[i], at, s.p);
        const ComponentOrbit& cx = component_of(o.x_component, ptr(at, "x_component"));
        const ComponentOrbit& cy = component_of(o.y_component, ptr(at, "y_component"));
        for (const ComponentOrbit* c : {&cx, &cy}) {
            if (c->stabilizer_order % o.local.group_order != 0) {
                throw SpecError(ptr(at, "stabilizer_order"), "node stabilizer must divide the stabilizer of " + c->id);
            }
        }
        const RelevabilityClass derived = node::classify_relevability(o.local);
        if (o.relevability && *o.relevability != derived) {
            throw SpecError(ptr(at, "relevability"), "declared " + node::to_string(*o.relevability) +
                                                         " but the local data give " + node::to_string(derived));
        }
        s.singular_orbits.push_back(std::move(o));
    }
    // Riemann-Hurwitz on each component C_beta -> C_beta / G_beta.
    for (std::size_t i = 0; i < s.components.size(); ++i) {
        const ComponentOrbit& c = s.components[i];
        const long long gb = static_cast<long long>(c.stabilizer_order / c.inertia_order);
        long long rhs = gb * (2LL * c.quotient_genus - 2);
        for (const RamificationOrbit& r : s.ramification_orbits) {
            if (r.component == c.id) rhs += (gb / static_cast<long long>(r.image_group_order)) * r.different;
        }
        if (2LL * c.component_genus - 2 != rhs) {
            throw SpecError(ptr(ptr("/components", i), "component_genus"),
                            "Riemann-Hurwitz gives 2g - 2 = " + std::to_string(rhs) + ", not " +
                                std::to_string(2LL * c.component_genus - 2));
        }
    }
    const json& fl = need(j, "", "flags");
    only_keys(fl, "/flags", {"all_stabilizers_cyclic", "components_genus_ge_2", "action_free_on_dense_open"});
    s.flags.all_stabilizers_cyclic = boolean(need(fl, "/flags", "all_stabilizers_cyclic"), "/flags/all_stabilizers_cyclic");
    s.flags.components_genus_ge_2 = boolean(need(fl, "/flags", "components_genus_ge_2"), "/flags/components_genus_ge_2");
    s.flags.action_free_on_dense_open =
        boolean(need(fl, "/flags", "action_free_on_dense_open"), "/flags/action_free_on_dense_open");
    const bool genus_ge_2 = std::all_of(s.components.begin(), s.components.end(),
                                        [](const ComponentOrbit& c) { return c.component_genus >= 2; });
    const bool free_dense = std::all_of(s.components.begin(), s.components.end(),
                                        [](const ComponentOrbit& c) { return c.inertia_order == 1; });
    if (s.flags.components_genus_ge_2 != genus_ge_2) {
        throw SpecError("/flags/components_genus_ge_2", "contradicts the component genera");
    }
    if (s.flags.action_free_on_dense_open != free_dense) {
        throw SpecError("/flags/action_free_on_dense_open", "contradicts the inertia orders");
    }
    return s;
}

inline GlobalCurveSpec parse_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_spec(j);
}

/// sum over ramification orbits of floor(2 d / |D|).
inline int local_global_term(const GlobalCurveSpec& s) {
    int t = 0;
    for (const RamificationOrbit& r : s.ramification_orbits) {
        t += static_cast<int>((2 * static_cast<u64>(r.different)) / r.stabilizer_order);
    }
    return t;
}

/// 3 p_a(C/G) - 3 + sum floor(2 d / |D|) for a smooth curve with a faithful action.
inline int dim_ext1_smooth_curve(const GlobalCurveSpec& s) {
    if (!s.singular_orbits.empty()) throw HypothesisError("smooth formula: the curve has nodes");
    if (s.components.size() != 1) throw HypothesisError("smooth formula: a smooth stable curve is connected");
    const ComponentOrbit& c = s.components.front();
    if (c.inertia_order != 1 || c.stabilizer_order != s.group_order) {
        throw HypothesisError("smooth formula: the action must be faithful");
    }
    if (!s.flags.all_stabilizers_cyclic) throw HypothesisError("smooth formula: stabilizers must be cyclic");
    if (c.component_genus < 2) throw HypothesisError("smooth formula: the curve must have genus >= 2");
    return 3 * c.quotient_genus - 3 + local_global_term(s);
}

namespace detail_counts {

inline void require_cyclic_nonpermuting(const GlobalCurveSpec& s, const char* what) {
    if (!s.flags.all_stabilizers_cyclic) throw HypothesisError(std::string(what) + ": node stabilizers must be cyclic");
    for (const SingularOrbit& o : s.singular_orbits) {
        if (o.permutes_branches) throw PermutingNodeError(std::string(what) + ": a node stabilizer permutes branches");
    }
}

inline int f_branch(u64 p, const Conductor& m) {
    return (m.is_infinite() || (static_cast<u64>(m.value()) + 1) % p == 0) ? 1 : 0;
}

inline int g_branch(int different, u64 image, u64 stabilizer) {
    return ((2 * static_cast<u64>(different) + 1) % image != 0 || image != stabilizer) ? 1 : 0;
}

} // namespace detail_counts

/// #{alpha : m_alpha + 1 = 0 mod p or m_alpha = oo}, both branches.
inline int f_sheaf_dimension(const GlobalCurveSpec& s) {
    detail_counts::require_cyclic_nonpermuting(s, "F count");
    int n = 0;
    for (const SingularOrbit& o : s.singular_orbits) {
        if (o.local.group_order != s.p) throw HypothesisError("F count: node stabilizers must have order p");
        n += detail_counts::f_branch(s.p, o.local.conductor_x) + detail_counts::f_branch(s.p, o.local.conductor_y);
    }
    return n;
}

/// #{alpha : 2 d_alpha + 1 != 0 mod |G_alpha| or G_alpha != D_alpha}, both branches.
inline int g_sheaf_dimension(const GlobalCurveSpec& s) {
    detail_counts::require_cyclic_nonpermuting(s, "G count");
    int n = 0;
    for (const SingularOrbit& o : s.singular_orbits) {
        n += detail_counts::g_branch(o.local.different_x, o.local.image_order_x, o.local.group_order);
        n += detail_counts::g_branch(o.local.different_y, o.local.image_order_y, o.local.group_order);
    }
    return n;
}

struct DimensionReport {
    std::optional<int> dim_smooth_global;
    int dim_H1_local_global_term = 0;
    int component_term = 0;
    int node_term = 0;
    std::optional<int> F_dimension;
    int G_dimension = 0;
    int unconditional_count = 0;
    std::optional<int> dim_ext1_total;
    std::vector<RelevabilityClass> node_relevability;
    std::map<std::string, std::string> provenance;
    std::map<std::string, std::string> inapplicable;
    std::vector<std::string> hypotheses_checked;
    std::vector<std::string> warnings;
};

/// 2|C_sing/G| + sum(3 p_a(C_beta/G) - 3) + sum floor(2 d_gamma/|D_gamma|)
///   - (G-counts) + #{unconditionally relevable nodes}.
inline DimensionReport dim_ext1_stable_curve(const GlobalCurveSpec& s) {
    DimensionReport r;
    if (!s.flags.all_stabilizers_cyclic) throw HypothesisError("stable formula: G must be cyclic");
    if (!s.flags.components_genus_ge_2 && !s.flags.action_free_on_dense_open) {
        throw HypothesisError(
            "stable formula: some component has genus < 2 and G does not act freely on a dense open; the "
            "correction coming from such components is not computed");
    }
    r.hypotheses_checked.push_back("G cyclic (all_stabilizers_cyclic)");
    r.hypotheses_checked.push_back(s.flags.components_genus_ge_2
                                       ? "components of the normalisation have genus >= 2"
                                       : "G acts freely on a dense open");
    r.hypotheses_checked.push_back("no node stabilizer permutes the branches");
    r.hypotheses_checked.push_back("Riemann-Hurwitz holds on every component");
    r.hypotheses_checked.push_back("relevability re-derived from local data at every node");
    r.dim_H1_local_global_term = local_global_term(s);
    r.provenance["dim_H1_local_global_term"] = "sum over ramification orbits of floor(2 d / |D|)";
    for (const ComponentOrbit& c : s.components) {
        r.component_term += 3 * c.quotient_genus - 3;
        if (c.quotient_genus < 2) {
            r.warnings.push_back("component " + c.id + " has quotient genus " + std::to_string(c.quotient_genus) +
                                 "; its term 3g-3 is " + std::to_string(3 * c.quotient_genus - 3));
        }
    }
    r.provenance["component_term"] = "sum over component orbits of 3 p_a(C_beta/G) - 3";
    r.node_term = 2 * static_cast<int>(s.singular_orbits.size());
    r.provenance["node_term"] = "2 per node orbit";
    r.G_dimension = g_sheaf_dimension(s);
    r.provenance["G_dimension"] = "branches with 2d+1 != 0 mod |G_b| or G_b != D";
    try {
        r.F_dimension = f_sheaf_dimension(s);
        r.provenance["F_dimension"] = "branches with m+1 = 0 mod p or m = inf";
    } catch (const HypothesisError& e) {
        r.inapplicable["F_dimension"] = e.what();
    }
    for (const SingularOrbit& o : s.singular_orbits) {
        const RelevabilityClass c = node::classify_relevability(o.local);
        r.node_relevability.push_back(c);
        if (c == RelevabilityClass::Unconditional) ++r.unconditional_count;
    }
    r.provenance["unconditional_count"] = "nodes whose action lifts with branch inertia kept trivial";
    r.dim_ext1_total = r.node_term + r.component_term + r.dim_H1_local_global_term - r.G_dimension +
                       r.unconditional_count;
    r.provenance["dim_ext1_total"] = "node_term + component_term + dim_H1_local_global_term - G_dimension + "
                                     "unconditional_count";
    try {
        r.dim_smooth_global = dim_ext1_smooth_curve(s);
        r.provenance["dim_smooth_global"] = "3 p_a(C/G) - 3 + sum floor(2 d / |D|)";
        if (*r.dim_smooth_global != *r.dim_ext1_total) {
            throw InternalError("smooth and stable formulas disagree on a smooth curve");
        }
    } catch (const HypothesisError& e) {
        r.inapplicable["dim_smooth_global"] = e.what();
    }
    if (*r.dim_ext1_total < 0) r.warnings.push_back("total is negative; check the spec");
    return r;
}

inline json to_json(const DimensionReport& r) {
    json j;
    auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    j["dim_smooth_global"] = opt(r.dim_smooth_global);
    j["dim_H1_local_global_term"] = r.dim_H1_local_global_term;
    j["component_term"] = r.component_term;
    j["node_term"] = r.node_term;
    j["F_dimension"] = opt(r.F_dimension);
    j["G_dimension"] = r.G_dimension;
    j["unconditional_count"] = r.unconditional_count;
    j["dim_ext1_total"] = opt(r.dim_ext1_total);
    j["node_relevability"] = json::array();
    for (RelevabilityClass c : r.node_relevability) j["node_relevability"].push_back(node::to_string(c));
    j["provenance"] = r.provenance;
    j["inapplicable"] = r.inapplicable;
    j["hypotheses_checked"] = r.hypotheses_checked;
    j["warnings"] = r.warnings;
    return j;
}

/// Reads a report back, rejecting anything that does not match the schema.
inline DimensionReport report_from_json(const json& j) {
    using namespace detail_spec;
    only_keys(j, "", {"dim_smooth_global", "dim_H1_local_global_term", "component_term", "node_term", "F_dimension",
                      "G_dimension", "unconditional_count", "dim_ext1_total", "node_relevability", "provenance",
                      "inapplicable", "hypotheses_checked", "warnings"});
    DimensionReport r;
    auto opt = [&](const char* k) -> std::optional<int> {
        const json& v = need(j, "", k);
        if (v.is_null()) return std::nullopt;
        return static_cast<int>(integer(v, ptr("", k), -1000000));
    };
    auto req = [&](const char* k, long long min_value) {
        return static_cast<int>(integer(need(j, "", k), ptr("", k), min_value));
    };
    r.dim_smooth_global = opt("dim_smooth_global");
    r.dim_H1_local_global_term = req("dim_H1_local_global_term", 0);
    r.component_term = req("component_term", -1000000);
    r.node_term = req("node_term", 0);
    r.F_dimension = opt("F_dimension");
    r.G_dimension = req("G_dimension", 0);
    r.unconditional_count = req("unconditional_count", 0);
    r.dim_ext1_total = opt("dim_ext1_total");
    const json& nr = need(j, "", "node_relevability");
    if (!nr.is_array()) throw SpecError("/node_relevability", "expected an array");
    for (std::size_t i = 0; i < nr.size(); ++i) {
        r.node_relevability.push_back(node::parse_relevability(string(nr[i], ptr("/node_relevability", i))));
    }
    for (const char* k : {"provenance", "inapplicable"}) {
        const json& m = need(j, "", k);
        if (!m.is_object()) throw SpecError(ptr("", k), "expected an object");
        auto& dst = std::string(k) == "provenance" ? r.provenance : r.inapplicable;
        for (auto it = m.begin(); it != m.end(); ++it) dst[it.key()] = string(it.value(), ptr(ptr("", k), it.key()));
    }
    for (const char* k : {"hypotheses_checked", "warnings"}) {
        const json& a = need(j, "", k);
        if (!a.is_array()) throw SpecError(ptr("", k), "expected an array");
        auto& dst = std::string(k) == "warnings" ? r.warnings : r.hypotheses_checked;
        for (std::size_t i = 0; i < a.size(); ++i) dst.push_back(string(a[i], ptr(ptr("", k), i)));
    }
    return r;
}

} // namespace equideform::global

#endif

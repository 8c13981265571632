#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <equideform/global_curve.hpp>

using namespace equideform;
using namespace equideform::global;

namespace {

std::string read_scenario(const std::string& name) {
    std::ifstream in(std::string(EQUIDEFORM_SCENARIOS) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json scenario(const std::string& name) { return json::parse(read_scenario(name)); }

node::NodeProfile local(u64 p, u64 stab, node::Conductor m, node::Conductor mp, int d, int dp, u64 gx, u64 gy) {
    node::NodeProfile n;
    n.p = p;
    n.group_order = stab;
    n.conductor_x = m;
    n.conductor_y = mp;
    n.different_x = d;
    n.different_y = dp;
    n.image_order_x = gx;
    n.image_order_y = gy;
    return n;
}

GlobalCurveSpec one_node(node::NodeProfile n) {
    GlobalCurveSpec s;
    s.p = n.p;
    s.group_order = n.group_order;
    s.components = {{"A", 2, 2, n.group_order, 1}};
    SingularOrbit o;
    o.x_component = o.y_component = "A";
    o.local = n;
    s.singular_orbits.push_back(o);
    return s;
}

std::string error_pointer(const json& j) {
    try {
        parse_spec(j);
    } catch (const SpecError& e) {
        return e.pointer();
    }
    return "<no error>";
}

} // namespace

TEST(SmoothCurve, Examples) {
    EXPECT_EQ(dim_ext1_smooth_curve(parse_spec(scenario("smooth_example_5.json"))), 5);
    EXPECT_EQ(dim_ext1_smooth_curve(parse_spec(scenario("smooth_example_14.json"))), 14);
    json j = scenario("smooth_example_5.json");
    j["ramification_orbits"] = json::array();
    j["components"][0]["component_genus"] = 4;  // 2g - 2 = 3 (2*2 - 2)
    EXPECT_EQ(dim_ext1_smooth_curve(parse_spec(j)), 3);
}

TEST(SmoothCurve, RefusesNodesAndSmallGenus) {
    EXPECT_THROW(dim_ext1_smooth_curve(parse_spec(scenario("global_example_15.json"))), HypothesisError);
    GlobalCurveSpec s = parse_spec(scenario("smooth_example_5.json"));
    s.components[0].component_genus = 1;
    EXPECT_THROW(dim_ext1_smooth_curve(s), HypothesisError);
}

TEST(SheafCounts, FExamples) {
    using node::Conductor;
    EXPECT_EQ(f_sheaf_dimension(one_node(local(3, 3, Conductor::finite(2), Conductor::finite(2), 6, 6, 3, 3))), 2);
    EXPECT_EQ(f_sheaf_dimension(one_node(local(3, 3, Conductor::finite(1), Conductor::finite(1), 4, 4, 3, 3))), 0);
    EXPECT_EQ(f_sheaf_dimension(one_node(local(3, 3, Conductor::infinity(), Conductor::finite(1), 0, 4, 1, 3))), 1);
}

TEST(SheafCounts, GExamples) {
    using node::Conductor;
    EXPECT_EQ(g_sheaf_dimension(one_node(local(3, 3, Conductor::finite(2), Conductor::finite(2), 6, 6, 3, 3))), 2);
    EXPECT_EQ(g_sheaf_dimension(one_node(local(3, 3, Conductor::finite(1), Conductor::finite(1), 4, 4, 3, 3))), 0);
    // Images of order 3 inside a stabilizer of order 9: the second clause fires.
    EXPECT_EQ(g_sheaf_dimension(one_node(local(3, 9, Conductor::finite(1), Conductor::finite(1), 4, 4, 3, 3))), 2);
}

TEST(StableCurve, WorkedExamples) {
    const DimensionReport r15 = dim_ext1_stable_curve(parse_spec(scenario("global_example_15.json")));
    EXPECT_EQ(r15.dim_ext1_total, std::optional<int>(15));
    EXPECT_EQ(r15.G_dimension, 2);
    EXPECT_EQ(r15.unconditional_count, 1);
    EXPECT_EQ(r15.dim_H1_local_global_term, 8);
    EXPECT_FALSE(r15.dim_smooth_global.has_value());
    EXPECT_EQ(r15.inapplicable.count("dim_smooth_global"), 1u);
    const DimensionReport r12 = dim_ext1_stable_curve(parse_spec(scenario("global_example_12.json")));
    EXPECT_EQ(r12.dim_ext1_total, std::optional<int>(12));
    EXPECT_EQ(r12.node_relevability, std::vector<node::RelevabilityClass>{node::RelevabilityClass::NonRelevable});
}

TEST(StableCurve, SeriesAndNumericInputsAgree) {
    for (const char* base : {"global_example_15", "global_example_12"}) {
        const GlobalCurveSpec num = parse_spec(scenario(std::string(base) + ".json"));
        const GlobalCurveSpec ser = parse_spec(scenario(std::string(base) + "_series.json"));
        EXPECT_TRUE(ser.singular_orbits[0].from_series);
        EXPECT_TRUE(ser.singular_orbits[0].lift_checked);
        EXPECT_EQ(to_json(dim_ext1_stable_curve(num)), to_json(dim_ext1_stable_curve(ser))) << base;
    }
}

TEST(StableCurve, NodeFreeMatchesSmooth) {
    for (const char* name : {"smooth_example_5.json", "smooth_example_14.json"}) {
        const GlobalCurveSpec s = parse_spec(scenario(name));
        const DimensionReport r = dim_ext1_stable_curve(s);
        EXPECT_EQ(r.dim_ext1_total, std::optional<int>(dim_ext1_smooth_curve(s)));
        EXPECT_EQ(r.dim_smooth_global, r.dim_ext1_total);
    }
}

TEST(StableCurve, AddingAnUnconditionalNodeOrbit) {
    // Start from example 15 and add a second (2,2) node orbit between fresh
    // components, with its branch points as new ramification orbits.
    const json base = scenario("global_example_15.json");
    json more = base;
    for (const char* id : {"C", "D"}) {
        json c = base["components"][0];
        c["id"] = id;
        more["components"].push_back(c);
        json r = base["ramification_orbits"][0];
        r["component"] = id;
        more["ramification_orbits"].push_back(r);
    }
    json n = base["singular_orbits"][0];
    n["x_component"] = "C";
    n["y_component"] = "D";
    more["singular_orbits"].push_back(n);
    const int before = *dim_ext1_stable_curve(parse_spec(base)).dim_ext1_total;
    const int after = *dim_ext1_stable_curve(parse_spec(more)).dim_ext1_total;
    // New components contribute 3 each; the node adds 2 + 4 + 4 - 2 + 1.
    EXPECT_EQ(after - before, 3 + 3 + 2 + 4 + 4 - 2 + 1);
}

TEST(StableCurve, RefusesUnsupportedRegime) {
    GlobalCurveSpec s = parse_spec(scenario("global_example_15.json"));
    s.flags.components_genus_ge_2 = false;
    s.flags.action_free_on_dense_open = false;
    EXPECT_THROW(dim_ext1_stable_curve(s), HypothesisError);
    GlobalCurveSpec t = parse_spec(scenario("global_example_15.json"));
    t.flags.all_stabilizers_cyclic = false;
    EXPECT_THROW(dim_ext1_stable_curve(t), HypothesisError);
}

TEST(StableCurve, ReportRoundTrips) {
    for (const char* name : {"global_example_15.json", "global_example_12.json", "smooth_example_14.json"}) {
        const json j = to_json(dim_ext1_stable_curve(parse_spec(scenario(name))));
        const DimensionReport back = report_from_json(json::parse(j.dump()));
        EXPECT_EQ(to_json(back), j);
    }
    json broken = to_json(dim_ext1_stable_curve(parse_spec(scenario("global_example_15.json"))));
    broken["extra"] = 1;
    EXPECT_THROW(report_from_json(broken), SpecError);
}

TEST(SpecParsing, StrictWithPointers) {
    json j = scenario("global_example_15.json");
    j["singular_orbits"][0]["colour"] = "red";
    EXPECT_EQ(error_pointer(j), "/singular_orbits/0/colour");

    j = scenario("global_example_15.json");
    j["singular_orbits"][0]["conductors"][1] = 3;
    EXPECT_EQ(error_pointer(j), "/singular_orbits/0/conductors/1");

    j = scenario("global_example_15.json");
    j["components"][1]["component_genus"] = 8;
    EXPECT_EQ(error_pointer(j), "/components/1/component_genus");

    j = scenario("global_example_15.json");
    j["ramification_orbits"][0]["component"] = "Z";
    EXPECT_EQ(error_pointer(j), "/ramification_orbits/0/component");

    j = scenario("global_example_15.json");
    j.erase("flags");
    EXPECT_EQ(error_pointer(j), "/flags");

    j = scenario("global_example_15.json");
    j["flags"]["components_genus_ge_2"] = false;
    EXPECT_EQ(error_pointer(j), "/flags/components_genus_ge_2");

    j = scenario("global_example_15.json");
    j["group_order"] = 6;
    EXPECT_EQ(error_pointer(j), "/group_order");

    EXPECT_THROW(parse_spec_text("{ not json"), SpecError);
}

TEST(SpecParsing, RelevabilityIsRederived) {
    json j = scenario("global_example_15.json");
    j["singular_orbits"][0]["relevability"] = "Unconditional";
    EXPECT_NO_THROW(parse_spec(j));
    j["singular_orbits"][0]["relevability"] = "NonRelevable";
    EXPECT_EQ(error_pointer(j), "/singular_orbits/0/relevability");
}

TEST(SpecParsing, SeriesMustMatchDeclaredData) {
    json j = scenario("global_example_15_series.json");
    j["singular_orbits"][0]["conductors"] = {1, 1};
    EXPECT_EQ(error_pointer(j), "/singular_orbits/0/conductors");
    j = scenario("global_example_15_series.json");
    j["ramification_orbits"][0]["different"] = 4;
    EXPECT_EQ(error_pointer(j), "/ramification_orbits/0/different");
}

TEST(SpecParsing, PermutingNodeRejected) {
    try {
        parse_spec(scenario("permuting_node.json"));
        FAIL() << "expected PermutingNodeError";
    } catch (const PermutingNodeError& e) {
        EXPECT_NE(std::string(e.what()).find("subgroup fixing both branches"), std::string::npos);
    }
}

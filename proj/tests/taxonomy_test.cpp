#include "generators.hpp"

#include "privstory/error.hpp"
#include "privstory/taxonomy.hpp"
#include "privstory/text.hpp"

#include <gtest/gtest.h>

using namespace privstory;
using privstory::testing::Rng;

namespace {

NodeId id_of(const Taxonomy &t, std::string_view name) {
    auto id = t.find_label(name);
    EXPECT_TRUE(id.has_value()) << name;
    return id.value_or(NodeId{});
}

// Chain A > B > C (data types) plus a sibling D under A, and one purpose E.
constexpr const char *kFiveNodes = R"({
  "version": "five",
  "actions": [{"name": "Collect"}],
  "data_types": [{"name": "A", "children": [{"name": "B", "children": [{"name": "C"}]}, {"name": "D"}]}],
  "purposes": [{"name": "E"}]
})";

}  // namespace

TEST(Taxonomy, DefaultFileCounts) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    EXPECT_EQ(t.version(), "pact-ext-1.0");
    EXPECT_EQ(t.label_count(Category::Action), 3u);
    EXPECT_EQ(t.label_count(Category::DataType), 50u);
    EXPECT_EQ(t.label_count(Category::Purpose), 26u);
    EXPECT_EQ(t.size(), 3u + 50u + 26u + 3u);
}

TEST(Taxonomy, RootsAreNotLabels) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    EXPECT_FALSE(t.find_label("Actions"));
    EXPECT_FALSE(t.find_label("Data Types"));
    EXPECT_FALSE(t.find_label("purposes"));
    const NodeId usage = id_of(t, "Usage Data");
    EXPECT_FALSE(t.tree_distance(t.root(Category::DataType), usage));
    EXPECT_EQ(t.credit(usage, t.root(Category::DataType)), 0);
}

TEST(Taxonomy, LabelsFollowFileOrder) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    const auto names = privstory::testing::label_names(t, Category::DataType);
    ASSERT_GE(names.size(), 3u);
    EXPECT_EQ(names[0], "Location");
    EXPECT_EQ(names[1], "Approximate Location");
    EXPECT_EQ(names[2], "Precise Location");
}

TEST(Taxonomy, LookupNormalizesCaseAndWhitespace) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    EXPECT_EQ(t.find_label("  usage   DATA "), t.find_label("Usage Data"));
    EXPECT_TRUE(t.find_label("Usage Data", Category::DataType));
    EXPECT_FALSE(t.find_label("Usage Data", Category::Purpose));
    EXPECT_FALSE(t.find_label("Usage"));
    EXPECT_FALSE(t.find_label("Usage Data Stuff"));
}

TEST(Taxonomy, WorkedParentChildCredit) {
    const Taxonomy t = privstory::testing::default_taxonomy();
    const NodeId usage = id_of(t, "Usage Data");
    const NodeId interactions = id_of(t, "App Interactions");
    EXPECT_EQ(t.tree_distance(usage, interactions), 1);
    EXPECT_EQ(t.credit(usage, interactions), ratio(1, 2));
    EXPECT_EQ(t.credit(interactions, usage), ratio(1, 2));
    EXPECT_EQ(t.credit(usage, usage), 1);
    EXPECT_EQ(t.credit(usage, id_of(t, "Search History")), 0);
    EXPECT_EQ(t.credit(usage, id_of(t, "Analytics")), 0);
}

TEST(Taxonomy, GrandparentEarnsOneThird) {
    const Taxonomy t = Taxonomy::load(kFiveNodes);
    const NodeId a = id_of(t, "A");
    const NodeId c = id_of(t, "C");
    const NodeId d = id_of(t, "D");
    EXPECT_EQ(t.tree_distance(c, a), 2);
    EXPECT_EQ(t.credit(c, a), ratio(1, 3));
    EXPECT_TRUE(t.is_ancestor(a, c));
    EXPECT_FALSE(t.is_ancestor(c, a));
    // C and D share ancestor A but are not on one chain.
    EXPECT_FALSE(t.tree_distance(c, d));
    EXPECT_EQ(t.credit(c, d), 0);
    EXPECT_EQ(t.max_depth(), 3);
}

TEST(Taxonomy, ActionVerbDefaultsToLowerCaseName) {
    const Taxonomy t = Taxonomy::load(R"({"version": "v", "actions": [{"name": "Collect"}, {"name": "Share", "verb": "share"},
        {"name": "Transfer Out", "verb": "send"}], "data_types": [{"name": "X"}], "purposes": [{"name": "Y"}]})");
    EXPECT_EQ(t.node(id_of(t, "Collect")).verb, "collect");
    EXPECT_EQ(t.node(id_of(t, "Transfer Out")).verb, "send");
}

TEST(Taxonomy, RejectsDuplicateNamesWithPath) {
    try {
        (void)Taxonomy::load(R"({"version": "v", "actions": [{"name": "Collect"}],
            "data_types": [{"name": "Personal", "children": [{"name": "Name"}, {"name": " name "}]}],
            "purposes": [{"name": "Y"}]})");
        FAIL() << "expected TaxonomyError";
    } catch (const TaxonomyError &e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("data_types[0] (Personal)[1]"), std::string::npos) << what;
        EXPECT_NE(what.find("duplicate"), std::string::npos) << what;
    }
}

TEST(Taxonomy, RejectsDuplicateAcrossCategories) {
    EXPECT_THROW((void)Taxonomy::load(R"({"version": "v", "actions": [{"name": "Collect"}],
        "data_types": [{"name": "Thing"}], "purposes": [{"name": "thing"}]})"),
                 TaxonomyError);
}

TEST(Taxonomy, RejectsMalformedFiles) {
    EXPECT_THROW((void)Taxonomy::load("{"), TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load("[]"), TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load(R"({"actions": [], "data_types": [], "purposes": []})"), TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load(R"({"version": "v", "actions": [], "data_types": []})"), TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load(R"({"version": "v", "actions": [{"name": ""}], "data_types": [], "purposes": []})"),
                 TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load(R"({"version": "v", "actions": [], "data_types": [{"name": "X", "verb": "x"}],
        "purposes": []})"),
                 TaxonomyError);
    EXPECT_THROW((void)Taxonomy::load_file("/nonexistent/taxonomy.json"), Error);
}

TEST(Taxonomy, UnknownNodeIdThrows) {
    const Taxonomy t = Taxonomy::load(kFiveNodes);
    EXPECT_THROW((void)t.node(NodeId{999}), TaxonomyError);
}

// Property: distances agree with a parent-walk reference and an undirected BFS on chains.
TEST(TaxonomyProperty, DistanceMatchesReference) {
    Rng rng(7);
    for (int round = 0; round < 200; ++round) {
        const auto rt = privstory::testing::random_taxonomy(rng, 7);
        const Taxonomy t = rt.load();
        std::vector<std::string> all;
        for (const auto &names : rt.names) {
            all.insert(all.end(), names.begin(), names.end());
        }
        for (const auto &a : all) {
            for (const auto &b : all) {
                const NodeId ia = *t.find_label(a);
                const NodeId ib = *t.find_label(b);
                const auto expected = privstory::testing::reference_distance(rt, a, b);
                ASSERT_EQ(t.tree_distance(ia, ib), expected) << a << " / " << b;
                ASSERT_EQ(t.tree_distance(ib, ia), expected);
                if (expected) {
                    ASSERT_EQ(privstory::testing::bfs_distance(rt, a, b), expected);
                    ASSERT_EQ(t.credit(ia, ib), Rational(1, 1 + *expected));
                } else {
                    ASSERT_EQ(t.credit(ia, ib), 0);
                }
            }
        }
    }
}

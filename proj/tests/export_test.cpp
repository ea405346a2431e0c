#include "fixture_run.hpp"

#include "privstory/error.hpp"
#include "privstory/parser.hpp"
#include "privstory/text.hpp"
#include "privstory/training_export.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace privstory;
using privstory::testing::Rng;
namespace fs = std::filesystem;

namespace {

const Taxonomy &taxonomy() {
    static const Taxonomy t = privstory::testing::default_taxonomy();
    return t;
}

const Manifest &fixture_manifest() {
    static const Manifest m = Manifest::load(privstory::testing::fixture_dir() / "manifest.json");
    return m;
}

SplitSpec fixture_split() {
    return privstory::testing::fixture_config("/tmp/unused").split;
}

/// Re-parses a completion and checks it reproduces the gold annotation.
::testing::AssertionResult reparses_to_gold(const std::string &completion, const GoldAnnotation &g,
                                             const Taxonomy &t) {
    const ParsedAnnotation p = parse_response(completion, g.document_id, t);
    for (Category c : kCategories) {
        std::set<std::string> got;
        std::set<std::string> want;
        for (NodeId id : p.matched_in(c)) {
            got.insert(normalize_name(t.node(id).name));
        }
        for (const auto &l : g.labels(c)) {
            want.insert(normalize_name(l));
        }
        if (got != want || !p.hallucinated_in(c).empty()) {
            return ::testing::AssertionFailure() << g.document_id << ": " << category_key(c) << " differ";
        }
    }
    std::multiset<std::string> got;
    std::multiset<std::string> want;
    for (const auto &s : p.stories) {
        if (!s.triple) {
            return ::testing::AssertionFailure() << g.document_id << ": unparsed story " << s.raw;
        }
        got.insert(privstory::testing::story_key(*s.triple));
    }
    for (const auto &s : g.stories) {
        want.insert(privstory::testing::story_key(s));
    }
    if (got != want) {
        return ::testing::AssertionFailure() << g.document_id << ": stories differ";
    }
    return ::testing::AssertionSuccess();
}

}  // namespace

TEST(Split, ResolvesAndValidates) {
    Manifest m;
    for (const char *id : {"a", "b", "c"}) {
        m.documents.push_back(Document{id, id, "text", FileType::Readme, std::nullopt});
    }
    SplitSpec s;
    s.heldout = {"b"};
    const ResolvedSplit r = resolve_split(s, m);
    EXPECT_EQ(r.train, (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(r.heldout, std::vector<std::string>{"b"});
    s.train = {"a"};
    EXPECT_EQ(resolve_split(s, m).train, std::vector<std::string>{"a"});
    s.train = {"b"};
    EXPECT_THROW((void)resolve_split(s, m), ExportError);
    s.train = {"zzz"};
    EXPECT_THROW((void)resolve_split(s, m), ExportError);
    s.train.clear();
    s.heldout = {"b", "b"};
    EXPECT_THROW((void)resolve_split(s, m), ExportError);
    s.heldout = {"zzz"};
    EXPECT_THROW((void)resolve_split(s, m), ExportError);
    EXPECT_EQ(SplitSpec::from_json(json{{"heldout", {"b"}}}).heldout, std::vector<std::string>{"b"});
}

TEST(Sft, FixtureSplitAndRoundTrip) {
    const SftExport sft = build_sft(fixture_manifest(), taxonomy(), fixture_split());
    EXPECT_EQ(sft.train.size(), 15u);
    EXPECT_EQ(sft.heldout.size(), 10u);
    std::set<std::string> train_ids;
    for (const auto &r : sft.train) {
        train_ids.insert(r.document_id);
        EXPECT_TRUE(reparses_to_gold(r.completion, *fixture_manifest().find_gold(r.document_id), taxonomy()));
        // Base template: the document is there, no examples and no format contract.
        EXPECT_NE(r.prompt.find(std::string(trim(fixture_manifest().find(r.document_id)->text))), std::string::npos);
        EXPECT_EQ(r.prompt.find("--- Example document ---"), std::string::npos);
        EXPECT_EQ(r.prompt.find("<STORIES>"), std::string::npos);
    }
    for (const auto &id : sft.heldout) {
        EXPECT_FALSE(train_ids.contains(id)) << id;
    }
}

TEST(Sft, FullModeUsesExamples) {
    SftOptions opts;
    opts.prompt.mode = PromptMode::Full;
    const Manifest &m = fixture_manifest();
    opts.icl_for = [&](const Document &doc) {
        const Document &other = m.documents[doc.id == m.documents[0].id ? 1 : 0];
        return std::vector<IclExample>{{&other, m.find_gold(other.id)}};
    };
    const SftExport sft = build_sft(m, taxonomy(), fixture_split(), opts);
    ASSERT_EQ(sft.train.size(), 15u);
    EXPECT_NE(sft.train[0].prompt.find("--- Example document ---"), std::string::npos);
}

TEST(Sft, InvalidGoldAndMissingGold) {
    Manifest m = fixture_manifest();
    m.gold.begin()->second.data_types.push_back("Biometric Aura");
    EXPECT_THROW((void)build_sft(m, taxonomy(), SplitSpec{}), ExportError);

    Manifest partial = fixture_manifest();
    partial.gold.erase(partial.documents[0].id);
    const SftExport sft = build_sft(partial, taxonomy(), SplitSpec{});
    EXPECT_EQ(sft.train.size(), 24u);
    EXPECT_EQ(sft.warnings.size(), 1u);
}

TEST(Sft, WritesFiles) {
    const SftExport sft = build_sft(fixture_manifest(), taxonomy(), fixture_split());
    const fs::path dir = privstory::testing::scratch_dir("sft");
    write_sft(sft, dir);
    std::ifstream in(dir / run_layout::kSft, std::ios::binary);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ASSERT_FALSE(line.empty());
        ASSERT_NE(line.back(), '\r');
        const json row = json::parse(line);
        EXPECT_EQ(row["completion"], sft.train[n].completion);
        ++n;
    }
    EXPECT_EQ(n, 15u);
    EXPECT_EQ(read_json_file(dir / run_layout::kSftHeldout)["heldout"].size(), 10u);
    const json meta = read_json_file(dir / run_layout::kSftMeta);
    EXPECT_EQ(meta["train_records"], 15);
    EXPECT_EQ(meta["lora_rank"], 64);
    EXPECT_EQ(meta["reasoning_tag"], "R");
}

// Property: every SFT completion re-parses to its gold annotation, for random
// taxonomies and annotations.
TEST(SftProperty, CompletionsReparseToGold) {
    Rng rng(61);
    for (int round = 0; round < 20; ++round) {
        const auto rt = privstory::testing::random_taxonomy(rng, 8);
        const Taxonomy t = rt.load();
        Manifest m;
        for (int i = 0; i < 5; ++i) {
            const std::string id = "doc" + std::to_string(i);
            m.documents.push_back(Document{id, id, "text of " + id, FileType::Readme, std::nullopt});
            m.gold[id] = privstory::testing::random_gold(rng, t, id);
        }
        const SftExport sft = build_sft(m, t, SplitSpec{});
        ASSERT_EQ(sft.train.size(), 5u);
        for (const auto &r : sft.train) {
            ASSERT_TRUE(reparses_to_gold(r.completion, m.gold.at(r.document_id), t));
        }
    }
}

class Preferences : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        const RunConfig cfg = privstory::testing::build_fixture_run("prefs");
        run_ = new RunArtifacts(RunArtifacts::load(cfg.run_dir, taxonomy()));
    }
    static void TearDownTestSuite() {
        delete run_;
        run_ = nullptr;
    }
    static RunArtifacts *run_;
};

RunArtifacts *Preferences::run_ = nullptr;

TEST_F(Preferences, OneRecordPerChoiceInOrder) {
    const auto &docs = run_->manifest.documents;
    const std::vector<PreferenceChoice> choices{{"s2", "zed", docs[0].id, 1, 0},
                                                {"s1", "amy", docs[1].id, 0, 1},
                                                {"s1", "amy", docs[0].id, 0, 1}};
    const auto records = build_preferences(choices, *run_);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[0].document_id, docs[0].id);
    EXPECT_EQ(records[0].reviewer_id, "amy");
    EXPECT_EQ(records[1].reviewer_id, "zed");
    EXPECT_EQ(records[1].chosen, run_->find_response(docs[0].id, 1)->text);
    EXPECT_EQ(records[1].rejected, run_->find_response(docs[0].id, 0)->text);
    EXPECT_EQ(records[1].prompt, run_->prompts.at(docs[0].id).user_text);
    const json row = to_json_row(records[0]);
    EXPECT_EQ(row["reviewer_id"], "amy");
    EXPECT_TRUE(row.contains("chosen") && row.contains("rejected") && row.contains("prompt"));
}

TEST_F(Preferences, Errors) {
    const std::string doc = run_->manifest.documents[0].id;
    const std::vector<PreferenceChoice> same{{"s", "r", doc, 1, 1}};
    EXPECT_THROW((void)build_preferences(same, *run_), ExportError);
    const std::vector<PreferenceChoice> dangling{{"s", "r", doc, 0, 7}};
    EXPECT_THROW((void)build_preferences(dangling, *run_), ExportError);
    RunArtifacts copy = *run_;
    copy.responses.at({doc, 1}).text = copy.responses.at({doc, 0}).text;
    const std::vector<PreferenceChoice> identical{{"s", "r", doc, 0, 1}};
    EXPECT_THROW((void)build_preferences(identical, copy), ExportError);
    EXPECT_TRUE(build_preferences({}, *run_).empty());
}

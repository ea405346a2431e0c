#include "fixture_run.hpp"

#include "privstory/error.hpp"
#include "privstory/pipeline.hpp"
#include "privstory/text.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

using namespace privstory;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

/// Runs the CLI with `args`, capturing stdout and stderr together.
CommandResult run_cli(const std::string &args) {
    const std::string cmd = std::string(PRIVSTORY_CLI_PATH) + " " + args + " 2>&1";
    CommandResult r;
    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) {
        r.output.append(buf, n);
    }
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fixture_config_arg() {
    return "--config " + (privstory::testing::fixture_dir() / "privstory.json").string();
}

std::size_t count_files(const fs::path &dir) {
    std::size_t n = 0;
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
        n += e.is_regular_file() ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST(Config, LoadsFixtureConfig) {
    const RunConfig cfg = RunConfig::load(privstory::testing::fixture_dir() / "privstory.json");
    EXPECT_EQ(cfg.run_id, "fixture-replay");
    EXPECT_EQ(cfg.model.provider_kind, ProviderKind::Replay);
    EXPECT_EQ(cfg.model.responses_per_document, 2);
    EXPECT_EQ(cfg.prompt.mode, PromptMode::Full);
    EXPECT_EQ(cfg.split.heldout.size(), 10u);
    EXPECT_TRUE(cfg.taxonomy.is_absolute());
    EXPECT_EQ(cfg.review_data_dir, cfg.run_dir / "review");
}

TEST(Config, Validation) {
    const fs::path base = privstory::testing::fixture_dir();
    json j = read_json_file(base / "privstory.json");
    EXPECT_NO_THROW(RunConfig::from_json(j, base).validate());
    auto broken = [&](auto edit) {
        json copy = j;
        edit(copy);
        RunConfig cfg = RunConfig::from_json(copy, base);
        cfg.validate();
    };
    EXPECT_THROW(broken([](json &c) { c["template"]["mode"] = "fancy"; }), ConfigError);
    EXPECT_THROW(broken([](json &c) { c["parallelism"] = 0; }), ConfigError);
    EXPECT_THROW(broken([](json &c) { c["taxonomy"] = "missing.json"; }), ConfigError);
    EXPECT_THROW(broken([](json &c) { c["embedding"]["provider"] = "magic"; }), ConfigError);
    EXPECT_THROW(broken([](json &c) { c["run_id"] = ""; }), ConfigError);
    EXPECT_THROW(broken([](json &c) {
                     c.erase("manifest");
                     c.erase("documents_root");
                 }),
                 ConfigError);
    EXPECT_THROW((void)RunConfig::load(base / "nope.json"), ConfigError);
}

TEST(Pipeline, TaxonomyCheck) {
    const TaxonomyCheck check = run_taxonomy_check(privstory::testing::fixture_config("/tmp/unused"));
    EXPECT_EQ(check.version, "pact-ext-1.0");
    EXPECT_EQ(check.label_counts, (std::array<std::size_t, 3>{3, 50, 26}));
    EXPECT_EQ(check.max_depth, 3);
    EXPECT_TRUE(check.violations.empty());
}

TEST(Pipeline, StagesNeedTheirInputs) {
    const RunConfig cfg = privstory::testing::fixture_config(privstory::testing::scratch_dir("stages") / "run");
    EXPECT_THROW(run_annotate(cfg), Error);
    (void)run_ingest(cfg);
    try {
        (void)run_evaluate(cfg);
        FAIL() << "evaluate ran without annotate outputs";
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("annotate"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, AnnotateWritesEveryArtifact) {
    const RunConfig cfg = privstory::testing::build_fixture_run("artifacts");
    EXPECT_EQ(count_files(cfg.run_dir / run_layout::kPrompts), 25u);
    EXPECT_EQ(count_files(cfg.run_dir / run_layout::kResponses), 50u);
    EXPECT_EQ(count_files(cfg.run_dir / run_layout::kParsed), 50u);
    EXPECT_TRUE(fs::exists(cfg.run_dir / run_layout::kAnnotateDone));
    const RunArtifacts run = RunArtifacts::load(cfg.run_dir, privstory::testing::default_taxonomy());
    EXPECT_EQ(run.prompts.size(), 25u);
    EXPECT_EQ(run.responses.size(), 50u);
    for (const auto &[id, prompt] : run.prompts) {
        ASSERT_EQ(prompt.icl_document_ids.size(), 1u);
        EXPECT_NE(prompt.icl_document_ids[0], id);
    }
}

TEST(Pipeline, MissingReplayRecordNamesDocument) {
    RunConfig cfg = privstory::testing::fixture_config(privstory::testing::scratch_dir("missing") / "run");
    cfg.store = privstory::testing::scratch_dir("empty-store");
    (void)run_ingest(cfg);
    try {
        run_annotate(cfg);
        FAIL() << "annotate succeeded without replay records";
    } catch (const Error &e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("50 of 50"), std::string::npos) << what;
        EXPECT_NE(what.find("budgetbee/analytics_client.ts (response 0)"), std::string::npos) << what;
    }
}

TEST(Pipeline, FixtureScores) {
    const RunConfig cfg = privstory::testing::build_fixture_run("scores");
    const EvalReport r = run_evaluate(cfg);
    EXPECT_EQ(r.per_document.size(), 25u);
    // Regression values for the committed replay store.
    EXPECT_NEAR(round3(r.overall_macro.f1), 0.817, 1e-9);
    EXPECT_NEAR(round3(r.overall_micro.f1), 0.810, 1e-9);
    EXPECT_GT(r.hallucination_rate, 0);
    EXPECT_TRUE(fs::exists(cfg.run_dir / run_layout::kReportJson));
    EXPECT_TRUE(fs::exists(cfg.run_dir / run_layout::kReportCsv));

    const SftExport sft = run_export_sft(cfg);
    EXPECT_EQ(sft.train.size(), 15u);
    EXPECT_TRUE(fs::exists(cfg.run_dir / run_layout::kSft));
}

TEST(Pipeline, ExportDpoFromReviewSessions) {
    const RunConfig cfg = privstory::testing::build_fixture_run("dpo");
    const auto run = std::make_shared<const RunArtifacts>(
        RunArtifacts::load(cfg.run_dir, privstory::testing::default_taxonomy()));
    {
        ReviewStore store(cfg.review_data_dir, {run});
        const std::string sid = store.create_session(run->run_id, "frank").session_id;
        store.record_preference(sid, run->manifest.documents[3].id, 1, 0);
    }
    const auto records = run_export_dpo(cfg);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].reviewer_id, "frank");
    const std::string written = read_file(cfg.run_dir / run_layout::kPreferences);
    EXPECT_EQ(std::count(written.begin(), written.end(), '\n'), 1);
    EXPECT_EQ(json::parse(written)["chosen"], run->find_response(run->manifest.documents[3].id, 1)->text);
}

// Three independent runs over the fixture produce byte-identical reports.
TEST(Pipeline, ReplayIsDeterministic) {
    std::string first_json;
    std::string first_csv;
    for (int i = 0; i < 3; ++i) {
        const RunConfig cfg = privstory::testing::build_fixture_run("determinism");
        (void)run_evaluate(cfg);
        const std::string j = read_file(cfg.run_dir / run_layout::kReportJson);
        const std::string c = read_file(cfg.run_dir / run_layout::kReportCsv);
        if (i == 0) {
            first_json = j;
            first_csv = c;
        } else {
            EXPECT_EQ(j, first_json);
            EXPECT_EQ(c, first_csv);
        }
    }
}

TEST(Cli, EndToEnd) {
    const fs::path run = privstory::testing::scratch_dir("cli") / "run";
    const std::string base = fixture_config_arg() + " --run-dir " + run.string();
    EXPECT_EQ(run_cli(base + " taxonomy-check").exit_code, 0);

    const CommandResult early = run_cli(base + " evaluate");
    EXPECT_EQ(early.exit_code, 1);
    EXPECT_NE(early.output.find("privstory evaluate:"), std::string::npos) << early.output;

    EXPECT_EQ(run_cli(base + " ingest").exit_code, 0);
    const CommandResult no_annotate = run_cli(base + " evaluate");
    EXPECT_EQ(no_annotate.exit_code, 1);
    EXPECT_NE(no_annotate.output.find("has no annotate outputs"), std::string::npos) << no_annotate.output;

    const CommandResult annotate = run_cli(base + " --replay annotate");
    ASSERT_EQ(annotate.exit_code, 0) << annotate.output;
    std::size_t parsed_zero = 0;
    for (const auto &e : fs::recursive_directory_iterator(run / run_layout::kParsed)) {
        parsed_zero += e.is_regular_file() && e.path().filename().string().ends_with(".0.json") ? 1 : 0;
    }
    EXPECT_EQ(parsed_zero, 25u);

    EXPECT_EQ(run_cli(base + " evaluate").exit_code, 0);
    EXPECT_TRUE(fs::exists(run / run_layout::kReportJson));
    EXPECT_EQ(run_cli(base + " export-sft").exit_code, 0);
    EXPECT_TRUE(fs::exists(run / run_layout::kSft));
    // No review sessions yet: an empty preference file and a warning.
    const CommandResult dpo = run_cli(base + " export-dpo");
    EXPECT_EQ(dpo.exit_code, 0) << dpo.output;
    EXPECT_EQ(read_file(run / run_layout::kPreferences), "");

    EXPECT_NE(run_cli(base + " --replay --record annotate").exit_code, 0);
    EXPECT_NE(run_cli(base + " no-such-command").exit_code, 0);
    EXPECT_EQ(run_cli("--config /nonexistent.json ingest").exit_code, 1);
}

#pragma once

// Builds the committed fixture corpus into a scratch run directory through the
// real ingest and replay-annotate stages, and scripts two-reviewer judgments on it.

#include "generators.hpp"

#include "privstory/pipeline.hpp"
#include "privstory/review.hpp"
#include "privstory/run.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace privstory::testing {

inline RunConfig fixture_config(const std::filesystem::path &run_dir) {
    RunConfig cfg = RunConfig::load(fixture_dir() / "privstory.json");
    cfg.run_dir = run_dir;
    cfg.review_data_dir = run_dir / "review";
    return cfg;
}

/// Ingest and annotate (replay) into a fresh scratch directory.
inline RunConfig build_fixture_run(const std::string &name) {
    RunConfig cfg = fixture_config(scratch_dir(name) / "run");
    (void)run_ingest(cfg);
    run_annotate(cfg);
    return cfg;
}

struct ReviewTarget {
    FileType type;
    std::size_t both_yes;
    std::size_t at_least_one_yes;
};

/// Per-file-type accuracy counts the scripted reviewers reproduce.
inline const std::vector<ReviewTarget> &review_targets() {
    static const std::vector<ReviewTarget> targets{{FileType::SoftwareCodeSpec, 20, 32},
                                                   {FileType::UserDeveloperGuide, 19, 43},
                                                   {FileType::ArchitectureDbDesign, 2, 12},
                                                   {FileType::Readme, 0, 1}};
    return targets;
}

inline constexpr const char *kReviewerA = "reviewer-a";
inline constexpr const char *kReviewerB = "reviewer-b";

/// Two complete sessions. Within each file type, in review order: the first
/// `both_yes` stories are accurate for both reviewers, the next ones up to
/// `at_least_one_yes` for exactly one reviewer (alternating), the rest for neither.
inline void record_review_targets(ReviewStore &store, const RunArtifacts &run) {
    const std::string a = store.create_session(run.run_id, kReviewerA).session_id;
    const std::string b = store.create_session(run.run_id, kReviewerB).session_id;
    std::map<FileType, std::size_t> seen;
    for (const auto &item : review_items(run)) {
        const FileType type = run.manifest.find(item.document_id)->file_type;
        const std::size_t k = seen[type]++;
        std::size_t both = 0;
        std::size_t any = 0;
        for (const auto &t : review_targets()) {
            if (t.type == type) {
                both = t.both_yes;
                any = t.at_least_one_yes;
            }
        }
        bool yes_a = k < both;
        bool yes_b = k < both;
        if (k >= both && k < any) {
            ((k - both) % 2 == 0 ? yes_a : yes_b) = true;
        }
        store.record_story_judgment(a, item.document_id, item.story_index, yes_a, k % 5 == 0);
        store.record_story_judgment(b, item.document_id, item.story_index, yes_b, false);
    }
    const std::string first_doc = run.manifest.documents.front().id;
    store.record_document_judgment(a, first_doc, "We share usage data for analytics.");
    store.record_document_judgment(b, first_doc, "   ");
    store.complete_session(a);
    store.complete_session(b);
}

}  // namespace privstory::testing

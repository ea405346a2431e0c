#pragma once

#include "privstory/corpus.hpp"
#include "privstory/json_io.hpp"
#include "privstory/run.hpp"
#include "privstory/training_export.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace privstory {

/// Reviewers judge the stories of this response index.
inline constexpr int kReviewedResponse = 0;

struct StoryJudgment {
    std::string document_id;
    std::size_t story_index = 0;
    bool q1_accurate = false;
    bool q2_missing_behaviors = false;
    std::string timestamp;
};

struct DocumentJudgment {
    std::string document_id;
    std::string q3_missing_stories;
    std::string timestamp;
};

struct PreferenceJudgment {
    std::string document_id;
    int chosen_index = 0;
    int rejected_index = 1;
    std::string timestamp;
};

struct ReviewItem {
    std::string document_id;
    std::size_t story_index = 0;
    std::string story;
    /// False when the story did not parse against the taxonomy (hallucinated labels).
    bool parsed = false;
};

enum class SessionStatus { Open, Complete };

struct ReviewSession {
    std::string session_id;
    std::string reviewer_id;
    std::string run_id;
    SessionStatus status = SessionStatus::Open;
    std::string created_at;
    std::vector<ReviewItem> items;
    std::map<std::pair<std::string, std::size_t>, StoryJudgment> story_judgments;
    std::map<std::string, DocumentJudgment> document_judgments;
    std::map<std::string, PreferenceJudgment> preferences;
    /// Timestamps of overwritten submissions: "<kind> <key> <old ts> -> <new ts>".
    std::vector<std::string> audit;

    [[nodiscard]] std::size_t judged_count() const;
    [[nodiscard]] std::size_t pending_count() const { return items.size() - judged_count(); }
    [[nodiscard]] const StoryJudgment *judgment(const std::string &doc, std::size_t index) const;
    [[nodiscard]] json to_json() const;
};

/// Session id derived from (run, reviewer), which is unique per store.
[[nodiscard]] std::string session_id_for(const std::string &run_id, const std::string &reviewer_id);

/// Generated stories of a run's reviewed response, in manifest order.
[[nodiscard]] std::vector<ReviewItem> review_items(const RunArtifacts &run);

struct ReviewRow {
    std::size_t stories = 0;
    std::size_t all_yes = 0;
    std::size_t at_least_one_yes = 0;
    std::size_t all_no = 0;
    std::size_t at_least_one_no = 0;
    /// Stories accurate for at least one reviewer that some reviewer flagged as missing behaviors.
    std::size_t accurate_missing_behaviors = 0;
    /// Stories that did not parse against the taxonomy.
    std::size_t unparsed = 0;
};

struct MissingStoryNote {
    std::string session_id;
    std::string reviewer_id;
    std::string document_id;
    std::string text;
};

struct ReviewReport {
    std::string run_id;
    std::size_t sessions = 0;
    ReviewRow overall;
    std::map<FileType, ReviewRow> per_file_type;
    std::vector<MissingStoryNote> q3_notes;
    std::size_t gold_stories = 0;
    /// Gold stories matched exactly by no generated story of the reviewed response.
    std::vector<std::pair<std::string, StoryTriple>> unmatched_gold;

    [[nodiscard]] json to_json() const;
};

/// Throws ReviewError when `sessions` is empty or a session belongs to another run.
[[nodiscard]] ReviewReport aggregate_review(const RunArtifacts &run, std::span<const ReviewSession> sessions);

/// Review sessions persisted as append-only JSONL event logs under `data_dir/sessions`,
/// replayed into memory at construction. Reads take a shared lock; every mutation goes
/// through one writer lock.
class ReviewStore {
  public:
    using Clock = std::function<std::string()>;

    ReviewStore(std::filesystem::path data_dir, std::vector<std::shared_ptr<const RunArtifacts>> runs,
                Clock clock = {});

    [[nodiscard]] std::vector<std::shared_ptr<const RunArtifacts>> runs() const { return runs_; }
    [[nodiscard]] std::shared_ptr<const RunArtifacts> run(const std::string &run_id) const;

    ReviewSession create_session(const std::string &run_id, const std::string &reviewer_id);
    [[nodiscard]] ReviewSession session(const std::string &session_id) const;
    [[nodiscard]] std::vector<ReviewSession> sessions(const std::optional<std::string> &run_id = std::nullopt) const;

    ReviewSession record_story_judgment(const std::string &session_id, const std::string &document_id,
                                        std::size_t story_index, bool q1_accurate, bool q2_missing_behaviors);
    ReviewSession record_document_judgment(const std::string &session_id, const std::string &document_id,
                                           const std::string &q3_missing_stories);
    ReviewSession record_preference(const std::string &session_id, const std::string &document_id, int chosen_index,
                                    int rejected_index);
    /// Fails while stories are still pending.
    ReviewSession complete_session(const std::string &session_id);

    [[nodiscard]] ReviewReport report(const std::string &run_id) const;
    [[nodiscard]] std::vector<PreferenceChoice> preference_choices(const std::string &run_id) const;

  private:
    void apply(ReviewSession &s, const json &event);
    void append(const std::string &session_id, const json &event);
    ReviewSession &open_session(const std::string &session_id);
    [[nodiscard]] std::filesystem::path log_path(const std::string &session_id) const;

    std::filesystem::path data_dir_;
    std::vector<std::shared_ptr<const RunArtifacts>> runs_;
    Clock clock_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, ReviewSession> sessions_;
};

/// UTC "YYYY-MM-DDTHH:MM:SS.mmmZ".
[[nodiscard]] std::string utc_timestamp();

}  // namespace privstory

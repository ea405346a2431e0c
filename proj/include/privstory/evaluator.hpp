#pragma once

#include "privstory/corpus.hpp"
#include "privstory/json_io.hpp"
#include "privstory/parser.hpp"
#include "privstory/rational.hpp"
#include "privstory/taxonomy.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace privstory {

/// Precision, recall and F1 as exact rationals.
struct Prf {
    Rational precision;
    Rational recall;
    Rational f1;
};

/// P = credit/predicted, R = credit/gold (0 on empty denominators), F1 = 2PR/(P+R) or 0.
[[nodiscard]] Prf prf(const Rational &credit, std::size_t predicted, std::size_t gold);

struct Pairing {
    NodeId predicted;
    NodeId gold;
    Rational credit;
    std::string predicted_name;
    std::string gold_name;
};

struct CategoryScore {
    Category category{};
    Rational credit_sum;
    std::size_t prediction_count = 0;
    std::size_t gold_count = 0;
    Prf scores;
    /// Only pairs earning positive credit.
    std::vector<Pairing> pairings;
};

/// Optimal one-to-one pairing of predicted to gold labels maximizing total credit,
/// with credit 1/(1+d) along ancestor/descendant chains.
[[nodiscard]] CategoryScore score_category(std::span<const NodeId> predicted, std::span<const NodeId> gold,
                                           const Taxonomy &t);

struct StoryComparison {
    std::size_t parsed_count = 0;
    std::size_t gold_count = 0;
    std::size_t matched = 0;
    Rational precision;
    Rational recall;
    std::vector<StoryTriple> matched_stories;
    std::vector<StoryTriple> unmatched_parsed;
    std::vector<StoryTriple> unmatched_gold;
};

/// Exact one-to-one matching on (action, data-type set, purpose set), case-insensitive.
[[nodiscard]] StoryComparison compare_stories(std::span<const StoryTriple> parsed, std::span<const StoryTriple> gold);

struct ScoringOptions {
    /// Count hallucinated labels as (uncredited) predictions.
    bool penalize_hallucinations = false;
};

struct DocumentScore {
    std::string document_id;
    std::array<CategoryScore, 3> categories;
    /// Pooled over the three categories.
    Rational credit_sum;
    std::size_t prediction_count = 0;
    std::size_t gold_count = 0;
    Prf micro;
    StoryComparison stories;
    std::size_t matched_labels = 0;
    std::size_t hallucinated_labels = 0;

    [[nodiscard]] const CategoryScore &category(Category c) const { return categories[static_cast<std::size_t>(c)]; }
};

[[nodiscard]] DocumentScore score_document(const ParsedAnnotation &parsed, const GoldAnnotation &gold,
                                           const Taxonomy &t, const ScoringOptions &opts = {});

struct RunMetadata {
    std::string run_id;
    std::string model_name;
    std::string template_version;
    std::string taxonomy_version;
    int response_index = 0;
    bool penalize_hallucinations = false;
};

struct FileTypeScore {
    std::size_t documents = 0;
    /// Arithmetic means of document-level micro scores.
    Prf mean;
};

struct CategoryAggregate {
    Prf micro;
    Prf macro;
};

struct EvalReport {
    RunMetadata metadata;
    std::vector<std::pair<FileType, DocumentScore>> per_document;
    std::map<FileType, FileTypeScore> per_file_type;
    std::array<CategoryAggregate, 3> per_category;
    Prf overall_micro;
    Prf overall_macro;
    Rational story_precision;
    Rational story_recall;
    Rational hallucination_rate;

    [[nodiscard]] json to_json() const;
    /// One row per document.
    [[nodiscard]] std::string to_csv() const;
};

/// Throws EvaluationError for scores whose document is not in the manifest.
[[nodiscard]] EvalReport aggregate(std::span<const DocumentScore> scores, const Manifest &manifest,
                                   const RunMetadata &metadata);

}  // namespace privstory

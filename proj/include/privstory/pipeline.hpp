#pragma once

#include "privstory/corpus.hpp"
#include "privstory/evaluator.hpp"
#include "privstory/llm.hpp"
#include "privstory/prompt.hpp"
#include "privstory/training_export.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace privstory {

enum class EmbeddingKind { Tfidf, Remote };

/// Run configuration file. Relative paths resolve against the config file's directory.
struct RunConfig {
    std::string run_id;
    std::filesystem::path taxonomy;
    /// Gold manifest. Without `documents_root` it also supplies the documents.
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> documents_root;
    std::optional<std::filesystem::path> hints;
    std::optional<std::filesystem::path> template_path;
    PromptOptions prompt;
    ModelConfig model;
    std::filesystem::path store;
    std::filesystem::path run_dir;
    SplitSpec split;
    PromptMode sft_mode = PromptMode::Base;
    std::size_t parallelism = 4;
    EmbeddingKind embedding = EmbeddingKind::Tfidf;
    std::string embedding_model;
    ScoringOptions scoring;
    int eval_response_index = 0;
    std::filesystem::path review_data_dir;
    std::string review_host = "127.0.0.1";
    int review_port = 8377;
    std::optional<std::filesystem::path> review_ui_dir;

    static RunConfig from_json(const json &j, const std::filesystem::path &base_dir);
    /// Throws ConfigError on missing files or invalid values.
    static RunConfig load(const std::filesystem::path &path);
    void validate() const;
};

/// Writes `manifest.json` and `run.json` into the run directory.
Manifest run_ingest(const RunConfig &cfg);

struct AnnotateOptions {
    bool record = false;
    /// Overrides the configured provider (tests inject fakes here).
    std::shared_ptr<ChatProvider> provider;
};

/// Builds prompts, completes them and parses the responses. Needs ingest outputs.
void run_annotate(const RunConfig &cfg, const AnnotateOptions &opts = {});

/// Scores parsed annotations against gold; writes `report.json` and `report.csv`.
EvalReport run_evaluate(const RunConfig &cfg);

SftExport run_export_sft(const RunConfig &cfg);

/// Preference records from review sessions stored under `cfg.review_data_dir`.
std::vector<PreferenceRecord> run_export_dpo(const RunConfig &cfg);

struct TaxonomyCheck {
    std::string version;
    std::array<std::size_t, 3> label_counts{};
    int max_depth = 0;
    std::vector<GoldViolation> violations;
};

/// Loads the taxonomy and, when a gold manifest is configured, validates it.
TaxonomyCheck run_taxonomy_check(const RunConfig &cfg);

}  // namespace privstory

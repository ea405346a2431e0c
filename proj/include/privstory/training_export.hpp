#pragma once

#include "privstory/corpus.hpp"
#include "privstory/prompt.hpp"
#include "privstory/run.hpp"
#include "privstory/taxonomy.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace privstory {

enum class Split { Train, Heldout };

struct SftRecord {
    std::string prompt;
    std::string completion;
    std::string document_id;
    Split split = Split::Train;
};

/// Explicit partition of document ids. An empty `train` means every document not held out.
struct SplitSpec {
    std::vector<std::string> train;
    std::vector<std::string> heldout;

    static SplitSpec from_json(const json &j);
};

struct ResolvedSplit {
    std::vector<std::string> train;
    std::vector<std::string> heldout;
};

/// Throws ExportError on overlapping or unknown ids.
[[nodiscard]] ResolvedSplit resolve_split(const SplitSpec &spec, const Manifest &m);

struct SftOptions {
    /// Base template by default; Full switches to the annotation template (needs `icl_for`).
    static PromptOptions base_prompt() {
        PromptOptions o;
        o.mode = PromptMode::Base;
        return o;
    }
    PromptOptions prompt = base_prompt();
    std::function<std::vector<IclExample>(const Document &)> icl_for;
};

struct SftExport {
    std::vector<SftRecord> train;
    std::vector<std::string> heldout;
    std::vector<std::string> warnings;
};

/// Builds train records (completion = gold in the tag contract); throws ExportError on invalid gold.
[[nodiscard]] SftExport build_sft(const Manifest &m, const Taxonomy &t, const SplitSpec &split,
                                  const SftOptions &opts = {});

/// Writes `sft.jsonl`, the held-out sidecar and the training-metadata sidecar into `dir`.
void write_sft(const SftExport &sft, const std::filesystem::path &dir);

/// Documented downstream training configuration (informational only).
[[nodiscard]] json training_metadata();

struct PreferenceChoice {
    std::string session_id;
    std::string reviewer_id;
    std::string document_id;
    int chosen_index = 0;
    int rejected_index = 1;
};

struct PreferenceRecord {
    std::string prompt;
    std::string chosen;
    std::string rejected;
    std::string reviewer_id;
    std::string document_id;
};

/// One record per choice, ordered by document id then reviewer id. Throws ExportError
/// on dangling response references or identical chosen/rejected responses.
[[nodiscard]] std::vector<PreferenceRecord> build_preferences(std::span<const PreferenceChoice> choices,
                                                              const RunArtifacts &run);

/// JSON Lines, UTF-8, LF.
void write_jsonl(const std::filesystem::path &path, const std::vector<json> &rows);
[[nodiscard]] json to_json_row(const SftRecord &r);
[[nodiscard]] json to_json_row(const PreferenceRecord &r);

}  // namespace privstory

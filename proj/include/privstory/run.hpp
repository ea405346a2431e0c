#pragma once

#include "privstory/corpus.hpp"
#include "privstory/llm.hpp"
#include "privstory/parser.hpp"
#include "privstory/prompt.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>

namespace privstory {

/// File layout of a run directory. Stages communicate only through these files.
namespace run_layout {
inline constexpr const char *kRunInfo = "run.json";
inline constexpr const char *kManifest = "manifest.json";
inline constexpr const char *kPrompts = "prompts";
inline constexpr const char *kResponses = "responses";
inline constexpr const char *kParsed = "parsed";
inline constexpr const char *kAnnotateDone = "annotate.json";
inline constexpr const char *kReportJson = "report.json";
inline constexpr const char *kReportCsv = "report.csv";
inline constexpr const char *kSft = "sft.jsonl";
inline constexpr const char *kSftHeldout = "sft_heldout.json";
inline constexpr const char *kSftMeta = "sft.meta.json";
inline constexpr const char *kPreferences = "preferences.jsonl";

[[nodiscard]] std::filesystem::path prompt_path(const std::filesystem::path &run, const std::string &doc);
[[nodiscard]] std::filesystem::path response_path(const std::filesystem::path &run, const std::string &doc, int index);
[[nodiscard]] std::filesystem::path parsed_path(const std::filesystem::path &run, const std::string &doc, int index);
}  // namespace run_layout

using ResponseKey = std::pair<std::string, int>;

/// Everything the annotate stage left in a run directory.
struct RunArtifacts {
    std::string run_id;
    std::filesystem::path dir;
    json info;
    Manifest manifest;
    std::map<std::string, PromptBundle> prompts;
    std::map<ResponseKey, RawResponse> responses;
    std::map<ResponseKey, ParsedAnnotation> parsed;

    /// Throws Error when the directory lacks annotate outputs.
    static RunArtifacts load(const std::filesystem::path &dir, const Taxonomy &t);

    [[nodiscard]] const ParsedAnnotation *find_parsed(const std::string &doc, int index) const;
    [[nodiscard]] const RawResponse *find_response(const std::string &doc, int index) const;
};

}  // namespace privstory

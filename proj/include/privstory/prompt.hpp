#pragma once

#include "privstory/corpus.hpp"
#include "privstory/json_io.hpp"
#include "privstory/taxonomy.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privstory {

/// Output tags of the response contract, in the order the model is asked to emit them.
namespace tags {
inline constexpr std::string_view kReasoning = "R";
inline constexpr std::string_view kActions = "ACTIONS";
inline constexpr std::string_view kDataTypes = "DATA_TYPES";
inline constexpr std::string_view kPurposes = "PURPOSES";
inline constexpr std::string_view kStories = "STORIES";
inline constexpr std::array<std::string_view, 5> kContract{kReasoning, kActions, kDataTypes, kPurposes, kStories};

[[nodiscard]] std::string_view for_category(Category c);
}  // namespace tags

/// Wording of the annotation prompt. Versioned data: changing any text should
/// come with a new `version`, since replay fingerprints hash the rendered prompt.
struct PromptTemplate {
    std::string version = "privstory-prompt-1";
    std::string system =
        "You are a privacy requirements analyst. You read software documents and identify how the "
        "application handles personal data.";
    std::string task =
        "Identify the privacy behaviors of the application described in the document: the actions it "
        "performs on personal data, the data types involved, and the purposes of each action. Then write "
        "privacy stories using the template \"We (action) (data type) for (purpose).\"";
    std::string label_intro = "Use only the following privacy behavior labels, written exactly as shown. "
                              "Indentation shows the label hierarchy.";
    std::string example_intro = "Here is an example document with its correct annotation.";
    std::string example_document_heading = "--- Example document ---";
    std::string example_answer_heading = "--- Example annotation ---";
    std::string example_end = "--- End of example ---";
    std::string format_intro = "Format your answer with the following XML tags:";
    std::string reasoning_description = "your step-by-step rationale for the labels and stories";
    std::string label_description = "one label per line";
    std::string story_description = "one privacy story per line";
    std::string document_intro = "Annotate the following document.";
    std::string document_heading = "--- Document ---";
    std::string document_end = "--- End of document ---";
    std::string restate_intro = "To restate the task:";
    std::string verify_instruction =
        "Before answering, explain your rationale inside the <R> tag. Then verify your outputs: every label "
        "must appear in the label lists above under the matching category, and every story must follow the "
        "template and use only labels you listed.";

    static PromptTemplate from_json(const json &j);
    static PromptTemplate load(const std::filesystem::path &path);
};

enum class PromptMode { Full, Base };

struct PromptOptions {
    PromptMode mode = PromptMode::Full;
    /// Number of in-context examples (full mode).
    std::size_t icl_k = 1;
    /// Longer documents keep their head and drop the tail; 0 disables truncation.
    std::size_t max_document_chars = 0;
    PromptTemplate tmpl;
};

struct PromptBundle {
    std::string document_id;
    std::string system_text;
    std::string user_text;
    std::vector<std::string> icl_document_ids;
    std::vector<std::string> tag_contract;
    std::string taxonomy_version;
    std::string template_version;
    std::vector<std::string> warnings;
};

void to_json(json &j, const PromptBundle &p);
void from_json(const json &j, PromptBundle &p);

struct IclExample {
    const Document *document = nullptr;
    const GoldAnnotation *gold = nullptr;
};

/// Renders an annotation in the tag contract; `rationale` adds an <R> block first.
[[nodiscard]] std::string render_tagged_annotation(const GoldAnnotation &gold, const Taxonomy &t,
                                                   const std::optional<std::string> &rationale = std::nullopt);

/// The label-list section: one line per label, indented two spaces per level.
[[nodiscard]] std::string render_label_lists(const Taxonomy &t);

/// Assembles the annotation prompt. Full mode: task, labels, examples, format contract,
/// document, restated task with verification. Base mode: task, labels, document.
[[nodiscard]] PromptBundle build_prompt(const Document &doc, const Taxonomy &t, std::span<const IclExample> examples,
                                        const PromptOptions &opts = {});

}  // namespace privstory

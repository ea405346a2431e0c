#pragma once

#include "privstory/json_io.hpp"
#include "privstory/story.hpp"
#include "privstory/taxonomy.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privstory {

struct ParsedStory {
    std::string raw;
    /// Absent when the line does not fit the template or uses non-taxonomy labels.
    std::optional<StoryTriple> triple;
};

struct ParsedAnnotation {
    std::string document_id;
    int response_index = 0;
    /// Per category (indexed by Category), distinct, in order of appearance.
    std::array<std::vector<NodeId>, 3> matched;
    /// Per category, raw strings that did not resolve in that category.
    std::array<std::vector<std::string>, 3> hallucinated;
    /// Every story line in order of appearance.
    std::vector<ParsedStory> stories;
    std::string rationale;
    std::vector<std::string> warnings;

    [[nodiscard]] const std::vector<NodeId> &matched_in(Category c) const {
        return matched[static_cast<std::size_t>(c)];
    }
    [[nodiscard]] const std::vector<std::string> &hallucinated_in(Category c) const {
        return hallucinated[static_cast<std::size_t>(c)];
    }
    [[nodiscard]] std::vector<StoryTriple> triples() const;
    [[nodiscard]] std::vector<std::string> malformed_stories() const;

    [[nodiscard]] json to_json(const Taxonomy &t) const;
    static ParsedAnnotation from_json(const json &j, const Taxonomy &t);
};

/// Contents of every innermost `<tag>...</tag>` block (case-insensitive tag name), in order.
/// An unclosed final tag runs to the next contract tag or the end of the text.
struct TagExtraction {
    std::vector<std::string> blocks;
    bool unclosed = false;
    bool nested = false;
};
[[nodiscard]] TagExtraction extract_tag(std::string_view text, std::string_view tag);

/// Splits a label section into raw labels. A line that does not resolve as a whole
/// but contains ',' or ';' is split further.
[[nodiscard]] std::vector<std::string> split_label_section(std::string_view section, const Taxonomy &t);

/// Total: never throws on any text; problems surface as warnings and empty sections.
[[nodiscard]] ParsedAnnotation parse_response(std::string_view text, std::string_view document_id, const Taxonomy &t,
                                              int response_index = 0);

}  // namespace privstory

#pragma once

#include "privstory/taxonomy.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privstory {

/// One privacy story: "We <action> <data types> for <purposes>."
/// Components hold canonical taxonomy display names.
struct StoryTriple {
    std::string action;
    std::vector<std::string> data_types;
    std::vector<std::string> purposes;

    friend bool operator==(const StoryTriple &, const StoryTriple &) = default;
};

/// Connective words of the rendered template.
struct StoryFormat {
    std::string subject = "We";
    std::string list_separator = ", ";
    std::string last_separator = " and ";
    std::string pivot = " for ";
    std::string terminator = ".";
};

/// Throws StoryError when a component does not resolve in its category or a list is empty.
void validate_story(const StoryTriple &s, const Taxonomy &t);

/// Returns the triple with each component replaced by its canonical display name.
[[nodiscard]] StoryTriple canonicalize_story(const StoryTriple &s, const Taxonomy &t);

[[nodiscard]] std::string render_story(const StoryTriple &s, const Taxonomy &t, const StoryFormat &fmt = {});

/// Inverse of `render_story`; nullopt when the line does not fit the template
/// or any component is not a label of the expected category.
[[nodiscard]] std::optional<StoryTriple> parse_story(std::string_view line, const Taxonomy &t,
                                                     const StoryFormat &fmt = {});

/// Joins items as "a", "a and b", "a, b and c".
[[nodiscard]] std::string join_list(const std::vector<std::string> &items, const StoryFormat &fmt = {});

}  // namespace privstory

#include "privstory/story.hpp"

#include "privstory/error.hpp"
#include "privstory/text.hpp"

#include <algorithm>
#include <utility>

namespace privstory {

namespace {

std::string resolve(const std::string &name, Category c, const Taxonomy &t) {
    auto id = t.find_label(name, c);
    if (!id) {
        throw StoryError("story " + std::string(category_name(c)) + " \"" + name + "\" is not a taxonomy label");
    }
    return t.node(*id).name;
}

// Piece boundaries for a rendered list: the list separator, the last separator,
// and both combined (serial comma, ", and ").
std::vector<std::string_view> split_list_pieces(std::string_view s, const StoryFormat &fmt) {
    const std::string list_sep = to_lower(fmt.list_separator);
    const std::string last_sep = to_lower(fmt.last_separator);
    std::vector<std::string> seps{list_sep + std::string(trim(last_sep)) + " ", last_sep, list_sep};
    std::erase_if(seps, [](const std::string &x) { return trim(x).empty(); });
    std::vector<std::string_view> pieces;
    std::size_t start = 0;
    std::size_t i = 0;
    const std::string lower = to_lower(s);
    while (i < s.size()) {
        std::size_t sep = 0;
        for (const auto &x : seps) {
            if (lower.compare(i, x.size(), x) == 0) {
                sep = x.size();
                break;
            }
        }
        if (sep > 0) {
            pieces.push_back(s.substr(start, i - start));
            i += sep;
            start = i;
        } else {
            ++i;
        }
    }
    pieces.push_back(s.substr(start));
    return pieces;
}

// Partitions a rendered list into labels of category `c`. Separators may also
// occur inside labels, so consecutive pieces are re-joined where needed; the
// segmentation with the fewest (longest) labels wins.
std::optional<std::vector<std::string>> parse_list(std::string_view s, Category c, const Taxonomy &t,
                                                   const StoryFormat &fmt) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    const auto pieces = split_list_pieces(s, fmt);
    const std::size_t n = pieces.size();
    // best[i] = fewest labels covering pieces[0, i)
    std::vector<std::optional<std::size_t>> best(n + 1);
    std::vector<std::size_t> back(n + 1, 0);
    std::vector<std::string> label_at(n + 1);
    best[0] = 0;
    for (std::size_t end = 1; end <= n; ++end) {
        for (std::size_t begin = 0; begin < end; ++begin) {
            if (!best[begin]) {
                continue;
            }
            // Span from the first char of pieces[begin] to the last of pieces[end-1].
            const char *first = pieces[begin].data();
            const char *last = pieces[end - 1].data() + pieces[end - 1].size();
            const std::string_view candidate(first, static_cast<std::size_t>(last - first));
            auto id = t.find_label(candidate, c);
            if (!id) {
                continue;
            }
            const std::size_t count = *best[begin] + 1;
            if (!best[end] || count < *best[end]) {
                best[end] = count;
                back[end] = begin;
                label_at[end] = t.node(*id).name;
            }
        }
    }
    if (!best[n]) {
        return std::nullopt;
    }
    std::vector<std::string> out;
    for (std::size_t end = n; end > 0; end = back[end]) {
        out.push_back(label_at[end]);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

void validate_story(const StoryTriple &s, const Taxonomy &t) {
    (void)canonicalize_story(s, t);
}

StoryTriple canonicalize_story(const StoryTriple &s, const Taxonomy &t) {
    if (s.data_types.empty()) {
        throw StoryError("story has no data types");
    }
    if (s.purposes.empty()) {
        throw StoryError("story has no purposes");
    }
    StoryTriple out;
    out.action = resolve(s.action, Category::Action, t);
    for (const auto &d : s.data_types) {
        out.data_types.push_back(resolve(d, Category::DataType, t));
    }
    for (const auto &p : s.purposes) {
        out.purposes.push_back(resolve(p, Category::Purpose, t));
    }
    return out;
}

std::string join_list(const std::vector<std::string> &items, const StoryFormat &fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += (i + 1 == items.size()) ? fmt.last_separator : fmt.list_separator;
        }
        out += items[i];
    }
    return out;
}

std::string render_story(const StoryTriple &s, const Taxonomy &t, const StoryFormat &fmt) {
    const StoryTriple canon = canonicalize_story(s, t);
    const auto &verb = t.node(*t.find_label(canon.action, Category::Action)).verb;
    return fmt.subject + " " + verb + " " + join_list(canon.data_types, fmt) + fmt.pivot +
           join_list(canon.purposes, fmt) + fmt.terminator;
}

std::optional<StoryTriple> parse_story(std::string_view line, const Taxonomy &t, const StoryFormat &fmt) {
    std::string_view s = trim(strip_list_marker(line));
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ';')) {
        s.remove_suffix(1);
        s = trim(s);
    }
    // Subject: "We" optionally followed by "(i.e., The Application)".
    const std::string subject = to_lower(fmt.subject);
    if (s.size() <= subject.size() || !iequals(s.substr(0, subject.size()), subject) ||
        s[subject.size()] != ' ') {
        return std::nullopt;
    }
    s = trim(s.substr(subject.size()));
    if (s.starts_with('(')) {
        const auto close = s.find(')');
        if (close == std::string_view::npos) {
            return std::nullopt;
        }
        s = trim(s.substr(close + 1));
    }

    // Action: a verb or label that prefixes the remainder at a word boundary,
    // longest first.
    std::vector<std::pair<std::size_t, NodeId>> actions;
    for (NodeId id : t.labels(Category::Action)) {
        const auto &node = t.node(id);
        for (const std::string *form : {&node.verb, &node.name}) {
            const auto len = form->size();
            if (len < s.size() && s[len] == ' ' && iequals(s.substr(0, len), *form)) {
                actions.emplace_back(len, id);
            }
        }
    }
    std::sort(actions.begin(), actions.end(), [](const auto &a, const auto &b) { return a.first > b.first; });

    const std::string pivot = to_lower(fmt.pivot);
    for (const auto &[action_len, action] : actions) {
        const std::string_view rest = trim(s.substr(action_len));
        // The pivot is space-delimited, so always standalone. Prefer the last
        // occurrence and fall back to earlier ones.
        const std::string lower = to_lower(rest);
        std::vector<std::size_t> positions;
        for (auto pos = lower.find(pivot); pos != std::string::npos; pos = lower.find(pivot, pos + 1)) {
            positions.push_back(pos);
        }
        for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
            auto data_types = parse_list(rest.substr(0, *it), Category::DataType, t, fmt);
            auto purposes = parse_list(rest.substr(*it + pivot.size()), Category::Purpose, t, fmt);
            if (data_types && purposes) {
                return StoryTriple{t.node(action).name, std::move(*data_types), std::move(*purposes)};
            }
        }
    }
    return std::nullopt;
}

}  // namespace privstory

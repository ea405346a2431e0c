#include "privstory/parser.hpp"

#include "privstory/error.hpp"
#include "privstory/prompt.hpp"
#include "privstory/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace privstory {

namespace {

struct TagHit {
    std::size_t begin;  // position of '<'
    std::size_t end;    // one past '>'
    bool closing;
};

// All `<tag>` / `</tag>` occurrences, case-insensitive, whitespace tolerated inside brackets.
std::vector<TagHit> find_tags(std::string_view text, std::string_view tag) {
    std::vector<TagHit> hits;
    for (std::size_t pos = text.find('<'); pos != std::string_view::npos; pos = text.find('<', pos + 1)) {
        std::size_t i = pos + 1;
        auto skip_ws = [&] {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) {
                ++i;
            }
        };
        skip_ws();
        bool closing = false;
        if (i < text.size() && text[i] == '/') {
            closing = true;
            ++i;
            skip_ws();
        }
        if (i + tag.size() > text.size() || !iequals(text.substr(i, tag.size()), tag)) {
            continue;
        }
        i += tag.size();
        skip_ws();
        if (i < text.size() && text[i] == '>') {
            hits.push_back({pos, i + 1, closing});
        }
    }
    return hits;
}

std::size_t next_contract_tag(std::string_view text, std::size_t from) {
    std::size_t best = text.size();
    for (auto tag : tags::kContract) {
        for (const auto &hit : find_tags(text.substr(from), tag)) {
            best = std::min(best, from + hit.begin);
            break;
        }
    }
    return best;
}

}  // namespace

TagExtraction extract_tag(std::string_view text, std::string_view tag) {
    TagExtraction out;
    const auto hits = find_tags(text, tag);
    // Stack of open positions; a closing tag pairs with the most recent open one.
    // A pair is innermost when nothing was pushed after its opening tag.
    std::vector<std::pair<std::size_t, bool>> stack;  // (content start, has_child)
    for (const auto &hit : hits) {
        if (!hit.closing) {
            if (!stack.empty()) {
                stack.back().second = true;
                out.nested = true;
            }
            stack.emplace_back(hit.end, false);
        } else if (!stack.empty()) {
            const auto [start, has_child] = stack.back();
            stack.pop_back();
            if (!has_child) {
                out.blocks.emplace_back(text.substr(start, hit.begin - start));
            }
        }
    }
    if (!stack.empty() && !stack.back().second) {
        const std::size_t start = stack.back().first;
        const std::size_t stop = next_contract_tag(text, start);
        out.blocks.emplace_back(text.substr(start, stop - start));
        out.unclosed = true;
    } else if (!stack.empty()) {
        out.unclosed = true;
    }
    return out;
}

std::vector<std::string> split_label_section(std::string_view section, const Taxonomy &t) {
    std::vector<std::string> out;
    for (auto line : split_lines(section)) {
        const std::string_view item = trim(strip_list_marker(line));
        if (item.empty()) {
            continue;
        }
        if (t.find_label(item) || item.find_first_of(",;") == std::string_view::npos) {
            out.emplace_back(item);
            continue;
        }
        std::size_t start = 0;
        while (start <= item.size()) {
            const auto stop = item.find_first_of(",;", start);
            const auto piece = trim(strip_list_marker(item.substr(start, stop == std::string_view::npos ? stop : stop - start)));
            if (!piece.empty()) {
                out.emplace_back(piece);
            }
            if (stop == std::string_view::npos) {
                break;
            }
            start = stop + 1;
        }
    }
    return out;
}

std::vector<StoryTriple> ParsedAnnotation::triples() const {
    std::vector<StoryTriple> out;
    for (const auto &s : stories) {
        if (s.triple) {
            out.push_back(*s.triple);
        }
    }
    return out;
}

std::vector<std::string> ParsedAnnotation::malformed_stories() const {
    std::vector<std::string> out;
    for (const auto &s : stories) {
        if (!s.triple) {
            out.push_back(s.raw);
        }
    }
    return out;
}

ParsedAnnotation parse_response(std::string_view text, std::string_view document_id, const Taxonomy &t,
                                int response_index) {
    ParsedAnnotation out;
    out.document_id = std::string(document_id);
    out.response_index = response_index;

    // Mask covering every contract block, to detect prose outside tags.
    std::vector<bool> covered(text.size(), false);
    auto cover = [&](std::string_view tag) {
        const auto hits = find_tags(text, tag);
        std::vector<std::size_t> opens;
        for (const auto &h : hits) {
            std::fill(covered.begin() + static_cast<std::ptrdiff_t>(h.begin),
                      covered.begin() + static_cast<std::ptrdiff_t>(h.end), true);
            if (!h.closing) {
                opens.push_back(h.begin);
            } else if (!opens.empty()) {
                std::fill(covered.begin() + static_cast<std::ptrdiff_t>(opens.back()),
                          covered.begin() + static_cast<std::ptrdiff_t>(h.end), true);
                opens.pop_back();
            }
        }
        if (!opens.empty()) {
            const auto stop = next_contract_tag(text, opens.front() + 1);
            std::fill(covered.begin() + static_cast<std::ptrdiff_t>(opens.front()),
                      covered.begin() + static_cast<std::ptrdiff_t>(stop), true);
        }
    };

    auto section = [&](std::string_view tag) -> std::string {
        cover(tag);
        const TagExtraction ex = extract_tag(text, tag);
        const std::string name(tag);
        if (ex.blocks.empty()) {
            out.warnings.push_back("missing <" + name + "> section");
            return {};
        }
        if (ex.nested) {
            out.warnings.push_back("nested <" + name + "> tags; using innermost blocks");
        }
        if (ex.blocks.size() > 1) {
            out.warnings.push_back(std::to_string(ex.blocks.size()) + " <" + name + "> blocks concatenated");
        }
        if (ex.unclosed) {
            out.warnings.push_back("unclosed <" + name + "> tag");
        }
        std::string joined;
        for (const auto &b : ex.blocks) {
            if (!joined.empty()) {
                joined += "\n";
            }
            joined += b;
        }
        return joined;
    };

    out.rationale = std::string(trim(section(tags::kReasoning)));

    for (Category c : kCategories) {
        const auto idx = static_cast<std::size_t>(c);
        const std::string body = section(tags::for_category(c));
        std::set<std::string> seen;
        for (const auto &raw : split_label_section(body, t)) {
            const std::string key = normalize_name(raw);
            if (!seen.insert(key).second) {
                out.warnings.push_back("duplicate " + std::string(category_name(c)) + " label \"" + raw + "\"");
                continue;
            }
            if (auto id = t.find_label(raw, c)) {
                out.matched[idx].push_back(*id);
            } else {
                if (t.find_label(raw)) {
                    out.warnings.push_back("label \"" + raw + "\" listed under " + std::string(category_name(c)) +
                                           " belongs to another category");
                }
                out.hallucinated[idx].push_back(raw);
            }
        }
    }

    const std::string stories = section(tags::kStories);
    for (auto line : split_lines(stories)) {
        const std::string_view item = trim(strip_list_marker(line));
        if (item.empty()) {
            continue;
        }
        ParsedStory s;
        s.raw = std::string(item);
        s.triple = parse_story(item, t);
        out.stories.push_back(std::move(s));
    }

    std::size_t outside = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!covered[i] && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++outside;
        }
    }
    if (outside > 0) {
        out.warnings.push_back("ignored " + std::to_string(outside) + " non-whitespace characters outside tags");
    }
    return out;
}

json ParsedAnnotation::to_json(const Taxonomy &t) const {
    json j;
    j["document_id"] = document_id;
    j["response_index"] = response_index;
    json matched_j = json::object();
    json halluc_j = json::object();
    for (Category c : kCategories) {
        const auto idx = static_cast<std::size_t>(c);
        json names = json::array();
        for (NodeId id : matched[idx]) {
            names.push_back(t.node(id).name);
        }
        matched_j[std::string(category_key(c))] = std::move(names);
        halluc_j[std::string(category_key(c))] = hallucinated[idx];
    }
    j["matched"] = std::move(matched_j);
    j["hallucinated"] = std::move(halluc_j);
    json stories_j = json::array();
    for (const auto &s : stories) {
        json js{{"raw", s.raw}};
        if (s.triple) {
            privstory::to_json(js["triple"], *s.triple);
        } else {
            js["triple"] = nullptr;
        }
        stories_j.push_back(std::move(js));
    }
    j["stories"] = std::move(stories_j);
    j["rationale"] = rationale;
    j["warnings"] = warnings;
    return j;
}

ParsedAnnotation ParsedAnnotation::from_json(const json &j, const Taxonomy &t) {
    ParsedAnnotation p;
    p.document_id = j.at("document_id").get<std::string>();
    p.response_index = j.value("response_index", 0);
    for (Category c : kCategories) {
        const auto idx = static_cast<std::size_t>(c);
        const std::string key(category_key(c));
        for (const auto &name : j.at("matched").at(key)) {
            auto id = t.find_label(name.get<std::string>(), c);
            if (!id) {
                throw Error(p.document_id + ": parsed label \"" + name.get<std::string>() +
                            "\" is not in the loaded taxonomy");
            }
            p.matched[idx].push_back(*id);
        }
        p.hallucinated[idx] = j.at("hallucinated").at(key).get<std::vector<std::string>>();
    }
    for (const auto &js : j.at("stories")) {
        ParsedStory s;
        s.raw = js.at("raw").get<std::string>();
        if (auto tr = js.find("triple"); tr != js.end() && !tr->is_null()) {
            StoryTriple triple;
            privstory::from_json(*tr, triple);
            s.triple = std::move(triple);
        }
        p.stories.push_back(std::move(s));
    }
    p.rationale = j.value("rationale", std::string{});
    p.warnings = j.value("warnings", std::vector<std::string>{});
    return p;
}

}  // namespace privstory

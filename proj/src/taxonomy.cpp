#include "privstory/taxonomy.hpp"

#include "privstory/error.hpp"
#include "privstory/json_io.hpp"
#include "privstory/text.hpp"

#include <algorithm>
#include <cstdlib>

namespace privstory {

std::string_view category_name(Category c) {
    switch (c) {
    case Category::Action:
        return "Action";
    case Category::DataType:
        return "Data Type";
    case Category::Purpose:
        return "Purpose";
    }
    return "?";
}

std::string_view category_key(Category c) {
    switch (c) {
    case Category::Action:
        return "actions";
    case Category::DataType:
        return "data_types";
    case Category::Purpose:
        return "purposes";
    }
    return "?";
}

namespace {

constexpr std::array<std::string_view, 3> kRootNames{"Actions", "Data Types", "Purposes"};

// A JSON tree cannot express cycles or orphans directly; the checks below
// still guard against parent links that would introduce them.
class Builder {
  public:
    explicit Builder(std::vector<TaxonomyNode> &nodes, std::unordered_map<std::string, NodeId> &index)
        : nodes_(nodes), index_(index) {}

    void add_children(const json &array, NodeId parent, const std::string &path) {
        if (!array.is_array()) {
            throw TaxonomyError(path + ": expected an array of nodes");
        }
        for (std::size_t i = 0; i < array.size(); ++i) {
            add_node(array[i], parent, path + "[" + std::to_string(i) + "]");
        }
    }

  private:
    void add_node(const json &obj, NodeId parent, const std::string &path) {
        if (!obj.is_object()) {
            throw TaxonomyError(path + ": node must be an object");
        }
        const auto name_it = obj.find("name");
        if (name_it == obj.end() || !name_it->is_string()) {
            throw TaxonomyError(path + ": node without a string `name`");
        }
        const std::string name(trim(name_it->get<std::string>()));
        const std::string key = normalize_name(name);
        const std::string node_path = path + " (" + name + ")";
        if (key.empty()) {
            throw TaxonomyError(node_path + ": empty name");
        }
        if (auto existing = index_.find(key); existing != index_.end()) {
            throw TaxonomyError(node_path + ": duplicate name, already defined as \"" +
                                nodes_[existing->second.value].name + "\"");
        }
        const TaxonomyNode &parent_node = nodes_.at(parent.value);
        TaxonomyNode node;
        node.id = NodeId{nodes_.size()};
        node.name = name;
        node.category = parent_node.category;
        node.parent = parent;
        node.depth = parent_node.depth + 1;
        if (auto verb = obj.find("verb"); verb != obj.end()) {
            if (!verb->is_string() || trim(verb->get<std::string>()).empty()) {
                throw TaxonomyError(node_path + ": `verb` must be a non-empty string");
            }
            if (node.category != Category::Action) {
                throw TaxonomyError(node_path + ": `verb` is only valid on actions");
            }
            node.verb = std::string(trim(verb->get<std::string>()));
        } else if (node.category == Category::Action) {
            node.verb = to_lower(name);
        }
        const NodeId id = node.id;
        nodes_.push_back(std::move(node));
        nodes_[parent.value].children.push_back(id);
        index_.emplace(key, id);
        if (auto children = obj.find("children"); children != obj.end()) {
            add_children(*children, id, node_path);
        }
    }

    std::vector<TaxonomyNode> &nodes_;
    std::unordered_map<std::string, NodeId> &index_;
};

}  // namespace

Taxonomy Taxonomy::load(std::string_view source) {
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error &e) {
        throw TaxonomyError(std::string("malformed taxonomy file: ") + e.what());
    }
    if (!doc.is_object()) {
        throw TaxonomyError("malformed taxonomy file: top level must be an object");
    }
    Taxonomy t;
    if (auto v = doc.find("version"); v != doc.end() && v->is_string()) {
        t.version_ = v->get<std::string>();
    } else {
        throw TaxonomyError("malformed taxonomy file: missing string `version`");
    }
    for (Category c : kCategories) {
        TaxonomyNode root;
        root.id = NodeId{t.nodes_.size()};
        root.name = std::string(kRootNames[static_cast<std::size_t>(c)]);
        root.category = c;
        t.roots_[static_cast<std::size_t>(c)] = root.id;
        t.nodes_.push_back(std::move(root));
    }
    Builder builder(t.nodes_, t.index_);
    for (Category c : kCategories) {
        const std::string key(category_key(c));
        auto it = doc.find(key);
        if (it == doc.end()) {
            throw TaxonomyError("malformed taxonomy file: missing `" + key + "` array");
        }
        builder.add_children(*it, t.root(c), key);
    }
    // Parents always precede children, so walking up terminates; verify anyway.
    for (const auto &node : t.nodes_) {
        std::size_t steps = 0;
        NodeId cur = node.id;
        while (t.nodes_[cur.value].parent) {
            cur = *t.nodes_[cur.value].parent;
            if (++steps > t.nodes_.size()) {
                throw TaxonomyError(node.name + ": cycle in parent links");
            }
        }
        if (t.nodes_[cur.value].category != node.category || cur != t.root(node.category)) {
            throw TaxonomyError(node.name + ": orphan node not reachable from its category root");
        }
        t.max_depth_ = std::max(t.max_depth_, node.depth);
    }
    return t;
}

Taxonomy Taxonomy::load_file(const std::string &path) {
    try {
        return load(read_file(path));
    } catch (const TaxonomyError &e) {
        throw TaxonomyError(path + ": " + e.what());
    } catch (const Error &e) {
        throw TaxonomyError(e.what());
    }
}

std::size_t Taxonomy::label_count(Category c) const {
    std::size_t n = 0;
    for (const auto &node : nodes_) {
        n += (!node.is_root() && node.category == c) ? 1 : 0;
    }
    return n;
}

void Taxonomy::check(NodeId id) const {
    if (id.value >= nodes_.size()) {
        throw TaxonomyError("node id " + std::to_string(id.value) + " is not in the taxonomy");
    }
}

const TaxonomyNode &Taxonomy::node(NodeId id) const {
    check(id);
    return nodes_[id.value];
}

std::vector<NodeId> Taxonomy::labels(Category c) const {
    std::vector<NodeId> out;
    std::vector<NodeId> stack;
    const auto &root_children = nodes_[root(c).value].children;
    stack.assign(root_children.rbegin(), root_children.rend());
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        out.push_back(id);
        const auto &kids = nodes_[id.value].children;
        stack.insert(stack.end(), kids.rbegin(), kids.rend());
    }
    return out;
}

std::optional<NodeId> Taxonomy::find_label(std::string_view raw) const {
    if (auto it = index_.find(normalize_name(raw)); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<NodeId> Taxonomy::find_label(std::string_view raw, Category c) const {
    auto id = find_label(raw);
    if (id && nodes_[id->value].category == c) {
        return id;
    }
    return std::nullopt;
}

bool Taxonomy::is_ancestor(NodeId ancestor, NodeId node) const {
    check(ancestor);
    check(node);
    std::optional<NodeId> cur = nodes_[node.value].parent;
    while (cur) {
        if (*cur == ancestor) {
            return true;
        }
        cur = nodes_[cur->value].parent;
    }
    return false;
}

std::optional<int> Taxonomy::tree_distance(NodeId a, NodeId b) const {
    check(a);
    check(b);
    const auto &na = nodes_[a.value];
    const auto &nb = nodes_[b.value];
    if (na.is_root() || nb.is_root() || na.category != nb.category) {
        return std::nullopt;
    }
    if (a == b) {
        return 0;
    }
    if (is_ancestor(a, b) || is_ancestor(b, a)) {
        return std::abs(na.depth - nb.depth);
    }
    return std::nullopt;
}

Rational Taxonomy::credit(NodeId predicted, NodeId gold) const {
    if (auto d = tree_distance(predicted, gold)) {
        return Rational(1, 1 + *d);
    }
    return Rational(0);
}

}  // namespace privstory

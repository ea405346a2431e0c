#pragma once

#include "privstory/rational.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace privstory {

enum class Category { Action, DataType, Purpose };

inline constexpr std::array<Category, 3> kCategories{Category::Action, Category::DataType, Category::Purpose};

[[nodiscard]] std::string_view category_name(Category c);
/// Key used in files: "actions", "data_types", "purposes".
[[nodiscard]] std::string_view category_key(Category c);

/// Stable index of a node inside its taxonomy.
struct NodeId {
    std::size_t value{};
    friend bool operator==(NodeId, NodeId) = default;
    friend auto operator<=>(NodeId, NodeId) = default;
};

struct TaxonomyNode {
    NodeId id;
    std::string name;
    Category category{};
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    /// Verb form used in rendered stories (actions only; empty otherwise).
    std::string verb;
    /// 0 for category roots.
    int depth = 0;

    [[nodiscard]] bool is_root() const noexcept { return !parent.has_value(); }
};

/// Immutable three-rooted label hierarchy.
///
/// The three category roots are structural: they are not labels, never
/// resolve through `find_label`, and tree distances never pass through them.
class Taxonomy {
  public:
    /// Parses the taxonomy JSON format; throws TaxonomyError with the offending node path.
    static Taxonomy load(std::string_view source);
    static Taxonomy load_file(const std::string &path);

    [[nodiscard]] const std::string &version() const noexcept { return version_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t label_count(Category c) const;

    [[nodiscard]] const TaxonomyNode &node(NodeId id) const;
    [[nodiscard]] NodeId root(Category c) const noexcept { return roots_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] std::span<const TaxonomyNode> nodes() const noexcept { return nodes_; }

    /// Labels of one category in depth-first file order.
    [[nodiscard]] std::vector<NodeId> labels(Category c) const;

    /// Exact match after `normalize_name`; never fuzzy.
    [[nodiscard]] std::optional<NodeId> find_label(std::string_view raw) const;
    [[nodiscard]] std::optional<NodeId> find_label(std::string_view raw, Category c) const;

    /// Edge count between two labels on one ancestor/descendant chain, else nullopt.
    [[nodiscard]] std::optional<int> tree_distance(NodeId a, NodeId b) const;

    /// 1/(1+d) for chain distance d, 0 otherwise.
    [[nodiscard]] Rational credit(NodeId predicted, NodeId gold) const;

    [[nodiscard]] bool is_ancestor(NodeId ancestor, NodeId node) const;
    [[nodiscard]] int max_depth() const noexcept { return max_depth_; }

  private:
    Taxonomy() = default;
    void check(NodeId id) const;

    std::string version_;
    std::vector<TaxonomyNode> nodes_;
    std::array<NodeId, 3> roots_{};
    std::unordered_map<std::string, NodeId> index_;
    int max_depth_ = 0;
};

}  // namespace privstory

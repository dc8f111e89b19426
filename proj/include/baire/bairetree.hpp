#pragma once
// One-pass m-adic prefix tree. Each key is walked down max_depth levels, one
// digit per level, so building costs exactly n * max_depth digit reads. The
// depth-d nodes are the clusters of items at Baire distance <= base^(-d).

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <ranges>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "baire/errors.hpp"
#include "baire/madic.hpp"

namespace baire {

using ItemId = std::uint64_t;

struct KeyedItem {
    ItemId id = 0;
    DigitKey key;
};

// Clusters at one level, keyed by their length-`level` prefix. std::map keeps
// iteration lexicographic; member lists are sorted.
struct LevelClustering {
    int level = 0;
    std::map<Digits, std::vector<ItemId>> clusters;

    std::size_t item_count() const {
        std::size_t n = 0;
        for (const auto& [prefix, members] : clusters) n += members.size();
        return n;
    }
};

struct TreeOptions {
    int max_depth = 4;
    // Nodes at this depth or deeper keep member lists; shallower nodes keep
    // only counts. 0 means "max_depth" (leaves only).
    int member_depth = 0;
};

class BaireTree {
public:
    static constexpr std::int32_t kNone = -1;

    struct Node {
        std::int32_t parent = kNone;
        std::uint8_t depth = 0;
        Digit digit = 0;
        std::uint64_t count = 0;
        std::array<std::int32_t, kMaxBase> children;
        std::vector<ItemId> members;

        Node() { children.fill(kNone); }
    };

    template <std::ranges::input_range R, class IdFn, class KeyFn>
    static BaireTree build(R&& items, TreeOptions options, IdFn id_of, KeyFn key_of) {
        BaireTree tree(options);
        if constexpr (std::ranges::sized_range<R>) tree.dense_leaf_.reserve(std::ranges::size(items));
        for (auto&& item : items) {
            const DigitKey& key = std::invoke(key_of, item);
            tree.insert(std::invoke(id_of, item), key);
        }
        return tree;
    }

    static BaireTree build(std::span<const KeyedItem> items, int max_depth) {
        return build(items, TreeOptions{max_depth, 0}, &KeyedItem::id, &KeyedItem::key);
    }

    static BaireTree build(std::span<const KeyedItem> items, TreeOptions options) {
        return build(items, options, &KeyedItem::id, &KeyedItem::key);
    }

    int base() const noexcept { return base_; }
    int precision() const noexcept { return precision_; }
    bool includes_integer_digit() const noexcept { return includes_integer_digit_; }
    int max_depth() const noexcept { return max_depth_; }
    int member_depth() const noexcept { return member_depth_; }
    std::uint64_t item_count() const noexcept { return nodes_[0].count; }
    std::uint64_t digit_inspections() const noexcept { return digit_inspections_; }

    const Node& root() const noexcept { return nodes_[0]; }
    const Node& node(std::int32_t index) const { return nodes_.at(static_cast<std::size_t>(index)); }
    std::span<const Node> nodes() const noexcept { return nodes_; }

    // Materialized nodes below the root.
    std::size_t node_count() const noexcept { return nodes_.size() - 1; }

    std::size_t node_count_at(int depth) const {
        std::size_t n = 0;
        for (const auto& nd : nodes_)
            if (nd.depth == depth) ++n;
        return depth == 0 ? 1 : n;
    }

    Digits prefix_of(std::int32_t index) const {
        Digits prefix(nodes_.at(static_cast<std::size_t>(index)).depth);
        for (std::int32_t i = index; i > 0; i = nodes_[static_cast<std::size_t>(i)].parent)
            prefix[nodes_[static_cast<std::size_t>(i)].depth - 1u] = nodes_[static_cast<std::size_t>(i)].digit;
        return prefix;
    }

    // Node for an exact prefix, or kNone when that prefix holds no items.
    std::int32_t find(std::span<const Digit> prefix) const {
        if (static_cast<int>(prefix.size()) > max_depth_)
            throw RangeError("prefix length " + std::to_string(prefix.size()) +
                             " exceeds tree depth " + std::to_string(max_depth_));
        if (base_ == 0) return prefix.empty() ? 0 : kNone;
        std::int32_t cur = 0;
        for (Digit d : prefix) {
            if (d >= base_)
                throw DomainError("digit " + std::to_string(d) + " outside base " +
                                  std::to_string(base_));
            cur = nodes_[static_cast<std::size_t>(cur)].children[d];
            if (cur == kNone) return kNone;
        }
        return cur;
    }

    LevelClustering clusters_at_level(int level) const {
        if (level < 1 || level > max_depth_)
            throw RangeError("level " + std::to_string(level) + " outside [1, " +
                             std::to_string(max_depth_) + "]");
        LevelClustering out;
        out.level = level;
        visit_at_depth(0, level, [&](std::int32_t idx) {
            auto& members = out.clusters[prefix_of(idx)];
            collect(idx, members);
            std::sort(members.begin(), members.end());
        });
        return out;
    }

    // Every item whose key starts with `prefix`; empty when no such node exists.
    std::vector<ItemId> retrieve_subtree(std::span<const Digit> prefix) const {
        std::vector<ItemId> out;
        const std::int32_t idx = find(prefix);
        if (idx != kNone) collect(idx, out);
        return out;
    }

    // base^(-d), d = depth of the deepest node holding both items.
    BaireValue cophenetic_distance(ItemId a, ItemId b) const {
        std::int32_t na = leaf_of(a);
        std::int32_t nb = leaf_of(b);
        while (na != nb) {
            na = nodes_[static_cast<std::size_t>(na)].parent;
            nb = nodes_[static_cast<std::size_t>(nb)].parent;
        }
        return BaireValue(nodes_[static_cast<std::size_t>(na)].depth, base_);
    }

    std::int32_t leaf_of(ItemId id) const {
        if (id < dense_leaf_.size() && dense_leaf_[id] != kNone) return dense_leaf_[id];
        const auto it = sparse_leaf_.find(id);
        if (it == sparse_leaf_.end()) throw NotFoundError("item " + std::to_string(id) + " not in tree");
        return it->second;
    }

    // Calls fn(node_index) for every node at `depth`, in lexicographic prefix order.
    template <class Fn>
    void visit_at_depth(std::int32_t from, int depth, Fn&& fn) const {
        const Node& nd = nodes_[static_cast<std::size_t>(from)];
        if (nd.depth == depth) {
            fn(from);
            return;
        }
        for (int d = 0; d < base_; ++d)
            if (nd.children[d] != kNone) visit_at_depth(nd.children[d], depth, fn);
    }

private:
    explicit BaireTree(TreeOptions options)
        : max_depth_(options.max_depth),
          member_depth_(options.member_depth == 0 ? options.max_depth : options.member_depth) {
        if (max_depth_ < 1 || max_depth_ > kMaxPrecision)
            throw RangeError("max_depth must be in [1, " + std::to_string(kMaxPrecision) + "]");
        if (member_depth_ < 1 || member_depth_ > max_depth_)
            throw RangeError("member_depth must be in [1, max_depth]");
        nodes_.emplace_back();
    }

    void insert(ItemId id, const DigitKey& key) {
        if (nodes_[0].count == 0 && base_ == 0) {
            if (max_depth_ > key.precision())
                throw RangeError("depth " + std::to_string(max_depth_) + " exceeds key precision " +
                                 std::to_string(key.precision()));
            base_ = key.base();
            precision_ = key.precision();
            includes_integer_digit_ = key.includes_integer_digit();
        } else if (key.base() != base_ || key.precision() != precision_ ||
                   key.includes_integer_digit() != includes_integer_digit_) {
            throw ConventionError("mixed digit-key conventions in tree input");
        }

        std::int32_t* slot = leaf_slot(id);
        if (*slot != kNone) throw DomainError("duplicate item id " + std::to_string(id));

        std::int32_t cur = 0;
        ++nodes_[0].count;
        for (int level = 0; level < max_depth_; ++level) {
            const Digit d = key[static_cast<std::size_t>(level)];
            ++digit_inspections_;
            std::int32_t next = nodes_[static_cast<std::size_t>(cur)].children[d];
            if (next == kNone) {
                next = static_cast<std::int32_t>(nodes_.size());
                Node child;
                child.parent = cur;
                child.depth = static_cast<std::uint8_t>(level + 1);
                child.digit = d;
                nodes_.push_back(std::move(child));
                nodes_[static_cast<std::size_t>(cur)].children[d] = next;
            }
            cur = next;
            Node& nd = nodes_[static_cast<std::size_t>(cur)];
            ++nd.count;
            if (nd.depth >= member_depth_) nd.members.push_back(id);
        }
        *slot = cur;
    }

    // Ids are usually 0..n-1, so they index a flat array; ids far beyond the
    // item count go to a hash map instead of blowing up the array.
    std::int32_t* leaf_slot(ItemId id) {
        if (!sparse_leaf_.empty())
            if (const auto it = sparse_leaf_.find(id); it != sparse_leaf_.end()) return &it->second;
        if (id < dense_leaf_.size()) return &dense_leaf_[id];
        if (id <= 2 * (nodes_[0].count + dense_leaf_.capacity()) + 1024) {
            dense_leaf_.resize(id + 1, kNone);
            return &dense_leaf_[id];
        }
        return &sparse_leaf_.try_emplace(id, kNone).first->second;
    }

    void collect(std::int32_t idx, std::vector<ItemId>& out) const {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        if (nd.depth >= member_depth_) {
            out.insert(out.end(), nd.members.begin(), nd.members.end());
            return;
        }
        for (int d = 0; d < base_; ++d)
            if (nd.children[d] != kNone) collect(nd.children[d], out);
    }

    int base_ = 0;
    int precision_ = 0;
    bool includes_integer_digit_ = false;
    int max_depth_;
    int member_depth_;
    std::uint64_t digit_inspections_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> dense_leaf_;
    std::unordered_map<ItemId, std::int32_t> sparse_leaf_;
};

}  // namespace baire

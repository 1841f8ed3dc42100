#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coordsketch {

using SetId = std::string;

// Opaque attribute record attached to a key. Shared immutably so sketch
// entries can carry it without copying.
using Attrs = std::vector<std::pair<std::string, std::string>>;
using AttrsPtr = std::shared_ptr<const Attrs>;

inline const std::string* find_attr(const AttrsPtr& attrs, const std::string& name) {
    if (!attrs) return nullptr;
    for (const auto& [k, v] : *attrs) {
        if (k == name) return &v;
    }
    return nullptr;
}

// A ground-set element: unique id, positive weight, optional attributes.
struct Key {
    std::uint64_t id = 0;
    double weight = 1.0;
    AttrsPtr attrs;
};

// A ground set of weighted keys plus named subsets of it.
// Weights must be positive; ids unique; set members must exist in the ground.
class WeightedSetCollection {
public:
    void add_key(Key key) {
        if (!(key.weight > 0.0)) {
            throw std::invalid_argument("key weight must be positive (id " +
                                        std::to_string(key.id) + ")");
        }
        if (by_id_.contains(key.id)) {
            throw std::invalid_argument("duplicate key id " + std::to_string(key.id));
        }
        by_id_.emplace(key.id, ground_.size());
        ground_.push_back(std::move(key));
    }

    void add_member(const SetId& set_id, std::uint64_t key_id) {
        auto it = by_id_.find(key_id);
        if (it == by_id_.end()) {
            throw std::invalid_argument("set " + set_id + " references unknown key id " +
                                        std::to_string(key_id));
        }
        sets_[set_id].push_back(it->second);
    }

    std::span<const Key> ground() const { return ground_; }

    bool has_key(std::uint64_t id) const { return by_id_.contains(id); }

    const Key& key(std::uint64_t id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) {
            throw std::invalid_argument("unknown key id " + std::to_string(id));
        }
        return ground_[it->second];
    }

    bool has_set(const SetId& id) const { return sets_.contains(id); }

    std::vector<SetId> set_ids() const {
        std::vector<SetId> ids;
        ids.reserve(sets_.size());
        for (const auto& [id, members] : sets_) ids.push_back(id);
        return ids;
    }

    // Member indices into ground(), in insertion order.
    std::span<const std::size_t> members(const SetId& id) const {
        auto it = sets_.find(id);
        if (it == sets_.end()) throw std::invalid_argument("unknown set " + id);
        return it->second;
    }

    std::vector<Key> set_keys(const SetId& id) const {
        std::vector<Key> keys;
        for (std::size_t idx : members(id)) keys.push_back(ground_[idx]);
        return keys;
    }

    double set_weight(const SetId& id) const {
        double w = 0.0;
        for (std::size_t idx : members(id)) w += ground_[idx].weight;
        return w;
    }

    std::size_t ground_size() const { return ground_.size(); }
    std::size_t set_count() const { return sets_.size(); }

private:
    std::vector<Key> ground_;
    std::unordered_map<std::uint64_t, std::size_t> by_id_;
    std::map<SetId, std::vector<std::size_t>> sets_;
};

}  // namespace coordsketch

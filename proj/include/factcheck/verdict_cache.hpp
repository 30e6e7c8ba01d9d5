#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace factcheck {

/// Bounded LRU map with per-entry time-to-live. Safe for concurrent use.
/// The clock is injectable so expiry can be tested without sleeping.
template <class Key, class Value>
class LruTtlCache {
  public:
    using Clock = std::chrono::steady_clock;
    using NowFn = std::function<Clock::time_point()>;

    explicit LruTtlCache(std::size_t capacity, NowFn now = [] { return Clock::now(); })
        : capacity_(capacity), now_(std::move(now)) {}

    /// Hit iff present and unexpired; a hit refreshes recency.
    std::optional<Value> get(const Key& key) {
        std::lock_guard lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        if (now_() >= it->second->expires) {
            order_.erase(it->second);
            map_.erase(it);
            return std::nullopt;
        }
        order_.splice(order_.begin(), order_, it->second);
        return it->second->value;
    }

    /// Inserts or overwrites; evicts the least recently used entry when full.
    void put(const Key& key, Value value, Clock::duration ttl) {
        if (capacity_ == 0) return;
        std::lock_guard lock(mu_);
        const auto expires = now_() + ttl;
        if (auto it = map_.find(key); it != map_.end()) {
            it->second->value = std::move(value);
            it->second->expires = expires;
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        if (map_.size() >= capacity_) {
            map_.erase(order_.back().key);
            order_.pop_back();
        }
        order_.push_front(Entry{key, std::move(value), expires});
        map_.emplace(key, order_.begin());
    }

    bool contains(const Key& key) const {
        std::lock_guard lock(mu_);
        return map_.count(key) > 0;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return map_.size();
    }

    std::size_t capacity() const { return capacity_; }

    void clear() {
        std::lock_guard lock(mu_);
        map_.clear();
        order_.clear();
    }

  private:
    struct Entry {
        Key key;
        Value value;
        Clock::time_point expires;
    };

    std::size_t capacity_;
    NowFn now_;
    mutable std::mutex mu_;
    std::list<Entry> order_;
    std::unordered_map<Key, typename std::list<Entry>::iterator> map_;
};

}  // namespace factcheck

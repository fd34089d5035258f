#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace abr {

/// Open-addressing hash table with linear probing over fixed-width byte
/// keys and fixed-width byte payloads. Capacity is a power of two and the
/// table doubles (and rehashes) before the load factor would exceed 1/2.
///
/// Slot order is the iteration order; it depends only on the insertion
/// sequence, so runs are reproducible.
class HashTable {
public:
    static constexpr std::size_t kInitialCapacity = 1024;

    HashTable(std::size_t key_width, std::size_t payload_width,
              std::size_t initial_capacity = kInitialCapacity);

    /// Places `key` at the first free slot of its probe sequence, or
    /// overwrites the payload if the key is already present.
    std::size_t insert(std::span<const std::byte> key, std::span<const std::byte> payload);
    std::optional<std::size_t> lookup(std::span<const std::byte> key) const;

    /// Slot of `key`, inserting it with a zeroed payload if absent. The bool
    /// is true when the key was inserted.
    std::pair<std::size_t, bool> find_or_insert(const std::byte* key);
    std::optional<std::size_t> lookup(const std::byte* key) const;

    std::byte* payload(std::size_t slot) { return &payloads_[slot * payload_width_]; }
    const std::byte* payload(std::size_t slot) const { return &payloads_[slot * payload_width_]; }
    const std::byte* key(std::size_t slot) const { return &keys_[slot * key_width_]; }
    bool occupied(std::size_t slot) const { return used_[slot] != 0; }

    std::size_t capacity() const { return used_.size(); }
    std::size_t size() const { return size_; }
    std::size_t key_width() const { return key_width_; }
    std::size_t payload_width() const { return payload_width_; }

    /// Calls f(slot) for every occupied slot in slot order.
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t s = 0; s < used_.size(); ++s) {
            if (used_[s]) f(s);
        }
    }

    /// 64-bit multiplicative mix over the key bytes, consumed as
    /// little-endian 8-byte words (the last word zero-padded).
    static std::uint64_t hash(const std::byte* key, std::size_t width);

private:
    std::size_t probe(const std::byte* key, std::uint64_t h) const;
    void grow();

    std::size_t key_width_;
    std::size_t payload_width_;
    std::size_t size_ = 0;
    std::size_t mask_;
    std::vector<std::uint8_t> used_;
    std::vector<std::byte> keys_;
    std::vector<std::byte> payloads_;
};

}  // namespace abr

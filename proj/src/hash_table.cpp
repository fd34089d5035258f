#include "abr/hash_table.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace abr {

HashTable::HashTable(std::size_t key_width, std::size_t payload_width, std::size_t initial_capacity)
    : key_width_(key_width), payload_width_(payload_width) {
    if (key_width == 0) throw std::invalid_argument("hash table key width must be positive");
    const std::size_t cap = std::bit_ceil(std::max<std::size_t>(initial_capacity, 2));
    mask_ = cap - 1;
    used_.assign(cap, 0);
    keys_.resize(cap * key_width_);
    payloads_.resize(cap * payload_width_);
}

std::uint64_t HashTable::hash(const std::byte* key, std::size_t width) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ width;
    for (std::size_t i = 0; i < width; i += 8) {
        std::uint64_t word = 0;
        std::memcpy(&word, key + i, std::min<std::size_t>(8, width - i));
        h = (h ^ word) * 0xFF51AFD7ED558CCDULL;
        h ^= h >> 32;
    }
    h ^= h >> 29;
    h *= 0xC4CEB9FE1A85EC53ULL;
    h ^= h >> 32;
    return h;
}

// First slot on the probe sequence that holds `key` or is empty.
std::size_t HashTable::probe(const std::byte* key, std::uint64_t h) const {
    std::size_t s = h & mask_;
    while (used_[s] && std::memcmp(&keys_[s * key_width_], key, key_width_) != 0) s = (s + 1) & mask_;
    return s;
}

void HashTable::grow() {
    HashTable bigger(key_width_, payload_width_, capacity() * 2);
    for_each([&](std::size_t s) {
        const std::size_t t = bigger.probe(key(s), hash(key(s), key_width_));
        bigger.used_[t] = 1;
        std::memcpy(&bigger.keys_[t * key_width_], key(s), key_width_);
        if (payload_width_ > 0) std::memcpy(bigger.payload(t), payload(s), payload_width_);
    });
    bigger.size_ = size_;
    *this = std::move(bigger);
}

std::pair<std::size_t, bool> HashTable::find_or_insert(const std::byte* key) {
    const std::uint64_t h = hash(key, key_width_);
    std::size_t s = probe(key, h);
    if (used_[s]) return {s, false};
    if ((size_ + 1) * 2 > capacity()) {
        grow();
        s = probe(key, h);
    }
    used_[s] = 1;
    std::memcpy(&keys_[s * key_width_], key, key_width_);
    ++size_;
    return {s, true};
}

std::size_t HashTable::insert(std::span<const std::byte> key, std::span<const std::byte> payload_bytes) {
    if (key.size() != key_width_ || payload_bytes.size() != payload_width_) {
        throw std::invalid_argument("hash table key/payload width mismatch");
    }
    const auto [slot, inserted] = find_or_insert(key.data());
    (void)inserted;
    if (payload_width_ > 0) std::memcpy(payload(slot), payload_bytes.data(), payload_width_);
    return slot;
}

std::optional<std::size_t> HashTable::lookup(const std::byte* key) const {
    const std::size_t s = probe(key, hash(key, key_width_));
    if (!used_[s]) return std::nullopt;
    return s;
}

std::optional<std::size_t> HashTable::lookup(std::span<const std::byte> key) const {
    if (key.size() != key_width_) throw std::invalid_argument("hash table key width mismatch");
    return lookup(key.data());
}

}  // namespace abr

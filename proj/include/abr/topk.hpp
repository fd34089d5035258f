#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "abr/query.hpp"
#include "abr/result.hpp"

namespace abr {

/// Indices of the `k` best-ranked of rows 0..n-1, in rank order.
/// `before(a, b)` must be a strict weak ordering meaning "a ranks ahead of
/// b". Bounded selection: a size-k heap whose front is the worst kept row.
template <class Before>
std::vector<std::size_t> top_k_indices(std::size_t n, std::size_t k, Before&& before) {
    std::vector<std::size_t> heap;
    if (k == 0) return heap;
    heap.reserve(std::min(n, k));
    for (std::size_t i = 0; i < n; ++i) {
        if (heap.size() < k) {
            heap.push_back(i);
            std::push_heap(heap.begin(), heap.end(), before);
        } else if (before(i, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), before);
            heap.back() = i;
            std::push_heap(heap.begin(), heap.end(), before);
        }
    }
    std::sort_heap(heap.begin(), heap.end(), before);
    return heap;
}

struct SortKey {
    std::size_t column;
    SortDirection direction = SortDirection::Asc;
};

/// Lexicographic row ranking over result columns. The comparators are
/// chosen per column type once, when the ordering is built.
class RowOrder {
public:
    RowOrder(std::span<const ColumnDef> schema, std::span<const SortKey> keys);
    RowOrder(RowOrder&&) noexcept;
    RowOrder& operator=(RowOrder&&) noexcept;
    ~RowOrder();

    bool before(const ResultTable& table, std::size_t a, std::size_t b) const;

    class ColumnComparator;

private:
    std::vector<std::unique_ptr<ColumnComparator>> comparators_;
};

/// The `k` extreme rows by `key` in `direction`; ties broken by the
/// `tie_break` columns ascending, in order. Output is sorted.
ResultTable top_k(const ResultTable& rows, std::string_view key, SortDirection direction, std::size_t k,
                  std::span<const std::size_t> tie_break);

}  // namespace abr

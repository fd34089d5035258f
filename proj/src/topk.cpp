#include "abr/topk.hpp"

#include "abr/error.hpp"

namespace abr {

class RowOrder::ColumnComparator {
public:
    virtual ~ColumnComparator() = default;
    /// <0 if row a ranks ahead of b on this column, >0 if behind, 0 if tied.
    virtual int compare(const ResultTable& t, std::size_t a, std::size_t b) const = 0;
};

namespace {

template <class T, bool Descending>
class TypedComparator final : public RowOrder::ColumnComparator {
public:
    explicit TypedComparator(std::size_t column) : column_(column) {}
    int compare(const ResultTable& t, std::size_t a, std::size_t b) const override {
        const auto& v = std::get<std::vector<T>>(t.column(column_).values);
        const int c = v[a] < v[b] ? -1 : (v[b] < v[a] ? 1 : 0);
        return Descending ? -c : c;
    }

private:
    std::size_t column_;
};

template <bool Descending>
std::unique_ptr<RowOrder::ColumnComparator> make_comparator(ColumnType type, std::size_t column) {
    switch (type) {
        case ColumnType::Float64: return std::make_unique<TypedComparator<double, Descending>>(column);
        case ColumnType::String: return std::make_unique<TypedComparator<std::string, Descending>>(column);
        default: return std::make_unique<TypedComparator<std::int32_t, Descending>>(column);
    }
}

}  // namespace

RowOrder::RowOrder(std::span<const ColumnDef> schema, std::span<const SortKey> keys) {
    for (const auto& k : keys) {
        const auto type = schema[k.column].type;
        comparators_.push_back(k.direction == SortDirection::Desc ? make_comparator<true>(type, k.column)
                                                                  : make_comparator<false>(type, k.column));
    }
}

RowOrder::RowOrder(RowOrder&&) noexcept = default;
RowOrder& RowOrder::operator=(RowOrder&&) noexcept = default;
RowOrder::~RowOrder() = default;

bool RowOrder::before(const ResultTable& table, std::size_t a, std::size_t b) const {
    for (const auto& c : comparators_) {
        const int r = c->compare(table, a, b);
        if (r != 0) return r < 0;
    }
    return false;
}

ResultTable top_k(const ResultTable& rows, std::string_view key, SortDirection direction, std::size_t k,
                  std::span<const std::size_t> tie_break) {
    const auto schema = rows.schema();
    std::vector<SortKey> keys{{rows.column_index(key), direction}};
    for (std::size_t c : tie_break) {
        if (c >= schema.size()) throw Error(ErrorCode::UnknownColumn, "tie-break column out of range");
        keys.push_back({c, SortDirection::Asc});
    }
    const RowOrder order(schema, keys);
    const auto picked = top_k_indices(rows.row_count(), k,
                                      [&](std::size_t a, std::size_t b) { return order.before(rows, a, b); });
    return gather(rows, picked);
}

}  // namespace abr

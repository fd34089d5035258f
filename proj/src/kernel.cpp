#include "abr/kernel.hpp"

#include <cstring>
#include <functional>
#include <limits>

#include <fmt/core.h>

#include "abr/error.hpp"
#include "abr/hash_table.hpp"
#include "abr/topk.hpp"

namespace abr {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint32_t kNoRow = std::numeric_limits<std::uint32_t>::max();

/// Row positions in source 0 and source 1.
struct RowCursor {
    std::uint32_t row[2] = {0, 0};
};

// ---------------------------------------------------------------------------
// Scalar evaluators

template <class T>
struct Eval {
    virtual ~Eval() = default;
    virtual T eval(const RowCursor& r) const = 0;
};

template <class T>
using EvalPtr = std::unique_ptr<const Eval<T>>;

template <class T, int Side>
struct LoadColumn final : Eval<T> {
    explicit LoadColumn(const T* d) : data(d) {}
    T eval(const RowCursor& r) const override { return data[r.row[Side]]; }
    const T* data;
};

template <int Side>
struct LoadString final : Eval<std::string_view> {
    explicit LoadString(StringColumnView c) : column(c) {}
    std::string_view eval(const RowCursor& r) const override { return column[r.row[Side]]; }
    StringColumnView column;
};

template <class T>
struct Constant final : Eval<T> {
    explicit Constant(T v) : value(std::move(v)) {}
    T eval(const RowCursor&) const override { return value; }
    T value;
};

struct StringConstant final : Eval<std::string_view> {
    explicit StringConstant(std::string v) : value(std::move(v)) {}
    std::string_view eval(const RowCursor&) const override { return value; }
    std::string value;
};

struct Widen final : Eval<double> {
    explicit Widen(EvalPtr<std::int32_t> e) : in(std::move(e)) {}
    double eval(const RowCursor& r) const override { return static_cast<double>(in->eval(r)); }
    EvalPtr<std::int32_t> in;
};

// INT32 arithmetic wraps (two's complement).
template <ArithOp Op, class T>
inline T arith(T a, T b) {
    if constexpr (std::is_same_v<T, std::int32_t>) {
        const auto ua = static_cast<std::uint32_t>(a);
        const auto ub = static_cast<std::uint32_t>(b);
        if constexpr (Op == ArithOp::Add) return static_cast<std::int32_t>(ua + ub);
        else if constexpr (Op == ArithOp::Sub) return static_cast<std::int32_t>(ua - ub);
        else return static_cast<std::int32_t>(ua * ub);
    } else {
        if constexpr (Op == ArithOp::Add) return a + b;
        else if constexpr (Op == ArithOp::Sub) return a - b;
        else return a * b;
    }
}

template <class T, ArithOp Op>
struct Arith final : Eval<T> {
    Arith(EvalPtr<T> l, EvalPtr<T> r) : lhs(std::move(l)), rhs(std::move(r)) {}
    T eval(const RowCursor& r) const override { return arith<Op>(lhs->eval(r), rhs->eval(r)); }
    EvalPtr<T> lhs, rhs;
};

template <class T, ArithOp Op>
struct ArithConstLeft final : Eval<T> {
    ArithConstLeft(T c, EvalPtr<T> r) : constant(c), rhs(std::move(r)) {}
    T eval(const RowCursor& r) const override { return arith<Op>(constant, rhs->eval(r)); }
    T constant;
    EvalPtr<T> rhs;
};

template <class T, ArithOp Op>
struct ArithConstRight final : Eval<T> {
    ArithConstRight(EvalPtr<T> l, T c) : lhs(std::move(l)), constant(c) {}
    T eval(const RowCursor& r) const override { return arith<Op>(lhs->eval(r), constant); }
    EvalPtr<T> lhs;
    T constant;
};

// ---------------------------------------------------------------------------
// Row filters

struct RowFilter {
    virtual ~RowFilter() = default;
    virtual bool test(const RowCursor& r) const = 0;
};

using FilterPtr = std::unique_ptr<const RowFilter>;

template <CompareOp Op, class V>
inline bool compare(const V& a, const V& b) {
    if constexpr (Op == CompareOp::Eq) return a == b;
    else if constexpr (Op == CompareOp::Lt) return a < b;
    else if constexpr (Op == CompareOp::Gt) return a > b;
    else if constexpr (Op == CompareOp::Le) return a <= b;
    else return a >= b;
}

template <class C, class V, CompareOp Op, int Side>
struct CompareConst final : RowFilter {
    CompareConst(const C* d, V v) : data(d), value(v) {}
    bool test(const RowCursor& r) const override {
        return compare<Op>(static_cast<V>(data[r.row[Side]]), value);
    }
    const C* data;
    V value;
};

template <class C, class V, int Side>
struct RangeConst final : RowFilter {
    RangeConst(const C* d, V l, V h) : data(d), lo(l), hi(h) {}
    bool test(const RowCursor& r) const override {
        const V x = static_cast<V>(data[r.row[Side]]);
        return lo <= x && x <= hi;
    }
    const C* data;
    V lo, hi;
};

template <CompareOp Op, int Side>
struct CompareStringConst final : RowFilter {
    CompareStringConst(StringColumnView c, std::string v) : column(c), value(std::move(v)) {}
    bool test(const RowCursor& r) const override {
        return compare<Op>(column[r.row[Side]], std::string_view(value));
    }
    StringColumnView column;
    std::string value;
};

template <int Side>
struct RangeStringConst final : RowFilter {
    RangeStringConst(StringColumnView c, std::string l, std::string h)
        : column(c), lo(std::move(l)), hi(std::move(h)) {}
    bool test(const RowCursor& r) const override {
        const std::string_view x = column[r.row[Side]];
        return std::string_view(lo) <= x && x <= std::string_view(hi);
    }
    StringColumnView column;
    std::string lo, hi;
};

struct FilterChain {
    std::vector<FilterPtr> filters;
    bool pass(const RowCursor& r) const {
        for (const auto& f : filters) {
            if (!f->test(r)) return false;
        }
        return true;
    }
};

// Loop gates: the filter chain shape is a template parameter of the loops.
struct NoGate {
    bool pass(const RowCursor&) const { return true; }
};
struct OneGate {
    const RowFilter* filter;
    bool pass(const RowCursor& r) const { return filter->test(r); }
};
struct ChainGate {
    const FilterChain* chain;
    bool pass(const RowCursor& r) const { return chain->pass(r); }
};

template <class F>
decltype(auto) with_gate(const FilterChain& chain, F&& f) {
    if (chain.filters.empty()) return f(NoGate{});
    if (chain.filters.size() == 1) return f(OneGate{chain.filters.front().get()});
    return f(ChainGate{&chain});
}

// ---------------------------------------------------------------------------
// Key encoding for hash tables

struct KeyPart {
    virtual ~KeyPart() = default;
    virtual void write(const RowCursor& r, std::byte* out) const = 0;
};

template <int Side>
struct Int32KeyPart final : KeyPart {
    Int32KeyPart(const std::int32_t* d, std::size_t o) : data(d), offset(o) {}
    void write(const RowCursor& r, std::byte* out) const override {
        std::memcpy(out + offset, &data[r.row[Side]], 4);
    }
    const std::int32_t* data;
    std::size_t offset;
};

// -0.0 is folded into +0.0 so that key equality matches numeric equality.
template <int Side>
struct Float64KeyPart final : KeyPart {
    Float64KeyPart(const double* d, std::size_t o) : data(d), offset(o) {}
    void write(const RowCursor& r, std::byte* out) const override {
        double v = data[r.row[Side]];
        if (v == 0.0) v = 0.0;
        std::memcpy(out + offset, &v, 8);
    }
    const double* data;
    std::size_t offset;
};

struct KeyEncoder {
    std::vector<std::unique_ptr<const KeyPart>> parts;
    std::vector<ColumnType> types;
    std::vector<std::size_t> offsets;
    std::size_t width = 0;

    void write(const RowCursor& r, std::byte* out) const {
        for (const auto& p : parts) p->write(r, out);
    }
};

// ---------------------------------------------------------------------------
// Compilation context

template <class F>
decltype(auto) with_side(int side, F&& f) {
    if (side == 0) return f.template operator()<0>();
    return f.template operator()<1>();
}

template <class F>
decltype(auto) with_arith(ArithOp op, F&& f) {
    switch (op) {
        case ArithOp::Add: return f.template operator()<ArithOp::Add>();
        case ArithOp::Sub: return f.template operator()<ArithOp::Sub>();
        default: return f.template operator()<ArithOp::Mul>();
    }
}

template <class F>
decltype(auto) with_compare(CompareOp op, F&& f) {
    switch (op) {
        case CompareOp::Eq: return f.template operator()<CompareOp::Eq>();
        case CompareOp::Lt: return f.template operator()<CompareOp::Lt>();
        case CompareOp::Gt: return f.template operator()<CompareOp::Gt>();
        case CompareOp::Le: return f.template operator()<CompareOp::Le>();
        default: return f.template operator()<CompareOp::Ge>();
    }
}

std::int32_t literal_i32(const ScalarExpr& e) {
    const auto& v = e.literal_value();
    if (const auto* i = std::get_if<std::int32_t>(&v)) return *i;
    if (const auto* d = std::get_if<Date>(&v)) return d->days;
    throw Error(ErrorCode::TypeMismatch, "expected an integer or date literal, got " + render_expr(e));
}

double literal_f64(const ScalarExpr& e) {
    const auto& v = e.literal_value();
    if (const auto* i = std::get_if<std::int32_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw Error(ErrorCode::TypeMismatch, "expected a numeric literal, got " + render_expr(e));
}

std::string literal_str(const ScalarExpr& e) {
    if (const auto* s = std::get_if<std::string>(&e.literal_value())) return *s;
    throw Error(ErrorCode::TypeMismatch, "expected a string literal, got " + render_expr(e));
}

class Compiler {
public:
    Compiler(const LogicalPlan& plan, const Database& db) : plan_(plan), db_(db) {}

    std::vector<BoundAccessor> accessors;

    const ColumnMeta& meta(const ScalarExpr& column) {
        const auto& table = plan_.sources.at(static_cast<std::size_t>(column.source()));
        const auto& m = db_.column(table, column.column_name());
        if (m.type != column.type()) {
            throw Error(ErrorCode::TypeMismatch,
                        fmt::format("column '{}.{}' is {} in this database, plan expects {}", table,
                                    column.column_name(), to_string(m.type), to_string(column.type())));
        }
        bool seen = false;
        for (const auto& a : accessors) seen |= a.source == column.source() && a.column == m.name;
        if (!seen) accessors.push_back({column.source(), table, m.name, m.type, m.arena_offset});
        return m;
    }

    const std::int32_t* ints(const ScalarExpr& column) {
        const auto& m = meta(column);
        const auto& table = plan_.sources[static_cast<std::size_t>(column.source())];
        return m.type == ColumnType::Date32 ? db_.date_view(table, m.name).data()
                                            : db_.int32_view(table, m.name).data();
    }
    const double* floats(const ScalarExpr& column) {
        meta(column);
        return db_.float64_view(plan_.sources[static_cast<std::size_t>(column.source())], column.column_name()).data();
    }
    StringColumnView strings(const ScalarExpr& column) {
        meta(column);
        return db_.string_column(plan_.sources[static_cast<std::size_t>(column.source())], column.column_name());
    }

    std::uint32_t rows(int source) const { return db_.row_count(plan_.sources[static_cast<std::size_t>(source)]); }

    // INT32 and DATE32 expressions.
    EvalPtr<std::int32_t> compile_i32(const ScalarExpr& e) {
        switch (e.kind()) {
            case ScalarExpr::Kind::Column: {
                const auto* data = ints(e);
                return with_side(e.source(), [&]<int S>() -> EvalPtr<std::int32_t> {
                    return std::make_unique<LoadColumn<std::int32_t, S>>(data);
                });
            }
            case ScalarExpr::Kind::Literal: return std::make_unique<Constant<std::int32_t>>(literal_i32(e));
            case ScalarExpr::Kind::Binary: return compile_arith<std::int32_t>(e);
        }
        return nullptr;
    }

    // Numeric expressions evaluated as FLOAT64; INT32 subtrees are widened
    // at their root, matching promotion of mixed operands.
    EvalPtr<double> compile_f64(const ScalarExpr& e) {
        if (e.type() != ColumnType::Float64) {
            if (e.kind() == ScalarExpr::Kind::Literal) return std::make_unique<Constant<double>>(literal_f64(e));
            return std::make_unique<Widen>(compile_i32(e));
        }
        switch (e.kind()) {
            case ScalarExpr::Kind::Column: {
                const auto* data = floats(e);
                return with_side(e.source(), [&]<int S>() -> EvalPtr<double> {
                    return std::make_unique<LoadColumn<double, S>>(data);
                });
            }
            case ScalarExpr::Kind::Literal: return std::make_unique<Constant<double>>(literal_f64(e));
            case ScalarExpr::Kind::Binary: return compile_arith<double>(e);
        }
        return nullptr;
    }

    EvalPtr<std::string_view> compile_str(const ScalarExpr& e) {
        if (e.kind() == ScalarExpr::Kind::Literal) return std::make_unique<StringConstant>(literal_str(e));
        const auto view = strings(e);
        return with_side(e.source(), [&]<int S>() -> EvalPtr<std::string_view> {
            return std::make_unique<LoadString<S>>(view);
        });
    }

    FilterPtr compile_filter(const Filter& f) {
        const auto& col = f.column;
        if (col.type() == ColumnType::String) {
            const auto view = strings(col);
            return with_side(col.source(), [&]<int S>() -> FilterPtr {
                if (f.op == CompareOp::Between) {
                    return std::make_unique<RangeStringConst<S>>(view, literal_str(f.value), literal_str(*f.high));
                }
                return with_compare(f.op, [&]<CompareOp Op>() -> FilterPtr {
                    return std::make_unique<CompareStringConst<Op, S>>(view, literal_str(f.value));
                });
            });
        }
        const bool float_domain = col.type() == ColumnType::Float64 || f.value.type() == ColumnType::Float64 ||
                                  (f.high && f.high->type() == ColumnType::Float64);
        return with_side(col.source(), [&]<int S>() -> FilterPtr {
            if (col.type() == ColumnType::Float64) return numeric_filter<double, double, S>(f, floats(col));
            const auto* data = ints(col);
            if (float_domain) return numeric_filter<std::int32_t, double, S>(f, data);
            return numeric_filter<std::int32_t, std::int32_t, S>(f, data);
        });
    }

    FilterChain compile_filters(int source) {
        FilterChain chain;
        for (const auto& f : plan_.filters) {
            if (f.column.source() == source) chain.filters.push_back(compile_filter(f));
        }
        return chain;
    }

    KeyEncoder compile_keys(const std::vector<ScalarExpr>& keys) {
        KeyEncoder enc;
        for (const auto& k : keys) {
            enc.types.push_back(k.type());
            enc.offsets.push_back(enc.width);
            if (k.type() == ColumnType::Float64) {
                const auto* data = floats(k);
                const std::size_t offset = enc.width;
                enc.parts.push_back(with_side(k.source(), [&]<int S>() -> std::unique_ptr<const KeyPart> {
                    return std::make_unique<Float64KeyPart<S>>(data, offset);
                }));
            } else {
                const auto* data = ints(k);
                const std::size_t offset = enc.width;
                enc.parts.push_back(with_side(k.source(), [&]<int S>() -> std::unique_ptr<const KeyPart> {
                    return std::make_unique<Int32KeyPart<S>>(data, offset);
                }));
            }
            enc.width += element_width(k.type());
        }
        return enc;
    }

private:
    template <class T>
    EvalPtr<T> compile_child(const ScalarExpr& e) {
        if constexpr (std::is_same_v<T, double>) return compile_f64(e);
        else return compile_i32(e);
    }

    template <class T>
    T literal_as(const ScalarExpr& e) {
        if constexpr (std::is_same_v<T, double>) return literal_f64(e);
        else return literal_i32(e);
    }

    template <class T>
    EvalPtr<T> compile_arith(const ScalarExpr& e) {
        const bool lconst = e.lhs().kind() == ScalarExpr::Kind::Literal;
        const bool rconst = e.rhs().kind() == ScalarExpr::Kind::Literal;
        return with_arith(e.op(), [&]<ArithOp Op>() -> EvalPtr<T> {
            if (lconst && rconst) {
                return std::make_unique<Constant<T>>(arith<Op>(literal_as<T>(e.lhs()), literal_as<T>(e.rhs())));
            }
            if (rconst) return std::make_unique<ArithConstRight<T, Op>>(compile_child<T>(e.lhs()), literal_as<T>(e.rhs()));
            if (lconst) return std::make_unique<ArithConstLeft<T, Op>>(literal_as<T>(e.lhs()), compile_child<T>(e.rhs()));
            return std::make_unique<Arith<T, Op>>(compile_child<T>(e.lhs()), compile_child<T>(e.rhs()));
        });
    }

    template <class C, class V, int S>
    FilterPtr numeric_filter(const Filter& f, const C* data) {
        auto value_of = [](const ScalarExpr& e) -> V {
            if constexpr (std::is_same_v<V, double>) return literal_f64(e);
            else return literal_i32(e);
        };
        if (f.op == CompareOp::Between) {
            return std::make_unique<RangeConst<C, V, S>>(data, value_of(f.value), value_of(*f.high));
        }
        return with_compare(f.op, [&]<CompareOp Op>() -> FilterPtr {
            return std::make_unique<CompareConst<C, V, Op, S>>(data, value_of(f.value));
        });
    }

    const LogicalPlan& plan_;
    const Database& db_;
};

// ---------------------------------------------------------------------------
// Aggregation state and output assembly

struct AggState {
    std::vector<std::int64_t> counts;             // per group
    std::vector<std::vector<double>> sums;        // per SUM/AVG aggregate, per group
    std::vector<std::byte> keys;                  // per group, key_width bytes each
};

/// Compiled description of an aggregated plan's output.
struct AggLayout {
    std::vector<Aggregate> aggregates;
    std::vector<std::size_t> sum_slot;  // aggregate -> index into AggState::sums
    std::vector<EvalPtr<double>> inputs;  // per SUM/AVG aggregate
    std::vector<ColumnType> key_types;
    std::vector<std::size_t> key_offsets;
    std::size_t key_width = 0;
    bool global = true;

    std::vector<ColumnDef> group_schema() const {
        std::vector<ColumnDef> schema;
        for (std::size_t k = 0; k < key_types.size(); ++k) schema.push_back({fmt::format("k{}", k), key_types[k]});
        for (std::size_t a = 0; a < aggregates.size(); ++a) schema.push_back({fmt::format("a{}", a), aggregates[a].type});
        return schema;
    }

    void add_group(AggState& st) const {
        st.counts.push_back(0);
        for (auto& s : st.sums) s.push_back(0.0);
    }

    AggState begin() const {
        AggState st;
        st.sums.resize(inputs.size());
        if (global) add_group(st);
        return st;
    }

    void update(AggState& st, std::size_t group, const RowCursor& r) const {
        ++st.counts[group];
        for (std::size_t i = 0; i < inputs.size(); ++i) st.sums[i][group] += inputs[i]->eval(r);
    }

    /// Group table: key columns k0.. then aggregate columns a0.., one row per
    /// group in `order`.
    ResultTable finish(const AggState& st, std::span<const std::uint32_t> order) const {
        const auto schema = group_schema();
        ResultTable out(schema);
        for (std::size_t k = 0; k < key_types.size(); ++k) {
            if (key_types[k] == ColumnType::Float64) {
                auto& col = out.floats(k);
                for (auto g : order) {
                    double v;
                    std::memcpy(&v, &st.keys[g * key_width + key_offsets[k]], 8);
                    col.push_back(v);
                }
            } else {
                auto& col = out.ints(k);
                for (auto g : order) {
                    std::int32_t v;
                    std::memcpy(&v, &st.keys[g * key_width + key_offsets[k]], 4);
                    col.push_back(v);
                }
            }
        }
        const std::size_t nk = key_types.size();
        for (std::size_t a = 0; a < aggregates.size(); ++a) {
            switch (aggregates[a].func) {
                case AggFunc::Count: {
                    auto& col = out.ints(nk + a);
                    for (auto g : order) {
                        if (st.counts[g] > std::numeric_limits<std::int32_t>::max()) {
                            throw Error(ErrorCode::Overflow, "COUNT exceeds INT32 range");
                        }
                        col.push_back(static_cast<std::int32_t>(st.counts[g]));
                    }
                    break;
                }
                case AggFunc::Sum: {
                    auto& col = out.floats(nk + a);
                    for (auto g : order) col.push_back(st.sums[sum_slot[a]][g]);
                    break;
                }
                case AggFunc::Avg: {
                    auto& col = out.floats(nk + a);
                    for (auto g : order) {
                        if (st.counts[g] == 0) {
                            throw Error(ErrorCode::EmptyAggregate,
                                        fmt::format("AVG '{}' over zero rows", aggregates[a].alias));
                        }
                        col.push_back(st.sums[sum_slot[a]][g] / static_cast<double>(st.counts[g]));
                    }
                    break;
                }
            }
        }
        return out;
    }
};

// Sinks consume qualifying (joined) rows. Each has a per-execution State.

struct CountSink {
    const AggLayout* layout;
    using State = AggState;
    State begin() const { return layout->begin(); }
    void accept(State& st, const RowCursor&) const { ++st.counts[0]; }
    ResultTable finish(State& st) const {
        const std::uint32_t only = 0;
        return layout->finish(st, std::span(&only, 1));
    }
};

struct GlobalAggSink {
    const AggLayout* layout;
    using State = AggState;
    State begin() const { return layout->begin(); }
    void accept(State& st, const RowCursor& r) const { layout->update(st, 0, r); }
    ResultTable finish(State& st) const {
        const std::uint32_t only = 0;
        return layout->finish(st, std::span(&only, 1));
    }
};

struct GroupSink {
    const AggLayout* layout;
    const KeyEncoder* keys;

    struct State {
        AggState agg;
        HashTable table;
        std::vector<std::byte> scratch;
    };

    State begin() const {
        return State{layout->begin(), HashTable(keys->width, sizeof(std::uint32_t)),
                     std::vector<std::byte>(keys->width)};
    }

    void accept(State& st, const RowCursor& r) const {
        std::byte* key = st.scratch.data();
        keys->write(r, key);
        const auto [slot, inserted] = st.table.find_or_insert(key);
        std::uint32_t group;
        if (inserted) {
            group = static_cast<std::uint32_t>(st.agg.counts.size());
            std::memcpy(st.table.payload(slot), &group, sizeof group);
            layout->add_group(st.agg);
            st.agg.keys.insert(st.agg.keys.end(), key, key + keys->width);
        } else {
            std::memcpy(&group, st.table.payload(slot), sizeof group);
        }
        layout->update(st.agg, group, r);
    }

    // Second pass: walk the hash table in slot order to emit the groups.
    ResultTable finish(State& st) const {
        std::vector<std::uint32_t> order;
        order.reserve(st.table.size());
        st.table.for_each([&](std::size_t slot) {
            std::uint32_t group;
            std::memcpy(&group, st.table.payload(slot), sizeof group);
            order.push_back(group);
        });
        return layout->finish(st.agg, order);
    }
};

struct OutputWriter {
    virtual ~OutputWriter() = default;
    virtual void write(const RowCursor& r, void* column) const = 0;
};

template <class T, class E>
struct ValueWriter final : OutputWriter {
    explicit ValueWriter(EvalPtr<E> e) : expr(std::move(e)) {}
    void write(const RowCursor& r, void* column) const override {
        static_cast<std::vector<T>*>(column)->emplace_back(expr->eval(r));
    }
    EvalPtr<E> expr;
};

struct ProjectSink {
    const std::vector<std::unique_ptr<const OutputWriter>>* writers;
    const std::vector<ColumnDef>* schema;

    struct State {
        ResultTable out;
        std::vector<void*> columns;
    };

    State begin() const {
        State st{ResultTable(*schema), {}};
        for (std::size_t c = 0; c < st.out.column_count(); ++c) {
            st.columns.push_back(std::visit([](auto& v) -> void* { return &v; }, st.out.column(c).values));
        }
        return st;
    }

    void accept(State& st, const RowCursor& r) const {
        for (std::size_t i = 0; i < writers->size(); ++i) (*writers)[i]->write(r, st.columns[i]);
    }

    ResultTable finish(State& st) const { return std::move(st.out); }
};

// ---------------------------------------------------------------------------
// Loop templates

template <class Gate, class Sink>
ResultTable run_scan(std::uint32_t rows, const Gate& gate, const Sink& sink) {
    auto st = sink.begin();
    RowCursor r;
    for (std::uint32_t i = 0; i < rows; ++i) {
        r.row[0] = i;
        if (gate.pass(r)) sink.accept(st, r);
    }
    return sink.finish(st);
}

struct JoinSpec {
    int build = 0;
    int probe = 1;
    std::uint32_t build_rows = 0;
    std::uint32_t probe_rows = 0;
    KeyEncoder build_key;
    KeyEncoder probe_key;
    FilterChain build_filters;
    FilterChain probe_filters;
};

// Build: hash the build relation's keys; rows sharing a key are chained
// through `next`. Probe: scan the other relation and walk the chain of each
// matching key.
template <class BuildGate, class ProbeGate, class Sink>
ResultTable run_join(const JoinSpec& j, const BuildGate& bgate, const ProbeGate& pgate, const Sink& sink) {
    HashTable table(j.build_key.width, sizeof(std::uint32_t));
    std::vector<std::uint32_t> next(j.build_rows, kNoRow);
    std::byte key[8];
    RowCursor r;
    for (std::uint32_t b = 0; b < j.build_rows; ++b) {
        r.row[j.build] = b;
        if (!bgate.pass(r)) continue;
        j.build_key.write(r, key);
        const auto [slot, inserted] = table.find_or_insert(key);
        if (!inserted) std::memcpy(&next[b], table.payload(slot), sizeof(std::uint32_t));
        std::memcpy(table.payload(slot), &b, sizeof b);
    }

    auto st = sink.begin();
    for (std::uint32_t p = 0; p < j.probe_rows; ++p) {
        r.row[j.probe] = p;
        if (!pgate.pass(r)) continue;
        j.probe_key.write(r, key);
        const auto slot = table.lookup(key);
        if (!slot) continue;
        std::uint32_t b;
        std::memcpy(&b, table.payload(*slot), sizeof b);
        for (; b != kNoRow; b = next[b]) {
            r.row[j.build] = b;
            sink.accept(st, r);
        }
    }
    return sink.finish(st);
}

}  // namespace

// ---------------------------------------------------------------------------

struct ExecutableKernel::Impl {
    PlanClass plan_class = PlanClass::Filter;
    std::chrono::nanoseconds compile_time{0};
    std::uint64_t db_id = 0;
    std::vector<BoundAccessor> accessors;
    std::vector<AggFunc> accumulators;
    std::size_t group_key_width = 0;
    std::optional<int> build_source;
    std::string template_name;

    // Owned compiled pieces referenced by the body.
    FilterChain scan_filters;
    JoinSpec join;
    KeyEncoder group_keys;
    AggLayout layout;
    std::vector<std::unique_ptr<const OutputWriter>> writers;
    std::vector<ColumnDef> row_schema;

    std::function<ResultTable()> body;
    std::function<ResultTable(ResultTable)> finisher;
};

namespace {

template <class Sink>
std::function<ResultTable()> make_body(ExecutableKernel::Impl& k, bool joined, std::uint32_t scan_rows, Sink sink) {
    if (!joined) {
        return with_gate(k.scan_filters, [&](auto gate) -> std::function<ResultTable()> {
            return [scan_rows, gate, sink]() { return run_scan(scan_rows, gate, sink); };
        });
    }
    const JoinSpec* j = &k.join;
    return with_gate(j->build_filters, [&](auto bgate) -> std::function<ResultTable()> {
        return with_gate(j->probe_filters, [&](auto pgate) -> std::function<ResultTable()> {
            return [j, bgate, pgate, sink]() { return run_join(*j, bgate, pgate, sink); };
        });
    });
}

}  // namespace

ExecutableKernel compile(const LogicalPlan& plan, const Database& db) {
    const auto start = Clock::now();
    if (!db.sealed()) throw Error(ErrorCode::NotSealed, "kernels can only be compiled against a sealed database");
    for (const auto& s : plan.sources) {
        if (!db.has_table(s)) throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", s));
    }

    auto k = std::make_unique<ExecutableKernel::Impl>();
    k->plan_class = plan.plan_class;
    k->db_id = db.instance_id();
    Compiler c(plan, db);

    const bool joined = plan.joined();
    std::uint32_t scan_rows = 0;
    if (joined) {
        auto& j = k->join;
        const auto rows0 = db.row_count(plan.sources[0]);
        const auto rows1 = db.row_count(plan.sources[1]);
        if (rows0 != rows1) j.build = rows0 < rows1 ? 0 : 1;
        else j.build = db.catalog_position(plan.sources[0]) < db.catalog_position(plan.sources[1]) ? 0 : 1;
        j.probe = 1 - j.build;
        j.build_rows = j.build == 0 ? rows0 : rows1;
        j.probe_rows = j.build == 0 ? rows1 : rows0;
        const auto& jk = *plan.join_key;
        const auto& build_col = jk.left.source() == j.build ? jk.left : jk.right;
        const auto& probe_col = jk.left.source() == j.build ? jk.right : jk.left;
        j.build_key = c.compile_keys({build_col});
        j.probe_key = c.compile_keys({probe_col});
        j.build_filters = c.compile_filters(j.build);
        j.probe_filters = c.compile_filters(j.probe);
        k->build_source = j.build;
    } else {
        scan_rows = c.rows(0);
        k->scan_filters = c.compile_filters(0);
    }

    if (plan.aggregated()) {
        auto& layout = k->layout;
        layout.aggregates = plan.aggregates;
        layout.global = !plan.grouped();
        for (const auto& a : plan.aggregates) {
            k->accumulators.push_back(a.func);
            if (a.func == AggFunc::Count) {
                layout.sum_slot.push_back(0);
                continue;
            }
            layout.sum_slot.push_back(layout.inputs.size());
            layout.inputs.push_back(c.compile_f64(*a.expr));
        }
        if (plan.grouped()) {
            k->group_keys = c.compile_keys(plan.group_keys);
            layout.key_types = k->group_keys.types;
            layout.key_offsets = k->group_keys.offsets;
            layout.key_width = k->group_keys.width;
            k->group_key_width = layout.key_width;
            k->body = make_body(*k, joined, scan_rows, GroupSink{&layout, &k->group_keys});
            k->template_name = joined ? "hash-join probe into hash aggregation" : "hash aggregation";
        } else if (layout.inputs.empty()) {
            k->body = make_body(*k, joined, scan_rows, CountSink{&layout});
            k->template_name = joined ? "hash join + count" : "filtered count";
        } else {
            k->body = make_body(*k, joined, scan_rows, GlobalAggSink{&layout});
            k->template_name = joined ? "hash join + aggregate" : "filtered aggregate";
        }

        // Order the group table, then pick the output columns from it.
        const std::size_t nk = plan.group_keys.size();
        std::vector<std::size_t> pick;
        for (const auto& p : plan.projections) pick.push_back(p.kind == OutputKind::GroupKey ? p.index : nk + p.index);
        std::vector<ColumnDef> out_schema;
        for (const auto& p : plan.projections) out_schema.push_back({p.name, p.type});
        std::optional<RowOrder> order;
        std::size_t limit = std::numeric_limits<std::size_t>::max();
        if (plan.order_by && plan.grouped()) {
            std::vector<SortKey> keys{{pick[plan.order_by->output], plan.order_by->direction}};
            for (std::size_t i = 0; i < nk; ++i) keys.push_back({i, SortDirection::Asc});
            const auto schema = layout.group_schema();
            order.emplace(schema, keys);
            if (plan.limit) limit = static_cast<std::size_t>(*plan.limit);
        }
        k->finisher = [order = std::make_shared<std::optional<RowOrder>>(std::move(order)), limit, pick,
                       out_schema](ResultTable groups) {
            std::vector<std::size_t> rows;
            if (order->has_value()) {
                rows = top_k_indices(groups.row_count(), limit, [&](std::size_t a, std::size_t b) {
                    return (*order)->before(groups, a, b);
                });
            }
            ResultTable picked = order->has_value() ? gather(groups, rows) : std::move(groups);
            ResultTable result(out_schema);
            for (std::size_t i = 0; i < pick.size(); ++i) result.column(i).values = picked.column(pick[i]).values;
            return result;
        };
    } else {
        for (const auto& p : plan.projections) {
            k->row_schema.push_back({p.name, p.type});
            switch (p.type) {
                case ColumnType::Float64:
                    k->writers.push_back(std::make_unique<ValueWriter<double, double>>(c.compile_f64(p.expr)));
                    break;
                case ColumnType::String:
                    k->writers.push_back(
                        std::make_unique<ValueWriter<std::string, std::string_view>>(c.compile_str(p.expr)));
                    break;
                default:
                    k->writers.push_back(
                        std::make_unique<ValueWriter<std::int32_t, std::int32_t>>(c.compile_i32(p.expr)));
                    break;
            }
        }
        k->body = make_body(*k, joined, scan_rows, ProjectSink{&k->writers, &k->row_schema});
        k->template_name = joined ? "hash join + projection" : "filtered projection";
        if (plan.order_by) {
            std::vector<SortKey> keys{{plan.order_by->output, plan.order_by->direction}};
            for (std::size_t i = 0; i < plan.projections.size(); ++i) keys.push_back({i, SortDirection::Asc});
            auto order = std::make_shared<RowOrder>(k->row_schema, keys);
            const auto limit = static_cast<std::size_t>(*plan.limit);
            k->finisher = [order, limit](ResultTable rows) {
                const auto picked = top_k_indices(rows.row_count(), limit, [&](std::size_t a, std::size_t b) {
                    return order->before(rows, a, b);
                });
                return gather(rows, picked);
            };
            k->template_name += " + top-k";
        }
    }
    if (plan.order_by && plan.grouped()) k->template_name += plan.limit ? " + top-k" : " + sort";

    k->accessors = std::move(c.accessors);
    k->compile_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return ExecutableKernel(std::move(k));
}

ExecutableKernel::ExecutableKernel(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ExecutableKernel::ExecutableKernel(ExecutableKernel&&) noexcept = default;
ExecutableKernel& ExecutableKernel::operator=(ExecutableKernel&&) noexcept = default;
ExecutableKernel::~ExecutableKernel() = default;

PlanClass ExecutableKernel::plan_class() const { return impl_->plan_class; }
std::chrono::nanoseconds ExecutableKernel::compile_time() const { return impl_->compile_time; }
const std::vector<BoundAccessor>& ExecutableKernel::accessors() const { return impl_->accessors; }
const std::vector<AggFunc>& ExecutableKernel::accumulators() const { return impl_->accumulators; }
std::size_t ExecutableKernel::group_key_width() const { return impl_->group_key_width; }
std::optional<int> ExecutableKernel::build_source() const { return impl_->build_source; }

std::string ExecutableKernel::describe() const {
    return fmt::format("{}: {}, {} column(s), {} accumulator(s)", to_string(impl_->plan_class),
                       impl_->template_name, impl_->accessors.size(), impl_->accumulators.size());
}

ExecutionResult ExecutableKernel::execute(const Database& db) const {
    if (db.instance_id() != impl_->db_id) {
        throw Error(ErrorCode::KernelMismatch, "kernel was compiled against a different database");
    }
    const auto start = Clock::now();
    ResultTable table = impl_->body();
    if (impl_->finisher) table = impl_->finisher(std::move(table));
    return {std::move(table), std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start)};
}

}  // namespace abr

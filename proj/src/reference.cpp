#include "abr/reference.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {

std::string_view to_string(JoinMode mode) {
    switch (mode) {
        case JoinMode::Auto: return "auto";
        case JoinMode::NestedLoop: return "nested-loop";
        case JoinMode::Hash: return "hash";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

std::string tag_name(const DynValue& v) { return std::string(to_string(type_of(v))); }

DynValue literal_value(const Literal& lit) {
    return std::visit(
        [](const auto& v) -> DynValue {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DateText>) return parse_date(v.text);
            else return v;
        },
        lit);
}

DynValue apply(ArithOp op, const DynValue& a, const DynValue& b) {
    const auto* ia = std::get_if<std::int32_t>(&a);
    const auto* ib = std::get_if<std::int32_t>(&b);
    if (ia && ib) {
        const auto x = static_cast<std::int64_t>(*ia);
        const auto y = static_cast<std::int64_t>(*ib);
        std::int64_t r = op == ArithOp::Add ? x + y : op == ArithOp::Sub ? x - y : x * y;
        // Keep the low 32 bits.
        return static_cast<std::int32_t>(static_cast<std::uint32_t>(static_cast<std::uint64_t>(r)));
    }
    auto as_double = [](const DynValue& v) -> std::optional<double> {
        if (const auto* i = std::get_if<std::int32_t>(&v)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        return std::nullopt;
    };
    const auto da = as_double(a);
    const auto db = as_double(b);
    if (!da || !db) {
        throw Error(ErrorCode::TypeMismatch,
                    fmt::format("{} on {} and {}", to_string(op), tag_name(a), tag_name(b)));
    }
    switch (op) {
        case ArithOp::Add: return *da + *db;
        case ArithOp::Sub: return *da - *db;
        case ArithOp::Mul: return *da * *db;
    }
    return {};
}

/// Three-way comparison with numeric promotion.
int compare_values(const DynValue& a, const DynValue& b) {
    if (a.index() == b.index()) {
        if (a < b) return -1;
        if (b < a) return 1;
        return 0;
    }
    const bool na = std::holds_alternative<std::int32_t>(a) || std::holds_alternative<double>(a);
    const bool nb = std::holds_alternative<std::int32_t>(b) || std::holds_alternative<double>(b);
    if (!na || !nb) {
        throw Error(ErrorCode::TypeMismatch, fmt::format("cannot compare {} with {}", tag_name(a), tag_name(b)));
    }
    const double x = std::holds_alternative<double>(a) ? std::get<double>(a) : std::get<std::int32_t>(a);
    const double y = std::holds_alternative<double>(b) ? std::get<double>(b) : std::get<std::int32_t>(b);
    return x < y ? -1 : (y < x ? 1 : 0);
}

bool holds(CompareOp op, int cmp) {
    switch (op) {
        case CompareOp::Eq: return cmp == 0;
        case CompareOp::Lt: return cmp < 0;
        case CompareOp::Gt: return cmp > 0;
        case CompareOp::Le: return cmp <= 0;
        case CompareOp::Ge: return cmp >= 0;
        case CompareOp::Between: break;
    }
    return false;
}

/// A column of one source. Values are produced through a tag switch on
/// every access.
struct ColumnHandle {
    int source;
    std::string name;
    ColumnType type;
    const void* data = nullptr;
    StringColumnView strings{{}, {}, 0};

    DynValue get(std::uint32_t row) const {
        switch (type) {
            case ColumnType::Int32: return static_cast<const std::int32_t*>(data)[row];
            case ColumnType::Date32: return Date{static_cast<const std::int32_t*>(data)[row]};
            case ColumnType::Float64: return static_cast<const double*>(data)[row];
            case ColumnType::String: return std::string(strings[row]);
        }
        return {};
    }
};

class Evaluator {
public:
    Evaluator(const LogicalPlan& plan, const Database& db) : plan_(plan), db_(db) {
        if (!db.sealed()) throw Error(ErrorCode::NotSealed, "database must be sealed");
        for (const auto& s : plan.sources) {
            if (!db.has_table(s)) throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", s));
        }
        context_ = [this](const ScalarExpr& column) { return lookup(column); };
    }

    std::uint32_t rows(int source) const { return db_.row_count(plan_.sources[static_cast<std::size_t>(source)]); }

    void register_columns(const ScalarExpr& e) {
        switch (e.kind()) {
            case ScalarExpr::Kind::Column: handle(e); break;
            case ScalarExpr::Kind::Literal: break;
            case ScalarExpr::Kind::Binary:
                register_columns(e.lhs());
                register_columns(e.rhs());
                break;
        }
    }

    DynValue eval(const ScalarExpr& e) const { return eval_scalar(e, context_); }

    bool passes(const Filter& f) const {
        const DynValue v = eval(f.column);
        if (f.op == CompareOp::Between) {
            return compare_values(v, eval(f.value)) >= 0 && compare_values(v, eval(*f.high)) <= 0;
        }
        return holds(f.op, compare_values(v, eval(f.value)));
    }

    bool passes_source(int source) const {
        for (const auto& f : plan_.filters) {
            if (f.column.source() == source && !passes(f)) return false;
        }
        return true;
    }

    std::uint32_t cursor[2] = {0, 0};

private:
    const ColumnHandle& handle(const ScalarExpr& column) {
        for (const auto& h : handles_) {
            if (h.source == column.source() && h.name == column.column_name()) return h;
        }
        const auto& table = plan_.sources.at(static_cast<std::size_t>(column.source()));
        const auto& meta = db_.column(table, column.column_name());
        ColumnHandle h{column.source(), meta.name, meta.type};
        if (meta.type != column.type()) {
            throw Error(ErrorCode::TypeMismatch, fmt::format("column '{}.{}' changed type", table, meta.name));
        }
        switch (meta.type) {
            case ColumnType::Int32: h.data = db_.int32_view(table, meta.name).data(); break;
            case ColumnType::Date32: h.data = db_.date_view(table, meta.name).data(); break;
            case ColumnType::Float64: h.data = db_.float64_view(table, meta.name).data(); break;
            case ColumnType::String: h.strings = db_.string_column(table, meta.name); break;
        }
        handles_.push_back(std::move(h));
        return handles_.back();
    }

    DynValue lookup(const ScalarExpr& column) const {
        for (const auto& h : handles_) {
            if (h.source == column.source() && h.name == column.column_name()) {
                return h.get(cursor[h.source]);
            }
        }
        throw Error(ErrorCode::UnknownColumn, fmt::format("unresolved column '{}'", column.column_name()));
    }

    const LogicalPlan& plan_;
    const Database& db_;
    std::vector<ColumnHandle> handles_;
    RowContext context_;
};

struct Accumulator {
    std::int64_t count = 0;
    std::vector<double> sums;
};

struct Aggregation {
    const LogicalPlan& plan;
    Evaluator& ev;

    void update(Accumulator& acc) const {
        ++acc.count;
        acc.sums.resize(plan.aggregates.size(), 0.0);
        for (std::size_t i = 0; i < plan.aggregates.size(); ++i) {
            const auto& a = plan.aggregates[i];
            if (a.func == AggFunc::Count) continue;
            const DynValue v = ev.eval(*a.expr);
            if (const auto* d = std::get_if<double>(&v)) acc.sums[i] += *d;
            else if (const auto* n = std::get_if<std::int32_t>(&v)) acc.sums[i] += static_cast<double>(*n);
            else throw Error(ErrorCode::TypeMismatch, fmt::format("{} over {}", to_string(a.func), tag_name(v)));
        }
    }

    DynValue value(const Accumulator& acc, std::size_t i) const {
        const auto& a = plan.aggregates[i];
        switch (a.func) {
            case AggFunc::Count:
                if (acc.count > std::numeric_limits<std::int32_t>::max()) {
                    throw Error(ErrorCode::Overflow, "COUNT exceeds INT32 range");
                }
                return static_cast<std::int32_t>(acc.count);
            case AggFunc::Sum: return acc.sums.empty() ? 0.0 : acc.sums[i];
            case AggFunc::Avg:
                if (acc.count == 0) throw Error(ErrorCode::EmptyAggregate, fmt::format("AVG '{}' over zero rows", a.alias));
                return acc.sums[i] / static_cast<double>(acc.count);
        }
        return {};
    }
};

/// Calls `emit()` once per qualifying row (or joined pair), with the
/// evaluator cursor positioned on it. Pairs come out ordered by source 0
/// row, then source 1 row, in both join modes.
template <class Emit>
void for_each_row(const LogicalPlan& plan, Evaluator& ev, const ReferenceOptions& options, ReferenceStats& stats,
                  Emit&& emit) {
    if (!plan.joined()) {
        const auto n = ev.rows(0);
        for (std::uint32_t i = 0; i < n; ++i) {
            ev.cursor[0] = i;
            ++stats.rows_scanned;
            if (ev.passes_source(0)) emit();
        }
        return;
    }
    const auto n0 = ev.rows(0);
    const auto n1 = ev.rows(1);
    const auto& key0 = plan.join_key->left.source() == 0 ? plan.join_key->left : plan.join_key->right;
    const auto& key1 = plan.join_key->left.source() == 0 ? plan.join_key->right : plan.join_key->left;

    JoinMode mode = options.join_mode;
    if (mode == JoinMode::Auto) {
        mode = n0 <= options.nested_loop_limit && n1 <= options.nested_loop_limit ? JoinMode::NestedLoop
                                                                                  : JoinMode::Hash;
    }
    stats.join_mode = mode;

    std::vector<std::uint32_t> right;
    for (std::uint32_t j = 0; j < n1; ++j) {
        ev.cursor[1] = j;
        ++stats.rows_scanned;
        if (ev.passes_source(1)) right.push_back(j);
    }

    if (mode == JoinMode::NestedLoop) {
        for (std::uint32_t i = 0; i < n0; ++i) {
            ev.cursor[0] = i;
            ++stats.rows_scanned;
            if (!ev.passes_source(0)) continue;
            const DynValue k0 = ev.eval(key0);
            for (auto j : right) {
                ev.cursor[1] = j;
                if (compare_values(k0, ev.eval(key1)) == 0) {
                    ++stats.join_matches;
                    emit();
                }
            }
        }
        return;
    }

    // Join keys are INT32 or DATE32 (or FLOAT64); promote to double so that
    // mixed numeric keys compare the same way as in the nested loop.
    auto key_of = [](const DynValue& v) -> double {
        if (const auto* i = std::get_if<std::int32_t>(&v)) return *i;
        if (const auto* d = std::get_if<Date>(&v)) return d->days;
        const double x = std::get<double>(v);
        return x == 0.0 ? 0.0 : x;
    };
    std::multimap<double, std::uint32_t> index;
    for (auto j : right) {
        ev.cursor[1] = j;
        index.emplace(key_of(ev.eval(key1)), j);
    }
    for (std::uint32_t i = 0; i < n0; ++i) {
        ev.cursor[0] = i;
        ++stats.rows_scanned;
        if (!ev.passes_source(0)) continue;
        const auto [lo, hi] = index.equal_range(key_of(ev.eval(key0)));
        for (auto it = lo; it != hi; ++it) {
            ev.cursor[1] = it->second;
            ++stats.join_matches;
            emit();
        }
    }
}

ResultTable output_table(const LogicalPlan& plan, const std::vector<std::vector<DynValue>>& rows) {
    std::vector<ColumnDef> schema;
    for (const auto& p : plan.projections) schema.push_back({p.name, p.type});
    ResultTable out(schema);
    for (const auto& r : rows) out.append_row(r);
    return out;
}

void sort_rows(const LogicalPlan& plan, std::vector<std::vector<DynValue>>& rows, bool all_columns) {
    const auto key = plan.order_by->output;
    const bool desc = plan.order_by->direction == SortDirection::Desc;
    std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        const int c = compare_values(a[key], b[key]);
        if (c != 0) return desc ? c > 0 : c < 0;
        if (!all_columns) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const int ci = compare_values(a[i], b[i]);
            if (ci != 0) return ci < 0;
        }
        return false;
    });
    if (plan.limit && rows.size() > static_cast<std::size_t>(*plan.limit)) {
        rows.resize(static_cast<std::size_t>(*plan.limit));
    }
}

}  // namespace

DynValue eval_scalar(const ScalarExpr& expr, const RowContext& row) {
    switch (expr.kind()) {
        case ScalarExpr::Kind::Literal: return literal_value(expr.literal_value());
        case ScalarExpr::Kind::Column:
            if (!row) throw Error(ErrorCode::UnknownColumn, fmt::format("no row to read '{}' from", expr.column_name()));
            return row(expr);
        case ScalarExpr::Kind::Binary: return apply(expr.op(), eval_scalar(expr.lhs(), row), eval_scalar(expr.rhs(), row));
    }
    return {};
}

ReferenceResult eval_plan(const LogicalPlan& plan, const Database& db, const ReferenceOptions& options) {
    const auto start = Clock::now();
    Evaluator ev(plan, db);
    for (const auto& f : plan.filters) {
        ev.register_columns(f.column);
    }
    if (plan.join_key) {
        ev.register_columns(plan.join_key->left);
        ev.register_columns(plan.join_key->right);
    }
    for (const auto& k : plan.group_keys) ev.register_columns(k);
    for (const auto& a : plan.aggregates) {
        if (a.expr) ev.register_columns(*a.expr);
    }
    if (!plan.aggregated()) {
        for (const auto& p : plan.projections) ev.register_columns(p.expr);
    }

    ReferenceResult result;
    std::vector<std::vector<DynValue>> rows;

    if (!plan.aggregated()) {
        for_each_row(plan, ev, options, result.stats, [&] {
            std::vector<DynValue> r;
            for (const auto& p : plan.projections) r.push_back(ev.eval(p.expr));
            rows.push_back(std::move(r));
        });
        if (plan.order_by) sort_rows(plan, rows, true);
    } else {
        Aggregation agg{plan, ev};
        std::map<std::vector<DynValue>, Accumulator> groups;
        if (!plan.grouped()) groups[{}];
        for_each_row(plan, ev, options, result.stats, [&] {
            std::vector<DynValue> key;
            for (const auto& k : plan.group_keys) key.push_back(ev.eval(k));
            agg.update(groups[std::move(key)]);
        });
        for (const auto& [key, acc] : groups) {
            std::vector<DynValue> r;
            for (const auto& p : plan.projections) {
                if (p.kind == OutputKind::GroupKey) r.push_back(key[p.index]);
                else r.push_back(agg.value(acc, p.index));
            }
            rows.push_back(std::move(r));
        }
        // Rows are already in ascending group-key order, so a stable sort on
        // the order key alone leaves ties ordered by group key.
        if (plan.order_by) sort_rows(plan, rows, false);
    }

    result.table = output_table(plan, rows);
    result.exec_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return result;
}

}  // namespace abr

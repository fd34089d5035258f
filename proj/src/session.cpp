#include "abr/session.hpp"

#include <cstring>
#include <sstream>

#include "abr/error.hpp"
#include "abr/plan_json.hpp"
#include "abr/tbl.hpp"

namespace abr {

Session::Session(Backend backend) : backend_(backend) { db_.seal(); }

Session::Session(Database db, Backend backend) : db_(std::move(db)), backend_(backend) { db_.seal(); }

std::uint32_t Session::load_table(const std::string& name, const nlohmann::json& schema, std::string_view tbl_bytes) {
    TableSchema s = schema_from_json(schema);
    s.name = name;
    if (db_.has_table(name)) throw Error(ErrorCode::DuplicateTable, "table '" + name + "' already exists");
    Database next = db_.derive();
    std::istringstream in{std::string(tbl_bytes)};
    const auto rows = load_tbl(next, s, in);
    next.seal();
    db_ = std::move(next);
    return rows;
}

nlohmann::json Session::run_plan(const nlohmann::json& plan) {
    const auto logical = to_plan(query_from_json(plan), db_);
    const auto out = abr::run_plan(logical, db_, backend_);
    return result_to_json(out.table, {out.compile, out.exec});
}

std::uint32_t Session::materialize(const std::string& name, const nlohmann::json& plan) {
    if (db_.has_table(name)) throw Error(ErrorCode::DuplicateTable, "table '" + name + "' already exists");
    const auto logical = to_plan(query_from_json(plan), db_);
    const auto out = abr::run_plan(logical, db_, backend_);
    db_ = abr::materialize(db_, name, out.table);
    return static_cast<std::uint32_t>(out.table.row_count());
}

nlohmann::json Session::list_tables() const {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& name : db_.table_names()) {
        auto j = schema_to_json(db_.schema(name));
        j["rows"] = db_.row_count(name);
        tables.push_back(std::move(j));
    }
    return {{"tables", std::move(tables)}};
}

nlohmann::json error_to_json(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        return {{"error", {{"code", to_string(err->code())}, {"message", err->what()}}}};
    }
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) {
        return {{"error", {{"code", to_string(ErrorCode::InvalidDescriptor)}, {"message", e.what()}}}};
    }
    return {{"error", {{"code", "Internal"}, {"message", e.what()}}}};
}

}  // namespace abr

struct abr_session {
    abr::Session session;
};

namespace {

char* dup(const nlohmann::json& j) {
    const auto s = j.dump();
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class F>
char* guarded(F&& f) {
    try {
        return dup(f());
    } catch (const std::exception& e) {
        return dup(abr::error_to_json(e));
    }
}

nlohmann::json parse(const char* text) {
    return nlohmann::json::parse(text ? text : "");
}

}  // namespace

extern "C" {

abr_session* abr_session_new(void) {
    try {
        return new abr_session{abr::Session{}};
    } catch (...) {
        return nullptr;
    }
}

void abr_session_free(abr_session* session) { delete session; }

char* abr_load_table(abr_session* session, const char* name, const char* schema_json, const char* bytes,
                     unsigned long length) {
    return guarded([&] {
        const auto rows = session->session.load_table(name ? name : "", parse(schema_json),
                                                      std::string_view(bytes ? bytes : "", bytes ? length : 0));
        return nlohmann::json{{"rows", rows}};
    });
}

char* abr_run_plan(abr_session* session, const char* plan_json) {
    return guarded([&] { return session->session.run_plan(parse(plan_json)); });
}

char* abr_materialize(abr_session* session, const char* name, const char* plan_json) {
    return guarded([&] {
        return nlohmann::json{{"rows", session->session.materialize(name ? name : "", parse(plan_json))}};
    });
}

char* abr_list_tables(abr_session* session) {
    return guarded([&] { return session->session.list_tables(); });
}

void abr_string_free(char* s) { std::free(s); }

}

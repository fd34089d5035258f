#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "abr/bench.hpp"
#include "abr/storage.hpp"

namespace abr {

/// The engine surface an embedding front end talks to. Every argument and
/// result is JSON in the plan/result shapes of plan_json.hpp. A failed call
/// leaves the catalog as it was.
class Session {
public:
    explicit Session(Backend backend = Backend::Compiled);
    explicit Session(Database db, Backend backend = Backend::Compiled);

    /// Parses `tbl_bytes` with `schema` (name taken from `name`). Returns
    /// the row count.
    std::uint32_t load_table(const std::string& name, const nlohmann::json& schema, std::string_view tbl_bytes);

    /// {"columns": [...], "stats": {...}}
    nlohmann::json run_plan(const nlohmann::json& plan);

    /// Runs `plan` and stores its result as table `name`. Returns the row count.
    std::uint32_t materialize(const std::string& name, const nlohmann::json& plan);

    /// {"tables": [{"name", "rows", "columns": [{"name", "type"}]}]}
    nlohmann::json list_tables() const;

    const Database& database() const { return db_; }

private:
    Database db_;
    Backend backend_;
};

/// {"error": {"code": "UnknownTable", "message": "..."}}
nlohmann::json error_to_json(const std::exception& e);

}  // namespace abr

// C entry points for embedding. Strings are NUL-terminated UTF-8; returned
// strings are JSON owned by the caller and released with abr_string_free.
// Failures come back as the error JSON shape.
extern "C" {
struct abr_session;
abr_session* abr_session_new(void);
void abr_session_free(abr_session* session);
char* abr_load_table(abr_session* session, const char* name, const char* schema_json, const char* bytes,
                     unsigned long length);
char* abr_run_plan(abr_session* session, const char* plan_json);
char* abr_materialize(abr_session* session, const char* name, const char* plan_json);
char* abr_list_tables(abr_session* session);
void abr_string_free(char* s);
}

#pragma once

#include <ostream>

#include <json.hpp>

#include "ghsim/sweep.hpp"

namespace ghsim {

/// JSON form of a sweep table: { metadata, columns, rows }.
inline void write_json(std::ostream& out, const SweepTable& t) {
    nlohmann::json j;
    j["metadata"] = nlohmann::json::object();
    for (const auto& [k, v] : t.metadata) j["metadata"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    out << j.dump(1) << "\n";
}

}  // namespace ghsim

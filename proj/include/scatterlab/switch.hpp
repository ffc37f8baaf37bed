#pragma once

#include "scatterlab/error.hpp"
#include "scatterlab/graph.hpp"
#include "scatterlab/scatter1p.hpp"

#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#ifndef SCATTERLAB_DEFAULT_DATA_DIR
#define SCATTERLAB_DEFAULT_DATA_DIR "data"
#endif

namespace scatterlab {

/// Data directory: $SCATTERLAB_DATA_DIR if set, else the build-time default.
inline std::string data_dir() {
    if (const char* env = std::getenv("SCATTERLAB_DATA_DIR"); env && *env) return env;
    return SCATTERLAB_DEFAULT_DATA_DIR;
}

inline std::string switch_catalog_path() { return (std::filesystem::path(data_dir()) / "switch_catalog.json").string(); }

/// Looks up a catalog entry by name or alias.
inline ScatterGraph catalog_switch(const std::string& id, const std::string& catalog_file = switch_catalog_path()) {
    const auto doc = parse_json_text(read_text_file(catalog_file), catalog_file);
    if (!doc.contains("switches") || !doc["switches"].is_array())
        throw ParseError(catalog_file + ".switches", "missing switch list");
    const auto& list = doc["switches"];
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto entry = list[i];
        bool match = entry.value("name", "") == id;
        if (entry.contains("aliases")) {
            for (const auto& a : entry["aliases"])
                if (a.is_string() && a.get<std::string>() == id) match = true;
            entry.erase("aliases");
        }
        if (match) return graph_from_json(entry, catalog_file + ".switches[" + std::to_string(i) + "]");
    }
    throw ConfigError("no switch named '" + id + "' in " + catalog_file);
}

/// Certifies a candidate graph and returns it, or throws.
inline ScatterGraph build_momentum_switch(const ScatterGraph& candidate, double tol = 1e-10) {
    if (candidate.terminals().size() != 3)
        throw ConfigError("momentum switch needs 3 terminals, got " + std::to_string(candidate.terminals().size()));
    const auto report =
        verify_switch(candidate, Momentum(std::numbers::pi / 4), Momentum(std::numbers::pi / 2), tol);
    if (!report.passed) throw VerificationError("switch failed certification: " + report.reason);
    return candidate;
}

/// Accepts a catalog name/alias or a path to a graph file.
inline ScatterGraph build_momentum_switch(const std::string& id_or_path, double tol = 1e-10) {
    if (std::filesystem::is_regular_file(id_or_path)) return build_momentum_switch(load_graph_file(id_or_path), tol);
    return build_momentum_switch(catalog_switch(id_or_path), tol);
}

}  // namespace scatterlab

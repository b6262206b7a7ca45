#pragma once

#include <string>
#include <vector>

#include "parambvp/limits.hpp"

namespace parambvp {

/// Built-in problem families: closed-form solver oracles, parameter families
/// with known limit behavior, and the counterexamples that defeat exactly one
/// convergence condition each.
struct CatalogEntry {
    std::string name;
    std::string summary;
};

const std::vector<CatalogEntry>& catalog_entries();
std::vector<std::string> catalog_names();

/// Build a family by name; throws ConfigError for unknown names.
ProblemFamily catalog_family(const std::string& name);

} // namespace parambvp

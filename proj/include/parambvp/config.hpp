#pragma once

#include <string>

#include "parambvp/limits.hpp"

namespace parambvp {

/// A run description loaded from a JSON document: the problem family plus
/// solver and decision settings. See README for the schema.
struct RunConfig {
    ProblemFamily family;
    SolverOptions solver{};
    double decision_tolerance = 1e-3;
    std::string output_dir; // empty = current directory
};

/// Parse a configuration document. Throws ConfigError with a field-level
/// message for structural problems, bad expressions, or t-dependence where
/// only parameter dependence is allowed.
RunConfig parse_config(const std::string& json_text);

/// Read and parse a configuration file.
RunConfig load_config(const std::string& path);

} // namespace parambvp

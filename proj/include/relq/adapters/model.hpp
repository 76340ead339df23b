#pragma once

#include <filesystem>
#include <string>

#include "relq/catalog.hpp"

namespace relq {

/// Loads a model document: instantiates each adapter's schema factory and
/// registers tables, views, materializations, and adapter planner rules.
/// The model is JSON with top-level keys `defaultSchema`, `schemas[]`,
/// `views[]`, `materializations[]`; table paths resolve against `baseDir`.
Catalog loadModel(const std::string& path);
Catalog loadModelText(const std::string& jsonText, const std::filesystem::path& baseDir);

}  // namespace relq

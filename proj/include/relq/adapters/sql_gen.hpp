#pragma once

#include <string>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"

namespace relq {

/// Translates a remote-convention subtree (Scan, Filter, Project; Sort,
/// Aggregate, Join where the scanned tables declare the capability) back to
/// SQL text in this framework's own dialect. Deterministic; raises
/// UnsupportedNode for kinds the backend cannot execute.
std::string generateRemoteSql(const RelNodePtr& subtree);

/// The LOGICAL tree the framework's own frontend produces for
/// generateRemoteSql(subtree) against the backend's internal catalog;
/// the digest-equality self-check of the generator.
RelNodePtr logicalizeRemoteSubtree(const RelNodePtr& subtree,
                                   const Catalog& backendCatalog);

/// Plan text with generated SQL injected into remote-boundary Converter
/// lines; the EXPLAIN surface.
std::string explainPlanText(const RelNodePtr& plan);

}  // namespace relq

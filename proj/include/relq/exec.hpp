#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "relq/rel_node.hpp"

namespace relq {

/// Pull-based tuple iterator; the enumerable calling convention's interface.
class RowStream {
 public:
  virtual ~RowStream() = default;
  virtual std::optional<Row> next() = 0;
};

struct ExecOptions {
  /// Forces EnumerableJoin's nested-loop fallback even for equi-joins.
  bool forceNestedLoop = false;
};

/// Opens the physical plan as a stream. The plan must contain no LOGICAL
/// nodes; adapter-convention subtrees execute through their adapters
/// (remote subtrees are translated to SQL and sent to the backend).
std::unique_ptr<RowStream> openStream(const RelNodePtr& plan,
                                      const ExecOptions& options = {});

/// Drains openStream.
std::vector<Row> execute(const RelNodePtr& plan, const ExecOptions& options = {});

/// The testing oracle: direct recursive interpretation of a logical tree
/// with materialized intermediates and nested-loop joins. Independent of the
/// rule library and the enumerable operators.
std::vector<Row> naiveExecute(const RelNodePtr& plan);

}  // namespace relq

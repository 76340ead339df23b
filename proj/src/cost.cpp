#include "relq/cost.hpp"

#include <fmt/format.h>

#include <cmath>

namespace relq {

std::string Cost::render() const {
  return fmt::format("{{cpu={}, io={}, memory={}}}", cpu, io, memory);
}

double scalarCost(const Cost& cost, const CostWeights& weights) {
  return weights.cpu * cost.cpu + weights.io * cost.io + weights.memory * cost.memory;
}

Cost selfCost(MetadataProvider& md, const RelNodePtr& node) {
  Cost cost;
  switch (node->kind()) {
    case RelKind::TableScan:
    case RelKind::ViewScan: {
      double rows = md.query("rowCount", node);
      double size = md.query("avgRowSize", node);
      cost.cpu = rows;
      cost.io = rows * size;
      break;
    }
    case RelKind::Filter:
    case RelKind::Project:
    case RelKind::Converter:
    case RelKind::Window:
      cost.cpu = md.query("rowCount", md.inputNode(node, 0));
      break;
    case RelKind::Join: {
      double left = md.query("rowCount", md.inputNode(node, 0));
      double right = md.query("rowCount", md.inputNode(node, 1));
      double out = md.query("rowCount", node);
      cost.cpu = left + right + out;
      cost.memory = right * md.query("avgRowSize", md.inputNode(node, 1));
      break;
    }
    case RelKind::Aggregate: {
      cost.cpu = md.query("rowCount", md.inputNode(node, 0));
      cost.memory = md.query("rowCount", node) * md.query("avgRowSize", node);
      break;
    }
    case RelKind::Sort: {
      double rows = md.query("rowCount", md.inputNode(node, 0));
      cost.cpu = rows * std::log2(std::max(rows, 2.0));
      cost.memory = rows * md.query("avgRowSize", md.inputNode(node, 0));
      break;
    }
    case RelKind::Values:
      cost.cpu = static_cast<double>(node->values().tuples.size());
      break;
    case RelKind::GroupRef:
      break;
  }
  // Work executed inside a remote backend is discounted so the planner
  // prefers pushdown, and its memory is the backend's business.
  if (node->traits().convention.isRemote()) {
    double discount = md.conventionDiscount(node->traits().convention);
    cost.cpu *= discount;
    cost.io *= discount;
    cost.memory = 0;
  }
  return cost;
}

Cost cumulativeCost(MetadataProvider& md, const RelNodePtr& tree) {
  Cost total = selfCost(md, tree);
  for (const auto& input : tree->inputs()) {
    if (input->kind() == RelKind::GroupRef) continue;
    total += cumulativeCost(md, input);
  }
  return total;
}

}  // namespace relq

#pragma once

#include <string>

#include "relq/metadata.hpp"
#include "relq/rel_node.hpp"

namespace relq {

/// Abstract resource estimate; componentwise non-negative and additive over
/// plan composition.
struct Cost {
  double cpu = 0;
  double io = 0;
  double memory = 0;

  Cost operator+(const Cost& other) const {
    return {cpu + other.cpu, io + other.io, memory + other.memory};
  }
  Cost& operator+=(const Cost& other) {
    cpu += other.cpu;
    io += other.io;
    memory += other.memory;
    return *this;
  }

  std::string render() const;
};

struct CostWeights {
  double cpu = 1.0;
  double io = 4.0;
  double memory = 2.0;
};

double scalarCost(const Cost& cost, const CostWeights& weights = {});

/// This operator's own cost (inputs not included). Remote-convention nodes
/// cost no memory (the backend owns it); remote scans discount io by the
/// table's configured factor.
Cost selfCost(MetadataProvider& md, const RelNodePtr& node);

/// Sum of the node's self cost and its inputs' cumulative costs. For memo
/// expressions the planner accumulates over chosen children instead.
Cost cumulativeCost(MetadataProvider& md, const RelNodePtr& tree);

}  // namespace relq

#pragma once

#include "airan/placement.hpp"

namespace airan::testing {

// Three nodes: 0 GPU-heavy, 1 balanced, 2 CPU-heavy. One cell (DU 0 on
// node 0, CU-UP 1 on node 2), a large-AI replica (2) and a small-AI replica
// (3) on node 0.
inline Cluster tiny_cluster() {
  Cluster c;
  c.nodes = {{0, 1e14, 16, 80, "g"}, {1, 5e13, 32, 24, "b"}, {2, 1e13, 64, 16, "c"}};
  c.instances = {
      {0, Category::DU, 2, 0.05, 0, -1, "du"},
      {1, Category::CU_UP, 0, 0.05, 0, -2, "cu"},
      {2, Category::LARGE_AI, 28, 8.0, std::nullopt, 0, "large"},
      {3, Category::SMALL_AI, 4, 0.5, std::nullopt, 1, "small"},
  };
  return c;
}

inline Placement tiny_placement() { return Placement({0, 2, 0, 0}); }

inline EpochSnapshot blank_snapshot(const Cluster& c, const Placement& p, double t = 5.0) {
  EpochSnapshot s;
  s.timestamp = t;
  s.interval = 5.0;
  for (const auto& n : c.nodes) {
    NodeSnapshot ns;
    ns.node_id = n.node_id;
    ns.vram_headroom = n.vram_capacity - p.resident_weights(c, n.node_id);
    ns.resident_count = static_cast<int>(p.residents(n.node_id).size());
    s.nodes.push_back(ns);
  }
  for (const auto& i : c.instances) {
    InstanceSnapshot is;
    is.instance_id = i.instance_id;
    is.category = i.category;
    is.host = p.host(i.instance_id);
    s.instances.push_back(is);
  }
  return s;
}

}  // namespace airan::testing

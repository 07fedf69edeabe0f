#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotkit/core/types.hpp"

namespace pilotkit::agent {

struct SlotRequest {
  int cores = 1;
  int gpus = 0;
  bool mpi = false;
};

/// The agent's inventory of nodes x cores/gpus with free/busy occupancy.
/// First-fit, lowest-index placement:
///   - non-MPI requests must fit on a single node (the first node, in index
///     order, with enough free cores and gpus; lowest-index slots within it);
///   - MPI requests take the lowest-index free slots in global (node, slot)
///     scan order, spilling across nodes.
/// Requests that no empty table could satisfy raise ImpossibleRequest;
/// transient shortage is a NoFit (nullopt) and leaves the table untouched.
class SlotTable {
 public:
  /// Shapes a table of `cores` cores / `gpus` gpus over nodes of size
  /// cores_per_node/gpus_per_node; the last node may be partial.
  SlotTable(int cores, int gpus, int cores_per_node, int gpus_per_node);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int total_cores() const { return total_cores_; }
  int total_gpus() const { return total_gpus_; }
  int busy_cores() const { return busy_cores_; }
  int busy_gpus() const { return busy_gpus_; }
  int held_placements() const { return static_cast<int>(held_.size()); }

  std::optional<Placement> allocate(const std::string& unit_id, const SlotRequest& req);

  void release(const Placement& placement);

  /// Busy counters match the sum over held placements and never exceed the
  /// table size. Cheap enough to run after every scheduler event.
  bool conserved() const;

  const std::string& node_name(int index) const { return nodes_[index].name; }

 private:
  struct Node {
    std::string name;
    std::vector<bool> core_busy;
    std::vector<bool> gpu_busy;
    int free_cores = 0;
    int free_gpus = 0;
  };

  std::vector<Node> nodes_;
  std::map<std::string, Placement> held_;
  int total_cores_ = 0;
  int total_gpus_ = 0;
  int busy_cores_ = 0;
  int busy_gpus_ = 0;
  int max_node_cores_ = 0;
  int max_node_gpus_ = 0;
};

}  // namespace pilotkit::agent

#include "pilotkit/agent/slot_table.hpp"

#include <algorithm>

#include "pilotkit/core/errors.hpp"

namespace pilotkit::agent {

namespace {

std::string node_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "node.%05d", index);
  return buf;
}

}  // namespace

SlotTable::SlotTable(int cores, int gpus, int cores_per_node, int gpus_per_node) {
  if (cores < 1 || cores_per_node < 1)
    throw Error(ErrorCode::ValidationError, "cores", "slot table needs at least one core");
  int node_count = (cores + cores_per_node - 1) / cores_per_node;
  if (gpus_per_node > 0)
    node_count = std::max(node_count, (gpus + gpus_per_node - 1) / gpus_per_node);
  int remaining_cores = cores;
  int remaining_gpus = gpus;
  for (int i = 0; i < node_count; ++i) {
    Node n;
    n.name = node_label(i);
    int node_cores = std::min(cores_per_node, remaining_cores);
    int node_gpus = gpus_per_node > 0 ? std::min(gpus_per_node, remaining_gpus) : 0;
    n.core_busy.assign(static_cast<size_t>(node_cores), false);
    n.gpu_busy.assign(static_cast<size_t>(node_gpus), false);
    n.free_cores = node_cores;
    n.free_gpus = node_gpus;
    remaining_cores -= node_cores;
    remaining_gpus -= node_gpus;
    max_node_cores_ = std::max(max_node_cores_, node_cores);
    max_node_gpus_ = std::max(max_node_gpus_, node_gpus);
    total_cores_ += node_cores;
    total_gpus_ += node_gpus;
    nodes_.push_back(std::move(n));
  }
}

std::optional<Placement> SlotTable::allocate(const std::string& unit_id,
                                             const SlotRequest& req) {
  if (req.cores < 1)
    throw Error(ErrorCode::PreconditionViolated, "allocation requires cores >= 1");
  if (req.cores > total_cores_ || req.gpus > total_gpus_)
    throw Error(ErrorCode::ImpossibleRequest, unit_id,
                "request exceeds the pilot's total capacity");
  if (!req.mpi && (req.cores > max_node_cores_ || req.gpus > max_node_gpus_))
    throw Error(ErrorCode::ImpossibleRequest, unit_id,
                "non-MPI request exceeds every single node");
  if (held_.count(unit_id))
    throw Error(ErrorCode::PreconditionViolated, "unit " + unit_id + " already holds slots");

  Placement placement;
  placement.unit_id = unit_id;

  if (!req.mpi) {
    for (auto& node : nodes_) {
      if (node.free_cores < req.cores || node.free_gpus < req.gpus) continue;
      NodeAssignment a;
      a.node = node.name;
      for (int i = 0; i < static_cast<int>(node.core_busy.size()) &&
                      static_cast<int>(a.core_indices.size()) < req.cores;
           ++i)
        if (!node.core_busy[i]) a.core_indices.push_back(i);
      for (int i = 0; i < static_cast<int>(node.gpu_busy.size()) &&
                      static_cast<int>(a.gpu_indices.size()) < req.gpus;
           ++i)
        if (!node.gpu_busy[i]) a.gpu_indices.push_back(i);
      placement.node_assignments.push_back(std::move(a));
      break;
    }
    if (placement.node_assignments.empty()) return std::nullopt;
  } else {
    // global lowest-index scan; commit only if the request is fully covered
    int need_cores = req.cores;
    int need_gpus = req.gpus;
    for (const auto& node : nodes_) {
      if (need_cores <= 0 && need_gpus <= 0) break;
      NodeAssignment a;
      a.node = node.name;
      for (int i = 0; i < static_cast<int>(node.core_busy.size()) && need_cores > 0; ++i) {
        if (!node.core_busy[i]) {
          a.core_indices.push_back(i);
          --need_cores;
        }
      }
      for (int i = 0; i < static_cast<int>(node.gpu_busy.size()) && need_gpus > 0; ++i) {
        if (!node.gpu_busy[i]) {
          a.gpu_indices.push_back(i);
          --need_gpus;
        }
      }
      if (!a.core_indices.empty() || !a.gpu_indices.empty())
        placement.node_assignments.push_back(std::move(a));
    }
    if (need_cores > 0 || need_gpus > 0) return std::nullopt;
  }

  // commit atomically
  for (const auto& a : placement.node_assignments) {
    auto node = std::find_if(nodes_.begin(), nodes_.end(),
                             [&](const Node& n) { return n.name == a.node; });
    for (int i : a.core_indices) node->core_busy[i] = true;
    for (int i : a.gpu_indices) node->gpu_busy[i] = true;
    node->free_cores -= static_cast<int>(a.core_indices.size());
    node->free_gpus -= static_cast<int>(a.gpu_indices.size());
  }
  busy_cores_ += placement.total_cores();
  busy_gpus_ += placement.total_gpus();
  held_.emplace(unit_id, placement);
  return placement;
}

void SlotTable::release(const Placement& placement) {
  auto it = held_.find(placement.unit_id);
  if (it == held_.end())
    throw Error(ErrorCode::DoubleRelease, placement.unit_id,
                "unit " + placement.unit_id + " holds no slots");
  const Placement& held = it->second;
  for (const auto& a : held.node_assignments) {
    auto node = std::find_if(nodes_.begin(), nodes_.end(),
                             [&](const Node& n) { return n.name == a.node; });
    for (int i : a.core_indices) node->core_busy[i] = false;
    for (int i : a.gpu_indices) node->gpu_busy[i] = false;
    node->free_cores += static_cast<int>(a.core_indices.size());
    node->free_gpus += static_cast<int>(a.gpu_indices.size());
  }
  busy_cores_ -= held.total_cores();
  busy_gpus_ -= held.total_gpus();
  held_.erase(it);
}

bool SlotTable::conserved() const {
  int held_cores = 0;
  int held_gpus = 0;
  for (const auto& [id, p] : held_) {
    held_cores += p.total_cores();
    held_gpus += p.total_gpus();
  }
  if (held_cores != busy_cores_ || held_gpus != busy_gpus_) return false;
  if (busy_cores_ > total_cores_ || busy_gpus_ > total_gpus_) return false;
  int busy = 0;
  for (const auto& n : nodes_) {
    busy += static_cast<int>(std::count(n.core_busy.begin(), n.core_busy.end(), true));
    if (n.free_cores != static_cast<int>(n.core_busy.size()) -
                            static_cast<int>(std::count(n.core_busy.begin(), n.core_busy.end(),
                                                        true)))
      return false;
  }
  return busy == busy_cores_;
}

}  // namespace pilotkit::agent

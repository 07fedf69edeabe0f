#include "support/first_fit_oracle.hpp"

namespace pktest {

FirstFitOracle::FirstFitOracle(int cores, int gpus, int cores_per_node, int gpus_per_node) {
  int remaining_cores = cores;
  int remaining_gpus = gpus;
  int nodes = (cores + cores_per_node - 1) / cores_per_node;
  if (gpus_per_node > 0) {
    int gpu_nodes = (gpus + gpus_per_node - 1) / gpus_per_node;
    if (gpu_nodes > nodes) nodes = gpu_nodes;
  }
  for (int n = 0; n < nodes; ++n) {
    int c = remaining_cores < cores_per_node ? remaining_cores : cores_per_node;
    int g = 0;
    if (gpus_per_node > 0) g = remaining_gpus < gpus_per_node ? remaining_gpus : gpus_per_node;
    core_busy_.emplace_back(c, false);
    gpu_busy_.emplace_back(g, false);
    remaining_cores -= c;
    remaining_gpus -= g;
  }
}

FirstFitOracle::Result FirstFitOracle::allocate(int cores, int gpus, bool mpi) {
  Result result;

  // impossibility: judge against the table's full shape, ignoring occupancy
  int shape_cores = 0;
  int shape_gpus = 0;
  int biggest_node_cores = 0;
  int biggest_node_gpus = 0;
  for (size_t n = 0; n < core_busy_.size(); ++n) {
    shape_cores += static_cast<int>(core_busy_[n].size());
    shape_gpus += static_cast<int>(gpu_busy_[n].size());
    if (static_cast<int>(core_busy_[n].size()) > biggest_node_cores)
      biggest_node_cores = static_cast<int>(core_busy_[n].size());
    if (static_cast<int>(gpu_busy_[n].size()) > biggest_node_gpus)
      biggest_node_gpus = static_cast<int>(gpu_busy_[n].size());
  }
  if (cores > shape_cores || gpus > shape_gpus ||
      (!mpi && (cores > biggest_node_cores || gpus > biggest_node_gpus))) {
    result.impossible = true;
    return result;
  }

  if (!mpi) {
    for (size_t n = 0; n < core_busy_.size(); ++n) {
      std::vector<int> free_cores;
      for (size_t i = 0; i < core_busy_[n].size(); ++i)
        if (!core_busy_[n][i]) free_cores.push_back(static_cast<int>(i));
      std::vector<int> free_gpus;
      for (size_t i = 0; i < gpu_busy_[n].size(); ++i)
        if (!gpu_busy_[n][i]) free_gpus.push_back(static_cast<int>(i));
      if (static_cast<int>(free_cores.size()) >= cores &&
          static_cast<int>(free_gpus.size()) >= gpus) {
        Assignment a;
        a.node = static_cast<int>(n);
        a.cores.assign(free_cores.begin(), free_cores.begin() + cores);
        a.gpus.assign(free_gpus.begin(), free_gpus.begin() + gpus);
        for (int i : a.cores) core_busy_[n][i] = true;
        for (int i : a.gpus) gpu_busy_[n][i] = true;
        result.fits = true;
        result.nodes.push_back(a);
        return result;
      }
    }
    return result;  // NoFit
  }

  // MPI: walk every (node, slot) pair in lexicographic order
  std::vector<Assignment> taken(core_busy_.size());
  int need_cores = cores;
  int need_gpus = gpus;
  for (size_t n = 0; n < core_busy_.size(); ++n) {
    taken[n].node = static_cast<int>(n);
    for (size_t i = 0; i < core_busy_[n].size() && need_cores > 0; ++i) {
      if (!core_busy_[n][i]) {
        taken[n].cores.push_back(static_cast<int>(i));
        --need_cores;
      }
    }
    for (size_t i = 0; i < gpu_busy_[n].size() && need_gpus > 0; ++i) {
      if (!gpu_busy_[n][i]) {
        taken[n].gpus.push_back(static_cast<int>(i));
        --need_gpus;
      }
    }
  }
  if (need_cores > 0 || need_gpus > 0) return result;  // NoFit, nothing marked yet
  for (const auto& a : taken) {
    if (a.cores.empty() && a.gpus.empty()) continue;
    for (int i : a.cores) core_busy_[a.node][i] = true;
    for (int i : a.gpus) gpu_busy_[a.node][i] = true;
    result.nodes.push_back(a);
  }
  result.fits = true;
  return result;
}

void FirstFitOracle::release(const std::vector<Assignment>& nodes) {
  for (const auto& a : nodes) {
    for (int i : a.cores) core_busy_[a.node][i] = false;
    for (int i : a.gpus) gpu_busy_[a.node][i] = false;
  }
}

}  // namespace pktest

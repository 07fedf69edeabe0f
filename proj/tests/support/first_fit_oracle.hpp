#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pktest {

/// Brute-force first-fit reference, independent of the production slot table.
/// Works on plain busy matrices and literally enumerates slots in
/// lexicographic (node, index) order.
class FirstFitOracle {
 public:
  struct Assignment {
    int node;
    std::vector<int> cores;
    std::vector<int> gpus;
  };
  struct Result {
    bool impossible = false;          // no empty table of this shape could fit it
    bool fits = false;
    std::vector<Assignment> nodes;    // empty when !fits
  };

  FirstFitOracle(int cores, int gpus, int cores_per_node, int gpus_per_node);

  Result allocate(int cores, int gpus, bool mpi);
  void release(const std::vector<Assignment>& nodes);

 private:
  std::vector<std::vector<bool>> core_busy_;
  std::vector<std::vector<bool>> gpu_busy_;
};

}  // namespace pktest

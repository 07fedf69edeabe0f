#include <doctest.h>

#include <map>
#include <random>

#include "pilotkit/agent/slot_table.hpp"
#include "pilotkit/core/errors.hpp"
#include "support/first_fit_oracle.hpp"

using namespace pilotkit;
using agent::SlotRequest;
using agent::SlotTable;

namespace {

// Placement and oracle result must agree node-for-node, index-for-index.
void check_matches(const Placement& p, const pktest::FirstFitOracle::Result& expected,
                   const SlotTable& table) {
  REQUIRE(expected.fits);
  REQUIRE(p.node_assignments.size() == expected.nodes.size());
  for (size_t i = 0; i < expected.nodes.size(); ++i) {
    CHECK(p.node_assignments[i].node == table.node_name(expected.nodes[i].node));
    CHECK(p.node_assignments[i].core_indices == expected.nodes[i].cores);
    CHECK(p.node_assignments[i].gpu_indices == expected.nodes[i].gpus);
  }
}

}  // namespace

TEST_CASE("paper-shaped allocation: 24 cores on an empty 128x24 table takes node 0") {
  SlotTable table(3072, 0, 24, 0);
  CHECK(table.node_count() == 128);
  auto p = table.allocate("unit.000000", {24, 0, true});
  REQUIRE(p.has_value());
  REQUIRE(p->node_assignments.size() == 1);
  CHECK(p->node_assignments[0].node == "node.00000");
  std::vector<int> expect(24);
  for (int i = 0; i < 24; ++i) expect[i] = i;
  CHECK(p->node_assignments[0].core_indices == expect);
  CHECK(table.busy_cores() == 24);
}

TEST_CASE("full table yields NoFit and leaves the table untouched") {
  SlotTable table(4, 0, 4, 0);
  auto p = table.allocate("u0", {4, 0, false});
  REQUIRE(p.has_value());
  CHECK(!table.allocate("u1", {1, 0, false}).has_value());
  CHECK(table.busy_cores() == 4);
  CHECK(table.conserved());
}

TEST_CASE("impossible requests are distinct from transient NoFit") {
  SlotTable table(8, 2, 4, 1);
  CHECK_THROWS_AS(table.allocate("u0", {9, 0, true}), Error);   // exceeds table
  CHECK_THROWS_AS(table.allocate("u1", {5, 0, false}), Error);  // exceeds any node, non-MPI
  CHECK_THROWS_AS(table.allocate("u2", {1, 2, false}), Error);  // gpus exceed any node
  CHECK_NOTHROW(table.allocate("u3", {5, 0, true}));            // MPI may span
  CHECK(table.conserved());
}

TEST_CASE("MPI spill takes lowest-index slots across consecutive nodes") {
  SlotTable table(12, 0, 4, 0);
  REQUIRE(table.allocate("a", {3, 0, false}).has_value());  // node 0: cores 0-2
  auto p = table.allocate("b", {6, 0, true});
  REQUIRE(p.has_value());
  REQUIRE(p->node_assignments.size() == 3);
  CHECK(p->node_assignments[0].core_indices == std::vector<int>{3});
  CHECK(p->node_assignments[1].core_indices == std::vector<int>{0, 1, 2, 3});
  CHECK(p->node_assignments[2].core_indices == std::vector<int>{0});
}

TEST_CASE("allocate then release restores the initial table") {
  SlotTable table(8, 4, 4, 2);
  auto p = table.allocate("u", {5, 3, true});
  REQUIRE(p.has_value());
  CHECK(table.busy_cores() == 5);
  CHECK(table.busy_gpus() == 3);
  table.release(*p);
  CHECK(table.busy_cores() == 0);
  CHECK(table.busy_gpus() == 0);
  CHECK(table.conserved());
  auto q = table.allocate("u", {5, 3, true});
  REQUIRE(q.has_value());
  CHECK(Json(*q) == Json(*p));  // same placement ⇒ table truly reset
}

TEST_CASE("double release is rejected") {
  SlotTable table(4, 0, 4, 0);
  auto p = table.allocate("u", {2, 0, false});
  table.release(*p);
  try {
    table.release(*p);
    FAIL("expected DoubleRelease");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DoubleRelease);
  }
}

TEST_CASE("randomized allocate/release matches the brute-force oracle") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 300; ++round) {
    int cores_per_node = 1 + static_cast<int>(rng() % 4);
    int nodes = 1 + static_cast<int>(rng() % 8);
    int gpus_per_node = static_cast<int>(rng() % 3);
    int cores = cores_per_node * nodes - static_cast<int>(rng() % cores_per_node);
    int gpus = gpus_per_node * nodes;

    SlotTable table(cores, gpus, cores_per_node, gpus_per_node);
    pktest::FirstFitOracle oracle(cores, gpus, cores_per_node, gpus_per_node);

    struct Held {
      Placement placement;
      std::vector<pktest::FirstFitOracle::Assignment> oracle_nodes;
    };
    std::map<std::string, Held> held;
    int next_unit = 0;

    for (int step = 0; step < 60; ++step) {
      bool do_release = !held.empty() && rng() % 3 == 0;
      if (do_release) {
        auto it = held.begin();
        std::advance(it, rng() % held.size());
        table.release(it->second.placement);
        oracle.release(it->second.oracle_nodes);
        held.erase(it);
      } else {
        SlotRequest req;
        req.cores = 1 + static_cast<int>(rng() % (cores_per_node * 2));
        req.gpus = gpus_per_node > 0 ? static_cast<int>(rng() % (gpus_per_node + 1)) : 0;
        req.mpi = rng() % 2 == 0;
        std::string uid = "unit." + std::to_string(next_unit++);

        auto expected = oracle.allocate(req.cores, req.gpus, req.mpi);
        if (expected.impossible) {
          CHECK_THROWS_AS(table.allocate(uid, req), Error);
        } else if (!expected.fits) {
          auto p = table.allocate(uid, req);
          CHECK(!p.has_value());
        } else {
          auto p = table.allocate(uid, req);
          REQUIRE(p.has_value());
          check_matches(*p, expected, table);
          held.emplace(uid, Held{*p, expected.nodes});
        }
      }
      REQUIRE(table.conserved());
    }
  }
}

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "pilotkit/core/errors.hpp"
#include "pilotkit/core/types.hpp"

using namespace pilotkit;

namespace {

using Edge = std::pair<std::string, std::string>;

// Independent oracle: the legal edges of each machine, written out literally.
// transition() must accept exactly these and nothing else.
std::set<Edge> expected_edges(StateMachineId id) {
  switch (id) {
    case StateMachineId::Pilot:
      return {{"NEW", "LAUNCHING"},    {"LAUNCHING", "QUEUED"}, {"QUEUED", "ACTIVE"},
              {"ACTIVE", "DONE"},      {"NEW", "FAILED"},       {"NEW", "CANCELED"},
              {"LAUNCHING", "FAILED"}, {"LAUNCHING", "CANCELED"}, {"QUEUED", "FAILED"},
              {"QUEUED", "CANCELED"},  {"ACTIVE", "FAILED"},    {"ACTIVE", "CANCELED"}};
    case StateMachineId::Unit: {
      std::set<Edge> edges = {{"NEW", "UMGR_SCHEDULING"},
                              {"UMGR_SCHEDULING", "UMGR_STAGING_INPUT"},
                              {"UMGR_STAGING_INPUT", "AGENT_STAGING_INPUT"},
                              {"AGENT_STAGING_INPUT", "AGENT_SCHEDULING"},
                              {"AGENT_SCHEDULING", "EXECUTING"},
                              {"EXECUTING", "AGENT_STAGING_OUTPUT"},
                              {"AGENT_STAGING_OUTPUT", "DONE"}};
      for (const char* from :
           {"NEW", "UMGR_SCHEDULING", "UMGR_STAGING_INPUT", "AGENT_STAGING_INPUT",
            "AGENT_SCHEDULING", "EXECUTING", "AGENT_STAGING_OUTPUT"}) {
        edges.insert({from, "FAILED"});
        edges.insert({from, "CANCELED"});
      }
      return edges;
    }
    case StateMachineId::Task:
      return {{"SPECIFIED", "SCHEDULED"}, {"SCHEDULED", "SUBMITTED"},
              {"SUBMITTED", "EXECUTED"},  {"EXECUTED", "DONE"},
              {"SPECIFIED", "FAILED"},    {"SCHEDULED", "FAILED"},
              {"SUBMITTED", "FAILED"},    {"EXECUTED", "FAILED"}};
    case StateMachineId::Stage:
      return {{"NEW", "DISPATCHING"},    {"DISPATCHING", "DONE"},
              {"NEW", "FAILED"},         {"NEW", "CANCELED"},
              {"DISPATCHING", "FAILED"}, {"DISPATCHING", "CANCELED"}};
    case StateMachineId::Pipeline:
      return {{"NEW", "RUNNING"},  {"RUNNING", "DONE"},    {"NEW", "FAILED"},
              {"NEW", "STOPPED"},  {"RUNNING", "FAILED"},  {"RUNNING", "STOPPED"}};
  }
  return {};
}

}  // namespace

TEST_CASE("transition accepts exactly the machine's edges (full cross product)") {
  for (auto id : {StateMachineId::Pilot, StateMachineId::Unit, StateMachineId::Task,
                  StateMachineId::Stage, StateMachineId::Pipeline}) {
    const auto& m = machine(id);
    const auto oracle = expected_edges(id);
    INFO("machine ", m.name());
    size_t accepted = 0;
    for (int from = 0; from < m.state_count(); ++from) {
      for (int to = 0; to < m.state_count(); ++to) {
        const bool expect = oracle.count({m.state_name(from), m.state_name(to)}) > 0;
        CHECK_MESSAGE(m.legal(from, to) == expect,
                      m.name(), ": ", m.state_name(from), " -> ", m.state_name(to));
        if (m.legal(from, to)) ++accepted;
      }
    }
    CHECK(accepted == oracle.size());
  }
}

TEST_CASE("typed transitions: first legal edge, failure jump, illegal edge") {
  CHECK(transition(UnitState::NEW, UnitState::UMGR_SCHEDULING) == UnitState::UMGR_SCHEDULING);
  CHECK(transition(UnitState::EXECUTING, UnitState::FAILED) == UnitState::FAILED);
  CHECK_THROWS_WITH_AS(transition(UnitState::DONE, UnitState::EXECUTING),
                       doctest::Contains("DONE -> EXECUTING"), Error);
  try {
    transition(UnitState::DONE, UnitState::EXECUTING);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllegalTransition);
  }
}

TEST_CASE("random transition sequences never revisit a state and stay on machine paths") {
  std::mt19937 rng(7);
  const auto& m = machine(StateMachineId::Unit);
  for (int run = 0; run < 500; ++run) {
    UnitState state = UnitState::NEW;
    std::set<UnitState> visited{state};
    for (int step = 0; step < 40; ++step) {
      auto target = static_cast<UnitState>(rng() % m.state_count());
      try {
        state = transition(state, target);
        // accepted: must be a fresh state reached over a legal edge
        CHECK(visited.insert(state).second);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IllegalTransition);
      }
    }
  }
}

TEST_CASE("replaying state-entry events reconstructs the final state") {
  std::mt19937 rng(11);
  for (int run = 0; run < 200; ++run) {
    UnitState state = UnitState::NEW;
    std::vector<Event> log;
    log.push_back(make_event(EntityKind::UNIT, "unit.0", to_string(state), "test"));
    for (int step = 0; step < 30; ++step) {
      auto target = static_cast<UnitState>(rng() % 10);
      try {
        state = transition(state, target);
        log.push_back(make_event(EntityKind::UNIT, "unit.0", to_string(state), "test"));
      } catch (const Error&) {
      }
    }
    // replay
    UnitState replayed = UnitState::NEW;
    for (size_t i = 1; i < log.size(); ++i)
      replayed = transition(replayed, *unit_state_from_string(log[i].event_name));
    CHECK(replayed == state);
    for (size_t i = 1; i < log.size(); ++i) CHECK(log[i].mono_ns >= log[i - 1].mono_ns);
  }
}

TEST_CASE("validate_unit_description: Listing-2 shaped unit is valid and normalized") {
  UnitDescription cud;
  cud.executable = "/bin/bash";
  cud.arguments = {"-l", "-c", "/opt/gromacs/bin/gmx_mpi mdrun -s min.tpr -v -deffnm npt"};
  cud.pre_exec = {"module load gromacs/5.1.2"};
  for (const char* f :
       {"FRF.itp", "dynamic.mdp", "FF.itp", "martini_v2.2.itp", "85-20.top", "init85-20.gro"})
    cud.input_staging.push_back({f, "", StagingMode::LINK});
  cud.cores = 24;
  cud.mpi = true;

  auto v = validate_unit_description(cud);
  CHECK(v.cores == 24);
  CHECK(v.mpi);
  CHECK(v.gpus == 0);
  CHECK(v.input_staging.size() == 6);
  CHECK(v.input_staging[0].destination == "FRF.itp");  // basename default

  SUBCASE("idempotent") {
    auto v2 = validate_unit_description(v);
    CHECK(Json(v2) == Json(v));
  }
}

TEST_CASE("validate_unit_description rejections") {
  UnitDescription cud;
  cud.executable = "";
  cud.cores = 1;
  try {
    validate_unit_description(cud);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.detail() == "executable");
  }

  cud.executable = "/bin/true";
  cud.cores = 0;
  CHECK_THROWS_AS(validate_unit_description(cud), Error);

  cud.cores = 1;
  cud.input_staging = {{"a.dat", "in.dat", StagingMode::COPY},
                       {"b.dat", "in.dat", StagingMode::COPY}};
  try {
    validate_unit_description(cud);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.detail() == "input_staging");
  }

  cud.input_staging = {{"a.dat", "../escape", StagingMode::COPY}};
  CHECK_THROWS_AS(validate_unit_description(cud), Error);
  cud.input_staging = {{"a.dat", "/abs/path", StagingMode::COPY}};
  CHECK_THROWS_AS(validate_unit_description(cud), Error);
}

TEST_CASE("defaults: minimal description fills gpus/mpi/staging") {
  UnitDescription cud;
  cud.executable = "/bin/true";
  auto v = validate_unit_description(cud);
  CHECK(v.gpus == 0);
  CHECK(!v.mpi);
  CHECK(v.input_staging.empty());
  CHECK(v.output_staging.empty());
  CHECK(v.environment.empty());
}

TEST_CASE("event JSON round trip") {
  Event ev = make_event(EntityKind::PILOT, "pilot.0000", "ACTIVE", "pmgr.launcher",
                        Json{{"cores", 3072}});
  Json j(ev);
  auto back = j.get<Event>();
  CHECK(back.mono_ns == ev.mono_ns);
  CHECK(back.kind == EntityKind::PILOT);
  CHECK(back.entity_id == "pilot.0000");
  CHECK(back.event_name == "ACTIVE");
  CHECK(back.payload.at("cores") == 3072);

  Event plain = make_event(EntityKind::UNIT, "unit.1", "NEW", "umgr");
  Json pj(plain);
  CHECK(!pj.contains("payload"));
}

TEST_CASE("pilot description validation boundaries") {
  PilotDescription p;
  p.resource = "sim-3072";
  p.cores = 3072;
  p.runtime = 120;
  CHECK_NOTHROW(validate_pilot_description(p));
  p.cores = 0;
  CHECK_THROWS_AS(validate_pilot_description(p), Error);
  p.cores = 1;
  p.runtime = 0;
  CHECK_THROWS_AS(validate_pilot_description(p), Error);
}

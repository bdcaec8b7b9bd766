#pragma once

#include <string>
#include <vector>

#include "zdmtd/game_model.hpp"
#include "zdmtd/io.hpp"

namespace zdmtd {

// Moving-target defense over K IoT devices. Defender: protection gain S minus
// the average migration cost into the covered device. Attacker: reward R
// minus the attack cost C_k, or just -C_k when the device is covered.
struct IotScenario {
  std::string name;
  int K = 0;
  double S = 0.0;
  Eigen::MatrixXd Y;  // Y(i, k): migration cost from device i to device k
  double R = 0.0;
  std::vector<double> C;
  // Generator inputs, kept for provenance; Y and C are authoritative.
  double theta = 0.0;
  int zeta = 1;

  void validate() const;
};

// 2 theta (J - I) plus perturbation_scale times a fixed asymmetric pattern
// with zero diagonal and distinct column means. theta in [0, 1].
Eigen::MatrixXd iot_migration_cost(int K, double theta, double perturbation_scale = 0.0);

// zeta = 1: uniform base; 2: linear from 0.5 base to 1.5 base; 3: uniform
// base except the last device at 0.2 base.
std::vector<double> iot_attack_costs(int K, int zeta, double base = 1.0);

GameSpec iot_game(const IotScenario& s);

enum class WorkerType { honest, malicious };
std::string to_string(WorkerType t);
WorkerType parse_worker_type(const std::string& s);

struct SwitchingSpec {
  WorkerType initial_type = WorkerType::honest;
  int period = 50;
};

// Crowdsourcing with K tasks: the requester verifies one task per stage, the
// worker works on one. Submission quality is bound to the worker's type.
struct CrowdScenario {
  std::string name;
  int K = 0;
  std::vector<double> R_r;      // requester reward per task
  std::vector<double> m;        // extra loss on a low-quality submission
  double c = 0.0;               // verification cost
  std::vector<double> R_w;      // honest worker reward
  std::vector<double> R_w_bar;  // malicious worker reward when verified
  std::vector<double> a_extra;  // malicious diversion benefit
  SwitchingSpec switching;

  void validate() const;
};

// Throws std::invalid_argument naming the offending task when the covered
// requester profit does not exceed the uncovered one.
GameSpec crowd_game(const CrowdScenario& s, WorkerType t);

struct Suite {
  std::string name;
  enum class Family { iot, crowd } family = Family::iot;
  IotScenario iot;
  CrowdScenario crowd;
};

// 9 IoT suites (K in {3,5,10} x zeta in {1,2,3}) and 6 crowdsourcing suites
// (initial type x period in {10,20,50}), in that order.
std::vector<Suite> default_suites();

// Scenario config files: {"version": 1, "scenario": {"family": ..., ...}}.
Json suite_to_json(const Suite& s);
Suite suite_from_json(const Json& j);

}  // namespace zdmtd

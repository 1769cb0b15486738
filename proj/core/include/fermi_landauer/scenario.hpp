#pragma once

#include <string>
#include <vector>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/run_config.hpp"

namespace fermi_landauer {

inline constexpr const char* kThreadsEnvVar = "FERMI_LANDAUER_THREADS";

// Worker count for sweeps: --threads, capped by FERMI_LANDAUER_THREADS and
// the hardware.
int worker_count(const RunConfig& config);

// Evaluates the scenario and renders every artifact in memory. Nothing is
// written here, so a numerical failure leaves no partial output behind.
// The first artifact is the scenario's primary table.
std::vector<Artifact> run_scenario(const RunConfig& config);

// run_scenario followed by either write_artifacts(config.output) or, with
// no output directory, the primary table on stdout. Returns the process
// exit code: 0 ok, 1 configuration error, 2 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace fermi_landauer

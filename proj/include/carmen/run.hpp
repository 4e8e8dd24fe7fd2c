#ifndef CARMEN_RUN_HPP
#define CARMEN_RUN_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "carmen/config.hpp"
#include "carmen/evolve.hpp"

namespace carmen {

/// Solver for a config, initialized (initial data adapted in adaptive mode).
Solver make_solver(const RunConfig& config);

struct RunResult {
	std::vector<StepRecord> records; // initial state first
	double wall_seconds = 0.0;
};

/// Steps to t_end (or max_steps). `stops` are times the run must hit exactly;
/// on_stop is called when one is reached.
RunResult advance(Solver& solver, const RunConfig& config, const std::vector<double>& stops = {},
                  const std::function<void(const Solver&)>& on_stop = {},
                  const std::function<void(const StepRecord&)>& on_step = {});

/// Full driver: snapshots, final state, diagnostics CSV and summary in
/// config.output_dir. Returns the process exit status; errors are reported on `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

} // namespace carmen

#endif

#include "carmen/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "carmen/benchmarks.hpp"
#include "carmen/io.hpp"

namespace carmen {

Solver make_solver(const RunConfig& config)
{
	validate(config);
	SolverOptions opts;
	opts.cfl = config.spec.cfl;
	opts.alpha_p = config.spec.alpha_p;
	opts.adaptive = config.adaptive;
	opts.mirror_x = config.spec.mirror_x;
	opts.adapt.policy = config.spec.policy;
	opts.adapt.min_level = config.min_level;
	opts.adapt.safety = config.safety;
	Solver solver(initial_tree(config.spec, config.level), gas_model(config.spec), opts);
	solver.initialize();
	return solver;
}

RunResult advance(Solver& solver, const RunConfig& config, const std::vector<double>& stops,
                  const std::function<void(const Solver&)>& on_stop, const std::function<void(const StepRecord&)>& on_step)
{
	const auto start = std::chrono::steady_clock::now();
	RunResult result;
	result.records.push_back(solver.diagnostics());
	std::size_t next = 0;
	while (next < stops.size() && stops[next] <= solver.time().t) ++next;
	const double t_end = config.spec.t_end;
	while (solver.time().t < t_end) {
		if (config.max_steps > 0 && solver.time().step_count >= config.max_steps) break;
		const double target = next < stops.size() ? std::min(stops[next], t_end) : t_end;
		result.records.push_back(solver.step(target));
		if (on_step) on_step(result.records.back());
		while (next < stops.size() && stops[next] <= solver.time().t) {
			if (on_stop) on_stop(solver);
			++next;
		}
	}
	result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return result;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err)
{
	namespace fs = std::filesystem;
	double t_last = 0.0;
	try {
		fs::create_directories(config.output_dir);
		const fs::path dir(config.output_dir);
		Solver solver = make_solver(config);
		const double gamma = config.spec.gamma;
		int snapshot = 0;
		const auto write_snapshot = [&](const Solver& s) {
			std::ostringstream name;
			name << "snapshot_" << std::setw(4) << std::setfill('0') << snapshot++ << ".vtk";
			write_vtk(s.tree(), gamma, (dir / name.str()).string());
		};
		std::vector<double> stops;
		for (int k = 1; k <= config.snapshots; ++k) stops.push_back(config.spec.t_end * k / config.snapshots);
		if (config.snapshots > 0) write_snapshot(solver);

		log << "carmen-mr: " << config.spec.name << " L=" << config.level << (config.adaptive ? " adaptive" : " uniform")
		    << " leaves=" << solver.tree().leaf_count() << '\n';
		const RunResult res = advance(solver, config, stops, write_snapshot, [&](const StepRecord& r) {
			t_last = r.t;
			if (r.step % 100 == 0) log << "step " << r.step << " t=" << r.t << " dt=" << r.dt << " leaves=" << r.leaves << '\n';
		});

		write_state(solver.tree(), gamma, solver.time().t, (dir / "final.state").string());
		write_vtk(solver.tree(), gamma, (dir / "final.vtk").string());
		{
			std::ofstream csv(dir / "diagnostics.csv");
			write_diagnostics_csv(res.records, csv);
		}
		const RunSummary summary = summarize(res.records, res.wall_seconds);
		{
			std::ofstream s(dir / "summary.txt");
			write_summary(summary, s);
		}
		write_summary(summary, log);
		return 0;
	} catch (const UnphysicalState& e) {
		err << "error: " << e.what() << " (step starting at t = " << t_last << ")\n";
		return 2;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << '\n';
		return 1;
	}
}

} // namespace carmen

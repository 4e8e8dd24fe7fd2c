#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "carmen/config.hpp"
#include "carmen/io.hpp"
#include "carmen/run.hpp"

namespace fs = std::filesystem;
using namespace carmen;

namespace {

int axis_index(const std::string& name)
{
	if (name == "x") return 0;
	if (name == "y") return 1;
	if (name == "z") return 2;
	throw std::invalid_argument("axis must be x, y or z");
}

// A run directory resolves to its final.state; anything else is read as a field file.
std::string field_path(const std::string& p)
{
	if (fs::is_directory(p)) return (fs::path(p) / "final.state").string();
	return p;
}

int cmd_cut(const std::string& file, const std::string& axis, double at, int samples, std::optional<double> lo, std::optional<double> hi,
            const std::string& output)
{
	const StateFile s = read_fields(field_path(file));
	const int fixed = axis_index(axis);
	const int along = fixed == 0 ? 1 : 0;
	const double a = lo.value_or(s.tree.domain().lo[along]);
	const double b = hi.value_or(s.tree.domain().hi[along]);
	const auto cut = extract_cut(s.tree, s.gamma, fixed, at, samples, a, b);
	if (output.empty()) {
		write_cut_csv(cut, std::cout);
	} else {
		std::ofstream out(output);
		if (!out) throw std::runtime_error("cannot write '" + output + "'");
		write_cut_csv(cut, out);
	}
	return 0;
}

int cmd_compare(const std::string& run_a, const std::string& run_b)
{
	const StateFile a = read_fields(field_path(run_a));
	const StateFile b = read_fields(field_path(run_b));
	const auto norms = compare_trees(a.tree, b.tree, a.gamma);
	std::cout << std::setprecision(6) << std::scientific;
	std::cout << "variable,L1,L2\n";
	for (std::size_t v = 0; v < norms.size(); ++v) std::cout << primitive_names()[v] << ',' << norms[v].l1 << ',' << norms[v].l2 << '\n';
	const fs::path da = fs::path(run_a) / "diagnostics.csv", db = fs::path(run_b) / "diagnostics.csv";
	if (fs::is_directory(run_a) && fs::is_directory(run_b) && fs::exists(da) && fs::exists(db)) {
		const auto series = energy_ratio_series(read_diagnostics_csv(da.string()), read_diagnostics_csv(db.string()));
		std::cout << "\nt,log10_energy_ratio\n" << std::setprecision(10);
		for (const auto& p : series) std::cout << p.t << ',' << p.log10_ratio << '\n';
	}
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Adaptive multiresolution finite-volume MHD solver"};
	app.require_subcommand(1);

	std::string config_path;
	auto* run_cmd = app.add_subcommand("run", "Run a simulation from a key = value config file");
	run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

	std::string cut_file, cut_axis = "y", cut_output;
	double cut_at = 0.0;
	int cut_samples = 512;
	std::optional<double> cut_lo, cut_hi;
	auto* cut_cmd = app.add_subcommand("cut", "Sample a 1D cut from a .vtk/.state file or a run directory");
	cut_cmd->add_option("file", cut_file, "Field file or run directory")->required();
	cut_cmd->add_option("--axis", cut_axis, "Axis held fixed (x, y or z)")->capture_default_str();
	cut_cmd->add_option("--at", cut_at, "Coordinate of the cut line")->required();
	cut_cmd->add_option("--samples", cut_samples, "Number of samples")->capture_default_str();
	cut_cmd->add_option("--from", cut_lo, "Start of the sampled range");
	cut_cmd->add_option("--to", cut_hi, "End of the sampled range");
	cut_cmd->add_option("-o,--output", cut_output, "CSV output (default stdout)");

	std::string cmp_a, cmp_b;
	auto* cmp_cmd = app.add_subcommand("compare", "L1/L2 norms and energy ratio between two runs");
	cmp_cmd->add_option("run_a", cmp_a, "Run directory or field file")->required();
	cmp_cmd->add_option("run_b", cmp_b, "Run directory or field file (reference)")->required();

	std::string bench_name, bench_out, bench_mode = "adaptive";
	std::optional<int> bench_level;
	std::optional<double> bench_eps;
	int bench_snapshots = 10;
	auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark with its default parameters");
	bench_cmd->add_option("name", bench_name, "Benchmark name")->required()->check(CLI::IsMember(benchmark_names()));
	bench_cmd->add_option("--level", bench_level, "Finest level");
	bench_cmd->add_option("--epsilon", bench_eps, "Fixed threshold (overrides the default policy)");
	bench_cmd->add_option("--mode", bench_mode, "adaptive or uniform")->check(CLI::IsMember({"adaptive", "uniform"}))->capture_default_str();
	bench_cmd->add_option("--snapshots", bench_snapshots, "Number of field snapshots")->capture_default_str();
	bench_cmd->add_option("-o,--output", bench_out, "Output directory (default: bench-<name>)");

	CLI11_PARSE(app, argc, argv);

	try {
		if (*run_cmd) return run(load_config(config_path), std::cout, std::cerr);
		if (*cut_cmd) return cmd_cut(cut_file, cut_axis, cut_at, cut_samples, cut_lo, cut_hi, cut_output);
		if (*cmp_cmd) return cmd_compare(cmp_a, cmp_b);
		if (*bench_cmd) {
			RunConfig c = default_config(bench_name);
			if (bench_level) c.level = *bench_level;
			if (bench_eps) c.spec.policy = ThresholdPolicy{ThresholdMode::Fixed, *bench_eps, c.spec.policy.detail_norm};
			c.adaptive = bench_mode == "adaptive";
			c.snapshots = bench_snapshots;
			c.output_dir = bench_out.empty() ? "bench-" + bench_name : bench_out;
			return run(c, std::cout, std::cerr);
		}
	} catch (const ConfigError& e) {
		std::cerr << "config error: " << e.what() << '\n';
		return 1;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}

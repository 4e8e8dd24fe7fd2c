#ifndef CARMEN_BENCHMARKS_HPP
#define CARMEN_BENCHMARKS_HPP

#include <string>
#include <vector>

#include "carmen/geometry.hpp"
#include "carmen/mr.hpp"
#include "carmen/state.hpp"
#include "carmen/tree.hpp"

namespace carmen {

enum class ReconnectionProfile { Smooth, Narrow };

struct BenchmarkSpec {
	std::string name;
	int dim = 2;
	Box domain;
	int default_level = 9;
	double t_end = 1.0;
	double gamma = 5.0 / 3.0;
	double cfl = 0.4;
	double alpha_p = 0.4;
	ThresholdPolicy policy;
	BoundarySet bc{BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic};
	// constant resistivity; the reconnection benchmark uses its own field
	double eta = 0.0;
	bool eta_field = false;
	ReconnectionProfile profile = ReconnectionProfile::Smooth;
	// data symmetric under x -> -x; x-fluxes are symmetrized (see FluxPlan)
	bool mirror_x = false;
};

/// Names accepted by benchmark_spec().
const std::vector<std::string>& benchmark_names();

/// Default parameters of a benchmark; throws std::invalid_argument for unknown names.
BenchmarkSpec benchmark_spec(const std::string& name);

/// Primitive initial state at a point.
PrimState orszag_tang_state(const Vec3& x, double gamma);
PrimState shock_cloud_state(const Vec3& x, int dim);
PrimState reconnection_state(const Vec3& x, ReconnectionProfile profile);

/// Localized resistivity of the reconnection setup.
double reconnection_eta(double x, double y);
inline constexpr double kReconnectionEta0 = 0.00075;

/// Gas model of a spec (gamma and resistivity).
GasModel gas_model(const BenchmarkSpec& spec);

/// Full tree at `level` with the spec's initial condition sampled at cell centers.
Tree initial_tree(const BenchmarkSpec& spec, int level);

Tree init_orszag_tang(int level);
Tree init_shock_cloud(int dim, int level);
Tree init_reconnection(int level, ReconnectionProfile profile = ReconnectionProfile::Smooth);

} // namespace carmen

#endif

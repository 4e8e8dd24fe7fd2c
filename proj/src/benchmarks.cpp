#include "carmen/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace carmen {

namespace {

constexpr double kPi = std::numbers::pi;

Box unit_box(int dim)
{
	Box b;
	b.lo = {0.0, 0.0, 0.0};
	b.hi = {1.0, 1.0, dim == 3 ? 1.0 : 0.0};
	return b;
}

constexpr BoundarySet kZeroGradient{BoundaryKind::ZeroGradient, BoundaryKind::ZeroGradient, BoundaryKind::ZeroGradient};

BenchmarkSpec shock_cloud(const std::string& name, int dim)
{
	BenchmarkSpec s;
	s.name = name;
	s.dim = dim;
	s.domain = unit_box(dim);
	s.default_level = dim == 3 ? 6 : 8;
	s.t_end = 0.06;
	s.policy = ThresholdPolicy{ThresholdMode::Harten, 0.01, DetailNorm::VectorBased};
	s.bc = kZeroGradient;
	return s;
}

} // namespace

const std::vector<std::string>& benchmark_names()
{
	static const std::vector<std::string> names{"orszag-tang", "shock-cloud-2d", "shock-cloud-3d", "shock-cloud-3d-resistive",
	                                            "magnetic-reconnection"};
	return names;
}

BenchmarkSpec benchmark_spec(const std::string& name)
{
	if (name == "orszag-tang") {
		BenchmarkSpec s;
		s.name = name;
		s.dim = 2;
		s.domain.lo = {0.0, 0.0, 0.0};
		s.domain.hi = {2.0 * kPi, 2.0 * kPi, 0.0};
		s.default_level = 9;
		s.t_end = kPi;
		s.policy = ThresholdPolicy{ThresholdMode::Fixed, 0.03, DetailNorm::VectorBased};
		return s;
	}
	if (name == "shock-cloud-2d") return shock_cloud(name, 2);
	if (name == "shock-cloud-3d") return shock_cloud(name, 3);
	if (name == "shock-cloud-3d-resistive") {
		BenchmarkSpec s = shock_cloud(name, 3);
		s.eta = 0.02;
		return s;
	}
	if (name == "magnetic-reconnection") {
		BenchmarkSpec s;
		s.name = name;
		s.dim = 2;
		s.domain.lo = {-0.5, -2.0, 0.0};
		s.domain.hi = {0.5, 2.0, 0.0};
		s.default_level = 9;
		s.t_end = 2.5;
		s.policy = ThresholdPolicy{ThresholdMode::Fixed, 0.005, DetailNorm::VectorBased};
		s.bc = kZeroGradient;
		s.eta_field = true;
		s.mirror_x = true;
		return s;
	}
	throw std::invalid_argument("unknown benchmark '" + name + "'");
}

PrimState orszag_tang_state(const Vec3& x, double gamma)
{
	PrimState w;
	w.rho = gamma * gamma;
	w.p = gamma;
	w.vel = {-std::sin(x[1]), std::sin(x[0]), 0.0};
	w.b = {-std::sin(x[1]), std::sin(2.0 * x[0]), 0.0};
	return w;
}

PrimState shock_cloud_state(const Vec3& x, int dim)
{
	PrimState w;
	if (x[0] <= 0.05) {
		w.rho = 3.86859;
		w.p = 167.345;
		w.vel = {0.0, 0.0, 0.0};
		w.b = {0.0, 2.1826182, -2.1826182};
		return w;
	}
	w.rho = 1.0;
	w.p = 1.0;
	w.vel = {11.2536, 0.0, 0.0};
	w.b = {0.0, 0.56418958, 0.56418958};
	double r2 = (x[0] - 0.25) * (x[0] - 0.25) + (x[1] - 0.5) * (x[1] - 0.5);
	if (dim == 3) r2 += (x[2] - 0.5) * (x[2] - 0.5);
	if (r2 <= 0.15 * 0.15) w.rho = 10.0;
	return w;
}

PrimState reconnection_state(const Vec3& x, ReconnectionProfile profile)
{
	PrimState w;
	w.rho = 1.0;
	w.p = 0.1;
	const double width = profile == ReconnectionProfile::Smooth ? 0.1 : 0.01;
	double by;
	if (x[0] < -0.05)
		by = -1.0;
	else if (x[0] > 0.05)
		by = 1.0;
	else
		by = std::sin(kPi * x[0] / width);
	w.b = {0.0, by, 0.0};
	return w;
}

double reconnection_eta(double x, double y)
{
	if (std::abs(x) > 0.05 || std::abs(y) > 0.2) return 0.0;
	return 0.25 * kReconnectionEta0 * (std::cos(kPi * x / 0.1) + 1.0) * (std::cos(kPi * y / 0.4) + 1.0);
}

GasModel gas_model(const BenchmarkSpec& spec)
{
	GasModel g;
	g.gamma = spec.gamma;
	if (spec.eta_field)
		g.resistivity = FieldResistivity{[](const Vec3& x) { return reconnection_eta(x[0], x[1]); }, kReconnectionEta0};
	else
		g.resistivity = ConstantResistivity{spec.eta};
	return g;
}

Tree initial_tree(const BenchmarkSpec& spec, int level)
{
	Tree tree(spec.dim, level, spec.domain, spec.bc);
	const double gamma = spec.gamma;
	if (spec.name == "orszag-tang")
		tree.init_uniform(level, [gamma](const Vec3& x) { return prim_to_cons(orszag_tang_state(x, gamma), gamma); });
	else if (spec.name == "magnetic-reconnection")
		tree.init_uniform(level, [gamma, p = spec.profile](const Vec3& x) { return prim_to_cons(reconnection_state(x, p), gamma); });
	else
		tree.init_uniform(level, [gamma, d = spec.dim](const Vec3& x) { return prim_to_cons(shock_cloud_state(x, d), gamma); });
	return tree;
}

Tree init_orszag_tang(int level) { return initial_tree(benchmark_spec("orszag-tang"), level); }

Tree init_shock_cloud(int dim, int level) { return initial_tree(benchmark_spec(dim == 3 ? "shock-cloud-3d" : "shock-cloud-2d"), level); }

Tree init_reconnection(int level, ReconnectionProfile profile)
{
	BenchmarkSpec spec = benchmark_spec("magnetic-reconnection");
	spec.profile = profile;
	return initial_tree(spec, level);
}

} // namespace carmen

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "carmen/benchmarks.hpp"
#include "carmen/evolve.hpp"
#include "test_support.hpp"

using namespace carmen;
using carmen::testing::max_abs_diff;

namespace {

constexpr double kGamma = 5.0 / 3.0;
constexpr double kPi = std::numbers::pi;
constexpr BoundarySet kPeriodic{BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic};
constexpr BoundarySet kOpen{BoundaryKind::ZeroGradient, BoundaryKind::ZeroGradient, BoundaryKind::ZeroGradient};

ConsState rest_state(double p)
{
	PrimState w;
	w.rho = 1.0;
	w.p = p;
	return prim_to_cons(w, kGamma);
}

ConsState smooth_state(const Vec3& x)
{
	PrimState w;
	w.rho = 1.0 + 0.3 * std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
	w.p = 1.0 + 0.1 * std::cos(2 * kPi * x[1]);
	w.vel = {0.5 * std::sin(2 * kPi * x[1]), 0.4 * std::cos(2 * kPi * x[0]), 0.1};
	w.b = {0.3 * std::cos(2 * kPi * x[1]), 0.2 * std::sin(2 * kPi * x[0]), 0.05};
	return prim_to_cons(w, kGamma);
}

SolverOptions options(bool adaptive, double eps)
{
	SolverOptions o;
	o.adaptive = adaptive;
	o.adapt.policy = ThresholdPolicy{ThresholdMode::Fixed, eps, DetailNorm::VectorBased};
	return o;
}

Solver make(int level, const BoundarySet& bc, const std::function<ConsState(const Vec3&)>& f, SolverOptions o, GasModel gas = {})
{
	Tree t(2, level, Box{}, bc);
	t.init_uniform(level, f);
	Solver s(std::move(t), gas, o);
	s.initialize();
	return s;
}

} // namespace

TEST_CASE("time step from the fastest wave")
{
	Tree t(2, 8, Box{}, kPeriodic);
	t.init_uniform(7, [](const Vec3&) { return rest_state(1.0); });
	const StepSize s = compute_dt(t, 0.4, GasModel{});
	CHECK(s.c_h == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
	CHECK(s.dt == doctest::Approx(2.421e-3).epsilon(1e-3));
	CHECK(s.dt == s.dt_hyp);
	CHECK(std::isinf(s.dt_res));

	t.init_uniform(8, [](const Vec3&) { return rest_state(1.0); });
	CHECK(compute_dt(t, 0.4, GasModel{}).dt_hyp == doctest::Approx(0.5 * s.dt_hyp).epsilon(1e-14));

	const GasModel resistive{kGamma, ConstantResistivity{0.5}};
	const StepSize r = compute_dt(t, 0.4, resistive);
	CHECK(r.dt_res == doctest::Approx(0.5 * 0.4 / (256.0 * 256.0) / (2 * 0.5)).epsilon(1e-14));
	CHECK(r.dt == std::min(r.dt_hyp, r.dt_res));
}

TEST_CASE("time step rejects states without pressure")
{
	Tree t(2, 4, Box{}, kPeriodic);
	t.init_uniform(4, [](const Vec3&) { return rest_state(0.0); });
	CHECK_THROWS_AS(compute_dt(t, 0.4, GasModel{}), UnphysicalState);
}

TEST_CASE("glm damping")
{
	CHECK(glm_damp(0.7, 0.0, 2.0, 0.1, 0.01) == 0.7);
	CHECK(glm_damp(1.0, std::log(2.0), 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("boundary index mapping")
{
	CHECK(apply_boundary(-1, 8, BoundaryKind::Periodic) == 7);
	CHECK(apply_boundary(8, 8, BoundaryKind::Periodic) == 0);
	CHECK(apply_boundary(-2, 8, BoundaryKind::Periodic) == 6);
	CHECK(apply_boundary(-1, 8, BoundaryKind::ZeroGradient) == 0);
	CHECK(apply_boundary(9, 8, BoundaryKind::ZeroGradient) == 7);
	CHECK(apply_boundary(3, 8, BoundaryKind::ZeroGradient) == 3);
}

TEST_CASE("uniform state is stationary")
{
	PrimState w;
	w.rho = 1.3;
	w.p = 0.7;
	w.vel = {0.4, -0.2, 0.1};
	w.b = {0.5, 0.3, -0.2};
	const ConsState u = prim_to_cons(w, kGamma);
	for (const auto& bc : {kPeriodic, kOpen}) {
		for (bool adaptive : {false, true}) {
			Solver s = make(5, bc, [&](const Vec3&) { return u; }, options(adaptive, 0.01));
			for (int n = 0; n < 20; ++n) s.step();
			double worst = 0.0;
			for (const auto& c : s.tree().leaves()) worst = std::max(worst, max_abs_diff(s.tree().avg(c), u));
			CHECK(worst <= 1e-13);
			if (adaptive) CHECK(s.tree().leaf_count() == 16);
		}
	}
}

TEST_CASE("advected entropy wave converges at second order")
{
	// rho = 1 + 0.01 sin(2 pi (x - t)), u = (1, 0, 0), p = 1, B = 0
	const double t_end = 0.25, amp = 0.01;
	double prev = 0.0;
	for (int level : {5, 6, 7}) {
		const double h = 1.0 / (1 << level);
		const double shape = std::sin(kPi * h) / (kPi * h);
		const auto wave = [&](const Vec3& x, double t) {
			PrimState w;
			w.rho = 1.0 + amp * shape * std::sin(2 * kPi * (x[0] - t));
			w.vel = {1.0, 0.0, 0.0};
			w.p = 1.0;
			return w;
		};
		Solver s = make(level, kPeriodic, [&](const Vec3& x) { return prim_to_cons(wave(x, 0.0), kGamma); }, options(false, 0.0));
		while (s.time().t < t_end) s.step(t_end);
		double err = 0.0;
		for (const auto& c : s.tree().leaves()) err += std::abs(s.tree().avg(c)[kRho] - wave(s.tree().center(c), t_end).rho) * h * h;
		if (prev > 0.0) {
			MESSAGE("level " << level << " L1 ratio " << prev / err);
			CHECK(prev / err >= 3.5);
		}
		prev = err;
	}
}

TEST_CASE("ideal periodic runs conserve mass and momentum")
{
	for (bool adaptive : {false, true}) {
		Solver s = make(6, kPeriodic, smooth_state, options(adaptive, 0.01));
		const StepRecord r0 = s.diagnostics();
		for (int n = 0; n < 100; ++n) s.step();
		const StepRecord r1 = s.diagnostics();
		CHECK(std::abs(r1.mass - r0.mass) <= 1e-11 * r0.mass);
		for (int a = 0; a < 3; ++a) CHECK(std::abs(r1.momentum[a] - r0.momentum[a]) <= 1e-11 * r0.momentum_scale);
		CHECK(std::abs(r1.energy - r0.energy) <= 1e-11 * r0.energy);
	}
}

TEST_CASE("zero threshold reproduces the uniform run")
{
	Solver u = make(5, kPeriodic, smooth_state, options(false, 0.0));
	Solver a = make(5, kPeriodic, smooth_state, options(true, 0.0));
	for (int n = 0; n < 10; ++n) {
		u.step();
		a.step();
	}
	REQUIRE(a.tree().leaf_count() == u.tree().leaf_count());
	double worst = 0.0;
	for (const auto& c : u.tree().leaves()) worst = std::max(worst, max_abs_diff(u.tree().avg(c), a.tree().avg(c)));
	CHECK(worst <= 1e-12);
	CHECK(a.time().t == u.time().t);
}

TEST_CASE("divergence cleaning keeps psi bounded")
{
	const BenchmarkSpec spec = benchmark_spec("orszag-tang");
	SolverOptions o = options(false, 0.0);
	o.alpha_p = spec.alpha_p;
	Solver s(initial_tree(spec, 6), gas_model(spec), o);
	s.initialize();
	double max_b = 0.0;
	while (s.time().t < 0.3) {
		const StepRecord r = s.step(0.3);
		max_b = 0.0;
		for (const auto& c : s.tree().leaves()) {
			const ConsState& u = s.tree().avg(c);
			max_b = std::max(max_b, std::sqrt(u[kBx] * u[kBx] + u[kBy] * u[kBy] + u[kBz] * u[kBz]));
		}
		CHECK(r.max_psi < max_b);
	}
}

TEST_CASE("unphysical stages are reported with their location")
{
	Tree t(2, 4, Box{}, kPeriodic);
	t.init_uniform(4, [](const Vec3& x) {
		PrimState w;
		w.rho = x[0] < 0.5 ? 1.0 : 0.01;
		w.p = x[0] < 0.5 ? 10.0 : 0.01;
		return prim_to_cons(w, kGamma);
	});
	t.build_virtual_leaves();
	const GasModel gas{};
	const FluxPlan plan(t, gas);
	const StepSize s = compute_dt(t, 0.4, gas);
	try {
		rk2_step(t, plan, 50.0 * s.dt, s.c_h, gas);
		FAIL("no exception");
	} catch (const UnphysicalState& e) {
		CHECK(e.where().stage == "stage 1");
		CHECK(e.where().level == 4);
	}
}

TEST_CASE("symmetrized x-fluxes keep reflected data reflected")
{
	// even: rho, p, u_y, B_x; odd: u_x, B_y, B_z, psi
	const auto state = [](const Vec3& x) {
		const double a = std::abs(x[0]), sx = x[0] < 0.0 ? -1.0 : 1.0;
		PrimState w;
		w.rho = 1.0 + 0.3 * std::sin(7.0 * a + 3.0 * x[1]);
		w.p = 0.5 + 0.2 * std::cos(5.0 * a - 2.0 * x[1]);
		w.vel = {sx * 0.4 * std::sin(9.0 * a), 0.3 * std::cos(4.0 * x[1] + a), 0.0};
		w.b = {0.2 * std::cos(6.0 * a + x[1]), sx * (0.5 + 0.3 * a), sx * 0.1 * std::sin(3.0 * x[1])};
		w.psi = sx * 0.01 * a;
		return prim_to_cons(w, kGamma);
	};
	Tree t(2, 5, Box{{-0.5, 0.0, 0.0}, {0.5, 1.0, 0.0}}, kOpen);
	t.init_uniform(5, state);
	t.build_virtual_leaves();
	const GasModel gas{kGamma, FieldResistivity{[](const Vec3& x) { return 0.01 * (1.0 + std::cos(x[0] * x[1])); }, 0.02}};
	const FluxPlan plan(t, gas, true);
	std::vector<ConsState> r;
	plan.residual(t, 1.7, gas, r);
	std::map<std::pair<int, int>, std::size_t> slot;
	for (std::size_t q = 0; q < plan.leaves().size(); ++q) slot[{plan.leaves()[q].i, plan.leaves()[q].j}] = q;
	bool exact = true;
	for (std::size_t q = 0; q < plan.leaves().size(); ++q) {
		const CellIndex& c = plan.leaves()[q];
		const ConsState& a = r[q];
		const ConsState& b = r[slot.at({31 - c.i, c.j})];
		for (int v = 0; v < kNumVars; ++v) {
			const bool odd = v == kMomX || v == kBy || v == kBz || v == kPsi;
			exact = exact && a[v] == (odd ? -b[v] : b[v]);
		}
	}
	CHECK(exact);
}

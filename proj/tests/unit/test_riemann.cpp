#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "carmen/riemann.hpp"
#include "test_support.hpp"

using namespace carmen;
using carmen::testing::max_abs;
using carmen::testing::max_abs_diff;
using carmen::testing::random_prim;

namespace {

constexpr double kGamma = 5.0 / 3.0;

// Toro's HLLC for the Euler equations with the same Davis speed bounds, used
// as an independent reference for the field-free limit of HLLD.
FluxVector hllc_euler(const PrimState& l, const PrimState& r, int n, double gamma)
{
	const auto euler_flux = [&](const PrimState& w) {
		const ConsState u = prim_to_cons(w, gamma);
		FluxVector f;
		const double un = w.vel[n];
		f[kRho] = w.rho * un;
		for (int d = 0; d < 3; ++d) f[kMomX + d] = w.rho * un * w.vel[d] + (d == n ? w.p : 0.0);
		f[kEnergy] = (u[kEnergy] + w.p) * un;
		return f;
	};
	const double cl = std::sqrt(gamma * l.p / l.rho), cr = std::sqrt(gamma * r.p / r.rho);
	const double sl = std::min(l.vel[n], r.vel[n]) - std::max(cl, cr);
	const double sr = std::max(l.vel[n], r.vel[n]) + std::max(cl, cr);
	const double ul = l.vel[n], ur = r.vel[n];
	const double sm = (r.p - l.p + l.rho * ul * (sl - ul) - r.rho * ur * (sr - ur)) / (l.rho * (sl - ul) - r.rho * (sr - ur));
	const auto star = [&](const PrimState& w, double s) {
		const ConsState u = prim_to_cons(w, gamma);
		const double un = w.vel[n];
		const double f = w.rho * (s - un) / (s - sm);
		ConsState q;
		q[kRho] = f;
		for (int d = 0; d < 3; ++d) q[kMomX + d] = f * (d == n ? sm : w.vel[d]);
		q[kEnergy] = f * (u[kEnergy] / w.rho + (sm - un) * (sm + w.p / (w.rho * (s - un))));
		return q;
	};
	if (sl >= 0) return euler_flux(l);
	if (sr <= 0) return euler_flux(r);
	if (sm >= 0) return euler_flux(l) + (star(l, sl) - prim_to_cons(l, gamma)) * sl;
	return euler_flux(r) + (star(r, sr) - prim_to_cons(r, gamma)) * sr;
}

PrimState mirror(PrimState w, int n)
{
	w.vel[n] = -w.vel[n];
	w.b[n] = -w.b[n];
	return w;
}

} // namespace

TEST_CASE("mc slope")
{
	CHECK(mc_slope(1.0, 2.0, 3.0) == 1.0);
	CHECK(mc_slope(1.0, 2.0, 1.0) == 0.0);
	CHECK(mc_slope(0.0, 1.0, 4.0) == 2.0);

	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> d(-1.0, 1.0);
	for (int n = 0; n < 10000; ++n) {
		const double a = d(rng), b = d(rng), c = d(rng);
		const double s = mc_slope(a, b, c);
		if ((b - a) * (c - b) <= 0.0) {
			CHECK(s == 0.0);
		} else {
			CHECK(std::abs(s) <= std::abs(0.5 * (c - a)) + 1e-15);
			CHECK(s * (c - a) >= 0.0);
		}
	}
}

TEST_CASE("muscl face states")
{
	const auto row_of = [](double a, double b, double c, double d) {
		std::array<ConsState, 4> row;
		const double v[4] = {a, b, c, d};
		for (int q = 0; q < 4; ++q) row[static_cast<std::size_t>(q)][kRho] = v[q];
		return row;
	};
	auto p = muscl_states(row_of(2, 2, 2, 2), Axis::X);
	CHECK(p.left[kRho] == 2.0);
	CHECK(p.right[kRho] == 2.0);
	p = muscl_states(row_of(0, 1, 2, 3), Axis::X);
	CHECK(p.left[kRho] == 1.5);
	CHECK(p.right[kRho] == 1.5);
	p = muscl_states(row_of(0, 0, 1, 1), Axis::X);
	CHECK(p.left[kRho] == 0.0);
	CHECK(p.right[kRho] == 1.0);
}

TEST_CASE("glm subsystem")
{
	auto g = glm_subsystem(0.3, 0.2, 0.3, 0.2, 2.0);
	CHECK(g.bn == doctest::Approx(0.3));
	CHECK(g.psi == doctest::Approx(0.2));
	g = glm_subsystem(-1.0, 0.0, 1.0, 0.0, 1.0);
	CHECK(g.bn == 0.0);
	CHECK(g.psi == -1.0);
}

TEST_CASE("signal speeds")
{
	PrimState w;
	w.rho = 1.0;
	w.p = 1.0;
	const ConsState u = prim_to_cons(w, kGamma);
	auto s = signal_speeds({u, u, Axis::X}, kGamma);
	REQUIRE(s.has_value());
	const double cf = std::sqrt(kGamma);
	CHECK(s->s_l == doctest::Approx(-cf));
	CHECK(s->s_r == doctest::Approx(cf));
	CHECK(std::abs(s->s_m) <= 1e-15);

	w.vel = {5.0, 0.0, 0.0};
	const ConsState fast = prim_to_cons(w, kGamma);
	s = signal_speeds({fast, fast, Axis::X}, kGamma);
	REQUIRE(s.has_value());
	CHECK(s->s_l > 0.0);

	std::mt19937_64 rng(17);
	int checked = 0;
	for (int n = 0; n < 10000; ++n) {
		const InterfacePair pair{prim_to_cons(random_prim(rng), kGamma), prim_to_cons(random_prim(rng), kGamma), static_cast<Axis>(n % 3)};
		const auto sp = signal_speeds(pair, kGamma);
		if (!sp) continue;
		++checked;
		CHECK(sp->s_l <= sp->s_l_star);
		CHECK(sp->s_l_star <= sp->s_m);
		CHECK(sp->s_m <= sp->s_r_star);
		CHECK(sp->s_r_star <= sp->s_r);
	}
	CHECK(checked > 9000);
}

TEST_CASE("hlld consistency")
{
	std::mt19937_64 rng(23);
	std::uniform_real_distribution<double> ch(0.1, 10.0);
	double worst = 0.0;
	for (int n = 0; n < 1000; ++n) {
		const ConsState u = prim_to_cons(random_prim(rng), kGamma);
		const double c = ch(rng);
		const Axis ax = static_cast<Axis>(n % 3);
		worst = std::max(worst, max_abs_diff(hlld_flux({u, u, ax}, c, kGamma), physical_flux(u, ax, c, kGamma)));
	}
	CHECK(worst <= 1e-12);
}

TEST_CASE("hlld is upwind for supersonic flow")
{
	PrimState l, r;
	l.rho = 1.0;
	l.p = 0.5;
	l.vel = {20.0, 0.5, -0.2};
	l.b = {0.3, 1.0, 0.2};
	l.psi = 0.1;
	r = l;
	r.rho = 2.0;
	r.p = 0.8;
	r.vel = {19.0, 0.0, 0.1};
	r.b = {0.3, -0.5, 0.0};
	const FluxVector f = hlld_flux(l, r, Axis::X, 1.0, kGamma);
	CHECK(max_abs_diff(f, physical_flux(l, Axis::X, 1.0, kGamma)) <= 1e-12);
}

TEST_CASE("hlld resolves a stationary contact")
{
	PrimState l, r;
	l.rho = 1.0;
	r.rho = 0.125;
	l.p = r.p = 1.0;
	l.b = r.b = {0.0, 0.7, -0.3};
	const FluxVector f = hlld_flux(l, r, Axis::X, 1.0, kGamma);
	CHECK(std::abs(f[kRho]) <= 1e-13);
	CHECK(std::abs(f[kEnergy]) <= 1e-13);
	CHECK(f[kMomX] == doctest::Approx(1.0 + 0.5 * (0.49 + 0.09)));
}

TEST_CASE("mirrored states negate the mass flux")
{
	std::mt19937_64 rng(29);
	for (int n = 0; n < 1000; ++n) {
		const PrimState l = random_prim(rng), r = random_prim(rng);
		const int ax = n % 3;
		const FluxVector f = hlld_flux(l, r, static_cast<Axis>(ax), 1.3, kGamma);
		const FluxVector g = hlld_flux(mirror(r, ax), mirror(l, ax), static_cast<Axis>(ax), 1.3, kGamma);
		CHECK(g[kRho] == doctest::Approx(-f[kRho]).epsilon(1e-12).scale(1.0));
	}
}

TEST_CASE("hlld without magnetic field matches HLLC")
{
	std::mt19937_64 rng(31);
	double worst = 0.0;
	for (int n = 0; n < 100; ++n) {
		PrimState l = random_prim(rng), r = random_prim(rng);
		l.b = r.b = {0.0, 0.0, 0.0};
		l.psi = r.psi = 0.0;
		const int ax = n % 3;
		const FluxVector f = hlld_flux(l, r, static_cast<Axis>(ax), 1.0, kGamma);
		const FluxVector g = hllc_euler(l, r, ax, kGamma);
		worst = std::max(worst, max_abs_diff(f, g) / std::max(1.0, max_abs(g)));
	}
	CHECK(worst <= 1e-12);
}

TEST_CASE("first-order shock tube creates no new extrema")
{
	// Sod problem with zero slopes: density must stay between the initial states.
	const int n = 200;
	const double dx = 1.0 / n;
	std::vector<ConsState> u(n);
	for (int i = 0; i < n; ++i) {
		PrimState w;
		w.rho = (i + 0.5) * dx < 0.5 ? 1.0 : 0.125;
		w.p = (i + 0.5) * dx < 0.5 ? 1.0 : 0.1;
		u[static_cast<std::size_t>(i)] = prim_to_cons(w, 1.4);
	}
	double t = 0.0;
	while (t < 0.15) {
		double smax = 0.0;
		for (const auto& c : u) {
			const PrimState w = cons_to_prim(c, 1.4);
			smax = std::max(smax, std::abs(w.vel[0]) + fast_speed(w, Axis::X, 1.4));
		}
		const double dt = 0.5 * dx / smax;
		std::vector<FluxVector> f(n + 1);
		for (int i = 0; i <= n; ++i) {
			const ConsState& l = u[static_cast<std::size_t>(std::max(i - 1, 0))];
			const ConsState& r = u[static_cast<std::size_t>(std::min(i, n - 1))];
			f[static_cast<std::size_t>(i)] = hlld_flux({l, r, Axis::X}, 1.0, 1.4);
		}
		for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] -= (f[static_cast<std::size_t>(i + 1)] - f[static_cast<std::size_t>(i)]) * (dt / dx);
		t += dt;
	}
	for (int i = 0; i < n; ++i) {
		CHECK(u[static_cast<std::size_t>(i)][kRho] <= 1.0 + 1e-12);
		CHECK(u[static_cast<std::size_t>(i)][kRho] >= 0.125 - 1e-12);
	}
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "carmen/resistive.hpp"
#include "carmen/state.hpp"
#include "test_support.hpp"

using namespace carmen;
using carmen::testing::max_abs_diff;
using carmen::testing::random_prim;

namespace {

constexpr double kGamma = 5.0 / 3.0;

// Flux written out from the conservation-law terms, independent of the library.
FluxVector reference_flux(const PrimState& w, int n, double c_h, double gamma)
{
	const double b2 = norm2(w.b);
	const double un = w.vel[n];
	const double bn = w.b[n];
	const double energy = w.p / (gamma - 1.0) + 0.5 * w.rho * norm2(w.vel) + 0.5 * b2;
	FluxVector f;
	f[kRho] = w.rho * un;
	for (int d = 0; d < 3; ++d) {
		f[kMomX + d] = w.rho * un * w.vel[d] - bn * w.b[d] + (d == n ? w.p + 0.5 * b2 : 0.0);
		f[kBx + d] = un * w.b[d] - bn * w.vel[d] + (d == n ? w.psi : 0.0);
	}
	f[kEnergy] = (energy + w.p + 0.5 * b2) * un - bn * dot(w.vel, w.b);
	f[kPsi] = c_h * c_h * bn;
	return f;
}

Stencil<Vec3> sample_b(const std::function<Vec3(const Vec3&)>& field, const Vec3& x0, const Vec3& h)
{
	Stencil<Vec3> s;
	for (int dz = -1; dz <= 1; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) s.at(dx, dy, dz) = field({x0[0] + dx * h[0], x0[1] + dy * h[1], x0[2] + dz * h[2]});
	return s;
}

Stencil<double> constant_eta(double eta)
{
	Stencil<double> s;
	s.v.fill(eta);
	return s;
}

} // namespace

TEST_CASE("prim_to_cons applies the constitutive law")
{
	PrimState w;
	w.rho = 1.0;
	w.p = 1.0;
	CHECK(prim_to_cons(w, kGamma)[kEnergy] == doctest::Approx(1.5).epsilon(1e-15));

	// Orszag-Tang origin: rho = gamma^2, p = gamma, u = B = 0
	w.rho = kGamma * kGamma;
	w.p = kGamma;
	CHECK(prim_to_cons(w, kGamma)[kEnergy] == doctest::Approx(2.5).epsilon(1e-15));

	// Orszag-Tang at (pi/2, pi/2)
	w.rho = 25.0 / 9.0;
	w.p = 5.0 / 3.0;
	w.vel = {-1.0, 1.0, 0.0};
	w.b = {-1.0, 0.0, 0.0};
	const ConsState u = prim_to_cons(w, kGamma);
	CHECK(u[kEnergy] == doctest::Approx(2.5 + 25.0 / 9.0 + 0.5).epsilon(1e-14));
	CHECK(u[kMomX] == doctest::Approx(-25.0 / 9.0));
	CHECK(u[kBx] == -1.0);
}

TEST_CASE("cons_to_prim inverts prim_to_cons")
{
	const ConsState u = ConsState::make(1.0, {0, 0, 0}, 1.5, {0, 0, 0}, 0.0);
	CHECK(cons_to_prim(u, kGamma).p == doctest::Approx(1.0).epsilon(1e-15));

	std::mt19937_64 rng(7);
	double worst = 0.0;
	for (int n = 0; n < 1000; ++n) {
		const ConsState a = prim_to_cons(random_prim(rng), kGamma);
		const ConsState b = prim_to_cons(cons_to_prim(a, kGamma), kGamma);
		for (int v = 0; v < kNumVars; ++v) worst = std::max(worst, std::abs(a[v] - b[v]) / std::max(1.0, std::abs(a[v])));
	}
	CHECK(worst <= 1e-13);
}

TEST_CASE("unphysical states are rejected")
{
	// energy below kinetic + magnetic energy
	const ConsState neg_p = ConsState::make(1.0, {1.0, 0, 0}, 0.4, {0.5, 0, 0}, 0.0);
	CHECK_THROWS_AS(cons_to_prim(neg_p, kGamma), UnphysicalState);
	CHECK_FALSE(try_cons_to_prim(neg_p, kGamma).has_value());
	const ConsState neg_rho = ConsState::make(-1.0, {0, 0, 0}, 1.0, {0, 0, 0}, 0.0);
	CHECK_THROWS_AS(cons_to_prim(neg_rho, kGamma), UnphysicalState);
	CHECK_FALSE(is_physical(neg_rho, kGamma));
}

TEST_CASE("physical flux")
{
	PrimState w;
	w.rho = 1.0;
	w.p = 1.0;
	const FluxVector f = physical_flux(w, Axis::X, 1.0, kGamma);
	for (int v = 0; v < kNumVars; ++v) CHECK(f[v] == (v == kMomX ? 1.0 : 0.0));

	PrimState g;
	g.psi = 2.0;
	g.b = {0.5, 0.0, 0.0};
	const FluxVector fg = physical_flux(g, Axis::X, 1.0, kGamma);
	CHECK(fg[kBx] == 2.0);
	CHECK(fg[kPsi] == 0.5);

	w.vel = {1.0, 0.0, 0.0};
	CHECK(physical_flux(w, Axis::X, 1.0, kGamma)[kRho] == 1.0);

	std::mt19937_64 rng(11);
	for (int n = 0; n < 200; ++n) {
		const PrimState r = random_prim(rng);
		for (int a = 0; a < 3; ++a) {
			const FluxVector lib = physical_flux(prim_to_cons(r, kGamma), static_cast<Axis>(a), 1.7, kGamma);
			CHECK(max_abs_diff(lib, reference_flux(r, a, 1.7, kGamma)) <= 1e-12);
		}
	}
}

TEST_CASE("fast magnetosonic speed")
{
	PrimState w;
	w.rho = 1.0;
	w.p = 1.0;
	CHECK(fast_speed(w, Axis::X, kGamma) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
	w.b = {1.0, 0.0, 0.0};
	CHECK(fast_speed(w, Axis::X, kGamma) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
	w.b = {0.0, 1.0, 0.0};
	CHECK(fast_speed(w, Axis::X, kGamma) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));

	std::mt19937_64 rng(3);
	for (int n = 0; n < 10000; ++n) {
		const PrimState r = random_prim(rng);
		const Axis ax = static_cast<Axis>(n % 3);
		const double cf = fast_speed(r, ax, kGamma);
		CHECK(cf >= sound_speed(r, kGamma) * (1.0 - 1e-14));
		CHECK(cf >= std::abs(r.b[index_of(ax)]) / std::sqrt(r.rho) * (1.0 - 1e-14));
	}
}

TEST_CASE("resistive source vanishes for uniform B and ideal gas")
{
	const Vec3 h{0.1, 0.1, 0.1};
	const auto uniform = sample_b([](const Vec3&) { return Vec3{0.3, -1.0, 2.0}; }, {0, 0, 0}, h);
	auto s = resistive_source(uniform, constant_eta(0.7), h);
	CHECK(s.energy == 0.0);
	CHECK(s.b == Vec3{0, 0, 0});

	const auto curved = sample_b([](const Vec3& x) { return Vec3{std::sin(x[1]), x[0] * x[2], std::cos(x[0])}; }, {0.2, 0.1, 0.4}, h);
	s = resistive_source(curved, constant_eta(0.0), h);
	CHECK(s.energy == 0.0);
	CHECK(s.b == Vec3{0, 0, 0});
}

TEST_CASE("resistive source for B = (0, 0, y) gives eta")
{
	const double eta = 0.013;
	for (double h0 : {0.1, 0.05, 0.025}) {
		const Vec3 h{h0, h0, h0};
		const auto b = sample_b([](const Vec3& x) { return Vec3{0.0, 0.0, x[1]}; }, {0.3, 0.7, 0.1}, h);
		const auto s = resistive_source(b, constant_eta(eta), h);
		CHECK(std::abs(s.energy - eta) <= 1e-14);
		CHECK(std::abs(s.b[0]) + std::abs(s.b[1]) + std::abs(s.b[2]) <= 1e-14);
	}
}

TEST_CASE("resistive source converges at second order on a curved field")
{
	// B = (0, 0, sin y): J = (cos y, 0, 0), div(B x eta J) = eta cos 2y, -curl(eta J) = (0, 0, -eta sin y)
	const double eta = 0.02, y0 = 0.4;
	double prev_e = 0.0, prev_b = 0.0;
	for (int r = 0; r < 4; ++r) {
		const double h0 = 0.2 / (1 << r);
		const Vec3 h{h0, h0, h0};
		const auto b = sample_b([](const Vec3& x) { return Vec3{0.0, 0.0, std::sin(x[1])}; }, {0.0, y0, 0.0}, h);
		const auto s = resistive_source(b, constant_eta(eta), h);
		const double err_e = std::abs(s.energy - eta * std::cos(2.0 * y0));
		const double err_b = std::abs(s.b[2] + eta * std::sin(y0));
		if (r > 0) {
			CHECK(std::log2(prev_e / err_e) >= 1.9);
			CHECK(std::log2(prev_b / err_b) >= 1.9);
		}
		prev_e = err_e;
		prev_b = err_b;
	}
}

TEST_CASE("central-difference divergence")
{
	const Vec3 h{0.1, 0.2, 0.3};
	CHECK(div_b(sample_b([](const Vec3&) { return Vec3{1, 2, 3}; }, {0, 0, 0}, h), h) == 0.0);
	CHECK(div_b(sample_b([](const Vec3& x) { return Vec3{x[0], 0, 0}; }, {0.5, 0.5, 0.5}, h), h) == doctest::Approx(1.0).epsilon(1e-13));
	CHECK(div_b(sample_b([](const Vec3& x) { return Vec3{x[1], 0, 0}; }, {0.5, 0.5, 0.5}, h), h) == 0.0);
	// |B| below the floor is skipped
	CHECK(divergence_measure(sample_b([](const Vec3& x) { return Vec3{1e-14 * x[0], 0, 0}; }, {0, 0, 0}, h), h, 1.0) == 0.0);
}

TEST_CASE("divergence of a curl field")
{
	// A = (0, 0, x^2 y + y^2 / 2 + x y): B = curl A = (dAz/dy, -dAz/dx, 0)
	const auto field = [](const Vec3& x) { return Vec3{x[0] * x[0] + x[1] + x[0], -(2.0 * x[0] * x[1] + x[1]), 0.0}; };
	for (double h0 : {0.1, 0.05, 0.025}) {
		const Vec3 h{h0, h0, h0};
		// cell averages of the linear-in-each-direction B components equal center values,
		// except the x^2 term whose average adds h^2/12, constant in y, so the difference cancels
		Stencil<Vec3> s;
		for (int dz = -1; dz <= 1; ++dz)
			for (int dy = -1; dy <= 1; ++dy)
				for (int dx = -1; dx <= 1; ++dx) {
					Vec3 b = field({0.3 + dx * h0, 0.2 + dy * h0, dz * h0});
					b[0] += h0 * h0 / 12.0;
					s.at(dx, dy, dz) = b;
				}
		CHECK(std::abs(div_b(s, h)) <= 1e-12 + 10.0 * h0 * h0);
	}
}

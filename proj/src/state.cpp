#include "carmen/state.hpp"

#include <algorithm>

namespace carmen {

UnphysicalState::UnphysicalState(const std::string& what, CellLocation where)
	: std::runtime_error(what), where_(std::move(where))
{
}

double GasModel::eta_at(const Vec3& x) const
{
	if (const auto* c = std::get_if<ConstantResistivity>(&resistivity)) return c->eta;
	const auto& f = std::get<FieldResistivity>(resistivity);
	return f.eta ? f.eta(x) : 0.0;
}

double GasModel::eta_max() const
{
	if (const auto* c = std::get_if<ConstantResistivity>(&resistivity)) return c->eta;
	return std::get<FieldResistivity>(resistivity).eta_max;
}

ConsState prim_to_cons(const PrimState& w, double gamma)
{
	const Vec3 mom{w.rho * w.vel[0], w.rho * w.vel[1], w.rho * w.vel[2]};
	const double energy = w.p / (gamma - 1.0) + 0.5 * w.rho * norm2(w.vel) + 0.5 * norm2(w.b);
	return ConsState::make(w.rho, mom, energy, w.b, w.psi);
}

double pressure(const ConsState& u, double gamma)
{
	const double kinetic = 0.5 * norm2(u.mom()) / u.rho();
	const double magnetic = 0.5 * norm2(u.b());
	return (gamma - 1.0) * (u.energy() - kinetic - magnetic);
}

std::optional<PrimState> try_cons_to_prim(const ConsState& u, double gamma)
{
	if (!(u.rho() > 0.0)) return std::nullopt;
	const double p = pressure(u, gamma);
	if (!(p > 0.0)) return std::nullopt;
	const double inv = 1.0 / u.rho();
	PrimState w;
	w.rho = u.rho();
	w.vel = {u[kMomX] * inv, u[kMomY] * inv, u[kMomZ] * inv};
	w.p = p;
	w.b = u.b();
	w.psi = u.psi();
	return w;
}

PrimState cons_to_prim(const ConsState& u, double gamma)
{
	if (!(u.rho() > 0.0)) throw UnphysicalState("non-positive density " + std::to_string(u.rho()));
	auto w = try_cons_to_prim(u, gamma);
	if (!w) throw UnphysicalState("non-positive pressure " + std::to_string(pressure(u, gamma)));
	return *w;
}

bool is_physical(const ConsState& u, double gamma) { return try_cons_to_prim(u, gamma).has_value(); }

FluxVector physical_flux(const PrimState& w, Axis dir, double c_h, double gamma)
{
	const int n = index_of(dir);
	const double un = w.vel[n];
	const double bn = w.b[n];
	const double b2 = norm2(w.b);
	const double pt = w.p + 0.5 * b2;
	const double energy = w.p / (gamma - 1.0) + 0.5 * w.rho * norm2(w.vel) + 0.5 * b2;

	FluxVector f;
	f[kRho] = w.rho * un;
	for (int k = 0; k < 3; ++k) {
		f[kMomX + k] = w.rho * un * w.vel[k] - bn * w.b[k];
		f[kBx + k] = un * w.b[k] - bn * w.vel[k];
	}
	f[kMomX + n] += pt;
	f[kBx + n] = w.psi;
	f[kEnergy] = (energy + pt) * un - bn * dot(w.vel, w.b);
	f[kPsi] = c_h * c_h * bn;
	return f;
}

FluxVector physical_flux(const ConsState& u, Axis dir, double c_h, double gamma)
{
	return physical_flux(cons_to_prim(u, gamma), dir, c_h, gamma);
}

double sound_speed(const PrimState& w, double gamma) { return std::sqrt(gamma * w.p / w.rho); }

double fast_speed(const PrimState& w, Axis dir, double gamma)
{
	const double a2 = gamma * w.p / w.rho;
	const double b2 = norm2(w.b) / w.rho;
	const double bn2 = w.b[index_of(dir)] * w.b[index_of(dir)] / w.rho;
	const double sum = a2 + b2;
	const double disc = std::max(0.0, sum * sum - 4.0 * a2 * bn2);
	return std::sqrt(0.5 * (sum + std::sqrt(disc)));
}

} // namespace carmen

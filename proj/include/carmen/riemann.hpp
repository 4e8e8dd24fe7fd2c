#ifndef CARMEN_RIEMANN_HPP
#define CARMEN_RIEMANN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "carmen/state.hpp"

namespace carmen {

struct InterfacePair {
	ConsState left;
	ConsState right;
	Axis dir = Axis::X;
};

struct SignalSpeeds {
	double s_l = 0.0;
	double s_l_star = 0.0;
	double s_m = 0.0;
	double s_r_star = 0.0;
	double s_r = 0.0;
};

/// Monotonized-central limited slope: minmod(2 dl, 2 dr, (dl + dr) / 2).
inline double mc_slope(double u_minus, double u_0, double u_plus)
{
	const double dl = u_0 - u_minus;
	const double dr = u_plus - u_0;
	if (dl * dr <= 0.0) return 0.0;
	const double dc = 0.5 * (u_plus - u_minus);
	const double s = dc > 0.0 ? 1.0 : -1.0;
	const double m = std::min(std::min(2.0 * std::abs(dl), 2.0 * std::abs(dr)), std::abs(dc));
	return s * m;
}

ConsState mc_slope(const ConsState& u_minus, const ConsState& u_0, const ConsState& u_plus);

/// Face states between row[1] and row[2] from four consecutive same-level averages.
InterfacePair muscl_states(const std::array<ConsState, 4>& row, Axis dir);

struct GlmState {
	double bn = 0.0;
	double psi = 0.0;
};

/// Exact solution of the decoupled (B_n, psi) subsystem at the interface.
GlmState glm_subsystem(double bn_l, double psi_l, double bn_r, double psi_r, double c_h);

/// HLLD wave fan estimate; nullopt when the fan is degenerate (caller uses HLL).
std::optional<SignalSpeeds> signal_speeds(const InterfacePair& pair, double gamma);

/// Two-state HLL flux for the 8 MHD components, GLM components from the
/// exact subsystem.
FluxVector hll_flux(const InterfacePair& pair, double c_h, double gamma);

/// HLLD flux with GLM; falls back to HLL for degenerate fans.
FluxVector hlld_flux(const InterfacePair& pair, double c_h, double gamma);
FluxVector hlld_flux(const PrimState& left, const PrimState& right, Axis dir, double c_h, double gamma);

/// Counter for HLL fallbacks taken by hlld_flux (per thread).
long long hll_fallback_count();

} // namespace carmen

#endif

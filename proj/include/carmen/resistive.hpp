#ifndef CARMEN_RESISTIVE_HPP
#define CARMEN_RESISTIVE_HPP

#include <array>

#include "carmen/geometry.hpp"
#include "carmen/state.hpp"

namespace carmen {

/// 3x3x3 neighborhood of cell-centered samples, indexed with stencil_slot().
/// 2D callers fill the dz = +-1 layers with copies of the dz = 0 layer so all
/// z-derivatives vanish.
template <class T>
struct Stencil {
	std::array<T, 27> v{};

	T& at(int dx, int dy, int dz) { return v[stencil_slot(dx, dy, dz)]; }
	const T& at(int dx, int dy, int dz) const { return v[stencil_slot(dx, dy, dz)]; }
};

struct ResistiveSource {
	double energy = 0.0;
	Vec3 b{};
};

/// Resistive right-hand side at the stencil center:
///   dE/dt += div(B x eta curl B),  dB/dt += -curl(eta curl B).
/// J is formed on the six cell faces (normal derivative across the face,
/// tangential derivatives averaged from the two adjacent cells), then both
/// terms are central differences of the face values.
ResistiveSource resistive_source(const Stencil<Vec3>& b, const Stencil<double>& eta, const Vec3& spacing);

/// Central-difference divergence of B at the stencil center.
double div_b(const Stencil<Vec3>& b, const Vec3& spacing);

/// Cell contribution to the divergence diagnostic: vol * |div B| / |B|,
/// or 0 where |B| < 1e-12.
double divergence_measure(const Stencil<Vec3>& b, const Vec3& spacing, double volume);

} // namespace carmen

#endif

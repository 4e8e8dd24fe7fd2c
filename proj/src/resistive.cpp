#include "carmen/resistive.hpp"

#include <cmath>

namespace carmen {

namespace {

Vec3 offset(int axis, int s)
{
	Vec3 o{0, 0, 0};
	o[axis] = s;
	return o;
}

const Vec3& sample(const Stencil<Vec3>& b, const Vec3& o)
{
	return b.at(static_cast<int>(o[0]), static_cast<int>(o[1]), static_cast<int>(o[2]));
}

struct FaceTerms {
	Vec3 eta_j{};     // eta * curl B at the face
	double energy = 0; // normal component of B x eta J
};

// Face between the center and its neighbor at +1 (side = +1) or -1 (side = -1)
// along axis.
FaceTerms face_terms(const Stencil<Vec3>& b, const Stencil<double>& eta, const Vec3& h, int axis, int side)
{
	const Vec3 lo_off = side > 0 ? Vec3{0, 0, 0} : offset(axis, -1);
	const Vec3 hi_off = side > 0 ? offset(axis, 1) : Vec3{0, 0, 0};
	const Vec3& b_lo = sample(b, lo_off);
	const Vec3& b_hi = sample(b, hi_off);

	// grad[d][c] = d B_c / d x_d at the face
	std::array<Vec3, 3> grad{};
	for (int c = 0; c < 3; ++c) grad[axis][c] = (b_hi[c] - b_lo[c]) / h[axis];
	for (int t = 0; t < 3; ++t) {
		if (t == axis) continue;
		Vec3 lo_p = lo_off, lo_m = lo_off, hi_p = hi_off, hi_m = hi_off;
		lo_p[t] += 1; lo_m[t] -= 1; hi_p[t] += 1; hi_m[t] -= 1;
		for (int c = 0; c < 3; ++c) {
			const double d_lo = sample(b, lo_p)[c] - sample(b, lo_m)[c];
			const double d_hi = sample(b, hi_p)[c] - sample(b, hi_m)[c];
			grad[t][c] = 0.5 * (d_lo + d_hi) / (2.0 * h[t]);
		}
	}
	const Vec3 curl{grad[1][2] - grad[2][1], grad[2][0] - grad[0][2], grad[0][1] - grad[1][0]};

	const auto eta_at = [&](const Vec3& o) {
		return eta.at(static_cast<int>(o[0]), static_cast<int>(o[1]), static_cast<int>(o[2]));
	};
	const double eta_face = 0.5 * (eta_at(lo_off) + eta_at(hi_off));
	Vec3 bf;
	for (int c = 0; c < 3; ++c) bf[c] = 0.5 * (b_lo[c] + b_hi[c]);

	FaceTerms f;
	for (int c = 0; c < 3; ++c) f.eta_j[c] = eta_face * curl[c];
	const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
	f.energy = bf[a1] * f.eta_j[a2] - bf[a2] * f.eta_j[a1];
	return f;
}

} // namespace

ResistiveSource resistive_source(const Stencil<Vec3>& b, const Stencil<double>& eta, const Vec3& spacing)
{
	ResistiveSource s;
	for (int d = 0; d < 3; ++d) {
		const FaceTerms plus = face_terms(b, eta, spacing, d, +1);
		const FaceTerms minus = face_terms(b, eta, spacing, d, -1);
		s.energy += (plus.energy - minus.energy) / spacing[d];
		// -(curl V)_c = -sum_{d,e} eps_{cde} dV_e/dx_d
		const int e1 = (d + 1) % 3, e2 = (d + 2) % 3;
		const double dv_e1 = (plus.eta_j[e1] - minus.eta_j[e1]) / spacing[d];
		const double dv_e2 = (plus.eta_j[e2] - minus.eta_j[e2]) / spacing[d];
		// eps_{e2, d, e1} = +1 and eps_{e1, d, e2} = -1
		s.b[e2] -= dv_e1;
		s.b[e1] += dv_e2;
	}
	return s;
}

double div_b(const Stencil<Vec3>& b, const Vec3& spacing)
{
	double div = 0.0;
	div += (b.at(1, 0, 0)[0] - b.at(-1, 0, 0)[0]) / (2.0 * spacing[0]);
	div += (b.at(0, 1, 0)[1] - b.at(0, -1, 0)[1]) / (2.0 * spacing[1]);
	div += (b.at(0, 0, 1)[2] - b.at(0, 0, -1)[2]) / (2.0 * spacing[2]);
	return div;
}

double divergence_measure(const Stencil<Vec3>& b, const Vec3& spacing, double volume)
{
	const double bmag = std::sqrt(norm2(b.at(0, 0, 0)));
	if (bmag < 1e-12) return 0.0;
	return volume * std::abs(div_b(b, spacing)) / bmag;
}

} // namespace carmen

#ifndef CARMEN_MR_HPP
#define CARMEN_MR_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "carmen/geometry.hpp"
#include "carmen/state.hpp"

namespace carmen {

/*
Cell-average multiresolution operators on dyadic grids.

Projection is the mean of the 2^D children. Prediction is the tensor product
of the 1D second-degree interpolation

    child(s) = U_i + s/8 (U_{i+1} - U_{i-1}),  s = -1 lower, +1 upper child,

so in 2D/3D the cross terms carry weights s_x s_y / 64 and s_x s_y s_z / 512
on the corner differences. The projection of the predicted children returns
the parent exactly, and cell averages of polynomials of degree <= 2 per
coordinate are reproduced exactly.
*/

/// 3^D neighborhood centered on a coarse cell, indexed with stencil_slot().
/// In 2D only the dz = 0 layer is read.
template <class T>
using Neighborhood = std::array<T, 27>;

template <class T>
using Children = std::array<T, 8>;

/// Children are summed pairwise along x, then y, then z, so reflected data
/// gives bitwise reflected results.
template <class T>
T project(std::span<const T> children)
{
	std::array<T, 8> sum{};
	std::size_t n = children.size();
	for (std::size_t c = 0; c < n; ++c) sum[c] = children[c];
	while (n > 1) {
		n /= 2;
		for (std::size_t c = 0; c < n; ++c) sum[c] = sum[2 * c] + sum[2 * c + 1];
	}
	return sum[0] * (1.0 / static_cast<double>(children.size()));
}

namespace detail {
// 1D weight of neighbor offset o in {-1, 0, 1} for child side s in {-1, +1}
constexpr double weight_1d(int s, int o) { return o == 0 ? 1.0 : 0.125 * s * o; }
} // namespace detail

// Weighted sum over offsets -1, 0, +1 with the two outer terms added first,
// so a reflection of the axis reproduces the result bitwise.
template <class T, class F>
T sum_axis(int s, F&& term)
{
	return (term(-1) * detail::weight_1d(s, -1) + term(1) * detail::weight_1d(s, 1)) + term(0);
}

template <class T>
Children<T> predict(const Neighborhood<T>& nb, int dim)
{
	Children<T> out{};
	const int nchild = children_per_cell(dim);
	for (int c = 0; c < nchild; ++c) {
		const int sx = (c & 1) ? 1 : -1, sy = (c & 2) ? 1 : -1, sz = (c & 4) ? 1 : -1;
		const auto plane = [&](int dz) {
			return sum_axis<T>(sy, [&](int dy) { return sum_axis<T>(sx, [&](int dx) { return nb[stencil_slot(dx, dy, dz)]; }); });
		};
		out[c] = dim == 3 ? sum_axis<T>(sz, plane) : plane(0);
	}
	return out;
}

/// d = exact - predicted for all 2^D children. The entries sum to zero, so
/// the first 2^D - 1 form the independent set.
template <class T>
Children<T> compute_detail(const Children<T>& exact, const Children<T>& predicted, int dim)
{
	Children<T> d{};
	for (int c = 0; c < children_per_cell(dim); ++c) d[c] = exact[c] - predicted[c];
	return d;
}

/// Recovers the dependent detail from the 2^D - 1 stored ones.
template <class T>
T dependent_detail(std::span<const T> independent)
{
	T sum = independent[0];
	for (std::size_t c = 1; c < independent.size(); ++c) sum = sum + independent[c];
	return sum * -1.0;
}

enum class DetailNorm { Scalar, VectorBased };

enum class ThresholdMode { Fixed, Harten };

struct ThresholdPolicy {
	ThresholdMode mode = ThresholdMode::Fixed;
	double epsilon = 0.0; // epsilon for Fixed, epsilon^0 for Harten
	DetailNorm detail_norm = DetailNorm::VectorBased;
};

/// Normalization maxima over the current leaves. Values below 1e-12 are
/// treated as 1 by detail_norm().
struct FieldMaxima {
	double rho = 1.0;
	Vec3 mom{1.0, 1.0, 1.0};
	double energy = 1.0;
	Vec3 b{1.0, 1.0, 1.0};
};

class FieldMaximaBuilder {
public:
	void add(const ConsState& u);
	void merge(const FieldMaximaBuilder& other);
	FieldMaxima result() const;

private:
	std::array<double, 8> m_{};
};

double detail_norm(const ConsState& d, const FieldMaxima& maxima, DetailNorm mode, int dim);

double threshold_level(const ThresholdPolicy& policy, int level, int max_level, int dim, double domain_volume);

/// True if a detail of normalized size d_norm survives thresholding at eps.
/// Details with d_norm <= eps are discarded; eps == 0 disables thresholding.
inline bool keep_detail(double d_norm, double eps) { return eps <= 0.0 || d_norm > eps; }

/// Full-grid cell averages at one level, x fastest.
template <class T>
struct UniformField {
	int dim = 2;
	int level = 0;
	std::vector<T> values;

	int cells_per_axis() const { return 1 << level; }
	std::size_t index(int i, int j, int k) const
	{
		const std::size_t n = static_cast<std::size_t>(cells_per_axis());
		return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
	}
	T& at(int i, int j, int k) { return values[index(i, j, k)]; }
	const T& at(int i, int j, int k) const { return values[index(i, j, k)]; }

	static UniformField make(int dim, int level)
	{
		UniformField f;
		f.dim = dim;
		f.level = level;
		std::size_t n = 1;
		for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(1) << level;
		f.values.assign(n, T{});
		return f;
	}
};

template <class T>
struct MultiscaleRepresentation {
	int dim = 2;
	UniformField<T> coarse;
	// details[l] holds, for every cell of level l, its 2^D - 1 independent details
	std::vector<std::vector<T>> details;
};

template <class T>
Neighborhood<T> gather_neighborhood(const UniformField<T>& f, int i, int j, int k, const BoundarySet& bc)
{
	Neighborhood<T> nb{};
	const int n = f.cells_per_axis();
	const int zr = f.dim == 3 ? 1 : 0;
	for (int dz = -zr; dz <= zr; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) {
				const int ii = apply_boundary(i + dx, n, bc[0]);
				const int jj = apply_boundary(j + dy, n, bc[1]);
				const int kk = f.dim == 3 ? apply_boundary(k + dz, n, bc[2]) : 0;
				nb[stencil_slot(dx, dy, dz)] = f.at(ii, jj, kk);
			}
	return nb;
}

template <class T>
UniformField<T> project_level(const UniformField<T>& fine)
{
	auto coarse = UniformField<T>::make(fine.dim, fine.level - 1);
	const int n = coarse.cells_per_axis();
	const int nz = fine.dim == 3 ? n : 1;
	const int nc = children_per_cell(fine.dim);
	for (int k = 0; k < nz; ++k)
		for (int j = 0; j < n; ++j)
			for (int i = 0; i < n; ++i) {
				Children<T> ch{};
				for (int c = 0; c < nc; ++c) {
					const CellIndex ci = CellIndex{coarse.level, i, j, k}.child(c);
					ch[c] = fine.at(ci.i, ci.j, ci.k);
				}
				coarse.at(i, j, k) = project<T>(std::span<const T>(ch.data(), nc));
			}
	return coarse;
}

template <class T>
UniformField<T> predict_level(const UniformField<T>& coarse, const BoundarySet& bc)
{
	auto fine = UniformField<T>::make(coarse.dim, coarse.level + 1);
	const int n = coarse.cells_per_axis();
	const int nz = coarse.dim == 3 ? n : 1;
	const int nc = children_per_cell(coarse.dim);
	for (int k = 0; k < nz; ++k)
		for (int j = 0; j < n; ++j)
			for (int i = 0; i < n; ++i) {
				const auto pred = predict(gather_neighborhood(coarse, i, j, k, bc), coarse.dim);
				for (int c = 0; c < nc; ++c) {
					const CellIndex ci = CellIndex{coarse.level, i, j, k}.child(c);
					fine.at(ci.i, ci.j, ci.k) = pred[c];
				}
			}
	return fine;
}

/// Forward transform down to level 0.
template <class T>
MultiscaleRepresentation<T> mr_transform(const UniformField<T>& fine, const BoundarySet& bc)
{
	MultiscaleRepresentation<T> rep;
	rep.dim = fine.dim;
	rep.details.resize(static_cast<std::size_t>(fine.level));
	const int nc = children_per_cell(fine.dim);
	UniformField<T> current = fine;
	for (int l = fine.level - 1; l >= 0; --l) {
		UniformField<T> coarse = project_level(current);
		const UniformField<T> pred = predict_level(coarse, bc);
		auto& dl = rep.details[static_cast<std::size_t>(l)];
		dl.resize(coarse.values.size() * static_cast<std::size_t>(nc - 1));
		const int n = coarse.cells_per_axis();
		const int nz = fine.dim == 3 ? n : 1;
		std::size_t slot = 0;
		for (int k = 0; k < nz; ++k)
			for (int j = 0; j < n; ++j)
				for (int i = 0; i < n; ++i)
					for (int c = 0; c < nc - 1; ++c) {
						const CellIndex ci = CellIndex{l, i, j, k}.child(c);
						dl[slot++] = current.at(ci.i, ci.j, ci.k) - pred.at(ci.i, ci.j, ci.k);
					}
		current = std::move(coarse);
	}
	rep.coarse = std::move(current);
	return rep;
}

/// Inverse transform: predict, then add details level by level.
template <class T>
UniformField<T> mr_inverse(const MultiscaleRepresentation<T>& rep, const BoundarySet& bc)
{
	UniformField<T> current = rep.coarse;
	const int nc = children_per_cell(rep.dim);
	for (std::size_t l = 0; l < rep.details.size(); ++l) {
		UniformField<T> fine = predict_level(current, bc);
		const auto& dl = rep.details[l];
		const int n = current.cells_per_axis();
		const int nz = rep.dim == 3 ? n : 1;
		std::size_t slot = 0;
		for (int k = 0; k < nz; ++k)
			for (int j = 0; j < n; ++j)
				for (int i = 0; i < n; ++i) {
					const std::span<const T> indep(dl.data() + slot, static_cast<std::size_t>(nc - 1));
					for (int c = 0; c < nc - 1; ++c) {
						const CellIndex ci = CellIndex{static_cast<int>(l), i, j, k}.child(c);
						fine.at(ci.i, ci.j, ci.k) = fine.at(ci.i, ci.j, ci.k) + indep[static_cast<std::size_t>(c)];
					}
					const CellIndex last = CellIndex{static_cast<int>(l), i, j, k}.child(nc - 1);
					fine.at(last.i, last.j, last.k) = fine.at(last.i, last.j, last.k) + dependent_detail(indep);
					slot += static_cast<std::size_t>(nc - 1);
				}
		current = std::move(fine);
	}
	return current;
}

} // namespace carmen

#endif

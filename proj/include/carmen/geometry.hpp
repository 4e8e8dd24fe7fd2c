#ifndef CARMEN_GEOMETRY_HPP
#define CARMEN_GEOMETRY_HPP

#include <array>
#include <cstdint>

#include "carmen/state.hpp"

namespace carmen {

enum class BoundaryKind { Periodic, ZeroGradient };

using BoundarySet = std::array<BoundaryKind, 3>;

struct Box {
	Vec3 lo{0.0, 0.0, 0.0};
	Vec3 hi{1.0, 1.0, 1.0};

	double extent(int axis) const { return hi[axis] - lo[axis]; }
	double volume(int dim) const
	{
		double v = 1.0;
		for (int a = 0; a < dim; ++a) v *= extent(a);
		return v;
	}
	bool contains(const Vec3& x, int dim) const
	{
		for (int a = 0; a < dim; ++a)
			if (x[a] < lo[a] || x[a] > hi[a]) return false;
		return true;
	}
};

/// Maps a possibly out-of-range index at a level with n cells per axis onto
/// the interior cell that supplies its ghost value: wrap for periodic, nearest
/// interior cell for zero-gradient.
constexpr int apply_boundary(int index, int n, BoundaryKind kind)
{
	if (index >= 0 && index < n) return index;
	if (kind == BoundaryKind::Periodic) {
		const int r = index % n;
		return r < 0 ? r + n : r;
	}
	return index < 0 ? 0 : n - 1;
}

struct CellIndex {
	int level = 0;
	int i = 0, j = 0, k = 0;

	int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
	int& operator[](int axis) { return axis == 0 ? i : (axis == 1 ? j : k); }

	CellIndex parent() const { return {level - 1, i >> 1, j >> 1, k >> 1}; }
	/// child number c has bit d set for the upper half along axis d
	CellIndex child(int c) const { return {level + 1, 2 * i + (c & 1), 2 * j + ((c >> 1) & 1), 2 * k + ((c >> 2) & 1)}; }
	int child_number() const { return (i & 1) | ((j & 1) << 1) | ((k & 1) << 2); }

	friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

inline constexpr int children_per_cell(int dim) { return 1 << dim; }
inline constexpr int neighborhood_size(int dim) { return dim == 2 ? 9 : 27; }

/// Flat offset into a 3x3x3 neighborhood, offsets in {-1,0,1}.
inline constexpr int stencil_slot(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

} // namespace carmen

#endif

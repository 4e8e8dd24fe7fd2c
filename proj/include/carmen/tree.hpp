#ifndef CARMEN_TREE_HPP
#define CARMEN_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "carmen/geometry.hpp"
#include "carmen/mr.hpp"
#include "carmen/state.hpp"

namespace carmen {

enum class NodeStatus : std::uint8_t { Absent = 0, Leaf, Internal, Virtual };

inline bool is_real(NodeStatus s) { return s == NodeStatus::Leaf || s == NodeStatus::Internal; }

/// Leaves refined by one level after coarsening: those whose own detail is
/// significant, or every leaf below the finest level.
enum class SafetyRefinement { Significant, All };

struct AdaptOptions {
	ThresholdPolicy policy;
	// coarsest level that coarsening may produce
	int min_level = 2;
	SafetyRefinement safety = SafetyRefinement::Significant;
};

struct AdaptStats {
	std::size_t merged = 0;
	std::size_t refined = 0;
	std::size_t graded_splits = 0;
};

/*! Graded dyadic tree of cells.

Every level keeps dense arrays of averages and node status; the tree topology
lives in the status flags and children are addressed by index arithmetic
(children of (l, i, j, k) are (l + 1, 2i + m, 2j + p, 2k + q)).

Leaf nodes carry the evolved solution. Internal nodes hold the projection of
their children. Virtual nodes complete the same-level stencils of real leaves
next to coarser regions; their values are predicted from the parent level and
they are never evolved.
*/
class Tree {
public:
	Tree(int dim, int max_level, const Box& domain, const BoundarySet& bc);

	int dim() const { return dim_; }
	int max_level() const { return max_level_; }
	const Box& domain() const { return domain_; }
	const BoundarySet& boundaries() const { return bc_; }

	int cells_per_axis(int level) const { return 1 << level; }
	/// Cell size per axis; axes beyond dim() report 1.
	Vec3 spacing(int level) const;
	double cell_volume(int level) const;
	double domain_volume() const { return domain_.volume(dim_); }
	Vec3 center(const CellIndex& c) const;
	/// Number of cells of the full grid at the finest level, 2^(D L).
	std::size_t full_grid_cells() const;

	NodeStatus status(const CellIndex& c) const { return levels_[c.level].status[flat(c)]; }
	ConsState& avg(const CellIndex& c) { return levels_[c.level].avg[flat(c)]; }
	const ConsState& avg(const CellIndex& c) const { return levels_[c.level].avg[flat(c)]; }
	/// Normalized size of the cell's own detail from the last adapt() (0 if none).
	double detail_size(const CellIndex& c) const { return levels_[c.level].dnorm[flat(c)]; }

	std::size_t flat(const CellIndex& c) const;
	CellIndex unflat(int level, std::size_t idx) const;
	std::size_t level_size(int level) const { return levels_[level].status.size(); }
	NodeStatus status_at(int level, std::size_t idx) const { return levels_[level].status[idx]; }
	ConsState* level_data(int level) { return levels_[level].avg.data(); }
	const ConsState* level_data(int level) const { return levels_[level].avg.data(); }

	/// True if c + offset lies outside the domain before boundary mapping.
	bool outside(const CellIndex& c, int dx, int dy, int dz) const;
	/// Same-level neighbor with the boundary mapping applied.
	CellIndex neighbor(const CellIndex& c, int dx, int dy, int dz) const;

	/// Full tree with all leaves at `level`; the sampler returns the leaf average
	/// given the cell center.
	void init_uniform(int level, const std::function<ConsState(const Vec3&)>& sampler);

	/// Replaces the tree by the given leaves; their ancestors become internal
	/// nodes. Throws std::invalid_argument if the leaves overlap or leave gaps.
	void assign_leaves(const std::vector<std::pair<CellIndex, ConsState>>& leaves);

	/// Recomputes internal averages bottom-up from the leaves.
	void project_internal();

	/// Detail computation, thresholding, merging, safety refinement, grading
	/// and virtual-leaf construction.
	AdaptStats adapt(const AdaptOptions& opts);

	/// Splits leaves until adjacent leaves (faces and corners) differ by at
	/// most one level. Returns the number of splits.
	std::size_t enforce_gradedness();
	bool is_graded() const;

	/// Completes the stencils of all real leaves (3^D box plus two cells along
	/// each axis) with virtual nodes.
	void build_virtual_leaves();
	/// Re-predicts virtual values after the leaves changed.
	void refresh_virtual_leaves();
	void clear_virtual_leaves();

	/// Replaces a leaf by 2^D predicted children.
	void split(const CellIndex& leaf);
	/// Replaces the children of an internal node by the node itself.
	void merge(const CellIndex& parent);

	/// Real leaves ordered by level, then by flat index.
	std::vector<CellIndex> leaves() const;
	std::size_t leaf_count() const;
	std::size_t virtual_count() const { return virtuals_.size(); }
	const std::vector<CellIndex>& virtual_nodes() const { return virtuals_; }
	int finest_leaf_level() const;

	/// Same-level 3^D neighborhood; missing nodes are created as virtual nodes.
	Neighborhood<ConsState> neighborhood(const CellIndex& c);
	/// Read-only variant: every neighbor must exist.
	Neighborhood<ConsState> neighborhood_existing(const CellIndex& c) const;

	/// Makes sure a node exists at c, creating virtual ancestors as needed.
	void ensure(const CellIndex& c);

	/// Full-grid field at `level`: real nodes contribute their averages,
	/// everything else is predicted from the coarser level (details zeroed).
	/// Internal averages must be current.
	UniformField<ConsState> reconstruct(int level) const;

	/// Leaf-volume-weighted sum of one conservative component.
	double integral(int var) const;

private:
	struct Level {
		std::vector<ConsState> avg;
		std::vector<NodeStatus> status;
		std::vector<double> dnorm;
	};

	void set_status(const CellIndex& c, NodeStatus s) { levels_[c.level].status[flat(c)] = s; }
	bool merge_keeps_grading(const CellIndex& parent) const;
	Children<ConsState> predicted_children(const CellIndex& parent);
	CellIndex covering_leaf(const CellIndex& c) const;

	int dim_;
	int max_level_;
	Box domain_;
	BoundarySet bc_;
	std::vector<Level> levels_;
	std::vector<CellIndex> virtuals_;
};

/// True if density and internal energy are positive.
bool admissible(const ConsState& u);

} // namespace carmen

#endif

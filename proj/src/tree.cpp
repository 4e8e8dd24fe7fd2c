#include "carmen/tree.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace carmen {

bool admissible(const ConsState& u)
{
	const double rho = u[kRho];
	if (!(rho > 0.0)) return false;
	const double kinetic = 0.5 * norm2(u.mom()) / rho;
	const double magnetic = 0.5 * norm2(u.b());
	return u[kEnergy] - kinetic - magnetic > 0.0;
}

Tree::Tree(int dim, int max_level, const Box& domain, const BoundarySet& bc)
	: dim_(dim), max_level_(max_level), domain_(domain), bc_(bc)
{
	if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
	if (max_level < 0 || max_level > 14) throw std::invalid_argument("max_level out of range");
	levels_.resize(static_cast<std::size_t>(max_level) + 1);
	for (int l = 0; l <= max_level; ++l) {
		std::size_t n = 1;
		for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(1) << l;
		auto& lv = levels_[static_cast<std::size_t>(l)];
		lv.avg.assign(n, ConsState{});
		lv.status.assign(n, NodeStatus::Absent);
		lv.dnorm.assign(n, 0.0);
	}
	levels_[0].status[0] = NodeStatus::Leaf;
}

Vec3 Tree::spacing(int level) const
{
	Vec3 h{1.0, 1.0, 1.0};
	const double n = static_cast<double>(cells_per_axis(level));
	for (int a = 0; a < dim_; ++a) h[a] = domain_.extent(a) / n;
	return h;
}

double Tree::cell_volume(int level) const
{
	const Vec3 h = spacing(level);
	double v = 1.0;
	for (int a = 0; a < dim_; ++a) v *= h[a];
	return v;
}

Vec3 Tree::center(const CellIndex& c) const
{
	// measured from the box midpoint so mirrored cells get exactly mirrored centers
	const Vec3 h = spacing(c.level);
	const double half = 0.5 * cells_per_axis(c.level);
	Vec3 x{0.0, 0.0, 0.0};
	for (int a = 0; a < dim_; ++a) x[a] = 0.5 * (domain_.lo[a] + domain_.hi[a]) + (c[a] + 0.5 - half) * h[a];
	return x;
}

std::size_t Tree::full_grid_cells() const { return level_size(max_level_); }

std::size_t Tree::flat(const CellIndex& c) const
{
	const std::size_t n = static_cast<std::size_t>(cells_per_axis(c.level));
	const std::size_t k = dim_ == 3 ? static_cast<std::size_t>(c.k) : 0;
	return static_cast<std::size_t>(c.i) + n * (static_cast<std::size_t>(c.j) + n * k);
}

CellIndex Tree::unflat(int level, std::size_t idx) const
{
	const std::size_t n = static_cast<std::size_t>(cells_per_axis(level));
	CellIndex c{level, static_cast<int>(idx % n), static_cast<int>((idx / n) % n), 0};
	if (dim_ == 3) c.k = static_cast<int>(idx / (n * n));
	return c;
}

bool Tree::outside(const CellIndex& c, int dx, int dy, int dz) const
{
	const int n = cells_per_axis(c.level);
	const int off[3] = {dx, dy, dz};
	for (int a = 0; a < dim_; ++a) {
		const int q = c[a] + off[a];
		if (q < 0 || q >= n) return true;
	}
	return false;
}

CellIndex Tree::neighbor(const CellIndex& c, int dx, int dy, int dz) const
{
	const int n = cells_per_axis(c.level);
	CellIndex r = c;
	r.i = apply_boundary(c.i + dx, n, bc_[0]);
	r.j = apply_boundary(c.j + dy, n, bc_[1]);
	r.k = dim_ == 3 ? apply_boundary(c.k + dz, n, bc_[2]) : 0;
	return r;
}

void Tree::init_uniform(int level, const std::function<ConsState(const Vec3&)>& sampler)
{
	if (level < 0 || level > max_level_) throw std::invalid_argument("init level out of range");
	virtuals_.clear();
	for (int l = 0; l <= max_level_; ++l) {
		auto& lv = levels_[static_cast<std::size_t>(l)];
		const NodeStatus s = l < level ? NodeStatus::Internal : (l == level ? NodeStatus::Leaf : NodeStatus::Absent);
		std::fill(lv.status.begin(), lv.status.end(), s);
		std::fill(lv.dnorm.begin(), lv.dnorm.end(), 0.0);
		if (l > level) std::fill(lv.avg.begin(), lv.avg.end(), ConsState{});
	}
	auto& lv = levels_[static_cast<std::size_t>(level)];
	for (std::size_t idx = 0; idx < lv.avg.size(); ++idx) lv.avg[idx] = sampler(center(unflat(level, idx)));
	project_internal();
}

void Tree::assign_leaves(const std::vector<std::pair<CellIndex, ConsState>>& leaves)
{
	virtuals_.clear();
	for (auto& lv : levels_) {
		std::fill(lv.status.begin(), lv.status.end(), NodeStatus::Absent);
		std::fill(lv.dnorm.begin(), lv.dnorm.end(), 0.0);
	}
	if (leaves.empty()) throw std::invalid_argument("empty leaf set");
	for (const auto& [c, value] : leaves) {
		const int n = cells_per_axis(c.level);
		bool in_range = c.level >= 0 && c.level <= max_level_;
		for (int a = 0; a < 3 && in_range; ++a) in_range = (a < dim_ ? c[a] >= 0 && c[a] < n : c[a] == 0);
		if (!in_range) throw std::invalid_argument("leaf index out of range");
		if (status(c) != NodeStatus::Absent) throw std::invalid_argument("overlapping leaves");
		set_status(c, NodeStatus::Leaf);
		avg(c) = value;
		for (CellIndex a = c; a.level > 0;) {
			a = a.parent();
			if (status(a) == NodeStatus::Leaf) throw std::invalid_argument("overlapping leaves");
			if (status(a) == NodeStatus::Internal) break;
			set_status(a, NodeStatus::Internal);
		}
	}
	const int nc = children_per_cell(dim_);
	for (int l = 0; l < max_level_; ++l)
		for (std::size_t idx = 0; idx < level_size(l); ++idx) {
			if (status_at(l, idx) != NodeStatus::Internal) continue;
			const CellIndex p = unflat(l, idx);
			for (int c = 0; c < nc; ++c)
				if (status(p.child(c)) == NodeStatus::Absent) throw std::invalid_argument("leaves do not tile the domain");
		}
	project_internal();
}

namespace {

ConsState children_mean(const Tree& t, const CellIndex& p, int nc)
{
	Children<ConsState> ch{};
	for (int c = 0; c < nc; ++c) ch[c] = t.avg(p.child(c));
	return project<ConsState>(std::span<const ConsState>(ch.data(), static_cast<std::size_t>(nc)));
}

} // namespace

void Tree::project_internal()
{
	const int nc = children_per_cell(dim_);
	for (int l = max_level_ - 1; l >= 0; --l) {
		auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx) {
			if (lv.status[idx] != NodeStatus::Internal) continue;
			const CellIndex p = unflat(l, idx);
			lv.avg[idx] = children_mean(*this, p, nc);
		}
	}
}

void Tree::ensure(const CellIndex& c)
{
	if (status(c) != NodeStatus::Absent) return;
	assert(c.level > 0);
	const CellIndex p = c.parent();
	ensure(p);
	const int zr = dim_ == 3 ? 1 : 0;
	for (int dz = -zr; dz <= zr; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) ensure(neighbor(p, dx, dy, dz));
	const auto pred = predict(neighborhood_existing(p), dim_);
	const ConsState& v = pred[static_cast<std::size_t>(c.child_number())];
	avg(c) = admissible(v) ? v : avg(p);
	set_status(c, NodeStatus::Virtual);
	virtuals_.push_back(c);
}

Neighborhood<ConsState> Tree::neighborhood(const CellIndex& c)
{
	const int zr = dim_ == 3 ? 1 : 0;
	for (int dz = -zr; dz <= zr; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) ensure(neighbor(c, dx, dy, dz));
	return neighborhood_existing(c);
}

Neighborhood<ConsState> Tree::neighborhood_existing(const CellIndex& c) const
{
	Neighborhood<ConsState> nb{};
	const int zr = dim_ == 3 ? 1 : 0;
	for (int dz = -zr; dz <= zr; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) {
				const CellIndex q = neighbor(c, dx, dy, dz);
				assert(status(q) != NodeStatus::Absent);
				nb[stencil_slot(dx, dy, dz)] = avg(q);
			}
	return nb;
}

Children<ConsState> Tree::predicted_children(const CellIndex& parent)
{
	auto pred = predict(neighborhood(parent), dim_);
	const int nc = children_per_cell(dim_);
	for (int c = 0; c < nc; ++c)
		if (!admissible(pred[static_cast<std::size_t>(c)])) {
			// piecewise-constant prediction keeps positivity
			for (int q = 0; q < nc; ++q) pred[static_cast<std::size_t>(q)] = avg(parent);
			break;
		}
	return pred;
}

void Tree::split(const CellIndex& leaf)
{
	assert(status(leaf) == NodeStatus::Leaf && leaf.level < max_level_);
	const auto pred = predicted_children(leaf);
	for (int c = 0; c < children_per_cell(dim_); ++c) {
		const CellIndex ch = leaf.child(c);
		avg(ch) = pred[static_cast<std::size_t>(c)];
		levels_[ch.level].dnorm[flat(ch)] = 0.0;
		set_status(ch, NodeStatus::Leaf);
	}
	set_status(leaf, NodeStatus::Internal);
}

void Tree::merge(const CellIndex& parent)
{
	assert(status(parent) == NodeStatus::Internal);
	const int nc = children_per_cell(dim_);
	avg(parent) = children_mean(*this, parent, nc);
	for (int c = 0; c < nc; ++c) set_status(parent.child(c), NodeStatus::Absent);
	set_status(parent, NodeStatus::Leaf);
}

CellIndex Tree::covering_leaf(const CellIndex& c) const
{
	CellIndex a = c;
	while (a.level > 0 && !is_real(status(a))) a = a.parent();
	return a;
}

bool Tree::merge_keeps_grading(const CellIndex& p) const
{
	// After the merge p is a leaf at level l; every real neighbor region must
	// not contain leaves finer than l + 1 next to p.
	const int zr = dim_ == 3 ? 1 : 0;
	const int nc = children_per_cell(dim_);
	for (int dz = -zr; dz <= zr; ++dz)
		for (int dy = -1; dy <= 1; ++dy)
			for (int dx = -1; dx <= 1; ++dx) {
				if (dx == 0 && dy == 0 && dz == 0) continue;
				if (outside(p, dx, dy, dz)) {
					bool skip = false;
					const int off[3] = {dx, dy, dz};
					const int n = cells_per_axis(p.level);
					for (int a = 0; a < dim_; ++a) {
						const int q = p[a] + off[a];
						if ((q < 0 || q >= n) && bc_[a] == BoundaryKind::ZeroGradient) skip = true;
					}
					if (skip) continue;
				}
				const CellIndex nb = neighbor(p, dx, dy, dz);
				if (status(nb) != NodeStatus::Internal) continue;
				const int off[3] = {dx, dy, dz};
				for (int c = 0; c < nc; ++c) {
					bool adjacent = true;
					for (int a = 0; a < dim_; ++a) {
						const int bit = (c >> a) & 1;
						if ((off[a] == -1 && bit != 1) || (off[a] == 1 && bit != 0)) adjacent = false;
					}
					if (adjacent && status(nb.child(c)) == NodeStatus::Internal) return false;
				}
			}
	return true;
}

AdaptStats Tree::adapt(const AdaptOptions& opts)
{
	AdaptStats stats;
	clear_virtual_leaves();
	project_internal();

	FieldMaximaBuilder mb;
	for (int l = 0; l <= max_level_; ++l) {
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (lv.status[idx] == NodeStatus::Leaf) mb.add(lv.avg[idx]);
	}
	const FieldMaxima maxima = mb.result();
	const int nc = children_per_cell(dim_);

	// (a) details of every child of an internal node; significance of the
	// parent is the largest normalized detail among its children
	std::vector<std::vector<double>> sig(static_cast<std::size_t>(max_level_));
	for (int l = max_level_ - 1; l >= 0; --l) {
		auto& lv = levels_[static_cast<std::size_t>(l)];
		auto& sl = sig[static_cast<std::size_t>(l)];
		sl.assign(lv.status.size(), 0.0);
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx) {
			if (lv.status[idx] != NodeStatus::Internal) continue;
			const CellIndex p = unflat(l, idx);
			const auto pred = predict(neighborhood(p), dim_);
			double s = 0.0;
			for (int c = 0; c < nc; ++c) {
				const CellIndex ch = p.child(c);
				const double dn = detail_norm(avg(ch) - pred[static_cast<std::size_t>(c)], maxima, opts.policy.detail_norm, dim_);
				levels_[ch.level].dnorm[flat(ch)] = dn;
				s = std::max(s, dn);
			}
			sl[idx] = s;
		}
	}
	clear_virtual_leaves();

	// (b) coarsening, finest parents first
	const double vol = domain_volume();
	const int lmin = std::max(0, opts.min_level);
	for (int l = max_level_ - 1; l >= lmin; --l) {
		const double eps = threshold_level(opts.policy, l, max_level_, dim_, vol);
		auto& lv = levels_[static_cast<std::size_t>(l)];
		const auto& sl = sig[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx) {
			if (lv.status[idx] != NodeStatus::Internal) continue;
			if (keep_detail(sl[idx], eps)) continue;
			// a parent whose own detail is significant would be split again in (c)
			if (l > 0 && keep_detail(lv.dnorm[idx], threshold_level(opts.policy, l - 1, max_level_, dim_, vol))) continue;
			const CellIndex p = unflat(l, idx);
			bool leaf_children = true;
			for (int c = 0; c < nc && leaf_children; ++c) leaf_children = status(p.child(c)) == NodeStatus::Leaf;
			if (!leaf_children || !merge_keeps_grading(p)) continue;
			merge(p);
			++stats.merged;
		}
	}

	// (c) safety refinement
	const bool all = opts.safety == SafetyRefinement::All;
	std::vector<CellIndex> to_refine;
	for (int l = all ? 0 : 1; l < max_level_; ++l) {
		const double eps = l > 0 ? threshold_level(opts.policy, l - 1, max_level_, dim_, vol) : 0.0;
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (lv.status[idx] == NodeStatus::Leaf && (all || keep_detail(lv.dnorm[idx], eps))) to_refine.push_back(unflat(l, idx));
	}
	for (const auto& c : to_refine) split(c);
	stats.refined = to_refine.size();
	clear_virtual_leaves();

	// (d) grading, (e) virtual leaves
	stats.graded_splits = enforce_gradedness();
	build_virtual_leaves();
	return stats;
}

std::size_t Tree::enforce_gradedness()
{
	clear_virtual_leaves();
	std::size_t splits = 0;
	const int zr = dim_ == 3 ? 1 : 0;
	for (int l = max_level_; l >= 2; --l) {
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		std::vector<CellIndex> level_leaves;
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (lv.status[idx] == NodeStatus::Leaf) level_leaves.push_back(unflat(l, idx));
		for (const auto& c : level_leaves)
			for (int dz = -zr; dz <= zr; ++dz)
				for (int dy = -1; dy <= 1; ++dy)
					for (int dx = -1; dx <= 1; ++dx) {
						if (dx == 0 && dy == 0 && dz == 0) continue;
						const CellIndex nb = neighbor(c, dx, dy, dz);
						if (is_real(status(nb))) continue;
						const CellIndex target = nb.parent();
						while (!is_real(status(target))) {
							split(covering_leaf(target));
							++splits;
						}
					}
	}
	clear_virtual_leaves();
	return splits;
}

bool Tree::is_graded() const
{
	const int zr = dim_ == 3 ? 1 : 0;
	for (int l = 2; l <= max_level_; ++l) {
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx) {
			if (lv.status[idx] != NodeStatus::Leaf) continue;
			const CellIndex c = unflat(l, idx);
			for (int dz = -zr; dz <= zr; ++dz)
				for (int dy = -1; dy <= 1; ++dy)
					for (int dx = -1; dx <= 1; ++dx) {
						const CellIndex nb = neighbor(c, dx, dy, dz);
						if (!is_real(status(nb)) && !is_real(status(nb.parent()))) return false;
					}
		}
	}
	return true;
}

void Tree::clear_virtual_leaves()
{
	for (const auto& v : virtuals_)
		if (status(v) == NodeStatus::Virtual) set_status(v, NodeStatus::Absent);
	virtuals_.clear();
}

void Tree::build_virtual_leaves()
{
	clear_virtual_leaves();
	const int zr = dim_ == 3 ? 1 : 0;
	for (int l = 1; l <= max_level_; ++l) {
		const std::size_t size = levels_[static_cast<std::size_t>(l)].status.size();
		for (std::size_t idx = 0; idx < size; ++idx) {
			if (levels_[static_cast<std::size_t>(l)].status[idx] != NodeStatus::Leaf) continue;
			const CellIndex c = unflat(l, idx);
			for (int dz = -zr; dz <= zr; ++dz)
				for (int dy = -1; dy <= 1; ++dy)
					for (int dx = -1; dx <= 1; ++dx) ensure(neighbor(c, dx, dy, dz));
			// second neighbors along each axis for the reconstruction rows
			for (int a = 0; a < dim_; ++a)
				for (int s = -2; s <= 2; s += 4) {
					int off[3] = {0, 0, 0};
					off[a] = s;
					ensure(neighbor(c, off[0], off[1], off[2]));
				}
		}
	}
}

void Tree::refresh_virtual_leaves()
{
	// creation order lists parents and their neighborhoods first
	for (const auto& v : virtuals_) {
		const CellIndex p = v.parent();
		const auto pred = predict(neighborhood_existing(p), dim_);
		const ConsState& val = pred[static_cast<std::size_t>(v.child_number())];
		avg(v) = admissible(val) ? val : avg(p);
	}
}

std::vector<CellIndex> Tree::leaves() const
{
	std::vector<CellIndex> out;
	out.reserve(leaf_count());
	for (int l = 0; l <= max_level_; ++l) {
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (lv.status[idx] == NodeStatus::Leaf) out.push_back(unflat(l, idx));
	}
	return out;
}

std::size_t Tree::leaf_count() const
{
	std::size_t n = 0;
	for (const auto& lv : levels_) n += static_cast<std::size_t>(std::count(lv.status.begin(), lv.status.end(), NodeStatus::Leaf));
	return n;
}

int Tree::finest_leaf_level() const
{
	for (int l = max_level_; l >= 0; --l) {
		const auto& st = levels_[static_cast<std::size_t>(l)].status;
		if (std::find(st.begin(), st.end(), NodeStatus::Leaf) != st.end()) return l;
	}
	return 0;
}

UniformField<ConsState> Tree::reconstruct(int level) const
{
	auto field = UniformField<ConsState>::make(dim_, 0);
	field.values[0] = levels_[0].avg[0];
	for (int l = 1; l <= level; ++l) {
		auto fine = predict_level(field, bc_);
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (is_real(lv.status[idx])) fine.values[idx] = lv.avg[idx];
		field = std::move(fine);
	}
	return field;
}

double Tree::integral(int var) const
{
	double sum = 0.0;
	for (int l = 0; l <= max_level_; ++l) {
		const auto& lv = levels_[static_cast<std::size_t>(l)];
		double level_sum = 0.0;
		for (std::size_t idx = 0; idx < lv.status.size(); ++idx)
			if (lv.status[idx] == NodeStatus::Leaf) level_sum += lv.avg[idx][var];
		sum += level_sum * cell_volume(l);
	}
	return sum;
}

} // namespace carmen

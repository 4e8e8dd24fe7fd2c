#include "carmen/evolve.hpp"

#include <algorithm>
#include <sstream>

#include "carmen/parallel.hpp"
#include "carmen/resistive.hpp"
#include "carmen/riemann.hpp"

namespace carmen {

StepSize compute_dt(const Tree& tree, double cfl, const GasModel& gas)
{
	StepSize s;
	for (const auto& c : tree.leaves()) {
		const auto wp = try_cons_to_prim(tree.avg(c), gas.gamma);
		if (!wp) {
			std::ostringstream msg;
			msg << "unphysical state at level " << c.level << " cell (" << c.i << ", " << c.j << ", " << c.k << ") before the time step";
			throw UnphysicalState(msg.str(), CellLocation{c.level, c.i, c.j, c.k, "time step"});
		}
		const PrimState& w = *wp;
		for (int a = 0; a < tree.dim(); ++a) s.c_h = std::max(s.c_h, std::abs(w.vel[a]) + fast_speed(w, static_cast<Axis>(a), gas.gamma));
	}
	if (!(s.c_h > 0.0)) throw ZeroSpeed();
	const Vec3 h = tree.spacing(tree.finest_leaf_level());
	s.dx_min = h[0];
	for (int a = 1; a < tree.dim(); ++a) s.dx_min = std::min(s.dx_min, h[a]);
	s.dt_hyp = cfl * s.dx_min / s.c_h;
	const double eta_max = gas.eta_max();
	if (eta_max > 0.0) s.dt_res = 0.5 * cfl * s.dx_min * s.dx_min / (tree.dim() * eta_max);
	s.dt = std::min(s.dt_hyp, s.dt_res);
	return s;
}

FluxVector face_flux(const std::array<ConsState, 4>& row, Axis axis, double c_h, double gamma)
{
	const InterfacePair pair = muscl_states(row, axis);
	auto wl = try_cons_to_prim(pair.left, gamma);
	auto wr = try_cons_to_prim(pair.right, gamma);
	if (!wl || !wr) {
		wl = cons_to_prim(row[1], gamma);
		wr = cons_to_prim(row[2], gamma);
	}
	return hlld_flux(*wl, *wr, axis, c_h, gamma);
}

FluxVector level_interface_flux(const std::vector<FluxVector>& fine_faces)
{
	FluxVector sum{};
	for (const auto& f : fine_faces) sum += f;
	return sum * (1.0 / static_cast<double>(fine_faces.size()));
}

namespace {

struct PendingContribution {
	std::uint32_t leaf;
	std::uint32_t group;
	std::uint32_t face;
	double coeff;
};

} // namespace

FluxPlan::FluxPlan(const Tree& tree, const GasModel& gas, bool mirror_x) : leaves_(tree.leaves()), mirror_x_(mirror_x)
{
	const int dim = tree.dim();
	std::vector<std::vector<std::int32_t>> leaf_id(static_cast<std::size_t>(tree.max_level()) + 1);
	for (int l = 0; l <= tree.max_level(); ++l) leaf_id[static_cast<std::size_t>(l)].assign(tree.level_size(l), -1);
	for (std::size_t q = 0; q < leaves_.size(); ++q)
		leaf_id[static_cast<std::size_t>(leaves_[q].level)][tree.flat(leaves_[q])] = static_cast<std::int32_t>(q);
	const auto id_of = [&](const CellIndex& c) { return leaf_id[static_cast<std::size_t>(c.level)][tree.flat(c)]; };

	std::vector<PendingContribution> pending;
	pending.reserve(leaves_.size() * static_cast<std::size_t>(2 * dim) + 16);
	for (std::size_t q = 0; q < leaves_.size(); ++q) {
		const CellIndex& c = leaves_[q];
		const Vec3 h = tree.spacing(c.level);
		for (int a = 0; a < dim; ++a)
			for (int side = -1; side <= 1; side += 2) {
				int off[3] = {0, 0, 0};
				off[a] = side;
				const bool boundary = tree.outside(c, off[0], off[1], off[2]) && tree.boundaries()[a] == BoundaryKind::ZeroGradient;
				const CellIndex nb = tree.neighbor(c, off[0], off[1], off[2]);
				const NodeStatus st = tree.status(nb);
				if (!boundary) {
					if (st == NodeStatus::Internal) continue;
					if (st == NodeStatus::Leaf && side < 0) continue;
					if (st == NodeStatus::Absent) throw std::logic_error("flux plan: missing neighbor; virtual leaves not built");
				}
				Face f{c.level, a, {}};
				for (int r = 0; r < 4; ++r) {
					int ro[3] = {0, 0, 0};
					ro[a] = r - (side > 0 ? 1 : 2);
					const CellIndex rc = tree.neighbor(c, ro[0], ro[1], ro[2]);
					if (tree.status(rc) == NodeStatus::Absent) throw std::logic_error("flux plan: reconstruction row incomplete");
					f.row[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(tree.flat(rc));
				}
				const auto face_idx = static_cast<std::uint32_t>(faces_.size());
				faces_.push_back(f);
				// the face flux points from the lower to the upper cell along a
				const double inv = 1.0 / h[a];
				const std::uint32_t own_group = static_cast<std::uint32_t>(2 * a + (side > 0 ? 1 : 0));
				const std::uint32_t other_group = static_cast<std::uint32_t>(2 * a + (side > 0 ? 0 : 1));
				pending.push_back({static_cast<std::uint32_t>(q), own_group, face_idx, side > 0 ? -inv : inv});
				if (boundary) continue;
				if (st == NodeStatus::Leaf) {
					pending.push_back({static_cast<std::uint32_t>(id_of(nb)), other_group, face_idx, side > 0 ? inv : -inv});
				} else {
					// virtual neighbor: its parent is the coarse leaf across the face
					const CellIndex parent = nb.parent();
					const std::int32_t pid = id_of(parent);
					if (pid < 0) throw std::logic_error("flux plan: virtual neighbor without a leaf parent");
					const double w = inv / static_cast<double>(children_per_cell(dim));
					pending.push_back({static_cast<std::uint32_t>(pid), other_group, face_idx, side > 0 ? w : -w});
				}
			}
	}

	std::stable_sort(pending.begin(), pending.end(), [](const PendingContribution& x, const PendingContribution& y) {
		return x.leaf != y.leaf ? x.leaf < y.leaf : x.group < y.group;
	});
	offsets_.assign(leaves_.size() + 1, 0);
	contributions_.reserve(pending.size());
	for (const auto& p : pending) {
		++offsets_[p.leaf + 1];
		contributions_.push_back({p.face, p.group, p.coeff});
	}
	for (std::size_t q = 0; q < leaves_.size(); ++q) offsets_[q + 1] += offsets_[q];

	resistive_ = !gas.ideal();
	if (resistive_) {
		b_stencils_.resize(leaves_.size());
		eta_stencils_.resize(leaves_.size());
		for (std::size_t q = 0; q < leaves_.size(); ++q) {
			const CellIndex& c = leaves_[q];
			for (int dz = -1; dz <= 1; ++dz)
				for (int dy = -1; dy <= 1; ++dy)
					for (int dx = -1; dx <= 1; ++dx) {
						const CellIndex nb = tree.neighbor(c, dx, dy, dim == 3 ? dz : 0);
						if (tree.status(nb) == NodeStatus::Absent) throw std::logic_error("flux plan: resistive stencil incomplete");
						const int slot = stencil_slot(dx, dy, dz);
						b_stencils_[q][static_cast<std::size_t>(slot)] = static_cast<std::uint32_t>(tree.flat(nb));
						eta_stencils_[q][static_cast<std::size_t>(slot)] = gas.eta_at(tree.center(nb));
					}
		}
	}
}

void FluxPlan::mark_faces(std::size_t leaf, std::vector<std::uint8_t>& low_order) const
{
	low_order.resize(faces_.size(), 0);
	for (std::size_t e = offsets_[leaf]; e < offsets_[leaf + 1]; ++e) low_order[contributions_[e].face] = 1;
}

namespace {

// Reflection x -> -x of a state: u_x, B_y, B_z and psi change sign.
ConsState reflect_x(ConsState u)
{
	u[kMomX] = -u[kMomX];
	u[kBy] = -u[kBy];
	u[kBz] = -u[kBz];
	u[kPsi] = -u[kPsi];
	return u;
}

} // namespace

FluxVector FluxPlan::flux(const Tree& tree, const Face& face, double c_h, double gamma, bool low_order) const
{
	const ConsState* data = tree.level_data(face.level);
	const Axis axis = static_cast<Axis>(face.axis);
	const std::array<ConsState, 4> row{data[face.row[0]], data[face.row[1]], data[face.row[2]], data[face.row[3]]};
	const auto eval = [&](const std::array<ConsState, 4>& r) {
		return low_order ? hlld_flux({r[1], r[2], axis}, c_h, gamma) : face_flux(r, axis, c_h, gamma);
	};
	const FluxVector f = eval(row);
	if (!mirror_x_ || axis != Axis::X) return f;
	// the reflected face sees the reversed, reflected row and the negated flux
	const FluxVector g = reflect_x(eval({reflect_x(row[3]), reflect_x(row[2]), reflect_x(row[1]), reflect_x(row[0])})) * -1.0;
	return (f + g) * 0.5;
}

void FluxPlan::residual(const Tree& tree, double c_h, const GasModel& gas, std::vector<ConsState>& out,
                        const std::vector<std::uint8_t>* low_order) const
{
	std::vector<FluxVector> fluxes(faces_.size());
	parallel_for(faces_.size(), [&](std::size_t begin, std::size_t end) {
		for (std::size_t f = begin; f < end; ++f) fluxes[f] = flux(tree, faces_[f], c_h, gas.gamma, low_order && (*low_order)[f]);
	});

	out.assign(leaves_.size(), ConsState{});
	const int groups = 2 * tree.dim();
	parallel_for(leaves_.size(), [&](std::size_t begin, std::size_t end) {
		for (std::size_t q = begin; q < end; ++q) {
			// sums per face group, combined pairwise so mirrored cells add the same terms
			std::array<ConsState, 6> g{};
			for (std::size_t e = offsets_[q]; e < offsets_[q + 1]; ++e) {
				const Contribution& ct = contributions_[e];
				g[ct.group] += fluxes[ct.face] * ct.coeff;
			}
			ConsState r = g[0] + g[1];
			for (int a = 1; 2 * a < groups; ++a) r += g[static_cast<std::size_t>(2 * a)] + g[static_cast<std::size_t>(2 * a + 1)];
			if (resistive_) {
				const CellIndex& c = leaves_[q];
				const ConsState* data = tree.level_data(c.level);
				Stencil<Vec3> b;
				Stencil<double> eta;
				for (std::size_t s = 0; s < 27; ++s) {
					b.v[s] = data[b_stencils_[q][s]].b();
					eta.v[s] = eta_stencils_[q][s];
				}
				const ResistiveSource src = resistive_source(b, eta, tree.spacing(c.level));
				r[kEnergy] += src.energy;
				for (int d = 0; d < 3; ++d) r[kBx + d] += src.b[d];
			}
			out[q] = r;
		}
	});
}

namespace {

[[noreturn]] void throw_unphysical(const Tree& tree, const CellIndex& c, double gamma, const char* stage)
{
	std::ostringstream msg;
	const ConsState& u = tree.avg(c);
	msg << "unphysical state at level " << c.level << " cell (" << c.i << ", " << c.j << ", " << c.k << ") during " << stage
	    << ": rho = " << u[kRho] << ", p = " << pressure(u, gamma);
	throw UnphysicalState(msg.str(), CellLocation{c.level, c.i, c.j, c.k, stage});
}

void refresh(Tree& tree)
{
	tree.project_internal();
	tree.refresh_virtual_leaves();
}

// Number of times a stage is repeated with first-order fluxes around cells it
// left inadmissible.
constexpr int kMaxStageRetries = 4;

// Writes update(q, r) into every leaf. Leaves that come out inadmissible get
// first-order fluxes on all their faces and the stage is repeated from
// `start`; both sides of a face see the same flux, so this stays conservative.
template <class Update>
void run_stage(Tree& tree, const FluxPlan& plan, double c_h, const GasModel& gas, const std::vector<ConsState>& start, const char* stage,
               Update&& update)
{
	const auto& leaves = plan.leaves();
	std::vector<ConsState> r;
	std::vector<std::uint8_t> low_order;
	for (int attempt = 0;; ++attempt) {
		plan.residual(tree, c_h, gas, r, low_order.empty() ? nullptr : &low_order);
		std::vector<std::size_t> bad;
		for (std::size_t q = 0; q < leaves.size(); ++q) {
			ConsState u = update(q, r[q]);
			if (!is_physical(u, gas.gamma)) bad.push_back(q);
			tree.avg(leaves[q]) = u;
		}
		if (bad.empty()) return;
		const std::size_t before = static_cast<std::size_t>(std::count(low_order.begin(), low_order.end(), 1));
		for (std::size_t q : bad) plan.mark_faces(q, low_order);
		const std::size_t after = static_cast<std::size_t>(std::count(low_order.begin(), low_order.end(), 1));
		if (attempt == kMaxStageRetries || after == before) throw_unphysical(tree, leaves[bad.front()], gas.gamma, stage);
		for (std::size_t q = 0; q < leaves.size(); ++q) tree.avg(leaves[q]) = start[q];
	}
}

} // namespace

void rk2_step(Tree& tree, const FluxPlan& plan, double dt, double c_h, const GasModel& gas)
{
	const auto& leaves = plan.leaves();
	const std::size_t n = leaves.size();
	std::vector<ConsState> u0(n);
	for (std::size_t q = 0; q < n; ++q) u0[q] = tree.avg(leaves[q]);

	run_stage(tree, plan, c_h, gas, u0, "stage 1", [&](std::size_t q, const ConsState& r) { return u0[q] + r * dt; });
	refresh(tree);

	std::vector<ConsState> u1(n);
	for (std::size_t q = 0; q < n; ++q) u1[q] = tree.avg(leaves[q]);
	run_stage(tree, plan, c_h, gas, u1, "stage 2", [&](std::size_t q, const ConsState& r) { return (u0[q] + (u1[q] + r * dt)) * 0.5; });
	refresh(tree);
}

double divergence_error(const Tree& tree)
{
	double eps = 0.0;
	for (const auto& c : tree.leaves()) {
		Stencil<Vec3> b;
		for (int dz = -1; dz <= 1; ++dz)
			for (int dy = -1; dy <= 1; ++dy)
				for (int dx = -1; dx <= 1; ++dx) {
					const CellIndex nb = tree.neighbor(c, dx, dy, tree.dim() == 3 ? dz : 0);
					b.at(dx, dy, dz) = tree.status(nb) == NodeStatus::Absent ? tree.avg(c).b() : tree.avg(nb).b();
				}
		eps = std::max(eps, divergence_measure(b, tree.spacing(c.level), tree.cell_volume(c.level)));
	}
	return eps;
}

Solver::Solver(Tree tree, GasModel gas, SolverOptions opts) : tree_(std::move(tree)), gas_(std::move(gas)), opts_(opts) {}

void Solver::initialize()
{
	if (opts_.adaptive)
		tree_.adapt(opts_.adapt);
	else
		tree_.build_virtual_leaves();
	rebuild_plan();
}

void Solver::rebuild_plan() { plan_ = std::make_unique<FluxPlan>(tree_, gas_, opts_.mirror_x); }

StepRecord Solver::step(double t_stop)
{
	if (!plan_) initialize();
	if (opts_.adaptive && time_.step_count > 0) {
		tree_.adapt(opts_.adapt);
		rebuild_plan();
	}
	const StepSize s = compute_dt(tree_, opts_.cfl, gas_);
	double dt = s.dt;
	if (time_.t + dt > t_stop) dt = t_stop - time_.t;
	if (!(dt > 0.0)) throw std::logic_error("non-positive time step");

	rk2_step(tree_, *plan_, dt, s.c_h, gas_);
	if (opts_.alpha_p > 0.0) {
		for (const auto& c : plan_->leaves()) {
			ConsState& u = tree_.avg(c);
			u[kPsi] = glm_damp(u[kPsi], opts_.alpha_p, s.c_h, dt, s.dx_min);
		}
		tree_.project_internal();
		tree_.refresh_virtual_leaves();
	}

	time_.dt = dt;
	time_.c_h = s.c_h;
	time_.t = time_.t + dt;
	if (t_stop - time_.t < 1e-12 * std::max(1.0, std::abs(t_stop))) time_.t = std::max(time_.t, t_stop);
	++time_.step_count;
	return diagnostics();
}

StepRecord Solver::diagnostics() const
{
	StepRecord r;
	r.step = time_.step_count;
	r.t = time_.t;
	r.dt = time_.dt;
	r.c_h = time_.c_h;
	r.leaves = tree_.leaf_count();
	r.leaf_fraction = static_cast<double>(r.leaves) / static_cast<double>(tree_.full_grid_cells());
	r.eps_div = divergence_error(tree_);
	r.mass = tree_.integral(kRho);
	r.energy = tree_.integral(kEnergy);
	for (int d = 0; d < 3; ++d) r.momentum[d] = tree_.integral(kMomX + d);
	for (const auto& c : tree_.leaves()) {
		const ConsState& u = tree_.avg(c);
		r.max_psi = std::max(r.max_psi, std::abs(u[kPsi]));
		const double vol = tree_.cell_volume(c.level);
		for (int d = 0; d < 3; ++d) r.momentum_scale += std::abs(u[kMomX + d]) * vol;
	}
	return r;
}

} // namespace carmen

#ifndef CARMEN_EVOLVE_HPP
#define CARMEN_EVOLVE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "carmen/geometry.hpp"
#include "carmen/mr.hpp"
#include "carmen/state.hpp"
#include "carmen/tree.hpp"

namespace carmen {

struct TimeState {
	double t = 0.0;
	double dt = 0.0;
	double c_h = 0.0;
	long step_count = 0;
};

class ZeroSpeed : public std::runtime_error {
public:
	ZeroSpeed() : std::runtime_error("all signal speeds vanish; cannot choose a time step") {}
};

struct StepSize {
	double dt = 0.0;
	double c_h = 0.0;
	double dt_hyp = 0.0;
	double dt_res = std::numeric_limits<double>::infinity();
	double dx_min = 0.0;
};

/// Largest wave speed over leaves/axes and the CFL-limited step.
StepSize compute_dt(const Tree& tree, double cfl, const GasModel& gas);

/// Exact integration of the parabolic psi damping over dt.
inline double glm_damp(double psi, double alpha_p, double c_h, double dt, double dx_min)
{
	return psi * std::exp(-alpha_p * c_h * dt / dx_min);
}

/// Face list and per-leaf gather tables for one fixed leaf set. Fluxes at
/// interfaces between a leaf and a coarser neighbor are computed on the fine
/// side and scattered into the coarse leaf with the area ratio, so every face
/// flux enters the two sides with opposite sign.
class FluxPlan {
public:
	/// The tree must have its virtual leaves built. With mirror_x every x-face
	/// flux is averaged with the flux of its reflection x -> -x, which makes
	/// the scheme exactly symmetric for data that is.
	FluxPlan(const Tree& tree, const GasModel& gas, bool mirror_x = false);

	const std::vector<CellIndex>& leaves() const { return leaves_; }
	std::size_t face_count() const { return faces_.size(); }

	/// dU/dt for every leaf, in leaves() order. Faces flagged in `low_order`
	/// use the first-order flux.
	void residual(const Tree& tree, double c_h, const GasModel& gas, std::vector<ConsState>& out,
	              const std::vector<std::uint8_t>* low_order = nullptr) const;

	/// Flags every face that contributes to leaf q (index into leaves()).
	void mark_faces(std::size_t leaf, std::vector<std::uint8_t>& low_order) const;

private:
	struct Face {
		std::int32_t level;
		std::int32_t axis;
		std::array<std::uint32_t, 4> row;
	};
	struct Contribution {
		std::uint32_t face;
		// 2 * axis + (1 for the upper side of the receiving leaf)
		std::uint32_t group;
		double coeff;
	};

	FluxVector flux(const Tree& tree, const Face& face, double c_h, double gamma, bool low_order) const;

	std::vector<CellIndex> leaves_;
	std::vector<Face> faces_;
	bool mirror_x_ = false;
	// contributions of leaf q are entries [offsets_[q], offsets_[q + 1])
	std::vector<std::size_t> offsets_;
	std::vector<Contribution> contributions_;
	// resistive data per leaf: B stencil flat indices (same level) and eta samples
	bool resistive_ = false;
	std::vector<std::array<std::uint32_t, 27>> b_stencils_;
	std::vector<std::array<double, 27>> eta_stencils_;
};

/// Face flux from four consecutive cells along the axis (MUSCL-MC + HLLD).
/// Falls back to first order if a reconstructed state is not admissible.
FluxVector face_flux(const std::array<ConsState, 4>& row, Axis axis, double c_h, double gamma);

/// Heun step of all leaves. Internal and virtual nodes are refreshed after each
/// stage. A stage that leaves a cell inadmissible is repeated with first-order
/// fluxes on that cell's faces before UnphysicalState is thrown.
void rk2_step(Tree& tree, const FluxPlan& plan, double dt, double c_h, const GasModel& gas);

/// Conservative coarse-face flux from the fine sub-face fluxes (area mean).
FluxVector level_interface_flux(const std::vector<FluxVector>& fine_faces);

struct SolverOptions {
	double cfl = 0.4;
	double alpha_p = 0.4;
	bool adaptive = true;
	// see FluxPlan
	bool mirror_x = false;
	AdaptOptions adapt;
};

struct StepRecord {
	long step = 0;
	double t = 0.0;
	double dt = 0.0;
	double c_h = 0.0;
	std::size_t leaves = 0;
	double leaf_fraction = 0.0;
	double eps_div = 0.0;
	double mass = 0.0;
	double energy = 0.0;
	double max_psi = 0.0;
	Vec3 momentum{};
	// sum of |mom| * vol, the scale for relative momentum drift
	double momentum_scale = 0.0;
};

/// Owns the tree and runs the adapt / dt / RK2 / damping cycle.
class Solver {
public:
	Solver(Tree tree, GasModel gas, SolverOptions opts);

	/// Adapts the initial data (adaptive mode) and prepares the flux plan.
	void initialize();

	/// One cycle; dt is shortened so that t does not pass t_stop.
	StepRecord step(double t_stop = std::numeric_limits<double>::infinity());

	StepRecord diagnostics() const;

	Tree& tree() { return tree_; }
	const Tree& tree() const { return tree_; }
	const GasModel& gas() const { return gas_; }
	const SolverOptions& options() const { return opts_; }
	const TimeState& time() const { return time_; }

private:
	void rebuild_plan();

	Tree tree_;
	GasModel gas_;
	SolverOptions opts_;
	TimeState time_;
	std::unique_ptr<FluxPlan> plan_;
};

/// ε_div = max over leaves of vol |div B| / |B| (central differences).
double divergence_error(const Tree& tree);

} // namespace carmen

#endif

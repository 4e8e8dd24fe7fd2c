#ifndef CARMEN_IO_HPP
#define CARMEN_IO_HPP

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmen/evolve.hpp"
#include "carmen/mr.hpp"
#include "carmen/tree.hpp"

namespace carmen {

class OutOfDomain : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

class ShapeMismatch : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Legacy VTK 3.0 ASCII unstructured grid with one quad/hexahedron per leaf.
/// The title line records the tree geometry so the file can be read back.
void write_vtk(const Tree& tree, double gamma, const std::string& path);
void write_vtk(const Tree& tree, double gamma, std::ostream& out);

/// Rebuilds a tree from a file written by write_vtk (averages recovered from
/// the primitive cell data, so exact only to printing precision).
Tree read_vtk(const std::string& path, double* gamma = nullptr);

/// Exact leaf-list dump (17 significant digits of every conservative value).
void write_state(const Tree& tree, double gamma, double time, const std::string& path);

struct StateFile {
	Tree tree;
	double gamma = 5.0 / 3.0;
	double time = 0.0;
};
StateFile read_state(const std::string& path);

/// Reads a .state or .vtk file, chosen by extension.
StateFile read_fields(const std::string& path);

/// Leaf containing a point (must lie in the closed domain box).
CellIndex locate_leaf(const Tree& tree, const Vec3& x);

struct CutSample {
	double position = 0.0;
	PrimState w;
};

/// Samples along the line on which coordinate `fixed_axis` equals `at`.
/// The line runs along x (or y when fixed_axis is x); in 3D the remaining
/// coordinate is the domain midpoint. Samples are cell-centered on [lo, hi]
/// (defaults: the domain extent).
std::vector<CutSample> extract_cut(const Tree& tree, double gamma, int fixed_axis, double at, int n_samples, double lo,
                                   double hi);
std::vector<CutSample> extract_cut(const Tree& tree, double gamma, int fixed_axis, double at, int n_samples);

void write_cut_csv(const std::vector<CutSample>& cut, std::ostream& out);

struct ErrorNorms {
	double l1 = 0.0;
	double l2 = 0.0;
};

/// Volume-averaged norms of a - b over a uniform grid of equal cells:
/// L1 = sum |a-b| vol / |Omega|, L2 = sqrt(sum (a-b)^2 vol / |Omega|).
ErrorNorms error_norms(const std::vector<double>& a, const std::vector<double>& b, double cell_volume, double domain_volume);

/// Names of the primitive variables used by field_component() and the tables.
const std::array<const char*, 9>& primitive_names();

/// One primitive component (rho, u_x, u_y, u_z, p, B_x, B_y, B_z, psi) of a full-grid field.
std::vector<double> field_component(const UniformField<ConsState>& f, int component, double gamma);

/// Full-grid reconstruction of each tree at its finest level, projection of the
/// finer one down to the coarser level, then per-variable norms of the
/// primitive variables.
std::array<ErrorNorms, 9> compare_trees(const Tree& a, const Tree& b, double gamma);

void write_diagnostics_csv(const std::vector<StepRecord>& records, std::ostream& out);
std::vector<StepRecord> read_diagnostics_csv(const std::string& path);

struct RunSummary {
	std::size_t steps = 0;
	double final_time = 0.0;
	double mean_leaf_fraction = 0.0;
	double wall_seconds = 0.0;
	double final_eps_div = 0.0;
	double max_eps_div = 0.0;
	double final_energy = 0.0;
};

RunSummary summarize(const std::vector<StepRecord>& records, double wall_seconds);
void write_summary(const RunSummary& s, std::ostream& out);

struct EnergyRatioPoint {
	double t = 0.0;
	double log10_ratio = 0.0;
};

/// log10(E_a / E_b) at the times of run a, with run b linearly interpolated.
std::vector<EnergyRatioPoint> energy_ratio_series(const std::vector<StepRecord>& a, const std::vector<StepRecord>& b);

} // namespace carmen

#endif

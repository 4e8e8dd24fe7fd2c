#include "carmen/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace carmen {

namespace {

std::ofstream open_out(const std::string& path)
{
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot write '" + path + "'");
	out << std::setprecision(17);
	return out;
}

std::ifstream open_in(const std::string& path)
{
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot read '" + path + "'");
	return in;
}

char bc_code(BoundaryKind k) { return k == BoundaryKind::Periodic ? 'P' : 'Z'; }

BoundaryKind bc_from(char c)
{
	if (c == 'P') return BoundaryKind::Periodic;
	if (c == 'Z') return BoundaryKind::ZeroGradient;
	throw FormatError(std::string("bad boundary code '") + c + "'");
}

// "dim=2 max_level=9 lo=a,b,c hi=a,b,c bc=PPP gamma=g"
std::string geometry_line(const Tree& tree, double gamma)
{
	std::ostringstream s;
	s << std::setprecision(17) << "carmen-mr dim=" << tree.dim() << " max_level=" << tree.max_level() << " lo=" << tree.domain().lo[0]
	  << ',' << tree.domain().lo[1] << ',' << tree.domain().lo[2] << " hi=" << tree.domain().hi[0] << ',' << tree.domain().hi[1] << ','
	  << tree.domain().hi[2] << " bc=" << bc_code(tree.boundaries()[0]) << bc_code(tree.boundaries()[1]) << bc_code(tree.boundaries()[2])
	  << " gamma=" << gamma;
	return s.str();
}

struct Geometry {
	int dim = 2;
	int max_level = 0;
	Box box;
	BoundarySet bc{};
	double gamma = 5.0 / 3.0;
};

Vec3 parse_triple(const std::string& v)
{
	Vec3 r{};
	std::istringstream s(v);
	char comma = 0;
	if (!(s >> r[0] >> comma >> r[1] >> comma >> r[2])) throw FormatError("bad coordinate triple '" + v + "'");
	return r;
}

Geometry parse_geometry(const std::string& line)
{
	std::istringstream s(line);
	std::string tag;
	s >> tag;
	if (tag != "carmen-mr") throw FormatError("not a carmen-mr file (title line: '" + line + "')");
	Geometry g;
	std::map<std::string, std::string> kv;
	std::string tok;
	while (s >> tok) {
		const auto eq = tok.find('=');
		if (eq == std::string::npos) throw FormatError("bad header token '" + tok + "'");
		kv[tok.substr(0, eq)] = tok.substr(eq + 1);
	}
	try {
		g.dim = std::stoi(kv.at("dim"));
		g.max_level = std::stoi(kv.at("max_level"));
		g.box.lo = parse_triple(kv.at("lo"));
		g.box.hi = parse_triple(kv.at("hi"));
		const std::string& bc = kv.at("bc");
		if (bc.size() != 3) throw FormatError("bad boundary field '" + bc + "'");
		for (int a = 0; a < 3; ++a) g.bc[a] = bc_from(bc[static_cast<std::size_t>(a)]);
		g.gamma = std::stod(kv.at("gamma"));
	} catch (const std::out_of_range&) {
		throw FormatError("incomplete header: '" + line + "'");
	}
	return g;
}

PrimState primitive_unchecked(const ConsState& u, double gamma)
{
	PrimState w;
	w.rho = u[kRho];
	for (int d = 0; d < 3; ++d) {
		w.vel[d] = u[kMomX + d] / u[kRho];
		w.b[d] = u[kBx + d];
	}
	w.p = pressure(u, gamma);
	w.psi = u[kPsi];
	return w;
}

} // namespace

void write_vtk(const Tree& tree, double gamma, const std::string& path)
{
	auto out = open_out(path);
	write_vtk(tree, gamma, out);
	if (!out) throw std::runtime_error("error writing '" + path + "'");
}

void write_vtk(const Tree& tree, double gamma, std::ostream& out)
{
	const auto leaves = tree.leaves();
	const int dim = tree.dim();
	const std::size_t corners = dim == 3 ? 8 : 4;
	const std::size_t n = leaves.size();
	const auto old_precision = out.precision(17);

	out << "# vtk DataFile Version 3.0\n" << geometry_line(tree, gamma) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
	out << "POINTS " << n * corners << " double\n";
	// VTK_QUAD / VTK_HEXAHEDRON corner order: counter-clockwise bottom face, then top face
	static const int order[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
	for (const auto& c : leaves) {
		const Vec3 h = tree.spacing(c.level);
		const Vec3 x = tree.center(c);
		for (std::size_t q = 0; q < corners; ++q) {
			Vec3 p{0.0, 0.0, 0.0};
			for (int a = 0; a < dim; ++a) p[a] = x[a] + (order[q][a] - 0.5) * h[a];
			out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
		}
	}
	out << "CELLS " << n << ' ' << n * (corners + 1) << '\n';
	for (std::size_t q = 0; q < n; ++q) {
		out << corners;
		for (std::size_t v = 0; v < corners; ++v) out << ' ' << q * corners + v;
		out << '\n';
	}
	out << "CELL_TYPES " << n << '\n';
	for (std::size_t q = 0; q < n; ++q) out << (dim == 3 ? 12 : 9) << '\n';

	std::vector<PrimState> prims;
	prims.reserve(n);
	for (const auto& c : leaves) prims.push_back(primitive_unchecked(tree.avg(c), gamma));

	out << "CELL_DATA " << n << '\n';
	const auto scalar = [&](const char* name, auto&& value) {
		out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
		for (std::size_t q = 0; q < n; ++q) out << value(q) << '\n';
	};
	const auto vector = [&](const char* name, auto&& value) {
		out << "VECTORS " << name << " double\n";
		for (std::size_t q = 0; q < n; ++q) {
			const Vec3 v = value(q);
			out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
		}
	};
	scalar("rho", [&](std::size_t q) { return prims[q].rho; });
	vector("velocity", [&](std::size_t q) { return prims[q].vel; });
	scalar("pressure", [&](std::size_t q) { return prims[q].p; });
	scalar("energy", [&](std::size_t q) { return tree.avg(leaves[q])[kEnergy]; });
	vector("B", [&](std::size_t q) { return prims[q].b; });
	scalar("psi", [&](std::size_t q) { return prims[q].psi; });
	out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
	for (const auto& c : leaves) out << c.level << '\n';
	scalar("detail_norm", [&](std::size_t q) { return tree.detail_size(leaves[q]); });
	out.precision(old_precision);
}

Tree read_vtk(const std::string& path, double* gamma_out)
{
	auto in = open_in(path);
	std::string line;
	std::getline(in, line);
	if (line.rfind("# vtk DataFile", 0) != 0) throw FormatError("'" + path + "' is not a legacy VTK file");
	std::getline(in, line);
	const Geometry g = parse_geometry(line);
	std::string word;
	in >> word;
	if (word != "ASCII") throw FormatError("only ASCII VTK files are supported");
	in >> word >> word;
	if (word != "UNSTRUCTURED_GRID") throw FormatError("expected DATASET UNSTRUCTURED_GRID");

	std::size_t npoints = 0, ncells = 0, total = 0;
	in >> word >> npoints >> word;
	std::vector<Vec3> points(npoints);
	for (auto& p : points) in >> p[0] >> p[1] >> p[2];
	in >> word >> ncells >> total;
	std::vector<std::vector<std::size_t>> cells(ncells);
	for (auto& c : cells) {
		std::size_t k = 0;
		in >> k;
		c.resize(k);
		for (auto& v : c) in >> v;
	}
	in >> word >> ncells;
	for (std::size_t q = 0; q < ncells; ++q) in >> word;
	in >> word >> ncells;
	if (!in || word != "CELL_DATA") throw FormatError("malformed VTK body in '" + path + "'");

	std::map<std::string, std::vector<double>> data;
	while (in >> word) {
		std::string name, type;
		in >> name >> type;
		int comps = 3;
		if (word == "SCALARS") {
			in >> comps;
			in >> word >> word; // LOOKUP_TABLE default
		}
		auto& v = data[name];
		v.resize(ncells * static_cast<std::size_t>(comps));
		for (auto& x : v) in >> x;
		if (!in) throw FormatError("truncated cell data '" + name + "' in '" + path + "'");
	}
	for (const char* key : {"rho", "velocity", "pressure", "B", "psi", "level"})
		if (!data.count(key)) throw FormatError(std::string("missing cell data '") + key + "'");

	Tree tree(g.dim, g.max_level, g.box, g.bc);
	std::vector<std::pair<CellIndex, ConsState>> leaves;
	leaves.reserve(ncells);
	for (std::size_t q = 0; q < ncells; ++q) {
		const int level = static_cast<int>(std::lround(data["level"][q]));
		const Vec3 h = tree.spacing(level);
		Vec3 centroid{0.0, 0.0, 0.0};
		for (const auto v : cells[q])
			for (int a = 0; a < 3; ++a) centroid[a] += points.at(v)[a] / static_cast<double>(cells[q].size());
		CellIndex c{level, 0, 0, 0};
		for (int a = 0; a < g.dim; ++a) c[a] = static_cast<int>(std::floor((centroid[a] - g.box.lo[a]) / h[a]));
		PrimState w;
		w.rho = data["rho"][q];
		w.p = data["pressure"][q];
		w.psi = data["psi"][q];
		for (int d = 0; d < 3; ++d) {
			w.vel[d] = data["velocity"][3 * q + static_cast<std::size_t>(d)];
			w.b[d] = data["B"][3 * q + static_cast<std::size_t>(d)];
		}
		leaves.emplace_back(c, prim_to_cons(w, g.gamma));
	}
	tree.assign_leaves(leaves);
	if (gamma_out) *gamma_out = g.gamma;
	return tree;
}

void write_state(const Tree& tree, double gamma, double time, const std::string& path)
{
	auto out = open_out(path);
	out << "carmen-state 1\n" << geometry_line(tree, gamma) << "\ntime " << time << '\n';
	const auto leaves = tree.leaves();
	out << "leaves " << leaves.size() << '\n';
	for (const auto& c : leaves) {
		out << c.level << ' ' << c.i << ' ' << c.j << ' ' << c.k;
		const ConsState& u = tree.avg(c);
		for (int v = 0; v < kNumVars; ++v) out << ' ' << u[v];
		out << '\n';
	}
	if (!out) throw std::runtime_error("error writing '" + path + "'");
}

StateFile read_state(const std::string& path)
{
	auto in = open_in(path);
	std::string line, word;
	std::getline(in, line);
	if (line != "carmen-state 1") throw FormatError("'" + path + "' is not a carmen state file");
	std::getline(in, line);
	const Geometry g = parse_geometry(line);
	double time = 0.0;
	std::size_t n = 0;
	in >> word >> time >> word >> n;
	if (!in) throw FormatError("malformed state header in '" + path + "'");
	std::vector<std::pair<CellIndex, ConsState>> leaves(n);
	for (auto& [c, u] : leaves) {
		in >> c.level >> c.i >> c.j >> c.k;
		for (int v = 0; v < kNumVars; ++v) in >> u[v];
	}
	if (!in) throw FormatError("truncated leaf list in '" + path + "'");
	StateFile s{Tree(g.dim, g.max_level, g.box, g.bc), g.gamma, time};
	s.tree.assign_leaves(leaves);
	return s;
}

StateFile read_fields(const std::string& path)
{
	const auto ends_with = [&](const std::string& suffix) {
		return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
	};
	if (ends_with(".vtk")) {
		double gamma = 0.0;
		Tree t = read_vtk(path, &gamma);
		return StateFile{std::move(t), gamma, 0.0};
	}
	return read_state(path);
}

CellIndex locate_leaf(const Tree& tree, const Vec3& x)
{
	const Box& box = tree.domain();
	for (int a = 0; a < tree.dim(); ++a)
		if (!(x[a] >= box.lo[a] && x[a] <= box.hi[a])) throw OutOfDomain("point lies outside the domain");
	CellIndex c{0, 0, 0, 0};
	while (tree.status(c) == NodeStatus::Internal) {
		const Vec3 mid = tree.center(c);
		int child = 0;
		for (int a = 0; a < tree.dim(); ++a)
			if (x[a] >= mid[a]) child |= 1 << a;
		c = c.child(child);
	}
	return c;
}

std::vector<CutSample> extract_cut(const Tree& tree, double gamma, int fixed_axis, double at, int n_samples, double lo, double hi)
{
	const int dim = tree.dim();
	if (fixed_axis < 0 || fixed_axis >= dim) throw std::invalid_argument("cut axis outside the problem dimension");
	if (n_samples <= 0) throw std::invalid_argument("cut needs at least one sample");
	const Box& box = tree.domain();
	if (!(at >= box.lo[fixed_axis] && at <= box.hi[fixed_axis])) throw OutOfDomain("cut coordinate lies outside the domain");
	const int along = fixed_axis == 0 ? 1 : 0;
	if (!(lo >= box.lo[along] && hi <= box.hi[along] && lo <= hi)) throw OutOfDomain("cut range lies outside the domain");
	std::vector<CutSample> out;
	out.reserve(static_cast<std::size_t>(n_samples));
	for (int s = 0; s < n_samples; ++s) {
		Vec3 x{0.0, 0.0, 0.0};
		for (int a = 0; a < dim; ++a) x[a] = 0.5 * (box.lo[a] + box.hi[a]);
		x[fixed_axis] = at;
		x[along] = lo + (s + 0.5) * (hi - lo) / n_samples;
		out.push_back({x[along], primitive_unchecked(tree.avg(locate_leaf(tree, x)), gamma)});
	}
	return out;
}

std::vector<CutSample> extract_cut(const Tree& tree, double gamma, int fixed_axis, double at, int n_samples)
{
	const int along = fixed_axis == 0 ? 1 : 0;
	return extract_cut(tree, gamma, fixed_axis, at, n_samples, tree.domain().lo[along], tree.domain().hi[along]);
}

void write_cut_csv(const std::vector<CutSample>& cut, std::ostream& out)
{
	const auto old = out.precision(17);
	out << "position,rho,u_x,u_y,u_z,p,B_x,B_y,B_z,psi\n";
	for (const auto& s : cut) {
		const PrimState& w = s.w;
		out << s.position << ',' << w.rho << ',' << w.vel[0] << ',' << w.vel[1] << ',' << w.vel[2] << ',' << w.p << ',' << w.b[0] << ','
		    << w.b[1] << ',' << w.b[2] << ',' << w.psi << '\n';
	}
	out.precision(old);
}

ErrorNorms error_norms(const std::vector<double>& a, const std::vector<double>& b, double cell_volume, double domain_volume)
{
	if (a.size() != b.size()) throw ShapeMismatch("fields have different sizes");
	double s1 = 0.0, s2 = 0.0;
	for (std::size_t q = 0; q < a.size(); ++q) {
		const double d = a[q] - b[q];
		s1 += std::abs(d);
		s2 += d * d;
	}
	return {s1 * cell_volume / domain_volume, std::sqrt(s2 * cell_volume / domain_volume)};
}

const std::array<const char*, 9>& primitive_names()
{
	static const std::array<const char*, 9> names{"rho", "u_x", "u_y", "u_z", "p", "B_x", "B_y", "B_z", "psi"};
	return names;
}

std::vector<double> field_component(const UniformField<ConsState>& f, int component, double gamma)
{
	std::vector<double> out(f.values.size());
	for (std::size_t q = 0; q < f.values.size(); ++q) {
		const PrimState w = primitive_unchecked(f.values[q], gamma);
		double v = 0.0;
		switch (component) {
		case 0: v = w.rho; break;
		case 1:
		case 2:
		case 3: v = w.vel[component - 1]; break;
		case 4: v = w.p; break;
		case 5:
		case 6:
		case 7: v = w.b[component - 5]; break;
		case 8: v = w.psi; break;
		default: throw std::invalid_argument("component index out of range");
		}
		out[q] = v;
	}
	return out;
}

std::array<ErrorNorms, 9> compare_trees(const Tree& a, const Tree& b, double gamma)
{
	if (a.dim() != b.dim()) throw ShapeMismatch("trees have different dimensions");
	for (int d = 0; d < a.dim(); ++d)
		if (std::abs(a.domain().lo[d] - b.domain().lo[d]) > 1e-12 || std::abs(a.domain().hi[d] - b.domain().hi[d]) > 1e-12)
			throw ShapeMismatch("trees cover different domains");
	auto fa = a.reconstruct(a.max_level());
	auto fb = b.reconstruct(b.max_level());
	while (fa.level > fb.level) fa = project_level(fa);
	while (fb.level > fa.level) fb = project_level(fb);
	const double cell_vol = a.domain_volume() / static_cast<double>(fa.values.size());
	std::array<ErrorNorms, 9> out{};
	for (int v = 0; v < 9; ++v)
		out[static_cast<std::size_t>(v)] =
			error_norms(field_component(fa, v, gamma), field_component(fb, v, gamma), cell_vol, a.domain_volume());
	return out;
}

void write_diagnostics_csv(const std::vector<StepRecord>& records, std::ostream& out)
{
	const auto old = out.precision(17);
	out << "step,t,dt,c_h,leaves,leaf_fraction,eps_div,mass,energy,max_psi,mom_x,mom_y,mom_z,mom_scale\n";
	for (const auto& r : records)
		out << r.step << ',' << r.t << ',' << r.dt << ',' << r.c_h << ',' << r.leaves << ',' << r.leaf_fraction << ',' << r.eps_div << ','
		    << r.mass << ',' << r.energy << ',' << r.max_psi << ',' << r.momentum[0] << ',' << r.momentum[1] << ',' << r.momentum[2] << ','
		    << r.momentum_scale << '\n';
	out.precision(old);
}

std::vector<StepRecord> read_diagnostics_csv(const std::string& path)
{
	auto in = open_in(path);
	std::string line;
	std::getline(in, line);
	if (line.rfind("step,t,", 0) != 0) throw FormatError("'" + path + "' is not a diagnostics file");
	std::vector<StepRecord> out;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		std::istringstream s(line);
		std::vector<double> v;
		std::string cell;
		while (std::getline(s, cell, ',')) v.push_back(std::stod(cell));
		if (v.size() != 14) throw FormatError("bad diagnostics row: '" + line + "'");
		StepRecord r;
		r.step = static_cast<long>(v[0]);
		r.t = v[1];
		r.dt = v[2];
		r.c_h = v[3];
		r.leaves = static_cast<std::size_t>(v[4]);
		r.leaf_fraction = v[5];
		r.eps_div = v[6];
		r.mass = v[7];
		r.energy = v[8];
		r.max_psi = v[9];
		r.momentum = {v[10], v[11], v[12]};
		r.momentum_scale = v[13];
		out.push_back(r);
	}
	return out;
}

RunSummary summarize(const std::vector<StepRecord>& records, double wall_seconds)
{
	RunSummary s;
	s.wall_seconds = wall_seconds;
	if (records.empty()) return s;
	double frac = 0.0;
	for (const auto& r : records) {
		frac += r.leaf_fraction;
		s.max_eps_div = std::max(s.max_eps_div, r.eps_div);
	}
	s.steps = static_cast<std::size_t>(records.back().step);
	s.mean_leaf_fraction = frac / static_cast<double>(records.size());
	s.final_time = records.back().t;
	s.final_eps_div = records.back().eps_div;
	s.final_energy = records.back().energy;
	return s;
}

void write_summary(const RunSummary& s, std::ostream& out)
{
	const auto old = out.precision(10);
	out << "steps = " << s.steps << '\n'
	    << "final_time = " << s.final_time << '\n'
	    << "mean_leaf_fraction = " << s.mean_leaf_fraction << '\n'
	    << "wall_seconds = " << s.wall_seconds << '\n'
	    << "final_eps_div = " << s.final_eps_div << '\n'
	    << "max_eps_div = " << s.max_eps_div << '\n'
	    << "final_energy = " << s.final_energy << '\n';
	out.precision(old);
}

std::vector<EnergyRatioPoint> energy_ratio_series(const std::vector<StepRecord>& a, const std::vector<StepRecord>& b)
{
	std::vector<EnergyRatioPoint> out;
	if (b.empty()) return out;
	std::size_t k = 0;
	for (const auto& r : a) {
		if (r.t < b.front().t || r.t > b.back().t) continue;
		while (k + 1 < b.size() && b[k + 1].t < r.t) ++k;
		double eb = b[k].energy;
		if (k + 1 < b.size() && b[k + 1].t > b[k].t) {
			const double w = (r.t - b[k].t) / (b[k + 1].t - b[k].t);
			eb = (1.0 - w) * b[k].energy + w * b[k + 1].energy;
		}
		out.push_back({r.t, std::log10(r.energy / eb)});
	}
	return out;
}

} // namespace carmen

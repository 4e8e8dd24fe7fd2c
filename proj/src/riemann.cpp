#include "carmen/riemann.hpp"

namespace carmen {

namespace {

thread_local long long g_hll_fallbacks = 0;

constexpr double kTiny = 1e-12;

// State rotated so that index 0 is the face normal. B_n lives outside since it
// is shared by both sides after the GLM solve.
struct LocalState {
	double rho, vn, vt1, vt2, p, bt1, bt2;
	double e;  // total energy
	double pt; // total pressure
};

// The seven MHD components advected by the fan: rho, rho*vn, rho*vt1,
// rho*vt2, E, Bt1, Bt2.
using Local7 = std::array<double, 7>;

LocalState to_local(const PrimState& w, int n, double bn, double gamma)
{
	const int t1 = (n + 1) % 3, t2 = (n + 2) % 3;
	LocalState s;
	s.rho = w.rho;
	s.vn = w.vel[n];
	s.vt1 = w.vel[t1];
	s.vt2 = w.vel[t2];
	s.p = w.p;
	s.bt1 = w.b[t1];
	s.bt2 = w.b[t2];
	const double b2 = bn * bn + s.bt1 * s.bt1 + s.bt2 * s.bt2;
	s.e = s.p / (gamma - 1.0) + 0.5 * s.rho * (s.vn * s.vn + s.vt1 * s.vt1 + s.vt2 * s.vt2) + 0.5 * b2;
	s.pt = s.p + 0.5 * b2;
	return s;
}

double local_fast_speed(const LocalState& s, double bn, double gamma)
{
	const double a2 = gamma * s.p / s.rho;
	const double b2 = (bn * bn + s.bt1 * s.bt1 + s.bt2 * s.bt2) / s.rho;
	const double bn2 = bn * bn / s.rho;
	const double sum = a2 + b2;
	const double disc = std::max(0.0, sum * sum - 4.0 * a2 * bn2);
	return std::sqrt(0.5 * (sum + std::sqrt(disc)));
}

Local7 conserved(const LocalState& s)
{
	return {s.rho, s.rho * s.vn, s.rho * s.vt1, s.rho * s.vt2, s.e, s.bt1, s.bt2};
}

Local7 flux(const LocalState& s, double bn)
{
	const double vb = s.vn * bn + s.vt1 * s.bt1 + s.vt2 * s.bt2;
	return {s.rho * s.vn,
	        s.rho * s.vn * s.vn + s.pt - bn * bn,
	        s.rho * s.vn * s.vt1 - bn * s.bt1,
	        s.rho * s.vn * s.vt2 - bn * s.bt2,
	        (s.e + s.pt) * s.vn - bn * vb,
	        s.vn * s.bt1 - bn * s.vt1,
	        s.vn * s.bt2 - bn * s.vt2};
}

// F + s (Ua - Ub)
Local7 jump(const Local7& f, double s, const Local7& ua, const Local7& ub)
{
	Local7 r;
	for (int q = 0; q < 7; ++q) r[q] = f[q] + s * (ua[q] - ub[q]);
	return r;
}

FluxVector to_global(const Local7& f, int n, const GlmState& glm, double c_h)
{
	const int t1 = (n + 1) % 3, t2 = (n + 2) % 3;
	FluxVector g;
	g[kRho] = f[0];
	g[kMomX + n] = f[1];
	g[kMomX + t1] = f[2];
	g[kMomX + t2] = f[3];
	g[kEnergy] = f[4];
	g[kBx + n] = glm.psi;
	g[kBx + t1] = f[5];
	g[kBx + t2] = f[6];
	g[kPsi] = c_h * c_h * glm.bn;
	return g;
}

Local7 hll_local(const LocalState& l, const LocalState& r, double bn, double s_l, double s_r)
{
	const Local7 fl = flux(l, bn), fr = flux(r, bn);
	if (s_l >= 0.0) return fl;
	if (s_r <= 0.0) return fr;
	const Local7 ul = conserved(l), ur = conserved(r);
	Local7 f;
	const double inv = 1.0 / (s_r - s_l);
	for (int q = 0; q < 7; ++q) f[q] = (s_r * fl[q] - s_l * fr[q] + s_l * s_r * (ur[q] - ul[q])) * inv;
	return f;
}

struct StarState {
	double rho, vt1, vt2, bt1, bt2, e;
};

// Intermediate state behind the outer fast wave on one side. Returns false if
// the state is not physical.
bool star_state(const LocalState& s, double bn, double wave, double s_m, double pt_star, StarState& out)
{
	const double d = wave - s.vn;
	out.rho = s.rho * d / (wave - s_m);
	const double denom = s.rho * d * (wave - s_m) - bn * bn;
	if (std::abs(denom) < kTiny * pt_star) {
		out.vt1 = s.vt1;
		out.vt2 = s.vt2;
		out.bt1 = s.bt1;
		out.bt2 = s.bt2;
	} else {
		const double inv = 1.0 / denom;
		const double fv = bn * (s_m - s.vn) * inv;
		const double fb = (s.rho * d * d - bn * bn) * inv;
		out.vt1 = s.vt1 - s.bt1 * fv;
		out.vt2 = s.vt2 - s.bt2 * fv;
		out.bt1 = s.bt1 * fb;
		out.bt2 = s.bt2 * fb;
	}
	const double vb = s.vn * bn + s.vt1 * s.bt1 + s.vt2 * s.bt2;
	const double vb_star = s_m * bn + out.vt1 * out.bt1 + out.vt2 * out.bt2;
	out.e = (d * s.e - s.pt * s.vn + pt_star * s_m + bn * (vb - vb_star)) / (wave - s_m);
	return out.rho > 0.0 && std::isfinite(out.e);
}

Local7 star_conserved(const StarState& s, double s_m)
{
	return {s.rho, s.rho * s_m, s.rho * s.vt1, s.rho * s.vt2, s.e, s.bt1, s.bt2};
}

struct Fan {
	SignalSpeeds speeds;
	double pt_star = 0.0;
};

std::optional<Fan> fan(const LocalState& l, const LocalState& r, double bn, double gamma)
{
	const double cf = std::max(local_fast_speed(l, bn, gamma), local_fast_speed(r, bn, gamma));
	Fan f;
	f.speeds.s_l = std::min(l.vn, r.vn) - cf;
	f.speeds.s_r = std::max(l.vn, r.vn) + cf;
	const double dl = f.speeds.s_l - l.vn;
	const double dr = f.speeds.s_r - r.vn;
	const double den = dr * r.rho - dl * l.rho;
	if (!(den > kTiny * (std::abs(dr * r.rho) + std::abs(dl * l.rho)))) return std::nullopt;
	const double s_m = (dr * r.rho * r.vn - dl * l.rho * l.vn - r.pt + l.pt) / den;
	f.pt_star = (dr * r.rho * l.pt - dl * l.rho * r.pt + l.rho * r.rho * dr * dl * (r.vn - l.vn)) / den;
	f.speeds.s_m = s_m;
	const double scale = f.speeds.s_r - f.speeds.s_l;
	if (!(s_m - f.speeds.s_l > kTiny * scale) || !(f.speeds.s_r - s_m > kTiny * scale)) return std::nullopt;
	const double rho_l = l.rho * dl / (f.speeds.s_l - s_m);
	const double rho_r = r.rho * dr / (f.speeds.s_r - s_m);
	if (!(rho_l > 0.0) || !(rho_r > 0.0)) return std::nullopt;
	f.speeds.s_l_star = s_m - std::abs(bn) / std::sqrt(rho_l);
	f.speeds.s_r_star = s_m + std::abs(bn) / std::sqrt(rho_r);
	if (f.speeds.s_l_star < f.speeds.s_l || f.speeds.s_r_star > f.speeds.s_r) return std::nullopt;
	return f;
}

FluxVector hlld_impl(const PrimState& wl, const PrimState& wr, Axis dir, double c_h, double gamma)
{
	const int n = index_of(dir);
	const GlmState glm = glm_subsystem(wl.b[n], wl.psi, wr.b[n], wr.psi, c_h);
	const double bn = glm.bn;
	const LocalState l = to_local(wl, n, bn, gamma);
	const LocalState r = to_local(wr, n, bn, gamma);

	const auto fan_opt = fan(l, r, bn, gamma);
	if (!fan_opt) {
		++g_hll_fallbacks;
		const double cf = std::max(local_fast_speed(l, bn, gamma), local_fast_speed(r, bn, gamma));
		const double s_l = std::min(l.vn, r.vn) - cf;
		const double s_r = std::max(l.vn, r.vn) + cf;
		return to_global(hll_local(l, r, bn, s_l, s_r), n, glm, c_h);
	}
	const SignalSpeeds& s = fan_opt->speeds;
	if (s.s_l >= 0.0) return to_global(flux(l, bn), n, glm, c_h);
	if (s.s_r <= 0.0) return to_global(flux(r, bn), n, glm, c_h);

	StarState sl, sr;
	if (!star_state(l, bn, s.s_l, s.s_m, fan_opt->pt_star, sl) ||
	    !star_state(r, bn, s.s_r, s.s_m, fan_opt->pt_star, sr)) {
		++g_hll_fallbacks;
		return to_global(hll_local(l, r, bn, s.s_l, s.s_r), n, glm, c_h);
	}
	const Local7 ul = conserved(l), ur = conserved(r);
	const Local7 usl = star_conserved(sl, s.s_m), usr = star_conserved(sr, s.s_m);
	const Local7 fsl = jump(flux(l, bn), s.s_l, usl, ul);
	const Local7 fsr = jump(flux(r, bn), s.s_r, usr, ur);

	// Rotational discontinuities collapse onto the contact when B_n -> 0.
	if (0.5 * bn * bn < kTiny * fan_opt->pt_star) return to_global(s.s_m >= 0.0 ? fsl : fsr, n, glm, c_h);

	if (s.s_l_star >= 0.0) return to_global(fsl, n, glm, c_h);
	if (s.s_r_star <= 0.0) return to_global(fsr, n, glm, c_h);

	const double sq_l = std::sqrt(sl.rho), sq_r = std::sqrt(sr.rho);
	const double sgn = bn > 0.0 ? 1.0 : -1.0;
	const double inv = 1.0 / (sq_l + sq_r);
	StarState ss;
	ss.vt1 = (sq_l * sl.vt1 + sq_r * sr.vt1 + (sr.bt1 - sl.bt1) * sgn) * inv;
	ss.vt2 = (sq_l * sl.vt2 + sq_r * sr.vt2 + (sr.bt2 - sl.bt2) * sgn) * inv;
	ss.bt1 = (sq_l * sr.bt1 + sq_r * sl.bt1 + sq_l * sq_r * (sr.vt1 - sl.vt1) * sgn) * inv;
	ss.bt2 = (sq_l * sr.bt2 + sq_r * sl.bt2 + sq_l * sq_r * (sr.vt2 - sl.vt2) * sgn) * inv;
	const double vb_ss = s.s_m * bn + ss.vt1 * ss.bt1 + ss.vt2 * ss.bt2;

	if (s.s_m >= 0.0) {
		StarState d = ss;
		d.rho = sl.rho;
		d.e = sl.e - sq_l * (s.s_m * bn + sl.vt1 * sl.bt1 + sl.vt2 * sl.bt2 - vb_ss) * sgn;
		return to_global(jump(fsl, s.s_l_star, star_conserved(d, s.s_m), usl), n, glm, c_h);
	}
	StarState d = ss;
	d.rho = sr.rho;
	d.e = sr.e + sq_r * (s.s_m * bn + sr.vt1 * sr.bt1 + sr.vt2 * sr.bt2 - vb_ss) * sgn;
	return to_global(jump(fsr, s.s_r_star, star_conserved(d, s.s_m), usr), n, glm, c_h);
}

} // namespace

ConsState mc_slope(const ConsState& u_minus, const ConsState& u_0, const ConsState& u_plus)
{
	ConsState s;
	for (int v = 0; v < kNumVars; ++v) s[v] = mc_slope(u_minus[v], u_0[v], u_plus[v]);
	return s;
}

InterfacePair muscl_states(const std::array<ConsState, 4>& row, Axis dir)
{
	InterfacePair pair;
	pair.dir = dir;
	for (int v = 0; v < kNumVars; ++v) {
		pair.left[v] = row[1][v] + 0.5 * mc_slope(row[0][v], row[1][v], row[2][v]);
		pair.right[v] = row[2][v] - 0.5 * mc_slope(row[1][v], row[2][v], row[3][v]);
	}
	return pair;
}

GlmState glm_subsystem(double bn_l, double psi_l, double bn_r, double psi_r, double c_h)
{
	GlmState s;
	s.bn = 0.5 * (bn_l + bn_r) - (psi_r - psi_l) / (2.0 * c_h);
	s.psi = 0.5 * (psi_l + psi_r) - 0.5 * c_h * (bn_r - bn_l);
	return s;
}

std::optional<SignalSpeeds> signal_speeds(const InterfacePair& pair, double gamma)
{
	const int n = index_of(pair.dir);
	const PrimState wl = cons_to_prim(pair.left, gamma);
	const PrimState wr = cons_to_prim(pair.right, gamma);
	const double bn = 0.5 * (wl.b[n] + wr.b[n]);
	const auto f = fan(to_local(wl, n, bn, gamma), to_local(wr, n, bn, gamma), bn, gamma);
	if (!f) return std::nullopt;
	return f->speeds;
}

FluxVector hll_flux(const InterfacePair& pair, double c_h, double gamma)
{
	const int n = index_of(pair.dir);
	const PrimState wl = cons_to_prim(pair.left, gamma);
	const PrimState wr = cons_to_prim(pair.right, gamma);
	const GlmState glm = glm_subsystem(wl.b[n], wl.psi, wr.b[n], wr.psi, c_h);
	const LocalState l = to_local(wl, n, glm.bn, gamma);
	const LocalState r = to_local(wr, n, glm.bn, gamma);
	const double cf = std::max(local_fast_speed(l, glm.bn, gamma), local_fast_speed(r, glm.bn, gamma));
	const double s_l = std::min(l.vn, r.vn) - cf;
	const double s_r = std::max(l.vn, r.vn) + cf;
	return to_global(hll_local(l, r, glm.bn, s_l, s_r), n, glm, c_h);
}

FluxVector hlld_flux(const PrimState& left, const PrimState& right, Axis dir, double c_h, double gamma)
{
	return hlld_impl(left, right, dir, c_h, gamma);
}

FluxVector hlld_flux(const InterfacePair& pair, double c_h, double gamma)
{
	return hlld_impl(cons_to_prim(pair.left, gamma), cons_to_prim(pair.right, gamma), pair.dir, c_h, gamma);
}

long long hll_fallback_count() { return g_hll_fallbacks; }

} // namespace carmen

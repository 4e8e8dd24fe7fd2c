#ifndef CARMEN_STATE_HPP
#define CARMEN_STATE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace carmen {

inline constexpr int kNumVars = 9;

/* Conservative layout
 * 0 rho
 * 1-3 momentum rho*u
 * 4 total energy E
 * 5-7 B (normalized, mu0 absorbed)
 * 8 psi (GLM scalar)
 */
enum Var : int { kRho = 0, kMomX = 1, kMomY = 2, kMomZ = 3, kEnergy = 4, kBx = 5, kBy = 6, kBz = 7, kPsi = 8 };

using Vec3 = std::array<double, 3>;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr int index_of(Axis a) { return static_cast<int>(a); }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

struct ConsState {
	std::array<double, kNumVars> u{};

	double& operator[](int v) { return u[v]; }
	double operator[](int v) const { return u[v]; }

	double rho() const { return u[kRho]; }
	Vec3 mom() const { return {u[kMomX], u[kMomY], u[kMomZ]}; }
	double energy() const { return u[kEnergy]; }
	Vec3 b() const { return {u[kBx], u[kBy], u[kBz]}; }
	double psi() const { return u[kPsi]; }

	static ConsState make(double rho, const Vec3& mom, double energy, const Vec3& b, double psi)
	{
		return ConsState{{rho, mom[0], mom[1], mom[2], energy, b[0], b[1], b[2], psi}};
	}

	ConsState& operator+=(const ConsState& o)
	{
		for (int v = 0; v < kNumVars; ++v) u[v] += o.u[v];
		return *this;
	}
	ConsState& operator-=(const ConsState& o)
	{
		for (int v = 0; v < kNumVars; ++v) u[v] -= o.u[v];
		return *this;
	}
	ConsState& operator*=(double s)
	{
		for (auto& x : u) x *= s;
		return *this;
	}
	friend bool operator==(const ConsState&, const ConsState&) = default;
};

inline ConsState operator+(ConsState a, const ConsState& b) { return a += b; }
inline ConsState operator-(ConsState a, const ConsState& b) { return a -= b; }
inline ConsState operator*(ConsState a, double s) { return a *= s; }
inline ConsState operator*(double s, ConsState a) { return a *= s; }

// Interface fluxes share the conservative component layout.
using FluxVector = ConsState;

struct PrimState {
	double rho = 1.0;
	Vec3 vel{};
	double p = 1.0;
	Vec3 b{};
	double psi = 0.0;
};

struct CellLocation {
	int level = -1;
	int i = 0, j = 0, k = 0;
	std::string stage;
};

/// Thrown when density or recovered pressure is not positive.
class UnphysicalState : public std::runtime_error {
public:
	explicit UnphysicalState(const std::string& what, CellLocation where = {});
	const CellLocation& where() const { return where_; }

private:
	CellLocation where_;
};

struct ConstantResistivity {
	double eta = 0.0;
};

struct FieldResistivity {
	std::function<double(const Vec3&)> eta;
	double eta_max = 0.0;
};

using Resistivity = std::variant<ConstantResistivity, FieldResistivity>;

struct GasModel {
	double gamma = 5.0 / 3.0;
	Resistivity resistivity = ConstantResistivity{};

	double eta_at(const Vec3& x) const;
	double eta_max() const;
	bool ideal() const { return eta_max() <= 0.0; }
};

ConsState prim_to_cons(const PrimState& w, double gamma);

/// Throws UnphysicalState if rho <= 0 or the recovered pressure is <= 0.
PrimState cons_to_prim(const ConsState& u, double gamma);

/// Non-throwing variant for hot paths and fallbacks.
std::optional<PrimState> try_cons_to_prim(const ConsState& u, double gamma);

double pressure(const ConsState& u, double gamma);

bool is_physical(const ConsState& u, double gamma);

/// Ideal MHD flux with GLM terms; resistive terms are sources and not included.
FluxVector physical_flux(const ConsState& u, Axis dir, double c_h, double gamma);
FluxVector physical_flux(const PrimState& w, Axis dir, double c_h, double gamma);

double sound_speed(const PrimState& w, double gamma);

/// Fast magnetosonic speed along dir.
double fast_speed(const PrimState& w, Axis dir, double gamma);

} // namespace carmen

#endif

#include "carmen/mr.hpp"

#include <algorithm>
#include <cmath>

namespace carmen {

namespace {
constexpr double kMaxFloor = 1e-12;

double guard(double m) { return m < kMaxFloor ? 1.0 : m; }
} // namespace

// m_ layout: rho, mom x/y/z, E, B x/y/z
void FieldMaximaBuilder::add(const ConsState& u)
{
	m_[0] = std::max(m_[0], std::abs(u[kRho]));
	for (int c = 0; c < 3; ++c) {
		m_[1 + c] = std::max(m_[1 + c], std::abs(u[kMomX + c]));
		m_[5 + c] = std::max(m_[5 + c], std::abs(u[kBx + c]));
	}
	m_[4] = std::max(m_[4], std::abs(u[kEnergy]));
}

void FieldMaximaBuilder::merge(const FieldMaximaBuilder& other)
{
	for (std::size_t q = 0; q < m_.size(); ++q) m_[q] = std::max(m_[q], other.m_[q]);
}

FieldMaxima FieldMaximaBuilder::result() const
{
	FieldMaxima f;
	f.rho = m_[0];
	f.mom = {m_[1], m_[2], m_[3]};
	f.energy = m_[4];
	f.b = {m_[5], m_[6], m_[7]};
	return f;
}

double detail_norm(const ConsState& d, const FieldMaxima& m, DetailNorm mode, int dim)
{
	double sig = std::max(std::abs(d[kRho]) / guard(m.rho), std::abs(d[kEnergy]) / guard(m.energy));
	if (mode == DetailNorm::Scalar) {
		for (int c = 0; c < 3; ++c) {
			sig = std::max(sig, std::abs(d[kMomX + c]) / guard(m.mom[c]));
			sig = std::max(sig, std::abs(d[kBx + c]) / guard(m.b[c]));
		}
		return sig;
	}
	// Vector-based: the components of rho*u and B are grouped; in 2D only the
	// in-plane pair is grouped and z is normalized on its own.
	const int grouped = dim == 3 ? 3 : 2;
	const auto vector_entry = [&](int first, const Vec3& maxima) {
		double sq = 0.0, mx = 0.0;
		for (int c = 0; c < grouped; ++c) {
			sq += d[first + c] * d[first + c];
			mx = std::max(mx, maxima[c]);
		}
		return std::sqrt(sq) / guard(mx);
	};
	sig = std::max(sig, vector_entry(kMomX, m.mom));
	sig = std::max(sig, vector_entry(kBx, m.b));
	if (dim == 2) {
		sig = std::max(sig, std::abs(d[kMomZ]) / guard(m.mom[2]));
		sig = std::max(sig, std::abs(d[kBz]) / guard(m.b[2]));
	}
	return sig;
}

double threshold_level(const ThresholdPolicy& policy, int level, int max_level, int dim, double domain_volume)
{
	if (policy.mode == ThresholdMode::Fixed) return policy.epsilon;
	return policy.epsilon / domain_volume * std::exp2(static_cast<double>(dim * (level - max_level + 1)));
}

} // namespace carmen

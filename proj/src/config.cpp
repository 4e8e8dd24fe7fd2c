#include "carmen/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace carmen {

namespace {

std::string trim(const std::string& s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos) return {};
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, int line)
{
	double out = 0.0;
	const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
	if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
		throw ParseError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + v + "'", line);
	return out;
}

long to_long(const std::string& key, const std::string& v, int line)
{
	long out = 0;
	const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
	if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
		throw ParseError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" + v + "'", line);
	return out;
}

void require(bool ok, const std::string& what, int line)
{
	if (!ok) throw RangeViolation(line > 0 ? "line " + std::to_string(line) + ": " + what : what, line);
}

} // namespace

RunConfig default_config(const std::string& benchmark)
{
	RunConfig c;
	c.spec = benchmark_spec(benchmark);
	c.level = c.spec.default_level;
	return c;
}

void validate(const RunConfig& c)
{
	require(c.level >= 3 && c.level <= 12, "level must lie in [3, 12]", 0);
	require(c.spec.policy.epsilon >= 0.0, "epsilon must be >= 0", 0);
	require(c.spec.cfl > 0.0 && c.spec.cfl < 1.0, "cfl must lie in (0, 1)", 0);
	require(c.spec.alpha_p >= 0.0, "alpha_p must be >= 0", 0);
	require(c.spec.gamma > 1.0, "gamma must be > 1", 0);
	require(c.spec.eta >= 0.0, "eta must be >= 0", 0);
	require(c.spec.t_end > 0.0, "t_end must be > 0", 0);
	require(c.snapshots >= 0, "snapshots must be >= 0", 0);
	require(c.max_steps >= 0, "max_steps must be >= 0", 0);
	require(c.min_level >= 0 && c.min_level <= c.level, "min_level must lie in [0, level]", 0);
}

RunConfig parse_config(const std::string& text)
{
	std::map<std::string, std::pair<std::string, int>> entries;
	std::istringstream in(text);
	std::string raw;
	int line = 0;
	while (std::getline(in, raw)) {
		++line;
		const auto hash = raw.find('#');
		const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
		if (body.empty()) continue;
		const auto eq = body.find('=');
		if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected 'key = value'", line);
		const std::string key = trim(body.substr(0, eq));
		const std::string value = trim(body.substr(eq + 1));
		if (key.empty() || value.empty()) throw ParseError("line " + std::to_string(line) + ": empty key or value", line);
		if (entries.count(key)) throw ParseError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line);
		entries[key] = {value, line};
	}

	static const char* const known[] = {"benchmark", "level",   "epsilon",   "epsilon0",   "detail_norm",
	                                    "cfl",       "alpha_p", "gamma",     "eta",        "t_end",
	                                    "snapshots", "output_dir", "mode",   "max_steps",  "min_level", "safety_refinement",
	                                    "reconnection_profile"};
	for (const auto& [key, vl] : entries) {
		bool ok = false;
		for (const char* k : known) ok = ok || key == k;
		if (!ok) throw UnknownKey("line " + std::to_string(vl.second) + ": unknown key '" + key + "'", vl.second);
	}

	const auto bench = entries.find("benchmark");
	if (bench == entries.end()) throw ParseError("missing required key 'benchmark'", 0);
	RunConfig c;
	try {
		c = default_config(bench->second.first);
	} catch (const std::invalid_argument& e) {
		throw ParseError("line " + std::to_string(bench->second.second) + ": " + e.what(), bench->second.second);
	}

	if (entries.count("epsilon") && entries.count("epsilon0"))
		throw ParseError("line " + std::to_string(entries["epsilon0"].second) + ": 'epsilon' and 'epsilon0' are exclusive",
		                 entries["epsilon0"].second);

	for (const auto& [key, vl] : entries) {
		const auto& [v, ln] = vl;
		if (key == "benchmark") continue;
		if (key == "level") {
			c.level = static_cast<int>(to_long(key, v, ln));
			require(c.level >= 3 && c.level <= 12, "level must lie in [3, 12]", ln);
		} else if (key == "epsilon") {
			c.spec.policy.mode = ThresholdMode::Fixed;
			c.spec.policy.epsilon = to_double(key, v, ln);
			require(c.spec.policy.epsilon >= 0.0, "epsilon must be >= 0", ln);
		} else if (key == "epsilon0") {
			c.spec.policy.mode = ThresholdMode::Harten;
			c.spec.policy.epsilon = to_double(key, v, ln);
			require(c.spec.policy.epsilon >= 0.0, "epsilon0 must be >= 0", ln);
		} else if (key == "detail_norm") {
			if (v == "vector")
				c.spec.policy.detail_norm = DetailNorm::VectorBased;
			else if (v == "scalar")
				c.spec.policy.detail_norm = DetailNorm::Scalar;
			else
				throw ParseError("line " + std::to_string(ln) + ": detail_norm must be 'vector' or 'scalar'", ln);
		} else if (key == "cfl") {
			c.spec.cfl = to_double(key, v, ln);
			require(c.spec.cfl > 0.0 && c.spec.cfl < 1.0, "cfl must lie in (0, 1)", ln);
		} else if (key == "alpha_p") {
			c.spec.alpha_p = to_double(key, v, ln);
			require(c.spec.alpha_p >= 0.0, "alpha_p must be >= 0", ln);
		} else if (key == "gamma") {
			c.spec.gamma = to_double(key, v, ln);
			require(c.spec.gamma > 1.0, "gamma must be > 1", ln);
		} else if (key == "eta") {
			c.spec.eta = to_double(key, v, ln);
			c.spec.eta_field = false;
			require(c.spec.eta >= 0.0, "eta must be >= 0", ln);
		} else if (key == "t_end") {
			c.spec.t_end = to_double(key, v, ln);
			require(c.spec.t_end > 0.0, "t_end must be > 0", ln);
		} else if (key == "snapshots") {
			c.snapshots = static_cast<int>(to_long(key, v, ln));
			require(c.snapshots >= 0, "snapshots must be >= 0", ln);
		} else if (key == "output_dir") {
			c.output_dir = v;
		} else if (key == "mode") {
			if (v == "adaptive")
				c.adaptive = true;
			else if (v == "uniform")
				c.adaptive = false;
			else
				throw ParseError("line " + std::to_string(ln) + ": mode must be 'adaptive' or 'uniform'", ln);
		} else if (key == "max_steps") {
			c.max_steps = to_long(key, v, ln);
			require(c.max_steps >= 0, "max_steps must be >= 0", ln);
		} else if (key == "min_level") {
			c.min_level = static_cast<int>(to_long(key, v, ln));
		} else if (key == "safety_refinement") {
			if (v == "significant")
				c.safety = SafetyRefinement::Significant;
			else if (v == "all")
				c.safety = SafetyRefinement::All;
			else
				throw ParseError("line " + std::to_string(ln) + ": safety_refinement must be 'significant' or 'all'", ln);
		} else if (key == "reconnection_profile") {
			if (v == "smooth")
				c.spec.profile = ReconnectionProfile::Smooth;
			else if (v == "narrow")
				c.spec.profile = ReconnectionProfile::Narrow;
			else
				throw ParseError("line " + std::to_string(ln) + ": reconnection_profile must be 'smooth' or 'narrow'", ln);
		}
	}
	validate(c);
	return c;
}

RunConfig load_config(const std::string& path)
{
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_config(ss.str());
}

} // namespace carmen

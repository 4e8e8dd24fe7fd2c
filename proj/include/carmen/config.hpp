#ifndef CARMEN_CONFIG_HPP
#define CARMEN_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "carmen/benchmarks.hpp"
#include "carmen/mr.hpp"

namespace carmen {

class ConfigError : public std::runtime_error {
public:
	ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
	int line() const { return line_; }

private:
	int line_;
};

class ParseError : public ConfigError {
	using ConfigError::ConfigError;
};

class UnknownKey : public ConfigError {
	using ConfigError::ConfigError;
};

class RangeViolation : public ConfigError {
	using ConfigError::ConfigError;
};

/// Physical and numerical parameters (gamma, cfl, alpha_p, policy, t_end,
/// resistivity) live in the benchmark spec and are overridden in place.
struct RunConfig {
	BenchmarkSpec spec;
	int level = 9;
	int snapshots = 10;
	std::string output_dir = "output";
	bool adaptive = true;
	long max_steps = 0; // 0 = no limit
	int min_level = 2;
	SafetyRefinement safety = SafetyRefinement::Significant;
};

/// Benchmark defaults without any overrides.
RunConfig default_config(const std::string& benchmark);

/// Parses `key = value` lines (`#` starts a comment). The `benchmark` key is
/// required and supplies the defaults; other keys override them.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Checks the ranges of a config built in code; throws RangeViolation.
void validate(const RunConfig& config);

} // namespace carmen

#endif

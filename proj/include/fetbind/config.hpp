#ifndef FETBIND_CONFIG_HPP
#define FETBIND_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Run configuration: a small block-structured text format whose keys
 *        mirror the parameter and solver fields one to one.
 *
 * Example:
 *
 *     dimensionless {
 *       Da = 66.42
 *       K = 1
 *       l_s = 1e-3
 *       epsilon = 0.4
 *     }
 *     solver {
 *       n_nodes = 81
 *       t_end = 150
 *       output_times = 151
 *       integrator = adaptive
 *     }
 *     output {
 *       directory = out
 *       format = csv
 *       precision = 12
 *     }
 *
 * Exactly one of the `dimensional` / `dimensionless` blocks must be present.
 * Parse or validation failures raise ConfigError with file/line context.
 */

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fetbind/model.hpp"
#include "fetbind/solver.hpp"

namespace fetbind {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    enum class Format { csv, json };
    std::string directory;  ///< empty means: resolve from --out / env / "out"
    Format format = Format::csv;
    int precision = 12;  ///< significant digits in data files, at least 6
};

struct SweepConfig {
    enum class Axis { assoc_rate, inject_conc, dissoc_const };
    Axis axis = Axis::assoc_rate;
    std::vector<double> values;
    std::vector<std::string> labels;  ///< optional; defaults to p1, p2, ...
};

struct ConvergeConfig {
    int i_max = 7;
};

struct OracleConfig {
    std::vector<std::string> suites;  ///< polylog | kernel-integrals | laplace-strip
    int n_nodes = 27;
    double gate_ratio = 1e-3;
    double aspect = 0.4;
    double strip_height = 4.0;
};

struct RunConfig {
    std::optional<DimensionalParams> dimensional;
    std::optional<DimensionlessParams> dimensionless;
    SolveConfig solver;
    OutputConfig output;
    std::optional<SweepConfig> sweep;
    std::optional<ConvergeConfig> converge;
    std::optional<OracleConfig> oracle;

    /// Dimensionless groups to solve with (derived from the dimensional
    /// block when that is the one present).
    DimensionlessParams resolve_params() const;
};

/// Parses and validates a configuration file.
RunConfig load_config(const std::string& path);

/// Parses configuration text (diagnostics reference the given name).
RunConfig parse_config(const std::string& text, const std::string& name);

}  // namespace fetbind

#endif  // FETBIND_CONFIG_HPP

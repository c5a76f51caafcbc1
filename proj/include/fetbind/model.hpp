#ifndef FETBIND_MODEL_HPP
#define FETBIND_MODEL_HPP

/**
 * @file model.hpp
 * @brief Dimensional instrument/chemistry parameters, the derived
 *        dimensionless groups, and range validation for the desk-scale
 *        FET biosensor regime.
 *
 * Dimensional quantities use CGS-style units (cm, s, mol).  Dimensionless
 * time is scaled by the forward reaction rate, t = ka * Cu * t_phys.
 */

#include <optional>
#include <string>
#include <vector>

namespace fetbind {

/// Physical constants of the well/gate/chemistry system.
struct DimensionalParams {
    double diffusivity;       ///< ligand diffusivity [cm^2/s]
    double assoc_rate;        ///< association rate ka [cm^3 mol^-1 s^-1]
    double dissoc_rate;       ///< dissociation rate kd [s^-1]
    double inject_conc;       ///< injected ligand concentration Cu [mol cm^-3]
    double receptor_density;  ///< receptor surface density Rt [mol cm^-2]
    double well_height;       ///< solution-well height H [cm]
    double well_length;       ///< solution-well length L [cm]
    double gate_length;       ///< biochemical gate length ls [cm]

    /// Throws std::invalid_argument if any field is nonpositive or the
    /// gate does not fit inside the well.
    void validate() const;
};

/**
 * @brief Dimensionless groups governing the reduced binding problem.
 *
 * Only the gate-scale Damkohler number, the equilibrium dissociation
 * constant, the gate/well length ratio and the aspect ratio enter the
 * solver.  The well-scale diffusion/Damkohler groups and the gate-scale
 * diffusion group are diagnostics carried along when the parameters were
 * derived from dimensional inputs; direct construction may leave them
 * unset.
 */
struct DimensionlessParams {
    double damkohler;     ///< Da: reaction velocity / diffusion velocity at gate scale
    double dissoc_const;  ///< K = kd / (ka * Cu); equilibrium bound fraction is 1/(1+K)
    double gate_ratio;    ///< l_s = gate length / well length
    double aspect;        ///< epsilon = well height / well length

    std::optional<double> damkohler_well;  ///< Da_w, well-scale Damkohler number
    std::optional<double> diffusion_well;  ///< D_w, well-scale diffusion/reaction ratio
    std::optional<double> diffusion_gate;  ///< D, gate-scale diffusion/reaction ratio

    void validate() const;
};

/// One range check of validate_ranges.
struct RangeCheck {
    std::string name;
    double value;
    double lower;
    double upper;
    bool in_range;
};

/// Advisory report: groups outside the experimentally calibrated bounds.
struct ValidationReport {
    std::vector<RangeCheck> checks;
    bool all_in_range() const;
    std::vector<std::string> warnings() const;
};

/// Derives every dimensionless group from dimensional inputs.
DimensionlessParams nondimensionalize(const DimensionalParams& dim);

/**
 * @brief Flags dimensionless groups outside the desk-scale instrument regime.
 *
 * Bounds: D_w in [2.5e-2, 2.5e2], D in [4e3, 4e7], Da_w in [1.33e3, 2.66e3],
 * Da in [3.32, 66.42], K in [1e-2, 1e6].  Warnings only; the solver remains
 * valid outside these ranges (e.g. Da = 0 recovers the well-mixed limit).
 */
ValidationReport validate_ranges(const DimensionlessParams& p);

/// Converts dimensionless time back to seconds: t_phys = t / (ka * Cu).
double time_to_physical(double t, const DimensionalParams& dim);

}  // namespace fetbind

#endif  // FETBIND_MODEL_HPP

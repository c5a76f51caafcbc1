#include "fetbind/model.hpp"

#include <stdexcept>

namespace fetbind {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

}  // namespace

void DimensionalParams::validate() const {
    require_positive(diffusivity, "diffusivity");
    require_positive(assoc_rate, "assoc_rate");
    require_positive(dissoc_rate, "dissoc_rate");
    require_positive(inject_conc, "inject_conc");
    require_positive(receptor_density, "receptor_density");
    require_positive(well_height, "well_height");
    require_positive(well_length, "well_length");
    require_positive(gate_length, "gate_length");
    if (!(gate_length < well_length)) {
        throw std::invalid_argument("gate_length must be smaller than well_length");
    }
}

void DimensionlessParams::validate() const {
    if (!(damkohler >= 0.0)) {
        throw std::invalid_argument("damkohler must be nonnegative");
    }
    if (!(dissoc_const >= 0.0)) {
        throw std::invalid_argument("dissoc_const must be nonnegative");
    }
    require_positive(gate_ratio, "gate_ratio");
    require_positive(aspect, "aspect");
    for (const auto& [v, name] : {std::pair{damkohler_well, "damkohler_well"},
                                  {diffusion_well, "diffusion_well"},
                                  {diffusion_gate, "diffusion_gate"}}) {
        if (v && !(*v > 0.0)) {
            throw std::invalid_argument(std::string(name) + " must be positive when set");
        }
    }
}

DimensionlessParams nondimensionalize(const DimensionalParams& dim) {
    dim.validate();
    const double reaction_rate = dim.assoc_rate * dim.inject_conc;  // ka * Cu [1/s]
    DimensionlessParams p;
    p.damkohler = dim.assoc_rate * dim.receptor_density * dim.gate_length / dim.diffusivity;
    p.dissoc_const = dim.dissoc_rate / reaction_rate;
    p.gate_ratio = dim.gate_length / dim.well_length;
    p.aspect = dim.well_height / dim.well_length;
    p.damkohler_well = dim.well_height * dim.assoc_rate * dim.receptor_density / dim.diffusivity;
    p.diffusion_well = dim.diffusivity / (dim.well_height * dim.well_height * reaction_rate);
    p.diffusion_gate = dim.diffusivity / (dim.gate_length * dim.gate_length * reaction_rate);
    return p;
}

bool ValidationReport::all_in_range() const {
    for (const auto& c : checks) {
        if (!c.in_range) return false;
    }
    return true;
}

std::vector<std::string> ValidationReport::warnings() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.in_range) {
            out.push_back(c.name + " = " + std::to_string(c.value) + " outside [" +
                          std::to_string(c.lower) + ", " + std::to_string(c.upper) + "]");
        }
    }
    return out;
}

ValidationReport validate_ranges(const DimensionlessParams& p) {
    ValidationReport report;
    auto add = [&report](const std::string& name, double value, double lo, double hi) {
        report.checks.push_back({name, value, lo, hi, value >= lo && value <= hi});
    };
    if (p.diffusion_well) add("D_w", *p.diffusion_well, 2.5e-2, 2.5e2);
    if (p.diffusion_gate) add("D", *p.diffusion_gate, 4e3, 4e7);
    if (p.damkohler_well) add("Da_w", *p.damkohler_well, 1.33e3, 2.66e3);
    add("Da", p.damkohler, 3.32, 66.42);
    add("K", p.dissoc_const, 1e-2, 1e6);
    return report;
}

double time_to_physical(double t, const DimensionalParams& dim) {
    if (t < 0.0) throw std::invalid_argument("dimensionless time must be nonnegative");
    dim.validate();
    return t / (dim.assoc_rate * dim.inject_conc);
}

}  // namespace fetbind

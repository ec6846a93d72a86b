// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "foilfem/mesh.hpp"

namespace foilfem {

inline constexpr double mu0 = 4.0e-7 * pi;

// E-J power law rho(j) = (e_c/j_c) (|j|/j_c)^(n-1), regularized below
// j_floor so the Newton tangent stays finite at j = 0.
struct HtsLaw {
    double e_c = 1e-4;   // critical electric field, V/m
    double j_c = 0.0;    // critical current density, A/m^2
    double n = 20.0;     // power-law exponent
    double j_floor_rel = 1e-6;  // floor as a fraction of j_c

    void validate() const {
        if (!(e_c > 0.0) || !(j_c > 0.0) || !(n >= 1.0) || !(j_floor_rel > 0.0))
            throw std::invalid_argument("hts law: need e_c > 0, j_c > 0, n >= 1");
    }

    // Homogenized law for engineering current density j_eng = fill * j_foil:
    // rho_eff(j) = rho_foil(j / fill) / fill, which for the power law is the
    // same law with the critical density scaled by the fill factor.
    HtsLaw homogenized(double fill) const {
        if (!(fill > 0.0 && fill <= 1.0))
            throw std::invalid_argument("hts law: fill factor must be in (0, 1]");
        HtsLaw h = *this;
        h.j_c = j_c * fill;
        return h;
    }
};

struct HtsEval {
    double rho;        // resistivity at |j|
    double drho_dj;    // derivative w.r.t. |j|
    double rho_diff;   // differential resistivity d(rho j)/dj = rho + |j| drho
};

inline HtsEval hts_resistivity(double j_mag, const HtsLaw& law) {
    law.validate();
    if (j_mag < 0.0) throw std::invalid_argument("hts_resistivity: |j| must be >= 0");
    const double floor = law.j_floor_rel * law.j_c;
    const double rho0 = law.e_c / law.j_c;
    if (j_mag <= floor) {
        const double rho = rho0 * std::pow(floor / law.j_c, law.n - 1.0);
        return {rho, 0.0, rho};
    }
    const double rho = rho0 * std::pow(j_mag / law.j_c, law.n - 1.0);
    const double drho = rho * (law.n - 1.0) / j_mag;
    return {rho, drho, law.n * rho};
}

// Linear material of one region. Stores mu and sigma; nu and rho are the
// exact reciprocals so that mu*nu = 1 and sigma*rho = 1 hold by
// construction.
struct Material {
    double mu = mu0;
    double sigma = 0.0;
    std::optional<HtsLaw> hts;

    double nu() const { return 1.0 / mu; }
    double rho() const {
        if (sigma <= 0.0) throw std::runtime_error("material: resistivity of a non-conductor");
        return 1.0 / sigma;
    }
    bool conducting() const { return sigma > 0.0 || hts.has_value(); }
};

// Per-region material assignment for one problem. The spurious resistivity
// applies to non-conducting regions of the full-h formulation only.
struct MaterialField {
    Material air{mu0, 0.0, {}};
    Material core{10.0 * mu0, 0.0, {}};
    Material foil{mu0, 5.9e7, {}};
    double spurious_rho = 1.0;  // Ohm m

    const Material& of(RegionRole role) const {
        switch (role) {
            case RegionRole::air:
            case RegionRole::gap:
                return air;
            case RegionRole::core:
                return core;
            case RegionRole::turn:
                return foil;
        }
        throw std::runtime_error("material: undefined region role");
    }
};

// Homogenized bulk material: sigma_0 = fill * sigma_foil, i.e.
// rho_0 = rho_foil / fill. Nonlinear laws are rescaled accordingly.
inline Material effective_material(const Material& foil, double fill) {
    if (!(fill > 0.0 && fill <= 1.0))
        throw std::invalid_argument("effective_material: fill factor must be in (0, 1]");
    Material bulk = foil;
    bulk.sigma = foil.sigma * fill;
    if (foil.hts) bulk.hts = foil.hts->homogenized(fill);
    return bulk;
}

}  // namespace foilfem

#pragma once

#include "attb/tdual.hpp"

/* The two worked example families: rank-2 torus bundles over T^2 with
 * commuting shear monodromy (sec61) and over the mapping torus of the
 * antipodal map on S^2 (sec62). Bundles are indexed by the Chern
 * coordinate j, fluxes by the E2^{2,1} coordinate k. */

namespace attb::catalog {

struct Family {
    std::string name;   // "sec61" | "sec62"
    LocalSystem lambda;

    AffineBundle bundle(long j) const;
    FluxDatum flux(const AffineBundle& b, long k) const;
    /* Swap (j,k) -> (k,j) realizes T-duality for these cells. */
    bool swap_legal(long j, long k) const;
    int total_dim() const { return base_dim(lambda.base) + lambda.rank; }
};

/* sec61 with shear parameters (m, n); they must be coprime for the family
 * to match the worked tables. */
Family sec61(long m = 2, long n = 3);
Family sec62();

Family family_by_name(const std::string& name);

}  // namespace attb::catalog

#include "attb/catalog.hpp"

namespace attb::catalog {

AffineBundle Family::bundle(long j) const {
    /* H^2(M, Lambda) = Z for both families; coordinate j. */
    return make_bundle(lambda, {Int(j)});
}

FluxDatum Family::flux(const AffineBundle& b, long k) const {
    int gens = base_generator_count(lambda.base);
    std::vector<Int> h3;
    if (base_dim(lambda.base) >= 3) {
        BaseModel triv(lambda.base, 1, trivial_system(lambda.base, 1).monodromies);
        size_t ngen = size_t(triv.cohomology(3).group().free_rank) +
                      triv.cohomology(3).group().invariant_factors.size();
        h3.assign(ngen, Int(0));
    }
    return make_flux(b, Z2Class::zero(gens), {Int(k)}, h3);
}

bool Family::swap_legal(long j, long k) const {
    if (name == "sec61") return true;
    /* the mapping-torus family only realizes the interchange for odd pairs */
    return (j % 2 != 0) && (k % 2 != 0);
}

Family sec61(long m, long n) {
    Family f;
    f.name = "sec61";
    f.lambda = LocalSystem{2, Torus{2},
                           {IntMatrix::from_rows({{1, m}, {0, 1}}),
                            IntMatrix::from_rows({{1, n}, {0, 1}})}};
    return f;
}

Family sec62() {
    Family f;
    f.name = "sec62";
    f.lambda = LocalSystem{2, MappingTorus{FiberModel::sphere(2, -1)},
                           {IntMatrix::from_rows({{-1, -1}, {0, -1}})}};
    return f;
}

Family family_by_name(const std::string& name) {
    if (name == "sec61") return sec61();
    if (name == "sec62") return sec62();
    throw std::invalid_argument("unknown family: " + name);
}

}  // namespace attb::catalog

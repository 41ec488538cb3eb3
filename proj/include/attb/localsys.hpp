#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "attb/abelian.hpp"

/* Local systems over a small catalog of base spaces (tori and mapping tori
 * of formal fibers) and their cohomology with local coefficients, computed
 * from invariant cochain models:
 *
 *   Torus(k):       Koszul complex  C^p = Z^n (x) Wedge^p (Z^k)*
 *                   d(m (x) w) = sum_i (rho(x_i) - 1) m (x) x_i* ^ w
 *
 *   MappingTorus:   algebraic mapping cone
 *                   C^p = C^p(F) (x) Z^n  (+)  C^{p-1}(F) (x) Z^n
 *                   d(a, s) = (0, (phi* (x) rho(x) - 1) a)
 */

namespace attb {

struct DegreeOutOfRange : std::runtime_error {
    explicit DegreeOutOfRange(const std::string& w) : std::runtime_error(w) {}
};

/* Formal fiber: graded free cochain groups with zero differential, a
 * graded-commutative product, and a degree-0 ring endomorphism. */
struct FiberModel {
    std::vector<int> ranks;        // ranks[q] = rank of C^q(F), q = 0..top
    std::vector<IntMatrix> endo;   // endo[q] : C^q -> C^q (the map phi*)
    /* mult[q1][q2] has shape ranks[q1+q2] x (ranks[q1]*ranks[q2]);
     * column j1*ranks[q2]+j2 is the product of basis elements. */
    std::vector<std::vector<IntMatrix>> mult;
    std::string name;

    int top() const { return int(ranks.size()) - 1; }
    int rank(int q) const { return (q >= 0 && q <= top()) ? ranks[q] : 0; }

    /* S^dim with an endomorphism of the given degree on H^dim. */
    static FiberModel sphere(int dim, long degree);

    /* Product of cochains a in C^{q1}, b in C^{q2}. */
    std::vector<Int> multiply(int q1, const std::vector<Int>& a, int q2,
                              const std::vector<Int>& b) const;

    void check() const;  // associative, unital, graded-commutative on basis
};

struct Torus {
    int k = 1;
};

struct MappingTorus {
    FiberModel fiber;
};

using BaseSpace = std::variant<Torus, MappingTorus>;

int base_dim(const BaseSpace& b);
int base_generator_count(const BaseSpace& b);  // listed pi_1 generators
std::string base_name(const BaseSpace& b);

/* H^1(M, Z_2) elements for catalog bases: one bit per pi_1 generator. */
struct Z2Class {
    std::vector<int> bits;

    bool is_trivial() const;
    Z2Class operator+(const Z2Class& o) const;
    bool operator==(const Z2Class& o) const = default;
    static Z2Class zero(int gens) { return Z2Class{std::vector<int>(gens, 0)}; }
    std::string to_string() const;
};

/* Orientation character of the base itself. */
Z2Class base_w1(const BaseSpace& b);

struct LocalSystem {
    int rank = 0;
    BaseSpace base;
    std::vector<IntMatrix> monodromies;  // one per pi_1 generator
};

struct SystemDiagnostics {
    bool ok = true;
    std::vector<std::string> issues;  // "NonUnimodular: ...", "NonCommuting: ..."
};

SystemDiagnostics validate(const LocalSystem& sys);

LocalSystem trivial_system(const BaseSpace& base, int rank);
LocalSystem dual(const LocalSystem& sys);
LocalSystem exterior_power(const LocalSystem& sys, int q);

/* Determinant character g -> (det rho(g) == -1). */
Z2Class w1(const LocalSystem& sys);

/* Lexicographically ordered q-subsets of {0..n-1}. */
const std::vector<std::vector<int>>& wedge_subsets(int n, int q);
long binomial(int n, int q);

/* Cochain model of (base, system); also the home of the cup products the
 * spectral sequence needs. Instances are built per coefficient system. */
class BaseModel {
  public:
    BaseModel() = default;
    BaseModel(const BaseSpace& base, int rank, const std::vector<IntMatrix>& monodromies);

    const BaseSpace& base() const { return base_; }
    int coeff_rank() const { return n_; }
    int dim() const { return dim_; }
    int cochain_rank(int p) const;
    const IntMatrix& differential(int p) const;  // C^p -> C^{p+1}

    /* H^p as a presented subquotient of C^p (cached). */
    const PresentedSubquotient& cohomology(int p) const;
    std::vector<FgAbGroup> cohomology_groups() const;

  private:
    BaseSpace base_;
    int n_ = 0, dim_ = 0;
    std::vector<IntMatrix> mono_;
    std::vector<IntMatrix> d_;  // d_[p] : C^p -> C^{p+1}
    std::vector<PresentedSubquotient> h_;  // built eagerly; instances immutable

    void build_torus(const Torus& t);
    void build_cone(const MappingTorus& mt);
};

std::vector<PresentedSubquotient> cohomology(const LocalSystem& sys);
std::vector<FgAbGroup> cohomology_groups(const LocalSystem& sys);

/* Pairing of coefficient basis vectors used by the cup products below:
 * maps (index into W1 basis, index into W2 basis) to a W3 vector. */
using CoeffPairing = std::function<std::vector<Int>(int, int)>;

/* Cup of a degree-2 class with coefficients W1 against a degree-p class
 * with coefficients W2, producing degree p+2 with coefficients W3.
 *
 * For torus bases this is implemented for p = 0 (all the differentials a
 * two-dimensional base needs); higher p with p+2 <= dim is rejected.
 * For mapping tori the full twisted cone product is used. */
std::vector<Int> cup_degree2(const BaseSpace& base,
                             const std::vector<IntMatrix>& w1_mono, int w1_rank,
                             const std::vector<Int>& c_rep,
                             int p,
                             int w2_rank, const std::vector<Int>& a_rep,
                             int w3_rank, const CoeffPairing& pair);

/* Full twisted product on a mapping-torus cone model:
 * (a, s) cup (b, t) = (a.b, s.b + (-1)^{p1} T(a).t), T = phi* (x) mono. */
std::vector<Int> cone_cup(const FiberModel& f, const IntMatrix& w1_mono, int w1_rank,
                          int p1, const std::vector<Int>& x,
                          int w2_rank, int p2, const std::vector<Int>& y,
                          int w3_rank, const CoeffPairing& pair);

/* i_{e_i} : Wedge^q (Z^n)* -> Wedge^{q-1}, basis vector e_i of Lambda. */
std::vector<Int> contract_wedge_basis(int n, int q, int lambda_index, int wedge_index);
/* e-hat_i ^ - : Wedge^q -> Wedge^{q+1}, basis vector of Lambda*. */
std::vector<Int> wedge_mult_basis(int n, int q, int dual_index, int wedge_index);

/* Representative-level d2 pairing: c in C^2(M, Lambda), a in C^p(M, Wedge^q Lambda*),
 * result in C^{p+2}(M, Wedge^{q-1} Lambda*). Throws DegreeOutOfRange if q < 1;
 * returns the zero cochain when p + 2 > dim M. */
std::vector<Int> contract_with_chern(const LocalSystem& lambda, const std::vector<Int>& c_rep,
                                     int p, int q, const std::vector<Int>& a_rep);

/* Flux pairing: k in C^2(M, Lambda*), a in C^p(M, Wedge^q Lambda*), result in
 * C^{p+2}(M, Wedge^{q+1} Lambda*). Used by the twisted K-theory differential. */
std::vector<Int> cup_with_flux(const LocalSystem& lambda, const std::vector<Int>& k_rep,
                               int p, int q, const std::vector<Int>& a_rep);

}  // namespace attb

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

/* Exact-rational exterior-algebra model of invariant forms on a flat
 * torus-bundle pair and the fiberwise Fourier-Mukai ("Hori") transform:
 * the kernel e^{-B}, fiber integration, the degree involution sigma, the
 * Mukai pairing, twisted differentials, and the Courant-style swap map.
 *
 * Generators are ordered f^1..f^m < e^1..e^n < ehat^1..ehat^n; all are
 * odd. Monomials are stored as bitmasks over that order. */

namespace attb {

using Rat = mpq_class;

struct GeneratorMismatch : std::runtime_error {
    explicit GeneratorMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct DomainViolation : std::runtime_error {
    explicit DomainViolation(const std::string& w) : std::runtime_error(w) {}
};
struct ModelInconsistent : std::runtime_error {
    explicit ModelInconsistent(const std::string& w) : std::runtime_error(w) {}
};

struct GeneratorSet {
    int m = 0;  // base generators
    int n = 0;  // fiber (and dual-fiber) generators

    int total() const { return m + 2 * n; }
    uint32_t f_bit(int i) const { return 1u << i; }
    uint32_t e_bit(int i) const { return 1u << (m + i); }
    uint32_t ehat_bit(int i) const { return 1u << (m + n + i); }
    uint32_t f_mask() const { return ((1u << m) - 1); }
    uint32_t e_mask() const { return ((1u << n) - 1) << m; }
    uint32_t ehat_mask() const { return ((1u << n) - 1) << (m + n); }
    uint32_t full_mask() const { return (1u << total()) - 1; }
    uint32_t primal_top() const { return f_mask() | e_mask(); }
    uint32_t dual_top() const { return f_mask() | ehat_mask(); }

    bool operator==(const GeneratorSet& o) const = default;
};

class Multivector {
  public:
    Multivector() = default;
    explicit Multivector(GeneratorSet g) : gens_(g) {}

    static Multivector zero(GeneratorSet g) { return Multivector(g); }
    static Multivector unit(GeneratorSet g);
    static Multivector monomial(GeneratorSet g, uint32_t mask, const Rat& c = Rat(1));

    const GeneratorSet& gens() const { return gens_; }
    const std::map<uint32_t, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rat coefficient(uint32_t mask) const;

    /* true when every monomial avoids the given generator block */
    bool avoids(uint32_t block_mask) const;
    bool is_homogeneous(int* degree_out = nullptr) const;

    Multivector& add_term(uint32_t mask, const Rat& c);  // canonicalizing
    Multivector operator+(const Multivector& o) const;
    Multivector operator-(const Multivector& o) const;
    Multivector operator*(const Rat& s) const;
    bool operator==(const Multivector& o) const {
        return gens_ == o.gens_ && terms_ == o.terms_;
    }

    std::string to_string() const;

  private:
    GeneratorSet gens_;
    std::map<uint32_t, Rat> terms_;  // no zero coefficients stored
};

/* Graded-commutative product. */
Multivector wedge(const Multivector& a, const Multivector& b);

/* Interior product with the dual-fiber basis vector ehat_i:
 * i_{ehat_i}(ehat^j) = delta_i^j, extended as a graded derivation. */
Multivector contract_ehat(int i, const Multivector& mv);
/* Interior product against an arbitrary generator bit. */
Multivector contract_bit(uint32_t bit, const Multivector& mv);

/* The closed form e^{-B} = sum_k (-1)^{k(k+1)/2} sum_{|I|=k} e^I ^ ehat^I. */
Multivector poincare_exponential(GeneratorSet g);

/* Truncated exponential series of an even-degree multivector. */
Multivector exp_series(const Multivector& even);

/* Extract the coefficient of the full block (orientation +1 on the
 * ascending block product), moving block generators to the right end of
 * each monomial with graded signs. */
Multivector fiber_integrate(const Multivector& mv, uint32_t block_mask);

/* Degreewise involution sigma(w) = (-1)^{k(k-1)/2} w. */
Multivector sigma(const Multivector& mv);

/* Coefficient of the given top monomial in sigma(a) ^ b. */
Rat mukai_pairing(const Multivector& a, const Multivector& b, uint32_t top_mask);

/* Constant-coefficient flat model: d e^i = F^i, d ehat^i = Fhat^i,
 * H = H3 + sum_i e^i ^ Fhat^i, Hhat = H3 + sum_i ehat^i ^ F^i. */
struct FlatTDualityModel {
    GeneratorSet gens;
    std::vector<Multivector> F;     // n base 2-forms
    std::vector<Multivector> Fhat;  // n base 2-forms
    Multivector H3;                 // base 3-form

    /* Throws ModelInconsistent unless the data are pure base forms and
     * sum_i F^i ^ Fhat^i = 0. */
    static FlatTDualityModel make(GeneratorSet g, std::vector<Multivector> F,
                                  std::vector<Multivector> Fhat, Multivector H3);

    Multivector flux_primal() const;  // H
    Multivector flux_dual() const;    // Hhat
};

enum class Side { Primal, Dual };

/* d_H w = d w + H ^ w (Side::Primal) or d w + Hhat ^ w (Side::Dual), with
 * d the derivation fixed by the model's structure constants. */
Multivector twisted_differential(const Multivector& mv, const FlatTDualityModel& model,
                                 Side side);

/* T w = integrate_e( e^{-B} ^ w ); the domain must not involve ehat
 * generators (DomainViolation otherwise). */
Multivector hori_transform(const Multivector& mv, const FlatTDualityModel& model);

/* Transform in the opposite direction (kernel e^{-Bhat}, Bhat = -B,
 * integration over the ehat block). */
Multivector hori_transform_dual(const Multivector& mv, const FlatTDualityModel& model);

/* Courant-style swap on quadruples (Y, a, alpha, eta): exchanges the fiber
 * and dual-fiber components, fixing anchor and base covector. */
struct CourantElement {
    std::vector<Rat> base_vec;    // Y
    std::vector<Rat> fiber;       // a
    std::vector<Rat> dual_fiber;  // alpha
    std::vector<Rat> base_covec;  // eta

    bool operator==(const CourantElement& o) const = default;
};

CourantElement courant_swap(const CourantElement& x);
Rat courant_pairing(const CourantElement& x, const CourantElement& y);

/* Property-suite driver shared by the CLI self-test and the test suites. */
struct HoriSelfTestReport {
    bool closed_form_ok = false;
    bool bijective_ok = false;
    bool parity_ok = false;
    bool chain_map_ok = false;
    bool mukai_sign_ok = false;
    bool sigma_involution_ok = false;
    bool exponential_ok = false;
    long models_tested = 0;
    long mukai_pairs_tested = 0;
    /* measured sign of That(T(w)) per (n, degree): sign or 0 if not constant */
    std::map<std::pair<int, int>, int> double_transform_sign;

    bool all_pass() const {
        return closed_form_ok && bijective_ok && parity_ok && chain_map_ok && mukai_sign_ok &&
               sigma_involution_ok && exponential_ok;
    }
};

struct HoriSelfTestOptions {
    int max_n = 3;
    int max_m = 3;
    long min_models = 200;
    long mukai_pairs = 1000;
    unsigned seed = 2024;
};

HoriSelfTestReport hori_selftest(const HoriSelfTestOptions& opt);

}  // namespace attb

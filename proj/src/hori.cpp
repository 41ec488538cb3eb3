#include "attb/hori.hpp"

#include <bit>
#include <sstream>

namespace attb {

namespace {

int popcount_below(uint32_t mask, uint32_t bit) { return std::popcount(mask & (bit - 1)); }

/* Sign from merging two disjoint sorted monomials a ^ b into sorted order:
 * (-1)^{#pairs (x in a, y in b) with x > y}. */
int merge_sign(uint32_t a, uint32_t b) {
    int inv = 0;
    uint32_t rest = a;
    while (rest) {
        uint32_t bit = rest & (~rest + 1);
        inv += popcount_below(b, bit);
        rest &= rest - 1;
    }
    return (inv % 2) ? -1 : 1;
}

}  // namespace

Multivector Multivector::unit(GeneratorSet g) {
    Multivector v(g);
    v.add_term(0, Rat(1));
    return v;
}

Multivector Multivector::monomial(GeneratorSet g, uint32_t mask, const Rat& c) {
    Multivector v(g);
    v.add_term(mask, c);
    return v;
}

Rat Multivector::coefficient(uint32_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? Rat(0) : it->second;
}

bool Multivector::avoids(uint32_t block_mask) const {
    for (const auto& [mask, c] : terms_)
        if (mask & block_mask) return false;
    return true;
}

bool Multivector::is_homogeneous(int* degree_out) const {
    int deg = -1;
    for (const auto& [mask, c] : terms_) {
        int d = std::popcount(mask);
        if (deg < 0) deg = d;
        else if (deg != d) return false;
    }
    if (degree_out) *degree_out = deg < 0 ? 0 : deg;
    return true;
}

Multivector& Multivector::add_term(uint32_t mask, const Rat& c) {
    if (c == 0) return *this;
    auto [it, inserted] = terms_.emplace(mask, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
    return *this;
}

Multivector Multivector::operator+(const Multivector& o) const {
    if (!(gens_ == o.gens_)) throw GeneratorMismatch("adding over different generator sets");
    Multivector r = *this;
    for (const auto& [mask, c] : o.terms_) r.add_term(mask, c);
    return r;
}

Multivector Multivector::operator-(const Multivector& o) const {
    if (!(gens_ == o.gens_)) throw GeneratorMismatch("subtracting over different generator sets");
    Multivector r = *this;
    for (const auto& [mask, c] : o.terms_) r.add_term(mask, -c);
    return r;
}

Multivector Multivector::operator*(const Rat& s) const {
    Multivector r(gens_);
    if (s == 0) return r;
    for (const auto& [mask, c] : terms_) r.add_term(mask, c * s);
    return r;
}

std::string Multivector::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mask, c] : terms_) {
        os << (first ? "" : " + ") << c.get_str() << "*";
        if (mask == 0) os << "1";
        uint32_t rest = mask;
        while (rest) {
            uint32_t bit = rest & (~rest + 1);
            int idx = std::countr_zero(bit);
            if (idx < gens_.m) os << "f" << (idx + 1);
            else if (idx < gens_.m + gens_.n) os << "e" << (idx - gens_.m + 1);
            else os << "E" << (idx - gens_.m - gens_.n + 1);
            rest &= rest - 1;
        }
        first = false;
    }
    return os.str();
}

Multivector wedge(const Multivector& a, const Multivector& b) {
    if (!(a.gens() == b.gens())) throw GeneratorMismatch("wedge over different generator sets");
    Multivector r(a.gens());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            if (ma & mb) continue;
            r.add_term(ma | mb, ca * cb * merge_sign(ma, mb));
        }
    return r;
}

Multivector contract_bit(uint32_t bit, const Multivector& mv) {
    Multivector r(mv.gens());
    for (const auto& [mask, c] : mv.terms()) {
        if (!(mask & bit)) continue;
        int sign = (popcount_below(mask, bit) % 2) ? -1 : 1;
        r.add_term(mask & ~bit, c * sign);
    }
    return r;
}

Multivector contract_ehat(int i, const Multivector& mv) {
    if (i < 0 || i >= mv.gens().n) throw DomainViolation("dual-fiber index out of range");
    return contract_bit(mv.gens().ehat_bit(i), mv);
}

Multivector poincare_exponential(GeneratorSet g) {
    Multivector r(g);
    long count = 1L << g.n;
    for (long sub = 0; sub < count; ++sub) {
        int k = std::popcount(unsigned(sub));
        uint32_t mask = (uint32_t(sub) << g.m) | (uint32_t(sub) << (g.m + g.n));
        int sign = ((long(k) * (k + 1) / 2) % 2) ? -1 : 1;
        r.add_term(mask, Rat(sign));
    }
    return r;
}

Multivector exp_series(const Multivector& even) {
    Multivector sum = Multivector::unit(even.gens());
    Multivector power = Multivector::unit(even.gens());
    Rat factorial(1);
    for (int k = 1; k <= even.gens().total(); ++k) {
        power = wedge(power, even);
        if (power.is_zero()) break;
        factorial *= k;
        sum = sum + power * (Rat(1) / factorial);
    }
    return sum;
}

Multivector fiber_integrate(const Multivector& mv, uint32_t block_mask) {
    Multivector r(mv.gens());
    for (const auto& [mask, c] : mv.terms()) {
        if ((mask & block_mask) != block_mask) continue;
        uint32_t rest = mask & ~block_mask;
        /* sorted = (-1)^inv (rest)(block); extract the (rest)(block) sign */
        r.add_term(rest, c * merge_sign(rest, block_mask));
    }
    return r;
}

Multivector sigma(const Multivector& mv) {
    Multivector r(mv.gens());
    for (const auto& [mask, c] : mv.terms()) {
        long k = std::popcount(mask);
        int sign = ((k * (k - 1) / 2) % 2) ? -1 : 1;
        r.add_term(mask, c * sign);
    }
    return r;
}

Rat mukai_pairing(const Multivector& a, const Multivector& b, uint32_t top_mask) {
    return wedge(sigma(a), b).coefficient(top_mask);
}

FlatTDualityModel FlatTDualityModel::make(GeneratorSet g, std::vector<Multivector> F,
                                          std::vector<Multivector> Fhat, Multivector H3) {
    if (int(F.size()) != g.n || int(Fhat.size()) != g.n)
        throw ModelInconsistent("need one curvature 2-form per fiber generator");
    uint32_t nonbase = g.e_mask() | g.ehat_mask();
    for (const auto& w : F)
        if (!w.avoids(nonbase)) throw ModelInconsistent("F must be a base form");
    for (const auto& w : Fhat)
        if (!w.avoids(nonbase)) throw ModelInconsistent("Fhat must be a base form");
    if (!H3.avoids(nonbase)) throw ModelInconsistent("H3 must be a base form");
    Multivector pairing(g);
    for (int i = 0; i < g.n; ++i) pairing = pairing + wedge(F[i], Fhat[i]);
    if (!pairing.is_zero())
        throw ModelInconsistent("(F ^, Fhat) != 0: the twisted differential would not square to zero");
    FlatTDualityModel m;
    m.gens = g;
    m.F = std::move(F);
    m.Fhat = std::move(Fhat);
    m.H3 = std::move(H3);
    return m;
}

Multivector FlatTDualityModel::flux_primal() const {
    Multivector h = H3;
    for (int i = 0; i < gens.n; ++i)
        h = h + wedge(Multivector::monomial(gens, gens.e_bit(i)), Fhat[i]);
    return h;
}

Multivector FlatTDualityModel::flux_dual() const {
    Multivector h = H3;
    for (int i = 0; i < gens.n; ++i)
        h = h + wedge(Multivector::monomial(gens, gens.ehat_bit(i)), F[i]);
    return h;
}

namespace {

/* The geometric derivation: d f = 0, d e^i = F^i, d ehat^i = Fhat^i. */
Multivector d_geometric(const Multivector& mv, const FlatTDualityModel& model) {
    const GeneratorSet& g = model.gens;
    Multivector r(g);
    for (const auto& [mask, c] : mv.terms()) {
        uint32_t rest = mask;
        while (rest) {
            uint32_t bit = rest & (~rest + 1);
            rest &= rest - 1;
            int idx = std::countr_zero(bit);
            const Multivector* dg = nullptr;
            if (idx >= g.m && idx < g.m + g.n) dg = &model.F[idx - g.m];
            else if (idx >= g.m + g.n) dg = &model.Fhat[idx - g.m - g.n];
            if (!dg) continue;  // base generator, d f = 0
            int sign = (popcount_below(mask, bit) % 2) ? -1 : 1;
            Multivector stripped = Multivector::monomial(g, mask & ~bit, c * sign);
            r = r + wedge(stripped, *dg);
        }
    }
    return r;
}

}  // namespace

Multivector twisted_differential(const Multivector& mv, const FlatTDualityModel& model,
                                 Side side) {
    Multivector h = side == Side::Primal ? model.flux_primal() : model.flux_dual();
    return d_geometric(mv, model) + wedge(h, mv);
}

Multivector hori_transform(const Multivector& mv, const FlatTDualityModel& model) {
    if (!mv.avoids(model.gens.ehat_mask()))
        throw DomainViolation("transform domain must not involve dual-fiber generators");
    Multivector kernel = poincare_exponential(model.gens);
    return fiber_integrate(wedge(kernel, mv), model.gens.e_mask());
}

Multivector hori_transform_dual(const Multivector& mv, const FlatTDualityModel& model) {
    if (!mv.avoids(model.gens.e_mask()))
        throw DomainViolation("dual transform domain must not involve fiber generators");
    /* Bhat = -B, so the kernel is e^{B} */
    Multivector b(model.gens);
    for (int i = 0; i < model.gens.n; ++i)
        b = b + wedge(Multivector::monomial(model.gens, model.gens.e_bit(i)),
                      Multivector::monomial(model.gens, model.gens.ehat_bit(i)));
    return fiber_integrate(wedge(exp_series(b), mv), model.gens.ehat_mask());
}

CourantElement courant_swap(const CourantElement& x) {
    return CourantElement{x.base_vec, x.dual_fiber, x.fiber, x.base_covec};
}

Rat courant_pairing(const CourantElement& x, const CourantElement& y) {
    auto dot = [](const std::vector<Rat>& a, const std::vector<Rat>& b) {
        if (a.size() != b.size()) throw GeneratorMismatch("courant component size mismatch");
        Rat s(0);
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    return dot(x.base_covec, y.base_vec) + dot(y.base_covec, x.base_vec) +
           dot(x.dual_fiber, y.fiber) + dot(y.dual_fiber, x.fiber);
}

namespace {

/* Closed-form oracle: T(w ^ e^I) = (-1)^{n(n-1)/2} w ^ i_{ehat_I}(ehat^1..ehat^n),
 * with i_{ehat_I} = i_{ehat_{i_1}} o ... o i_{ehat_{i_k}}, I ascending. */
Multivector closed_form_transform_monomial(GeneratorSet g, uint32_t mask) {
    uint32_t base_part = mask & g.f_mask();
    Multivector ehat_top = Multivector::monomial(g, g.ehat_mask());
    /* contract by descending index so i_{e_{i_1}} is applied last */
    for (int i = g.n - 1; i >= 0; --i)
        if (mask & g.e_bit(i)) ehat_top = contract_ehat(i, ehat_top);
    long eps = long(g.n) * (g.n - 1) / 2;
    int sign = (eps % 2) ? -1 : 1;
    return wedge(Multivector::monomial(g, base_part, Rat(sign)), ehat_top);
}

std::vector<uint32_t> domain_basis(GeneratorSet g) {
    std::vector<uint32_t> basis;
    for (uint32_t fm = 0; fm <= g.f_mask(); ++fm) {
        if ((fm & g.f_mask()) != fm) continue;
        for (long em = 0; em < (1L << g.n); ++em)
            basis.push_back(fm | (uint32_t(em) << g.m));
        if (g.m == 0) break;
    }
    return basis;
}

Rat random_rat(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    Rat r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

Multivector random_base_2form(GeneratorSet g, std::mt19937& rng, int bound) {
    std::uniform_int_distribution<int> coef(-bound, bound);
    Multivector w(g);
    for (int i = 0; i < g.m; ++i)
        for (int j = i + 1; j < g.m; ++j)
            w.add_term(g.f_bit(i) | g.f_bit(j), Rat(coef(rng)));
    return w;
}

}  // namespace

HoriSelfTestReport hori_selftest(const HoriSelfTestOptions& opt) {
    HoriSelfTestReport rep;
    std::mt19937 rng(opt.seed);
    rep.closed_form_ok = rep.bijective_ok = rep.parity_ok = true;
    rep.chain_map_ok = rep.mukai_sign_ok = rep.sigma_involution_ok = true;
    rep.exponential_ok = true;

    /* closed form vs integral formula; parity; bijectivity; e^{-B} series */
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= opt.max_m; ++m) {
            GeneratorSet g{m, n};
            if (g.total() > 20) continue;
            FlatTDualityModel model = FlatTDualityModel::make(
                g, std::vector<Multivector>(n, Multivector::zero(g)),
                std::vector<Multivector>(n, Multivector::zero(g)), Multivector::zero(g));

            Multivector closed = poincare_exponential(g);
            Multivector b(g);
            for (int i = 0; i < n; ++i)
                b = b + wedge(Multivector::monomial(g, g.e_bit(i)),
                              Multivector::monomial(g, g.ehat_bit(i)));
            if (!(exp_series(b * Rat(-1)) == closed)) rep.exponential_ok = false;

            auto basis = domain_basis(g);
            std::vector<Multivector> images;
            for (uint32_t mask : basis) {
                Multivector x = Multivector::monomial(g, mask);
                Multivector t = hori_transform(x, model);
                if (!(t == closed_form_transform_monomial(g, mask))) rep.closed_form_ok = false;
                int din = std::popcount(mask);
                int dout = 0;
                if (!t.is_homogeneous(&dout)) rep.parity_ok = false;
                else if (!t.is_zero() && ((dout - (din - n)) % 2) != 0) rep.parity_ok = false;
                images.push_back(t);
            }
            /* bijectivity: images of the basis must be linearly independent */
            std::vector<uint32_t> codomain;
            for (uint32_t fm2 = 0; fm2 <= g.f_mask(); ++fm2) {
                if ((fm2 & g.f_mask()) != fm2) continue;
                for (long hm = 0; hm < (1L << n); ++hm)
                    codomain.push_back(fm2 | (uint32_t(hm) << (g.m + n)));
                if (g.m == 0) break;
            }
            std::vector<std::vector<Rat>> mat;
            for (const auto& img : images) {
                std::vector<Rat> row;
                for (uint32_t cm : codomain) row.push_back(img.coefficient(cm));
                mat.push_back(std::move(row));
            }
            /* rational row reduction */
            size_t rank = 0;
            for (size_t col = 0; col < codomain.size() && rank < mat.size(); ++col) {
                size_t piv = rank;
                while (piv < mat.size() && mat[piv][col] == 0) ++piv;
                if (piv == mat.size()) continue;
                std::swap(mat[rank], mat[piv]);
                for (size_t r2 = 0; r2 < mat.size(); ++r2) {
                    if (r2 == rank || mat[r2][col] == 0) continue;
                    Rat f = mat[r2][col] / mat[rank][col];
                    for (size_t c2 = col; c2 < codomain.size(); ++c2)
                        mat[r2][c2] -= f * mat[rank][c2];
                }
                ++rank;
            }
            if (rank != basis.size()) rep.bijective_ok = false;

            /* sigma is an involution on random elements */
            Multivector rnd(g);
            std::uniform_int_distribution<long> pick(0, (1L << g.total()) - 1);
            for (int t2 = 0; t2 < 8; ++t2) rnd.add_term(uint32_t(pick(rng)), random_rat(rng));
            if (!(sigma(sigma(rnd)) == rnd)) rep.sigma_involution_ok = false;
        }

    /* chain map over random admissible flat models */
    long shapes = 3L * std::max(1, opt.max_m - 1);
    long models_per_shape = (opt.min_models + shapes - 1) / shapes;
    for (int n = 1; n <= 3; ++n)
        for (int m = 2; m <= opt.max_m; ++m) {
            GeneratorSet g{m, n};
            for (long trial = 0; trial < models_per_shape; ++trial) {
                std::vector<Multivector> F, Fh;
                for (int i = 0; i < n; ++i) {
                    F.push_back(random_base_2form(g, rng, 2));
                    Fh.push_back(random_base_2form(g, rng, 2));
                }
                Multivector h3(g);
                std::uniform_int_distribution<int> h3pick(0, std::max(0, m - 1));
                if (m >= 3 && h3pick(rng) == 0)
                    h3.add_term(g.f_bit(0) | g.f_bit(1) | g.f_bit(2), Rat(1));
                FlatTDualityModel model;
                try {
                    model = FlatTDualityModel::make(g, F, Fh, h3);
                } catch (const ModelInconsistent&) {
                    --trial;
                    continue;
                }
                ++rep.models_tested;
                for (uint32_t mask : domain_basis(g)) {
                    Multivector x = Multivector::monomial(g, mask);
                    Multivector lhs =
                        hori_transform(twisted_differential(x, model, Side::Primal), model);
                    Multivector rhs =
                        twisted_differential(hori_transform(x, model), model, Side::Dual);
                    if (!(lhs == rhs)) rep.chain_map_ok = false;
                }
            }
        }

    /* Mukai pairing sign */
    for (int n = 1; n <= 3; ++n)
        for (int m = 0; m <= opt.max_m; ++m) {
            GeneratorSet g{m, n};
            FlatTDualityModel model = FlatTDualityModel::make(
                g, std::vector<Multivector>(n, Multivector::zero(g)),
                std::vector<Multivector>(n, Multivector::zero(g)), Multivector::zero(g));
            int expected = ((long(n) * m) % 2) ? -1 : 1;
            long pairs = std::max(1L, opt.mukai_pairs / 12);
            auto basis = domain_basis(g);
            std::uniform_int_distribution<size_t> pick(0, basis.size() - 1);
            for (long t = 0; t < pairs; ++t) {
                Multivector a(g), b(g);
                for (int s = 0; s < 5; ++s) {
                    a.add_term(basis[pick(rng)], random_rat(rng));
                    b.add_term(basis[pick(rng)], random_rat(rng));
                }
                Rat lhs = mukai_pairing(hori_transform(a, model), hori_transform(b, model),
                                        g.dual_top());
                Rat rhs = mukai_pairing(a, b, g.primal_top()) * expected;
                ++rep.mukai_pairs_tested;
                if (lhs != rhs) rep.mukai_sign_ok = false;
            }
        }

    /* measured sign of That o T per (n, degree) */
    for (int n = 1; n <= 3; ++n) {
        GeneratorSet g{2, n};
        FlatTDualityModel model = FlatTDualityModel::make(
            g, std::vector<Multivector>(n, Multivector::zero(g)),
            std::vector<Multivector>(n, Multivector::zero(g)), Multivector::zero(g));
        std::map<int, int> seen;
        bool constant = true;
        for (uint32_t mask : domain_basis(g)) {
            Multivector x = Multivector::monomial(g, mask);
            Multivector back = hori_transform_dual(hori_transform(x, model), model);
            int deg = std::popcount(mask);
            int s = 0;
            if (back == x) s = 1;
            else if (back == x * Rat(-1)) s = -1;
            if (s == 0) constant = false;
            auto it = seen.find(deg);
            if (it == seen.end()) seen[deg] = s;
            else if (it->second != s) constant = false;
        }
        for (auto& [deg, s] : seen)
            rep.double_transform_sign[{n, deg}] = constant ? s : 0;
    }
    return rep;
}

}  // namespace attb

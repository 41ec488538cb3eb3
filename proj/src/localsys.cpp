#include "attb/localsys.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace attb {

namespace {

struct SubsetTable {
    std::vector<std::vector<int>> subsets;
    std::map<std::vector<int>, int> index;
};

const SubsetTable& subset_table(int n, int q) {
    static std::map<std::pair<int, int>, SubsetTable> cache;
    auto key = std::make_pair(n, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SubsetTable t;
    if (q >= 0 && q <= n) {
        std::vector<int> cur(q);
        for (int i = 0; i < q; ++i) cur[i] = i;
        for (;;) {
            t.index[cur] = int(t.subsets.size());
            t.subsets.push_back(cur);
            int p = q - 1;
            while (p >= 0 && cur[p] == n - q + p) --p;
            if (p < 0 || q == 0) break;
            ++cur[p];
            for (int s = p + 1; s < q; ++s) cur[s] = cur[s - 1] + 1;
        }
    }
    return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace

const std::vector<std::vector<int>>& wedge_subsets(int n, int q) {
    return subset_table(n, q).subsets;
}

long binomial(int n, int q) {
    if (q < 0 || q > n) return 0;
    long r = 1;
    for (int i = 0; i < q; ++i) r = r * (n - i) / (i + 1);
    return r;
}

FiberModel FiberModel::sphere(int dim, long degree) {
    FiberModel f;
    f.name = "S" + std::to_string(dim);
    f.ranks.assign(dim + 1, 0);
    f.ranks[0] = 1;
    f.ranks[dim] = 1;
    f.endo.resize(dim + 1);
    for (int q = 0; q <= dim; ++q) {
        f.endo[q] = IntMatrix(f.ranks[q], f.ranks[q]);
        if (f.ranks[q]) f.endo[q].at(0, 0) = (q == 0) ? 1 : degree;
    }
    f.mult.assign(dim + 1, std::vector<IntMatrix>(dim + 1));
    for (int q1 = 0; q1 <= dim; ++q1)
        for (int q2 = 0; q1 + q2 <= dim; ++q2) {
            IntMatrix m(f.ranks[q1 + q2], f.ranks[q1] * f.ranks[q2]);
            if (f.ranks[q1] && f.ranks[q2] && f.ranks[q1 + q2] && (q1 == 0 || q2 == 0))
                m.at(0, 0) = 1;
            f.mult[q1][q2] = std::move(m);
        }
    f.check();
    return f;
}

std::vector<Int> FiberModel::multiply(int q1, const std::vector<Int>& a, int q2,
                                      const std::vector<Int>& b) const {
    int q3 = q1 + q2;
    std::vector<Int> out(rank(q3), Int(0));
    if (q3 > top() || rank(q1) == 0 || rank(q2) == 0) return out;
    const IntMatrix& m = mult[q1][q2];
    for (int i = 0; i < rank(q1); ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < rank(q2); ++j) {
            if (b[j] == 0) continue;
            for (int k = 0; k < rank(q3); ++k) out[k] += a[i] * b[j] * m.at(k, i * rank(q2) + j);
        }
    }
    return out;
}

void FiberModel::check() const {
    if (rank(0) < 1) throw std::logic_error("fiber model has no unit");
    for (int q = 0; q <= top(); ++q)
        for (int j = 0; j < rank(q); ++j) {
            std::vector<Int> unit(rank(0), Int(0));
            unit[0] = 1;
            std::vector<Int> e(rank(q), Int(0));
            e[j] = 1;
            if (multiply(0, unit, q, e) != e || multiply(q, e, 0, unit) != e)
                throw std::logic_error("fiber model product is not unital");
        }
    for (int q1 = 0; q1 <= top(); ++q1)
        for (int q2 = 0; q1 + q2 <= top(); ++q2)
            for (int i = 0; i < rank(q1); ++i)
                for (int j = 0; j < rank(q2); ++j) {
                    std::vector<Int> a(rank(q1), Int(0)), b(rank(q2), Int(0));
                    a[i] = 1;
                    b[j] = 1;
                    auto ab = multiply(q1, a, q2, b);
                    auto ba = multiply(q2, b, q1, a);
                    int sign = (q1 * q2) % 2 ? -1 : 1;
                    for (size_t k = 0; k < ab.size(); ++k)
                        if (ab[k] != sign * ba[k])
                            throw std::logic_error("fiber model product is not graded-commutative");
                    for (int q3 = 0; q1 + q2 + q3 <= top(); ++q3)
                        for (int l = 0; l < rank(q3); ++l) {
                            std::vector<Int> c(rank(q3), Int(0));
                            c[l] = 1;
                            auto left = multiply(q1 + q2, ab, q3, c);
                            auto right = multiply(q1, a, q2 + q3, multiply(q2, b, q3, c));
                            if (left != right)
                                throw std::logic_error("fiber model product is not associative");
                        }
                }
    for (int q1 = 0; q1 <= top(); ++q1)
        for (int q2 = 0; q1 + q2 <= top(); ++q2)
            for (int i = 0; i < rank(q1); ++i)
                for (int j = 0; j < rank(q2); ++j) {
                    std::vector<Int> a(rank(q1), Int(0)), b(rank(q2), Int(0));
                    a[i] = 1;
                    b[j] = 1;
                    auto lhs = multiply(q1, mat_vec(endo[q1], a), q2, mat_vec(endo[q2], b));
                    auto rhs = mat_vec(endo[q1 + q2], multiply(q1, a, q2, b));
                    if (lhs != rhs) throw std::logic_error("fiber endomorphism is not a ring map");
                }
}

int base_dim(const BaseSpace& b) {
    if (std::holds_alternative<Torus>(b)) return std::get<Torus>(b).k;
    return std::get<MappingTorus>(b).fiber.top() + 1;
}

int base_generator_count(const BaseSpace& b) {
    if (std::holds_alternative<Torus>(b)) return std::get<Torus>(b).k;
    return 1;
}

std::string base_name(const BaseSpace& b) {
    if (std::holds_alternative<Torus>(b)) return "T^" + std::to_string(std::get<Torus>(b).k);
    const auto& mt = std::get<MappingTorus>(b);
    return "MT(" + mt.fiber.name + ")";
}

bool Z2Class::is_trivial() const {
    return std::all_of(bits.begin(), bits.end(), [](int b) { return b % 2 == 0; });
}

Z2Class Z2Class::operator+(const Z2Class& o) const {
    if (bits.size() != o.bits.size()) throw std::invalid_argument("Z2Class size mismatch");
    Z2Class r = *this;
    for (size_t i = 0; i < bits.size(); ++i) r.bits[i] = (r.bits[i] + o.bits[i]) % 2;
    return r;
}

std::string Z2Class::to_string() const {
    std::string s;
    for (int b : bits) s += (b % 2) ? '1' : '0';
    return s.empty() ? "0" : s;
}

Z2Class base_w1(const BaseSpace& b) {
    int g = base_generator_count(b);
    Z2Class w = Z2Class::zero(g);
    if (std::holds_alternative<MappingTorus>(b)) {
        const auto& f = std::get<MappingTorus>(b).fiber;
        /* The circle direction reverses orientation iff phi* reverses the
         * fiber's top class. */
        if (f.rank(f.top()) == 1 && f.endo[f.top()].at(0, 0) == -1) w.bits[0] = 1;
    }
    return w;
}

SystemDiagnostics validate(const LocalSystem& sys) {
    SystemDiagnostics d;
    int g = base_generator_count(sys.base);
    if (int(sys.monodromies.size()) != g) {
        d.ok = false;
        d.issues.push_back("WrongGeneratorCount: expected " + std::to_string(g));
        return d;
    }
    for (int i = 0; i < g; ++i) {
        const IntMatrix& m = sys.monodromies[i];
        if (m.rows() != sys.rank || m.cols() != sys.rank) {
            d.ok = false;
            d.issues.push_back("WrongShape: generator " + std::to_string(i));
            continue;
        }
        if (abs(m.det()) != 1) {
            d.ok = false;
            d.issues.push_back("NonUnimodular: generator " + std::to_string(i) +
                               " has determinant " + m.det().get_str());
        }
    }
    if (d.ok && std::holds_alternative<Torus>(sys.base)) {
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j)
                if (!(sys.monodromies[i] * sys.monodromies[j] ==
                      sys.monodromies[j] * sys.monodromies[i])) {
                    d.ok = false;
                    d.issues.push_back("NonCommuting: generators " + std::to_string(i) + "," +
                                       std::to_string(j));
                }
    }
    return d;
}

LocalSystem trivial_system(const BaseSpace& base, int rank) {
    LocalSystem s;
    s.rank = rank;
    s.base = base;
    s.monodromies.assign(base_generator_count(base), IntMatrix::identity(rank));
    return s;
}

LocalSystem dual(const LocalSystem& sys) {
    LocalSystem d = sys;
    for (auto& m : d.monodromies) m = inverse_unimodular(m).transpose();
    return d;
}

LocalSystem exterior_power(const LocalSystem& sys, int q) {
    if (q < 0 || q > sys.rank) throw DegreeOutOfRange("exterior power out of range");
    int n = sys.rank;
    const auto& subs = wedge_subsets(n, q);
    LocalSystem w;
    w.rank = int(subs.size());
    w.base = sys.base;
    for (const auto& m : sys.monodromies) {
        IntMatrix wm(w.rank, w.rank);
        for (size_t T = 0; T < subs.size(); ++T)
            for (size_t S = 0; S < subs.size(); ++S) {
                IntMatrix minor(q, q);
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j) minor.at(i, j) = m.at(subs[S][i], subs[T][j]);
                wm.at(int(S), int(T)) = minor.det();
            }
        w.monodromies.push_back(std::move(wm));
    }
    return w;
}

Z2Class w1(const LocalSystem& sys) {
    Z2Class w = Z2Class::zero(int(sys.monodromies.size()));
    for (size_t i = 0; i < sys.monodromies.size(); ++i)
        if (sys.monodromies[i].det() == -1) w.bits[i] = 1;
    return w;
}

BaseModel::BaseModel(const BaseSpace& base, int rank, const std::vector<IntMatrix>& monodromies)
    : base_(base), n_(rank), mono_(monodromies) {
    dim_ = base_dim(base);
    if (std::holds_alternative<Torus>(base)) build_torus(std::get<Torus>(base));
    else build_cone(std::get<MappingTorus>(base));
    for (int p = 0; p + 1 < int(d_.size()); ++p)
        if (!(d_[p + 1] * d_[p]).is_zero())
            throw std::logic_error("cochain model differential does not square to zero");
    for (int p = 0; p <= dim_; ++p) {
        IntMatrix cycles = kernel_lattice(d_[p]);
        IntMatrix boundaries =
            p == 0 ? IntMatrix::zero(cochain_rank(0), 0) : hermite_column_basis(d_[p - 1]);
        h_.push_back(PresentedSubquotient::quotient(cycles, boundaries));
    }
}

void BaseModel::build_torus(const Torus& t) {
    int k = t.k;
    d_.clear();
    for (int p = 0; p <= k; ++p) {
        const auto& src = wedge_subsets(k, p);
        const auto& tgtt = subset_table(k, p + 1);
        IntMatrix d(int(binomial(k, p + 1)) * n_, int(src.size()) * n_);
        for (size_t S = 0; S < src.size(); ++S)
            for (int i = 0; i < k; ++i) {
                if (std::find(src[S].begin(), src[S].end(), i) != src[S].end()) continue;
                std::vector<int> merged = src[S];
                int before = 0;
                while (before < int(merged.size()) && merged[before] < i) ++before;
                merged.insert(merged.begin() + before, i);
                int sign = before % 2 ? -1 : 1;
                int T = tgtt.index.at(merged);
                for (int r = 0; r < n_; ++r)
                    for (int c = 0; c < n_; ++c) {
                        Int v = mono_[i].at(r, c) - (r == c ? 1 : 0);
                        d.at(T * n_ + r, int(S) * n_ + c) += sign * v;
                    }
            }
        d_.push_back(std::move(d));
    }
}

void BaseModel::build_cone(const MappingTorus& mt) {
    const FiberModel& f = mt.fiber;
    const IntMatrix& rho = mono_[0];
    d_.clear();
    auto rank_p = [&](int p) { return (f.rank(p) + f.rank(p - 1)) * n_; };
    for (int p = 0; p <= dim_; ++p) {
        IntMatrix d(rank_p(p + 1), rank_p(p));
        /* d(a, s) = (0, (phi* (x) rho - 1) a); block2 of C^{p+1} is C^p(F) (x) Z^n */
        int off = f.rank(p + 1) * n_;
        for (int i = 0; i < f.rank(p); ++i)
            for (int j = 0; j < f.rank(p); ++j)
                for (int r = 0; r < n_; ++r)
                    for (int c = 0; c < n_; ++c) {
                        Int v = f.endo[p].at(i, j) * rho.at(r, c);
                        if (i == j && r == c) v -= 1;
                        d.at(off + i * n_ + r, j * n_ + c) += v;
                    }
        d_.push_back(std::move(d));
    }
}

int BaseModel::cochain_rank(int p) const {
    if (p < 0 || p > dim_) return 0;
    return d_[p].cols();
}

const IntMatrix& BaseModel::differential(int p) const {
    static IntMatrix empty(0, 0);
    if (p < 0 || p > dim_) return empty;
    return d_[p];
}

const PresentedSubquotient& BaseModel::cohomology(int p) const {
    if (p < 0 || p > dim_) throw DegreeOutOfRange("cohomology degree out of range");
    return h_[p];
}

std::vector<FgAbGroup> BaseModel::cohomology_groups() const {
    std::vector<FgAbGroup> out;
    for (int p = 0; p <= dim_; ++p) out.push_back(cohomology(p).group());
    return out;
}

std::vector<PresentedSubquotient> cohomology(const LocalSystem& sys) {
    BaseModel m(sys.base, sys.rank, sys.monodromies);
    std::vector<PresentedSubquotient> out;
    for (int p = 0; p <= m.dim(); ++p) out.push_back(m.cohomology(p));
    return out;
}

std::vector<FgAbGroup> cohomology_groups(const LocalSystem& sys) {
    BaseModel m(sys.base, sys.rank, sys.monodromies);
    return m.cohomology_groups();
}

std::vector<Int> contract_wedge_basis(int n, int q, int lambda_index, int wedge_index) {
    std::vector<Int> out(binomial(n, q - 1), Int(0));
    const auto& subs = wedge_subsets(n, q);
    const auto& tgt = subset_table(n, q - 1);
    const auto& T = subs[wedge_index];
    for (int r = 0; r < q; ++r) {
        if (T[r] != lambda_index) continue;
        std::vector<int> rest;
        for (int s = 0; s < q; ++s)
            if (s != r) rest.push_back(T[s]);
        out[tgt.index.at(rest)] += (r % 2) ? -1 : 1;
    }
    return out;
}

std::vector<Int> wedge_mult_basis(int n, int q, int dual_index, int wedge_index) {
    std::vector<Int> out(binomial(n, q + 1), Int(0));
    const auto& subs = wedge_subsets(n, q);
    const auto& tgt = subset_table(n, q + 1);
    const auto& T = subs[wedge_index];
    if (std::find(T.begin(), T.end(), dual_index) != T.end()) return out;
    std::vector<int> merged = T;
    int before = 0;
    while (before < int(merged.size()) && merged[before] < dual_index) ++before;
    merged.insert(merged.begin() + before, dual_index);
    out[tgt.index.at(merged)] += (before % 2) ? -1 : 1;
    return out;
}

namespace {

/* Apply phi* (x) coeff_mono to a fiber-cochain block (fiber-major layout). */
std::vector<Int> cone_T(const FiberModel& f, const IntMatrix& coeff_mono, int p,
                        const std::vector<Int>& block, int w_rank) {
    std::vector<Int> out(block.size(), Int(0));
    int fr = f.rank(p);
    for (int i = 0; i < fr; ++i)
        for (int j = 0; j < fr; ++j) {
            if (f.endo[p].at(i, j) == 0) continue;
            for (int r = 0; r < w_rank; ++r)
                for (int c = 0; c < w_rank; ++c) {
                    if (coeff_mono.at(r, c) == 0) continue;
                    out[i * w_rank + r] +=
                        f.endo[p].at(i, j) * coeff_mono.at(r, c) * block[j * w_rank + c];
                }
        }
    return out;
}

}  // namespace

std::vector<Int> cup_degree2(const BaseSpace& base,
                             const std::vector<IntMatrix>& w1_mono, int w1_rank,
                             const std::vector<Int>& c_rep,
                             int p,
                             int w2_rank, const std::vector<Int>& a_rep,
                             int w3_rank, const CoeffPairing& pair) {
    int dim = base_dim(base);
    if (std::holds_alternative<Torus>(base)) {
        int k = std::get<Torus>(base).k;
        if (p + 2 > dim) return {};
        if (p != 0)
            throw std::logic_error("torus cup is only implemented against degree-0 classes");
        /* c: 2-subset-major; a: a single invariant W2 vector. */
        long nsub = binomial(k, 2);
        std::vector<Int> out(size_t(nsub) * w3_rank, Int(0));
        for (long S = 0; S < nsub; ++S)
            for (int a1 = 0; a1 < w1_rank; ++a1) {
                const Int& coef = c_rep[size_t(S) * w1_rank + a1];
                if (coef == 0) continue;
                for (int a2 = 0; a2 < w2_rank; ++a2) {
                    if (a_rep[a2] == 0) continue;
                    auto v = pair(a1, a2);
                    for (int a3 = 0; a3 < w3_rank; ++a3)
                        out[size_t(S) * w3_rank + a3] += coef * a_rep[a2] * v[a3];
                }
            }
        return out;
    }

    const auto& mt = std::get<MappingTorus>(base);
    if (p + 2 > dim) return {};
    return cone_cup(mt.fiber, w1_mono[0], w1_rank, 2, c_rep, w2_rank, p, a_rep, w3_rank, pair);
}

std::vector<Int> cone_cup(const FiberModel& f, const IntMatrix& w1_mono, int w1_rank,
                          int p1, const std::vector<Int>& x,
                          int w2_rank, int p2, const std::vector<Int>& y,
                          int w3_rank, const CoeffPairing& pair) {
    auto slice = [&](const std::vector<Int>& v, int from, int len) {
        return len > 0 ? std::vector<Int>(v.begin() + from, v.begin() + from + len)
                       : std::vector<Int>{};
    };
    std::vector<Int> xb1 = slice(x, 0, f.rank(p1) * w1_rank);
    std::vector<Int> xb2 = slice(x, f.rank(p1) * w1_rank, f.rank(p1 - 1) * w1_rank);
    std::vector<Int> yb1 = slice(y, 0, f.rank(p2) * w2_rank);
    std::vector<Int> yb2 = slice(y, f.rank(p2) * w2_rank, f.rank(p2 - 1) * w2_rank);

    int p3 = p1 + p2;
    int out_b1 = f.rank(p3) * w3_rank;
    int out_b2 = f.rank(p3 - 1) * w3_rank;
    std::vector<Int> out(out_b1 + out_b2, Int(0));

    auto accumulate = [&](int qa, const std::vector<Int>& ablk, int qb,
                          const std::vector<Int>& bblk, int out_off, int sign) {
        int fa = f.rank(qa), fb = f.rank(qb), fo = f.rank(qa + qb);
        if (!fa || !fb || !fo || ablk.empty() || bblk.empty()) return;
        for (int i = 0; i < fa; ++i)
            for (int j = 0; j < fb; ++j) {
                std::vector<Int> ei(fa, Int(0)), ej(fb, Int(0));
                ei[i] = 1;
                ej[j] = 1;
                auto fm = f.multiply(qa, ei, qb, ej);
                for (int a1 = 0; a1 < w1_rank; ++a1) {
                    const Int& xv = ablk[i * w1_rank + a1];
                    if (xv == 0) continue;
                    for (int a2 = 0; a2 < w2_rank; ++a2) {
                        const Int& yv = bblk[j * w2_rank + a2];
                        if (yv == 0) continue;
                        auto v = pair(a1, a2);
                        for (int k2 = 0; k2 < fo; ++k2) {
                            if (fm[k2] == 0) continue;
                            for (int a3 = 0; a3 < w3_rank; ++a3)
                                out[out_off + k2 * w3_rank + a3] += sign * xv * yv * fm[k2] * v[a3];
                        }
                    }
                }
            }
    };

    int sign = (p1 % 2) ? -1 : 1;
    accumulate(p1, xb1, p2, yb1, 0, 1);           // block1: a . b
    accumulate(p1 - 1, xb2, p2, yb1, out_b1, 1);  // block2: s . b
    if (!xb1.empty() && !yb2.empty()) {           // block2: + (-1)^{p1} T(a) . t
        auto tx = cone_T(f, w1_mono, p1, xb1, w1_rank);
        accumulate(p1, tx, p2 - 1, yb2, out_b1, sign);
    }
    return out;
}

std::vector<Int> contract_with_chern(const LocalSystem& lambda, const std::vector<Int>& c_rep,
                                     int p, int q, const std::vector<Int>& a_rep) {
    if (q < 1) throw DegreeOutOfRange("contraction needs q >= 1");
    int n = lambda.rank;
    CoeffPairing pair = [n, q](int lambda_idx, int wedge_idx) {
        return contract_wedge_basis(n, q, lambda_idx, wedge_idx);
    };
    return cup_degree2(lambda.base, lambda.monodromies, n, c_rep, p, int(binomial(n, q)), a_rep,
                       int(binomial(n, q - 1)), pair);
}

std::vector<Int> cup_with_flux(const LocalSystem& lambda, const std::vector<Int>& k_rep,
                               int p, int q, const std::vector<Int>& a_rep) {
    int n = lambda.rank;
    LocalSystem dual_sys = dual(lambda);
    CoeffPairing pair = [n, q](int dual_idx, int wedge_idx) {
        return wedge_mult_basis(n, q, dual_idx, wedge_idx);
    };
    return cup_degree2(lambda.base, dual_sys.monodromies, n, k_rep, p, int(binomial(n, q)), a_rep,
                       int(binomial(n, q + 1)), pair);
}

}  // namespace attb

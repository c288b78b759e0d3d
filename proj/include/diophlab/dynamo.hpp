#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "diophlab/lattice.hpp"
#include "diophlab/manifold.hpp"
#include "diophlab/matrix.hpp"

namespace diophlab {

// integer point (q, a over the independent coordinates, b over the dependent)
struct RationalWitness {
    long long q = 0;
    std::vector<long long> a;
    std::vector<long long> b;
};

// ---------------------------------------------------------------------------
// Embedding matrices.  All three are unipotent upper triangular of size
// (n+1) with rows listed in DESCENDING chart-coordinate order (row r holds
// coordinate n-1-r, the last row is the affine 1).  With this ordering, the
// one-block chart reproduces the classical full embedding, and the
// sigma-conjugated dual has the tidy ascending closed form below.
// ---------------------------------------------------------------------------

enum class EmbeddingKind { single_direction, full, block };

namespace detail {

// chart coordinate carried by row r of every embedding
inline std::size_t coord_of_row(const IndexLayout& L, std::size_t r) { return L.n - 1 - r; }

// position of coordinate c in a flattened index list, or npos
inline std::size_t position_in(const std::vector<std::size_t>& v, std::size_t c) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == c) return i;
    return static_cast<std::size_t>(-1);
}

// block index owning coordinate c and whether it is independent
struct CoordInfo {
    std::size_t block;
    bool independent;
    std::size_t local;   // index within its block list
    std::size_t var;     // global variable index for independent coords
    std::size_t flat_j;  // flattened J index for dependent coords
};

inline CoordInfo coord_info(const IndexLayout& L, std::size_t c) {
    std::size_t var = 0, flat = 0;
    for (std::size_t k = 0; k < L.s; ++k) {
        auto p = position_in(L.I_blocks[k], c);
        if (p != static_cast<std::size_t>(-1)) return {k, true, p, var + p, 0};
        var += L.dk[k];
        auto pj = position_in(L.J_blocks[k], c);
        if (pj != static_cast<std::size_t>(-1)) return {k, false, pj, 0, flat + pj};
        flat += L.mk[k];
    }
    throw std::logic_error("coord_info: coordinate out of range");
}

}  // namespace detail

template <class T>
Mat<T> build_embedding(EmbeddingKind kind, const Chart& c, const std::vector<T>& x) {
    const IndexLayout& L = c.layout();
    if (kind != EmbeddingKind::block && !c.monge())
        throw std::invalid_argument("build_embedding: chart is not in one-block form");
    std::size_t N = L.n + 1;
    Mat<T> u = Mat<T>::identity(N);

    // row position of each chart coordinate
    auto row_of = [&](std::size_t coord) { return L.n - 1 - coord; };

    for (std::size_t coord = 0; coord < L.n; ++coord) {
        auto info = detail::coord_info(L, coord);
        std::size_t r = row_of(coord);
        if (info.independent) {
            u(r, N - 1) = x[info.var];
            continue;
        }
        std::size_t k = info.block;
        T value = c.component(k, info.local, x);
        T affine = value;
        std::size_t visible = L.prefix_d(k + 1);
        for (std::size_t v = 0; v < visible; ++v) {
            if (kind == EmbeddingKind::single_direction && v != 0) continue;
            T dv = c.component_derivative(k, info.local, v, x);
            // column of the row carrying variable v
            std::size_t vc = 0, seen = 0;
            for (std::size_t kk = 0; kk < L.s && seen <= v; ++kk)
                for (std::size_t i = 0; i < L.dk[kk]; ++i, ++seen)
                    if (seen == v) vc = L.I_blocks[kk][i];
            u(r, row_of(vc)) = -dv;
            affine -= x[v] * dv;
        }
        if (kind == EmbeddingKind::single_direction) {
            // affine part only subtracts the single directional term
            affine = value - x[0] * c.component_derivative(k, info.local, std::size_t{0}, x);
        }
        u(r, N - 1) = affine;
    }
    return u;
}

// closed form of the sigma-dual of the full embedding, rows/cols ordered
// (affine, x_1..x_d, dependent components ascending)
template <class T>
Mat<T> full_embedding_dual_closed(const Chart& c, const std::vector<T>& x) {
    const IndexLayout& L = c.layout();
    std::size_t N = L.n + 1;
    Mat<T> m = Mat<T>::identity(N);
    auto y = eval_chart(c, x, false);
    for (std::size_t v = 0; v < L.d; ++v) m(0, 1 + v) = -x[v];
    std::size_t flat = 0;
    for (std::size_t k = 0; k < L.s; ++k)
        for (std::size_t j = 0; j < L.mk[k]; ++j, ++flat) {
            m(0, 1 + L.d + flat) = -y[L.J_blocks[k][j]];
            for (std::size_t v = 0; v < L.prefix_d(k + 1); ++v)
                m(1 + v, 1 + L.d + flat) = c.component_derivative(k, j, v, x);
        }
    return m;
}

// closed form of the sigma-dual of the block embedding, rows/cols ordered
// (affine, chart coordinates ascending, interleaved)
template <class T>
Mat<T> block_embedding_dual_closed(const Chart& c, const std::vector<T>& x) {
    const IndexLayout& L = c.layout();
    std::size_t N = L.n + 1;
    Mat<T> m = Mat<T>::identity(N);
    auto y = eval_chart(c, x, false);
    for (std::size_t coord = 0; coord < L.n; ++coord) m(0, 1 + coord) = -y[coord];
    for (std::size_t k = 0; k < L.s; ++k)
        for (std::size_t j = 0; j < L.mk[k]; ++j) {
            std::size_t cj = L.J_blocks[k][j];
            for (std::size_t v = 0; v < L.prefix_d(k + 1); ++v) {
                // chart coordinate of variable v
                std::size_t seen = 0, vc = 0;
                for (std::size_t kk = 0; kk < L.s; ++kk)
                    for (std::size_t i = 0; i < L.dk[kk]; ++i, ++seen)
                        if (seen == v) vc = L.I_blocks[kk][i];
                m(1 + vc, 1 + cj) = c.component_derivative(k, j, v, x);
            }
        }
    return m;
}

// permutations relating the two dual closed forms:
// block_dual = omega1 * full_dual * omega2
template <class T>
std::pair<Mat<T>, Mat<T>> dual_factorization_permutations(const IndexLayout& L) {
    std::size_t N = L.n + 1;
    // p maps interleaved position -> separated position
    std::vector<std::size_t> p(N);
    p[0] = 0;
    for (std::size_t c = 0; c < L.n; ++c) {
        auto info = detail::coord_info(L, c);
        p[1 + c] = info.independent ? 1 + info.var : 1 + L.d + info.flat_j;
    }
    Mat<T> P(N), Pt(N);
    for (std::size_t r = 0; r < N; ++r) {
        P(r, p[r]) = T(1);
        Pt(p[r], r) = T(1);
    }
    return {P, Pt};
}

// ---------------------------------------------------------------------------
// Diagonal flows and weight selection
// ---------------------------------------------------------------------------

struct DivergenceParams {
    double c = 0.5;
    double Q = 0.0;
    std::vector<double> eps;        // per chart coordinate, chain-ordered
    std::vector<double> eps_prime;  // per independent coordinate position
};

struct ConvergenceParams {
    std::int64_t t = 1;
    std::vector<double> eps;
    std::vector<double> eps_prime;
    double phi = 0.0;

    static ConvergenceParams make(std::int64_t t, std::vector<double> eps,
                                  std::vector<double> eps_prime) {
        ConvergenceParams p;
        p.t = t;
        p.eps = std::move(eps);
        p.eps_prime = std::move(eps_prime);
        double prod = 1.0;
        for (double e : p.eps) prod *= e;
        p.phi = std::pow(std::exp(static_cast<double>(t)) * prod,
                         1.0 / static_cast<double>(p.eps.size() + 1));
        return p;
    }
};

inline double product_constraint_residual(const DivergenceParams& p, const IndexLayout& L) {
    double prod = p.Q;
    for (double e : p.eps_prime) prod *= e;
    for (std::size_t j : L.J) prod *= p.eps[j];
    return std::fabs(prod - 1.0);
}

// diag scaling for the divergence flow; entries follow the embedding row order
inline MatD build_g_divergence(const DivergenceParams& p, const IndexLayout& L) {
    if (p.eps.size() != L.n || p.eps_prime.size() != L.d)
        throw std::invalid_argument("build_g_divergence: dimension mismatch");
    if (product_constraint_residual(p, L) > 1e-12 * 1.0)
        throw std::invalid_argument("build_g_divergence: eps' product constraint violated");
    std::size_t N = L.n + 1;
    std::vector<double> diag(N);
    double cinv = 1.0 / p.c;
    for (std::size_t r = 0; r < L.n; ++r) {
        std::size_t coord = detail::coord_of_row(L, r);
        auto info = detail::coord_info(L, coord);
        diag[r] = cinv * (info.independent ? p.eps_prime[info.var] : p.eps[coord]);
    }
    diag[N - 1] = cinv * std::pow(p.c, static_cast<double>(N)) * p.Q;
    return MatD::diag(diag);
}

struct ConvergenceFlow {
    MatD g_conv;
    MatD a;       // coordinate rescaling (identity off the independent rows)
    double phi;
};

inline ConvergenceFlow build_g_convergence(const ConvergenceParams& p, const IndexLayout& L) {
    std::size_t N = L.n + 1;
    double et = std::exp(static_cast<double>(p.t));
    double prod = 1.0;
    for (double e : p.eps) prod *= e;
    double phi_check = std::pow(et * prod, 1.0 / static_cast<double>(N));
    if (std::fabs(phi_check - p.phi) > 1e-12 * phi_check)
        throw std::invalid_argument("build_g_convergence: phi does not match e^t prod eps");
    std::vector<double> gd(N), ad(N, 1.0);
    for (std::size_t r = 0; r < L.n; ++r) {
        std::size_t coord = detail::coord_of_row(L, r);
        gd[r] = p.phi / p.eps[coord];
        auto info = detail::coord_info(L, coord);
        if (info.independent) {
            double root = std::sqrt(p.eps_prime[info.var] * et);
            ad[r] = p.eps[coord] / std::max(p.eps[coord], root);
        }
    }
    gd[N - 1] = p.phi / et;
    return {MatD::diag(gd), MatD::diag(ad), p.phi};
}

// --- weight selection -------------------------------------------------------

enum class WeightMode { divergence, convergence };

struct WeightReport {
    std::vector<double> eps_prime;
    bool goal1 = false;           // eps'_i >= eps_i on every independent coordinate
    bool goal2 = false;           // min_J eps > max eps'_i eps'_i' / Q (per block prefix)
    bool goal3 = false;           // Q^-n < (max K / max T) T_1..T_n
    bool standing_product = false;     // eps_1..eps_n Q <= 1
    bool standing_tail = false;        // eps_2..eps_n Q > Q^s
    bool conv_prime_small = false;     // max eps'_i <= min_J eps
    bool conv_sqrt = false;            // eps_i <= sqrt(eps'_i e^t)
};

struct KTParams {
    std::vector<double> K;  // per independent position
    std::vector<double> T;  // per chart coordinate
    double maxT_ratio = 0;  // max T / (c^{n+1} max{1/eps', 1/min_J eps})
};

inline double min_eps_over_J(const std::vector<double>& eps, const IndexLayout& L) {
    double m = 1e300;
    for (std::size_t j : L.J) m = std::min(m, eps[j]);
    return m;
}

// K/T dictionaries with all implied constants set to 1
inline KTParams kT_parameters(double c, const std::vector<double>& eps,
                              const std::vector<double>& eps_prime, const IndexLayout& L) {
    double cpow = std::pow(c, static_cast<double>(L.n + 1));
    KTParams out;
    out.K.assign(L.d, 0.0);
    out.T.assign(L.n, 0.0);
    if (L.s == 1) {
        std::size_t d = L.d, m = L.m;
        double epsJmin = min_eps_over_J(eps, L);
        out.K[0] = cpow / eps_prime[0];
        out.T[L.I[0]] = cpow * (1.0 / eps_prime[0] + static_cast<double>(m) / epsJmin);
        for (std::size_t i = 1; i < d; ++i) {
            out.T[L.I[i]] = cpow / eps_prime[i];
            out.K[i] = out.T[L.I[i]] + cpow / epsJmin;
        }
        for (std::size_t j : L.J) out.T[j] = cpow / eps[j];
    } else {
        for (std::size_t k = 0; k < L.s; ++k) {
            double blockJmin = 1e300;
            for (std::size_t j : L.J_blocks[k]) blockJmin = std::min(blockJmin, eps[j]);
            if (L.J_blocks[k].empty()) blockJmin = min_eps_over_J(eps, L);
            for (std::size_t li = 0; li < L.dk[k]; ++li) {
                auto info = detail::coord_info(L, L.I_blocks[k][li]);
                out.K[info.var] = cpow / eps_prime[info.var];
                out.T[L.I_blocks[k][li]] = cpow * (1.0 / eps_prime[info.var] + 1.0 / blockJmin);
            }
            for (std::size_t j : L.J_blocks[k]) out.T[j] = cpow / eps[j];
        }
    }
    double maxT = 0, ref = 0;
    for (double t : out.T) maxT = std::max(maxT, t);
    for (double ep : eps_prime) ref = std::max(ref, 1.0 / ep);
    ref = std::max(ref, 1.0 / min_eps_over_J(eps, L));
    out.maxT_ratio = maxT / (cpow * ref);
    return out;
}

inline WeightReport select_weights(WeightMode mode, const std::vector<double>& eps,
                                   double Q_or_t, const IndexLayout& L, double c = 1.0,
                                   double s = 0.0) {
    if (eps.size() != L.n) throw std::invalid_argument("select_weights: eps size != n");
    for (std::size_t i = 0; i + 1 < eps.size(); ++i)
        if (eps[i] > eps[i + 1] * (1 + 1e-12))
            throw std::invalid_argument("select_weights: eps must be chain-ordered");
    WeightReport rep;
    rep.eps_prime.assign(L.d, 0.0);
    if (mode == WeightMode::divergence) {
        double Q = Q_or_t;
        double tailprod = Q;
        for (std::size_t i = 1; i < L.n; ++i) tailprod *= eps[i];
        for (std::size_t k = 0, var = 0; k < L.s; ++k)
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) {
                std::size_t coord = L.I_blocks[k][li];
                rep.eps_prime[var] = (coord == 0) ? 1.0 / tailprod : eps[coord];
            }
        double fullprod = Q;
        for (double e : eps) fullprod *= e;
        rep.standing_product = fullprod <= 1.0;
        rep.standing_tail = tailprod > std::pow(Q, s);
        rep.goal1 = true;
        for (std::size_t k = 0, var = 0; k < L.s; ++k)
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var)
                if (rep.eps_prime[var] < eps[L.I_blocks[k][li]]) rep.goal1 = false;
        // per-block linearization restriction (reduces to the classical one
        // when s = 1)
        rep.goal2 = true;
        double running_max = 0.0;
        for (std::size_t k = 0, var = 0; k < L.s; ++k) {
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var)
                running_max = std::max(running_max, rep.eps_prime[var]);
            double blockJmin = 1e300;
            for (std::size_t j : L.J_blocks[k]) blockJmin = std::min(blockJmin, eps[j]);
            if (!L.J_blocks[k].empty() && !(blockJmin > running_max * running_max / Q))
                rep.goal2 = false;
        }
        KTParams kt = kT_parameters(c, eps, rep.eps_prime, L);
        double maxK = 0, maxT = 0, prodT = 1;
        for (double k2 : kt.K) maxK = std::max(maxK, k2);
        for (double t2 : kt.T) {
            maxT = std::max(maxT, t2);
            prodT *= t2;
        }
        rep.goal3 = std::pow(Q, -static_cast<double>(L.n)) < maxK / maxT * prodT;
    } else {
        double t = Q_or_t;
        double et = std::exp(t);
        for (std::size_t k = 0, var = 0; k < L.s; ++k) {
            double blockJmin = 1e300;
            for (std::size_t j : L.J_blocks[k]) blockJmin = std::min(blockJmin, eps[j]);
            if (L.J_blocks[k].empty()) blockJmin = min_eps_over_J(eps, L);
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) rep.eps_prime[var] = blockJmin;
        }
        double epsJmin = min_eps_over_J(eps, L);
        rep.conv_prime_small = true;
        rep.conv_sqrt = true;
        for (std::size_t k = 0, var = 0; k < L.s; ++k)
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) {
                if (rep.eps_prime[var] > epsJmin * (1 + 1e-12)) rep.conv_prime_small = false;
                if (eps[L.I_blocks[k][li]] > std::sqrt(rep.eps_prime[var] * et) * (1 + 1e-12))
                    rep.conv_sqrt = false;
            }
        rep.goal1 = true;
        for (std::size_t k = 0, var = 0; k < L.s; ++k)
            for (std::size_t li = 0; li < L.dk[k]; ++li, ++var)
                if (rep.eps_prime[var] < eps[L.I_blocks[k][li]]) rep.goal1 = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Membership predicates
// ---------------------------------------------------------------------------

struct LevelResult {
    double lambda;     // lambda_{n+1} of the flow-translated lattice
    double threshold;  // comparison level
    bool in_set;
    bool certified;  // margin clears the 1e-9 relative guard band
};

inline LevelResult in_good_set(const Chart& c, const std::vector<double>& x,
                               const DivergenceParams& p, std::uint64_t budget = 10'000'000) {
    const IndexLayout& L = c.layout();
    MatD g = build_g_divergence(p, L);
    MatD u = build_embedding(c.monge() ? EmbeddingKind::single_direction : EmbeddingKind::block,
                             c, x);
    MatD latt = g.inverse() * u;
    auto rep = successive_minima(latt, L.n + 1, budget);
    double lam = rep.lambdas.back();
    double thr = std::pow(p.c, -static_cast<double>(L.n));
    return {lam, thr, lam <= thr, std::fabs(lam - thr) > 1e-9 * thr};
}

inline LevelResult in_minor_set(const Chart& c, const std::vector<double>& x,
                                const ConvergenceParams& p, std::uint64_t budget = 10'000'000) {
    const IndexLayout& L = c.layout();
    ConvergenceFlow flow = build_g_convergence(p, L);
    MatD u = build_embedding(c.monge() ? EmbeddingKind::full : EmbeddingKind::block, c, x);
    MatD latt = flow.a * flow.g_conv * u;
    auto rep = successive_minima(latt, L.n + 1, budget);
    double lam = rep.lambdas.back();
    return {lam, flow.phi, lam > flow.phi, std::fabs(lam - flow.phi) > 1e-9 * flow.phi};
}

// decision-only forms used by grid sweeps and measure estimates; identical
// boundary semantics, but the enumeration exits as soon as the rank decides
inline bool in_good_set_fast(const Chart& c, const std::vector<double>& x,
                             const DivergenceParams& p, std::uint64_t budget = 10'000'000) {
    const IndexLayout& L = c.layout();
    MatD g = build_g_divergence(p, L);
    MatD u = build_embedding(c.monge() ? EmbeddingKind::single_direction : EmbeddingKind::block,
                             c, x);
    double thr = std::pow(p.c, -static_cast<double>(L.n));
    return rank_reaches_at_radius(g.inverse() * u, thr, L.n + 1, budget);
}

inline bool in_minor_set_fast(const Chart& c, const std::vector<double>& x,
                              const ConvergenceParams& p, std::uint64_t budget = 10'000'000) {
    const IndexLayout& L = c.layout();
    ConvergenceFlow flow = build_g_convergence(p, L);
    MatD u = build_embedding(c.monge() ? EmbeddingKind::full : EmbeddingKind::block, c, x);
    return !rank_reaches_at_radius(flow.a * flow.g_conv * u, flow.phi, L.n + 1, budget);
}

// --- set of points with a small dual linear form -----------------------------

struct SFParams {
    double delta = 1.0;
    std::vector<double> K;  // d entries
    std::vector<double> T;  // n entries
    double E = 1.0;
    double alpha = 0.0;
    double r = 1.0;
};

inline double alpha_exponent(std::size_t d, int l, std::size_t n) {
    return 1.0 / (static_cast<double>(d) * (2.0 * l - 1.0) * (static_cast<double>(n) + 1.0));
}

struct WitnessCandidate {
    long long a0 = 0;
    std::vector<long long> a;
};

inline std::optional<WitnessCandidate> in_SF(const Chart& c, const std::vector<double>& x,
                                             const SFParams& p,
                                             std::uint64_t budget = 100'000'000) {
    std::size_t n = c.n(), d = c.d();
    if (p.K.size() != d || p.T.size() != n) throw std::invalid_argument("in_SF: K/T sizes");
    auto y = eval_chart(c, x);
    auto Jm = chart_jacobian(c, x);
    std::vector<long long> amax(n);
    double count = 1;
    for (std::size_t k = 0; k < n; ++k) {
        double Tk = p.T[k];
        long long A = static_cast<long long>(std::ceil(Tk)) - 1;
        if (std::ceil(Tk) > Tk) A = static_cast<long long>(std::floor(Tk));
        amax[k] = std::max<long long>(A, 0);
        count *= static_cast<double>(2 * amax[k] + 1);
    }
    if (count > static_cast<double>(budget))
        throw BudgetExceeded("in_SF: candidate box exceeds enumeration budget");

    std::vector<long long> a(n, 0);
    for (std::size_t k = 0; k < n; ++k) a[k] = -amax[k];
    while (true) {
        bool zero = std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; });
        if (!zero) {
            double fa = 0;
            for (std::size_t k = 0; k < n; ++k) fa += y[k] * static_cast<double>(a[k]);
            long long a0 = static_cast<long long>(round_half_even(-fa));
            bool ok = std::fabs(static_cast<double>(a0) + fa) < p.delta;
            for (std::size_t i = 0; ok && i < d; ++i) {
                double der = 0;
                for (std::size_t k = 0; k < n; ++k) der += Jm[i][k] * static_cast<double>(a[k]);
                ok = std::fabs(der) < p.K[i];
            }
            if (ok) return WitnessCandidate{a0, a};
        }
        std::size_t k = n;
        while (k-- > 0) {
            if (a[k] < amax[k]) {
                ++a[k];
                break;
            }
            a[k] = -amax[k];
            if (k == 0) return std::nullopt;
        }
    }
}

// parameter dictionary under which the minor set embeds into the
// small-form set
inline SFParams minor_set_sf_params(const ConvergenceParams& p, const IndexLayout& L) {
    SFParams sf;
    double et = std::exp(static_cast<double>(p.t));
    sf.delta = 1.0 / et;
    double epsJmin = min_eps_over_J(p.eps, L);
    sf.K.assign(L.d, 0.0);
    sf.T.assign(L.n, 0.0);
    for (std::size_t k = 0, var = 0; k < L.s; ++k) {
        double blockJmin = 1e300;
        for (std::size_t j : L.J_blocks[k]) blockJmin = std::min(blockJmin, p.eps[j]);
        if (L.J_blocks[k].empty()) blockJmin = epsJmin;
        for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) {
            sf.K[var] = 1.0 / std::sqrt(p.eps_prime[var] * et);
            sf.T[L.I_blocks[k][li]] = sf.K[var] + 1.0 / blockJmin;
        }
        for (std::size_t j : L.J_blocks[k]) sf.T[j] = 1.0 / p.eps[j];
    }
    return sf;
}

// parameter dictionary for the complement of the good set
inline SFParams good_set_sf_params(const DivergenceParams& p, const IndexLayout& L) {
    SFParams sf;
    sf.delta = 1.0 / p.Q;
    KTParams kt = kT_parameters(p.c, p.eps, p.eps_prime, L);
    sf.K = kt.K;
    sf.T = kt.T;
    return sf;
}

// --- quantitative nondivergence bound ----------------------------------------

struct NondivergenceBound {
    double volume_term;
    double remainder_term;
    double total;
};

inline NondivergenceBound bkm_bound(const SFParams& p, std::size_t d, double ball_measure) {
    std::size_t n = p.T.size();
    if (p.K.size() != d) throw std::invalid_argument("bkm_bound: K size != d");
    double maxK = 0, maxT = 0, prodT = 1;
    for (double k : p.K) maxK = std::max(maxK, k);
    for (double t : p.T) {
        maxT = std::max(maxT, t);
        prodT *= t;
    }
    // admissibility (equality admitted; used by the all-ones calibration case)
    if (std::pow(p.delta, static_cast<double>(n)) > maxK * prodT / maxT * (1 + 1e-12))
        throw std::invalid_argument("bkm_bound: delta^n < K T_1..T_n / max T violated");
    double term1 = p.delta;
    for (std::size_t i = 0; i < d; ++i) term1 *= std::min(p.K[i], p.T[i]);
    for (std::size_t j = d; j < n; ++j) term1 *= p.T[j];
    term1 *= ball_measure;
    double term2 =
        p.E * std::pow(p.delta * std::min(maxK, 1.0 / p.r) * prodT / maxT, p.alpha);
    return {term1, term2, term1 + term2};
}

// ---------------------------------------------------------------------------
// Constructive projection: from a good-set point to a rational witness
// ---------------------------------------------------------------------------

struct ProjectionResult {
    RationalWitness witness;
    double q_lo, q_hi;                  // admissible q window
    std::vector<double> x_bounds;       // verified |q x_i - a_i| budgets
    std::vector<double> f_bounds;       // verified |q g_j(a/q) - b_j| budgets
};

inline ProjectionResult project_to_rational(const Chart& c, const std::vector<double>& x,
                                            const DivergenceParams& p, double M_bound,
                                            std::uint64_t budget = 10'000'000) {
    const IndexLayout& L = c.layout();
    std::size_t N = L.n + 1;
    double cp = std::pow(p.c, -static_cast<double>(N));

    MatD g = build_g_divergence(p, L);
    MatD u = build_embedding(c.monge() ? EmbeddingKind::single_direction : EmbeddingKind::block,
                             c, x);
    MatD latt = g.inverse() * u;
    auto rep = successive_minima(latt, N, budget);
    double thr = std::pow(p.c, -static_cast<double>(L.n));
    if (rep.lambdas.back() > thr)
        throw std::domain_error("project_to_rational: point is not in the good set");

    // shrunken-domain membership x in V^(r)
    for (std::size_t k = 0, var = 0; k < L.s; ++k)
        for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) {
            double r = c.monge() ? p.eps_prime[var] / (std::pow(p.c, static_cast<double>(N)) * p.Q)
                                 : p.eps_prime[var] / (p.c * p.Q);
            if (x[var] - r <= c.domain().lo[var] || x[var] + r >= c.domain().hi[var])
                throw std::domain_error("project_to_rational: point too close to the boundary");
        }

    auto y = eval_chart(c, x);
    double wN = -2.0 * static_cast<double>(N) * p.Q;
    std::vector<double> w(N);
    for (std::size_t r = 0; r < L.n; ++r) w[r] = -wN * y[detail::coord_of_row(L, r)];
    w[N - 1] = wN;

    // solve C eta = w where C has the attaining integer preimages as columns
    MatD C(N);
    for (std::size_t col = 0; col < N; ++col)
        for (std::size_t row = 0; row < N; ++row)
            C(row, col) = static_cast<double>(rep.vectors[col][row]);
    std::vector<double> eta = C.solve(w);
    std::vector<long long> z(N, 0);
    for (std::size_t col = 0; col < N; ++col) {
        long long tc = static_cast<long long>(std::floor(eta[col]));
        for (std::size_t row = 0; row < N; ++row) z[row] -= tc * rep.vectors[col][row];
    }

    ProjectionResult out;
    long long q = z[N - 1];
    out.q_lo = static_cast<double>(N) * p.Q;
    out.q_hi = 3.0 * static_cast<double>(N) * p.Q;
    if (q < out.q_lo - 1e-9 || q > out.q_hi + 1e-9)
        throw std::domain_error("project_to_rational: recovered q outside the admissible window");
    out.witness.q = q;
    out.witness.a.assign(L.d, 0);
    out.witness.b.assign(L.m, 0);

    const double slack = 1.0 + 1e-9;
    std::vector<double> aq(L.d);
    for (std::size_t k = 0, var = 0; k < L.s; ++k)
        for (std::size_t li = 0; li < L.dk[k]; ++li, ++var) {
            std::size_t coord = L.I_blocks[k][li];
            long long ai = -z[L.n - 1 - coord];
            out.witness.a[var] = ai;
            double bound = static_cast<double>(N) * cp * p.eps_prime[var];
            out.x_bounds.push_back(bound);
            if (std::fabs(static_cast<double>(q) * x[var] - static_cast<double>(ai)) >
                bound * slack)
                throw std::domain_error("project_to_rational: coordinate bound failed");
            aq[var] = static_cast<double>(ai) / static_cast<double>(q);
        }
    if (!c.domain().contains(aq))
        throw std::domain_error("project_to_rational: rational point left the domain");
    for (std::size_t k = 0, flat = 0; k < L.s; ++k)
        for (std::size_t j = 0; j < L.mk[k]; ++j, ++flat) {
            std::size_t coord = L.J_blocks[k][j];
            long long bj = -z[L.n - 1 - coord];
            out.witness.b[flat] = bj;
            double gval = c.component(k, j, aq);
            double bound = static_cast<double>(N) * M_bound * cp * p.eps[coord];
            out.f_bounds.push_back(bound);
            if (std::fabs(static_cast<double>(q) * gval - static_cast<double>(bj)) >
                bound * slack)
                throw std::domain_error("project_to_rational: dependent-coordinate bound failed");
        }
    return out;
}

}  // namespace diophlab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "diophlab/approxfn.hpp"
#include "diophlab/dynamo.hpp"
#include "diophlab/manifold.hpp"
#include "diophlab/rng.hpp"

namespace diophlab {

// axis-aligned rectangle given by center and per-coordinate half-widths
struct Box {
    std::vector<double> center;
    std::vector<double> radii;

    Box() = default;
    Box(std::vector<double> c, std::vector<double> r) : center(std::move(c)), radii(std::move(r)) {}
    static Box interval(double lo, double hi) { return Box({(lo + hi) / 2}, {(hi - lo) / 2}); }

    std::size_t dim() const { return center.size(); }
    double lo(std::size_t i) const { return center[i] - radii[i]; }
    double hi(std::size_t i) const { return center[i] + radii[i]; }

    double volume() const {
        double v = 1.0;
        for (double r : radii) v *= 2.0 * r;
        return v;
    }

    bool contains(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(std::fabs(x[i] - center[i]) < radii[i])) return false;
        return true;
    }

    // the set of centers whose (r)-rectangle stays inside this box
    Box shrink(const std::vector<double>& r) const {
        Box b = *this;
        for (std::size_t i = 0; i < dim(); ++i) b.radii[i] -= r[i];
        return b;
    }
};

namespace detail {

// integers strictly inside (center - eps, center + eps), exact
inline std::pair<Int, Int> open_window(const Rat& center, const Rat& eps) {
    Int lo = rat_floor(center - eps) + 1;
    Int hi = rat_ceil(center + eps) - 1;
    return {lo, hi};
}

inline long long count_open_window(const Rat& center, const Rat& eps) {
    auto [lo, hi] = open_window(center, eps);
    if (hi < lo) return 0;
    return (hi - lo + 1).convert_to<long long>();
}

}  // namespace detail

struct CountResult {
    long long count = 0;
    std::vector<RationalWitness> witnesses;
    bool certified = true;  // false when a float comparison fell inside the guard band
};

// counts (q, a, b) with |q g_j(a/q) - b_j| < eps_J[j], a/q in B, Q/2 <= q <= Q;
// distinct b for the same (q, a) are distinct elements
inline CountResult count_R(const Chart& c, double Q, const std::vector<double>& eps_J,
                           const Box& B, bool keep_witnesses = true,
                           double budget = 1e9) {
    const IndexLayout& L = c.layout();
    if (eps_J.size() != L.m) throw std::invalid_argument("count_R: eps size != m");
    if (Q < 2) throw std::invalid_argument("count_R: Q >= 2 required");
    if (std::pow(Q, static_cast<double>(L.d + 1)) > budget)
        throw BudgetExceeded("count_R: Q^(d+1) exceeds enumeration budget");
    const double guard = 1e-9;

    CountResult out;
    long long q_lo = static_cast<long long>(std::ceil(Q / 2.0 - 1e-12));
    long long q_hi = static_cast<long long>(std::floor(Q + 1e-12));
    for (long long q = q_lo; q <= q_hi; ++q) {
        // integer ranges for a/q strictly inside B
        std::vector<long long> alo(L.d), ahi(L.d);
        for (std::size_t v = 0; v < L.d; ++v) {
            Rat lo = Rat(q) * (Rat(B.center[v]) - Rat(B.radii[v]));
            Rat hi = Rat(q) * (Rat(B.center[v]) + Rat(B.radii[v]));
            alo[v] = (rat_floor(lo) + 1).convert_to<long long>();
            ahi[v] = (rat_ceil(hi) - 1).convert_to<long long>();
            if (ahi[v] < alo[v]) {
                alo[v] = 1;
                ahi[v] = 0;
            }
        }
        std::vector<long long> a(alo);
        bool any = true;
        for (std::size_t v = 0; v < L.d; ++v) any = any && alo[v] <= ahi[v];
        while (any) {
            if (c.exact()) {
                std::vector<Rat> aq(L.d);
                for (std::size_t v = 0; v < L.d; ++v) aq[v] = Rat(a[v], q);
                long long combos = 1;
                std::vector<std::pair<Int, Int>> windows;
                for (std::size_t k = 0, flat = 0; k < L.s && combos > 0; ++k)
                    for (std::size_t j = 0; j < L.mk[k]; ++j, ++flat) {
                        Rat val = Rat(q) * c.component(k, j, aq);
                        auto w = detail::open_window(val, Rat(eps_J[flat]));
                        windows.push_back(w);
                        combos *= w.second < w.first
                                      ? 0
                                      : (w.second - w.first + 1).convert_to<long long>();
                    }
                if (combos > 0) {
                    out.count += combos;
                    if (keep_witnesses) {
                        std::vector<long long> b(L.m);
                        std::function<void(std::size_t)> emit = [&](std::size_t j) {
                            if (j == L.m) {
                                out.witnesses.push_back({q, a, b});
                                return;
                            }
                            for (Int bb = windows[j].first; bb <= windows[j].second; ++bb) {
                                b[j] = bb.convert_to<long long>();
                                emit(j + 1);
                            }
                        };
                        emit(0);
                    }
                }
            } else {
                std::vector<double> aq(L.d);
                for (std::size_t v = 0; v < L.d; ++v)
                    aq[v] = static_cast<double>(a[v]) / static_cast<double>(q);
                long long combos = 1;
                std::vector<long long> bpick(L.m);
                for (std::size_t k = 0, flat = 0; k < L.s && combos > 0; ++k)
                    for (std::size_t j = 0; j < L.mk[k]; ++j, ++flat) {
                        double val = static_cast<double>(q) * c.component(k, j, aq);
                        double b = round_half_even(val);
                        double err = std::fabs(val - b);
                        if (std::fabs(err - eps_J[flat]) < guard) out.certified = false;
                        if (err < eps_J[flat]) {
                            bpick[flat] = static_cast<long long>(b);
                        } else {
                            combos = 0;
                        }
                    }
                if (combos > 0) {
                    ++out.count;
                    if (keep_witnesses) out.witnesses.push_back({q, a, bpick});
                }
            }
            // odometer over a
            std::size_t v = L.d;
            while (v-- > 0) {
                if (a[v] < ahi[v]) {
                    ++a[v];
                    break;
                }
                a[v] = alo[v];
                if (v == 0) any = false;
            }
            if (L.d == 0) break;
        }
    }
    return out;
}

struct NeighborhoodBox {
    Box box;
    long long q;
    std::vector<long long> a;
    int multiplicity;  // distinct b sharing this (q, a)
};

inline std::vector<NeighborhoodBox> neighborhood_union(const Chart& c, double Q,
                                                       const std::vector<double>& eps_J,
                                                       const Box& B,
                                                       const std::vector<double>& rho) {
    auto res = count_R(c, Q, eps_J, B, true);
    std::map<std::pair<long long, std::vector<long long>>, int> mult;
    for (const auto& w : res.witnesses) ++mult[{w.q, w.a}];
    std::vector<NeighborhoodBox> out;
    for (const auto& [key, m] : mult) {
        std::vector<double> center(key.second.size());
        for (std::size_t v = 0; v < center.size(); ++v)
            center[v] = static_cast<double>(key.second[v]) / static_cast<double>(key.first);
        out.push_back({Box(center, rho), key.first, key.second, m});
    }
    return out;
}

// chart coordinate of global variable v
inline std::size_t var_coord(const IndexLayout& L, std::size_t v) {
    std::size_t seen = 0;
    for (std::size_t k = 0; k < L.s; ++k)
        for (std::size_t i = 0; i < L.dk[k]; ++i, ++seen)
            if (seen == v) return L.I_blocks[k][i];
    throw std::logic_error("variable index out of range");
}

// counts (p, q), q <= e^t, whose per-coordinate windows meet the box: the
// independent windows must cut the box, and each dependent window must meet
// an outer enclosure of g_j over the cut (interval arithmetic)
inline long long count_N(const Chart& c, const Box& Delta, const std::vector<double>& eps,
                         std::int64_t t, double budget = 1e9) {
    const IndexLayout& L = c.layout();
    if (eps.size() != L.n) throw std::invalid_argument("count_N: eps size != n");
    double et = std::exp(static_cast<double>(t));
    if (std::pow(et, static_cast<double>(L.d + 1)) > budget)
        throw BudgetExceeded("count_N: e^{t(d+1)} exceeds enumeration budget");
    long long total = 0;
    long long q_max = static_cast<long long>(std::floor(et));
    for (long long q = 1; q <= q_max; ++q) {
        std::vector<long long> plo(L.d), phi(L.d);
        bool nonempty = true;
        for (std::size_t v = 0; v < L.d; ++v) {
            double e = eps[var_coord(L, v)] / et;
            double lo = (Delta.lo(v) - e) * q;
            double hi = (Delta.hi(v) + e) * q;
            plo[v] = static_cast<long long>(std::floor(lo)) + 1;
            phi[v] = static_cast<long long>(std::ceil(hi)) - 1;
            if (phi[v] < plo[v]) nonempty = false;
        }
        if (!nonempty) continue;
        std::vector<long long> pv(plo);
        while (true) {
            // cut of Delta by the independent windows
            std::vector<double> xlo(L.d), xhi(L.d);
            bool feasible = true;
            for (std::size_t v = 0; v < L.d && feasible; ++v) {
                double e = eps[var_coord(L, v)] / et;
                double center = static_cast<double>(pv[v]) / static_cast<double>(q);
                xlo[v] = std::max(Delta.lo(v), center - e);
                xhi[v] = std::min(Delta.hi(v), center + e);
                feasible = xlo[v] < xhi[v];
            }
            long long combos = feasible ? 1 : 0;
            for (std::size_t k = 0, flat = 0; k < L.s && combos > 0; ++k)
                for (std::size_t j = 0; j < L.mk[k]; ++j, ++flat) {
                    std::size_t coord = L.J_blocks[k][j];
                    std::pair<double, double> range;
                    const CoordFn& f = c.fn(k, j);
                    if (std::holds_alternative<Poly>(f))
                        range = std::get<Poly>(f).range(xlo, xhi);
                    else
                        range = std::get<Builtin>(f).range(xlo, xhi);
                    double e = eps[coord] / et;
                    long long lo =
                        static_cast<long long>(std::floor((range.first - e) * q)) + 1;
                    long long hi =
                        static_cast<long long>(std::ceil((range.second + e) * q)) - 1;
                    combos *= (hi < lo) ? 0 : (hi - lo + 1);
                }
            total += combos;
            std::size_t v = L.d;
            while (v-- > 0) {
                if (pv[v] < phi[v]) {
                    ++pv[v];
                    break;
                }
                pv[v] = plo[v];
                if (v == 0) goto next_q;
            }
        }
    next_q:;
    }
    return total;
}

// first q in [q_lo, q_hi] with |q y_k - p_k| < psi_k(q) for all coordinates
inline std::optional<RationalWitness> approximable_upto(const Chart& c,
                                                        const std::vector<double>& x,
                                                        const WeightSystem& ws,
                                                        std::int64_t q_lo, std::int64_t q_hi) {
    if (ws.n != c.n()) throw std::invalid_argument("approximable_upto: weights size != n");
    auto y = eval_chart(c, x);
    const IndexLayout& L = c.layout();
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
        bool ok = true;
        std::vector<long long> p(L.n);
        for (std::size_t k2 = 0; k2 < L.n && ok; ++k2) {
            double v = static_cast<double>(q) * y[k2];
            p[k2] = static_cast<long long>(round_half_even(v));
            ok = std::fabs(v - static_cast<double>(p[k2])) < ws.psis[k2](q);
        }
        if (ok) {
            RationalWitness w;
            w.q = q;
            for (std::size_t i : L.I) w.a.push_back(p[i]);
            for (std::size_t j : L.J) w.b.push_back(p[j]);
            return w;
        }
    }
    return std::nullopt;
}

// multiplicative variant: prod_k |q y_k - p_k| < psi(q)
inline std::optional<RationalWitness> mult_approximable_upto(const Chart& c,
                                                             const std::vector<double>& x,
                                                             const ApproxFunction& psi,
                                                             std::int64_t q_lo,
                                                             std::int64_t q_hi) {
    auto y = eval_chart(c, x);
    const IndexLayout& L = c.layout();
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
        double prod = 1.0;
        std::vector<long long> p(L.n);
        for (std::size_t k2 = 0; k2 < L.n; ++k2) {
            double v = static_cast<double>(q) * y[k2];
            p[k2] = static_cast<long long>(round_half_even(v));
            prod *= std::fabs(v - static_cast<double>(p[k2]));
        }
        if (prod < psi(q)) {
            RationalWitness w;
            w.q = q;
            for (std::size_t i : L.I) w.a.push_back(p[i]);
            for (std::size_t j : L.J) w.b.push_back(p[j]);
            return w;
        }
    }
    return std::nullopt;
}

// exhaustive witness under the linear-forms solvability threshold;
// closed inequalities |q y_i - p_i| <= eps_i, q <= Q
inline std::optional<RationalWitness> minkowski_witness(const std::vector<double>& y,
                                                        const std::vector<double>& eps,
                                                        double Q) {
    for (long long q = 1; q <= static_cast<long long>(std::floor(Q)); ++q) {
        bool ok = true;
        std::vector<long long> p(y.size());
        for (std::size_t i = 0; i < y.size() && ok; ++i) {
            double v = static_cast<double>(q) * y[i];
            p[i] = static_cast<long long>(round_half_even(v));
            ok = std::fabs(v - static_cast<double>(p[i])) <= eps[i];
        }
        if (ok) {
            RationalWitness w;
            w.q = q;
            w.a = p;
            return w;
        }
    }
    return std::nullopt;
}

// --- ubiquity bookkeeping ------------------------------------------------------

// The resonant-system data feeding the density hypothesis: a shrinking
// rectangle profile rho along an increasing level sequence u_t, the density
// threshold k0 and the geometric-decay constant lambda of the limsup sum
// hypothesis.
struct UbiquityConfig {
    std::function<std::vector<double>(std::int64_t)> rho;  // per level u_t
    std::vector<std::int64_t> u_t;
    double k0 = 0.25;
    double lambda = 0.9;

    // rho(u_t) -> 0 along the finite horizon, every coordinate
    bool rho_shrinks() const {
        if (u_t.size() < 2) return true;
        auto first = rho(u_t.front()), last = rho(u_t.back());
        for (std::size_t i = 0; i < first.size(); ++i)
            if (!(last[i] < first[i])) return false;
        return true;
    }
};

// hypotheses of the full-measure limsup theorem at finite horizon: for
// Psi_i(q) = psi_i(q)/(2q), the per-level sum term prod_i Psi_i(u_t)/rho_i(u_t)
// and the worst geometric-decay ratio Psi_i(u_{t+1})/Psi_i(u_t)
struct LimsupHypotheses {
    std::vector<double> sum_terms;
    double partial_sum = 0.0;
    double worst_decay = 0.0;
    bool decay_ok = true;
};

inline LimsupHypotheses limsup_hypotheses(const WeightSystem& ws, std::size_t d,
                                  const UbiquityConfig& cfg) {
    LimsupHypotheses out;
    auto Psi = [&](std::size_t i, std::int64_t q) { return ws.psis[i](q) / (2.0 * q); };
    for (std::size_t ti = 0; ti < cfg.u_t.size(); ++ti) {
        std::int64_t q = cfg.u_t[ti];
        auto rho = cfg.rho(q);
        double term = 1.0;
        for (std::size_t i = 0; i < d; ++i) term *= Psi(i, q) / rho[i];
        out.sum_terms.push_back(term);
        out.partial_sum += term;
        if (ti > 0)
            for (std::size_t i = 0; i < d; ++i) {
                double ratio = Psi(i, q) / Psi(i, cfg.u_t[ti - 1]);
                out.worst_decay = std::max(out.worst_decay, ratio);
            }
    }
    out.decay_ok = cfg.u_t.size() < 2 || out.worst_decay <= cfg.lambda;
    return out;
}

// --- dyadic multiplicative cover ---------------------------------------------

struct DyadicCover {
    std::int64_t t;
    double w0;
    long long k_max;                           // each k_i ranges over 0..k_max
    std::size_t n;
    double psi_level;                          // psi(e^{t-1})

    // eps_i(t, k): e^{-k_i} for i < n, psi(e^{t-1}) * prod e^{k_i + 1} for i = n
    std::vector<double> eps_of_k(const std::vector<long long>& k) const {
        std::vector<double> eps(n);
        double prod = 1.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            eps[i] = std::exp(-static_cast<double>(k[i]));
            prod *= std::exp(static_cast<double>(k[i]) + 1.0);
        }
        eps[n - 1] = psi_level * prod;
        return eps;
    }

    long long family_size() const {
        long long s = 1;
        for (std::size_t i = 0; i + 1 < n; ++i) s *= (k_max + 1);
        return s;
    }
};

inline DyadicCover make_dyadic_cover(std::int64_t t, double w0, const ApproxFunction& psi,
                                     std::size_t n) {
    DyadicCover dc;
    dc.t = t;
    dc.w0 = w0;
    dc.n = n;
    dc.k_max = static_cast<long long>(std::floor(w0 * static_cast<double>(t)));
    double qlev = std::exp(static_cast<double>(t - 1));
    if (psi.has_family()) {
        auto f = *psi.family_params();
        dc.psi_level = f.C * std::pow(qlev, -f.a) * std::pow(std::log(qlev + 1.0), -f.b);
    } else {
        dc.psi_level = psi(static_cast<std::int64_t>(std::ceil(qlev)));
    }
    return dc;
}

struct CoverReport {
    long long witnesses = 0;          // multiplicative witnesses at this level
    long long classified_tiny = 0;    // min coordinate error below e^{-t w0}
    long long covered = 0;            // witness captured by some k rectangle
    struct Counterexample {
        long long q;
        std::vector<long long> p;
        std::vector<double> errors;
    };
    std::vector<Counterexample> counterexamples;
    bool pass() const { return counterexamples.empty(); }
};

// For each multiplicative witness at level t (product below psi(e^{t-1}),
// every coordinate error below 1), either the smallest error is tiny or some
// dyadic rectangle of the cover captures the witness with slack factor e.
inline CoverReport dyadic_cover_check(const Chart& c, const std::vector<double>& x,
                                      const ApproxFunction& psi, std::int64_t t, double w0) {
    if (t < 1 || w0 <= 1.0) throw std::invalid_argument("dyadic_cover_check: t >= 1, w0 > 1");
    auto y = eval_chart(c, x);
    std::size_t n = c.n();
    DyadicCover dc = make_dyadic_cover(t, w0, psi, n);
    double et = std::exp(static_cast<double>(t));
    double tiny = std::exp(-static_cast<double>(t) * w0);
    CoverReport rep;
    long long q_lo = static_cast<long long>(std::floor(std::exp(static_cast<double>(t - 1)))) + 1;
    long long q_hi = static_cast<long long>(std::floor(et));
    for (long long q = q_lo; q <= q_hi; ++q) {
        std::vector<long long> p(n);
        std::vector<double> err(n);
        double prod = 1.0, maxe = 0.0, mine = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            double v = static_cast<double>(q) * y[i];
            p[i] = static_cast<long long>(round_half_even(v));
            err[i] = std::fabs(v - static_cast<double>(p[i]));
            prod *= err[i];
            maxe = std::max(maxe, err[i]);
            mine = std::min(mine, err[i]);
        }
        if (!(prod < dc.psi_level && maxe < 1.0)) continue;
        ++rep.witnesses;
        if (mine < tiny) {
            ++rep.classified_tiny;
            continue;
        }
        bool covered = false;
        std::vector<long long> k(n - 1, 0);
        while (!covered) {
            auto eps = dc.eps_of_k(k);
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                ok = std::fabs(y[i] - static_cast<double>(p[i]) / static_cast<double>(q)) <
                     std::exp(1.0) * eps[i] / et;
            if (ok) covered = true;
            std::size_t i = n - 1;
            bool carried = false;
            while (i-- > 0) {
                if (k[i] < dc.k_max) {
                    ++k[i];
                    carried = true;
                    break;
                }
                k[i] = 0;
            }
            if (!carried) break;
        }
        if (covered)
            ++rep.covered;
        else
            rep.counterexamples.push_back({q, p, err});
    }
    return rep;
}

// --- measure machinery ---------------------------------------------------------

// deterministic covered fraction on a regular grid of cell centers
inline double ubiquity_density(const std::vector<Box>& boxes, const Box& B, std::size_t grid) {
    if (grid < 10) throw std::invalid_argument("ubiquity_density: grid >= 10 per dimension");
    std::size_t d = B.dim();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= grid;
    std::size_t hitc = 0;
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t it = 0; it < total; ++it) {
        std::vector<double> x(d);
        std::size_t rem = it;
        for (std::size_t i = 0; i < d; ++i) {
            idx[i] = rem % grid;
            rem /= grid;
            x[i] = B.lo(i) + (static_cast<double>(idx[i]) + 0.5) * (2.0 * B.radii[i] / grid);
        }
        for (const auto& bx : boxes)
            if (bx.contains(x)) {
                ++hitc;
                break;
            }
    }
    return static_cast<double>(hitc) / static_cast<double>(total);
}

struct MeasureEstimate {
    double estimate;
    double ci_lo, ci_hi;  // 95% normal-approximation interval
    std::size_t hits;
    std::size_t samples;
};

// seeded (counter-based) Monte Carlo estimate of mu(pred cap B)
inline MeasureEstimate mc_measure(const std::function<bool(const std::vector<double>&)>& pred,
                                  const Box& B, std::size_t samples, std::uint64_t seed) {
    if (samples < 100) throw std::invalid_argument("mc_measure: samples >= 100");
    std::size_t d = B.dim();
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i) {
            double u = uniform01(seed, i + 1, s);
            x[i] = B.lo(i) + u * 2.0 * B.radii[i];
        }
        if (pred(x)) ++hits;
    }
    double vol = B.volume();
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
    return {p * vol, std::max(0.0, p - 1.96 * se) * vol, std::min(1.0, p + 1.96 * se) * vol,
            hits, samples};
}

struct UnionMeasure {
    double measure;
    bool exact;  // coordinate-sweep result (d <= 2); grid fallback otherwise
};

inline UnionMeasure rect_union_measure(const std::vector<Box>& boxes, const Box& B) {
    if (boxes.size() > 1'000'000) throw BudgetExceeded("rect_union_measure: too many boxes");
    std::size_t d = B.dim();
    if (d == 1) {
        std::vector<std::pair<double, double>> iv;
        for (const auto& b : boxes) {
            double lo = std::max(b.lo(0), B.lo(0)), hi = std::min(b.hi(0), B.hi(0));
            if (lo < hi) iv.emplace_back(lo, hi);
        }
        std::sort(iv.begin(), iv.end());
        double total = 0, cur_lo = 0, cur_hi = -1e300;
        for (auto& [lo, hi] : iv) {
            if (lo > cur_hi) {
                if (cur_hi > -1e299) total += cur_hi - cur_lo;
                cur_lo = lo;
                cur_hi = hi;
            } else {
                cur_hi = std::max(cur_hi, hi);
            }
        }
        if (cur_hi > -1e299) total += cur_hi - cur_lo;
        return {total, true};
    }
    if (d == 2) {
        // sweep on x: union of y-intervals is constant between x-cuts
        std::vector<double> cuts;
        for (const auto& b : boxes) {
            cuts.push_back(std::clamp(b.lo(0), B.lo(0), B.hi(0)));
            cuts.push_back(std::clamp(b.hi(0), B.lo(0), B.hi(0)));
        }
        cuts.push_back(B.lo(0));
        cuts.push_back(B.hi(0));
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double total = 0;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            double xm = 0.5 * (cuts[s] + cuts[s + 1]);
            double width = cuts[s + 1] - cuts[s];
            if (width <= 0) continue;
            std::vector<std::pair<double, double>> iv;
            for (const auto& b : boxes) {
                if (!(b.lo(0) < xm && xm < b.hi(0))) continue;
                double lo = std::max(b.lo(1), B.lo(1)), hi = std::min(b.hi(1), B.hi(1));
                if (lo < hi) iv.emplace_back(lo, hi);
            }
            std::sort(iv.begin(), iv.end());
            double len = 0, cur_lo = 0, cur_hi = -1e300;
            for (auto& [lo, hi] : iv) {
                if (lo > cur_hi) {
                    if (cur_hi > -1e299) len += cur_hi - cur_lo;
                    cur_lo = lo;
                    cur_hi = hi;
                } else {
                    cur_hi = std::max(cur_hi, hi);
                }
            }
            if (cur_hi > -1e299) len += cur_hi - cur_lo;
            total += len * width;
        }
        return {total, true};
    }
    // grid fallback, flagged approximate
    std::size_t grid = 64;
    double frac = ubiquity_density(boxes, B, grid);
    return {frac * B.volume(), false};
}

}  // namespace diophlab

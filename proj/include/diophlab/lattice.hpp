#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "diophlab/matrix.hpp"
#include "diophlab/rat.hpp"

namespace diophlab {

// Successive minima and short-vector enumeration for lattices B*Z^n, where
// the generators are the COLUMNS of the basis matrix.  Rational bases are
// cleared to integer form so norms and boundary comparisons are exact;
// double bases get a 1+1e-9 radius inflation and 1e-12 relative reporting.

struct ShortVector {
    std::vector<long long> c;  // integer preimage
    double norm;               // Euclidean norm of B*c
};

struct MinimaReport {
    std::vector<double> lambdas;                  // lambda_1..lambda_k
    std::vector<std::vector<long long>> vectors;  // integer preimages attaining them
    double search_radius = 0.0;
    bool approximate = false;  // dim > 6: LLL sandwich instead of exact enumeration
    std::vector<double> lambdas_lower;  // only in approximate mode
};

namespace detail {

// upper-triangular R with G = R^T R (G must be positive definite)
inline MatD cholesky_upper(const MatD& G) {
    std::size_t n = G.dim();
    MatD R(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = G(i, i);
        for (std::size_t k = 0; k < i; ++k) s -= R(k, i) * R(k, i);
        if (!(s > 0)) throw std::domain_error("lattice: basis numerically singular");
        R(i, i) = std::sqrt(s);
        for (std::size_t j = i + 1; j < n; ++j) {
            double t = G(i, j);
            for (std::size_t k = 0; k < i; ++k) t -= R(k, i) * R(k, j);
            R(i, j) = t / R(i, i);
        }
    }
    return R;
}

// Exact norm evaluation against an integer Gram matrix.  The int64 fast path
// is used when every term provably fits __int128.
struct ExactGram {
    std::vector<std::vector<Int>> g;
    std::vector<std::vector<long long>> g64;
    bool fits64 = false;

    void init(const std::vector<std::vector<Int>>& gram) {
        g = gram;
        fits64 = true;
        Int lim = Int(1) << 56;
        g64.assign(g.size(), std::vector<long long>(g.size(), 0));
        for (std::size_t i = 0; i < g.size() && fits64; ++i)
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (abs(g[i][j]) >= lim) {
                    fits64 = false;
                    break;
                }
                g64[i][j] = g[i][j].convert_to<long long>();
            }
    }

    Int norm2(const std::vector<long long>& c) const {
        std::size_t n = g.size();
        bool small = fits64;
        for (auto v : c)
            if (v > (1 << 20) || v < -(1 << 20)) small = false;
        if (small) {
            __int128 acc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (c[i] == 0) continue;
                __int128 row = 0;
                for (std::size_t j = 0; j < n; ++j) row += static_cast<__int128>(g64[i][j]) * c[j];
                acc += static_cast<__int128>(c[i]) * row;
            }
            bool neg = acc < 0;
            if (neg) acc = -acc;
            Int r = Int(static_cast<std::uint64_t>(acc >> 64));
            r <<= 64;
            r += Int(static_cast<std::uint64_t>(acc));
            return neg ? Int(-r) : r;
        }
        Int acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (c[i] == 0) continue;
            Int row = 0;
            for (std::size_t j = 0; j < n; ++j) row += g[i][j] * c[j];
            acc += Int(c[i]) * row;
        }
        return acc;
    }
};

// Enumerates all nonzero c with ||B c||^2 <= bound2 (exact filter when an
// ExactGram is supplied).  Candidates come from a Fincke-Pohst box on the
// double Cholesky factor, inflated so the exact filter never misses.  When
// rank_target is set, enumeration stops as soon as that many independent
// hits exist; only the rank decision is meaningful then.
struct Enumerator {
    MatD R;
    double bound2;
    const ExactGram* exact = nullptr;
    Rat exact_bound2;
    std::uint64_t budget = 10'000'000;
    std::uint64_t visited = 0;
    std::size_t rank_target = 0;
    std::size_t rank_reached = 0;

    struct Hit {
        std::vector<long long> c;
        double norm2;
        Rat norm2_exact;
    };
    std::vector<Hit> hits;

    void run() {
        std::size_t n = R.dim();
        std::vector<long long> c(n, 0);
        recurse(n, c, 0.0);
        if (rank_target) return;
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
            if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
            if (a.norm2_exact != b.norm2_exact) return a.norm2_exact < b.norm2_exact;
            return a.c < b.c;
        });
    }

  private:
    std::vector<std::vector<Int>> rank_rows_;

    bool note_hit(const std::vector<long long>& c) {
        if (!rank_target) return false;
        std::vector<Int> row(c.begin(), c.end());
        auto trial = rank_rows_;
        trial.push_back(row);
        if (int_rank(trial) == trial.size()) {
            rank_rows_ = std::move(trial);
            rank_reached = rank_rows_.size();
        }
        return rank_reached >= rank_target;
    }

    // returns true to unwind early
    bool recurse(std::size_t level, std::vector<long long>& c, double used) {
        if (++visited > budget) throw BudgetExceeded("lattice enumeration budget exceeded");
        std::size_t n = R.dim();
        if (level == 0) {
            bool zero = std::all_of(c.begin(), c.end(), [](long long v) { return v == 0; });
            if (zero) return false;
            if (exact) {
                Rat n2(exact->norm2(c));
                if (n2 <= exact_bound2) {
                    if (rank_target) return note_hit(c);
                    hits.push_back({c, n2.convert_to<double>(), n2});
                }
            } else {
                double n2 = norm2_double(c);
                if (n2 <= bound2 * (1.0 + 1e-9)) {
                    if (rank_target) return note_hit(c);
                    hits.push_back({c, n2, Rat(0)});
                }
            }
            return false;
        }
        std::size_t i = level - 1;
        double off = 0.0;
        for (std::size_t j = level; j < n; ++j) off += R(i, j) * c[j];
        double rem = bound2 * (1.0 + 2e-9) - used;
        if (rem < 0) return false;
        double center = -off / R(i, i);
        double half = std::sqrt(rem) / R(i, i);
        long long lo = static_cast<long long>(std::ceil(center - half - 1e-9));
        long long hi = static_cast<long long>(std::floor(center + half + 1e-9));
        for (long long v = lo; v <= hi; ++v) {
            c[i] = v;
            double term = R(i, i) * v + off;
            if (recurse(i, c, used + term * term)) {
                c[i] = 0;
                return true;
            }
        }
        c[i] = 0;
        return false;
    }

    double norm2_double(const std::vector<long long>& c) const {
        std::size_t n = R.dim();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double t = 0.0;
            for (std::size_t j = i; j < n; ++j) t += R(i, j) * c[j];
            acc += t * t;
        }
        return acc;
    }
};

struct Cleared {
    std::vector<std::vector<Int>> gram;  // integer Gram of D*B
    Rat scale2;                          // D^2: ||B c||^2 = gram norm / D^2
};

inline Cleared clear_denominators(const MatQ& B) {
    std::size_t n = B.dim();
    Int D = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) D = lcm(D, denominator(B(i, j)));
    std::vector<std::vector<Int>> M(n, std::vector<Int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat scaled = B(i, j) * Rat(D);
            M[i][j] = numerator(scaled);
        }
    Cleared out;
    out.gram.assign(n, std::vector<Int>(n, Int(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Int s = 0;
            for (std::size_t k = 0; k < n; ++k) s += M[k][i] * M[k][j];
            out.gram[i][j] = s;
        }
    out.scale2 = Rat(D * D);
    return out;
}

inline MatD gram_double(const MatD& B) {
    std::size_t n = B.dim();
    MatD G(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < n; ++k) s += B(k, i) * B(k, j);
            G(i, j) = s;
        }
    return G;
}

// One complete enumeration at the given radius; sorted hits.
template <class T>
std::vector<Enumerator::Hit> enumerate_at(const Mat<T>& B, double radius, std::uint64_t budget,
                                          ExactGram& eg_storage) {
    Enumerator en;
    en.budget = budget;
    if constexpr (std::is_same_v<T, Rat>) {
        Cleared cl = clear_denominators(B);
        eg_storage.init(cl.gram);
        en.exact = &eg_storage;
        // scaled exact bound: ||D B c||^2 <= radius^2 D^2
        en.exact_bound2 = Rat(radius) * Rat(radius) * cl.scale2;
        std::size_t n = B.dim();
        MatD Gd(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) Gd(i, j) = cl.gram[i][j].convert_to<double>();
        en.R = cholesky_upper(Gd);
        en.bound2 = to_double(en.exact_bound2);
        en.run();
        // rescale reported double norms back to the original basis
        double inv = 1.0 / to_double(cl.scale2);
        for (auto& h : en.hits) {
            h.norm2 *= inv;
            h.norm2_exact /= cl.scale2;
        }
        return en.hits;
    } else {
        en.R = cholesky_upper(gram_double(B));
        en.bound2 = radius * radius;
        en.run();
        return en.hits;
    }
}

inline double min_column_norm(const MatD& B) {
    double best = -1;
    for (std::size_t j = 0; j < B.dim(); ++j) {
        double s = 0;
        for (std::size_t i = 0; i < B.dim(); ++i) s += B(i, j) * B(i, j);
        if (best < 0 || s < best) best = s;
    }
    return std::sqrt(best);
}

// double LLL (delta = 0.99) used only for the dim > 6 approximate sandwich
inline MatD lll_reduce(MatD B) {
    std::size_t n = B.dim();
    auto col = [&](std::size_t j) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = B(i, j);
        return v;
    };
    auto set_col = [&](std::size_t j, const std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) B(i, j) = v[i];
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    std::vector<std::vector<double>> gs(n);
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
    auto recompute = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            gs[i] = col(i);
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = dot(col(i), gs[j]) / dot(gs[j], gs[j]);
                for (std::size_t k2 = 0; k2 < n; ++k2) gs[i][k2] -= mu[i][j] * gs[j][k2];
            }
        }
    };
    recompute();
    std::size_t k = 1;
    int guard = 0;
    while (k < n && ++guard < 10000) {
        for (std::size_t j = k; j-- > 0;) {
            double r = std::nearbyint(mu[k][j]);
            if (r != 0.0) {
                auto ck = col(k), cj = col(j);
                for (std::size_t i2 = 0; i2 < n; ++i2) ck[i2] -= r * cj[i2];
                set_col(k, ck);
                recompute();
            }
        }
        double lhs = dot(gs[k], gs[k]);
        double rhs = (0.99 - mu[k][k - 1] * mu[k][k - 1]) * dot(gs[k - 1], gs[k - 1]);
        if (lhs >= rhs) {
            ++k;
        } else {
            auto a = col(k), b = col(k - 1);
            set_col(k, b);
            set_col(k - 1, a);
            recompute();
            k = (k > 1) ? k - 1 : 1;
        }
    }
    return B;
}

}  // namespace detail

template <class T>
std::vector<ShortVector> short_vectors(const Mat<T>& basis, double radius,
                                       std::uint64_t budget = 10'000'000) {
    detail::ExactGram eg;
    auto hits = detail::enumerate_at(basis, radius, budget, eg);
    std::vector<ShortVector> out;
    out.reserve(hits.size());
    for (auto& h : hits) out.push_back({h.c, std::sqrt(h.norm2)});
    return out;
}

// decision form: does the closed ball of the given radius contain k linearly
// independent lattice vectors?  Early exit makes this far cheaper than
// computing the minima when the answer is yes.
inline bool rank_reaches_at_radius(const MatD& basis, double radius, std::size_t k,
                                   std::uint64_t budget = 10'000'000) {
    detail::Enumerator en;
    en.budget = budget;
    en.rank_target = k;
    en.R = detail::cholesky_upper(detail::gram_double(basis));
    en.bound2 = radius * radius;
    en.run();
    return en.rank_reached >= k;
}

template <class T>
MinimaReport successive_minima(const Mat<T>& basis, std::size_t k,
                               std::uint64_t budget = 10'000'000) {
    std::size_t n = basis.dim();
    if (k < 1 || k > n) throw std::invalid_argument("successive_minima: bad k");

    if (n > 6) {
        // approximate sandwich from an LLL-reduced basis
        MatD Bd = to_double_mat(basis);
        if (std::fabs(Bd.det()) < 1e-300) throw std::domain_error("singular basis");
        MatD red = detail::lll_reduce(Bd);
        std::vector<double> norms(n), gsn(n);
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += red(i, j) * red(i, j);
            norms[j] = std::sqrt(s);
        }
        std::sort(norms.begin(), norms.end());
        // lambda_i >= min_{j>=i} ||b*_j|| for a (weakly) reduced basis
        {
            std::vector<std::vector<double>> gs(n);
            for (std::size_t i = 0; i < n; ++i) {
                gs[i].resize(n);
                for (std::size_t r = 0; r < n; ++r) gs[i][r] = red(r, i);
                for (std::size_t j = 0; j < i; ++j) {
                    double num = 0, den = 0;
                    for (std::size_t r = 0; r < n; ++r) {
                        num += gs[i][r] * gs[j][r];
                        den += gs[j][r] * gs[j][r];
                    }
                    double m = num / den;
                    for (std::size_t r = 0; r < n; ++r) gs[i][r] -= m * gs[j][r];
                }
                double s = 0;
                for (std::size_t r = 0; r < n; ++r) s += gs[i][r] * gs[i][r];
                gsn[i] = std::sqrt(s);
            }
        }
        MinimaReport rep;
        rep.approximate = true;
        for (std::size_t i = 0; i < k; ++i) {
            rep.lambdas.push_back(norms[i]);
            double lo = gsn[i];
            for (std::size_t j = i + 1; j < n; ++j) lo = std::min(lo, gsn[j]);
            rep.lambdas_lower.push_back(lo);
        }
        return rep;
    }

    double radius = detail::min_column_norm(to_double_mat(basis)) * (1.0 + 1e-12);
    double last_complete_empty = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        detail::ExactGram eg;
        std::vector<detail::Enumerator::Hit> hits;
        try {
            hits = detail::enumerate_at(basis, radius, budget, eg);
        } catch (const BudgetExceeded&) {
            throw BudgetExceeded("successive_minima: enumeration budget exceeded",
                                 last_complete_empty);
        }
        if (hits.empty()) last_complete_empty = radius;
        // greedy independent picks in sorted order; exact rank on preimages
        MinimaReport rep;
        rep.search_radius = radius;
        std::vector<std::vector<Int>> picked;
        for (auto& h : hits) {
            std::vector<Int> row(h.c.begin(), h.c.end());
            auto trial = picked;
            trial.push_back(row);
            if (int_rank(trial) == trial.size()) {
                picked = std::move(trial);
                rep.lambdas.push_back(std::sqrt(h.norm2));
                rep.vectors.push_back(h.c);
                if (rep.lambdas.size() == k) return rep;
            }
        }
        radius *= 1.6;
    }
    throw BudgetExceeded("successive_minima: radius growth did not terminate",
                         last_complete_empty);
}

}  // namespace diophlab

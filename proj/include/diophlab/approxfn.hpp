#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diophlab/rat.hpp"

namespace diophlab {

// Non-increasing approximation function N -> (0,1), stored either as a step
// table (value constant on (q_{j-1}, q_j], tail beyond the last breakpoint)
// or as the closed-form family q -> C * q^-a * log(q+1)^-b.
class ApproxFunction {
  public:
    struct Family {
        double C, a, b;
    };

    ApproxFunction() : tail_(0.5) {}

    static ApproxFunction constant(double v) {
        ApproxFunction f;
        f.tail_ = v;
        f.check_step();
        return f;
    }

    static ApproxFunction steps(std::vector<std::pair<std::int64_t, double>> bp, double tail) {
        ApproxFunction f;
        f.breakpoints_ = std::move(bp);
        f.tail_ = tail;
        f.check_step();
        return f;
    }

    // q -> C * q^-a * (log(q+1))^-b
    static ApproxFunction family(double C, double a, double b) {
        ApproxFunction f;
        f.family_ = Family{C, a, b};
        return f;
    }

    static ApproxFunction power(double a) { return family(1.0, a, 0.0); }

    double eval(std::int64_t q) const {
        if (q < 1) throw std::invalid_argument("ApproxFunction: q must be >= 1");
        if (family_) {
            return family_->C * std::pow(static_cast<double>(q), -family_->a) *
                   std::pow(std::log(static_cast<double>(q) + 1.0), -family_->b);
        }
        for (const auto& [bq, v] : breakpoints_)
            if (q <= bq) return v;
        return tail_;
    }

    double operator()(std::int64_t q) const { return eval(q); }

    bool has_family() const { return family_.has_value(); }
    const std::optional<Family>& family_params() const { return family_; }
    const std::vector<std::pair<std::int64_t, double>>& breakpoints() const { return breakpoints_; }
    double tail() const { return tail_; }

    // step/family agreement and range check, scanning breakpoints (or a
    // horizon prefix for families)
    bool values_in_unit_interval(std::int64_t horizon = 64) const {
        if (family_) {
            for (std::int64_t q = 1; q <= horizon; ++q) {
                double v = eval(q);
                if (!(v > 0.0 && v < 1.0)) return false;
            }
            return true;
        }
        for (const auto& [bq, v] : breakpoints_)
            if (!(v > 0.0 && v < 1.0)) return false;
        return tail_ > 0.0 && tail_ < 1.0;
    }

    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        if (family_) {
            os << "family " << family_->C << " " << family_->a << " " << family_->b << "\n";
            return os.str();
        }
        for (const auto& [q, v] : breakpoints_) os << q << "," << v << "\n";
        os << "tail " << tail_ << "\n";
        return os.str();
    }

    static ApproxFunction parse(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        std::vector<std::pair<std::int64_t, double>> bp;
        double tail = -1;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string head;
            ls >> head;
            if (head == "family") {
                double C, a, b;
                ls >> C >> a >> b;
                return family(C, a, b);
            }
            if (head == "const") {
                double v;
                ls >> v;
                return constant(v);
            }
            if (head == "tail") {
                ls >> tail;
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos) throw ConfigError("bad approx function line: " + line);
            bp.emplace_back(std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        }
        if (tail < 0) throw ConfigError("approx function table missing tail line");
        return steps(std::move(bp), tail);
    }

  private:
    void check_step() const {
        double prev = 2.0;
        std::int64_t prev_q = 0;
        for (const auto& [q, v] : breakpoints_) {
            if (q <= prev_q) throw ConfigError("ApproxFunction: breakpoints not increasing");
            if (v > prev) throw ConfigError("ApproxFunction: values not non-increasing");
            if (!(v > 0.0 && v < 1.0)) throw ConfigError("ApproxFunction: value outside (0,1)");
            prev = v;
            prev_q = q;
        }
        if (tail_ > prev || !(tail_ > 0.0 && tail_ < 1.0))
            throw ConfigError("ApproxFunction: bad tail value");
    }

    std::vector<std::pair<std::int64_t, double>> breakpoints_;
    double tail_;
    std::optional<Family> family_;
};

struct WeightSystem {
    std::size_t n;
    std::vector<ApproxFunction> psis;

    WeightSystem(std::initializer_list<ApproxFunction> fs) : n(fs.size()), psis(fs) {}
    explicit WeightSystem(std::vector<ApproxFunction> fs) : n(fs.size()), psis(std::move(fs)) {}

    double product_at(std::int64_t q) const {
        double p = 1.0;
        for (const auto& f : psis) p *= f(q);
        return p;
    }
};

inline bool check_chain(const WeightSystem& ws, std::int64_t horizon) {
    for (std::int64_t q = 1; q <= horizon; ++q)
        for (std::size_t i = 0; i + 1 < ws.n; ++i)
            if (ws.psis[i](q) > ws.psis[i + 1](q)) return false;
    return true;
}

// --- permutation splitting ------------------------------------------------

struct PermutationSplit {
    // each entry: the sorting order pi (indices of psis, ascending by value,
    // ties by index) together with its q-sequence and the derived step
    // functions psi^pi_i
    struct Part {
        std::vector<std::size_t> pi;          // pi[0] = index of smallest value
        std::vector<std::int64_t> sequence;   // strictly increasing q's
        std::vector<ApproxFunction> derived;  // psi^pi_i, i = 0..n-1
    };
    std::vector<Part> parts;
    std::int64_t horizon = 0;
};

inline PermutationSplit permutation_split(const WeightSystem& ws, std::int64_t horizon) {
    std::map<std::vector<std::size_t>, std::vector<std::int64_t>> buckets;
    for (std::int64_t q = 1; q <= horizon; ++q) {
        std::vector<std::size_t> order(ws.n);
        for (std::size_t i = 0; i < ws.n; ++i) order[i] = i;
        std::vector<double> vals(ws.n);
        for (std::size_t i = 0; i < ws.n; ++i) vals[i] = ws.psis[i](q);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        buckets[order].push_back(q);
    }
    PermutationSplit out;
    out.horizon = horizon;
    for (auto& [pi, seq] : buckets) {
        PermutationSplit::Part part;
        part.pi = pi;
        part.sequence = seq;
        for (std::size_t i = 0; i < ws.n; ++i) {
            std::vector<std::pair<std::int64_t, double>> bp;
            for (std::int64_t qk : seq) bp.emplace_back(qk, ws.psis[i](qk));
            double tail = bp.empty() ? ws.psis[i](horizon) : bp.back().second;
            part.derived.push_back(ApproxFunction::steps(std::move(bp), tail));
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

// --- regularization (chain-preserving product lift) -------------------------

struct RegularizeResult {
    WeightSystem regularized;
    // first q at which prod psi'_i(q) equals max{prod psi_i(q), Phi(q)}; the
    // product identity is only guaranteed from here on (the base value at
    // q = 1 is copied verbatim and may sit below Phi(1))
    std::int64_t q_star = -1;
    std::vector<int> case_fired;  // per q >= 2: which induction case produced it
    bool used_bisection = false;
};

namespace detail {

// product along the segment A -> B is continuous and non-decreasing when
// A <= B coordinate-wise and A > 0; bisect to relative tolerance 1e-12
inline std::vector<double> segment_product_solve(const std::vector<double>& A,
                                                 const std::vector<double>& B, double target) {
    auto point = [&](double th) {
        std::vector<double> p(A.size());
        for (std::size_t i = 0; i < A.size(); ++i) p[i] = A[i] + th * (B[i] - A[i]);
        return p;
    };
    auto prod = [&](double th) {
        double pr = 1.0;
        for (double v : point(th)) pr *= v;
        return pr;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (prod(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    double th = 0.5 * (lo + hi);
    // polish once against relative tolerance
    double p = prod(th);
    if (p > 0 && std::fabs(p - target) / target > 1e-12) {
        for (int it = 0; it < 100 && std::fabs(prod(th) - target) / target > 1e-12; ++it) {
            if (prod(th) < target)
                lo = th;
            else
                hi = th;
            th = 0.5 * (lo + hi);
        }
    }
    return point(th);
}

}  // namespace detail

inline RegularizeResult regularize_psi(const WeightSystem& ws, const ApproxFunction& phi,
                                       std::int64_t horizon) {
    if (!check_chain(ws, horizon))
        throw std::invalid_argument("regularize_psi: weight system violates chain condition");
    std::size_t n = ws.n;
    RegularizeResult out{ws, -1, {}, false};

    if (n == 1) {
        // single function: the lift is just the pointwise max
        std::vector<std::pair<std::int64_t, double>> bp;
        for (std::int64_t q = 1; q <= horizon; ++q)
            bp.emplace_back(q, std::max(ws.psis[0](q), phi(q)));
        double tail = bp.back().second;
        out.regularized = WeightSystem({ApproxFunction::steps(std::move(bp), tail)});
        out.q_star = 1;
        return out;
    }

    std::vector<std::vector<double>> table(horizon + 1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) table[1][i] = ws.psis[i](1);

    auto prod_of = [&](const std::vector<double>& v) {
        double p = 1.0;
        for (double x : v) p *= x;
        return p;
    };
    auto note_equality = [&](std::int64_t q) {
        if (out.q_star >= 0) return;
        double target = std::max(ws.product_at(q), phi(q));
        double got = prod_of(table[q]);
        if (std::fabs(got - target) <= 1e-9 * target) out.q_star = q;
    };
    note_equality(1);

    for (std::int64_t q = 1; q < horizon; ++q) {
        double delta0 = prod_of(table[q]);
        double delta1 = ws.product_at(q + 1);
        double delta2 = phi(q + 1);
        std::vector<double> next(n);
        int fired;
        if (delta0 <= std::max(delta1, delta2)) {
            next = table[q];
            fired = 1;
        } else if (delta1 >= delta2) {
            for (std::size_t i = 0; i < n; ++i) next[i] = ws.psis[i](q + 1);
            fired = 2;
        } else {
            std::vector<double> A(n);
            for (std::size_t i = 0; i < n; ++i) A[i] = ws.psis[i](q + 1);
            next = detail::segment_product_solve(A, table[q], delta2);
            out.used_bisection = true;
            fired = 3;
        }
        table[q + 1] = next;
        out.case_fired.push_back(fired);
        note_equality(q + 1);
    }

    std::vector<ApproxFunction> lifted;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::int64_t, double>> bp;
        for (std::int64_t q = 1; q <= horizon; ++q) bp.emplace_back(q, table[q][i]);
        lifted.push_back(ApproxFunction::steps(std::move(bp), table[horizon][i]));
    }
    out.regularized = WeightSystem(std::move(lifted));
    return out;
}

// --- series partial sums ----------------------------------------------------

enum class SumMode { plain, dyadic, log_weighted };

inline double partial_sum_series(const WeightSystem& ws, std::int64_t Q, SumMode mode) {
    if (Q < 1) throw std::invalid_argument("partial_sum_series: Q >= 1 required");
    double s = 0.0;
    switch (mode) {
        case SumMode::plain:
            for (std::int64_t q = 1; q <= Q; ++q) s += ws.product_at(q);
            break;
        case SumMode::dyadic:
            for (std::int64_t t = 0; (std::int64_t{1} << t) <= Q; ++t) {
                std::int64_t q = std::int64_t{1} << t;
                s += static_cast<double>(q) * ws.product_at(q);
            }
            break;
        case SumMode::log_weighted:
            for (std::int64_t q = 1; q <= Q; ++q)
                s += ws.psis[0](q) *
                     std::pow(std::log(static_cast<double>(q)), static_cast<double>(ws.n - 1));
            break;
    }
    return s;
}

// --- divergence schedule ------------------------------------------------------

struct DivergenceSchedule {
    double s_prime = 0.0;
    double s = 0.0;  // derived exponent (n-1)s'/n
    std::vector<std::int64_t> t_list;
    std::vector<bool> in_t1;              // dyadic product < 1 at 2^t
    std::vector<bool> tail_bound_holds;   // 2^t psi_2..psi_n(2^t) > 2^{st}
    bool empty_warning = false;
};

inline DivergenceSchedule divergence_schedule(const WeightSystem& ws, double s_prime,
                                              std::int64_t t_max) {
    if (ws.n < 2) throw std::invalid_argument("divergence_schedule: needs n >= 2");
    double slack = 1.0 / static_cast<double>(ws.n - 1);
    if (!(s_prime > 0.0 && s_prime < slack))
        throw std::invalid_argument("divergence_schedule: s' outside (0, 1/(n-1))");
    DivergenceSchedule out;
    out.s_prime = s_prime;
    out.s = (static_cast<double>(ws.n - 1) / static_cast<double>(ws.n)) * s_prime;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        double q = std::pow(2.0, static_cast<double>(t));
        std::int64_t qi = std::int64_t{1} << t;
        double prod = ws.product_at(qi);
        if (!(prod * q > std::pow(q, -(slack - s_prime)))) continue;
        out.t_list.push_back(t);
        out.in_t1.push_back(q * prod < 1.0);
        double tailprod = 1.0;
        for (std::size_t i = 1; i < ws.n; ++i) tailprod *= ws.psis[i](qi);
        out.tail_bound_holds.push_back(q * tailprod > std::pow(2.0, out.s * static_cast<double>(t)));
    }
    out.empty_warning = out.t_list.empty();
    return out;
}

}  // namespace diophlab

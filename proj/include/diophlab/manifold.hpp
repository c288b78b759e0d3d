#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "diophlab/matrix.hpp"
#include "diophlab/rat.hpp"
#include "diophlab/rng.hpp"

namespace diophlab {

// Multivariate polynomial with exact rational coefficients.
class Poly {
  public:
    struct Term {
        Rat coeff;
        std::vector<int> exps;
    };

    Poly() = default;
    explicit Poly(std::size_t nvars) : nvars_(nvars) {}

    static Poly monomial(std::size_t nvars, const Rat& c, std::vector<int> exps) {
        Poly p(nvars);
        p.add_term(c, std::move(exps));
        return p;
    }

    void add_term(const Rat& c, std::vector<int> exps) {
        if (c == 0) return;
        exps.resize(nvars_, 0);
        for (auto& t : terms_)
            if (t.exps == exps) {
                t.coeff += c;
                return;
            }
        terms_.push_back({c, std::move(exps)});
    }

    std::size_t nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }

    template <class T>
    T eval(const std::vector<T>& x) const {
        T acc(0);
        for (const auto& t : terms_) {
            T m = coeff_as<T>(t.coeff);
            for (std::size_t i = 0; i < nvars_; ++i)
                for (int e = 0; e < t.exps[i]; ++e) m *= x[i];
            acc += m;
        }
        return acc;
    }

    Poly derivative(std::size_t var) const {
        Poly d(nvars_);
        for (const auto& t : terms_) {
            if (t.exps[var] == 0) continue;
            auto e = t.exps;
            Rat c = t.coeff * e[var];
            e[var] -= 1;
            d.add_term(c, e);
        }
        return d;
    }

    // sup over the box of |p| via coefficient bound: sum |c| * max |x^e|
    double sup_bound(const std::vector<double>& lo, const std::vector<double>& hi) const {
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = std::fabs(to_double(t.coeff));
            for (std::size_t i = 0; i < nvars_; ++i) {
                double a = std::max(std::fabs(lo[i]), std::fabs(hi[i]));
                for (int e = 0; e < t.exps[i]; ++e) m *= a;
            }
            s += m;
        }
        return s;
    }

    // naive interval range over a box (outer enclosure)
    std::pair<double, double> range(const std::vector<double>& lo,
                                    const std::vector<double>& hi) const {
        double rlo = 0.0, rhi = 0.0;
        for (const auto& t : terms_) {
            double mlo = to_double(t.coeff), mhi = mlo;
            for (std::size_t i = 0; i < nvars_; ++i)
                for (int e = 0; e < t.exps[i]; ++e) {
                    double c1 = mlo * lo[i], c2 = mlo * hi[i], c3 = mhi * lo[i], c4 = mhi * hi[i];
                    mlo = std::min(std::min(c1, c2), std::min(c3, c4));
                    mhi = std::max(std::max(c1, c2), std::max(c3, c4));
                }
            rlo += mlo;
            rhi += mhi;
        }
        return {rlo, rhi};
    }

    bool depends_only_on_first(std::size_t k) const {
        for (const auto& t : terms_)
            for (std::size_t i = k; i < nvars_; ++i)
                if (t.exps[i] != 0) return false;
        return true;
    }

  private:
    template <class T>
    static T coeff_as(const Rat& c) {
        if constexpr (std::is_same_v<T, double>)
            return to_double(c);
        else
            return T(c);
    }

    std::size_t nvars_ = 0;
    std::vector<Term> terms_;
};

// Builtin analytic coordinate maps with closed-form first derivatives and a
// certified second-derivative bound (only double evaluation).
struct Builtin {
    enum Kind { circle_y, sphere_z } kind;
    std::size_t nvars;

    double eval(const std::vector<double>& x) const { return std::sqrt(slack(x)); }

    double derivative(std::size_t var, const std::vector<double>& x) const {
        return -x[var] / std::sqrt(slack(x));
    }

    // |d2 sqrt(1 - sum x_i^2)| <= 1 / s_min^{3/2} over the box
    double second_bound(const std::vector<double>& lo, const std::vector<double>& hi) const {
        double smin = 1.0;
        std::size_t active = kind == circle_y ? 1 : 2;
        for (std::size_t i = 0; i < active; ++i)
            smin -= std::max(lo[i] * lo[i], hi[i] * hi[i]);
        if (!(smin > 0)) throw std::domain_error("builtin chart: box not inside unit ball");
        return 1.0 / (smin * std::sqrt(smin));
    }

    std::pair<double, double> range(const std::vector<double>& lo,
                                    const std::vector<double>& hi) const {
        // sqrt(1 - sum x^2) is monotone in each |x_i|
        double smin = 1.0, smax = 1.0;
        std::size_t active = kind == circle_y ? 1 : 2;
        for (std::size_t i = 0; i < active; ++i) {
            smin -= std::max(lo[i] * lo[i], hi[i] * hi[i]);
            double near0 = (lo[i] <= 0.0 && hi[i] >= 0.0)
                               ? 0.0
                               : std::min(lo[i] * lo[i], hi[i] * hi[i]);
            smax -= near0;
        }
        if (!(smin > 0)) throw std::domain_error("builtin chart: box not inside unit ball");
        return {std::sqrt(smin), std::sqrt(smax)};
    }

  private:
    double slack(const std::vector<double>& x) const {
        double s = 1.0;
        std::size_t active = kind == circle_y ? 1 : 2;
        for (std::size_t i = 0; i < active; ++i) s -= x[i] * x[i];
        if (!(s > 0)) throw std::domain_error("builtin chart: point outside unit ball");
        return s;
    }
};

using CoordFn = std::variant<Poly, Builtin>;

struct DomainBox {
    std::vector<double> lo, hi;

    std::size_t dim() const { return lo.size(); }

    bool contains(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
        return true;
    }
};

// index bookkeeping for the block parametrization
// (x_1, g_1(x_1), x_2, g_2(x_1,x_2), ..., x_s, g_s(x)); coordinates 0-based
struct IndexLayout {
    std::size_t d = 0, m = 0, n = 0, s = 0;
    std::vector<std::size_t> dk, mk;
    std::vector<std::vector<std::size_t>> I_blocks, J_blocks;  // coordinate indices per block
    std::vector<std::size_t> I, J;                             // flattened, ascending

    static IndexLayout from_blocks(const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
        IndexLayout L;
        L.s = blocks.size();
        std::size_t pos = 0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            auto [dkk, mkk] = blocks[k];
            if (dkk == 0) throw ConfigError("IndexLayout: every independent block must be nonempty");
            if (mkk == 0 && k + 1 != blocks.size())
                throw ConfigError("IndexLayout: only the last dependent block may be empty");
            std::vector<std::size_t> ib, jb;
            for (std::size_t i = 0; i < dkk; ++i) ib.push_back(pos++);
            for (std::size_t j = 0; j < mkk; ++j) jb.push_back(pos++);
            L.I_blocks.push_back(ib);
            L.J_blocks.push_back(jb);
            L.dk.push_back(dkk);
            L.mk.push_back(mkk);
            L.d += dkk;
            L.m += mkk;
        }
        L.n = L.d + L.m;
        for (auto& b : L.I_blocks) L.I.insert(L.I.end(), b.begin(), b.end());
        for (auto& b : L.J_blocks) L.J.insert(L.J.end(), b.begin(), b.end());
        std::sort(L.J.begin(), L.J.end());
        return L;
    }

    // variables visible to block k: x_1..x_k, i.e. first prefix_d(k+1) of the d vars
    std::size_t prefix_d(std::size_t upto) const {
        std::size_t s2 = 0;
        for (std::size_t k = 0; k < upto; ++k) s2 += dk[k];
        return s2;
    }
};

class Chart {
  public:
    Chart(std::string name, std::vector<std::pair<std::size_t, std::size_t>> blocks,
          std::vector<std::vector<CoordFn>> fns, DomainBox domain, int nondeg_order)
        : name_(std::move(name)),
          layout_(IndexLayout::from_blocks(blocks)),
          fns_(std::move(fns)),
          domain_(std::move(domain)),
          nondeg_order_(nondeg_order) {
        if (fns_.size() != layout_.s) throw ConfigError("Chart: block count mismatch");
        exact_ = true;
        for (std::size_t k = 0; k < layout_.s; ++k) {
            if (fns_[k].size() != layout_.mk[k]) throw ConfigError("Chart: component count mismatch");
            std::size_t visible = layout_.prefix_d(k + 1);
            for (const auto& f : fns_[k]) {
                if (std::holds_alternative<Builtin>(f)) {
                    exact_ = false;
                } else if (!std::get<Poly>(f).depends_only_on_first(visible)) {
                    throw ConfigError("Chart: block map uses a later-block variable");
                }
            }
        }
        if (domain_.dim() != layout_.d) throw ConfigError("Chart: domain dim mismatch");
    }

    const std::string& name() const { return name_; }
    const IndexLayout& layout() const { return layout_; }
    const DomainBox& domain() const { return domain_; }
    std::size_t d() const { return layout_.d; }
    std::size_t m() const { return layout_.m; }
    std::size_t n() const { return layout_.n; }
    int nondeg_order() const { return nondeg_order_; }
    bool exact() const { return exact_; }
    bool monge() const { return layout_.s == 1; }

    // component function j of block k
    const CoordFn& fn(std::size_t k, std::size_t j) const { return fns_[k][j]; }

    template <class T>
    T component(std::size_t k, std::size_t j, const std::vector<T>& x) const {
        const CoordFn& f = fns_[k][j];
        if (std::holds_alternative<Poly>(f)) return std::get<Poly>(f).eval(x);
        if constexpr (std::is_same_v<T, double>)
            return std::get<Builtin>(f).eval(x);
        else
            throw std::domain_error("Chart: builtin map has no exact evaluation");
    }

    template <class T>
    T component_derivative(std::size_t k, std::size_t j, std::size_t var,
                           const std::vector<T>& x) const {
        const CoordFn& f = fns_[k][j];
        if (std::holds_alternative<Poly>(f)) return std::get<Poly>(f).derivative(var).eval(x);
        if constexpr (std::is_same_v<T, double>)
            return std::get<Builtin>(f).derivative(var, x);
        else
            throw std::domain_error("Chart: builtin map has no exact derivative");
    }

  private:
    std::string name_;
    IndexLayout layout_;
    std::vector<std::vector<CoordFn>> fns_;
    DomainBox domain_;
    int nondeg_order_;
    bool exact_;
};

// F(x) in the interleaved coordinate order of the layout
template <class T>
std::vector<T> eval_chart(const Chart& c, const std::vector<T>& x, bool check_domain = true) {
    if (x.size() != c.d()) throw std::invalid_argument("eval_chart: wrong point dimension");
    if (check_domain) {
        if constexpr (std::is_same_v<T, double>) {
            if (!c.domain().contains(x)) throw std::domain_error("eval_chart: point outside domain");
        } else {
            std::vector<double> xd(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) xd[i] = to_double(x[i]);
            if (!c.domain().contains(xd)) throw std::domain_error("eval_chart: point outside domain");
        }
    }
    const auto& L = c.layout();
    std::vector<T> y(c.n(), T(0));
    std::size_t xi = 0;
    for (std::size_t k = 0; k < L.s; ++k) {
        for (std::size_t i = 0; i < L.dk[k]; ++i) y[L.I_blocks[k][i]] = x[xi++];
        for (std::size_t j = 0; j < L.mk[k]; ++j) y[L.J_blocks[k][j]] = c.component(k, j, x);
    }
    return y;
}

// d x n first-derivative matrix; rows = directions, columns = coordinates
template <class T>
std::vector<std::vector<T>> chart_jacobian(const Chart& c, const std::vector<T>& x) {
    const auto& L = c.layout();
    std::vector<std::vector<T>> J(c.d(), std::vector<T>(c.n(), T(0)));
    for (std::size_t k = 0, xi = 0; k < L.s; ++k) {
        for (std::size_t i = 0; i < L.dk[k]; ++i, ++xi)
            J[xi][L.I_blocks[k][i]] = T(1);
        for (std::size_t j = 0; j < L.mk[k]; ++j)
            for (std::size_t v = 0; v < c.d(); ++v)
                J[v][L.J_blocks[k][j]] = c.component_derivative(k, j, v, x);
    }
    return J;
}

// certified sup of all second partials of the dependent components over the box
inline double second_order_bound(const Chart& c, const DomainBox& box) {
    double M = 0.0;
    for (std::size_t k = 0; k < c.layout().s; ++k)
        for (std::size_t j = 0; j < c.layout().mk[k]; ++j) {
            const CoordFn& f = c.fn(k, j);
            if (std::holds_alternative<Poly>(f)) {
                const Poly& p = std::get<Poly>(f);
                for (std::size_t a = 0; a < c.d(); ++a)
                    for (std::size_t b = a; b < c.d(); ++b)
                        M = std::max(M, p.derivative(a).derivative(b).sup_bound(box.lo, box.hi));
            } else {
                M = std::max(M, std::get<Builtin>(f).second_bound(box.lo, box.hi));
            }
        }
    return M;
}

struct RankCheckReport {
    std::size_t samples = 0;
    std::vector<std::vector<double>> rank_failures;      // points where rank < d
    std::vector<std::vector<double>> gradient_failures;  // points with a vanishing coordinate gradient
    bool affine_relation = false;  // exact linear relation among {1, y_1(x),...,y_n(x)}
    bool pass() const { return rank_failures.empty() && gradient_failures.empty(); }
};

namespace detail {

inline std::size_t double_rank(std::vector<std::vector<double>> rows, double tol = 1e-9) {
    std::size_t rank = 0;
    std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        for (std::size_t r = rank + 1; r < rows.size(); ++r)
            if (std::fabs(rows[r][c]) > std::fabs(rows[p][c])) p = r;
        if (std::fabs(rows[p][c]) < tol) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            double f = rows[r][c] / rows[rank][c];
            for (std::size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

inline RankCheckReport sample_rank_check(const Chart& c, std::size_t samples, std::uint64_t seed) {
    RankCheckReport rep;
    rep.samples = samples;
    CounterRng rng(seed, /*stream=*/7);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> x(c.d());
        for (std::size_t i = 0; i < c.d(); ++i)
            x[i] = rng.next_in(c.domain().lo[i], c.domain().hi[i]);
        auto J = chart_jacobian(c, x);
        if (detail::double_rank(J) != c.d()) rep.rank_failures.push_back(x);
        for (std::size_t col = 0; col < c.n(); ++col) {
            double norm = 0;
            for (std::size_t r = 0; r < c.d(); ++r) norm += J[r][col] * J[r][col];
            if (norm == 0.0) {
                rep.gradient_failures.push_back(x);
                break;
            }
        }
    }
    // exact affine-relation detector for polynomial charts: are
    // {1, y_1(x), ..., y_n(x)} linearly dependent over Q?
    if (c.exact()) {
        std::map<std::vector<int>, std::size_t> support;
        std::vector<Poly> coords;
        coords.push_back(Poly::monomial(c.d(), Rat(1), std::vector<int>(c.d(), 0)));
        const auto& L = c.layout();
        for (std::size_t k = 0, xi = 0; k < L.s; ++k) {
            for (std::size_t i = 0; i < L.dk[k]; ++i, ++xi) {
                std::vector<int> e(c.d(), 0);
                e[xi] = 1;
                coords.push_back(Poly::monomial(c.d(), Rat(1), e));
            }
            for (std::size_t j = 0; j < L.mk[k]; ++j) coords.push_back(std::get<Poly>(c.fn(k, j)));
        }
        for (const auto& p : coords)
            for (const auto& t : p.terms())
                if (!support.count(t.exps)) {
                    std::size_t id = support.size();
                    support[t.exps] = id;
                }
        std::vector<std::vector<Int>> rows;
        for (const auto& p : coords) {
            Int den = 1;
            for (const auto& t : p.terms()) den = lcm(den, denominator(t.coeff));
            std::vector<Int> row(support.size(), Int(0));
            for (const auto& t : p.terms())
                row[support[t.exps]] = numerator(t.coeff * Rat(den));
            rows.push_back(std::move(row));
        }
        rep.affine_relation = int_rank(rows) < rows.size();
    }
    return rep;
}

// --- builtin registry --------------------------------------------------------

inline Chart make_veronese(std::size_t n) {
    if (n < 2 || n > 6) throw ConfigError("veronese: n in 2..6");
    std::vector<CoordFn> fs;
    for (std::size_t j = 2; j <= n; ++j)
        fs.push_back(Poly::monomial(1, Rat(1), {static_cast<int>(j)}));
    return Chart("veronese" + std::to_string(n), {{1, n - 1}}, {fs}, {{0.0}, {1.0}}, 2);
}

inline Chart make_chart(const std::string& name) {
    if (name == "parabola")
        return Chart("parabola", {{1, 1}}, {{Poly::monomial(1, Rat(1), {2})}}, {{0.0}, {1.0}}, 2);
    if (name == "line")
        return Chart("line", {{1, 0}}, {{}}, {{0.0}, {2.0}}, 1);
    if (name.rfind("veronese", 0) == 0 && name.size() == 9)
        return make_veronese(static_cast<std::size_t>(name[8] - '0'));
    if (name == "circle")
        return Chart("circle", {{1, 1}}, {{Builtin{Builtin::circle_y, 1}}}, {{-0.9}, {0.9}}, 2);
    if (name == "cylinder")
        return Chart("cylinder", {{1, 1}, {1, 0}},
                     {{Builtin{Builtin::circle_y, 1}}, {}},
                     {{0.05, 0.0}, {0.95, 10.0}}, 2);
    if (name == "sphere")
        return Chart("sphere", {{2, 1}}, {{Builtin{Builtin::sphere_z, 2}}},
                     {{-0.55, -0.55}, {0.55, 0.55}}, 2);
    if (name == "degenerate_line")
        return Chart("degenerate_line", {{1, 1}}, {{Poly::monomial(1, Rat(1), {1})}},
                     {{0.0}, {1.0}}, 1);
    throw ConfigError("unknown chart: " + name);
}

// Chart definition file: "blocks d1 m1 [d2 m2 ...]", "domain lo hi [lo hi ...]",
// then per dependent coordinate either "poly" followed by "coeff e1 .. ed"
// term lines (rational coefficients as p/q), or "builtin <circle_y|sphere_z>".
inline Chart parse_chart_file(const std::string& text, const std::string& name = "custom") {
    std::istringstream is(text);
    std::string line;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    DomainBox box;
    std::vector<std::vector<CoordFn>> fns;
    Poly current(0);
    bool in_poly = false;
    std::size_t d_total = 0;
    auto flush_poly = [&]() {
        if (in_poly) {
            fns.back().push_back(current);
            in_poly = false;
        }
    };
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#') continue;
        if (head == "blocks") {
            std::size_t dk, mk;
            while (ls >> dk >> mk) blocks.emplace_back(dk, mk);
            for (auto& [dk2, mk2] : blocks) d_total += dk2;
            fns.assign(blocks.size(), {});
        } else if (head == "domain") {
            double lo, hi;
            while (ls >> lo >> hi) {
                box.lo.push_back(lo);
                box.hi.push_back(hi);
            }
        } else if (head == "block") {
            flush_poly();
            // subsequent poly/builtin lines append to this block
            std::size_t k;
            ls >> k;
            fns.resize(std::max(fns.size(), k + 1));
        } else if (head == "poly") {
            flush_poly();
            current = Poly(d_total);
            in_poly = true;
            if (fns.empty()) fns.emplace_back();
        } else if (head == "builtin") {
            flush_poly();
            std::string which;
            ls >> which;
            if (fns.empty()) fns.emplace_back();
            if (which == "circle_y")
                fns.back().push_back(Builtin{Builtin::circle_y, d_total});
            else if (which == "sphere_z")
                fns.back().push_back(Builtin{Builtin::sphere_z, d_total});
            else
                throw ConfigError("unknown builtin: " + which);
        } else {
            if (!in_poly) throw ConfigError("chart file: term line outside poly block: " + line);
            Rat c = parse_rat(head);
            std::vector<int> exps;
            int e;
            while (ls >> e) exps.push_back(e);
            current.add_term(c, exps);
        }
    }
    flush_poly();
    // assign dependent maps block by block in declaration order
    std::vector<std::vector<CoordFn>> per_block(blocks.size());
    std::size_t bi = 0;
    for (auto& group : fns)
        for (auto& f : group) {
            while (bi < blocks.size() && per_block[bi].size() == blocks[bi].second) ++bi;
            if (bi == blocks.size()) throw ConfigError("chart file: too many coordinate maps");
            per_block[bi].push_back(std::move(f));
        }
    return Chart(name, blocks, per_block, box, 2);
}

}  // namespace diophlab

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "diophlab/rat.hpp"

namespace diophlab {

constexpr std::size_t kMaxDim = 8;

// Dense square matrix over double or exact rationals, dim <= 8.
template <class T>
class Mat {
  public:
    Mat() = default;
    explicit Mat(std::size_t n) : n_(n), a_(n * n, T(0)) {
        if (n == 0 || n > kMaxDim) throw std::invalid_argument("Mat: dim out of range");
    }

    static Mat identity(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    // long Weyl element: antidiagonal permutation
    static Mat sigma(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, n - 1 - i) = T(1);
        return m;
    }

    static Mat diag(const std::vector<T>& d) {
        Mat m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t dim() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    bool operator==(const Mat& o) const { return n_ == o.n_ && a_ == o.a_; }

    Mat operator*(const Mat& o) const {
        Mat r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                const T& aik = (*this)(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    std::vector<T> operator*(const std::vector<T>& v) const {
        std::vector<T> r(n_, T(0));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Mat transpose() const {
        Mat r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    T det() const {
        Mat m = *this;
        T d(1);
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t p = c;
            while (p < n_ && m(p, c) == T(0)) ++p;
            if (p == n_) return T(0);
            if (p != c) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(m(p, j), m(c, j));
                d = -d;
            }
            d *= m(c, c);
            for (std::size_t r = c + 1; r < n_; ++r) {
                if (m(r, c) == T(0)) continue;
                T f = m(r, c) / m(c, c);
                for (std::size_t j = c; j < n_; ++j) m(r, j) -= f * m(c, j);
            }
        }
        return d;
    }

    Mat inverse() const {
        Mat m = *this;
        Mat inv = identity(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t p = pivot_row(m, c);
            if (p != c)
                for (std::size_t j = 0; j < n_; ++j) {
                    std::swap(m(p, j), m(c, j));
                    std::swap(inv(p, j), inv(c, j));
                }
            if (m(c, c) == T(0)) throw std::domain_error("Mat::inverse: singular matrix");
            T piv = m(c, c);
            for (std::size_t j = 0; j < n_; ++j) {
                m(c, j) /= piv;
                inv(c, j) /= piv;
            }
            for (std::size_t r = 0; r < n_; ++r) {
                if (r == c || m(r, c) == T(0)) continue;
                T f = m(r, c);
                for (std::size_t j = 0; j < n_; ++j) {
                    m(r, j) -= f * m(c, j);
                    inv(r, j) -= f * inv(c, j);
                }
            }
        }
        return inv;
    }

    std::vector<T> solve(std::vector<T> b) const {
        Mat m = *this;
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t p = pivot_row(m, c);
            if (p != c) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(m(p, j), m(c, j));
                std::swap(b[p], b[c]);
            }
            if (m(c, c) == T(0)) throw std::domain_error("Mat::solve: singular matrix");
            for (std::size_t r = c + 1; r < n_; ++r) {
                if (m(r, c) == T(0)) continue;
                T f = m(r, c) / m(c, c);
                for (std::size_t j = c; j < n_; ++j) m(r, j) -= f * m(c, j);
                b[r] -= f * b[c];
            }
        }
        std::vector<T> x(n_, T(0));
        for (std::size_t i = n_; i-- > 0;) {
            T s = b[i];
            for (std::size_t j = i + 1; j < n_; ++j) s -= m(i, j) * x[j];
            x[i] = s / m(i, i);
        }
        return x;
    }

  private:
    static std::size_t pivot_row(const Mat& m, std::size_t c) {
        if constexpr (std::is_same_v<T, double>) {
            std::size_t best = c;
            double mag = std::fabs(m(c, c));
            for (std::size_t r = c + 1; r < m.n_; ++r)
                if (std::fabs(m(r, c)) > mag) {
                    mag = std::fabs(m(r, c));
                    best = r;
                }
            return best;
        } else {
            for (std::size_t r = c; r < m.n_; ++r)
                if (m(r, c) != T(0)) return r;
            return c;
        }
    }

    std::size_t n_ = 0;
    std::vector<T> a_;
};

using MatD = Mat<double>;
using MatQ = Mat<Rat>;

// dual of g: sigma^-1 (g^T)^-1 sigma
template <class T>
Mat<T> dual_matrix(const Mat<T>& g) {
    Mat<T> s = Mat<T>::sigma(g.dim());
    return s * g.transpose().inverse() * s;
}

template <class T>
Mat<T> to_double_mat(const Mat<T>&);

inline MatD to_double_mat(const MatQ& m) {
    MatD r(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) r(i, j) = to_double(m(i, j));
    return r;
}

inline MatD to_double_mat(const MatD& m) { return m; }

// Rank of integer row vectors by fraction-free elimination, exact.
inline std::size_t int_rank(std::vector<std::vector<Int>> rows) {
    if (rows.empty()) return 0;
    std::size_t cols = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][c] == 0) continue;
            Int f1 = rows[rank][c], f2 = rows[r][c];
            for (std::size_t j = 0; j < cols; ++j) rows[r][j] = rows[r][j] * f1 - rows[rank][j] * f2;
        }
        ++rank;
    }
    return rank;
}

}  // namespace diophlab

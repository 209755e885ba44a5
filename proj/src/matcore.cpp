#include "regulata/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace regulata {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << op << ": shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
           << b.cols();
        fail(ErrorCode::ShapeMismatch, os.str());
    }
}

void require_square(const Matrix& a, const char* op) {
    if (!a.is_square()) {
        fail(ErrorCode::ShapeMismatch, std::string(op) + ": matrix is not square");
    }
}

} // namespace

// --- Matrix ----------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            fail(ErrorCode::ShapeMismatch, "Matrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

Matrix Matrix::row(std::span<const double> v) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::max_abs() const noexcept {
    double s = 0.0;
    for (double x : data_) s = std::max(s, std::abs(x));
    return s;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) {
        fail(ErrorCode::ShapeMismatch, "operator*: inner dimensions differ");
    }
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

Vector operator*(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size()) {
        fail(ErrorCode::ShapeMismatch, "matrix-vector product: dimension mismatch");
    }
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Matrix matrix_power(const Matrix& a, unsigned exponent) {
    require_square(a, "matrix_power");
    Matrix result = Matrix::identity(a.rows());
    for (unsigned k = 0; k < exponent; ++k) result = result * a;
    return result;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "dot: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double Spectrum::max_real_part() const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) m = std::max(m, z.real());
    return m;
}

// --- structural matrices ---------------------------------------------------

Matrix companion(const CoeffVector& a) {
    const std::size_t n = a.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "companion: empty coefficient vector");
    Matrix phi(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) phi(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < n; ++j) phi(n - 1, j) = -a[j];
    return phi;
}

InternalModelMatrices internal_model_matrices(std::span<const double> m, double hurwitz_margin) {
    if (m.empty() || m.size() % 2 != 0) {
        fail(ErrorCode::InvalidArgument, "internal_model_matrices: need 2n coefficients");
    }
    InternalModelMatrices out;
    out.M = companion(CoeffVector(Vector(m.begin(), m.end())));
    out.N = Matrix(m.size(), 1);
    out.N(m.size() - 1, 0) = 1.0;
    out.spectrum = eigenvalues(out.M);
    out.hurwitz = out.spectrum.max_real_part() < -hurwitz_margin;
    if (!out.hurwitz) {
        std::ostringstream os;
        os << "internal model matrix M is not Hurwitz (max real part "
           << out.spectrum.max_real_part() << ", margin " << hurwitz_margin << ")";
        fail(ErrorCode::HurwitzViolation, os.str());
    }
    return out;
}

Matrix gamma_row(std::size_t n) {
    Matrix g(1, n);
    g(0, 0) = 1.0;
    return g;
}

Matrix xi_matrix_unchecked(const CoeffVector& a, std::span<const double> m) {
    const std::size_t n = a.size();
    if (m.size() != 2 * n) {
        fail(ErrorCode::ShapeMismatch, "xi_matrix: m must have 2n entries");
    }
    const Matrix phi = companion(a);
    // Horner: Xi = (...((Phi + m_2n I) Phi + m_2n-1 I) Phi + ...) + m_1 I
    Matrix xi = Matrix::identity(n);
    for (std::size_t j = 2 * n; j-- > 0;) {
        xi = xi * phi;
        for (std::size_t i = 0; i < n; ++i) xi(i, i) += m[j];
    }
    return xi;
}

Matrix xi_matrix(const CoeffVector& a, std::span<const double> m, double cond_cap) {
    Matrix xi = xi_matrix_unchecked(a, m);
    const double cond = condition_number(xi);
    if (!(cond <= cond_cap)) {
        std::ostringstream os;
        os << "Xi(a) is singular to working precision (condition number " << cond << ")";
        fail(ErrorCode::SingularXi, os.str());
    }
    return xi;
}

Matrix hankel(std::span<const double> theta) {
    if (theta.size() < 2 || theta.size() % 2 != 0) {
        fail(ErrorCode::InvalidArgument, "hankel: theta must have 2n entries, n >= 1");
    }
    const std::size_t n = theta.size() / 2;
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = theta[i + j];
    return h;
}

Matrix solve_generalized_sylvester(const Matrix& M, const Matrix& Phi, const Matrix& N,
                                   const Matrix& Gamma) {
    require_square(M, "solve_generalized_sylvester(M)");
    require_square(Phi, "solve_generalized_sylvester(Phi)");
    const std::size_t p = M.rows();
    const std::size_t n = Phi.rows();
    if (N.rows() != p || N.cols() != 1 || Gamma.rows() != 1 || Gamma.cols() != n) {
        fail(ErrorCode::ShapeMismatch, "solve_generalized_sylvester: N must be px1, Gamma 1xn");
    }
    const Matrix lhs = kron(Matrix::identity(n), M) - kron(Phi.transpose(), Matrix::identity(p));
    Vector rhs = vec(N * Gamma);
    for (double& x : rhs) x = -x;
    LuFactorization lu(lhs);
    if (lu.singular()) {
        fail(ErrorCode::NoUniqueSolution,
             "generalized Sylvester equation: spectra of M and Phi intersect");
    }
    return unvec(lu.solve(rhs), p, n);
}

Matrix sylvester_rows(const CoeffVector& a, std::span<const double> m) {
    const std::size_t n = a.size();
    const Matrix phi = companion(a);
    const Matrix g_xi_inv = gamma_row(n) * inverse(xi_matrix(a, m));
    Matrix q(2 * n, n);
    Matrix row = g_xi_inv;
    for (std::size_t j = 0; j < 2 * n; ++j) {
        for (std::size_t c = 0; c < n; ++c) q(j, c) = row(0, c);
        row = row * phi;
    }
    return q;
}

// --- Kronecker / vec -------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double s = a(i, j);
            if (s == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
        }
    return out;
}

Vector vec(const Matrix& a) {
    Vector v;
    v.reserve(a.rows() * a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r) v.push_back(a(r, c));
    return v;
}

Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) fail(ErrorCode::ShapeMismatch, "unvec: length mismatch");
    Matrix a(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) a(r, c) = v[c * rows + r];
    return a;
}

// --- solvers ---------------------------------------------------------------

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
    require_square(lu_, "LuFactorization");
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double scale = std::max(lu_.max_abs(), std::numeric_limits<double>::min());
    const double tiny = scale * static_cast<double>(n) * std::numeric_limits<double>::epsilon();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
        if (std::abs(lu_(piv, k)) <= tiny) {
            singular_ = true;
            return;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector LuFactorization::solve(std::span<const double> b) const {
    if (singular_) fail(ErrorCode::Singular, "LU solve on a singular matrix");
    const std::size_t n = lu_.rows();
    if (b.size() != n) fail(ErrorCode::ShapeMismatch, "LU solve: rhs length mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Vector solve(const Matrix& a, std::span<const double> b) {
    LuFactorization lu(a);
    if (lu.singular()) fail(ErrorCode::Singular, "solve: matrix is singular");
    return lu.solve(b);
}

Matrix solve(const Matrix& a, const Matrix& b) {
    LuFactorization lu(a);
    if (lu.singular()) fail(ErrorCode::Singular, "solve: matrix is singular");
    Matrix x(a.cols(), b.cols());
    Vector col(b.rows());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
        const Vector xc = lu.solve(col);
        for (std::size_t r = 0; r < xc.size(); ++r) x(r, c) = xc[r];
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    require_square(a, "inverse");
    return solve(a, Matrix::identity(a.rows()));
}

Vector singular_values(const Matrix& a) {
    // One-sided Jacobi on the columns of a (or of a^T when wide).
    Matrix u = a.rows() >= a.cols() ? a : a.transpose();
    const std::size_t m = u.rows();
    const std::size_t n = u.cols();
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
            }
        if (!rotated) break;
    }
    Vector sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += u(i, j) * u(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double condition_number(const Matrix& a) {
    const Vector sv = singular_values(a);
    if (sv.empty()) return std::numeric_limits<double>::infinity();
    if (!(sv.back() > 0.0)) return std::numeric_limits<double>::infinity();
    return sv.front() / sv.back();
}

namespace {

// Householder reduction to upper Hessenberg form (in place).
void reduce_to_hessenberg(Matrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    Vector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += h(i, k) * h(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (h(k + 1, k) > 0) alpha = -alpha;
        std::fill(v.begin(), v.end(), 0.0);
        v[k + 1] = h(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        // H <- (I - 2vv^T/v^Tv) H (I - 2vv^T/v^Tv)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
            s = 2.0 * s / vnorm2;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s = 2.0 * s / vnorm2;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

// Balancing (Parlett-Reinsch) improves accuracy on badly scaled companions.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Francis double-shift QR on an upper Hessenberg matrix.
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    auto A = [&a](int i, int j) -> double& {
        return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

    const double eps = std::numeric_limits<double>::epsilon();
    int nn = n - 1;
    double t = 0.0;
    int total_iterations = 0;
    const int max_total = 60 * std::max(n, 1);
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(A(l, l - 1)) <= eps * s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            const double x = A(nn, nn);
            if (l == nn) {
                out[static_cast<std::size_t>(nn)] = {x + t, 0.0};
                --nn;
                break;
            }
            const double y = A(nn - 1, nn - 1);
            const double w = A(nn, nn - 1) * A(nn - 1, nn);
            if (l == nn - 1) {
                const double p = 0.5 * (y - x);
                const double q = p * p + w;
                const double z = std::sqrt(std::abs(q));
                const double xs = x + t;
                if (q >= 0.0) {
                    const double zz = p + std::copysign(z, p);
                    double r1 = xs + zz;
                    double r2 = r1;
                    if (zz != 0.0) r2 = xs - w / zz;
                    out[static_cast<std::size_t>(nn - 1)] = {r1, 0.0};
                    out[static_cast<std::size_t>(nn)] = {r2, 0.0};
                } else {
                    out[static_cast<std::size_t>(nn - 1)] = {xs + p, z};
                    out[static_cast<std::size_t>(nn)] = {xs + p, -z};
                }
                nn -= 2;
                break;
            }
            if (++total_iterations > max_total) {
                fail(ErrorCode::ConvergenceFailure, "eigenvalues: QR iteration did not converge");
            }
            double xx = x, yy = y, ww = w;
            if (its == 10 || its == 20) {
                // exceptional shift
                t += xx;
                for (int i = 0; i <= nn; ++i) A(i, i) -= xx;
                const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
                yy = xx = 0.75 * s;
                ww = -0.4375 * s * s;
            }
            ++its;
            int m = nn - 2;
            double p = 0, q = 0, r = 0, z = 0;
            for (; m >= l; --m) {
                z = A(m, m);
                const double rr = xx - z;
                const double ss = yy - z;
                p = (rr * ss - ww) / A(m + 1, m) + A(m, m + 1);
                q = A(m + 1, m + 1) - z - rr - ss;
                r = A(m + 2, m + 1);
                const double s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
                const double v =
                    std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
                if (u <= eps * v) break;
            }
            for (int i = m; i < nn - 1; ++i) {
                A(i + 2, i) = 0.0;
                if (i != m) A(i + 2, i - 1) = 0.0;
            }
            for (int k = m; k < nn; ++k) {
                if (k != m) {
                    p = A(k, k - 1);
                    q = A(k + 1, k - 1);
                    r = 0.0;
                    if (k + 1 != nn) r = A(k + 2, k - 1);
                    xx = std::abs(p) + std::abs(q) + std::abs(r);
                    if (xx != 0.0) {
                        p /= xx;
                        q /= xx;
                        r /= xx;
                    }
                }
                const double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k == m) {
                    if (l != m) A(k, k - 1) = -A(k, k - 1);
                } else {
                    A(k, k - 1) = -s * xx;
                }
                p += s;
                xx = p / s;
                yy = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {
                    double pp = A(k, j) + q * A(k + 1, j);
                    if (k + 1 != nn) {
                        pp += r * A(k + 2, j);
                        A(k + 2, j) -= pp * z;
                    }
                    A(k + 1, j) -= pp * yy;
                    A(k, j) -= pp * xx;
                }
                const int mmin = nn < k + 3 ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {
                    double pp = xx * A(i, k) + yy * A(i, k + 1);
                    if (k + 1 != nn) {
                        pp += z * A(i, k + 2);
                        A(i, k + 2) -= pp * r;
                    }
                    A(i, k + 1) -= pp * q;
                    A(i, k) -= pp;
                }
            }
        } while (l < nn - 1);
    }
    return out;
}

} // namespace

Spectrum eigenvalues(const Matrix& a) {
    require_square(a, "eigenvalues");
    if (!a.all_finite()) fail(ErrorCode::InvalidArgument, "eigenvalues: non-finite entries");
    Matrix h = a;
    balance(h);
    reduce_to_hessenberg(h);
    Spectrum s;
    s.eigenvalues = hessenberg_qr(h);
    return s;
}

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::HurwitzViolation: return "HurwitzViolation";
    case ErrorCode::SingularXi: return "SingularXi";
    case ErrorCode::NoUniqueSolution: return "NoUniqueSolution";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ComplexPairingFailure: return "ComplexPairingFailure";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::VerificationFailure: return "VerificationFailure";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace regulata

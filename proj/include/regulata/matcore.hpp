#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "regulata/error.hpp"

namespace regulata {

using Vector = std::vector<double>;

/**
 * Dense real matrix, row-major storage.
 *
 * Sized for the structural objects of the regulator (companion, Hankel,
 * Kronecker systems); dimensions stay in the tens.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix column(std::span<const double> v);
    static Matrix row(std::span<const double> v);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(double s, Matrix m);
Vector operator*(const Matrix& m, std::span<const double> v);

Matrix matrix_power(const Matrix& a, unsigned exponent);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

/// Coefficients (a1..an) of s^n + a1 + a2 s + ... + an s^(n-1).
struct CoeffVector {
    Vector values;

    CoeffVector() = default;
    explicit CoeffVector(Vector v) : values(std::move(v)) {}
    CoeffVector(std::initializer_list<double> v) : values(v) {}

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    friend bool operator==(const CoeffVector&, const CoeffVector&) = default;
};

struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;

    [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] double max_real_part() const noexcept;
};

// --- structural matrices -------------------------------------------------

/// n x n companion matrix: superdiagonal identity, last row (-a1, ..., -an).
Matrix companion(const CoeffVector& a);

struct InternalModelMatrices {
    Matrix M;         // 2n x 2n companion of m
    Matrix N;         // 2n x 1, last entry 1
    Spectrum spectrum;
    bool hurwitz = false;
};

constexpr double kDefaultHurwitzMargin = 1e-9;
constexpr double kDefaultConditionCap = 1e12;

/// Builds (M, N) from m1..m2n. Throws HurwitzViolation when some eigenvalue
/// of M has real part >= -margin.
InternalModelMatrices internal_model_matrices(std::span<const double> m,
                                              double hurwitz_margin = kDefaultHurwitzMargin);

/// Gamma = [1 0 ... 0], 1 x n.
Matrix gamma_row(std::size_t n);

/// Xi(a) = Phi^(2n) + sum_j m_j Phi^(j-1). Throws SingularXi when its
/// condition number exceeds cond_cap.
Matrix xi_matrix(const CoeffVector& a, std::span<const double> m,
                 double cond_cap = kDefaultConditionCap);

/// Xi(a) without the conditioning check; used inside right-hand sides where
/// a transiently singular estimate must not abort the flow.
Matrix xi_matrix_unchecked(const CoeffVector& a, std::span<const double> m);

/// n x n Hankel matrix, (i, j) -> theta_(i+j), from a 2n-vector theta.
Matrix hankel(std::span<const double> theta);

/// Solves M Q = Q Phi - N Gamma for Q through the Kronecker form
/// (I (x) M - Phi^T (x) I) vec(Q) = -vec(N Gamma).
Matrix solve_generalized_sylvester(const Matrix& M, const Matrix& Phi, const Matrix& N,
                                   const Matrix& Gamma);

/// Q = col(Gamma Xi^-1 Phi^(j-1), j = 1..2n), the closed-form solution.
Matrix sylvester_rows(const CoeffVector& a, std::span<const double> m);

// --- Kronecker / vec calculus -------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
/// Column stacking.
Vector vec(const Matrix& a);
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);

// --- dense solvers and spectra ------------------------------------------

/// Gaussian elimination with partial pivoting. Throws Singular when a pivot
/// vanishes relative to the matrix scale.
Vector solve(const Matrix& a, std::span<const double> b);
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

/// LU factorization with partial pivoting kept for repeated solves.
class LuFactorization {
public:
    explicit LuFactorization(Matrix a);

    [[nodiscard]] bool singular() const noexcept { return singular_; }
    [[nodiscard]] Vector solve(std::span<const double> b) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

/// Singular values in descending order (one-sided Jacobi).
Vector singular_values(const Matrix& a);
/// sigma_max / sigma_min; +inf when sigma_min == 0.
double condition_number(const Matrix& a);

/// Full spectrum through Hessenberg reduction and shifted QR.
/// Throws ConvergenceFailure when the iteration cap is reached.
Spectrum eigenvalues(const Matrix& a);

} // namespace regulata

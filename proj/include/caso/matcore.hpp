#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace caso {

using Vector = std::vector<double>;

/// Number of scalar multiplications (divisions count as multiplications)
/// performed by an operation. Passed explicitly; never shared globally.
class MulCounter {
public:
    void add(std::uint64_t k) { count_ += k; }
    std::uint64_t count() const { return count_; }
    void reset() { count_ = 0; }

private:
    std::uint64_t count_ = 0;
};

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    /// Throws DimensionMismatch on ragged input.
    static DenseMatrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }

    DenseMatrix transposed() const;
    std::vector<Vector> to_rows() const;

    /// Largest absolute entry (0 for an empty matrix).
    double max_abs() const;
    bool all_finite() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Vector helpers. Counters are optional; when given, every scalar product
// is tallied.
double dot(std::span<const double> a, std::span<const double> b, MulCounter* counter = nullptr);
double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> v, double alpha);
bool all_finite(std::span<const double> v);

/// A·x
Vector multiply(const DenseMatrix& a, std::span<const double> x, MulCounter* counter = nullptr);
/// Aᵀ·x
Vector transpose_multiply(const DenseMatrix& a, std::span<const double> x,
                          MulCounter* counter = nullptr);
/// Plain O(n³) product.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b, MulCounter* counter = nullptr);

enum class StructureKind { Diagonal, Permutation, Band, Sparse };

const char* to_string(StructureKind kind);

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;

    bool operator==(const Triplet&) const = default;
};

/// Square nonsingular-candidate matrix stored as (row, col, value) triplets,
/// sorted row-major. The structural invariant of its kind is checked on
/// construction:
///   Diagonal     nonzeros exactly on (i, i)
///   Permutation  exactly one nonzero per row and per column
///   Band(w)      nonzeros only where |i - j| <= w
///   Sparse(c)    1..c nonzeros in every row and every column
class StructuredMatrix {
public:
    StructuredMatrix() = default;

    static StructuredMatrix diagonal(const Vector& values);
    /// Row i holds `values[i]` at column `column_of_row[i]`.
    static StructuredMatrix permutation(const std::vector<std::size_t>& column_of_row,
                                        const Vector& values);
    static StructuredMatrix band(std::size_t n, std::size_t halfwidth, std::vector<Triplet> entries);
    static StructuredMatrix sparse(std::size_t n, std::size_t cap, std::vector<Triplet> entries);
    /// Generic constructor; `parameter` is the half-bandwidth for Band, the
    /// per-row/column cap for Sparse, ignored otherwise.
    static StructuredMatrix from_triplets(StructureKind kind, std::size_t n, std::size_t parameter,
                                          std::vector<Triplet> entries);

    StructureKind kind() const { return kind_; }
    std::size_t dimension() const { return n_; }
    std::size_t parameter() const { return parameter_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }
    std::size_t max_row_nonzeros() const;

    DenseMatrix to_dense() const;
    /// K·v
    Vector multiply(std::span<const double> v, MulCounter* counter = nullptr) const;
    /// Kᵀ·v
    Vector transpose_multiply(std::span<const double> v, MulCounter* counter = nullptr) const;

    /// Nonzeros grouped by row: result[i] lists (col, value) of row i.
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_view() const;

    bool operator==(const StructuredMatrix&) const = default;

private:
    StructuredMatrix(StructureKind kind, std::size_t n, std::size_t parameter,
                     std::vector<Triplet> entries);
    void validate() const;

    StructureKind kind_ = StructureKind::Diagonal;
    std::size_t n_ = 0;
    std::size_t parameter_ = 0;
    std::vector<Triplet> entries_;
};

/// A·K touching only the nonzeros of K. Adds exactly rows(A)·nnz(K) to the
/// counter.
DenseMatrix mul_structured(const DenseMatrix& a, const StructuredMatrix& k, MulCounter& counter);

/// Relative pivot threshold below which a matrix is declared singular.
inline constexpr double kPivotThreshold = 1e-12;

/// Dense LU with partial pivoting.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);

    Vector solve(std::span<const double> b) const;
    double determinant() const;
    std::size_t dimension() const { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
};

/// Solves A·x = b. Throws SingularMatrix when a pivot is below
/// kPivotThreshold·max|A|.
Vector lu_solve(const DenseMatrix& a, std::span<const double> b);

/// Solves K·w = v exploiting structure: O(n) for diagonal and permutation,
/// banded LU for band keys, dense LU otherwise.
Vector structured_solve(const StructuredMatrix& k, std::span<const double> v);

}  // namespace caso

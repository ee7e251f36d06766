#include "caso/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "caso/errors.hpp"

namespace caso {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DimensionMismatch(what);
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<Vector>& rows) {
    DenseMatrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows.front().size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
        require(r.size() == m.cols_, "ragged matrix rows");
        m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<Vector> DenseMatrix::to_rows() const {
    std::vector<Vector> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool DenseMatrix::all_finite() const { return caso::all_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b, MulCounter* counter) {
    require(a.size() == b.size(), "dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    if (counter) counter->add(a.size());
    return s;
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Vector add(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "add: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "subtract: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scale(std::span<const double> v, double alpha) {
    Vector out(v.begin(), v.end());
    for (double& x : out) x *= alpha;
    return out;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector multiply(const DenseMatrix& a, std::span<const double> x, MulCounter* counter) {
    require(a.cols() == x.size(), "A·x: dimension mismatch");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
        out[i] = s;
    }
    if (counter) counter->add(a.rows() * a.cols());
    return out;
}

Vector transpose_multiply(const DenseMatrix& a, std::span<const double> x, MulCounter* counter) {
    require(a.rows() == x.size(), "Aᵀ·x: dimension mismatch");
    Vector out(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * x[i];
    }
    if (counter) counter->add(a.rows() * a.cols());
    return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b, MulCounter* counter) {
    require(a.cols() == b.rows(), "A·B: dimension mismatch");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            const auto br = b.row(k);
            for (std::size_t j = 0; j < br.size(); ++j) o[j] += aik * br[j];
        }
    }
    if (counter) counter->add(a.rows() * a.cols() * b.cols());
    return out;
}

const char* to_string(StructureKind kind) {
    switch (kind) {
        case StructureKind::Diagonal: return "diagonal";
        case StructureKind::Permutation: return "permutation";
        case StructureKind::Band: return "band";
        case StructureKind::Sparse: return "sparse";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// StructuredMatrix

StructuredMatrix::StructuredMatrix(StructureKind kind, std::size_t n, std::size_t parameter,
                                   std::vector<Triplet> entries)
    : kind_(kind), n_(n), parameter_(parameter), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Triplet& x, const Triplet& y) {
        return std::pair(x.row, x.col) < std::pair(y.row, y.col);
    });
    validate();
}

StructuredMatrix StructuredMatrix::diagonal(const Vector& values) {
    std::vector<Triplet> e;
    e.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) e.push_back({i, i, values[i]});
    return StructuredMatrix(StructureKind::Diagonal, values.size(), 0, std::move(e));
}

StructuredMatrix StructuredMatrix::permutation(const std::vector<std::size_t>& column_of_row,
                                               const Vector& values) {
    require(column_of_row.size() == values.size(), "permutation: length mismatch");
    std::vector<Triplet> e;
    e.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) e.push_back({i, column_of_row[i], values[i]});
    return StructuredMatrix(StructureKind::Permutation, values.size(), 0, std::move(e));
}

StructuredMatrix StructuredMatrix::band(std::size_t n, std::size_t halfwidth,
                                        std::vector<Triplet> entries) {
    return StructuredMatrix(StructureKind::Band, n, halfwidth, std::move(entries));
}

StructuredMatrix StructuredMatrix::sparse(std::size_t n, std::size_t cap,
                                          std::vector<Triplet> entries) {
    return StructuredMatrix(StructureKind::Sparse, n, cap, std::move(entries));
}

StructuredMatrix StructuredMatrix::from_triplets(StructureKind kind, std::size_t n,
                                                 std::size_t parameter,
                                                 std::vector<Triplet> entries) {
    if (kind == StructureKind::Diagonal || kind == StructureKind::Permutation) parameter = 0;
    return StructuredMatrix(kind, n, parameter, std::move(entries));
}

void StructuredMatrix::validate() const {
    auto fail = [&](const std::string& why) {
        throw InvalidArgument(std::string(to_string(kind_)) + " key matrix: " + why);
    };
    if (n_ == 0) fail("dimension must be positive");
    std::vector<std::size_t> row_count(n_, 0), col_count(n_, 0);
    for (std::size_t t = 0; t < entries_.size(); ++t) {
        const auto& e = entries_[t];
        if (e.row >= n_ || e.col >= n_) fail("index out of range");
        if (!std::isfinite(e.value) || e.value == 0.0) fail("stored entries must be finite and nonzero");
        if (t > 0 && entries_[t - 1].row == e.row && entries_[t - 1].col == e.col)
            fail("duplicate entry");
        ++row_count[e.row];
        ++col_count[e.col];
    }
    switch (kind_) {
        case StructureKind::Diagonal:
            if (entries_.size() != n_) fail("expected one entry per diagonal position");
            for (const auto& e : entries_)
                if (e.row != e.col) fail("off-diagonal entry");
            break;
        case StructureKind::Permutation:
            for (std::size_t i = 0; i < n_; ++i)
                if (row_count[i] != 1 || col_count[i] != 1)
                    fail("need exactly one nonzero per row and column");
            break;
        case StructureKind::Band:
            for (const auto& e : entries_) {
                const std::size_t d = e.row > e.col ? e.row - e.col : e.col - e.row;
                if (d > parameter_) fail("entry outside the band");
            }
            break;
        case StructureKind::Sparse:
            if (parameter_ == 0) fail("cap must be at least 1");
            for (std::size_t i = 0; i < n_; ++i) {
                if (row_count[i] == 0 || col_count[i] == 0) fail("empty row or column");
                if (row_count[i] > parameter_ || col_count[i] > parameter_)
                    fail("row or column exceeds the nonzero cap");
            }
            break;
    }
}

std::size_t StructuredMatrix::max_row_nonzeros() const {
    std::vector<std::size_t> count(n_, 0);
    for (const auto& e : entries_) ++count[e.row];
    return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

DenseMatrix StructuredMatrix::to_dense() const {
    DenseMatrix d(n_, n_);
    for (const auto& e : entries_) d(e.row, e.col) = e.value;
    return d;
}

Vector StructuredMatrix::multiply(std::span<const double> v, MulCounter* counter) const {
    require(v.size() == n_, "K·v: dimension mismatch");
    Vector out(n_, 0.0);
    for (const auto& e : entries_) out[e.row] += e.value * v[e.col];
    if (counter) counter->add(entries_.size());
    return out;
}

Vector StructuredMatrix::transpose_multiply(std::span<const double> v, MulCounter* counter) const {
    require(v.size() == n_, "Kᵀ·v: dimension mismatch");
    Vector out(n_, 0.0);
    for (const auto& e : entries_) out[e.col] += e.value * v[e.row];
    if (counter) counter->add(entries_.size());
    return out;
}

std::vector<std::vector<std::pair<std::size_t, double>>> StructuredMatrix::rows_view() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n_);
    for (const auto& e : entries_) rows[e.row].emplace_back(e.col, e.value);
    return rows;
}

DenseMatrix mul_structured(const DenseMatrix& a, const StructuredMatrix& k, MulCounter& counter) {
    require(a.cols() == k.dimension(), "A·K: A.cols must equal K.dimension");
    DenseMatrix out(a.rows(), k.dimension());
    const auto& entries = k.entries();
    // Row-outer order keeps the active rows of A and A·K in cache.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto src = a.row(i);
        auto dst = out.row(i);
        for (const auto& e : entries) dst[e.col] += src[e.row] * e.value;
    }
    counter.add(static_cast<std::uint64_t>(a.rows()) * entries.size());
    return out;
}

// ---------------------------------------------------------------------------
// LU

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
    if (!lu_.square()) throw DimensionMismatch("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    const double tol = kPivotThreshold * std::max(lu_.max_abs(), 1e-300);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > tol)) throw SingularMatrix("LU: pivot below threshold at column " + std::to_string(k));
        if (p != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
            std::swap(perm_[k], perm_[p]);
            sign_ = -sign_;
        }
        const double pivot = lu_(k, k);
        const auto pivot_row = lu_.row(k);
        for (std::size_t i = k + 1; i < n; ++i) {
            auto r = lu_.row(i);
            const double f = r[k] / pivot;
            r[k] = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) r[j] -= f * pivot_row[j];
        }
    }
}

Vector LuFactorization::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    require(b.size() == n, "LU solve: rhs length mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = lu_.row(i);
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        const auto r = lu_.row(i);
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= r[j] * x[j];
        x[i] = s / r[i];
    }
    return x;
}

double LuFactorization::determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> b) {
    require(a.square() && a.rows() == b.size(), "lu_solve: dimension mismatch");
    return LuFactorization(a).solve(b);
}

namespace {

// Banded Gaussian elimination with partial pivoting. Row i stores columns
// [i - w, i + 2w]; the extra w columns absorb fill from row swaps.
Vector band_solve(const StructuredMatrix& k, std::span<const double> v) {
    const std::size_t n = k.dimension();
    const std::size_t w = k.parameter();
    const std::size_t width = 3 * w + 1;
    std::vector<double> m(n * width, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * width + (j + w - i)]; };
    double scale = 0.0;
    for (const auto& e : k.entries()) {
        at(e.row, e.col) = e.value;
        scale = std::max(scale, std::abs(e.value));
    }
    const double tol = kPivotThreshold * scale;
    Vector rhs(v.begin(), v.end());

    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t last = std::min(n - 1, c + w);
        const std::size_t right = std::min(n - 1, c + 2 * w);
        std::size_t p = c;
        double best = std::abs(at(c, c));
        for (std::size_t i = c + 1; i <= last; ++i) {
            if (std::abs(at(i, c)) > best) {
                best = std::abs(at(i, c));
                p = i;
            }
        }
        if (!(best > tol)) throw SingularMatrix("banded LU: pivot below threshold");
        if (p != c) {
            for (std::size_t j = c; j <= right; ++j) std::swap(at(c, j), at(p, j));
            std::swap(rhs[c], rhs[p]);
        }
        const double pivot = at(c, c);
        for (std::size_t i = c + 1; i <= last; ++i) {
            const double f = at(i, c) / pivot;
            if (f == 0.0) continue;
            at(i, c) = 0.0;
            for (std::size_t j = c + 1; j <= right; ++j) at(i, j) -= f * at(c, j);
            rhs[i] -= f * rhs[c];
        }
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t right = std::min(n - 1, i + 2 * w);
        double s = rhs[i];
        for (std::size_t j = i + 1; j <= right; ++j) s -= at(i, j) * x[j];
        x[i] = s / at(i, i);
    }
    return x;
}

}  // namespace

Vector structured_solve(const StructuredMatrix& k, std::span<const double> v) {
    require(v.size() == k.dimension(), "structured_solve: dimension mismatch");
    const std::size_t n = k.dimension();
    switch (k.kind()) {
        case StructureKind::Diagonal: {
            Vector w(n);
            for (const auto& e : k.entries()) w[e.row] = v[e.row] / e.value;
            return w;
        }
        case StructureKind::Permutation: {
            Vector w(n);
            for (const auto& e : k.entries()) w[e.col] = v[e.row] / e.value;
            return w;
        }
        case StructureKind::Band:
            return band_solve(k, v);
        case StructureKind::Sparse:
            return lu_solve(k.to_dense(), v);
    }
    throw InvalidArgument("structured_solve: unknown structure");
}

}  // namespace caso

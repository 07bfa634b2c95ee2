#pragma once

/*
 * Dense complex matrix core used throughout the library: column-major
 * ComplexMatrix, triangle-backed HermitianMatrix, two-dimensional unitary
 * rotations and the small set of quadratic-form/norm operations the
 * null-space learning stack is built on. Sizes are tiny (antenna counts,
 * n <= 16), so everything is plain loops over std::complex<double>.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nslab {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into [-half_period, half_period).
inline double wrap_angle(double x, double half_period = kPi) {
  const double period = 2.0 * half_period;
  double y = std::fmod(x + half_period, period);
  if (y < 0) y += period;
  return y - half_period;
}

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a_[j * rows_ + i];
  }

  const std::vector<cplx>& data() const { return a_; }

  cvec col(std::size_t j) const {
    cvec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(std::size_t j, const cvec& v) {
    if (v.size() != rows_) throw std::invalid_argument("set_col: size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matmul: dim mismatch");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t j = 0; j < rhs.cols_; ++j)
      for (std::size_t k = 0; k < cols_; ++k) {
        const cplx b = rhs(k, j);
        if (b == cplx{}) continue;
        for (std::size_t i = 0; i < rows_; ++i) out(i, j) += (*this)(i, k) * b;
      }
    return out;
  }

  cvec operator*(const cvec& x) const {
    if (cols_ != x.size()) throw std::invalid_argument("matvec: dim mismatch");
    cvec y(rows_);
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx b = x[k];
      if (b == cplx{}) continue;
      for (std::size_t i = 0; i < rows_; ++i) y[i] += (*this)(i, k) * b;
    }
    return y;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (const cplx& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

inline cplx inner(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(const cvec& a) {
  double s = 0;
  for (const cplx& v : a) s += std::norm(v);
  return std::sqrt(s);
}

inline cvec scaled(const cvec& a, cplx c) {
  cvec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: dim mismatch");
  double m = 0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// ||M^* M - I||_F, the unitarity defect.
inline double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix g = m.adjoint() * m;
  double s = 0;
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < g.rows(); ++i) {
      cplx want = (i == j) ? cplx{1.0, 0.0} : cplx{};
      s += std::norm(g(i, j) - want);
    }
  return std::sqrt(s);
}

// Hermitian matrix backed by its real diagonal plus the strict upper
// triangle, so A = A^* cannot be violated by construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n)
      : n_(n), diag_(n, 0.0), upper_(n * (n - 1) / 2) {}

  static HermitianMatrix from_dense(const ComplexMatrix& a,
                                    double tol = 1e-10) {
    if (a.rows() != a.cols())
      throw std::invalid_argument("from_dense: not square");
    const std::size_t n = a.rows();
    const double scale = std::max(1.0, a.frobenius_norm());
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(a(i, i).imag()) > tol * scale)
        throw std::invalid_argument("from_dense: non-real diagonal");
      h.diag_[i] = a(i, i).real();
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale)
          throw std::invalid_argument("from_dense: not Hermitian");
        h.upper_[h.uidx(i, j)] = 0.5 * (a(i, j) + std::conj(a(j, i)));
      }
    }
    return h;
  }

  std::size_t order() const { return n_; }

  cplx at(std::size_t i, std::size_t j) const {
    if (i == j) return {diag_[i], 0.0};
    if (i < j) return upper_[uidx(i, j)];
    return std::conj(upper_[uidx(j, i)]);
  }

  double diag(std::size_t i) const { return diag_[i]; }
  void set_diag(std::size_t i, double v) { diag_[i] = v; }
  void set_upper(std::size_t i, std::size_t j, cplx v) {
    if (i >= j) throw std::invalid_argument("set_upper: need i < j");
    upper_[uidx(i, j)] = v;
  }

  ComplexMatrix to_dense() const {
    ComplexMatrix a(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) a(i, j) = at(i, j);
    return a;
  }

  double frobenius_norm() const {
    double s = 0;
    for (double d : diag_) s += d * d;
    for (const cplx& v : upper_) s += 2.0 * std::norm(v);
    return std::sqrt(s);
  }

 private:
  std::size_t uidx(std::size_t i, std::size_t j) const {
    // packed strict upper triangle, row-major
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> diag_;
  std::vector<cplx> upper_;
};

// One two-dimensional rotation. Indices are 1-based, 1 <= l < m <= n.
struct RotationParams {
  int l = 1;
  int m = 2;
  double theta = 0.0;  // in [-pi/2, pi/2]
  double phi = 0.0;    // in [-pi, pi]
};

inline void validate_rotation_indices(std::size_t n, const RotationParams& p) {
  if (p.l < 1 || p.m <= p.l || static_cast<std::size_t>(p.m) > n)
    throw std::out_of_range("rotation indices out of range");
}

// Unitary plane rotation: identity except
//   (l,l) = (m,m) = cos(theta),
//   (m,l) = e^{-i phi} sin(theta),
//   (l,m) = -e^{+i phi} sin(theta).
inline ComplexMatrix rotation_matrix(std::size_t n, const RotationParams& p) {
  validate_rotation_indices(n, p);
  const std::size_t l = static_cast<std::size_t>(p.l - 1);
  const std::size_t m = static_cast<std::size_t>(p.m - 1);
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const cplx ep = std::polar(1.0, p.phi);
  ComplexMatrix r = ComplexMatrix::identity(n);
  r(l, l) = c;
  r(m, m) = c;
  r(m, l) = std::conj(ep) * s;
  r(l, m) = -ep * s;
  return r;
}

// l-th column of rotation_matrix(W.cols(), {l,m,theta,phi}) applied on the
// right of W: cos(theta) w_l + e^{-i phi} sin(theta) w_m. This is the probe
// direction family the learning stack searches over.
inline cvec rotated_column(const ComplexMatrix& w, int l, int m, double theta,
                           double phi) {
  validate_rotation_indices(w.cols(), RotationParams{l, m, 0.0, 0.0});
  const std::size_t li = static_cast<std::size_t>(l - 1);
  const std::size_t mi = static_cast<std::size_t>(m - 1);
  const double c = std::cos(theta);
  const cplx s = std::polar(1.0, -phi) * std::sin(theta);
  cvec out(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i)
    out[i] = c * w(i, li) + s * w(i, mi);
  return out;
}

// In-place W <- W R_{l,m}(theta, phi); touches only columns l and m.
inline void apply_rotation_right(ComplexMatrix& w, const RotationParams& p) {
  validate_rotation_indices(w.cols(), p);
  const std::size_t l = static_cast<std::size_t>(p.l - 1);
  const std::size_t m = static_cast<std::size_t>(p.m - 1);
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const cplx ep = std::polar(1.0, p.phi);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const cplx wl = w(i, l), wm = w(i, m);
    w(i, l) = c * wl + std::conj(ep) * s * wm;
    w(i, m) = -ep * s * wl + c * wm;
  }
}

// G = H^* H. Result is Hermitian PSD with rank(G) = rank(H).
inline HermitianMatrix gram(const ComplexMatrix& h) {
  const std::size_t n = h.cols();
  HermitianMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0;
    for (std::size_t k = 0; k < h.rows(); ++k) d += std::norm(h(k, i));
    g.set_diag(i, d);
    for (std::size_t j = i + 1; j < n; ++j) {
      cplx v = 0;
      for (std::size_t k = 0; k < h.rows(); ++k)
        v += std::conj(h(k, i)) * h(k, j);
      g.set_upper(i, j, v);
    }
  }
  return g;
}

// Frobenius norm of the strict upper (== lower) triangle; zero iff diagonal.
inline double off_diag_norm(const HermitianMatrix& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = i + 1; j < a.order(); ++j) s += std::norm(a.at(i, j));
  return std::sqrt(s);
}

// S(A, x) = x^* A x; real for Hermitian A (the residual imaginary part is a
// rounding artifact and is discarded).
inline double quadratic_form(const HermitianMatrix& a, const cvec& x) {
  if (x.size() != a.order())
    throw std::invalid_argument("quadratic_form: dim mismatch");
  cplx s = 0;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j < a.order(); ++j)
      s += std::conj(x[i]) * a.at(i, j) * x[j];
  return s.real();
}

// JSON (de)serialization used by CLI fixtures:
// {"rows":r,"cols":c,"re":[...],"im":[...]} with row-major entry order.
inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(m.rows() * m.cols());
  im.reserve(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t jj = 0; jj < m.cols(); ++jj) {
      re.push_back(m(i, jj).real());
      im.push_back(m(i, jj).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw std::invalid_argument("matrix_from_json: entry count mismatch");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t jj = 0; jj < cols; ++jj)
      m(i, jj) = {re[i * cols + jj], im[i * cols + jj]};
  if (!m.all_finite()) throw std::invalid_argument("matrix_from_json: non-finite");
  return m;
}

}  // namespace nslab

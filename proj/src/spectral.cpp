#include "coop2/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "coop2/error.hpp"
#include "coop2/signvar.hpp"

namespace coop2::spectral {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

void reduce_to_hessenberg(Matrix& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    Vector v = h.block(k + 1, k, m, 1);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const double alpha = v(0) > 0.0 ? -xnorm : xnorm;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // H <- P H P with P = I - 2 v v^T acting on rows/cols k+1..n-1
    Eigen::RowVectorXd vt_h = v.transpose() * h.bottomRows(m);
    h.bottomRows(m).noalias() -= 2.0 * v * vt_h;
    Vector h_v = h.rightCols(m) * v;
    h.rightCols(m).noalias() -= 2.0 * h_v * v.transpose();
    h.block(k + 2, k, m - 1, 1).setZero();
    h(k + 1, k) = alpha;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (destroys h).
std::vector<Complex> hessenberg_qr(Matrix& h, int max_iterations) {
  const int n = static_cast<int>(h.rows());
  // 1-based view keeps the classic recurrences readable
  auto a = [&h](int i, int j) -> double& { return h(i - 1, j - 1); };
  std::vector<double> wr(n + 1, 0.0);
  std::vector<double> wi(n + 1, 0.0);

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
  }
  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == max_iterations) {
            throw Error(ErrorCode::NoConvergence,
                        "QR iteration exceeded " + std::to_string(max_iterations) +
                            " sweeps for one eigenvalue");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  std::vector<Complex> out(n);
  for (int i = 1; i <= n; ++i) out[i - 1] = {wr[i], wi[i]};
  return out;
}

void require_square(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
}

}  // namespace

OrderedSpectrum order_spectrum(const std::vector<Complex>& raw) {
  // Group conjugate pairs into single units so that sorting keeps them adjacent.
  struct Unit {
    double re;
    std::vector<int> members;
  };
  std::vector<Unit> units;
  std::vector<bool> used(raw.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (raw[i].imag() == 0.0) {
      units.push_back({raw[i].real(), {static_cast<int>(i)}});
      continue;
    }
    // nearest unused conjugate partner
    int partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      if (used[j] || raw[j].imag() == 0.0) continue;
      const double d = std::abs(raw[j] - std::conj(raw[i]));
      if (d < best) {
        best = d;
        partner = static_cast<int>(j);
      }
    }
    if (partner < 0) {
      units.push_back({raw[i].real(), {static_cast<int>(i)}});
      continue;
    }
    used[partner] = true;
    const int hi = raw[i].imag() > 0.0 ? static_cast<int>(i) : partner;
    const int lo = hi == static_cast<int>(i) ? partner : static_cast<int>(i);
    units.push_back({0.5 * (raw[i].real() + raw[partner].real()), {hi, lo}});
  }
  std::stable_sort(units.begin(), units.end(),
                   [](const Unit& l, const Unit& r) { return l.re > r.re; });
  OrderedSpectrum out;
  for (const auto& u : units) {
    for (int idx : u.members) {
      out.values.push_back(raw[idx]);
      out.ordering.push_back(idx);
    }
  }
  return out;
}

OrderedSpectrum eigenvalues(const Matrix& a, int max_iterations) {
  require_square(a);
  const Eigen::Index n = a.rows();
  if (n < 1 || n > kMaxDimension) {
    throw Error(ErrorCode::BadDimension, "eigenvalues: dimension " + std::to_string(n) +
                                             " outside [1, " + std::to_string(kMaxDimension) + "]");
  }
  if (!a.allFinite()) throw Error(ErrorCode::BadParams, "eigenvalues: non-finite entry");
  Matrix h = a;
  balance(h);
  reduce_to_hessenberg(h);
  return order_spectrum(hessenberg_qr(h, max_iterations));
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
  require_square(a);
  const Eigen::Index n = a.rows();
  std::vector<double> coeffs(n + 1, 0.0);
  coeffs[0] = 1.0;
  Matrix mk = Matrix::Zero(n, n);
  const Matrix identity = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = a * mk + coeffs[k - 1] * identity;
    coeffs[k] = -(a * mk).trace() / static_cast<double>(k);
  }
  return coeffs;
}

Matrix matrix_exp(const Matrix& a, double s) {
  require_square(a);
  const Eigen::Index n = a.rows();
  Matrix as = a * s;
  const double norm = norm_inf(as);
  int squarings = 0;
  if (norm > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
  as /= std::ldexp(1.0, squarings);

  // Pade [6/6]: c_k = c_{k-1} (q-k+1) / (k (2q-k+1))
  constexpr int q = 6;
  Matrix x = as;
  double c = 0.5;
  const Matrix identity = Matrix::Identity(n, n);
  Matrix num = identity + c * as;
  Matrix den = identity - c * as;
  bool positive = true;
  for (int k = 2; k <= q; ++k) {
    c = c * (q - k + 1) / (k * (2.0 * q - k + 1));
    x = as * x;
    num += c * x;
    if (positive) {
      den += c * x;
    } else {
      den -= c * x;
    }
    positive = !positive;
  }
  Matrix e = den.partialPivLu().solve(num);
  for (int k = 0; k < squarings; ++k) e = e * e;
  return e;
}

StabilityCount unstable_count(const OrderedSpectrum& spectrum, double tau_stab) {
  StabilityCount out;
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& lambda : spectrum.values) {
    if (lambda.real() > tau_stab) ++out.unstable;
    out.margin = std::min(out.margin, std::abs(lambda.real()));
  }
  if (spectrum.values.empty()) out.margin = 0.0;
  return out;
}

const char* to_string(BlockCase c) {
  switch (c) {
    case BlockCase::RealDiagonal: return "RealDiagonal";
    case BlockCase::ComplexPair: return "ComplexPair";
    case BlockCase::JordanBlock: return "JordanBlock";
  }
  return "Unknown";
}

Eigen::Matrix2d scaled_block(const Eigen::Matrix2d& block, double delta) {
  Eigen::Matrix2d out = block;
  out(0, 1) /= delta;
  out(1, 0) *= delta;
  return out;
}

double min_symmetric_eigenvalue(const Eigen::Matrix2d& m) {
  const double a = m(0, 0);
  const double d = m(1, 1);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

double delta_scaling(const Eigen::Matrix2d& block, BlockCase block_case) {
  const double tr = block.trace();
  const double det = block.determinant();
  const double disc = 0.25 * tr * tr - det;
  // real parts of the two eigenvalues
  double re_min = 0.5 * tr;
  if (disc > 0.0) re_min = 0.5 * tr - std::sqrt(disc);
  if (re_min <= 0.0) {
    throw Error(ErrorCode::NotUnstable, "dominant block has an eigenvalue with Re <= 0");
  }
  double delta = 1.0;
  if (block_case == BlockCase::JordanBlock) {
    const double u = 0.5 * tr;
    const double coupling = std::abs(block(0, 1)) + std::abs(block(1, 0));
    // smallest power of two strictly above coupling / u
    delta = std::exp2(std::floor(std::log2(coupling / u)) + 1.0);
  }
  for (int guard = 0; guard < 128; ++guard) {
    if (min_symmetric_eigenvalue(scaled_block(block, delta)) > 0.0) return delta;
    delta *= 2.0;
  }
  throw Error(ErrorCode::NotPositiveDefinite, "no dyadic delta certifies the dominant block");
}

SpectralSplit spectral_split(const Matrix& a, const SplitOptions& options) {
  require_square(a);
  const Eigen::Index n = a.rows();
  if (n < 3) throw Error(ErrorCode::BadDimension, "spectral_split needs n >= 3");

  SpectralSplit out;
  out.spectrum = eigenvalues(a);
  const Complex l1 = out.spectrum[0];
  const Complex l2 = out.spectrum[1];
  out.gap = l2.real() - out.spectrum[2].real();
  if (out.gap < options.tau_gap) {
    throw Error(ErrorCode::GapTooSmall,
                "Re(lambda2) - Re(lambda3) = " + std::to_string(out.gap) + " below tolerance");
  }
  const double a_norm = std::max(a.norm(), std::numeric_limits<double>::min());

  // p(A) = (A - l1 I)(A - l2 I) is real; its kernel is the generalized
  // eigenspace of {l1, l2} and its range the complementary invariant subspace.
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix p = a * a - (l1 + l2).real() * a + (l1 * l2).real() * identity;
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix v1 = svd.matrixV().rightCols(2);   // orthonormal W1
  out.w2 = svd.matrixU().leftCols(n - 2);         // orthonormal W2

  // A restricted to W1 in the orthonormal basis
  const Eigen::Matrix2d c = v1.transpose() * a * v1;
  const double tr = c.trace();
  const double disc = 0.25 * tr * tr - c.determinant();
  const double rep_tol = 1e-6 * std::max(1.0, a_norm);
  Eigen::Matrix2d basis;  // columns: coordinates of the Jordan basis in v1
  ComplexVector eigvec;   // dominant eigenvector used for the residual check
  Complex eigval;

  if (std::abs(l1 - l2) <= rep_tol) {
    const double u = 0.5 * tr;
    const Eigen::Matrix2d nil = c - u * Eigen::Matrix2d::Identity();
    // rank of (A - uI) on the dominant generalized eigenspace
    Eigen::JacobiSVD<Eigen::Matrix2d> nsvd(nil, Eigen::ComputeFullV);
    if (nsvd.singularValues()(0) <= 1e-8 * a_norm) {
      out.block_case = BlockCase::RealDiagonal;
      basis.setIdentity();
    } else {
      out.block_case = BlockCase::JordanBlock;
      // y2 outside ker(N), y1 = N y2 spans ker(N)
      Eigen::Vector2d y2 = nsvd.matrixV().col(0);
      Eigen::Vector2d y1 = nil * y2;
      basis.col(0) = y1;
      basis.col(1) = y2;
    }
    eigval = Complex(u, 0.0);
    eigvec = (v1 * basis.col(0)).cast<Complex>();
  } else if (disc < 0.0) {
    out.block_case = BlockCase::ComplexPair;
    // eigenvector of c for lambda = u - i w (w > 0) gives [[u, -w], [w, u]]
    const double u = 0.5 * tr;
    const double omega = std::sqrt(-disc);
    eigval = Complex(u, -omega);
    // (c - lambda I) z = 0: take z = (c01, lambda - c00) or the other row
    Eigen::Vector2cd z;
    if (std::abs(c(0, 1)) >= std::abs(c(1, 0))) {
      z << Complex(c(0, 1), 0.0), eigval - c(0, 0);
    } else {
      z << eigval - c(1, 1), Complex(c(1, 0), 0.0);
    }
    z /= z.norm();
    basis.col(0) = z.real();
    basis.col(1) = z.imag();
    eigvec = v1.cast<Complex>() * z;
  } else {
    out.block_case = BlockCase::RealDiagonal;
    const double root = std::sqrt(disc);
    const double lambda_hi = 0.5 * tr + root;
    const double lambda_lo = 0.5 * tr - root;
    auto real_eigvec = [&c](double lambda) {
      Eigen::Vector2d z;
      const Eigen::Matrix2d m = c - lambda * Eigen::Matrix2d::Identity();
      if (m.row(0).norm() >= m.row(1).norm()) {
        z << m(0, 1), -m(0, 0);
      } else {
        z << m(1, 1), -m(1, 0);
      }
      if (z.norm() == 0.0) z << 1.0, 0.0;
      return Eigen::Vector2d(z / z.norm());
    };
    basis.col(0) = real_eigvec(lambda_hi);
    basis.col(1) = real_eigvec(lambda_lo);
    eigval = Complex(lambda_hi, 0.0);
    eigvec = (v1 * basis.col(0)).cast<Complex>();
  }

  out.w1 = v1 * basis;
  out.dominant_block = basis.inverse() * c * basis;
  out.psi = out.w2.transpose() * a * out.w2;

  Matrix b(n, n);
  b << out.w1, out.w2;
  out.similarity = b.inverse();

  out.unstable_pair = l1.real() > 0.0 && l2.real() > 0.0;
  out.delta = out.unstable_pair ? delta_scaling(out.dominant_block, out.block_case) : 1.0;

  // diagnostics
  auto& d = out.diagnostics;
  const Matrix proj1 = v1 * v1.transpose();
  const Matrix proj2 = out.w2 * out.w2.transpose();
  for (int j = 0; j < 2; ++j) {
    const Vector w = out.w1.col(j);
    const Vector aw = a * w;
    d.invariance_residual_w1 =
        std::max(d.invariance_residual_w1, (aw - proj1 * aw).norm() / (a_norm * w.norm()));
  }
  for (Eigen::Index j = 0; j < n - 2; ++j) {
    const Vector w = out.w2.col(j);
    const Vector aw = a * w;
    d.invariance_residual_w2 =
        std::max(d.invariance_residual_w2, (aw - proj2 * aw).norm() / (a_norm * w.norm()));
  }
  const ComplexVector resid = a.cast<Complex>() * eigvec - eigval * eigvec;
  d.eigen_residual = resid.norm() / (a_norm * eigvec.norm());
  Eigen::JacobiSVD<Matrix> bsvd(b);
  d.basis_condition = bsvd.singularValues()(0) / bsvd.singularValues()(n - 1);

  d.w1_samples = options.w1_circle_samples;
  for (int i = 0; i < options.w1_circle_samples; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / options.w1_circle_samples;
    const Vector w = std::cos(theta) * out.w1.col(0) + std::sin(theta) * out.w1.col(1);
    const double tol = signvar::relative_zero_tol(as_span(w), 1e-12);
    if (signvar::s_plus(as_span(w), tol) > 1) ++d.w1_violations;
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  d.w2_samples = options.w2_samples;
  for (int i = 0; i < options.w2_samples; ++i) {
    Vector coef(n - 2);
    for (Eigen::Index j = 0; j < n - 2; ++j) coef(j) = gauss(rng);
    const Vector w = out.w2 * coef.normalized();
    const double tol = signvar::relative_zero_tol(as_span(w), 1e-12);
    if (signvar::s_minus(as_span(w), tol) < 2) ++d.w2_violations;
  }
  return out;
}

Vector dominant_real_eigenvector(const Matrix& a) {
  const OrderedSpectrum spec = eigenvalues(a);
  const double lambda = spec[0].real();
  const Eigen::Index n = a.rows();
  Eigen::JacobiSVD<Matrix> svd(a - lambda * Matrix::Identity(n, n), Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(n - 1);
  // one step of inverse iteration polishes the kernel vector
  Matrix shifted = a - (lambda + 1e-10 * std::max(1.0, std::abs(lambda))) * Matrix::Identity(n, n);
  Vector polished = shifted.partialPivLu().solve(v);
  if (polished.allFinite() && polished.norm() > 0.0) v = polished.normalized();
  return v;
}

}  // namespace coop2::spectral

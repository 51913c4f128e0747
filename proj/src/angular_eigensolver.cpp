#include "lsreconn/angular_eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lsreconn/quadrature.hpp"

namespace lsreconn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDthetaDxi = kPi / 2.0;

AngularMatrix unit_mass() {
  AngularTrace t;
  t.value = {1.0, 1.0, 1.0, 1.0};
  return assemble_eigensystem(t).B;
}

}  // namespace

void angular_basis(int e, double s, double* phi, double* dphi) {
  for (int i = 0; i < kAngularBasisSize; ++i) phi[i] = dphi[i] = 0.0;
  const double b = s * (1.0 - s);
  const double db = 1.0 - 2.0 * s;
  const double h = s - 0.5;
  phi[3 * e] = b;
  dphi[3 * e] = db;
  phi[3 * e + 1] = 5.0 * b * h;
  dphi[3 * e + 1] = 5.0 * (db * h + b);
  phi[3 * e + 2] = 20.0 * b * h * h;
  dphi[3 * e + 2] = 20.0 * (db * h * h + 2.0 * b * h);
  phi[12 + e] = 0.25 * (1.0 - s);
  dphi[12 + e] = -0.25;
  phi[12 + (e + 1) % 4] = 0.25 * s;
  dphi[12 + (e + 1) % 4] = 0.25;
}

EigenSystem assemble_eigensystem(const AngularTrace& trace, int gauss_points) {
  for (double p : trace.value) {
    if (!(p > 0.0)) throw std::invalid_argument("angular trace values must be positive");
  }
  const GaussRule rule = gauss_legendre(gauss_points);
  EigenSystem sys;
  sys.trace = trace;
  sys.G.setZero();
  sys.B.setZero();
  double phi[kAngularBasisSize], dphi[kAngularBasisSize];
  for (int e = 0; e < 4; ++e) {
    const double p = trace.value[e];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      angular_basis(e, rule.nodes[q], phi, dphi);
      const double wg = rule.weights[q] * p / kDthetaDxi;
      const double wb = rule.weights[q] * p * kDthetaDxi;
      for (int i = 0; i < kAngularBasisSize; ++i) {
        for (int j = 0; j < kAngularBasisSize; ++j) {
          sys.G(i, j) += wg * dphi[i] * dphi[j];
          sys.B(i, j) += wb * phi[i] * phi[j];
        }
      }
    }
  }
  return sys;
}

JacobiResult jacobi_eigen(const Eigen::MatrixXd& input, double tol, int max_sweeps) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) s += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };
  JacobiResult res;
  while (off_norm() > tol * scale) {
    if (res.sweeps == max_sweeps) {
      throw std::runtime_error("Jacobi eigensolver did not converge within " +
                               std::to_string(max_sweeps) + " sweeps");
    }
    ++res.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  res.values = a.diagonal();
  res.vectors = v;
  return res;
}

std::vector<EigenPair> solve_eigenpairs(const EigenSystem& system) {
  const JacobiResult bj = jacobi_eigen(system.B);
  if (bj.values.minCoeff() <= 0.0) throw std::runtime_error("angular mass matrix is not positive definite");
  const Eigen::MatrixXd b_inv_half =
      bj.vectors * bj.values.cwiseSqrt().cwiseInverse().asDiagonal() * bj.vectors.transpose();
  const Eigen::MatrixXd m = b_inv_half * system.G * b_inv_half;
  const JacobiResult mj = jacobi_eigen(m);

  const AngularMatrix b1 = unit_mass();
  std::vector<EigenPair> pairs;
  for (int k = 0; k < kAngularBasisSize; ++k) {
    EigenPair ep;
    ep.lambda_gen = mj.values[k];
    ep.exponent = std::sqrt(std::max(0.0, ep.lambda_gen));
    ep.rho_b = b_inv_half * mj.vectors.col(k);
    ep.rho = ep.rho_b / std::sqrt(ep.rho_b.dot(b1 * ep.rho_b));
    // Fix the sign so that the largest coefficient is positive.
    Eigen::Index imax;
    ep.rho.cwiseAbs().maxCoeff(&imax);
    if (ep.rho[imax] < 0.0) {
      ep.rho = -ep.rho;
      ep.rho_b = -ep.rho_b;
    }
    const AngularVector g_rho = system.G * ep.rho;
    const double r = (g_rho - ep.lambda_gen * (system.B * ep.rho)).norm();
    const double gn = g_rho.norm();
    ep.residual = gn > 1e-12 ? r / gn : r;
    pairs.push_back(ep);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.lambda_gen < b.lambda_gen; });
  return pairs;
}

std::vector<EigenPair> select_singular(const std::vector<EigenPair>& pairs, int cap, double tol, SelectionRule rule) {
  std::vector<EigenPair> out;
  for (const auto& p : pairs) {
    if (static_cast<int>(out.size()) >= cap) break;
    const bool constant = p.exponent <= tol;
    if ((constant && rule.include_constant) || (!constant && p.exponent < rule.max_exponent - tol)) out.push_back(p);
  }
  return out;
}

std::array<double, 2> angular_eval(const EigenPair& pair, double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  const double xi = t / kDthetaDxi;
  const int e = std::min(3, static_cast<int>(std::floor(xi)));
  const double s = xi - e;
  double phi[kAngularBasisSize], dphi[kAngularBasisSize];
  angular_basis(e, s, phi, dphi);
  double mu = 0.0, dmu = 0.0;
  for (int i = 0; i < kAngularBasisSize; ++i) {
    mu += pair.rho[i] * phi[i];
    dmu += pair.rho[i] * dphi[i];
  }
  return {mu, dmu / kDthetaDxi};
}

double angular_inner(const EigenPair& a, const EigenPair& b) {
  const GaussRule rule = gauss_legendre(5);
  double sum = 0.0;
  for (int e = 0; e < 4; ++e) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double th = (e + rule.nodes[q]) * kDthetaDxi;
      sum += rule.weights[q] * kDthetaDxi * angular_eval(a, th)[0] * angular_eval(b, th)[0];
    }
  }
  return sum;
}

double transfer_characteristic(const AngularTrace& trace, double lam) {
  Eigen::Matrix2d t = Eigen::Matrix2d::Identity();
  const double c = std::cos(lam * kDthetaDxi);
  const double s = std::sin(lam * kDthetaDxi);
  for (int k = 0; k < 4; ++k) {
    const double p = trace.value[k];
    Eigen::Matrix2d tk;
    tk << c, s / (lam * p), -lam * p * s, c;
    t = tk * t;
  }
  return t.trace() - 2.0;
}

std::vector<double> semi_analytic_exponents(const AngularTrace& trace, double max_exponent, double step,
                                            double tol) {
  auto g = [&trace](double l) { return transfer_characteristic(trace, l); };
  auto bisect = [&g, tol](double a, double b) {
    double ga = g(a);
    while (b - a > tol) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if ((gm > 0.0) == (ga > 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };
  // Stationary point of g by bisection on a central-difference slope.
  auto stationary = [&g, tol](double a, double b) {
    const double h = 1e-5;
    auto slope = [&g, h](double l) { return g(l + h) - g(l - h); };
    double sa = slope(a);
    while (b - a > tol) {
      const double m = 0.5 * (a + b);
      const double sm = slope(m);
      if ((sm > 0.0) == (sa > 0.0)) {
        a = m;
        sa = sm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<double> roots;
  const int n = static_cast<int>(std::ceil((max_exponent + 2.0 * step) / step));
  std::vector<double> ls(n + 1), gs(n + 1);
  for (int i = 0; i <= n; ++i) {
    ls[i] = step * (i + 1);
    gs[i] = g(ls[i]);
  }
  for (int i = 0; i < n; ++i) {
    const bool tangent_candidate = i > 0 && gs[i] >= gs[i - 1] && gs[i] >= gs[i + 1] && gs[i - 1] < 0.0 &&
                                   gs[i + 1] < 0.0;
    if (gs[i] == 0.0) {
      if (!tangent_candidate) roots.push_back(ls[i]);
    } else if ((gs[i] > 0.0) != (gs[i + 1] > 0.0) && gs[i + 1] != 0.0) {
      roots.push_back(bisect(ls[i], ls[i + 1]));
    }
    // Tangential contact or two roots closer than the scan step.
    if (tangent_candidate) {
      const double lm = stationary(ls[i - 1], ls[i + 1]);
      const double gm = g(lm);
      if (std::abs(gm) < 1e-9) {
        roots.push_back(lm);
        roots.push_back(lm);
      } else if (gm > 0.0 && gs[i] < 0.0) {
        roots.push_back(bisect(ls[i - 1], lm));
        roots.push_back(bisect(lm, ls[i + 1]));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (r > 0.0 && r <= max_exponent + 1e-9) out.push_back(r);
  }
  return out;
}

}  // namespace lsreconn

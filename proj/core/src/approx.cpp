#include "quadlab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "quadlab/errors.hpp"

namespace quadlab {
namespace {

double abs_pow(double v, double p) {
  const double a = std::abs(v);
  return p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
}

// Basis values at the family nodes, either stored densely or regenerated
// block by block for the normal equations.
class Design {
 public:
  Design(const MZFamily& fam, std::size_t dense_limit)
      : fam_(fam), n_(fam.degree), dim_(poly_dim(fam.d, fam.degree)) {
    if (fam.nodes.size() < dim_)
      throw ConstructionError("least_lp_fit: family has fewer nodes than dim Π_n",
                              static_cast<double>(fam.nodes.size()));
    dense_ = fam.nodes.size() * dim_ <= dense_limit;
    if (dense_) B_ = block(0, fam.nodes.size());
  }

  Eigen::Index rows() const { return static_cast<Eigen::Index>(fam_.nodes.size()); }

  // argmin_c Σ ω_k (y_k − (Bc)_k)²
  Eigen::VectorXd solve(const Eigen::VectorXd& omega, const Eigen::VectorXd& y, bool strict) const {
    const Eigen::ArrayXd s = omega.array().sqrt();
    if (dense_) {
      Eigen::MatrixXd A = B_.array().colwise() * s;
      Eigen::VectorXd scale = A.colwise().norm().transpose();
      for (Eigen::Index j = 0; j < scale.size(); ++j) scale[j] = scale[j] > 0 ? 1.0 / scale[j] : 1.0;
      A = A * scale.asDiagonal();
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      qr.setThreshold(1e-13);
      if (strict && qr.rank() < A.cols())
        throw ConstructionError("least_lp_fit: rank-deficient design matrix (family too sparse)",
                                static_cast<double>(qr.rank()));
      const Eigen::VectorXd rhs = (y.array() * s).matrix();
      return scale.asDiagonal() * qr.solve(rhs);
    }
    const Eigen::Index D = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(D, D);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(D);
    for (std::size_t start = 0; start < fam_.nodes.size(); start += kBlock) {
      const std::size_t end = std::min(fam_.nodes.size(), start + kBlock);
      Eigen::MatrixXd Bb = block(start, end);
      const Eigen::Index m = Bb.rows();
      const auto sb = s.segment(static_cast<Eigen::Index>(start), m);
      Bb = Bb.array().colwise() * sb;
      G.selfadjointView<Eigen::Lower>().rankUpdate(Bb.transpose());
      rhs.noalias() += Bb.transpose() * (y.segment(static_cast<Eigen::Index>(start), m).array() * sb).matrix();
    }
    G = G.selfadjointView<Eigen::Lower>();
    Eigen::VectorXd scale(D);
    for (Eigen::Index j = 0; j < D; ++j) scale[j] = G(j, j) > 0 ? 1.0 / std::sqrt(G(j, j)) : 1.0;
    const Eigen::MatrixXd Gs = scale.asDiagonal() * G * scale.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(Gs);
    if (llt.info() != Eigen::Success) {
      if (strict) throw ConstructionError("least_lp_fit: rank-deficient normal equations (family too sparse)");
      return scale.asDiagonal() * Gs.ldlt().solve(scale.asDiagonal() * rhs);
    }
    return scale.asDiagonal() * llt.solve(scale.asDiagonal() * rhs);
  }

  Eigen::MatrixXd rows_of(const std::vector<Eigen::Index>& idx) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(dim_));
    std::vector<double> row(dim_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (dense_) {
        out.row(static_cast<Eigen::Index>(i)) = B_.row(idx[i]);
        continue;
      }
      basis_eval_into(n_, fam_.nodes[static_cast<std::size_t>(idx[i])], row);
      for (std::size_t k = 0; k < dim_; ++k) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    return out;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& c) const {
    if (dense_) return B_ * c;
    Eigen::VectorXd out(rows());
    for (std::size_t start = 0; start < fam_.nodes.size(); start += kBlock) {
      const std::size_t end = std::min(fam_.nodes.size(), start + kBlock);
      out.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) = block(start, end) * c;
    }
    return out;
  }

 private:
  static constexpr std::size_t kBlock = 2048;

  Eigen::MatrixXd block(std::size_t start, std::size_t end) const {
    Eigen::MatrixXd B(static_cast<Eigen::Index>(end - start), static_cast<Eigen::Index>(dim_));
    std::vector<double> row(dim_);
    for (std::size_t i = start; i < end; ++i) {
      basis_eval_into(n_, fam_.nodes[i], row);
      for (std::size_t k = 0; k < dim_; ++k)
        B(static_cast<Eigen::Index>(i - start), static_cast<Eigen::Index>(k)) = row[k];
    }
    return B;
  }

  const MZFamily& fam_;
  int n_;
  std::size_t dim_;
  bool dense_ = true;
  Eigen::MatrixXd B_;
};

double objective(const Eigen::VectorXd& r, const Eigen::VectorXd& tau, double p) {
  if (std::isinf(p)) return r.cwiseAbs().maxCoeff();
  long double s = 0;
  for (Eigen::Index k = 0; k < r.size(); ++k) s += tau[k] * abs_pow(r[k], p);
  return static_cast<double>(s);  // Σ τ |r|^p (not yet the p-th root)
}

double to_norm(double obj, double p) { return std::isinf(p) ? obj : (p == 2.0 ? std::sqrt(obj) : std::pow(obj, 1.0 / p)); }


// min_c max_i |y_i − (Bc)_i| as the linear program min t s.t. |y − Bc| ≤ t,
// by a Mehrotra predictor–corrector interior-point method started at c0.
// Returns false if the iteration breaks down.
bool minimax_ipm(const Eigen::MatrixXd& B, const Eigen::VectorXd& y, Eigen::VectorXd& c) {
  const Eigen::Index N = B.rows(), k = B.cols(), m = 2 * N;
  Eigen::VectorXd r = y - B * c;
  double t = 1.05 * r.cwiseAbs().maxCoeff() + 1e-300;
  Eigen::VectorXd sp = (r.array() + t).matrix(), sm = (t - r.array()).matrix();
  Eigen::VectorXd zp = Eigen::VectorXd::Constant(N, 0.5 / N), zm = zp;
  const double yscale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);

  for (int it = 0; it < 100; ++it) {
    // Residuals of G^T z + q = 0 and G x + s = h.
    const Eigen::VectorXd rdc = B.transpose() * (zp - zm);
    const double rdt = 1.0 - zp.sum() - zm.sum();
    const Eigen::VectorXd Bc = B * c;
    const Eigen::VectorXd rpp = (Bc.array() - t + sp.array() - y.array()).matrix();
    const Eigen::VectorXd rpm = (-Bc.array() - t + sm.array() + y.array()).matrix();
    const double gap = sp.dot(zp) + sm.dot(zm);
    const double mu = gap / static_cast<double>(m);
    if (gap <= 1e-13 * std::max(t, 1e-14 * yscale) && rpp.cwiseAbs().maxCoeff() <= 1e-13 * yscale &&
        rpm.cwiseAbs().maxCoeff() <= 1e-13 * yscale && rdc.cwiseAbs().maxCoeff() <= 1e-12 && std::abs(rdt) <= 1e-12)
      return true;

    const Eigen::ArrayXd wp = zp.array() / sp.array(), wm = zm.array() / sm.array();
    Eigen::MatrixXd M(k + 1, k + 1);
    M.topLeftCorner(k, k) = B.transpose() * (B.array().colwise() * (wp + wm)).matrix();
    M.topRightCorner(k, 1) = B.transpose() * (wm - wp).matrix();
    M.bottomLeftCorner(1, k) = M.topRightCorner(k, 1).transpose();
    M(k, k) = (wp + wm).sum();
    Eigen::VectorXd dscale = M.diagonal().cwiseSqrt().cwiseMax(1e-300).cwiseInverse();
    const Eigen::MatrixXd Ms = dscale.asDiagonal() * M * dscale.asDiagonal();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(Ms);
    if (ldlt.info() != Eigen::Success) return false;

    struct Step {
      Eigen::VectorXd dc, dzp, dzm, dsp, dsm;
      double dt;
    };
    auto solve = [&](const Eigen::ArrayXd& rcp, const Eigen::ArrayXd& rcm) {
      const Eigen::ArrayXd gp = wp * rpp.array() - rcp / sp.array();
      const Eigen::ArrayXd gm = wm * rpm.array() - rcm / sm.array();
      Eigen::VectorXd rhs(k + 1);
      rhs.head(k) = -rdc - B.transpose() * (gp - gm).matrix();
      rhs[k] = -rdt + (gp + gm).sum();
      const Eigen::VectorXd dx = dscale.asDiagonal() * ldlt.solve(dscale.asDiagonal() * rhs);
      Step st;
      st.dc = dx.head(k);
      st.dt = dx[k];
      const Eigen::ArrayXd Bd = (B * st.dc).array();
      // G Δx for the two row blocks: (B, −1) and (−B, −1).
      const Eigen::ArrayXd Gp = Bd - st.dt, Gm = -Bd - st.dt;
      st.dzp = (wp * (Gp + rpp.array()) - rcp / sp.array()).matrix();
      st.dzm = (wm * (Gm + rpm.array()) - rcm / sm.array()).matrix();
      st.dsp = (-rpp.array() - Gp).matrix();
      st.dsm = (-rpm.array() - Gm).matrix();
      return st;
    };
    auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };
    auto step_length = [&](const Step& st) {
      return std::min({max_step(sp, st.dsp), max_step(sm, st.dsm), max_step(zp, st.dzp), max_step(zm, st.dzm)});
    };

    const Step aff = solve(sp.array() * zp.array(), sm.array() * zm.array());
    const double a_aff = step_length(aff);
    const double mu_aff = ((sp + a_aff * aff.dsp).dot(zp + a_aff * aff.dzp) +
                           (sm + a_aff * aff.dsm).dot(zm + a_aff * aff.dzm)) /
                          static_cast<double>(m);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
    const Step st = solve(sp.array() * zp.array() + aff.dsp.array() * aff.dzp.array() - sigma * mu,
                          sm.array() * zm.array() + aff.dsm.array() * aff.dzm.array() - sigma * mu);
    const double a = std::min(1.0, 0.99 * step_length(st));
    if (!(a > 0.0) || !std::isfinite(a)) return false;
    c += a * st.dc;
    t += a * st.dt;
    sp += a * st.dsp;
    sm += a * st.dsm;
    zp += a * st.dzp;
    zm += a * st.dzm;
  }
  return true;  // iteration budget spent; the caller keeps whichever iterate is better
}

// Lawson's limit point is only approximately optimal; refine it with the
// exact linear program on a growing working set of large-residual nodes.
void polish_minimax(const Design& design, const Eigen::VectorXd& y, Eigen::VectorXd& best, double& best_F) {
  const Eigen::Index N = y.size();
  const Eigen::Index k = best.size();
  Eigen::VectorXd r = y - design.apply(best);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(r[a]) > std::abs(r[b]); });
  const std::size_t initial = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max<Eigen::Index>(4 * k, 256)));
  std::vector<Eigen::Index> work(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(initial));
  std::vector<char> in(static_cast<std::size_t>(N), 0);
  for (Eigen::Index i : work) in[static_cast<std::size_t>(i)] = 1;

  Eigen::VectorXd c = best;
  for (int round = 0; round < 20; ++round) {
    const Eigen::MatrixXd Bw = design.rows_of(work);
    Eigen::VectorXd yw(static_cast<Eigen::Index>(work.size()));
    for (std::size_t i = 0; i < work.size(); ++i) yw[static_cast<Eigen::Index>(i)] = y[work[i]];
    if (!minimax_ipm(Bw, yw, c)) return;
    const double on_work = (yw - Bw * c).cwiseAbs().maxCoeff();
    r = y - design.apply(c);
    const double F = r.cwiseAbs().maxCoeff();
    if (F < best_F) {
      best_F = F;
      best = c;
    }
    std::vector<Eigen::Index> violated;
    for (Eigen::Index i = 0; i < N; ++i)
      if (!in[static_cast<std::size_t>(i)] && std::abs(r[i]) > on_work * (1.0 + 1e-12)) violated.push_back(i);
    if (violated.empty()) return;
    std::sort(violated.begin(), violated.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(r[a]) > std::abs(r[b]); });
    if (violated.size() > initial) violated.resize(initial);
    for (Eigen::Index i : violated) {
      in[static_cast<std::size_t>(i)] = 1;
      work.push_back(i);
    }
  }
}

}  // namespace

double discretized_norm(std::span<const double> values, const MZFamily& family, double p) {
  if (!(p >= 1.0)) throw PreconditionError("discretized_norm: p must be in [1, inf]");
  if (values.size() != family.nodes.size()) throw DimensionError("discretized_norm: value count mismatch");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  if (family.tau.size() != values.size()) throw PreconditionError("discretized_norm: family has no weights");
  long double s = 0;
  for (std::size_t k = 0; k < values.size(); ++k) s += family.tau[k] * abs_pow(values[k], p);
  return to_norm(static_cast<double>(s), p);
}

double discretized_norm(const SphereFunction& f, const MZFamily& family, double p) {
  std::vector<double> v(family.nodes.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(family.nodes[k]);
  return discretized_norm(v, family, p);
}

LpFitResult least_lp_fit(std::span<const double> values, const MZFamily& family, double p, const LpFitOptions& opts) {
  if (!(p >= 1.0)) throw PreconditionError("least_lp_fit: p must be in [1, inf]");
  if (values.size() != family.nodes.size()) throw DimensionError("least_lp_fit: value count mismatch");
  if (family.tau.size() != family.nodes.size()) throw PreconditionError("least_lp_fit: family has no weights");
  const Design design(family, opts.dense_limit);
  const Eigen::Index N = design.rows();
  const Eigen::Map<const Eigen::VectorXd> y(values.data(), N);
  const Eigen::Map<const Eigen::VectorXd> tau(family.tau.data(), N);

  Eigen::VectorXd c = design.solve(tau, y, /*strict=*/true);
  Eigen::VectorXd r = y - design.apply(c);
  double F = objective(r, tau, p);

  LpFitResult res;
  auto finish = [&](const Eigen::VectorXd& coef, double obj) {
    res.poly = SphericalPolynomial(family.d, family.degree, std::vector<double>(coef.data(), coef.data() + coef.size()));
    res.objective = to_norm(obj, p);
    return res;
  };
  if (p == 2.0) return finish(c, F);

  const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  if (r.cwiseAbs().maxCoeff() <= 1e-14 * scale) return finish(c, F);  // exact fit

  Eigen::VectorXd best = c;
  double best_F = F;
  res.converged = false;
  const double floor = opts.eta;

  if (std::isinf(p)) {
    // Lawson: u_k ← u_k |r_k| / Σ u_j |r_j|.
    Eigen::VectorXd u = tau / tau.sum();
    for (int it = 0; it < opts.max_iterations; ++it) {
      res.iterations = it + 1;
      Eigen::VectorXd nu = u.array() * r.array().abs();
      const double s = nu.sum();
      if (!(s > 0.0)) {
        res.converged = true;
        break;
      }
      u = nu / s;
      c = design.solve(u, y, false);
      r = y - design.apply(c);
      const double Fn = objective(r, tau, p);
      if (Fn < best_F) {
        best_F = Fn;
        best = c;
      }
      if (std::abs(F - Fn) <= opts.rel_change * F) {
        res.converged = true;
        break;
      }
      F = Fn;
    }
    polish_minimax(design, y, best, best_F);
    return finish(best, best_F);
  }

  const double damping = p > 2.0 ? 1.0 / (p - 1.0) : 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::VectorXd omega(N);
    for (Eigen::Index k = 0; k < N; ++k) omega[k] = tau[k] * std::pow(std::max(std::abs(r[k]), floor), p - 2.0);
    const Eigen::VectorXd target = design.solve(omega, y, false);
    Eigen::VectorXd step = (target - c) * damping;
    Eigen::VectorXd cn = c + step;
    Eigen::VectorXd rn = y - design.apply(cn);
    double Fn = objective(rn, tau, p);
    for (int bt = 0; p > 2.0 && Fn > F && bt < 30; ++bt) {
      step *= 0.5;
      cn = c + step;
      rn = y - design.apply(cn);
      Fn = objective(rn, tau, p);
    }
    if (Fn < best_F) {
      best_F = Fn;
      best = cn;
    }
    const bool small = std::abs(F - Fn) <= opts.rel_change * std::max(F, 1e-300);
    c = std::move(cn);
    r = std::move(rn);
    F = Fn;
    if (small) {
      res.converged = true;
      break;
    }
  }
  return finish(best, best_F);
}

LpFitResult least_lp_fit(const SphereFunction& f, const MZFamily& family, double p, const LpFitOptions& opts) {
  std::vector<double> v(family.nodes.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(family.nodes[k]);
  return least_lp_fit(v, family, p, opts);
}

double recovery_error(const SphereFunction& f, int n, double p, double q, const ProductWeight& w,
                      const RecoveryOptions& opts) {
  const MZFamily& fam = cached_mz_family(w, n, opts.delta, opts.seed);
  const LpFitResult fit = least_lp_fit(f, fam, p, opts.fit);
  const SphericalPolynomial& P = fit.poly;
  return norm_pw([&](const SpherePoint& x) { return f(x) - P(x); }, q, w, opts.norm);
}

double best_approx_error(const SphereFunction& f, int n, double p, const ProductWeight& w,
                         const RecoveryOptions& opts) {
  RecoveryOptions dense = opts;
  dense.delta = opts.delta / std::pow(4.0, 1.0 / w.dim());
  return recovery_error(f, n, p, p, w, dense);
}

double besov_norm(const SphereFunction& f, const SmoothnessIndex& theta, double gamma, double p,
                  const ProductWeight& w, int jmax, const RecoveryOptions& opts) {
  if (jmax < 0) throw PreconditionError("besov_norm: jmax must be >= 0");
  if (!(gamma > 0.0)) throw PreconditionError("besov_norm: gamma must be positive");
  const double base = norm_pw(f, p, w, opts.norm);
  if (base == 0.0) return 0.0;
  double acc = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double scale = theta(std::ldexp(1.0, -j));
    double e = best_approx_error(f, 1 << j, p, w, opts);
    // Residuals at solver precision carry no information about smoothness.
    if (e <= 1e-12 * base) e = 0.0;
    const double term = e / scale;
    acc = std::isinf(gamma) ? std::max(acc, term) : acc + std::pow(term, gamma);
  }
  return base + (std::isinf(gamma) ? acc : std::pow(acc, 1.0 / gamma));
}

}  // namespace quadlab

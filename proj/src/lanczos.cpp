#include "wavetank/lanczos.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>

namespace wavetank {

namespace {

struct Candidate {
  double mu;
  Eigen::Index index;  // column of the Ritz vector matrix
};

}  // namespace

Eigen::Index count_below(const SpMat& A, const SpMat& B, double sigma) {
  const SpMat C = A - sigma * B;
  Eigen::SimplicialLDLT<SpMat> ldlt(C);
  if (ldlt.info() != Eigen::Success) return -1;
  const Eigen::VectorXd d = ldlt.vectorD();
  Eigen::Index neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0 || !std::isfinite(d[i])) return -1;
    if (d[i] < 0.0) ++neg;
  }
  return neg;
}

ModeSet pencil_modes(const SpMat& A, const SpMat& B, double sigma, int m,
                     std::optional<std::pair<double, double>> window, const LanczosOptions& opt) {
  const Eigen::Index n = A.rows();
  if (n == 0) return {};
  if (window && !(window->first < window->second)) throw std::invalid_argument("empty eigenvalue window");
  if (!window && (m < 1 || m > n)) throw std::invalid_argument("mode count out of range");
  const SpMat C = A - sigma * B;
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(C);
  lu.factorize(C);
  if (lu.info() != Eigen::Success) throw SolverBreakdown("shift-invert factorization failed at sigma " + std::to_string(sigma));

  Eigen::Index expected = -1;
  if (window) {
    const Eigen::Index lo = count_below(A, B, window->first), hi = count_below(A, B, window->second);
    if (lo >= 0 && hi >= 0) expected = hi - lo;
    if (expected == 0) return {};
  } else {
    expected = m;
  }

  const int bs = std::max(1, std::min<int>(opt.block, int(n)));
  const Eigen::Index max_dim = std::min<Eigen::Index>(n, opt.max_dim);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_vec = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };

  Eigen::MatrixXd V(n, 0), BV(n, 0), H(0, 0);
  Eigen::Index k = 0;

  // B-orthonormalize the columns of W against V and each other, append to V.
  auto append = [&](Eigen::MatrixXd W) {
    Eigen::Index added = 0;
    for (Eigen::Index c = 0; c < W.cols() && k + added < max_dim; ++c) {
      Eigen::VectorXd w = W.col(c);
      for (int attempt = 0; attempt < 3; ++attempt) {
        double before = std::sqrt(std::max(0.0, w.dot(B * w)));
        for (int pass = 0; pass < 2; ++pass) {
          if (k + added > 0) w -= V.leftCols(k + added) * (BV.leftCols(k + added).transpose() * w);
        }
        Eigen::VectorXd bw = B * w;
        const double nrm = std::sqrt(std::max(0.0, w.dot(bw)));
        if (nrm > 1e-10 * std::max(before, 1e-300) && nrm > 0.0) {
          if (V.cols() < k + added + 1) {
            const Eigen::Index cap = std::min<Eigen::Index>(max_dim, std::max<Eigen::Index>(2 * V.cols(), 64));
            V.conservativeResize(n, cap);
            BV.conservativeResize(n, cap);
          }
          V.col(k + added) = w / nrm;
          BV.col(k + added) = bw / nrm;
          ++added;
          break;
        }
        w = random_vec();  // deflated direction
      }
    }
    return added;
  };

  Eigen::MatrixXd start(n, bs);
  for (int c = 0; c < bs; ++c) start.col(c) = random_vec();
  Eigen::Index next = 0;  // first column not yet expanded
  k = append(start);
  Eigen::Index last_check = 0;
  std::vector<double> prev_window;

  while (true) {
    // expand the newest block
    const Eigen::Index cur_end = k;
    Eigen::MatrixXd W(n, cur_end - next);
    for (Eigen::Index c = next; c < cur_end; ++c) W.col(c - next) = lu.solve(BV.col(c));
    if (lu.info() != Eigen::Success) throw SolverBreakdown("shift-invert solve failed");
    // H(:, next:cur_end) = V^T B W over all current columns
    H.conservativeResize(cur_end, cur_end);
    const Eigen::MatrixXd BW = B * W;
    const Eigen::MatrixXd col = V.leftCols(cur_end).transpose() * BW;
    H.block(0, next, cur_end, cur_end - next) = col;
    H.block(next, 0, cur_end - next, cur_end) = col.transpose();
    H = 0.5 * (H + H.transpose()).eval();
    if (k < max_dim) k += append(W);
    next = cur_end;
    const bool exhausted = next == k;
    // H rows/cols for the new block are filled when it is expanded; check on the filled part
    const Eigen::Index kk = next;
    const bool due = exhausted || kk - last_check >= std::max<Eigen::Index>(20, kk / 5) ||
                     (!window && kk >= std::max<Eigen::Index>(2 * m, 20) && last_check == 0);
    if (!due) continue;
    last_check = kk;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(kk, kk));
    const Eigen::VectorXd theta = es.eigenvalues();
    std::vector<Candidate> cand;
    for (Eigen::Index i = 0; i < kk; ++i) {
      if (theta[i] == 0.0) continue;
      const double mu = sigma + 1.0 / theta[i];
      if (window) {
        if (mu >= window->first && mu <= window->second) cand.push_back({mu, i});
      }
    }
    if (!window) {
      // largest theta
      for (Eigen::Index i = kk - 1; i >= 0 && Eigen::Index(cand.size()) < m; --i)
        if (theta[i] > 0.0) cand.push_back({sigma + 1.0 / theta[i], i});
    }
    const bool enough = window ? (expected < 0 || Eigen::Index(cand.size()) >= expected)
                               : Eigen::Index(cand.size()) >= m;
    if (!enough && !exhausted) continue;
    ModeSet out;
    out.mus.resize(Eigen::Index(cand.size()));
    out.phis.resize(n, Eigen::Index(cand.size()));
    out.residuals.resize(Eigen::Index(cand.size()));
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.mu < b.mu; });
    bool converged = true;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const Eigen::VectorXd y = V.leftCols(kk) * es.eigenvectors().col(cand[j].index);
      const Eigen::VectorXd by = B * y;
      const double mu = y.dot(A * y) / y.dot(by);
      const double res = (A * y - mu * by).norm() / by.norm();
      out.mus[Eigen::Index(j)] = mu;
      out.phis.col(Eigen::Index(j)) = y / std::sqrt(y.dot(by));
      out.residuals[Eigen::Index(j)] = res;
      if (!(res < opt.tol)) converged = false;
    }
    if (window && expected < 0) {
      // no inertia count: accept once the window content is stable
      std::vector<double> now(out.mus.data(), out.mus.data() + out.mus.size());
      const bool stable = now.size() == prev_window.size() && converged;
      prev_window = now;
      if (!stable && !exhausted) continue;
    }
    if (converged && !window && !exhausted) {
      // a skipped eigenvalue below the largest returned one shows up in the inertia
      const double top = out.mus.maxCoeff();
      const Eigen::Index below = count_below(A, B, top + 1e-10 * std::max(1.0, std::abs(top)));
      if (below > m) continue;
    }
    if (converged || exhausted) {
      if (!converged) throw SolverBreakdown("Lanczos stopped at dimension " + std::to_string(kk) +
                                            " with unconverged Ritz pairs (max residual " +
                                            std::to_string(out.residuals.maxCoeff()) + ")");
      if (window && expected >= 0 && out.count() != expected)
        throw SolverBreakdown("window holds " + std::to_string(expected) + " eigenvalues, found " +
                              std::to_string(out.count()));
      return out;
    }
  }
}

ModeSet eigenmodes(const StiffnessForms& forms, int m, std::optional<std::pair<double, double>> window,
                   const LanczosOptions& opt) {
  if (window) return pencil_modes(forms.K2, forms.K, 0.5 * (window->first + window->second), 0, window, opt);
  return pencil_modes(forms.K2, forms.K, -1e-3, m, std::nullopt, opt);
}

ModeSet laplacian_modes(const StiffnessForms& forms, int m, bool lumped, const LanczosOptions& opt) {
  if (!lumped) return pencil_modes(forms.K, forms.M, -1.0, m, std::nullopt, opt);
  const Eigen::VectorXd d = forms.M * Eigen::VectorXd::Ones(forms.size());
  SpMat D(forms.size(), forms.size());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  D.setFromTriplets(t.begin(), t.end());
  return pencil_modes(forms.K, D, -1.0, m, std::nullopt, opt);
}

ModeSet ritz_restrict(const StiffnessForms& forms, const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd KB = forms.K * basis;
  const Eigen::MatrixXd K2B = forms.K2 * basis;
  Eigen::MatrixXd H = basis.transpose() * KB, H2 = basis.transpose() * K2B;
  H = 0.5 * (H + H.transpose()).eval();
  H2 = 0.5 * (H2 + H2.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(H2, H);
  ModeSet out;
  out.mus = ges.eigenvalues();
  out.phis = basis * ges.eigenvectors();
  out.residuals.resize(out.mus.size());
  for (Eigen::Index j = 0; j < out.mus.size(); ++j) {
    const Eigen::VectorXd kphi = forms.K * out.phis.col(j);
    out.residuals[j] = (forms.K2 * out.phis.col(j) - out.mus[j] * kphi).norm() / kphi.norm();
  }
  return out;
}

Eigen::VectorXd project_load(const StiffnessForms& forms, const ModeSet& modes, const Eigen::VectorXd& F,
                             double* relative_remainder) {
  const Eigen::VectorXd c = modes.phis.transpose() * F;
  const Eigen::VectorXd p = forms.K * (modes.phis * c);
  if (relative_remainder) *relative_remainder = (F - p).norm() / std::max(F.norm(), 1e-300);
  return p;
}

}  // namespace wavetank

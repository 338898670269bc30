// Infeasible-start primal-dual path-following method with Nesterov-Todd
// scaling and Mehrotra's predictor-corrector. All data is dense.
//
// Internal standard form:
//   minimize   sum_k <C_k, X_k> + c_l'x + c_f'u
//   subject to sum_k <A_ik, X_k> + a_li'x + a_fi'u = b_i
//              X_k psd, x >= 0, u free
// Inequalities of the user problem receive a slack in the x block.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/Eigenvalues>

#include "consist/conic.hpp"

namespace consist::conic {

namespace {

struct PsdBlock {
  int user_block = 0;
  int order = 0;
  Matrix c;
  std::vector<Matrix> a;  // per constraint, empty (0x0) when untouched
};

struct Standard {
  std::vector<PsdBlock> psd;
  Matrix al;  // m x nl
  Vector cl;
  Matrix af;  // m x nf
  Vector cf;
  Vector b;
  Vector row_scale;  // original row = scaled row / row_scale
  double obj_scale = 1.0;
  // Location of user vector blocks inside the x and u blocks.
  std::vector<int> user_offset;
  int m = 0;
  int nl = 0;
  int nf = 0;
  int nu = 0;  // barrier parameter weight: sum of orders + nl
};

Standard build_standard(const ConicProblem& p) {
  Standard s;
  const auto& blocks = p.blocks();
  const auto& cons = p.constraints();
  s.m = static_cast<int>(cons.size());
  s.user_offset.assign(blocks.size(), -1);
  std::vector<int> psd_of(blocks.size(), -1);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.kind == BlockKind::psd) {
      psd_of[k] = static_cast<int>(s.psd.size());
      PsdBlock pb;
      pb.user_block = static_cast<int>(k);
      pb.order = b.size;
      pb.c = Matrix::Zero(b.size, b.size);
      pb.a.assign(s.m, Matrix());
      s.psd.push_back(std::move(pb));
    } else if (b.kind == BlockKind::nonnegative) {
      s.user_offset[k] = s.nl;
      s.nl += b.size;
    } else {
      s.user_offset[k] = s.nf;
      s.nf += b.size;
    }
  }
  const int user_nl = s.nl;
  for (const auto& c : cons) {
    if (c.relation != Relation::equal) ++s.nl;
  }
  s.al = Matrix::Zero(s.m, s.nl);
  s.cl = Vector::Zero(s.nl);
  s.af = Matrix::Zero(s.m, s.nf);
  s.cf = Vector::Zero(s.nf);
  s.b = Vector(s.m);

  auto scatter = [&](const LinearForm& f, int row) {
    for (const auto& e : f.entries()) {
      const auto& blk = blocks[e.block];
      if (blk.kind == BlockKind::psd) {
        PsdBlock& pb = s.psd[psd_of[e.block]];
        Matrix& target = row < 0 ? pb.c : pb.a[row];
        if (target.size() == 0) target = Matrix::Zero(pb.order, pb.order);
        if (e.row == e.col) {
          target(e.row, e.col) += e.value;
        } else {
          target(e.row, e.col) += 0.5 * e.value;
          target(e.col, e.row) += 0.5 * e.value;
        }
      } else if (blk.kind == BlockKind::nonnegative) {
        const int j = s.user_offset[e.block] + e.row;
        if (row < 0) s.cl(j) += e.value; else s.al(row, j) += e.value;
      } else {
        const int j = s.user_offset[e.block] + e.row;
        if (row < 0) s.cf(j) += e.value; else s.af(row, j) += e.value;
      }
    }
  };
  scatter(p.objective(), -1);
  int slack = user_nl;
  for (int i = 0; i < s.m; ++i) {
    scatter(cons[i].form, i);
    if (cons[i].relation == Relation::less_equal) s.al(i, slack++) = 1.0;
    if (cons[i].relation == Relation::greater_equal) s.al(i, slack++) = -1.0;
    s.b(i) = cons[i].rhs;
  }
  if (p.sense() == Sense::maximize) {
    for (auto& pb : s.psd) pb.c = -pb.c;
    s.cl = -s.cl;
    s.cf = -s.cf;
  }

  // Row and objective scaling.
  s.row_scale = Vector::Ones(s.m);
  for (int i = 0; i < s.m; ++i) {
    double norm2 = s.al.row(i).squaredNorm() + s.af.row(i).squaredNorm();
    for (const auto& pb : s.psd) {
      if (pb.a[i].size()) norm2 += pb.a[i].squaredNorm();
    }
    const double norm = std::sqrt(norm2);
    if (norm > 0.0) {
      const double f = 1.0 / norm;
      s.row_scale(i) = f;
      s.al.row(i) *= f;
      s.af.row(i) *= f;
      s.b(i) *= f;
      for (auto& pb : s.psd) {
        if (pb.a[i].size()) pb.a[i] *= f;
      }
    }
  }
  double cnorm2 = s.cl.squaredNorm() + s.cf.squaredNorm();
  for (const auto& pb : s.psd) cnorm2 += pb.c.squaredNorm();
  s.obj_scale = std::max(1.0, std::sqrt(cnorm2));
  for (auto& pb : s.psd) pb.c /= s.obj_scale;
  s.cl /= s.obj_scale;
  s.cf /= s.obj_scale;

  s.nu = s.nl;
  for (const auto& pb : s.psd) s.nu += pb.order;
  return s;
}

// A(X) for one psd block.
void apply_a(const PsdBlock& pb, const Matrix& x, Vector& out) {
  for (std::size_t i = 0; i < pb.a.size(); ++i) {
    if (pb.a[i].size()) out(i) += pb.a[i].cwiseProduct(x).sum();
  }
}

// A*(y) for one psd block.
Matrix apply_at(const PsdBlock& pb, const Vector& y) {
  Matrix out = Matrix::Zero(pb.order, pb.order);
  for (std::size_t i = 0; i < pb.a.size(); ++i) {
    if (pb.a[i].size() && y(i) != 0.0) out += y(i) * pb.a[i];
  }
  return out;
}

struct Scaling {
  Matrix g;       // W = G G'
  Matrix w;
  Vector lambda;  // eigenvalues of the scaled point
  bool ok = true;
};

Scaling nt_scaling(const Matrix& x, const Matrix& s) {
  Scaling sc;
  Eigen::LLT<Matrix> lx(x);
  if (lx.info() != Eigen::Success) {
    sc.ok = false;
    return sc;
  }
  const Matrix l = lx.matrixL();
  const Matrix lsl = l.transpose() * s * l;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (lsl + lsl.transpose()));
  Vector ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    sc.ok = false;
    return sc;
  }
  sc.lambda = ev.cwiseSqrt();
  const Vector inv_sqrt = sc.lambda.cwiseSqrt().cwiseInverse();
  sc.g = l * es.eigenvectors() * inv_sqrt.asDiagonal();
  sc.w = sc.g * sc.g.transpose();
  return sc;
}

// Largest step in (0, inf] keeping lambda + a*d psd in the scaled space.
double max_step_scaled(const Vector& lambda, const Matrix& d) {
  const Vector is = lambda.cwiseSqrt().cwiseInverse();
  Matrix t = is.asDiagonal() * d * is.asDiagonal();
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
  const double mn = es.eigenvalues().minCoeff();
  return mn < 0.0 ? -1.0 / mn : std::numeric_limits<double>::infinity();
}

double max_step_vec(const Vector& v, const Vector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

// D with D_ij = 2 R_ij / (l_i + l_j).
Matrix lyapunov(const Vector& l, const Matrix& r) {
  Matrix d(r.rows(), r.cols());
  for (int j = 0; j < r.cols(); ++j) {
    for (int i = 0; i < r.rows(); ++i) d(i, j) = 2.0 * r(i, j) / (l(i) + l(j));
  }
  return d;
}

class SchurSolver {
 public:
  bool factor(const Matrix& m, const Matrix& bf) {
    bf_ = bf;
    double reg = 0.0;
    const double diag = std::max(1e-300, m.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 8; ++attempt) {
      Matrix mm = m;
      if (reg > 0.0) mm.diagonal().array() += reg * diag;
      llt_.compute(mm);
      if (llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 : reg * 100.0;
    }
    if (llt_.info() != Eigen::Success) return false;
    if (bf_.cols() > 0) {
      mib_ = llt_.solve(bf_);
      Matrix k = bf_.transpose() * mib_;
      k = 0.5 * (k + k.transpose());
      kdec_.compute(k);
      if (kdec_.info() != Eigen::Success) return false;
    }
    return true;
  }

  void solve(const Vector& h, const Vector& rdf, Vector& dy, Vector& du) const {
    const Vector mih = llt_.solve(h);
    if (bf_.cols() > 0) {
      du = kdec_.solve(bf_.transpose() * mih - rdf);
      dy = mih - mib_ * du;
    } else {
      du = Vector(0);
      dy = mih;
    }
  }

 private:
  Eigen::LLT<Matrix> llt_;
  Eigen::LDLT<Matrix> kdec_;
  Matrix bf_;
  Matrix mib_;
};

}  // namespace

ConicSolution solve_sdp(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  for (const auto& b : problem.blocks()) {
    if (b.kind == BlockKind::psd && b.size > options.max_order) {
      throw DimensionError("psd block of order " + std::to_string(b.size) +
                           " exceeds the configured cap " + std::to_string(options.max_order));
    }
  }
  const Standard s = build_standard(problem);
  const int m = s.m;
  const int np = static_cast<int>(s.psd.size());

  ConicSolution sol;
  sol.relations.reserve(m);
  for (const auto& c : problem.constraints()) sol.relations.push_back(c.relation);
  sol.sense = problem.sense();

  // Starting point.
  const double anorm = 1.0;  // rows are normalized
  const double bmax = m > 0 ? s.b.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Matrix> x(np), z(np);
  double xi = 10.0, eta = 10.0;
  for (const auto& pb : s.psd) {
    xi = std::max(xi, std::sqrt(static_cast<double>(pb.order)) * (1.0 + bmax));
    eta = std::max(eta, std::sqrt(static_cast<double>(pb.order)) * anorm);
  }
  if (s.nl > 0) xi = std::max(xi, 1.0 + bmax);
  for (int k = 0; k < np; ++k) {
    x[k] = xi * Matrix::Identity(s.psd[k].order, s.psd[k].order);
    z[k] = eta * Matrix::Identity(s.psd[k].order, s.psd[k].order);
  }
  Vector xl = Vector::Constant(s.nl, xi);
  Vector zl = Vector::Constant(s.nl, eta);
  Vector y = Vector::Zero(m);
  Vector u = Vector::Zero(s.nf);

  const double bnorm = 1.0 + s.b.norm();
  double cnorm = 1.0 + std::sqrt(s.cl.squaredNorm() + s.cf.squaredNorm());
  for (const auto& pb : s.psd) cnorm += pb.c.norm();

  SolveStatus status = SolveStatus::max_iter;
  double pobj = 0.0, dobj = 0.0, prel = 0.0, drel = 0.0, gap = 0.0;
  Vector cert_y;
  std::vector<Matrix> dxs(np), dzs(np);
  int iter = 0;

  // Best iterate so far, by worst of the three stopping measures.
  struct Snapshot {
    double score = INFINITY;
    std::vector<Matrix> x, z;
    Vector xl, zl, y, u;
    double pobj = 0.0, dobj = 0.0, prel = 0.0, drel = 0.0, gap = 0.0;
  } best;

  for (; iter <= options.max_iter; ++iter) {
    // Residuals.
    Vector ax = s.al * xl + s.af * u;
    for (int k = 0; k < np; ++k) apply_a(s.psd[k], x[k], ax);
    const Vector rp = s.b - ax;
    std::vector<Matrix> rd(np);
    double rd2 = 0.0;
    pobj = s.cl.dot(xl) + s.cf.dot(u);
    double comp = xl.dot(zl);
    for (int k = 0; k < np; ++k) {
      rd[k] = s.psd[k].c - apply_at(s.psd[k], y) - z[k];
      rd2 += rd[k].squaredNorm();
      pobj += s.psd[k].c.cwiseProduct(x[k]).sum();
      comp += x[k].cwiseProduct(z[k]).sum();
    }
    const Vector rdl = s.cl - s.al.transpose() * y - zl;
    const Vector rdf = s.cf - s.af.transpose() * y;
    rd2 += rdl.squaredNorm() + rdf.squaredNorm();
    dobj = s.b.dot(y);
    prel = rp.norm() / bnorm;
    drel = std::sqrt(rd2) / cnorm;
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = s.nu > 0 ? comp / s.nu : 0.0;

    if (options.verbose) {
      std::cerr << "ipm " << iter << " p=" << pobj << " d=" << dobj << " prel=" << prel
                << " drel=" << drel << " gap=" << gap << " mu=" << mu << '\n';
    }
    if (prel <= options.feas_tol && drel <= options.feas_tol && gap <= options.gap_tol) {
      status = SolveStatus::optimal;
      break;
    }
    if (const double score = std::max({prel, drel, gap}); score < best.score) {
      best = {score, x, z, xl, zl, y, u, pobj, dobj, prel, drel, gap};
    }
    // Infeasibility: a dual ray (b'y > 0 with -A*(y) in the cone) or a primal ray.
    if (dobj > 0.0) {
      const double t = dobj;
      double ray = 0.0;
      for (int k = 0; k < np; ++k) ray += (apply_at(s.psd[k], y) + z[k]).squaredNorm();
      ray += (s.al.transpose() * y + zl).squaredNorm() + (s.af.transpose() * y).squaredNorm();
      if (std::sqrt(ray) / t < options.feas_tol && t > 1e6 * (1.0 + cnorm)) {
        status = SolveStatus::primal_infeasible;
        cert_y = -y / t;
        break;
      }
    }
    if (pobj < 0.0) {
      const double t = -pobj;
      Vector axh = s.al * xl + s.af * u;
      for (int k = 0; k < np; ++k) apply_a(s.psd[k], x[k], axh);
      if (axh.norm() / t < options.feas_tol && t > 1e6 * bnorm) {
        status = SolveStatus::dual_infeasible;
        break;
      }
    }
    if (iter == options.max_iter) break;

    // Scaling and Schur complement.
    std::vector<Scaling> sc(np);
    bool ok = true;
    for (int k = 0; k < np && ok; ++k) {
      sc[k] = nt_scaling(x[k], z[k]);
      ok = sc[k].ok;
    }
    if (!ok || (xl.array() <= 0.0).any() || (zl.array() <= 0.0).any()) {
      status = SolveStatus::numerical_failure;
      break;
    }
    const Vector dl = xl.cwiseQuotient(zl);
    Matrix schur = s.al * dl.asDiagonal() * s.al.transpose();
    for (int k = 0; k < np; ++k) {
      const auto& pb = s.psd[k];
      const int d = pb.order;
      std::vector<int> touched;
      for (int i = 0; i < m; ++i) {
        if (pb.a[i].size()) touched.push_back(i);
      }
      const int t = static_cast<int>(touched.size());
      if (t == 0) continue;
      Matrix avec(d * d, t), pvec(d * d, t);
      for (int c = 0; c < t; ++c) {
        const Matrix& ai = pb.a[touched[c]];
        const Matrix p = sc[k].w * ai * sc[k].w;
        avec.col(c) = Eigen::Map<const Vector>(ai.data(), d * d);
        pvec.col(c) = Eigen::Map<const Vector>(p.data(), d * d);
      }
      const Matrix mk = pvec.transpose() * avec;
      for (int a = 0; a < t; ++a) {
        for (int b = 0; b < t; ++b) schur(touched[a], touched[b]) += mk(a, b);
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    SchurSolver solver;
    if (!solver.factor(schur, s.af)) {
      status = SolveStatus::numerical_failure;
      break;
    }

    // Solves the Newton system for a given scaled complementarity target.
    // rc[k] is G D G' (psd) and rcl the LP analogue.
    auto direction = [&](const std::vector<Matrix>& rc, const Vector& rcl, Vector& dy, Vector& du,
                         std::vector<Matrix>& dx, std::vector<Matrix>& dz, Vector& dxl,
                         Vector& dzl) {
      Vector h = rp - s.al * (rcl - dl.cwiseProduct(rdl));
      for (int k = 0; k < np; ++k) {
        const Matrix t = rc[k] - sc[k].w * rd[k] * sc[k].w;
        Vector tmp = Vector::Zero(m);
        apply_a(s.psd[k], t, tmp);
        h -= tmp;
      }
      solver.solve(h, rdf, dy, du);
      for (int k = 0; k < np; ++k) {
        dz[k] = rd[k] - apply_at(s.psd[k], dy);
        dx[k] = rc[k] - sc[k].w * dz[k] * sc[k].w;
        dx[k] = 0.5 * (dx[k] + dx[k].transpose());
      }
      dzl = rdl - s.al.transpose() * dy;
      dxl = rcl - dl.cwiseProduct(dzl);
    };

    auto steps = [&](const std::vector<Matrix>& dtil_x, const std::vector<Matrix>& dtil_z,
                     const Vector& dxl, const Vector& dzl, double& ap, double& ad) {
      ap = max_step_vec(xl, dxl);
      ad = max_step_vec(zl, dzl);
      for (int k = 0; k < np; ++k) {
        ap = std::min(ap, max_step_scaled(sc[k].lambda, dtil_x[k]));
        ad = std::min(ad, max_step_scaled(sc[k].lambda, dtil_z[k]));
      }
    };

    // Predictor.
    std::vector<Matrix> dmat(np), rc(np), dx(np), dz(np), dxt(np), dzt(np);
    for (int k = 0; k < np; ++k) {
      dmat[k] = -Matrix(sc[k].lambda.asDiagonal());
      rc[k] = sc[k].g * dmat[k] * sc[k].g.transpose();
    }
    Vector rcl = -xl;
    Vector dy, du, dxl, dzl;
    direction(rc, rcl, dy, du, dx, dz, dxl, dzl);
    for (int k = 0; k < np; ++k) {
      dzt[k] = sc[k].g.transpose() * dz[k] * sc[k].g;
      dxt[k] = dmat[k] - dzt[k];
    }
    double ap = 0.0, ad = 0.0;
    steps(dxt, dzt, dxl, dzl, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double comp_aff = (xl + ap * dxl).dot(zl + ad * dzl);
    for (int k = 0; k < np; ++k) {
      comp_aff += (x[k] + ap * dx[k]).cwiseProduct(z[k] + ad * dz[k]).sum();
    }
    const double mu_aff = s.nu > 0 ? comp_aff / s.nu : 0.0;
    double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff / mu), 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (int k = 0; k < np; ++k) {
      const Vector& l = sc[k].lambda;
      Matrix target = sigma * mu * Matrix::Identity(l.size(), l.size());
      target -= Matrix(l.cwiseProduct(l).asDiagonal());
      const Matrix cross = dxt[k] * dzt[k];
      target -= 0.5 * (cross + cross.transpose());
      dmat[k] = lyapunov(l, target);
      rc[k] = sc[k].g * dmat[k] * sc[k].g.transpose();
    }
    rcl = (Vector::Constant(s.nl, sigma * mu) - xl.cwiseProduct(zl) - dxl.cwiseProduct(dzl))
              .cwiseQuotient(zl);
    direction(rc, rcl, dy, du, dx, dz, dxl, dzl);
    for (int k = 0; k < np; ++k) {
      dzt[k] = sc[k].g.transpose() * dz[k] * sc[k].g;
      dxt[k] = dmat[k] - dzt[k];
    }
    steps(dxt, dzt, dxl, dzl, ap, ad);
    const double tau = 0.9 + 0.09 * std::min({1.0, ap, ad});
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite()) {
      status = SolveStatus::numerical_failure;
      break;
    }
    for (int k = 0; k < np; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
      x[k] = 0.5 * (x[k] + x[k].transpose());
      z[k] = 0.5 * (z[k] + z[k].transpose());
    }
    xl += ap * dxl;
    zl += ad * dzl;
    u += ap * du;
    y += ad * dy;
    if (ap < 1e-12 && ad < 1e-12) {
      status = SolveStatus::numerical_failure;
      break;
    }
  }

  // Breakdown near the optimum (mu at round-off level): fall back to the best
  // iterate when it meets the loose tolerance. Residuals are reported as is.
  if ((status == SolveStatus::numerical_failure || status == SolveStatus::max_iter) &&
      best.score <= options.loose_tol) {
    x = best.x;
    z = best.z;
    xl = best.xl;
    zl = best.zl;
    y = best.y;
    u = best.u;
    pobj = best.pobj;
    dobj = best.dobj;
    prel = best.prel;
    drel = best.drel;
    gap = best.gap;
    status = SolveStatus::optimal;
  }

  // Unscale and report in the user's sense.
  const double sign = problem.sense() == Sense::maximize ? -1.0 : 1.0;
  sol.status = status;
  sol.iterations = iter;
  sol.primal_objective = sign * s.obj_scale * pobj;
  sol.dual_objective = sign * s.obj_scale * dobj;
  sol.gap = gap;
  sol.primal_residual = prel;
  sol.dual_residual = drel;
  sol.sensitivity = Vector(m);
  for (int i = 0; i < m; ++i) sol.sensitivity(i) = sign * s.obj_scale * y(i) * s.row_scale(i);
  if (status == SolveStatus::primal_infeasible) {
    sol.farkas = Vector(m);
    for (int i = 0; i < m; ++i) sol.farkas(i) = cert_y(i) * s.row_scale(i);
  }
  const auto& blocks = problem.blocks();
  sol.blocks.resize(blocks.size());
  int pk = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.kind == BlockKind::psd) {
      sol.blocks[k] = x[pk++];
    } else if (b.kind == BlockKind::nonnegative) {
      sol.blocks[k] = xl.segment(s.user_offset[k], b.size);
    } else {
      sol.blocks[k] = u.segment(s.user_offset[k], b.size);
    }
  }
  return sol;
}

ConicSolution solve_lp(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  const auto& blocks = problem.blocks();
  std::vector<int> offset(blocks.size());
  int n = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].kind == BlockKind::psd && blocks[k].size != 1) {
      throw DimensionError("solve_lp requires psd blocks of order 1");
    }
    offset[k] = n;
    n += blocks[k].size;
  }
  LinearProgram lp = make_lp(n, problem.sense());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].kind != BlockKind::free) {
      lp.lower.segment(offset[k], blocks[k].size).setZero();
    }
  }
  auto dense = [&](const LinearForm& f) {
    Vector v = Vector::Zero(n);
    for (const auto& e : f.entries()) v(offset[e.block] + e.row) += e.value;
    return v;
  };
  lp.c = dense(problem.objective());
  const auto& cons = problem.constraints();
  lp.a = Matrix::Zero(static_cast<Eigen::Index>(cons.size()), n);
  lp.b = Vector(static_cast<Eigen::Index>(cons.size()));
  for (std::size_t i = 0; i < cons.size(); ++i) {
    lp.a.row(i) = dense(cons[i].form).transpose();
    lp.b(i) = cons[i].rhs;
    lp.relations.push_back(cons[i].relation);
  }
  const LpResult r = solve_linear_program(lp, std::max(20000, 50 * options.max_iter));

  ConicSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.relations = lp.relations;
  sol.sense = problem.sense();
  sol.farkas = r.farkas;
  sol.blocks.resize(blocks.size());
  if (r.status == SolveStatus::optimal) {
    sol.primal_objective = r.objective;
    sol.sensitivity = r.sensitivity;
    sol.dual_objective = lp.b.dot(r.sensitivity);
    // Dual objective includes no bound terms: every lower bound is zero or absent.
    sol.gap = std::abs(sol.primal_objective - sol.dual_objective) /
              (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    double viol = 0.0;
    const Vector ax = lp.a * r.x - lp.b;
    for (int i = 0; i < ax.size(); ++i) {
      const double v = lp.relations[i] == Relation::equal ? std::abs(ax(i))
                       : lp.relations[i] == Relation::less_equal ? std::max(0.0, ax(i))
                                                                  : std::max(0.0, -ax(i));
      viol = std::max(viol, v);
    }
    sol.primal_residual = viol / (1.0 + lp.b.norm());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      sol.blocks[k] = r.x.segment(offset[k], blocks[k].size);
    }
  }
  return sol;
}

}  // namespace consist::conic

#include "ndf/semigroup.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ndf {

Trajectory flow(const Form& form, const Field& u0, double t_final, int steps,
                const MeasureSpace& space, const SolverConfig& cfg) {
  space.require_compatible(u0);
  if (steps < 1) throw std::invalid_argument("flow: steps must be >= 1");
  if (!(t_final >= 0.0)) throw std::invalid_argument("flow: t_final must be nonnegative");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.energies.push_back(form.evaluate(u0));
  if (t_final == 0.0) {
    traj.step_size = 0.0;
    return traj;
  }
  const double tau = t_final / steps;
  traj.step_size = tau;

  Field u = u0;
  for (int k = 1; k <= steps; ++k) {
    ProxResult r = prox(form, u, tau, space, cfg);
    traj.max_prox_residual = std::max(traj.max_prox_residual, r.residual);
    if (!r.converged) {
      traj.complete = false;
      traj.failure = "prox failed at step " + std::to_string(k) + ": " + r.message;
      return traj;
    }
    u = r.minimizer;
    traj.times.push_back(k * tau);
    traj.states.push_back(u);
    traj.energies.push_back(form.evaluate(u));
  }
  return traj;
}

Field exact_quadratic_flow(const Eigen::MatrixXd& q, const Field& u0, double t,
                           const MeasureSpace& space) {
  space.require_compatible(u0);
  if (q.rows() != space.size() || q.cols() != space.size()) {
    throw std::invalid_argument("exact_quadratic_flow: matrix size mismatch");
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("exact_quadratic_flow: matrix must be symmetric");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("exact_quadratic_flow: t must be nonnegative");

  // generalized problem Q phi = mu M phi; modes decay like exp(-2 mu t)
  Eigen::MatrixXd mmat = space.weights().asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(q, mmat);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("exact_quadratic_flow: eigendecomposition failed");
  }
  const Eigen::VectorXd coeff =
      es.eigenvectors().transpose() * (space.weights().asDiagonal() * u0.values());
  const Eigen::ArrayXd decay = (-2.0 * t * es.eigenvalues().array()).exp();
  return Field(es.eigenvectors() * (decay * coeff.array()).matrix());
}

MarkovProbeRecord markov_probe(const Form& form, std::span<const ProbePair> pairs,
                               std::span<const double> t_grid, std::span<const double> p_grid,
                               const MeasureSpace& space, const SolverConfig& cfg,
                               int steps_per_time) {
  if (pairs.empty() || t_grid.empty() || p_grid.empty()) {
    throw std::invalid_argument("markov_probe: grids and pairs must be nonempty");
  }
  MarkovProbeRecord rec;
  rec.pairs = static_cast<int>(pairs.size());
  rec.t_grid.assign(t_grid.begin(), t_grid.end());
  rec.p_grid.assign(p_grid.begin(), p_grid.end());
  rec.steps_per_time = steps_per_time;

  for (const auto& pair : pairs) {
    for (double t : t_grid) {
      Trajectory tu = flow(form, pair.u, t, steps_per_time, space, cfg);
      Trajectory tv = flow(form, pair.v, t, steps_per_time, space, cfg);
      if (!tu.complete || !tv.complete) {
        rec.solver_trouble = true;
        continue;
      }
      // inequalities degrade with the accumulated solver residual
      const double tol =
          1e-8 + 10.0 * steps_per_time * std::max(tu.max_prox_residual, tv.max_prox_residual);
      const Field& fu = tu.states.back();
      const Field& fv = tv.states.back();

      for (double p : p_grid) {
        ++rec.checks;
        const double before = space.lp_norm(pair.u - pair.v, p);
        const double after = space.lp_norm(fu - fv, p);
        const double margin = after - before;
        rec.worst_contraction_margin = std::max(rec.worst_contraction_margin, margin);
        if (margin > tol) {
          rec.violations.push_back({"lp_contraction", t, p, margin, pair.u, pair.v});
        }
      }
      if (pair.ordered) {
        ++rec.checks;
        const double margin = -(fu.values() - fv.values()).minCoeff();
        rec.worst_order_margin = std::max(rec.worst_order_margin, margin);
        if (margin > tol) {
          rec.violations.push_back({"order_preservation", t, 0.0, margin, pair.u, pair.v});
        }
      }
      rec.tolerance = std::max(rec.tolerance, tol);
    }
  }
  return rec;
}

}  // namespace ndf

#pragma once

#include "ndf/form.hpp"
#include "ndf/prox.hpp"
#include "ndf/report.hpp"
#include "ndf/sampler.hpp"
#include "ndf/space.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace ndf {

struct AuditOptions {
  std::uint64_t seed = 20240901;
  int budget_scale = 1;  // multiplies every per-check sample count
  double closed_form_tol = 1e-8;
  double prox_tol = 1e-5;
  SolverConfig solver;
  std::vector<double> t_grid = {0.01, 0.1, 1.0};
  std::vector<double> p_grid = {1.0, 2.0, std::numeric_limits<double>::infinity()};
  int markov_pairs = 50;
};

/// E(u v v) + E(u ^ v) <= E(u) + E(v) over sampled pairs.
PropertyRecord check_minmax(const Form& form, const MeasureSpace& space, int n_samples,
                            double tol, FieldSampler& sampler);

/// Both readings of the truncation-shift inequality, recorded separately:
/// the symmetric one E(H_a(u,v)) + E(H_a(v,u)) <= E(u) + E(v) and the
/// one-sided 2 E(H_a(u,v)) <= E(u) + E(v). Only the symmetric reading
/// enters the verdict; the one-sided one fails even for classical
/// diffusion energies (take a = 0 and E(v) > E(u)).
std::pair<PropertyRecord, PropertyRecord> check_h_alpha(const Form& form,
                                                        const MeasureSpace& space, int n_samples,
                                                        const std::vector<double>& alpha_grid,
                                                        double tol, FieldSampler& sampler);

/// E(phi(u)) <= E(u) for the canonical 1-Lipschitz maps fixing 0 plus
/// sampled piecewise-linear ones; the negation margin is kept separately.
struct ContractionRecords {
  PropertyRecord pool;      // identity, clamp, |.|, positive part, sampled members
  PropertyRecord negation;  // E(-u) <= E(u)
};
ContractionRecords check_normal_contraction(const Form& form, const MeasureSpace& space,
                                            int n_samples, int n_phi, double tol,
                                            FieldSampler& sampler);

struct HomogeneityLocalityRecords {
  PropertyRecord homogeneity;       // E(nu u) = nu^2 E(u) for nu >= 0
  PropertyRecord negative_scaling;  // nu < 0; fails exactly with sign asymmetry
  PropertyRecord locality;          // additivity over uncoupled disjoint supports
};
HomogeneityLocalityRecords check_homogeneity_and_locality(const Form& form,
                                                          const MeasureSpace& space,
                                                          int n_samples, double tol,
                                                          FieldSampler& sampler);

/// Triangle inequality and homogeneity of sqrt(|u|^2_m + E(u)), the
/// Lipschitz action bound E(phi(u)) <= L^2 E(u), and the product identity
/// behind the bounded-algebra property.
PropertyRecord check_energy_norm(const Form& form, const MeasureSpace& space, int n_samples,
                                 double tol, FieldSampler& sampler);

PropertyReport full_audit(const Form& form, const MeasureSpace& space,
                          const AuditOptions& options = {});

}  // namespace ndf

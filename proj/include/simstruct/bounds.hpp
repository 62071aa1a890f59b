#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"

namespace simstruct {

/// Smallest L with atom_norm(x) <= L ||x||_F on the atom's shape.
inline double lipschitz(const NormAtom& atom) {
  if (atom.kind() == NormAtom::Kind::EntrywiseL1) return std::sqrt(static_cast<double>(shape_size(atom.shape())));
  auto [rows, cols] = matricized_dims(atom.shape(), atom.bipartition());
  return std::sqrt(static_cast<double>(std::min(rows, cols)));
}

/// f(x0)^2 / ||x0||_F^2: effective sparsity for l1, effective rank for nuclear atoms.
template <class Scalar>
double f_rank(const DenseTensor<Scalar>& x0, const NormAtom& atom) {
  const double fro2 = x0.squared_norm();
  if (!(fro2 > 0)) throw DegenerateSignal("f-rank of the zero signal");
  const double f = atom_norm(x0, atom);
  return f * f / fro2;
}

struct BoundReport {
  std::vector<std::string> atoms;
  std::vector<double> lipschitz;
  std::vector<double> f_ranks;
  /// d ||x0||_(i)^2 / (L_i^2 ||x0||_F^2) - 2 per atom.
  std::vector<double> kappas;
  double kappa = 0.0;
  /// min_i ||x0||_(i) / (L_i ||x0||_F)
  double cos_theta = 0.0;
  Index dimension = 0;
};

/// Lower bound on the number of measurements below which recovery of x0 by
/// any weighted maximum (hence any weighted sum) of the atoms is unlikely.
template <class Scalar>
BoundReport bound_report(const DenseTensor<Scalar>& x0, const std::vector<NormAtom>& atoms) {
  if (atoms.empty()) throw Error("bound report needs at least one atom");
  BoundReport r;
  r.dimension = x0.size();
  const double d = static_cast<double>(r.dimension);
  r.kappa = std::numeric_limits<double>::infinity();
  r.cos_theta = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms) {
    const double L = lipschitz(a);
    const double fr = f_rank(x0, a);
    r.atoms.push_back(a.name());
    r.lipschitz.push_back(L);
    r.f_ranks.push_back(fr);
    r.kappas.push_back(d * fr / (L * L) - 2.0);
    r.kappa = std::min(r.kappa, r.kappas.back());
    r.cos_theta = std::min(r.cos_theta, std::sqrt(fr) / L);
  }
  return r;
}

template <class Scalar>
double kappa_general(const DenseTensor<Scalar>& x0, const std::vector<NormAtom>& atoms) {
  return bound_report(x0, atoms).kappa;
}

/// min(1, 4 exp(-(kappa - m)^2 / (8 kappa))), valid for m <= kappa.
inline double success_prob_upper(double m, double kappa) {
  if (m < 0) throw BoundNotApplicable("number of measurements must be >= 0");
  if (m > kappa) throw BoundNotApplicable("success bound needs m <= kappa");
  const double gap = kappa - m;
  return std::min(1.0, 4.0 * std::exp(-gap * gap / (8.0 * kappa)));
}

/// d sin^2(theta) + 2, an upper bound on the statistical dimension of a
/// circular cone of half-angle theta in dimension d.
inline double circ_cone_statdim_upper(double d, double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) throw BoundNotApplicable("theta must lie in [0, pi/2]");
  const double s = std::sin(theta);
  return d * s * s + 2.0;
}

/// r min(n_bar, s1 s2) - 2 with n_bar = max(n1, n2): the bound for flat
/// (s1, s2)-sparse rank-r matrices.
inline double sparse_lowrank_kappa(Index n1, Index n2, Index r, Index s1, Index s2) {
  if (n1 < 1 || n2 < 1 || r < 1 || s1 < 1 || s2 < 1 || s1 > n1 || s2 > n2)
    throw InvalidModel("sparse_lowrank_kappa: need 1 <= r and 1 <= s_i <= n_i");
  const double n_bar = static_cast<double>(n1 * n2) / static_cast<double>(std::min(n1, n2));
  return static_cast<double>(r) * std::min(n_bar, static_cast<double>(s1 * s2)) - 2.0;
}

}  // namespace simstruct

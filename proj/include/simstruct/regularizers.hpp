#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/linalg.hpp"
#include "simstruct/core/tensor.hpp"

namespace simstruct {

/// A single norm on a fixed tensor shape: entrywise l1, or the nuclear norm
/// of a b-matricization.
class NormAtom {
 public:
  enum class Kind { EntrywiseL1, Nuclear };

  static NormAtom l1(Shape shape) { return NormAtom(Kind::EntrywiseL1, {}, std::move(shape)); }

  static NormAtom nuclear(Shape shape, Bipartition b) {
    b.validate(static_cast<int>(shape.size()));
    return NormAtom(Kind::Nuclear, std::move(b), std::move(shape));
  }

  /// Nuclear norm of a matrix (b = {1}).
  static NormAtom nuclear(Shape shape) {
    if (shape.size() != 2) throw InvalidBipartition("plain nuclear atom needs an order-2 shape");
    return nuclear(std::move(shape), Bipartition{0});
  }

  Kind kind() const { return kind_; }
  const Bipartition& bipartition() const { return b_; }
  const Shape& shape() const { return shape_; }

  std::string name() const { return kind_ == Kind::EntrywiseL1 ? "l1" : "nuc" + b_.to_string(); }

  template <class Scalar>
  void check(const DenseTensor<Scalar>& x) const {
    if (x.shape() != shape_)
      throw ShapeMismatch(name() + " atom expects shape " + shape_string(shape_) + ", got " +
                          shape_string(x.shape()));
  }

  friend bool operator==(const NormAtom&, const NormAtom&) = default;

 private:
  NormAtom(Kind k, Bipartition b, Shape s) : kind_(k), b_(std::move(b)), shape_(std::move(s)) {}

  Kind kind_;
  Bipartition b_;
  Shape shape_;
};

template <class Scalar>
double atom_norm(const DenseTensor<Scalar>& x, const NormAtom& a) {
  a.check(x);
  if (a.kind() == NormAtom::Kind::EntrywiseL1) return x.data().template lpNorm<1>();
  return singular_values(matricize(x, a.bipartition()).as_matrix()).sum();
}

/// l-infinity norm for l1 atoms, spectral norm of the matricization for nuclear atoms.
template <class Scalar>
double atom_dual_norm(const DenseTensor<Scalar>& x, const NormAtom& a) {
  a.check(x);
  if (a.kind() == NormAtom::Kind::EntrywiseL1) return x.data().template lpNorm<Eigen::Infinity>();
  const auto s = singular_values(matricize(x, a.bipartition()).as_matrix());
  return s.size() ? s[0] : 0.0;
}

namespace detail {

/// Shrinks the modulus of every entry by t, keeping phases.
template <class Scalar>
void soft_threshold_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, double t) {
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    v[i] = mag > t ? v[i] * ((mag - t) / mag) : Scalar(0);
  }
}

/// Applies f to the singular values of the b-matricization of x and reassembles.
template <class Scalar, class F>
DenseTensor<Scalar> map_singular_values(const DenseTensor<Scalar>& x, const Bipartition& b, F&& f) {
  auto m = matricize(x, b);
  auto dec = svd(m);
  Eigen::VectorXd s = f(dec.singular_values);
  m.as_matrix() = dec.U * s.cast<Scalar>().asDiagonal() * dec.V.adjoint();
  return dematricize(m, b, x.shape());
}

}  // namespace detail

/// Proximal map of t * atom_norm: soft-thresholding of entries (l1) or of the
/// singular values of the matricization (nuclear).
template <class Scalar>
DenseTensor<Scalar> prox_atom(const DenseTensor<Scalar>& x, const NormAtom& a, double t) {
  a.check(x);
  if (!(t > 0)) throw Error("prox_atom: step must be positive");
  if (a.kind() == NormAtom::Kind::EntrywiseL1) {
    auto out = x;
    detail::soft_threshold_inplace(out.data(), t);
    return out;
  }
  return detail::map_singular_values(x, a.bipartition(), [t](Eigen::VectorXd s) {
    return (s.array() - t).cwiseMax(0.0).matrix().eval();
  });
}

/// Weighted sum or weighted maximum of norm atoms.
class CompositeRegularizer {
 public:
  enum class Mode { Sum, Max };

  CompositeRegularizer(Mode mode, std::vector<NormAtom> atoms, std::vector<double> weights)
      : mode_(mode), atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw Error("composite regularizer needs at least one atom");
    if (weights_.size() != atoms_.size())
      throw Error("composite regularizer: " + std::to_string(weights_.size()) + " weights for " +
                  std::to_string(atoms_.size()) + " atoms");
    for (double w : weights_)
      if (!(w > 0) || !std::isfinite(w)) throw Error("composite regularizer weights must be positive");
    for (const auto& a : atoms_)
      if (a.shape() != atoms_.front().shape()) throw ShapeMismatch("atoms disagree on target shape");
  }

  Mode mode() const { return mode_; }
  const std::vector<NormAtom>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  const Shape& shape() const { return atoms_.front().shape(); }

  std::string describe() const {
    std::string s = mode_ == Mode::Sum ? "sum(" : "max(";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i) s += ", ";
      char buf[64];
      std::snprintf(buf, sizeof buf, "=%.17g", weights_[i]);
      s += atoms_[i].name() + buf;
    }
    return s + ")";
  }

 private:
  Mode mode_;
  std::vector<NormAtom> atoms_;
  std::vector<double> weights_;
};

template <class Scalar>
std::vector<double> atom_norms(const DenseTensor<Scalar>& x, const std::vector<NormAtom>& atoms) {
  std::vector<double> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(atom_norm(x, a));
  return out;
}

template <class Scalar>
double composite_norm(const DenseTensor<Scalar>& x, const CompositeRegularizer& r) {
  const auto norms = atom_norms(x, r.atoms());
  double acc = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double term = r.weights()[i] * norms[i];
    acc = r.mode() == CompositeRegularizer::Mode::Sum ? acc + term : std::max(acc, term);
  }
  return acc;
}

/// mu*_i = 1 / ||x0||_(i): every term of the weighted maximum is active at x0.
template <class Scalar>
std::vector<double> optimal_weights(const DenseTensor<Scalar>& x0, const std::vector<NormAtom>& atoms) {
  std::vector<double> w;
  for (const auto& a : atoms) {
    const double n = atom_norm(x0, a);
    if (!(n > 0)) throw DegenerateSignal("optimal weights undefined: " + a.name() + " norm of x0 is 0");
    w.push_back(1.0 / n);
  }
  return w;
}

}  // namespace simstruct

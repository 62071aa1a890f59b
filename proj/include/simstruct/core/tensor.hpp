#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "simstruct/core/errors.hpp"

namespace simstruct {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

inline constexpr int kMaxOrder = 8;

enum class Field { Real, Complex };

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class Scalar>
inline constexpr Field field_of = is_complex_v<Scalar> ? Field::Complex : Field::Real;

inline std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

/// Set of tensor modes joined into the row index of a matricization.
///
/// Modes are stored zero-based and sorted; the user-facing text form
/// (`[1,2]`) is one-based.
class Bipartition {
 public:
  Bipartition() = default;
  explicit Bipartition(std::vector<int> modes) : modes_(std::move(modes)) {
    std::sort(modes_.begin(), modes_.end());
    if (std::adjacent_find(modes_.begin(), modes_.end()) != modes_.end())
      throw InvalidBipartition("bipartition lists a mode twice");
  }
  Bipartition(std::initializer_list<int> modes) : Bipartition(std::vector<int>(modes)) {}

  /// Builds a bipartition from one-based mode numbers.
  static Bipartition from_one_based(const std::vector<int>& modes) {
    std::vector<int> zero;
    zero.reserve(modes.size());
    for (int m : modes) zero.push_back(m - 1);
    return Bipartition(std::move(zero));
  }

  const std::vector<int>& modes() const { return modes_; }
  bool contains(int mode) const { return std::binary_search(modes_.begin(), modes_.end(), mode); }

  std::vector<int> complement(int order) const {
    std::vector<int> rest;
    for (int i = 0; i < order; ++i)
      if (!contains(i)) rest.push_back(i);
    return rest;
  }

  /// Throws unless the bipartition is valid for a tensor of the given order.
  /// A full bipartition (b = [L]) is accepted only when `allow_full` is set.
  void validate(int order, bool allow_full = false) const {
    if (modes_.empty()) throw InvalidBipartition("empty bipartition");
    if (modes_.front() < 0 || modes_.back() >= order)
      throw InvalidBipartition("bipartition " + to_string() + " out of range for order " +
                               std::to_string(order));
    if (!allow_full && static_cast<int>(modes_.size()) == order)
      throw InvalidBipartition("bipartition " + to_string() + " is not proper for order " +
                               std::to_string(order));
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(modes_[i] + 1);
    }
    return s + "]";
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
  friend auto operator<=>(const Bipartition&, const Bipartition&) = default;

 private:
  std::vector<int> modes_;
};

/// Ordered family of bipartitions defining a multi-matricization rank.
class BipartitionSet {
 public:
  BipartitionSet() = default;
  explicit BipartitionSet(std::vector<Bipartition> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i)
      for (std::size_t j = i + 1; j < parts_.size(); ++j)
        if (parts_[i] == parts_[j])
          throw InvalidBipartition("duplicate bipartition " + parts_[i].to_string());
  }

  const std::vector<Bipartition>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }

  /// ({1},{2},...,{L})
  static BipartitionSet hosvd(int order) {
    std::vector<Bipartition> p;
    for (int i = 0; i < order; ++i) p.emplace_back(std::vector<int>{i});
    return BipartitionSet(std::move(p));
  }
  /// ({1},{1,2},...,{1,...,L-1})
  static BipartitionSet tensor_train(int order) {
    std::vector<Bipartition> p;
    std::vector<int> modes;
    for (int l = 0; l + 1 < order; ++l) {
      modes.push_back(l);
      p.emplace_back(modes);
    }
    return BipartitionSet(std::move(p));
  }
  static BipartitionSet b2() { return BipartitionSet({Bipartition{0, 1}, Bipartition{0, 2}}); }
  static BipartitionSet b3() {
    return BipartitionSet({Bipartition{0, 1}, Bipartition{0, 2}, Bipartition{0, 3}});
  }
  static BipartitionSet square_deal() { return BipartitionSet({Bipartition{0, 1}}); }

 private:
  std::vector<Bipartition> parts_;
};

/// Dense multi-index array stored flat in row-major order.
template <class Scalar>
class DenseTensor {
 public:
  using scalar_type = Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DenseTensor() = default;

  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape();
    data_ = Vector::Zero(shape_size(shape_));
  }

  DenseTensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape();
    if (data_.size() != shape_size(shape_))
      throw ShapeMismatch("data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_string(shape_));
  }

  static DenseTensor from_matrix(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic,
                                                                      Eigen::Dynamic>>& m) {
    DenseTensor t(Shape{m.rows(), m.cols()});
    t.as_matrix() = m;
    return t;
  }

  static DenseTensor from_vector(std::initializer_list<Scalar> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (const auto& x : values) v[i++] = x;
    const Index n = v.size();
    return DenseTensor(Shape{n}, std::move(v));
  }

  const Shape& shape() const { return shape_; }
  int order() const { return static_cast<int>(shape_.size()); }
  Index size() const { return data_.size(); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  Scalar& operator[](Index i) { return data_[i]; }
  const Scalar& operator[](Index i) const { return data_[i]; }

  Scalar& operator()(Index i, Index j) { return data_[i * shape_[1] + j]; }
  const Scalar& operator()(Index i, Index j) const { return data_[i * shape_[1] + j]; }

  /// Row-major view of an order-2 tensor.
  Eigen::Map<Matrix> as_matrix() {
    require_order2();
    return Eigen::Map<Matrix>(data_.data(), shape_[0], shape_[1]);
  }
  Eigen::Map<const Matrix> as_matrix() const {
    require_order2();
    return Eigen::Map<const Matrix>(data_.data(), shape_[0], shape_[1]);
  }

  Real frobenius_norm() const { return data_.norm(); }
  Real squared_norm() const { return data_.squaredNorm(); }
  bool all_finite() const { return data_.allFinite(); }

  DenseTensor& operator+=(const DenseTensor& o) {
    require_same_shape(o);
    data_ += o.data_;
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    require_same_shape(o);
    data_ -= o.data_;
    return *this;
  }
  DenseTensor& operator*=(Scalar a) {
    data_ *= a;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(Scalar s, DenseTensor a) { return a *= s; }
  friend DenseTensor operator*(DenseTensor a, Scalar s) { return a *= s; }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  void require_same_shape(const DenseTensor& o) const {
    if (o.shape_ != shape_)
      throw ShapeMismatch("shape " + shape_string(o.shape_) + " vs " + shape_string(shape_));
  }

 private:
  void check_shape() const {
    if (shape_.empty() || static_cast<int>(shape_.size()) > kMaxOrder)
      throw ShapeMismatch("tensor order must be in 1..8, got " + std::to_string(shape_.size()));
    for (Index n : shape_)
      if (n <= 0) throw ShapeMismatch("non-positive dimension in shape " + shape_string(shape_));
  }
  void require_order2() const {
    if (shape_.size() != 2) throw ShapeMismatch("matrix view needs an order-2 tensor");
  }

  Shape shape_;
  Vector data_;
};

using RealTensor = DenseTensor<double>;
using ComplexTensor = DenseTensor<std::complex<double>>;

/// Real part of the Hilbert-Schmidt inner product, Re tr(a^H b).
template <class Scalar>
double real_inner(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  a.require_same_shape(b);
  return std::real(a.data().dot(b.data()));
}

namespace detail {

/// Row-major strides of a shape.
inline std::vector<Index> strides(const Shape& shape) {
  std::vector<Index> s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * shape[i + 1];
  return s;
}

/// Gathers `src` (with shape `shape`) into `dst` laid out with modes in the
/// order `perm`. With `inverse` the scatter direction is used instead.
template <class Scalar>
void permute_modes(const Scalar* src, Scalar* dst, const Shape& shape, const std::vector<int>& perm,
                   bool inverse) {
  const int order = static_cast<int>(shape.size());
  const auto in_strides = strides(shape);
  Shape out_shape(order);
  std::vector<Index> step(order);
  for (int k = 0; k < order; ++k) {
    out_shape[k] = shape[perm[k]];
    step[k] = in_strides[perm[k]];
  }
  const Index total = shape_size(shape);
  std::vector<Index> counter(order, 0);
  Index in = 0;
  for (Index out = 0; out < total; ++out) {
    if (inverse)
      dst[in] = src[out];
    else
      dst[out] = src[in];
    for (int k = order - 1; k >= 0; --k) {
      ++counter[k];
      in += step[k];
      if (counter[k] < out_shape[k]) break;
      in -= step[k] * out_shape[k];
      counter[k] = 0;
    }
  }
}

inline std::vector<int> matricization_order(const Bipartition& b, int order) {
  std::vector<int> perm = b.modes();
  for (int m : b.complement(order)) perm.push_back(m);
  return perm;
}

}  // namespace detail

/// Row/column dimensions (n_b, n_{b^c}) of the b-matricization.
inline std::pair<Index, Index> matricized_dims(const Shape& shape, const Bipartition& b) {
  Index rows = 1;
  Index cols = 1;
  for (int i = 0; i < static_cast<int>(shape.size()); ++i) (b.contains(i) ? rows : cols) *= shape[i];
  return {rows, cols};
}

/// b-matricization: modes in b (ascending) form the row index, the rest the
/// column index. `allow_full` permits b = [L], giving a single column.
template <class Scalar>
DenseTensor<Scalar> matricize(const DenseTensor<Scalar>& t, const Bipartition& b,
                              bool allow_full = false) {
  b.validate(t.order(), allow_full);
  auto [rows, cols] = matricized_dims(t.shape(), b);
  DenseTensor<Scalar> out(Shape{rows, cols});
  detail::permute_modes(t.data().data(), out.data().data(), t.shape(),
                        detail::matricization_order(b, t.order()), false);
  return out;
}

/// Inverse of matricize for a tensor of the given shape.
template <class Scalar>
DenseTensor<Scalar> dematricize(const DenseTensor<Scalar>& m, const Bipartition& b,
                                const Shape& shape, bool allow_full = false) {
  b.validate(static_cast<int>(shape.size()), allow_full);
  auto [rows, cols] = matricized_dims(shape, b);
  if (m.order() != 2 || m.shape()[0] != rows || m.shape()[1] != cols)
    throw ShapeMismatch("matrix " + shape_string(m.shape()) + " is not a " + b.to_string() +
                        "-matricization of " + shape_string(shape));
  DenseTensor<Scalar> out(shape);
  detail::permute_modes(m.data().data(), out.data().data(), shape,
                        detail::matricization_order(b, static_cast<int>(shape.size())), true);
  return out;
}

/// Outer product x1 ⊗ x2 ⊗ ... of vectors.
template <class Scalar>
DenseTensor<Scalar> outer_product(const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& f) {
  Shape shape;
  for (const auto& v : f) shape.push_back(v.size());
  DenseTensor<Scalar> t(shape);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> acc = f.front();
  for (std::size_t j = 1; j < f.size(); ++j) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> next(acc.size() * f[j].size());
    for (Index a = 0; a < acc.size(); ++a) next.segment(a * f[j].size(), f[j].size()) = acc[a] * f[j];
    acc = std::move(next);
  }
  t.data() = acc;
  return t;
}

}  // namespace simstruct

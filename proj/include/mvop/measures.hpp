#pragma once

// Moment functionals alpha -> integral of x^alpha dmu. Only measures with
// closed-form moments ship, so the exact pipeline never sees quadrature error.

#include "mvop/errors.hpp"
#include "mvop/graded_basis.hpp"
#include "mvop/poly.hpp"

#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace mvop {

template <Scalar T>
class MomentFunctional {
 public:
  virtual ~MomentFunctional() = default;
  virtual int dimension() const = 0;
  virtual T moment(const MultiIndex& alpha) const = 0;
};

template <Scalar T>
using MeasurePtr = std::shared_ptr<const MomentFunctional<T>>;

/// Lebesgue measure on a box times a polynomial weight.
template <Scalar T>
class BoxMeasure final : public MomentFunctional<T> {
 public:
  BoxMeasure(std::vector<std::pair<T, T>> bounds, MPoly<T> weight)
      : bounds_(std::move(bounds)), weight_(std::move(weight)) {
    if (bounds_.empty()) throw DimensionMismatch("box needs at least one interval");
    if (weight_.dimension() != static_cast<int>(bounds_.size()))
      throw DimensionMismatch("box weight dimension does not match bounds");
  }
  explicit BoxMeasure(std::vector<std::pair<T, T>> bounds)
      : BoxMeasure(bounds, MPoly<T>::constant(static_cast<int>(bounds.size()), T(1))) {}

  int dimension() const override { return static_cast<int>(bounds_.size()); }

  T moment(const MultiIndex& alpha) const override {
    if (alpha.dimension() != dimension()) throw DimensionMismatch("moment: dimension mismatch");
    T total(0);
    for (const auto& [beta, c] : weight_.terms()) {
      T prod = c;
      for (int i = 0; i < dimension(); ++i) {
        int e = alpha[i] + beta[i] + 1;
        const auto& [a, b] = bounds_[static_cast<std::size_t>(i)];
        prod *= (ipow(b, e) - ipow(a, e)) / from_int<T>(e);
      }
      total += prod;
    }
    return total;
  }

  const std::vector<std::pair<T, T>>& bounds() const { return bounds_; }
  const MPoly<T>& weight() const { return weight_; }

 private:
  std::vector<std::pair<T, T>> bounds_;
  MPoly<T> weight_;
};

/// sum_s w_s delta_{x_s}.
template <Scalar T>
class DiscreteMeasure final : public MomentFunctional<T> {
 public:
  DiscreteMeasure(std::vector<std::vector<T>> points, std::vector<T> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty()) throw Error("discrete measure needs at least one point");
    if (points_.size() != weights_.size()) throw DimensionMismatch("points and weights differ in length");
    dim_ = static_cast<int>(points_.front().size());
    if (dim_ < 1) throw DimensionMismatch("discrete measure points need dimension >= 1");
    for (const auto& p : points_)
      if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("discrete measure points differ in dimension");
    if constexpr (!ScalarTraits<T>::complex) {
      for (const auto& w : weights_)
        if (!(w > 0)) throw Error("discrete measure weights must be positive");
    }
  }

  int dimension() const override { return dim_; }

  T moment(const MultiIndex& alpha) const override {
    if (alpha.dimension() != dim_) throw DimensionMismatch("moment: dimension mismatch");
    T total(0);
    for (std::size_t s = 0; s < points_.size(); ++s) {
      T v = weights_[s];
      for (int i = 0; i < dim_; ++i) v *= ipow(points_[s][static_cast<std::size_t>(i)], alpha[i]);
      total += v;
    }
    return total;
  }

 private:
  std::vector<std::vector<T>> points_;
  std::vector<T> weights_;
  int dim_ = 0;
};

/// Q(x) dmu(x): moment(alpha) = sum_beta c_beta base.moment(alpha + beta).
template <Scalar T>
class PerturbedMeasure final : public MomentFunctional<T> {
 public:
  PerturbedMeasure(MeasurePtr<T> base, MPoly<T> q) : base_(std::move(base)), q_(std::move(q)) {
    if (!base_) throw Error("perturbed measure needs a base measure");
    if (q_.dimension() != base_->dimension()) throw DimensionMismatch("perturbation dimension mismatch");
  }

  int dimension() const override { return base_->dimension(); }

  T moment(const MultiIndex& alpha) const override {
    T total(0);
    for (const auto& [beta, c] : q_.terms()) total += c * base_->moment(alpha + beta);
    return total;
  }

  const MPoly<T>& perturbation() const { return q_; }
  const MeasurePtr<T>& base() const { return base_; }

 private:
  MeasurePtr<T> base_;
  MPoly<T> q_;
};

template <Scalar T>
MeasurePtr<T> perturb(MeasurePtr<T> base, const MPoly<T>& q) {
  return std::make_shared<PerturbedMeasure<T>>(std::move(base), q);
}

}  // namespace mvop

// Copyright 2026 The drm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Derivative-carrying scalars.
//
// Two scalar types conform to the scalar contract used by every templated
// algorithm in this library (plain double being the third):
//
//   Dual<N>  forward mode, value plus an N-wide vector of partials.
//            N = Eigen::Dynamic picks the width at construction time.
//   Var      reverse mode, value plus a node handle into a Tape.
//
// The value channel of both types is computed with exactly the same floating
// point operations, in the same order, as plain double evaluation.
// Comparisons read the value channel only; the derivative at a kink is the
// derivative of the branch taken (abs'(0) = 0).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "drm/errors.hpp"

namespace drm::ad {

// ---------------------------------------------------------------------------
// Forward mode
// ---------------------------------------------------------------------------

template <int N = Eigen::Dynamic>
class Dual {
 public:
  using Gradient = Eigen::Matrix<double, N, 1>;

  Dual() : value_(0.0) { zero_grad(); }
  Dual(double v) : value_(v) { zero_grad(); }  // NOLINT: implicit constant
  Dual(double v, Gradient g) : value_(v), grad_(std::move(g)) {}

  // Seed variable `index` of a width-`width` dual.
  static Dual variable(double v, int index, int width = N) {
    Gradient g = Gradient::Zero(width);
    g(index) = 1.0;
    return Dual(v, std::move(g));
  }

  double value() const { return value_; }
  const Gradient& grad() const { return grad_; }
  // Dynamic-width constants carry an empty gradient.
  bool is_constant() const {
    if constexpr (N == Eigen::Dynamic) return grad_.size() == 0;
    return false;
  }
  double partial(int i) const { return is_constant() ? 0.0 : grad_(i); }

  Dual operator-() const { return Dual(-value_, scaled(grad_, -1.0)); }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    return Dual(a.value_ + b.value_, combine(a.grad_, 1.0, b.grad_, 1.0));
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    return Dual(a.value_ - b.value_, combine(a.grad_, 1.0, b.grad_, -1.0));
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return Dual(a.value_ * b.value_, combine(a.grad_, b.value_, b.grad_, a.value_));
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double v = a.value_ / b.value_;
    return Dual(v, combine(a.grad_, 1.0 / b.value_, b.grad_, -v / b.value_));
  }

  // Chain rule for a unary elementary function with local derivative d.
  Dual chain(double v, double d) const { return Dual(v, scaled(grad_, d)); }

 private:
  void zero_grad() {
    if constexpr (N != Eigen::Dynamic) grad_.setZero();
  }
  static Gradient scaled(const Gradient& g, double c) { return g * c; }
  static Gradient combine(const Gradient& ga, double ca, const Gradient& gb, double cb) {
    if constexpr (N == Eigen::Dynamic) {
      if (ga.size() == 0) return gb * cb;
      if (gb.size() == 0) return ga * ca;
    }
    return ga * ca + gb * cb;
  }

  double value_;
  Gradient grad_;
};

// ---------------------------------------------------------------------------
// Reverse mode
// ---------------------------------------------------------------------------

enum class Op : std::uint8_t {
  kInput, kAdd, kSub, kMul, kDiv, kNeg, kSin, kCos, kTan, kAsin, kAcos, kAtan,
  kAtan2, kSqrt, kExp, kLog, kLog1p, kTanh, kAbs, kMin, kMax, kPow,
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kNeg: return "neg";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kTan: return "tan";
    case Op::kAsin: return "asin";
    case Op::kAcos: return "acos";
    case Op::kAtan: return "atan";
    case Op::kAtan2: return "atan2";
    case Op::kSqrt: return "sqrt";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kLog1p: return "log1p";
    case Op::kTanh: return "tanh";
    case Op::kAbs: return "abs";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kPow: return "pow";
  }
  return "unknown";
}

// Append-only record of elementary operations. Nodes are pushed in
// evaluation order, so the storage order is a topological order and a
// single reverse pass visits every node once.
//
// A tape is owned by exactly one evaluation; it is not thread-safe.
class Tape {
 public:
  struct Node {
    int lhs;
    int rhs;
    double dlhs;
    double drhs;
    double value;
    Op op;
  };

  // Node storage is recycled through a per-thread spare buffer, so repeated
  // gradients of the same function do not re-allocate.
  Tape() {
    nodes_.swap(spare());
    nodes_.clear();
    if (nodes_.capacity() < 1024) nodes_.reserve(1024);
  }
  ~Tape() {
    if (nodes_.capacity() > spare().capacity()) {
      nodes_.clear();
      spare().swap(nodes_);
    }
  }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  int push(Op op, double value, int lhs = -1, double dlhs = 0.0, int rhs = -1,
           double drhs = 0.0) {
    nodes_.push_back(Node{lhs, rhs, dlhs, drhs, value, op});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  // Throws NumericalError naming the first node (in evaluation order, up to
  // and including `last`) whose value or local partial is not finite.
  void check_finite(int last) const {
    for (int i = 0; i <= last; ++i) {
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!std::isfinite(n.value) || !std::isfinite(n.dlhs) || !std::isfinite(n.drhs)) {
        throw NumericalError(std::string("non-finite intermediate produced by '") +
                             op_name(n.op) + "' at tape node " + std::to_string(i));
      }
    }
  }

  // Adjoints of every node with respect to node `output`.
  std::vector<double> adjoints(int output) const {
    std::vector<double> adj(static_cast<std::size_t>(output) + 1, 0.0);
    adj[static_cast<std::size_t>(output)] = 1.0;
    for (int i = output; i >= 0; --i) {
      const double a = adj[static_cast<std::size_t>(i)];
      if (a == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.lhs >= 0) adj[static_cast<std::size_t>(n.lhs)] += n.dlhs * a;
      if (n.rhs >= 0) adj[static_cast<std::size_t>(n.rhs)] += n.drhs * a;
    }
    return adj;
  }

 private:
  static std::vector<Node>& spare() {
    static thread_local std::vector<Node> buffer;
    return buffer;
  }

  std::vector<Node> nodes_;
};

class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT: implicit constant

  static Var input(Tape& tape, double v) { return Var(v, tape.push(Op::kInput, v), &tape); }

  double value() const { return value_; }
  int index() const { return index_; }
  Tape* tape() const { return tape_; }
  bool is_constant() const { return index_ < 0; }

  Var operator-() const { return unary(Op::kNeg, -value_, -1.0); }
  Var& operator+=(const Var& o) { return *this = *this + o; }
  Var& operator-=(const Var& o) { return *this = *this - o; }
  Var& operator*=(const Var& o) { return *this = *this * o; }
  Var& operator/=(const Var& o) { return *this = *this / o; }

  friend Var operator+(const Var& a, const Var& b) {
    return binary(Op::kAdd, a, b, a.value_ + b.value_, 1.0, 1.0);
  }
  friend Var operator-(const Var& a, const Var& b) {
    return binary(Op::kSub, a, b, a.value_ - b.value_, 1.0, -1.0);
  }
  friend Var operator*(const Var& a, const Var& b) {
    return binary(Op::kMul, a, b, a.value_ * b.value_, b.value_, a.value_);
  }
  friend Var operator/(const Var& a, const Var& b) {
    const double v = a.value_ / b.value_;
    return binary(Op::kDiv, a, b, v, 1.0 / b.value_, -v / b.value_);
  }

  Var unary(Op op, double v, double d) const {
    if (tape_ == nullptr) return Var(v);
    return Var(v, tape_->push(op, v, index_, d), tape_);
  }

  static Var binary(Op op, const Var& a, const Var& b, double v, double da, double db) {
    Tape* t = a.tape_ != nullptr ? a.tape_ : b.tape_;
    if (t == nullptr) return Var(v);
    const int ia = a.index_;
    const int ib = b.index_;
    return Var(v, t->push(op, v, ia, ia >= 0 ? da : 0.0, ib, ib >= 0 ? db : 0.0), t);
  }

 private:
  Var(double v, int index, Tape* tape) : value_(v), index_(index), tape_(tape) {}

  double value_ = 0.0;
  int index_ = -1;
  Tape* tape_ = nullptr;
};

// ---------------------------------------------------------------------------
// Scalar traits
// ---------------------------------------------------------------------------

template <typename T>
struct is_dual : std::false_type {};
template <int N>
struct is_dual<Dual<N>> : std::true_type {};

template <typename T>
inline constexpr bool is_ad_scalar_v = is_dual<T>::value || std::is_same_v<T, Var>;

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) { return x.value(); }
inline double value_of(const Var& x) { return x.value(); }

// ---------------------------------------------------------------------------
// Mixed arithmetic with double and comparisons (value channel only)
// ---------------------------------------------------------------------------

#define DRM_AD_MIXED_OPS(T, TEMPLATE_HEAD)                                          \
  TEMPLATE_HEAD inline T operator+(const T& a, double b) { return a + T(b); }       \
  TEMPLATE_HEAD inline T operator+(double a, const T& b) { return T(a) + b; }       \
  TEMPLATE_HEAD inline T operator-(const T& a, double b) { return a - T(b); }       \
  TEMPLATE_HEAD inline T operator-(double a, const T& b) { return T(a) - b; }       \
  TEMPLATE_HEAD inline T operator*(const T& a, double b) { return a * T(b); }       \
  TEMPLATE_HEAD inline T operator*(double a, const T& b) { return T(a) * b; }       \
  TEMPLATE_HEAD inline T operator/(const T& a, double b) { return a / T(b); }       \
  TEMPLATE_HEAD inline T operator/(double a, const T& b) { return T(a) / b; }       \
  TEMPLATE_HEAD inline bool operator<(const T& a, const T& b) { return value_of(a) < value_of(b); }   \
  TEMPLATE_HEAD inline bool operator>(const T& a, const T& b) { return value_of(a) > value_of(b); }   \
  TEMPLATE_HEAD inline bool operator<=(const T& a, const T& b) { return value_of(a) <= value_of(b); } \
  TEMPLATE_HEAD inline bool operator>=(const T& a, const T& b) { return value_of(a) >= value_of(b); } \
  TEMPLATE_HEAD inline bool operator==(const T& a, const T& b) { return value_of(a) == value_of(b); } \
  TEMPLATE_HEAD inline bool operator!=(const T& a, const T& b) { return value_of(a) != value_of(b); } \
  TEMPLATE_HEAD inline bool operator<(const T& a, double b) { return value_of(a) < b; }              \
  TEMPLATE_HEAD inline bool operator>(const T& a, double b) { return value_of(a) > b; }              \
  TEMPLATE_HEAD inline bool operator<=(const T& a, double b) { return value_of(a) <= b; }            \
  TEMPLATE_HEAD inline bool operator>=(const T& a, double b) { return value_of(a) >= b; }            \
  TEMPLATE_HEAD inline bool operator==(const T& a, double b) { return value_of(a) == b; }            \
  TEMPLATE_HEAD inline bool operator!=(const T& a, double b) { return value_of(a) != b; }            \
  TEMPLATE_HEAD inline bool operator<(double a, const T& b) { return a < value_of(b); }              \
  TEMPLATE_HEAD inline bool operator>(double a, const T& b) { return a > value_of(b); }              \
  TEMPLATE_HEAD inline bool operator<=(double a, const T& b) { return a <= value_of(b); }            \
  TEMPLATE_HEAD inline bool operator>=(double a, const T& b) { return a >= value_of(b); }

#define DRM_AD_NO_TEMPLATE
DRM_AD_MIXED_OPS(Var, DRM_AD_NO_TEMPLATE)
DRM_AD_MIXED_OPS(Dual<N>, template <int N>)
#undef DRM_AD_NO_TEMPLATE
#undef DRM_AD_MIXED_OPS

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

#define DRM_AD_UNARY(name, OPCODE, VALUE, DERIV)                       \
  inline Var name(const Var& x) {                                      \
    const double v = x.value();                                        \
    const double f = VALUE;                                            \
    return x.unary(Op::OPCODE, f, DERIV);                              \
  }                                                                    \
  template <int N>                                                     \
  Dual<N> name(const Dual<N>& x) {                                     \
    const double v = x.value();                                        \
    const double f = VALUE;                                            \
    return x.chain(f, DERIV);                                          \
  }

DRM_AD_UNARY(sin, kSin, std::sin(v), std::cos(v))
DRM_AD_UNARY(cos, kCos, std::cos(v), -std::sin(v))
DRM_AD_UNARY(tan, kTan, std::tan(v), 1.0 + f * f)
DRM_AD_UNARY(asin, kAsin, std::asin(v), 1.0 / std::sqrt(1.0 - v * v))
DRM_AD_UNARY(acos, kAcos, std::acos(v), -1.0 / std::sqrt(1.0 - v * v))
DRM_AD_UNARY(atan, kAtan, std::atan(v), 1.0 / (1.0 + v * v))
DRM_AD_UNARY(sqrt, kSqrt, std::sqrt(v), 0.5 / f)
DRM_AD_UNARY(exp, kExp, std::exp(v), f)
DRM_AD_UNARY(log, kLog, std::log(v), 1.0 / v)
DRM_AD_UNARY(log1p, kLog1p, std::log1p(v), 1.0 / (1.0 + v))
DRM_AD_UNARY(tanh, kTanh, std::tanh(v), 1.0 - f * f)
DRM_AD_UNARY(abs, kAbs, std::abs(v), (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0)))
#undef DRM_AD_UNARY

inline Var atan2(const Var& y, const Var& x) {
  const double r2 = x.value() * x.value() + y.value() * y.value();
  const double v = std::atan2(y.value(), x.value());
  const double dy = r2 > 0.0 ? x.value() / r2 : 0.0;
  const double dx = r2 > 0.0 ? -y.value() / r2 : 0.0;
  return Var::binary(Op::kAtan2, y, x, v, dy, dx);
}
template <int N>
Dual<N> atan2(const Dual<N>& y, const Dual<N>& x) {
  const double r2 = x.value() * x.value() + y.value() * y.value();
  const double v = std::atan2(y.value(), x.value());
  const double dy = r2 > 0.0 ? x.value() / r2 : 0.0;
  const double dx = r2 > 0.0 ? -y.value() / r2 : 0.0;
  return y.chain(v, dy) + x.chain(0.0, dx);
}

inline Var pow(const Var& x, double p) {
  const double v = std::pow(x.value(), p);
  return x.unary(Op::kPow, v, p * std::pow(x.value(), p - 1.0));
}
template <int N>
Dual<N> pow(const Dual<N>& x, double p) {
  return x.chain(std::pow(x.value(), p), p * std::pow(x.value(), p - 1.0));
}

inline Var min(const Var& a, const Var& b) { return b < a ? b : a; }
inline Var max(const Var& a, const Var& b) { return a < b ? b : a; }
template <int N>
Dual<N> min(const Dual<N>& a, const Dual<N>& b) { return b < a ? b : a; }
template <int N>
Dual<N> max(const Dual<N>& a, const Dual<N>& b) { return a < b ? b : a; }

inline bool isfinite(const Var& x) { return std::isfinite(x.value()); }
inline bool isnan(const Var& x) { return std::isnan(x.value()); }
inline bool isinf(const Var& x) { return std::isinf(x.value()); }
template <int N>
bool isfinite(const Dual<N>& x) { return std::isfinite(x.value()) && x.grad().allFinite(); }
template <int N>
bool isnan(const Dual<N>& x) { return std::isnan(x.value()); }
template <int N>
bool isinf(const Dual<N>& x) { return std::isinf(x.value()); }

}  // namespace drm::ad

// ---------------------------------------------------------------------------
// Eigen integration
// ---------------------------------------------------------------------------

namespace Eigen {

template <int N>
struct NumTraits<drm::ad::Dual<N>> : NumTraits<double> {
  using Real = drm::ad::Dual<N>;
  using NonInteger = drm::ad::Dual<N>;
  using Nested = drm::ad::Dual<N>;
  using Literal = drm::ad::Dual<N>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3,
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <>
struct NumTraits<drm::ad::Var> : NumTraits<double> {
  using Real = drm::ad::Var;
  using NonInteger = drm::ad::Var;
  using Nested = drm::ad::Var;
  using Literal = drm::ad::Var;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3,
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<drm::ad::Dual<N>, double, BinaryOp> {
  using ReturnType = drm::ad::Dual<N>;
};
template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, drm::ad::Dual<N>, BinaryOp> {
  using ReturnType = drm::ad::Dual<N>;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<drm::ad::Var, double, BinaryOp> {
  using ReturnType = drm::ad::Var;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, drm::ad::Var, BinaryOp> {
  using ReturnType = drm::ad::Var;
};

}  // namespace Eigen

namespace drm::ad {

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

// Gradient of a scalar function via one reverse sweep on a fresh tape.
// `f` is called with an Eigen vector of Var and must return a Var.
template <typename F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& x, double* value = nullptr) {
  Tape tape;
  Eigen::Matrix<Var, Eigen::Dynamic, 1> xs(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) xs(i) = Var::input(tape, x(i));
  const Var y = f(xs);
  if (value != nullptr) *value = y.value();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  if (y.is_constant()) {
    if (!std::isfinite(y.value())) throw NumericalError("non-finite function value");
    return g;
  }
  tape.check_finite(y.index());
  const std::vector<double> adj = tape.adjoints(y.index());
  for (Eigen::Index i = 0; i < x.size(); ++i) g(i) = adj[static_cast<std::size_t>(xs(i).index())];
  return g;
}

// Full Jacobian of a vector function in one forward pass with n-wide duals.
// `f` is called with an Eigen vector of Dual<> and returns an Eigen vector of
// Dual<>.
template <typename F>
Eigen::MatrixXd jacobian_fwd(F&& f, const Eigen::VectorXd& x, Eigen::VectorXd* value = nullptr) {
  const int n = static_cast<int>(x.size());
  Eigen::Matrix<Dual<>, Eigen::Dynamic, 1> xs(n);
  for (int i = 0; i < n; ++i) xs(i) = Dual<>::variable(x(i), i, n);
  const Eigen::Matrix<Dual<>, Eigen::Dynamic, 1> y = f(xs);
  Eigen::MatrixXd jac(y.size(), n);
  if (value != nullptr) value->resize(y.size());
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const Dual<>& yr = y(r);
    if (!std::isfinite(yr.value())) {
      throw NumericalError("non-finite output component " + std::to_string(r));
    }
    for (int c = 0; c < n; ++c) jac(r, c) = yr.partial(c);
    if (!jac.row(r).allFinite()) {
      throw NumericalError("non-finite derivative in output component " + std::to_string(r));
    }
    if (value != nullptr) (*value)(r) = yr.value();
  }
  return jac;
}

// Max over coordinates of |AD - central FD| / max(1, |AD|).
// `f` must be callable with both Eigen::VectorXd (returning double) and an
// Eigen vector of Var (returning Var).
template <typename F>
double check_gradient(F&& f, const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw Error("check_gradient: step must be positive");
  const Eigen::VectorXd ad = gradient(f, x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(i) += step;
    xm(i) -= step;
    const double fd = (static_cast<double>(f(xp)) - static_cast<double>(f(xm))) / (2.0 * step);
    const double err = std::abs(ad(i) - fd) / std::max(1.0, std::abs(ad(i)));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace drm::ad

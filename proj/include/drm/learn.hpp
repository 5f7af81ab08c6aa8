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

// Learnable inertial parameters and system identification.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "drm/autodiff.hpp"
#include "drm/dynamics.hpp"
#include "drm/model.hpp"
#include "drm/spatial.hpp"

namespace drm::learn {

// ---------------------------------------------------------------------------
// Parametrizations
// ---------------------------------------------------------------------------

// Softplus log(1 + exp(raw)); returns raw itself above 30.
template <typename S>
S positive_scalar_map(const S& raw) {
  using std::exp;
  using std::log1p;
  if (raw > 30.0) return raw;
  return log1p(exp(raw));
}

// Inverse softplus. Throws Error for target <= 0.
double positive_scalar_init(double target);

inline constexpr double kSpdFloor = 1e-9;

// L L^T + kSpdFloor * I. raw = (L00, L11, L22, L10, L20, L21) with the
// diagonal passed through positive_scalar_map.
template <typename S>
Mat3<S> spd_map(const VecX<S>& raw) {
  Mat3<S> l;
  l.setConstant(S(0));
  l(0, 0) = positive_scalar_map(raw(0));
  l(1, 1) = positive_scalar_map(raw(1));
  l(2, 2) = positive_scalar_map(raw(2));
  l(1, 0) = raw(3);
  l(2, 0) = raw(4);
  l(2, 1) = raw(5);
  Mat3<S> out = l * l.transpose();
  for (int i = 0; i < 3; ++i) out(i, i) += S(kSpdFloor);
  return out;
}

// Raw vector whose spd_map reproduces `target` (eigenvalues below 1e-8 are
// raised to 1e-8 first).
Eigen::VectorXd spd_init(const Eigen::Matrix3d& target);

enum class Field { kMass, kCom, kRotInertia };
enum class ParamKind { kPositiveScalar, kFreeVector3, kSpdMatrix3, kFixed };

std::string_view field_name(Field field);
std::string_view param_kind_name(ParamKind kind);
// Throw Error on unknown names.
Field parse_field(std::string_view name);
ParamKind parse_param_kind(std::string_view name);

// Maps an unconstrained raw vector to a physical value, flattened:
// 1 entry (mass), 3 (com) or 9 (rot_inertia, column-major).
//
// User parametrizations derive from ParametrizationBase below, or implement
// both map overloads directly.
class Parametrization {
 public:
  virtual ~Parametrization() = default;
  virtual std::string kind_name() const = 0;
  virtual int raw_size() const = 0;
  virtual int value_size() const = 0;
  virtual Eigen::VectorXd map(const Eigen::VectorXd& raw) const = 0;
  virtual VecX<ad::Var> map(const VecX<ad::Var>& raw) const = 0;
};

// Routes both overloads to Derived::apply<S>.
template <typename Derived>
class ParametrizationBase : public Parametrization {
 public:
  Eigen::VectorXd map(const Eigen::VectorXd& raw) const override {
    return static_cast<const Derived&>(*this).template apply<double>(raw);
  }
  VecX<ad::Var> map(const VecX<ad::Var>& raw) const override {
    return static_cast<const Derived&>(*this).template apply<ad::Var>(raw);
  }
};

class PositiveScalar : public ParametrizationBase<PositiveScalar> {
 public:
  std::string kind_name() const override { return "positive_scalar"; }
  int raw_size() const override { return 1; }
  int value_size() const override { return 1; }
  template <typename S>
  VecX<S> apply(const VecX<S>& raw) const {
    VecX<S> out(1);
    out(0) = positive_scalar_map(raw(0));
    return out;
  }
};

class FreeVector3 : public ParametrizationBase<FreeVector3> {
 public:
  std::string kind_name() const override { return "free_vector3"; }
  int raw_size() const override { return 3; }
  int value_size() const override { return 3; }
  template <typename S>
  VecX<S> apply(const VecX<S>& raw) const {
    return raw;
  }
};

class SpdMatrix3 : public ParametrizationBase<SpdMatrix3> {
 public:
  std::string kind_name() const override { return "spd_matrix3"; }
  int raw_size() const override { return 6; }
  int value_size() const override { return 9; }
  template <typename S>
  VecX<S> apply(const VecX<S>& raw) const {
    const Mat3<S> m = spd_map(raw);
    return Eigen::Map<const VecX<S>>(m.data(), 9);
  }
};

// Holds a constant; contributes no raw entries.
class FixedValue : public ParametrizationBase<FixedValue> {
 public:
  explicit FixedValue(Eigen::VectorXd value) : value_(std::move(value)) {}
  std::string kind_name() const override { return "fixed"; }
  int raw_size() const override { return 0; }
  int value_size() const override { return static_cast<int>(value_.size()); }
  template <typename S>
  VecX<S> apply(const VecX<S>&) const {
    return value_.cast<S>();
  }

 private:
  Eigen::VectorXd value_;
};

// ---------------------------------------------------------------------------
// Parameter store
// ---------------------------------------------------------------------------

// Registry of learnable (body, field) pairs over one model. The model must
// outlive the store.
//
// Fields that are not learnable keep their model values. When mass or com is
// learnable but rot_inertia is not, the model's inertia about the center of
// mass is held fixed and the origin-referenced inertia follows the new mass
// and com through the parallel-axis term. A learnable rot_inertia is the
// origin-referenced inertia itself.
class ParamStore {
 public:
  struct Entry {
    int body;
    Field field;
    std::shared_ptr<const Parametrization> param;
    int offset;  // into raw()
  };

  explicit ParamStore(const RobotModel& model);

  const RobotModel& model() const { return *model_; }

  // Registers a built-in parametrization initialized at the current value.
  // Throws Error on an unknown link, a link without inertial data, a
  // duplicate registration or a kinematics_only model.
  void make_learnable(const std::string& link, Field field, ParamKind kind);

  // Registers a user parametrization with its initial raw vector.
  void make_learnable(const std::string& link, Field field, std::shared_ptr<const Parametrization> param,
                      const Eigen::VectorXd& initial_raw);

  const std::vector<Entry>& entries() const { return entries_; }
  int raw_size() const { return static_cast<int>(raw_.size()); }
  const Eigen::VectorXd& raw() const { return raw_; }
  void set_raw(const Eigen::VectorXd& raw);

  // Per-body inertias with learnable fields mapped from `raw`.
  template <typename S>
  std::vector<Inertia<S>> inertias(const VecX<S>& raw) const;

  std::vector<Inertia<double>> inertias() const { return inertias<double>(raw_); }

  // "link.field" -> mapped physical value at the current raw vector.
  std::map<std::string, Eigen::VectorXd> physical_values() const;

 private:
  void check_new(int body, Field field) const;

  const RobotModel* model_;
  std::vector<Entry> entries_;
  Eigen::VectorXd raw_;
};

namespace detail {
inline Eigen::VectorXd map_param(const Parametrization& p, const Eigen::VectorXd& raw) { return p.map(raw); }
inline VecX<ad::Var> map_param(const Parametrization& p, const VecX<ad::Var>& raw) { return p.map(raw); }
}  // namespace detail

template <typename S>
std::vector<Inertia<S>> ParamStore::inertias(const VecX<S>& raw) const {
  require_size(raw.size(), raw_size(), "raw parameter vector");
  std::vector<Inertia<S>> out = model_->inertias<S>();
  struct Override {
    const VecX<S>* mass = nullptr;
    const VecX<S>* com = nullptr;
    const VecX<S>* rot = nullptr;
  };
  std::vector<VecX<S>> values;
  values.reserve(entries_.size());
  std::map<int, Override> overrides;
  for (const Entry& e : entries_) {
    const VecX<S> r = raw.segment(e.offset, e.param->raw_size());
    values.push_back(detail::map_param(*e.param, r));
    Override& o = overrides[e.body];
    switch (e.field) {
      case Field::kMass: o.mass = &values.back(); break;
      case Field::kCom: o.com = &values.back(); break;
      case Field::kRotInertia: o.rot = &values.back(); break;
    }
  }
  for (const auto& [body, o] : overrides) {
    const Inertia<double>& base = model_->body(body).inertia;
    Inertia<S>& in = out[static_cast<std::size_t>(body)];
    if (o.mass != nullptr) in.mass = (*o.mass)(0);
    if (o.com != nullptr) in.com = o.com->template head<3>();
    if (o.rot != nullptr) {
      in.rot_inertia = Eigen::Map<const Mat3<S>>(o.rot->data());
    } else {
      in.rot_inertia = Mat3<S>(inertia_at_com(base).cast<S>()) + point_mass_inertia(in.mass, in.com);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Data and training
// ---------------------------------------------------------------------------

struct Sample {
  Eigen::VectorXd q, qd, qdd, tau;
};

struct TrajectoryDataset {
  std::vector<Sample> samples;
  int size() const { return static_cast<int>(samples.size()); }
};

// Throws Error if any record's vectors do not have length n or are not finite.
void check_dataset(const TrajectoryDataset& data, int n);

struct StateBounds {
  double q = 3.141592653589793;  // |q| bound (clipped further by finite joint limits)
  double qd = 2.0;
  double qdd = 2.0;
};

// Uniform samples of (q, qd, qdd) with tau = rnea(q, qd, qdd). Deterministic
// in `seed`. noise_std > 0 adds Gaussian noise to tau. Throws Error if n < 1.
TrajectoryDataset generate_dataset(const RobotModel& model, int n, const StateBounds& bounds,
                                   const Eigen::Vector3d& gravity, std::uint64_t seed, double noise_std = 0.0);

// (1/N) sum_i |rnea(q_i, qd_i, qdd_i) - tau_i|^2 with learnable fields mapped
// from `raw`.
template <typename S>
S inverse_dynamics_loss(const ParamStore& store, const TrajectoryDataset& data, const VecX<S>& raw,
                        const Eigen::Vector3d& gravity, int begin = 0, int end = -1) {
  if (end < 0) end = data.size();
  if (end <= begin) throw Error("inverse_dynamics_loss: empty dataset");
  const RobotModel& model = store.model();
  const std::vector<Inertia<S>> inertias = store.inertias<S>(raw);
  S total(0.0);
  for (int k = begin; k < end; ++k) {
    const Sample& s = data.samples[static_cast<std::size_t>(k)];
    const VecX<S> tau = rnea<S>(model, s.q.cast<S>(), s.qd.cast<S>(), s.qdd.cast<S>(), gravity, inertias);
    total += (tau - s.tau.cast<S>()).squaredNorm();
  }
  const S loss = total / static_cast<double>(end - begin);
  using std::isfinite;
  if (!isfinite(loss)) throw NumericalError("inverse dynamics loss is not finite");
  return loss;
}

double inverse_dynamics_loss(const ParamStore& store, const TrajectoryDataset& data,
                             const Eigen::Vector3d& gravity = kDefaultGravity);

// Loss and its gradient with respect to the raw vector (one reverse sweep).
double inverse_dynamics_loss_gradient(const ParamStore& store, const TrajectoryDataset& data,
                                      const Eigen::VectorXd& raw, const Eigen::Vector3d& gravity,
                                      Eigen::VectorXd& grad, int begin = 0, int end = -1);

enum class Optimizer { kGradientDescent, kAdam };

struct FitOptions {
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 0.01;
  int epochs = 1000;
  int batch_size = 0;  // 0 = full batch
  double tolerance = 1e-10;
  double min_relative_improvement = 1e-12;  // over `patience` epochs
  int patience = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Eigen::Vector3d gravity = kDefaultGravity;
};

struct TrainReport {
  std::vector<double> loss_curve;  // loss at the start of each epoch, plus the final loss
  double final_loss = 0.0;
  std::map<std::string, Eigen::VectorXd> final_params;
  int epochs = 0;
  bool converged = false;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(int epoch, double loss)
      : NumericalError("training diverged at epoch " + std::to_string(epoch) + " (loss " + std::to_string(loss) + ")"),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// Minimizes inverse_dynamics_loss over the store's raw vector, updating the
// store in place.
TrainReport fit(ParamStore& store, const TrajectoryDataset& data, const FitOptions& options = {});

}  // namespace drm::learn

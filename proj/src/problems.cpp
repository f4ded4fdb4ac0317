#include "mice/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mice {

namespace {

SmoothnessConstants spectrum_constants(const Matrix& hessian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hessian, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return SmoothnessConstants{ev.maxCoeff(), ev.minCoeff(), ev.maxCoeff()};
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw MiceError(ErrorCode::kInvalidArgument, std::string(what) + " must be positive");
  }
}

}  // namespace

// ---------------------------------------------------------------- quadratic

QuadraticProblem::QuadraticProblem(double kappa) : kappa_(kappa) {
  require_positive(kappa, "kappa");
  a_ = Matrix{{2.0 * kappa - 1.0, 0.5}, {0.5, 0.0}};
  mean_h_ = Matrix::Identity(2, 2) + 0.5 * a_;
  b_ = Vector::Ones(2);
  opt_.point = mean_h_.ldlt().solve(b_);
  opt_.value = -0.5 * b_.dot(opt_.point);
  consts_ = spectrum_constants(mean_h_);
  consts_.lipschitz_as = spectrum_constants(Matrix::Identity(2, 2) + a_).lipschitz;
}

RandomEvent QuadraticProblem::sample_event(RngStream& rng) const {
  return RandomEvent::from_theta(Vector::Constant(1, rng.uniform()));
}

Vector QuadraticProblem::gradient(const Vector& xi, const RandomEvent& e) const {
  require_same_dim(xi.size(), 2, "QuadraticProblem::gradient");
  return xi + e.theta[0] * (a_ * xi) - b_;
}

std::optional<double> QuadraticProblem::objective(const Vector& xi, const RandomEvent& e) const {
  return 0.5 * (xi.squaredNorm() + e.theta[0] * xi.dot(a_ * xi)) - b_.dot(xi);
}

std::optional<Vector> QuadraticProblem::true_gradient(const Vector& xi) const {
  return Vector(mean_h_ * xi - b_);
}

std::optional<double> QuadraticProblem::true_objective(const Vector& xi) const {
  return 0.5 * xi.dot(mean_h_ * xi) - b_.dot(xi);
}

std::optional<Optimum> QuadraticProblem::optimum() const { return opt_; }

std::optional<SmoothnessConstants> QuadraticProblem::constants() const { return consts_; }

std::optional<Matrix> QuadraticProblem::gradient_covariance(const Vector& xi) const {
  const Vector ax = a_ * xi;
  return Matrix(ax * ax.transpose() / 12.0);
}

// -------------------------------------------------------- shifted quadratic

ShiftedQuadraticProblem::ShiftedQuadraticProblem(double sigma) : sigma_(sigma) {
  require_positive(sigma, "sigma");
  h_ = Matrix{{100.0, 3.0}, {3.0, 8.0}};
  sym_ = h_ + h_.transpose();
  h1_ = h_ * Vector::Ones(2);
  ht1_ = h_.transpose() * Vector::Ones(2);
}

RandomEvent ShiftedQuadraticProblem::sample_event(RngStream& rng) const {
  Vector t(2);
  t[0] = sigma_ * rng.normal();
  t[1] = sigma_ * rng.normal();
  return RandomEvent::from_theta(std::move(t));
}

Vector ShiftedQuadraticProblem::gradient(const Vector& xi, const RandomEvent& e) const {
  require_same_dim(xi.size(), 2, "ShiftedQuadraticProblem::gradient");
  // The theta term is formed separately so differences at a shared event
  // cancel it up to rounding.
  return sym_ * xi + (e.theta[1] * h1_ + e.theta[0] * ht1_);
}

std::optional<double> ShiftedQuadraticProblem::objective(const Vector& xi,
                                                         const RandomEvent& e) const {
  const Vector u = xi + Vector::Constant(2, e.theta[0]);
  const Vector v = xi + Vector::Constant(2, e.theta[1]);
  return u.dot(h_ * v);
}

std::optional<Vector> ShiftedQuadraticProblem::true_gradient(const Vector& xi) const {
  return Vector(sym_ * xi);
}

std::optional<double> ShiftedQuadraticProblem::true_objective(const Vector& xi) const {
  return xi.dot(h_ * xi);
}

std::optional<Optimum> ShiftedQuadraticProblem::optimum() const {
  return Optimum{Vector::Zero(2), 0.0};
}

std::optional<SmoothnessConstants> ShiftedQuadraticProblem::constants() const {
  return spectrum_constants(sym_);
}

std::optional<Matrix> ShiftedQuadraticProblem::gradient_covariance(const Vector&) const {
  return Matrix(sigma_ * sigma_ * (h1_ * h1_.transpose() + ht1_ * ht1_.transpose()));
}

// --------------------------------------------------------------- rosenbrock

RosenbrockProblem::RosenbrockProblem(double sigma, double a, double b)
    : sigma_(sigma), a_(a), b_(b) {
  require_positive(sigma, "sigma");
}

RandomEvent RosenbrockProblem::sample_event(RngStream& rng) const {
  Vector t(2);
  t[0] = sigma_ * rng.normal();
  t[1] = sigma_ * rng.normal();
  return RandomEvent::from_theta(std::move(t));
}

Vector RosenbrockProblem::gradient(const Vector& xi, const RandomEvent& e) const {
  require_same_dim(xi.size(), 2, "RosenbrockProblem::gradient");
  const double t0 = e.theta[0];
  const double t1 = e.theta[1];
  const double u = -xi[0] * xi[0] + xi[1] + t0 * t0 - t1 * t1;
  Vector g(2);
  g[0] = -2.0 * a_ - 4.0 * b_ * xi[0] * u + 2.0 * xi[0] - 2.0 * t0;
  g[1] = 2.0 * b_ * u;
  return g;
}

std::optional<double> RosenbrockProblem::objective(const Vector& xi, const RandomEvent& e) const {
  const double t0 = e.theta[0];
  const double t1 = e.theta[1];
  const double r = a_ - xi[0] + t0;
  const double u = -xi[0] * xi[0] + xi[1] + t0 * t0 - t1 * t1;
  return r * r + b_ * u * u;
}

std::optional<Vector> RosenbrockProblem::true_gradient(const Vector& xi) const {
  Vector g(2);
  g[0] = -2.0 * a_ + 4.0 * b_ * xi[0] * xi[0] * xi[0] - 4.0 * b_ * xi[0] * xi[1] + 2.0 * xi[0];
  g[1] = -2.0 * b_ * xi[0] * xi[0] + 2.0 * b_ * xi[1];
  return g;
}

std::optional<double> RosenbrockProblem::true_objective(const Vector& xi) const {
  const double s2 = sigma_ * sigma_;
  const double r = a_ - xi[0];
  const double u = xi[1] - xi[0] * xi[0];
  return r * r + s2 + b_ * (4.0 * s2 * s2 + u * u);
}

std::optional<Optimum> RosenbrockProblem::optimum() const {
  const double s2 = sigma_ * sigma_;
  return Optimum{Vector{{a_, a_ * a_}}, s2 + 4.0 * b_ * s2 * s2};
}

std::optional<Matrix> RosenbrockProblem::gradient_covariance(const Vector& xi) const {
  const auto key = std::make_pair(xi[0], xi[1]);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cov_cache_.find(key); it != cov_cache_.end()) return it->second;
  }
  constexpr int kDraws = 10000;
  RngStream rng(0x726f73, 0);
  Vector mean = Vector::Zero(2);
  Matrix m2 = Matrix::Zero(2, 2);
  for (int i = 1; i <= kDraws; ++i) {
    const Vector g = gradient(xi, sample_event(rng));
    const Vector d = g - mean;
    mean += d / i;
    m2 += d * (g - mean).transpose();
  }
  Matrix cov = 0.5 * (m2 + m2.transpose()) / (kDraws - 1);
  std::lock_guard lock(cache_mutex_);
  if (cov_cache_.size() > 4096) cov_cache_.clear();
  cov_cache_.emplace(key, cov);
  return cov;
}

// ----------------------------------------------------------------- logistic

double gram_spectral_bound(const SparseDataset& data, std::size_t iters) {
  const auto d = static_cast<Eigen::Index>(data.n_features);
  if (d == 0 || data.rows() == 0) return 0.0;
  RngStream rng(0x6772616d, 0);
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = 1.0 + rng.uniform();
  v.normalize();
  double lambda = 0.0;
  Vector w(d);
  for (std::size_t it = 0; it < iters; ++it) {
    w.setZero();
    for (std::size_t i = 0; i < data.rows(); ++i) data.axpy(i, data.dot(i, v), w);
    w /= static_cast<double>(data.rows());
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

LogisticProblem::LogisticProblem(std::shared_ptr<const SparseDataset> data, double lambda)
    : data_(std::move(data)), lambda_(lambda) {
  if (!data_ || data_->rows() == 0) {
    throw MiceError(ErrorCode::kInvalidArgument, "LogisticProblem: empty dataset");
  }
  require_positive(lambda, "lambda");
  double max_row = 0.0;
  for (std::size_t i = 0; i < data_->rows(); ++i) {
    const double y = data_->labels[i];
    if (y != 1.0 && y != -1.0) {
      throw MiceError(ErrorCode::kInvalidArgument,
                      "LogisticProblem: label of row " + std::to_string(i) + " is not +-1");
    }
    max_row = std::max(max_row, data_->row_norm_sq(i));
  }
  consts_.strong_convexity = lambda;
  consts_.lipschitz = lambda + gram_spectral_bound(*data_) / 4.0;
  consts_.lipschitz_as = lambda + max_row / 4.0;
}

RandomEvent LogisticProblem::sample_event(RngStream& rng) const {
  return RandomEvent::from_index(rng.uniform_index(data_->rows()));
}

Vector LogisticProblem::gradient(const Vector& xi, const RandomEvent& e) const {
  require_same_dim(xi.size(), static_cast<Eigen::Index>(data_->n_features),
                   "LogisticProblem::gradient");
  const double y = data_->labels[e.index];
  Vector g = lambda_ * xi;
  data_->axpy(e.index, -y * sigmoid(-y * data_->dot(e.index, xi)), g);
  return g;
}

std::optional<double> LogisticProblem::objective(const Vector& xi, const RandomEvent& e) const {
  const double y = data_->labels[e.index];
  return softplus(-y * data_->dot(e.index, xi)) + 0.5 * lambda_ * xi.squaredNorm();
}

std::optional<Vector> LogisticProblem::true_gradient(const Vector& xi) const {
  require_same_dim(xi.size(), static_cast<Eigen::Index>(data_->n_features),
                   "LogisticProblem::true_gradient");
  Vector g = Vector::Zero(xi.size());
  for (std::size_t i = 0; i < data_->rows(); ++i) {
    const double y = data_->labels[i];
    data_->axpy(i, -y * sigmoid(-y * data_->dot(i, xi)), g);
  }
  g /= static_cast<double>(data_->rows());
  g += lambda_ * xi;
  return g;
}

std::optional<double> LogisticProblem::true_objective(const Vector& xi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < data_->rows(); ++i) {
    s += softplus(-data_->labels[i] * data_->dot(i, xi));
  }
  return s / static_cast<double>(data_->rows()) + 0.5 * lambda_ * xi.squaredNorm();
}

// ------------------------------------------------------- finite-sum quadratic

FiniteSumQuadratic::FiniteSumQuadratic(std::vector<Matrix> a, std::vector<Vector> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size()) {
    throw MiceError(ErrorCode::kInvalidArgument, "FiniteSumQuadratic: need N >= 1 pairs");
  }
  const auto d = b_.front().size();
  Matrix mean_a = Matrix::Zero(d, d);
  Vector mean_b = Vector::Zero(d);
  double l_as = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    require_same_dim(a_[i].rows(), d, "FiniteSumQuadratic");
    require_same_dim(a_[i].cols(), d, "FiniteSumQuadratic");
    require_same_dim(b_[i].size(), d, "FiniteSumQuadratic");
    mean_a += a_[i];
    mean_b += b_[i];
    l_as = std::max(l_as, spectrum_constants(a_[i]).lipschitz);
  }
  mean_a /= static_cast<double>(a_.size());
  mean_b /= static_cast<double>(a_.size());
  consts_ = spectrum_constants(mean_a);
  consts_.lipschitz_as = l_as;
  opt_.point = mean_a.ldlt().solve(mean_b);
  opt_.value = -0.5 * mean_b.dot(opt_.point);
}

RandomEvent FiniteSumQuadratic::sample_event(RngStream& rng) const {
  return RandomEvent::from_index(rng.uniform_index(a_.size()));
}

Vector FiniteSumQuadratic::gradient(const Vector& xi, const RandomEvent& e) const {
  require_same_dim(xi.size(), b_.front().size(), "FiniteSumQuadratic::gradient");
  return a_.at(e.index) * xi - b_[e.index];
}

std::optional<double> FiniteSumQuadratic::objective(const Vector& xi, const RandomEvent& e) const {
  return 0.5 * xi.dot(a_.at(e.index) * xi) - b_[e.index].dot(xi);
}

std::optional<Vector> FiniteSumQuadratic::true_gradient(const Vector& xi) const {
  Vector g = Vector::Zero(xi.size());
  for (std::size_t i = 0; i < a_.size(); ++i) g += a_[i] * xi - b_[i];
  return Vector(g / static_cast<double>(a_.size()));
}

std::optional<double> FiniteSumQuadratic::true_objective(const Vector& xi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) s += 0.5 * xi.dot(a_[i] * xi) - b_[i].dot(xi);
  return s / static_cast<double>(a_.size());
}

}  // namespace mice

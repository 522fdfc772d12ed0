#include "wcs/dynamics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace wcs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool symmetric(const Eigen::MatrixXd& M, double tol) {
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue_sym(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().minCoeff();
}

}  // namespace

PlantModel make_plant(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd K,
                      Eigen::MatrixXd W, Eigen::MatrixXd P) {
  const auto p = A.rows();
  const auto q = B.cols();
  require(A.cols() == p, "plant: A must be square");
  require(B.rows() == p, "plant: B row count must match state dimension");
  require(K.rows() == q && K.cols() == p, "plant: K must be q x p");
  require(W.rows() == p && W.cols() == p, "plant: W must be p x p");
  require(P.rows() == p && P.cols() == p, "plant: P must be p x p");

  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  require(symmetric(W, 1e-9 * scale), "plant: W must be symmetric");
  require(min_eigenvalue_sym(W) >= -1e-9 * scale,
          "plant: W must be positive semidefinite");
  const double pscale = std::max(1.0, P.cwiseAbs().maxCoeff());
  require(symmetric(P, 1e-9 * pscale), "plant: P must be symmetric");
  require(min_eigenvalue_sym(P) > 0.0, "plant: P must be positive definite");

  PlantModel model;
  model.Ac = A + B * K;
  model.A = std::move(A);
  model.B = std::move(B);
  model.K = std::move(K);
  model.W = std::move(W);
  model.P = std::move(P);
  return model;
}

Eigen::VectorXd estimate_state(const PlantModel& model,
                               const LinkState& link) {
  require(link.counter >= 1, "estimate_state: counter must be >= 1");
  require(link.last_rx.size() == model.state_dim(),
          "estimate_state: state dimension mismatch");
  Eigen::VectorXd est = link.last_rx;
  for (int j = 0; j < link.counter; ++j) est = model.Ac * est;
  return est;
}

PlantState step_plant(const PlantModel& model, const PlantState& state,
                      bool received, const Eigen::VectorXd& estimate,
                      const Eigen::VectorXd& noise) {
  require(state.x.size() == model.state_dim(),
          "step_plant: state dimension mismatch");
  require(noise.size() == model.state_dim(),
          "step_plant: noise dimension mismatch");
  PlantState next;
  if (received) {
    next.x = model.Ac * state.x + noise;
  } else {
    require(estimate.size() == model.state_dim(),
            "step_plant: estimate dimension mismatch");
    next.x = model.A * state.x + model.B * (model.K * estimate) + noise;
  }
  next.cycle = state.cycle + 1;
  return next;
}

LinkState update_counter(const LinkState& link, bool received,
                         const Eigen::VectorXd& true_state) {
  LinkState next = link;
  if (received) {
    next.counter = 1;
    next.last_rx = true_state;
  } else {
    next.counter = link.counter + 1;
  }
  return next;
}

Eigen::MatrixXd error_covariance(const PlantModel& model, int l) {
  require(l >= 1, "error_covariance: l must be >= 1");
  const int p = model.state_dim();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd acj = Eigen::MatrixXd::Identity(p, p);  // Ac^j
  for (int j = 0; j < l; ++j) {
    cov += acj * model.W * acj.transpose();
    acj = model.Ac * acj;
  }
  return cov;
}

double control_weight(const PlantModel& model, int l) {
  const Eigen::MatrixXd delta = model.A.transpose() * model.P * model.A -
                                model.Ac.transpose() * model.P * model.Ac;
  return (delta * error_covariance(model, l)).trace();
}

double expected_cost(const PlantModel& model, const Eigen::VectorXd& estimate,
                     int l, double q) {
  require(q >= 0.0 && q <= 1.0, "expected_cost: q must be in [0, 1]");
  const Eigen::VectorXd next_est = model.Ac * estimate;
  const Eigen::MatrixXd sigma = error_covariance(model, l);
  const double base = next_est.dot(model.P * next_est) +
                      (model.P * model.W).trace() +
                      (model.Ac.transpose() * model.P * model.Ac * sigma)
                          .trace();
  return base + q * control_weight(model, l);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> linearize_pendulum(
    const PendulumParams& params) {
  require(params.cart_mass_kg > 0 && params.pole_mass_kg > 0 &&
              params.pole_length_m > 0 && params.gravity >= 0,
          "pendulum: masses and length must be positive");
  const double M = params.cart_mass_kg;
  const double m = params.pole_mass_kg;
  const double l = params.pole_length_m;
  const double g = params.gravity;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  A(0, 1) = 1.0;
  A(1, 2) = -m * g / M;
  A(2, 3) = 1.0;
  A(3, 2) = (M + m) * g / (M * l);

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 1);
  B(1, 0) = 1.0 / M;
  B(3, 0) = -1.0 / (M * l);
  return {A, B};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize_zoh(
    const Eigen::MatrixXd& A_cont, const Eigen::MatrixXd& B_cont, double dt) {
  require(dt > 0, "discretize_zoh: dt must be positive");
  const auto p = A_cont.rows();
  const auto q = B_cont.cols();
  require(A_cont.cols() == p && B_cont.rows() == p,
          "discretize_zoh: dimension mismatch");

  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(p + q, p + q);
  aug.topLeftCorner(p, p) = A_cont;
  aug.topRightCorner(p, q) = B_cont;
  const Eigen::MatrixXd phi = (aug * dt).exp();
  return {phi.topLeftCorner(p, p), phi.topRightCorner(p, q)};
}

LqrResult lqr_synthesize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const auto p = A.rows();
  require(A.cols() == p && B.rows() == p, "lqr: dimension mismatch");
  require(Q.rows() == p && Q.cols() == p, "lqr: Q must be p x p");
  require(R.rows() == B.cols() && R.cols() == B.cols(), "lqr: R must be q x q");

  constexpr int kMaxIterations = 100000;
  constexpr double kRelTol = 1e-10;

  Eigen::MatrixXd P = Q;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd S = R + BtP * B;
    const Eigen::MatrixXd gain = S.ldlt().solve(BtP * A);
    Eigen::MatrixXd next =
        Q + A.transpose() * P * A - A.transpose() * BtP.transpose() * gain;
    next = 0.5 * (next + next.transpose());
    const double diff = (next - P).norm();
    const double denom = std::max(next.norm(), 1.0);
    P = next;
    if (diff <= kRelTol * denom) {
      LqrResult result;
      const Eigen::MatrixXd S_final = R + B.transpose() * P * B;
      result.gain = -S_final.ldlt().solve(B.transpose() * P * A);
      result.riccati = P;
      if (spectral_radius(A + B * result.gain) >= 1.0) {
        throw LqrSynthesisError("lqr_synthesize: closed loop not stable");
      }
      return result;
    }
  }
  throw LqrSynthesisError(
      "lqr_synthesize: Riccati iteration did not converge");
}

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

PlantModel pendulum_plant(const PendulumParams& params,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                          double process_noise_variance) {
  require(process_noise_variance >= 0,
          "pendulum_plant: noise variance must be nonnegative");
  const auto [A_cont, B_cont] = linearize_pendulum(params);
  const auto [A, B] = discretize_zoh(A_cont, B_cont, params.sample_period_s);
  const LqrResult lqr = lqr_synthesize(A, B, Q, R);
  const Eigen::MatrixXd W =
      process_noise_variance * Eigen::MatrixXd::Identity(4, 4);
  return make_plant(A, B, lqr.gain, W, lqr.riccati);
}

}  // namespace wcs

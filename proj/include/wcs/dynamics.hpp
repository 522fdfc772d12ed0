#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace wcs {

/// Discrete-time plant with linear state feedback applied at the base
/// station. All matrices are per-cycle quantities.
struct PlantModel {
  Eigen::MatrixXd A;   // state transition, p x p
  Eigen::MatrixXd B;   // input map, p x q
  Eigen::MatrixXd K;   // feedback gain, q x p (u = K x)
  Eigen::MatrixXd W;   // process-noise covariance, p x p, symmetric PSD
  Eigen::MatrixXd P;   // Lyapunov cost weight, p x p, symmetric PD
  Eigen::MatrixXd Ac;  // cached closed loop A + B*K

  int state_dim() const { return static_cast<int>(A.rows()); }
};

struct PlantState {
  Eigen::VectorXd x;
  long cycle = 0;
};

/// Base-station side bookkeeping for one uplink.
struct LinkState {
  Eigen::VectorXd last_rx;  // most recent successfully received state
  int counter = 1;          // cycles since that success, always >= 1
  bool fallen = false;
};

struct PendulumParams {
  double cart_mass_kg = 1.0;
  double pole_mass_kg = 0.1;
  double pole_length_m = 0.5;  // pivot to center of mass
  double gravity = 9.81;
  double sample_period_s = 0.01;
};

struct LqrSynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Validates dimensions and definiteness and fills the cached closed loop.
PlantModel make_plant(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd K,
                      Eigen::MatrixXd W, Eigen::MatrixXd P);

/// State estimate Ac^l * last_rx for a link that has missed l-1 uplinks
/// since the stored reception.
Eigen::VectorXd estimate_state(const PlantModel& model, const LinkState& link);

/// One cycle of the switched closed loop: on success the exact state is fed
/// back, on a drop the stale estimate is. Noise is injected by the caller.
PlantState step_plant(const PlantModel& model, const PlantState& state,
                      bool received, const Eigen::VectorXd& estimate,
                      const Eigen::VectorXd& noise);

/// Counter/last_rx update after the cycle's uplink outcome. `true_state` is
/// the state that was transmitted this cycle (stored only on success).
LinkState update_counter(const LinkState& link, bool received,
                         const Eigen::VectorXd& true_state);

/// Estimation-error covariance after l consecutive drops:
/// sum_{j=0}^{l-1} Ac^j W (Ac^j)^T.
Eigen::MatrixXd error_covariance(const PlantModel& model, int l);

/// Expected increase in next-cycle quadratic cost x'Px caused by a packet
/// drop relative to a success: Tr[(A'PA - Ac'PAc) * error_covariance(l)].
/// Independent of the current estimate. Nonnegative whenever P is the LQR
/// cost-to-go for K.
double control_weight(const PlantModel& model, int l);

/// Closed-form expectation of the next-cycle cost x'Px given the current
/// estimate, counter l and drop probability q:
/// L(Ac x_est) + Tr(P W) + Tr(Ac'PAc Sigma_e(l)) + q * control_weight(l).
double expected_cost(const PlantModel& model, const Eigen::VectorXd& estimate,
                     int l, double q);

/// Continuous-time linearization of a cart-pole about the upright
/// equilibrium, state [x, xdot, theta, thetadot], frictionless.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> linearize_pendulum(
    const PendulumParams& params);

/// Exact zero-order-hold discretization via the matrix exponential of the
/// augmented [[Ac, Bc], [0, 0]] block.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize_zoh(
    const Eigen::MatrixXd& A_cont, const Eigen::MatrixXd& B_cont, double dt);

struct LqrResult {
  Eigen::MatrixXd gain;     // K with u = K x (minus sign folded in)
  Eigen::MatrixXd riccati;  // fixed point P of the discrete Riccati equation
};

/// Discrete-time LQR by fixed-point Riccati iteration to relative tolerance
/// 1e-10. Throws LqrSynthesisError on non-convergence or an unstable result.
LqrResult lqr_synthesize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& M);

/// Full default plant for one pendulum: linearize, ZOH-discretize, synthesize
/// LQR, and use the Riccati fixed point as the Lyapunov weight P.
PlantModel pendulum_plant(const PendulumParams& params,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                          double process_noise_variance);

}  // namespace wcs

#include "wcs/validate.hpp"

#include <cmath>
#include <sstream>

#include "wcs/rng.hpp"

namespace wcs {

namespace {

Eigen::MatrixXd random_cost(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd cost(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) cost(i, j) = 20.0 * rng.uniform() - 10.0;
  }
  return cost;
}

}  // namespace

CheckResult check_mcs_monotonicity(const McsTable& table) {
  CheckResult result{"mcs-monotonicity", true, ""};
  const Numerology numerology = Numerology::from_scs(30e3);
  for (double snr_db = -10.0; snr_db <= 30.0 + 1e-12; snr_db += 0.5) {
    const Eigen::VectorXd h =
        Eigen::VectorXd::Constant(1, std::pow(10.0, snr_db / 10.0));
    double prev_q = -1.0;
    double prev_tau = std::numeric_limits<double>::infinity();
    for (int mu = 0; mu < table.size(); ++mu) {
      const double q = per(table.entry(mu), h);
      const double tau = tx_time(table.entry(mu), 4.32e6, 800, numerology);
      if (q < prev_q) {
        result.passed = false;
        std::ostringstream oss;
        oss << "PER decreases from MCS " << mu - 1 << " to " << mu << " at "
            << snr_db << " dB";
        result.detail = oss.str();
        return result;
      }
      if (tau > prev_tau) {
        result.passed = false;
        result.detail = "airtime increases at MCS " + std::to_string(mu);
        return result;
      }
      prev_q = q;
      prev_tau = tau;
    }
  }
  result.detail = "PER/airtime ordered across the table on the SNR grid";
  return result;
}

CheckResult check_assignment_optimality(
    const std::function<Matching(const Eigen::MatrixXd&)>& solver,
    int instances) {
  CheckResult result{"assignment-optimality", true, ""};
  Rng rng(0x5eedULL);
  for (int t = 0; t < instances; ++t) {
    const int rows = 2 + static_cast<int>(rng.next_u64() % 4);  // 2..5
    const int cols = 2 + static_cast<int>(rng.next_u64() % 4);
    const Eigen::MatrixXd cost = random_cost(rows, cols, rng);
    const Matching got = solver(cost);
    const Matching want = brute_force(cost);
    if (std::abs(got.total_cost - want.total_cost) > 1e-9) {
      result.passed = false;
      std::ostringstream oss;
      oss << "instance " << t << ": solver cost " << got.total_cost
          << " vs exhaustive " << want.total_cost;
      result.detail = oss.str();
      return result;
    }
  }
  result.detail = std::to_string(instances) + " random instances optimal";
  return result;
}

CheckResult check_greedy_bound(
    const std::function<Matching(const Eigen::MatrixXd&)>& greedy_fn,
    int instances) {
  CheckResult result{"greedy-lower-bound", true, ""};

  Eigen::MatrixXd adversarial(2, 2);
  adversarial << 1.0, 2.0, 1.5, 100.0;
  const Matching adv = greedy_fn(adversarial);
  if (std::abs(adv.total_cost - 101.0) > 1e-12) {
    result.passed = false;
    result.detail = "adversarial 2x2 case: expected greedy cost 101, got " +
                    std::to_string(adv.total_cost);
    return result;
  }

  Rng rng(0xfeedULL);
  for (int t = 0; t < instances; ++t) {
    const int rows = 2 + static_cast<int>(rng.next_u64() % 5);
    const int cols = 2 + static_cast<int>(rng.next_u64() % 5);
    const Eigen::MatrixXd cost = random_cost(rows, cols, rng);
    const Matching g = greedy_fn(cost);
    const Matching h = hungarian(cost);
    if (g.total_cost < h.total_cost - 1e-9) {
      result.passed = false;
      std::ostringstream oss;
      oss << "instance " << t << ": greedy " << g.total_cost
          << " below exact " << h.total_cost;
      result.detail = oss.str();
      return result;
    }
  }
  result.detail = "greedy never beats the exact solver; adversarial case ok";
  return result;
}

CheckResult check_control_weight_oracle(const PlantModel& model,
                                        int samples) {
  CheckResult result{"control-weight-oracle", true, ""};
  const int p = model.state_dim();
  // PSD-safe square root of W for sampling.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.W);
  const Eigen::MatrixXd chol =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Rng rng(0xabcdULL);

  for (int l : {1, 5}) {
    const double closed = control_weight(model, l);
    const Eigen::VectorXd estimate = Eigen::VectorXd::Ones(p);
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
      // e = sum_j Ac^j w_j accumulated as e <- Ac e + w (same distribution)
      Eigen::VectorXd err = Eigen::VectorXd::Zero(p);
      Eigen::VectorXd z(p);
      for (int j = 0; j < l; ++j) {
        for (int c = 0; c < p; ++c) z(c) = rng.normal();
        err = model.Ac * err + chol * z;
      }
      Eigen::VectorXd w(p);
      for (int c = 0; c < p; ++c) w(c) = rng.normal();
      w = chol * w;
      const Eigen::VectorXd x = estimate + err;
      const PlantState st{x, 0};
      const Eigen::VectorXd x_drop =
          step_plant(model, st, false, estimate, w).x;
      const Eigen::VectorXd x_ok = step_plant(model, st, true, estimate, w).x;
      const double d =
          x_drop.dot(model.P * x_drop) - x_ok.dot(model.P * x_ok);
      sum += d;
      sumsq += d * d;
    }
    const double mean = sum / samples;
    const double var = (sumsq - sum * sum / samples) / (samples - 1);
    const double se = std::sqrt(var / samples);
    if (std::abs(mean - closed) > 4.0 * se) {
      result.passed = false;
      std::ostringstream oss;
      oss << "l=" << l << ": closed form " << closed << " vs Monte-Carlo "
          << mean << " (se " << se << ")";
      result.detail = oss.str();
      return result;
    }
  }
  result.detail = "closed form within 4 standard errors of Monte-Carlo";
  return result;
}

std::vector<CheckResult> run_validation_checks(const McsTable& table,
                                               const PlantModel& model) {
  std::vector<CheckResult> results;
  results.push_back(check_mcs_monotonicity(table));
  results.push_back(check_assignment_optimality(
      [](const Eigen::MatrixXd& c) { return hungarian(c); }));
  results.push_back(check_greedy_bound(
      [](const Eigen::MatrixXd& c) { return greedy(c); }));
  results.push_back(check_control_weight_oracle(model));
  return results;
}

}  // namespace wcs

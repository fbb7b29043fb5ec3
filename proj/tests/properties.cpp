// Property suite: must finish in well under a minute.

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mcmc_lab/mcmc_lab.hpp"

using namespace mcmc_lab;

namespace {

std::vector<TargetDensity> all_families(std::size_t d) {
  ThreeMixture m;
  m.means = separated_means(5.0, d);
  return {TargetDensity(IidProduct{BaseDistSpec::gamma(3, 2)}, d),
          TargetDensity(IidProduct{BaseDistSpec::beta(3, 2)}, d),
          TargetDensity(IidProduct{BaseDistSpec::laplace(0, 1)}, d),
          TargetDensity(Hypercube{}, d),
          make_target(json{{"family", "rough_carpet"}, {"dimension", d}}),
          make_target(json{{"family", "rough_carpet"}, {"dimension", d}, {"inhomogeneous", true}}),
          TargetDensity(m, d),
          make_target(json{{"family", "three_mixture"}, {"dimension", d}, {"inhomogeneous", true}}),
          TargetDensity(StdGaussian{}, d)};
}

}  // namespace

TEST(Property, AcceptProbabilityExactCases) {
  EXPECT_EQ(accept_probability(-3.2, -3.2), 1.0);
  EXPECT_EQ(accept_probability(-1.0, kNegInf), 0.0);
  EXPECT_EQ(accept_probability(0.0, -std::log(2.0)), 0.5);
  EXPECT_EQ(accept_probability(-10.0, 3.0), 1.0);
  EXPECT_THROW(accept_probability(kNegInf, -1.0), std::logic_error);
}

TEST(Property, DetailedBalanceIdentity) {
  auto rng = derive_stream(0, {Label{std::string("db")}});
  for (int i = 0; i < 200000; ++i) {
    const double a = -40 * rng.uniform(), b = -40 * rng.uniform();
    // exp(b - a) carries the rounding of the subtraction, hence a few ulp.
    const double lhs = std::exp(a) * accept_probability(a, b);
    const double rhs = std::exp(b) * accept_probability(b, a);
    ASSERT_NEAR(lhs, rhs, 1e-14 * std::max(lhs, rhs)) << a << " " << b;
  }
}

TEST(Property, ProposalSymmetry) {
  auto rng = derive_stream(0, {Label{std::string("sym")}});
  for (auto kind : {ProposalKind::gaussian, ProposalKind::laplace, ProposalKind::uniform}) {
    for (std::size_t d : {1u, 3u, 50u}) {
      for (double scale : {0.01, 0.7, 5.0}) {
        const auto p = ProposalSpec::from_scale(kind, scale, d);
        for (int rep = 0; rep < 300; ++rep) {
          std::vector<double> eps(d), neg(d);
          for (std::size_t k = 0; k < d; ++k) {
            eps[k] = 3 * scale * rng.normal();
            neg[k] = -eps[k];
          }
          const double a = p.increment_log_density(eps), b = p.increment_log_density(neg);
          ASSERT_TRUE(a == b) << to_string(kind);
        }
      }
    }
  }
}

TEST(Property, TemperedBetaOneIdentity) {
  auto rng = derive_stream(0, {Label{std::string("beta1")}});
  for (const auto& t : all_families(6)) {
    for (int rep = 0; rep < 500; ++rep) {
      std::vector<double> x(6);
      for (auto& xi : x) xi = 0.5 + 4 * rng.normal();
      const double a = t.log_density(x), b = t.tempered_log_density(x, 1.0);
      ASSERT_TRUE(a == b) << t.family_name();
    }
  }
}

TEST(Property, RwmEsjdStreamingEqualsOffline) {
  for (const auto& t : all_families(4)) {
    auto rng = derive_stream(0, {Label{std::string("esjd")}, Label{std::string(t.family_name())}});
    const auto p = ProposalSpec::from_ell(ProposalKind::gaussian, 1.5, 4);
    std::vector<std::vector<double>> path;
    const auto st = run_rwm(t, p, 20000, rng, t.central_point(), RwmOptions{100, 0},
                            [&](std::span<const double> x) { path.emplace_back(x.begin(), x.end()); });
    double sum = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) sum += std::pow(path[i][k] - path[i - 1][k], 2);
    }
    const double offline = sum / 20000.0;
    ASSERT_GT(offline, 0.0) << t.family_name();
    EXPECT_LE(std::abs(st.esjd - offline), 1e-12 * offline) << t.family_name();
  }
}

TEST(Property, PtEsjdStreamingEqualsOffline) {
  const auto t = make_target(json{{"family", "three_mixture"}, {"dimension", 10}, {"epsilon", 15}});
  auto lrng = derive_stream(0, {Label{std::string("pt-ladder")}});
  const auto ladder = build_ladder(t, 0.3, LadderParams{}, lrng);
  auto rng = derive_stream(0, {Label{std::string("pt-esjd")}});
  double sum = 0;
  std::int64_t n = 0;
  const auto st = run_pt(t, ladder, inverse_sqrt_beta_scales(ladder, 0.6), 20000, rng, PTOptions{},
                         [&](const SwapRecord& r) {
                           ++n;
                           if (r.accepted) sum += r.beta_gap * r.beta_gap;
                         });
  const double offline = sum / static_cast<double>(n);
  ASSERT_GT(offline, 0.0);
  EXPECT_LE(std::abs(st.temperature_esjd - offline), 1e-12 * offline);
}

TEST(Property, RejectedStepsAreBitwiseInvariant) {
  for (const auto& t : all_families(5)) {
    auto rng = derive_stream(0, {Label{std::string("reject")}, Label{std::string(t.family_name())}});
    const auto p = ProposalSpec::from_ell(ProposalKind::gaussian, 6.0, 5);
    std::vector<double> state = t.central_point(), buffer(5);
    double log_f = t.log_density(state);
    int rejected = 0;
    for (int i = 0; i < 5000; ++i) {
      const auto before = state;
      const double lf_before = log_f;
      const auto o = metropolis_step(std::span<double>(state), log_f, t, 1.0, p, rng, std::span<double>(buffer));
      if (!o.accepted) {
        ++rejected;
        ASSERT_EQ(0, std::memcmp(before.data(), state.data(), 5 * sizeof(double)));
        ASSERT_EQ(0, std::memcmp(&lf_before, &log_f, sizeof(double)));
        ASSERT_EQ(o.sq_jump, 0.0);
      }
    }
    EXPECT_GT(rejected, 0) << t.family_name();
  }
}

TEST(Property, SwapExchangeBitwiseContract) {
  auto rng = derive_stream(0, {Label{std::string("swap")}});
  const std::vector<double> betas{1.0, 0.6, 0.3, 0.1};
  int accepted = 0, rejected = 0;
  for (int rep = 0; rep < 5000; ++rep) {
    std::vector<std::vector<double>> states(4, std::vector<double>(3));
    std::vector<double> log_f(4);
    for (std::size_t k = 0; k < 4; ++k) {
      for (auto& v : states[k]) v = rng.normal();
      log_f[k] = -10 * rng.uniform();
    }
    const auto s0 = states;
    const auto l0 = log_f;
    const auto j = static_cast<std::size_t>(rng.below(3));
    const auto [p, ok] = attempt_swap(states, log_f, betas, j, rng);
    ASSERT_EQ(p, swap_probability(swap_log_ratio(betas[j], betas[j + 1], l0[j], l0[j + 1])));
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t src = k;
      if (ok && k == j) src = j + 1;
      if (ok && k == j + 1) src = j;
      ASSERT_EQ(0, std::memcmp(states[k].data(), s0[src].data(), 3 * sizeof(double)));
      ASSERT_EQ(0, std::memcmp(&log_f[k], &l0[src], sizeof(double)));
    }
    (ok ? accepted : rejected)++;
  }
  EXPECT_GT(accepted, 100);
  EXPECT_GT(rejected, 100);
}

TEST(Property, Determinism) {
  const auto rwm = sweep_config_from_json(json{{"target", {{"family", "rough_carpet"}, {"dimension", 6},
                                                           {"inhomogeneous", true}}},
                                               {"ell_grid", {{"points", 8}}},
                                               {"seeds", {0, 1, 2}},
                                               {"n_iters", 3000}},
                                          SweepMode::rwm);
  const auto a = dump_canonical(to_json(sweep_rwm(rwm, {1})));
  EXPECT_EQ(a, dump_canonical(to_json(sweep_rwm(rwm, {1}))));
  EXPECT_EQ(a, dump_canonical(to_json(sweep_rwm(rwm, {5}))));

  const auto pt = sweep_config_from_json(json{{"mode", "pt"},
                                              {"target", {{"family", "three_mixture"}, {"dimension", 5},
                                                          {"epsilon", 15}}},
                                              {"swap_rate_grid", {0.15, 0.3, 0.45}},
                                              {"seeds", {0, 1}},
                                              {"n_iters", 2000},
                                              {"pilot", {{"iters", 2000}}}});
  const auto b = dump_canonical(to_json(sweep_pt(pt, {1})));
  EXPECT_EQ(b, dump_canonical(to_json(sweep_pt(pt, {4}))));

  // A different base seed changes the numbers.
  auto other = rwm;
  other.base_seed = 1;
  EXPECT_NE(a, dump_canonical(to_json(sweep_rwm(other, {1}))));
}

TEST(Property, GammaChainMoments) {
  // 1e6-step chain on gamma(3, 2), d = 1. Mean 6 and variance 12 within five
  // batch-means standard errors.
  const TargetDensity t(IidProduct{BaseDistSpec::gamma(3, 2)}, 1);
  const auto p = ProposalSpec::from_scale(ProposalKind::gaussian, 2.4 * std::sqrt(12.0), 1);
  auto rng = derive_stream(0, {Label{std::string("gamma-chain")}});
  std::vector<double> xs;
  xs.reserve(1000001);
  run_rwm(t, p, 1000000, rng, t.central_point(), RwmOptions{1000, 0},
          [&](std::span<const double> x) { xs.push_back(x[0]); });
  const auto m = sample_moments(xs);
  const double se_mean = batch_means_standard_error(xs, 100);
  const double se_var = batch_means_standard_error(xs, 100, [&](double x) { return (x - m.mean) * (x - m.mean); });
  EXPECT_NEAR(m.mean, 6.0, 5 * se_mean);
  EXPECT_NEAR(m.variance, 12.0, 5 * se_var);
  EXPECT_LT(se_mean, 0.05);
}

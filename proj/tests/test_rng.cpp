#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mcmc_lab/rng.hpp"

using namespace mcmc_lab;

namespace {

RngStream scale_seed_stream(std::uint64_t base, std::int64_t seed) {
  return derive_stream(base, {Label{std::string("scale")}, Label{std::int64_t{3}}, Label{std::string("seed")},
                              Label{seed}});
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(DeriveStream, IdenticalLineageGivesIdenticalDraws) {
  auto a = scale_seed_stream(42, 1);
  auto b = scale_seed_stream(42, 1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(DeriveStream, SiblingStreamsAreUncorrelated) {
  auto a = scale_seed_stream(42, 1);
  auto b = scale_seed_stream(42, 2);
  std::vector<double> ua(100000), ub(100000);
  for (std::size_t i = 0; i < ua.size(); ++i) {
    ua[i] = a.uniform();
    ub[i] = b.uniform();
  }
  // Null sd of the sample correlation is 1/sqrt(n) ~ 0.0032, so 0.01 is ~3 sd.
  EXPECT_NEAR(pearson(ua, ub), 0.0, 0.01);
}

TEST(DeriveStream, DifferentBaseSeedsDifferOnFirstDraw) {
  auto a = derive_stream(42, std::span<const Label>{});
  auto b = derive_stream(43, std::span<const Label>{});
  EXPECT_NE(a(), b());
}

TEST(DeriveStream, NoFirstDrawCollisionsAcrossExperimentLineages) {
  std::set<std::uint64_t> first;
  std::size_t count = 0;
  for (std::uint64_t base = 0; base < 4; ++base) {
    for (std::int64_t i = 0; i < 40; ++i) {
      for (std::int64_t seed = 0; seed < 5; ++seed) {
        for (const char* tag : {"rwm", "pt"}) {
          auto s = derive_stream(base, {Label{std::string(tag)}, Label{i}, Label{seed}});
          first.insert(s());
          ++count;
        }
      }
    }
  }
  EXPECT_EQ(first.size(), count);
}

TEST(DeriveStream, IntegerAndStringLabelsAreDistinct) {
  auto a = derive_stream(7, {Label{std::int64_t{1}}});
  auto b = derive_stream(7, {Label{std::string("1")}});
  EXPECT_NE(a(), b());
}

TEST(DeriveStream, LabelOrderMatters) {
  auto a = derive_stream(7, {Label{std::int64_t{1}}, Label{std::int64_t{2}}});
  auto b = derive_stream(7, {Label{std::int64_t{2}}, Label{std::int64_t{1}}});
  EXPECT_NE(a(), b());
}

TEST(DeriveStream, RecordsLineage) {
  auto s = derive_stream(1, {Label{std::string("ladder")}, Label{std::int64_t{4}}});
  ASSERT_EQ(s.lineage().size(), 2u);
  EXPECT_EQ(std::get<std::string>(s.lineage()[0]), "ladder");
  EXPECT_EQ(std::get<std::int64_t>(s.lineage()[1]), 4);
}

TEST(RngStream, UniformRanges) {
  auto s = derive_stream(3, {Label{std::string("u")}});
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = s.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(RngStream, BelowIsUniformOverSmallRange) {
  auto s = derive_stream(5, {Label{std::string("below")}});
  std::vector<int> counts(7, 0);
  const int n = 700000;
  for (int i = 0; i < n; ++i) ++counts[s.below(7)];
  // Binomial sd = sqrt(n p (1-p)) ~ 293.
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * 293.0);
}

TEST(RngStream, NormalMoments) {
  auto s = derive_stream(9, {Label{std::string("normal")}});
  const int n = 1000000;
  double m = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m += z;
    m2 += z * z;
  }
  m /= n;
  m2 /= n;
  EXPECT_NEAR(m, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2 - m * m, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(RngStream, ExponentialMoments) {
  auto s = derive_stream(9, {Label{std::string("exp")}});
  const int n = 1000000;
  double m = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double e = s.exponential();
    ASSERT_GT(e, 0.0);
    m += e;
    m2 += e * e;
  }
  m /= n;
  m2 /= n;
  EXPECT_NEAR(m, 1.0, 5.0 / std::sqrt(n));
  // Var of e^2 for Exp(1) is 24 - 4 = 20.
  EXPECT_NEAR(m2, 2.0, 5.0 * std::sqrt(20.0 / n));
}

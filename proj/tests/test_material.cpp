#include <gtest/gtest.h>

#include "elastmix/material.hpp"
#include "test_util.hpp"

using namespace elastmix;
using elastmix::testing::random_sym;

TEST(Material, ComplianceOfIdentity) {
  const LameParams p{0.5, 1.0};
  const SymTensor<2> a = apply_compliance<2>(p, SymTensor<2>::Identity());
  EXPECT_TRUE(a.isApprox(SymTensor<2>::Identity() / 3.0, 1e-15));
}

TEST(Material, TraceFreeTensorIsScaledByOneOverTwoMu) {
  SymTensor<3> s;
  s << 1, 2, 0, 2, -3, 4, 0, 4, 2;
  for (double lambda : {0.0, 1.0, 1e6}) {
    const LameParams p{0.7, lambda};
    EXPECT_TRUE(apply_compliance<3>(p, s).isApprox(s / 1.4, 1e-14));
  }
}

TEST(Material, HalfMuZeroLambdaIsIdentity) {
  const LameParams p{0.5, 0.0};
  for (int k = 0; k < 10; ++k) {
    const auto s = random_sym<3>();
    EXPECT_TRUE(apply_compliance<3>(p, s).isApprox(s, 1e-15));
  }
}

TEST(Material, StiffnessExamples) {
  const LameParams p{0.5, 1.0};
  EXPECT_TRUE(apply_stiffness<2>(p, SymTensor<2>::Identity()).isApprox(3.0 * SymTensor<2>::Identity(), 1e-15));
  EXPECT_TRUE(apply_stiffness<2>(p, SymTensor<2>::Zero()).isZero());
}

TEST(Material, RoundTripAcrossParameters) {
  for (double mu : {0.3, 0.5, 1.0})
    for (double lambda : {0.0, 1.0, 1e3, 1e6}) {
      const LameParams p{mu, lambda};
      for (int k = 0; k < 20; ++k) {
        const auto e = random_sym<3>();
        const double scale = 1.0 + lambda / mu;
        EXPECT_LE((apply_compliance<3>(p, apply_stiffness<3>(p, e)) - e).norm(), 1e-14 * scale * e.norm());
        EXPECT_LE((apply_stiffness<3>(p, apply_compliance<3>(p, e)) - e).norm(), 1e-14 * scale * e.norm());
      }
    }
}

TEST(Material, ComplianceIsCoercive) {
  for (double lambda : {0.0, 1.0, 1e6}) {
    const LameParams p{0.5, lambda};
    for (int k = 0; k < 100; ++k) {
      const auto s = random_sym<2>();
      const double q = apply_compliance<2>(p, s).cwiseProduct(s).sum();
      EXPECT_GE(q, s.squaredNorm() * p.compliance_lower_bound(2) * (1.0 - 1e-12));
      EXPECT_NEAR(q, compliance_product<2>(p, s, s), 1e-14 * (1.0 + std::abs(q)));
    }
  }
}

TEST(Material, RejectsInvalidInput) {
  SymTensor<2> asym;
  asym << 1, 2, 0, 1;
  EXPECT_THROW(apply_compliance<2>(LameParams{}, asym), InvalidArgument);
  EXPECT_THROW(apply_stiffness<2>(LameParams{}, asym), InvalidArgument);
  EXPECT_THROW(LameParams({0.0, 1.0}).validate(2), InvalidArgument);
  EXPECT_THROW(LameParams({1.0, -0.1}).validate(2), InvalidArgument);
}

TEST(Material, YoungPoissonConversion) {
  const auto p = LameParams::from_young_poisson(210.0, 0.3);
  EXPECT_NEAR(p.young(), 210.0, 1e-12);
  EXPECT_NEAR(p.poisson(), 0.3, 1e-15);
  EXPECT_NEAR(p.mu, 210.0 / 2.6, 1e-12);
}

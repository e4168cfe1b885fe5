#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pexp/pexp.hpp"
#include "reference.hpp"

using namespace pexp;

namespace {

std::size_t nearest_sample(const Signal& sig, double x) {
  const auto n = static_cast<double>(sig.size());
  return static_cast<std::size_t>(std::clamp(std::floor(x * n), 0.0, n - 1.0));
}

}  // namespace

TEST(Cusp, SampleFollowsPowerLaw) {
  const auto sig = gen_cusp(0.5, 0.5, 10);
  const std::size_t i = nearest_sample(sig, 0.75);
  const double d = std::abs(sig.x(i) - 0.5);
  EXPECT_DOUBLE_EQ(sig.samples[i], std::sqrt(d));
  EXPECT_NEAR(sig.samples[i], 0.5, 1e-3);
}

TEST(Cusp, SamplesAvoidTheSingularity) {
  const auto sig = gen_cusp(-0.9, 0.5, 12);
  for (double v : sig.samples) ASSERT_TRUE(std::isfinite(v));
  EXPECT_NO_THROW(validate(sig));
}

TEST(Cusp, TheoryIsConstant) {
  const auto tp = theoretical_profile(gen_cusp(0.6, 0.5, 8).meta);
  for (double p : {0.25, 1.0, 3.0, kInf}) EXPECT_DOUBLE_EQ(tp.h(p), 0.6);
  EXPECT_TRUE(std::isinf(tp.p0));
  EXPECT_DOUBLE_EQ(theoretical_profile(gen_cusp(-0.4, 0.5, 8).meta).p0, 2.5);
}

TEST(Cusp, RejectsBadExponents) {
  EXPECT_THROW(gen_cusp(2.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_cusp(4.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_cusp(-1.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_cusp(-1.5, 0.5, 10), InvalidArgument);
  EXPECT_NO_THROW(gen_cusp(3.0, 0.5, 10));
  EXPECT_THROW(gen_cusp(0.5, 0.5, 7), InvalidArgument);
  EXPECT_THROW(gen_cusp(0.5, 1.0, 10), InvalidArgument);
}

TEST(Chirp, SampleFormula) {
  const auto sig = gen_chirp(1.0, 1.0, 0.5, 10);
  for (std::size_t i : {0u, 100u, 511u, 700u}) {
    const double r = std::abs(sig.x(i) - 0.5);
    EXPECT_DOUBLE_EQ(sig.samples[i], r * std::sin(1.0 / r));
  }
}

TEST(Chirp, TheoryAndIntegratedShift) {
  const auto sig = gen_chirp(-0.3, 1.0, 0.5, 10);
  const auto tp = theoretical_profile(sig.meta);
  EXPECT_DOUBLE_EQ(tp.h(2.0), -0.3);
  EXPECT_NEAR(tp.p0, 10.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(tp.beta_osc, 1.0);
  // one unit of integration lifts every p-exponent by beta + 1
  EXPECT_DOUBLE_EQ(tp.h(2.0) + (1.0 + tp.beta_osc) * 1.0, -0.3 + 1.0 + 1.0);
}

TEST(Chirp, Rejects) {
  EXPECT_THROW(gen_chirp(0.5, 0.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_chirp(0.5, -1.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_chirp(-1.2, 1.0, 0.5, 10), InvalidArgument);
}

TEST(Chirp, ResonanceLevelLimitsTheFit) {
  EXPECT_EQ(gen_chirp(-0.3, 1.0, 0.5, 16).meta.min_fit_level, 8);
  EXPECT_EQ(gen_chirp(-0.3, 2.0, 0.5, 16).meta.min_fit_level, 11);
}

TEST(Comb, ToothValue) {
  const auto sig = gen_lacunary_comb({1.0, 2.0}, 12);
  EXPECT_DOUBLE_EQ(sig.x0, 0.0);
  const std::size_t i = sig.size() / 8;  // first sample right of 2^-3
  EXPECT_DOUBLE_EQ(sig.samples[i], 0.125);
  EXPECT_DOUBLE_EQ(sig.samples[i - 1], 0.0);
}

TEST(Comb, MetaAndTheory) {
  const auto sig = gen_lacunary_comb({-0.2, 3.0}, 16);
  EXPECT_EQ(sig.meta.l_max, 5);
  EXPECT_TRUE(sig.meta.resolution_warning);
  const auto tp = theoretical_profile(sig.meta);
  EXPECT_NEAR(tp.h(2.0), 0.8, 1e-12);
  EXPECT_NEAR(tp.h(1.0), 1.8, 1e-12);
  EXPECT_NEAR(tp.p0, 15.0, 1e-12);
}

TEST(Comb, Rejects) {
  EXPECT_THROW(gen_lacunary_comb({0.0, 1.0}, 12), InvalidArgument);
  EXPECT_THROW(gen_lacunary_comb({0.0, 0.5}, 12), InvalidArgument);
  EXPECT_THROW(gen_lacunary_comb({-2.5, 2.0}, 12), InvalidArgument);
}

TEST(Comb, SupportMeasureIsGeometric) {
  const CombSpec spec{0.3, 2.0};
  const int L = 16;
  const auto sig = gen_lacunary_comb(spec, L);
  for (int j = 1; j <= sig.meta.l_max; ++j) {
    double painted = 0.0;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (sig.samples[i] != 0.0 && sig.x(i) < std::exp2(-j) * 2.0) painted += 1.0 / static_cast<double>(sig.size());
    }
    double analytic = 0.0;
    for (int l = j; l <= sig.meta.l_max; ++l) analytic += std::exp2(-spec.gamma * l);
    EXPECT_NEAR(painted, analytic, 1e-12) << "j = " << j;
  }
}

TEST(GeneralComb, PieceSelection) {
  EXPECT_EQ(general_comb_piece(12, 3), 2u);
  EXPECT_EQ(general_comb_piece(12, 2), 0u);
  EXPECT_EQ(general_comb_piece(7, 2), 0u);
  EXPECT_EQ(general_comb_piece(6, 2), 1u);
}

TEST(GeneralComb, KinkTheory) {
  const auto sig = gen_general_comb(pexp::testing::kink_family(), 16);
  const auto tp = theoretical_profile(sig.meta);
  EXPECT_DOUBLE_EQ(tp.h(1.0), 0.5);
  EXPECT_DOUBLE_EQ(tp.h(2.0), 0.5);
  EXPECT_DOUBLE_EQ(tp.h(4.0), 0.25);
  EXPECT_DOUBLE_EQ(tp.h(kInf), 0.0);
}

TEST(GeneralComb, SinglePieceIsTheLacunaryComb) {
  for (auto [alpha, gamma] : {std::pair{-0.2, 3.0}, std::pair{0.3, 2.0}, std::pair{1.0, 2.5}}) {
    AffineFamily fam;
    fam.pieces = {{gamma - 1.0, alpha}};
    if (alpha < 0.0) fam.p0 = -gamma / alpha;
    const auto a = gen_general_comb(fam, 14);
    const auto b = gen_lacunary_comb({alpha, gamma}, 14);
    ASSERT_EQ(a.samples, b.samples);
    const auto ta = theoretical_profile(a.meta);
    const auto tb = theoretical_profile(b.meta);
    for (double p : {1.0, 2.0, 4.0}) EXPECT_NEAR(ta.h(p), tb.h(p), 1e-12);
  }
}

TEST(GeneralComb, DampingDividesByLSquared) {
  auto fam = pexp::testing::kink_family();
  fam.l2_damping = true;
  const auto damped = general_comb_teeth(fam, 12);
  fam.l2_damping = false;
  const auto plain = general_comb_teeth(fam, 12);
  ASSERT_EQ(damped.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_DOUBLE_EQ(damped[i].height * plain[i].l * plain[i].l, plain[i].height);
  }
}

TEST(GeneralComb, RejectsInvalidFamilies) {
  AffineFamily fam;
  EXPECT_THROW(gen_general_comb(fam, 12), InvalidArgument);
  fam.pieces = {{-1.0, 0.5}};
  EXPECT_THROW(gen_general_comb(fam, 12), InvalidArgument);
  fam.pieces = {{0.0, -1.5}};
  EXPECT_THROW(gen_general_comb(fam, 12), InvalidArgument);
  fam.pieces = {{0.0, -0.6}};
  fam.p0 = 2.0;  // rho(1/2) = -0.6 < -1/2
  EXPECT_THROW(gen_general_comb(fam, 12), InvalidArgument);
}

TEST(SelfSimilar, ConstantProfilesGiveTheCusp) {
  const auto spec = SelfSimilarSpec::from_functions(0.5, 2.0, [](double) { return 1.0; }, [](double) { return 1.0; });
  const auto a = gen_selfsimilar(spec, 0.5, 12);
  const auto b = gen_cusp(0.5, 0.5, 12);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_DOUBLE_EQ(a.samples[i], b.samples[i]);
}

TEST(SelfSimilar, LogPeriodicValue) {
  const double a = 2.0;
  const auto plus = [a](double u) { return 2.0 + std::cos(2.0 * std::numbers::pi * u / std::log(a)); };
  const auto spec = SelfSimilarSpec::from_functions(0.5, a, plus, plus, 512);
  EXPECT_NEAR(std::pow(0.25, 0.5) * SelfSimilarSpec::eval(spec.omega_plus, std::log(0.25), a), 1.5, 1e-12);
  const auto sig = gen_selfsimilar(spec, 0.5, 12);
  for (std::size_t i = 0; i < sig.size(); i += 97) {
    const double r = std::abs(sig.x(i) - 0.5);
    EXPECT_NEAR(sig.samples[i], std::sqrt(r) * plus(std::log(r)), 1e-4);
  }
}

TEST(SelfSimilar, ComplexExponent) {
  const double beta = 3.0;
  const auto cosb = [beta](double u) { return std::cos(beta * u); };
  // one period of cos(beta u) is 2 pi / beta, i.e. ratio e^{2 pi / beta}
  const auto spec = SelfSimilarSpec::from_functions(0.3, std::exp(2.0 * std::numbers::pi / beta), cosb, cosb, 2048);
  const auto sig = gen_selfsimilar(spec, 0.5, 12);
  for (std::size_t i = 0; i < sig.size(); i += 131) {
    const double r = std::abs(sig.x(i) - 0.5);
    EXPECT_NEAR(sig.samples[i], std::pow(r, 0.3) * std::cos(beta * std::log(r)), 1e-4);
  }
  EXPECT_DOUBLE_EQ(theoretical_profile(sig.meta).h(2.0), 0.3);
}

TEST(SelfSimilar, Rejects) {
  auto spec = SelfSimilarSpec::from_functions(0.5, 2.0, [](double) { return 1.0; }, [](double) { return 1.0; });
  spec.ratio = 1.0;
  EXPECT_THROW(gen_selfsimilar(spec, 0.5, 10), InvalidArgument);
  spec.ratio = 2.0;
  spec.omega_minus.clear();
  EXPECT_THROW(gen_selfsimilar(spec, 0.5, 10), InvalidArgument);
}

TEST(CuspPlusChirp, ChainIsEnforced) {
  EXPECT_NO_THROW(gen_cusp_plus_chirp(-0.2, -0.3, 1.0, 0.5, 10));
  EXPECT_THROW(gen_cusp_plus_chirp(-0.25, -0.3, 0.1, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_cusp_plus_chirp(-0.4, -0.3, 1.0, 0.5, 10), InvalidArgument);
  EXPECT_THROW(gen_cusp_plus_chirp(-0.1, -0.3, 1.0, 0.5, 10), InvalidArgument);
}

TEST(CuspPlusChirp, TheoryAndMasking) {
  const auto sig = gen_cusp_plus_chirp(-0.2, -0.3, 1.0, 0.5, 10);
  const auto tp = theoretical_profile(sig.meta);
  EXPECT_DOUBLE_EQ(tp.h(1.0), -0.3);
  const double s = 0.3;
  EXPECT_NEAR(tp.gamma + s, 0.1, 1e-12);
  EXPECT_NEAR(tp.alpha + s * (1.0 + tp.beta_osc), 0.3, 1e-12);
  EXPECT_LT(tp.gamma + s, tp.alpha + s * (1.0 + tp.beta_osc));
}

TEST(WhiteNoise, MeanAndDeterminism) {
  const auto a = gen_wgn(16, 7);
  const auto b = gen_wgn(16, 7);
  const auto c = gen_wgn(16, 8);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  double mean = 0.0;
  double var = 0.0;
  for (double v : a.samples) mean += v;
  mean /= static_cast<double>(a.size());
  for (double v : a.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(a.size());
  EXPECT_LE(std::abs(mean), 4.0 / std::sqrt(static_cast<double>(a.size())));
  EXPECT_NEAR(var, 1.0, 0.03);
  EXPECT_DOUBLE_EQ(white_noise_eta(2.0), -1.0);
}

TEST(Generators, AreBitReproducible) {
  for (const auto& ref : pexp::testing::reference_signals(12)) {
    const auto again = pexp::testing::reference_signals(12);
    bool found = false;
    for (const auto& r : again) {
      if (r.name == ref.name) {
        EXPECT_EQ(r.sig.samples, ref.sig.samples) << ref.name;
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(TheoreticalProfile, ObeysMonotonicityAndConcavity) {
  std::vector<SignalMeta> metas;
  metas.push_back(gen_cusp(0.6, 0.5, 8).meta);
  metas.push_back(gen_cusp(-0.4, 0.5, 8).meta);
  metas.push_back(gen_chirp(-0.3, 1.0, 0.5, 8).meta);
  metas.push_back(gen_lacunary_comb({-0.2, 3.0}, 8).meta);
  metas.push_back(gen_lacunary_comb({0.3, 2.0}, 8).meta);
  metas.push_back(gen_general_comb(pexp::testing::kink_family(), 8).meta);
  AffineFamily three;
  three.pieces = {{0.0, 0.8}, {0.5, 0.3}, {2.0, -0.1}};
  three.p0 = 10.0;
  metas.push_back(gen_general_comb(three, 8).meta);
  metas.push_back(gen_cusp_plus_chirp(-0.2, -0.3, 1.0, 0.5, 8).meta);
  for (const auto& m : metas) {
    const auto tp = theoretical_profile(m);
    const double r_lo = std::isinf(tp.p0) ? 0.0 : 1.0 / tp.p0 + 1e-6;
    std::vector<double> r;
    for (int i = 0; i <= 200; ++i) r.push_back(r_lo + (4.0 - r_lo) * i / 200.0);
    for (std::size_t i = 1; i < r.size(); ++i) {
      // r ascending means p descending: h may only grow
      EXPECT_GE(tp.h(1.0 / r[i]) + 1e-12, tp.h(1.0 / r[i - 1])) << m.generator;
    }
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double d2 = tp.h(1.0 / r[i - 1]) - 2.0 * tp.h(1.0 / r[i]) + tp.h(1.0 / r[i + 1]);
      EXPECT_LE(d2, 1e-12) << m.generator << " at r = " << r[i];
    }
  }
}

TEST(TheoreticalProfile, UnknownKind) {
  SignalMeta m;
  m.generator = "sawtooth";
  EXPECT_THROW(theoretical_profile(m), InvalidArgument);
}

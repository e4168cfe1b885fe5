#include <gtest/gtest.h>

#include <cmath>

#include "pexp/io.hpp"
#include "pexp/pexp.hpp"
#include "reference.hpp"

using namespace pexp;
using pexp::testing::comb_config;
using pexp::testing::kL;

namespace {

ClassifyConfig config_for(const PExpConfig& p) {
  ClassifyConfig c;
  c.pexp = p;
  return c;
}

PExponentProfile profile(const Signal& sig, double s, const PExpConfig& cfg = {}) {
  return pexp_profile(sig, sig.x0, default_p_grid(), s, cfg);
}

void expect_report_invariants(const SingularityReport& r, const std::string& what) {
  switch (r.label) {
    case SingularityLabel::canonical:
      EXPECT_TRUE(r.p_invariant) << what;
      EXPECT_EQ(r.beta_hat, 0.0) << what;
      break;
    case SingularityLabel::oscillating_balanced:
      EXPECT_TRUE(r.p_invariant) << what;
      EXPECT_GT(r.beta_hat, r.config.beta_significance) << what;
      break;
    case SingularityLabel::oscillating_lacunary:
      EXPECT_FALSE(r.p_invariant) << what;
      break;
    case SingularityLabel::inadmissible:
    case SingularityLabel::indeterminate:
      EXPECT_FALSE(r.reasons.empty()) << what;
      break;
  }
  EXPECT_EQ(r.profiles_s.size(), r.config.s_list.size()) << what;
}

}  // namespace

TEST(PInvariance, PositiveCusp) { EXPECT_TRUE(check_p_invariant(profile(gen_cusp(0.6, 0.5, kL), 0.0), 0.1)); }

TEST(PInvariance, LacunaryComb) {
  EXPECT_FALSE(check_p_invariant(profile(gen_lacunary_comb({-0.2, 3.0}, kL), 0.0, comb_config()), 0.1));
}

TEST(PInvariance, Chirp) { EXPECT_TRUE(check_p_invariant(profile(gen_chirp(-0.3, 1.0, 0.5, kL), 0.0), 0.1)); }

TEST(PInvariance, TooFewValidEntries) {
  const auto prof = profile(gen_wgn(14, 2), 0.0);
  EXPECT_THROW(check_p_invariant(prof, 0.1), EstimationError);
}

TEST(Canonical, PositiveCusp) {
  const auto sig = gen_cusp(0.6, 0.5, kL);
  EXPECT_TRUE(check_canonical(profile(sig, 0.0), {profile(sig, 0.5), profile(sig, 1.0)}, 0.15));
}

TEST(Canonical, ChirpShiftsTwiceAsFast) {
  const auto sig = gen_chirp(0.5, 1.0, 0.5, kL);
  EXPECT_FALSE(check_canonical(profile(sig, 0.0), {profile(sig, 1.0)}, 0.15));
}

TEST(Canonical, LacunaryComb) {
  const auto sig = gen_lacunary_comb({-0.2, 3.0}, kL);
  EXPECT_FALSE(check_canonical(profile(sig, 0.0, comb_config()), {profile(sig, 1.0, comb_config())}, 0.15));
}

TEST(Canonical, Preconditions) {
  const auto sig = gen_cusp(0.6, 0.5, 12);
  const auto p0 = profile(sig, 0.0);
  EXPECT_THROW(check_canonical(p0, {}, 0.15), InvalidArgument);
  EXPECT_THROW(check_canonical(p0, {p0}, 0.15), InvalidArgument);
  auto other = pexp_profile(sig, 0.5, {1.0, 2.0}, 0.5);
  EXPECT_THROW(check_canonical(p0, {other}, 0.15), InvalidArgument);
}

TEST(OscillationExponent, ChirpWithUnitBeta) {
  const auto sig = gen_chirp(0.5, 1.0, 0.5, kL);
  EXPECT_NEAR(oscillation_exponent(profile(sig, 0.0), profile(sig, 1.0), 1.0), 1.0, 0.2);
}

TEST(OscillationExponent, CuspIsZero) {
  const auto sig = gen_cusp(0.6, 0.5, kL);
  const auto p0 = profile(sig, 0.0);
  for (double s : {0.5, 1.0}) EXPECT_NEAR(oscillation_exponent(p0, profile(sig, s), s), 0.0, 0.1) << s;
}

TEST(OscillationExponent, CombShiftExceedsSNearUpperP) {
  const auto sig = gen_lacunary_comb({0.3, 2.0}, kL);
  const auto p0 = profile(sig, 0.0, comb_config());
  const auto p1 = profile(sig, 1.0, comb_config());
  const auto idx = jointly_valid(p0, {&p1});
  ASSERT_FALSE(idx.empty());
  const std::size_t top = idx.back();
  EXPECT_GT(p1.h_hat[top] - p0.h_hat[top], 1.0 + 0.1) << "p=" << p0.p_grid[top];
}

TEST(OscillationExponent, RejectsNonPositiveS) {
  const auto sig = gen_cusp(0.6, 0.5, 12);
  const auto p0 = profile(sig, 0.0);
  EXPECT_THROW(oscillation_exponent(p0, p0, 0.0), InvalidArgument);
}

TEST(Classify, NegativeCuspIsCanonical) {
  const auto r = classify_singularity(gen_cusp(-0.4, 0.5, kL), 0.5);
  EXPECT_EQ(r.label, SingularityLabel::canonical) << to_string(r.label);
  EXPECT_EQ(r.beta_hat, 0.0);
}

TEST(Classify, ChirpIsBalanced) {
  const auto r = classify_singularity(gen_chirp(-0.3, 1.0, 0.5, kL), 0.5);
  EXPECT_EQ(r.label, SingularityLabel::oscillating_balanced) << to_string(r.label);
}

TEST(Classify, ChirpOscillationExponent) {
  const auto r = classify_singularity(gen_chirp(-0.3, 1.0, 0.5, kL), 0.5);
  EXPECT_NEAR(r.beta_hat, 1.0, 0.2);
}

TEST(Classify, CombIsLacunary) {
  const auto r = classify_singularity(gen_lacunary_comb({-0.2, 3.0}, kL), 0.0, config_for(comb_config()));
  EXPECT_EQ(r.label, SingularityLabel::oscillating_lacunary) << to_string(r.label);
}

TEST(Classify, WhiteNoiseIsInadmissible) {
  const auto r = classify_singularity(gen_wgn(kL, 1), 0.5);
  EXPECT_EQ(r.label, SingularityLabel::inadmissible);
  EXPECT_FALSE(r.reasons.empty());
}

TEST(Classify, Deterministic) {
  const auto sig = gen_chirp(0.2, 1.0, 0.5, 14);
  const auto a = classify_singularity(sig, 0.5);
  const auto b = classify_singularity(sig, 0.5);
  EXPECT_EQ(a.label, b.label);
  EXPECT_EQ(a.beta_hat, b.beta_hat);
  EXPECT_EQ(a.profile_s0.h_hat.size(), b.profile_s0.h_hat.size());
  for (std::size_t i = 0; i < a.profile_s0.size(); ++i) {
    const double x = a.profile_s0.h_hat[i];
    const double y = b.profile_s0.h_hat[i];
    EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y)));
  }
}

TEST(Classify, ReportInvariantsOnReferences) {
  for (const auto& ref : pexp::testing::reference_signals()) {
    const auto r = classify_singularity(ref.sig, ref.sig.x0, config_for(ref.cfg));
    expect_report_invariants(r, ref.name);
  }
  expect_report_invariants(classify_singularity(gen_wgn(14, 5), 0.5), "wGn");
}

// Taxonomy sweeps: at least 90% of each family gets its expected label.
namespace {

struct SweepResult {
  int agree = 0;
  int total = 0;
  std::string misses;
};

void tally(SweepResult& res, const SingularityReport& r, SingularityLabel want, const std::string& name) {
  expect_report_invariants(r, name);
  ++res.total;
  if (r.label == want) {
    ++res.agree;
  } else {
    res.misses += " " + name + "->" + to_string(r.label);
  }
}

}  // namespace

TEST(Taxonomy, Cusps) {
  SweepResult res;
  for (double a : {-0.6, -0.4, -0.2, 0.1, 0.3, 0.6, 0.9, 1.3, 1.7, 2.2}) {
    tally(res, classify_singularity(gen_cusp(a, 0.5, kL), 0.5), SingularityLabel::canonical,
          "cusp(" + io::fmt(a) + ")");
  }
  EXPECT_GE(10 * res.agree, 9 * res.total) << res.misses;
}

TEST(Taxonomy, Chirps) {
  SweepResult res;
  for (double a : {-0.45, -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4}) {
    tally(res, classify_singularity(gen_chirp(a, 1.0, 0.5, kL), 0.5), SingularityLabel::oscillating_balanced,
          "chirp(" + io::fmt(a) + ")");
  }
  EXPECT_GE(10 * res.agree, 9 * res.total) << res.misses;
}

TEST(Taxonomy, Combs) {
  SweepResult res;
  for (double a : {-0.3, -0.1, 0.2, 0.6, 1.0}) {
    for (double g : {2.0, 3.0}) {
      tally(res, classify_singularity(gen_lacunary_comb({a, g}, kL), 0.0, config_for(comb_config())),
            SingularityLabel::oscillating_lacunary, "comb(" + io::fmt(a) + "," + io::fmt(g) + ")");
    }
  }
  EXPECT_GE(10 * res.agree, 9 * res.total) << res.misses;
}

TEST(Taxonomy, WhiteNoise) {
  SweepResult res;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    tally(res, classify_singularity(gen_wgn(kL, seed), 0.5), SingularityLabel::inadmissible,
          "wgn(" + std::to_string(seed) + ")");
  }
  EXPECT_GE(10 * res.agree, 9 * res.total) << res.misses;
}

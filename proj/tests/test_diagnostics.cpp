#include "doctest.h"

#include "aniso/diagnostics.hpp"
#include "test_support.hpp"

using namespace aniso;

namespace {

double pearson(const Vec& a, const Vec& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  double sab = 0, saa = 0, sbb = 0;
  for (Index i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

PairedSet paired(const Mat& x, const Mat& y) { return PairedSet(EmbeddingSet(x, "image"), EmbeddingSet(y, "text")); }

}  // namespace

TEST_CASE("spectral correlation matches a hand-rolled log Pearson") {
  Vec a(5), b(5);
  a << 5, 3, 2, 1, 0.5;
  b << 4, 4, 1, 0.7, 0.1;
  const Vec la = a.array().log();
  const Vec lb = b.array().log();
  CHECK(spectral_correlation(a, b) == doctest::Approx(pearson(la, lb)).epsilon(1e-12));
  CHECK(spectral_correlation(a, Vec(3.0 * a)) == doctest::Approx(1.0).epsilon(1e-12));
  try {
    spectral_correlation(Vec::Ones(4), Vec::Ones(4));
    FAIL("expected DegenerateSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateSpectrum);
  }
}

TEST_CASE("subspace overlap on planted angles") {
  Mat u = Mat::Zero(4, 2);
  u(0, 0) = 1;
  u(1, 1) = 1;
  CHECK(subspace_overlap(u, u) == doctest::Approx(1.0));
  Mat w = Mat::Zero(4, 2);
  w(2, 0) = 1;
  w(3, 1) = 1;
  CHECK(subspace_overlap(u, w) == doctest::Approx(0.0));
  // Rotate one axis by angle t into the complement: O = (1 + cos^2 t) / 2.
  const double t = 0.4;
  Mat v = u;
  v(0, 0) = std::cos(t);
  v(2, 0) = std::sin(t);
  CHECK(subspace_overlap(u, v) == doctest::Approx((1 + std::cos(t) * std::cos(t)) / 2).epsilon(1e-12));
}

TEST_CASE("random overlap baseline sits near q/d") {
  Rng rng = make_rng(31);
  const Mat fixed = haar_subspace(32, 4, rng);
  const OverlapBaseline b = random_overlap_baseline(fixed, 400, rng);
  CHECK(std::abs(b.mean - 4.0 / 32.0) < 4.0 * b.stderr_);
}

TEST_CASE("mean residual decomposition of a pure shift") {
  Rng rng = make_rng(32);
  const Mat x = gaussian_matrix(100, 6, rng);
  Vec shift = Vec::Zero(6);
  shift[2] = 0.5;
  const Mat y = x.rowwise() + shift.transpose();
  const MeanResidual r = mean_residual_decomposition(paired(x, y));
  CHECK(r.g_mu == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.d_tilde < 1e-12);
  CHECK(r.ratio_dist < 1e-12);
  CHECK(r.mean_sq_distance == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.identity_rel_error < 1e-12);
}

TEST_CASE("residual covariance direct and four-term forms agree") {
  Rng rng = make_rng(33);
  const Mat x = gaussian_matrix(500, 10, rng);
  const Mat y = 0.7 * x + 0.3 * gaussian_matrix(500, 10, rng);
  const PairedSet p = paired(x, y);
  const Mat a = residual_covariance(p).matrix();
  const Mat b = residual_covariance_four_term(p).matrix();
  CHECK((a - b).norm() / a.norm() < 1e-12);
}

TEST_CASE("residual spectrum summaries on a known diagonal") {
  Vec ev(5);
  ev << 4, 1, 1, 1, 1;
  const ResidualSpectrum s = residual_spectrum(ev);
  CHECK(s.a_r == doctest::Approx(2.5));
  CHECK(s.d_eff == doctest::Approx(64.0 / 20.0));
  CHECK(s.energy[0] == doctest::Approx(0.5));
  CHECK(s.energy[4] == doctest::Approx(1.0));
  CHECK(s.normalized.sum() == doctest::Approx(1.0));
  try {
    residual_spectrum(Vec::Zero(3));
    FAIL("expected DegenerateResidual");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateResidual);
  }
  Vec neg(2);
  neg << 1, -0.5;
  CHECK_THROWS_AS(residual_spectrum(neg), Error);
}

TEST_CASE("coverage ratio of an axis-aligned frame") {
  Vec ev(4);
  ev << 3, 2, 1, 0;
  const SymMatrix sr(Mat(ev.asDiagonal()));
  Mat q = Mat::Zero(4, 2);
  q(0, 0) = 1;
  q(2, 1) = 1;
  CHECK(coverage_ratio(q, sr) == doctest::Approx(4.0 / 6.0));
  q(0, 1) = 0.5;
  try {
    coverage_ratio(q, sr);
    FAIL("expected InvalidFrame");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidFrame);
  }
}

TEST_CASE("diagnose on identical modalities reports no gap") {
  Rng rng = make_rng(34);
  const Mat x = aniso::testing::unit_rows(300, 16, rng);
  const GapReport g = diagnose(paired(x, x));
  CHECK(g.mean_residual.g_mu == 0.0);
  CHECK(g.mean_residual.d_mean == 0.0);
  CHECK(g.mean_residual.ratio_undefined);
  CHECK(g.residual_degenerate);
  CHECK(g.a_r == 1.0);
  REQUIRE(g.c_lambda.has_value());
  CHECK(*g.c_lambda == doctest::Approx(1.0));
  for (const auto& p : g.overlap_curve) CHECK(p.value == doctest::Approx(1.0));
  const auto j = g.to_json();
  for (const char* key : {"c_lambda", "overlap_curve", "g_mu", "g_sigma", "residual_ratio_dist", "a_r",
                          "energy_curve", "d_eff_frac", "residual_spectrum"})
    CHECK(j.contains(key));
  CHECK(g.overlap_csv().rfind("q,O_q,baseline\n", 0) == 0);
  CHECK(g.energy_csv().rfind("K,E_K,baseline\n", 0) == 0);
}

TEST_CASE("diagnostics are invariant to a common rotation") {
  Rng rng = make_rng(35);
  const Mat x = aniso::testing::unit_rows(400, 12, rng);
  Mat y = x + 0.3 * gaussian_matrix(400, 12, rng);
  y.rowwise().normalize();
  const Mat q = haar_subspace(12, 12, rng);
  const GapReport a = diagnose(paired(x, y));
  const GapReport b = diagnose(paired(x * q, y * q));
  CHECK(a.a_r == doctest::Approx(b.a_r).epsilon(1e-9));
  CHECK(a.d_eff_frac == doctest::Approx(b.d_eff_frac).epsilon(1e-9));
  CHECK(*a.c_lambda == doctest::Approx(*b.c_lambda).epsilon(1e-9));
}

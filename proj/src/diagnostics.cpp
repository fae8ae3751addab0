#include "aniso/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace aniso {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

double spectral_correlation(const Vec& eig_x, const Vec& eig_y) {
  require(eig_x.size() == eig_y.size(), Errc::InvalidInput, "spectra must have equal length");
  const Index d = eig_x.size();
  const double floor_x = 1e-12 * eig_x.sum() / static_cast<double>(d);
  const double floor_y = 1e-12 * eig_y.sum() / static_cast<double>(d);
  std::vector<double> lx, ly;
  for (Index j = 0; j < d; ++j) {
    if (eig_x(j) <= floor_x || eig_y(j) <= floor_y) continue;
    lx.push_back(std::log(eig_x(j)));
    ly.push_back(std::log(eig_y(j)));
  }
  require(lx.size() >= 2, Errc::DegenerateSpectrum,
          "fewer than 2 eigenvalues above the floor");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 1e-24 && syy > 1e-24, Errc::DegenerateSpectrum, "log-spectrum has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double spectral_correlation(const SymMatrix& sx, const SymMatrix& sy) {
  require(sx.dim() == sy.dim(), Errc::InvalidInput, "covariances must have equal dimension");
  return spectral_correlation(sym_eig(sx).values, sym_eig(sy).values);
}

double subspace_overlap(const Mat& ux, const Mat& uy) {
  require(ux.rows() == uy.rows() && ux.cols() == uy.cols() && ux.cols() >= 1, Errc::InvalidInput,
          "subspace bases must have equal shape");
  return (ux.transpose() * uy).squaredNorm() / static_cast<double>(ux.cols());
}

double subspace_overlap(const SymMatrix& sx, const SymMatrix& sy, Index q) {
  require(sx.dim() == sy.dim(), Errc::InvalidInput, "covariances must have equal dimension");
  require(q >= 1 && q <= sx.dim(), Errc::InvalidInput,
          "q=" + std::to_string(q) + " outside [1, " + std::to_string(sx.dim()) + "]");
  return subspace_overlap(sym_eig(sx).top(q), sym_eig(sy).top(q));
}

OverlapBaseline random_overlap_baseline(const Mat& fixed_basis, int draws, Rng& rng) {
  require(draws >= 2, Errc::InvalidInput, "need at least 2 draws");
  const Index d = fixed_basis.rows();
  const Index q = fixed_basis.cols();
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double o = subspace_overlap(fixed_basis, haar_subspace(d, q, rng));
    sum += o;
    sum_sq += o * o;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

MeanResidual mean_residual_decomposition(const PairedSet& pairs) {
  const Index n = pairs.n();
  require(n >= 2, Errc::InsufficientSamples, "decomposition needs at least 2 pairs");
  const Mat& x = pairs.x().data();
  const Mat& y = pairs.y().data();
  const Vec mu_x = pairs.x().mean();
  const Vec mu_y = pairs.y().mean();
  const Vec gap = mu_x - mu_y;

  MeanResidual out;
  out.g_mu = gap.norm();
  const SymMatrix sx = covariance(x, true);
  const SymMatrix sy = covariance(y, true);
  out.g_sigma = (sx.matrix() - sy.matrix()).norm() / (sx.matrix().norm() + 1e-12);

  double sum_d = 0.0, sum_dt = 0.0, sum_d2 = 0.0, sum_r2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vec diff = (x.row(i) - y.row(i)).transpose();
    const Vec r = diff - gap;
    const double d2 = diff.squaredNorm();
    const double r2 = r.squaredNorm();
    sum_d += std::sqrt(d2);
    sum_dt += std::sqrt(r2);
    sum_d2 += d2;
    sum_r2 += r2;
  }
  const double nn = static_cast<double>(n);
  out.d_mean = sum_d / nn;
  out.d_tilde = sum_dt / nn;
  out.mean_sq_distance = sum_d2 / nn;
  out.mean_sq_residual = sum_r2 / nn;
  if (out.d_mean > 0.0) {
    out.ratio_dist = out.d_tilde / out.d_mean;
    out.ratio_energy = out.mean_sq_residual / out.mean_sq_distance;
  } else {
    out.ratio_undefined = true;
  }
  const double defect = out.mean_sq_distance - gap.squaredNorm() - out.mean_sq_residual;
  out.identity_rel_error =
      out.mean_sq_distance > 0.0 ? std::abs(defect) / out.mean_sq_distance : std::abs(defect);
  return out;
}

SymMatrix residual_covariance(const PairedSet& pairs) {
  require(pairs.n() >= 2, Errc::InsufficientSamples, "residual covariance needs at least 2 pairs");
  Mat r = pairs.x().data() - pairs.y().data();
  r.rowwise() -= r.colwise().mean();
  return covariance(r, false);
}

SymMatrix residual_covariance_four_term(const PairedSet& pairs) {
  const SymMatrix sx = covariance(pairs.x(), true);
  const SymMatrix sy = covariance(pairs.y(), true);
  const Mat sxy = cross_covariance(pairs);
  return SymMatrix(sx.matrix() + sy.matrix() - sxy - sxy.transpose());
}

ResidualSpectrum residual_spectrum(const Vec& eigenvalues) {
  const Index d = eigenvalues.size();
  const double trace = eigenvalues.sum();
  require(trace > 0.0, Errc::DegenerateResidual, "residual covariance has zero trace");
  require(eigenvalues.minCoeff() >= -1e-9 * trace, Errc::InvalidInput,
          "residual covariance is not PSD");
  const Vec lam = eigenvalues.cwiseMax(0.0);
  const double total = lam.sum();
  ResidualSpectrum out;
  out.a_r = lam(0) / (total / static_cast<double>(d));
  out.d_eff = total * total / lam.squaredNorm();
  out.normalized = lam / total;
  out.energy.resize(d);
  double acc = 0.0;
  for (Index k = 0; k < d; ++k) {
    acc += lam(k);
    out.energy(k) = acc / total;
  }
  out.energy(d - 1) = 1.0;
  return out;
}

ResidualSpectrum residual_spectrum(const SymMatrix& sr) { return residual_spectrum(sym_eig(sr).values); }

double anisotropy_ratio(const SymMatrix& sr) { return residual_spectrum(sr).a_r; }
Vec cumulative_energy(const SymMatrix& sr) { return residual_spectrum(sr).energy; }
double effective_dimension(const SymMatrix& sr) { return residual_spectrum(sr).d_eff; }

double coverage_ratio(const Mat& q_u, const SymMatrix& sr) {
  require(q_u.rows() == sr.dim(), Errc::InvalidFrame, "frame dimension mismatch");
  require(gram_deviation(q_u) <= 1e-6, Errc::InvalidFrame, "frame basis is not orthonormal");
  const double trace = sr.trace();
  require(trace > 0.0, Errc::DegenerateResidual, "residual covariance has zero trace");
  const double captured = (q_u.transpose() * sr.matrix() * q_u).trace();
  return std::clamp(captured / trace, 0.0, 1.0);
}

GapReport diagnose(const PairedSet& pairs, const DiagnoseOptions& opts) {
  GapReport rep;
  rep.n = pairs.n();
  rep.d = pairs.d();
  const Index d = rep.d;
  const SymMatrix sx = covariance(pairs.x(), true);
  const SymMatrix sy = covariance(pairs.y(), true);
  const EigenDecomp ex = sym_eig(sx);
  const EigenDecomp ey = sym_eig(sy);

  try {
    rep.c_lambda = spectral_correlation(ex.values, ey.values);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateSpectrum) throw;
  }

  std::vector<Index> qs = opts.q_values;
  if (qs.empty()) {
    for (Index q = 1; q < d; q *= 2) qs.push_back(q);
    qs.push_back(d);
  }
  for (Index q : qs) {
    require(q >= 1 && q <= d, Errc::InvalidInput, "overlap q out of range");
    rep.overlap_curve.push_back(
        {q, subspace_overlap(ex.top(q), ey.top(q)), static_cast<double>(q) / static_cast<double>(d)});
  }

  rep.mean_residual = mean_residual_decomposition(pairs);
  const SymMatrix sr = residual_covariance(pairs);
  const SymMatrix sr4 = residual_covariance_four_term(pairs);
  const double sr_norm = sr.matrix().norm();
  rep.four_term_rel_error =
      sr_norm > 0.0 ? (sr.matrix() - sr4.matrix()).norm() / sr_norm : (sr4.matrix()).norm();

  const double tx = ex.values.sum(), ty = ey.values.sum();
  rep.spectrum_x = tx > 0.0 ? Vec(ex.values / tx) : Vec(ex.values);
  rep.spectrum_y = ty > 0.0 ? Vec(ey.values / ty) : Vec(ey.values);

  try {
    const ResidualSpectrum rs = residual_spectrum(sr);
    rep.a_r = rs.a_r;
    rep.d_eff_frac = rs.d_eff / static_cast<double>(d);
    rep.residual_spectrum = rs.normalized;
    for (Index k = 1; k <= d; ++k)
      rep.energy_curve.push_back({k, rs.energy(k - 1), static_cast<double>(k) / static_cast<double>(d)});
    if (opts.frame_basis) rep.eta_u = coverage_ratio(*opts.frame_basis, sr);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateResidual) throw;
    rep.residual_degenerate = true;
    rep.a_r = 1.0;
    rep.d_eff_frac = 1.0;
    rep.residual_spectrum = Vec::Zero(d);
  }
  return rep;
}

nlohmann::json GapReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["d"] = d;
  j["c_lambda"] = c_lambda ? nlohmann::json(*c_lambda) : nlohmann::json(nullptr);
  auto curve = [](const std::vector<CurvePoint>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({p.k, p.value, p.baseline});
    return arr;
  };
  j["overlap_curve"] = curve(overlap_curve);
  j["g_mu"] = mean_residual.g_mu;
  j["g_sigma"] = mean_residual.g_sigma;
  j["d_mean"] = mean_residual.d_mean;
  j["d_tilde"] = mean_residual.d_tilde;
  j["residual_ratio_dist"] = mean_residual.ratio_dist;
  j["residual_ratio_energy"] = mean_residual.ratio_energy;
  j["residual_ratio_undefined"] = mean_residual.ratio_undefined;
  j["decomposition_identity_rel_error"] = mean_residual.identity_rel_error;
  j["four_term_identity_rel_error"] = four_term_rel_error;
  j["a_r"] = a_r;
  j["residual_degenerate"] = residual_degenerate;
  j["energy_curve"] = curve(energy_curve);
  j["d_eff_frac"] = d_eff_frac;
  j["eta_u"] = eta_u ? nlohmann::json(*eta_u) : nlohmann::json(nullptr);
  j["residual_spectrum"] = std::vector<double>(residual_spectrum.data(),
                                               residual_spectrum.data() + residual_spectrum.size());
  return j;
}

std::string GapReport::overlap_csv() const {
  std::ostringstream os;
  os << "q,O_q,baseline\n";
  for (const auto& p : overlap_curve) os << p.k << ',' << fmt(p.value) << ',' << fmt(p.baseline) << '\n';
  return os.str();
}

std::string GapReport::energy_csv() const {
  std::ostringstream os;
  os << "K,E_K,baseline\n";
  for (const auto& p : energy_curve) os << p.k << ',' << fmt(p.value) << ',' << fmt(p.baseline) << '\n';
  return os.str();
}

std::string GapReport::spectra_csv() const {
  std::ostringstream os;
  os << "j,lambda_x,lambda_y,lambda_r\n";
  for (Index j = 0; j < d; ++j) {
    os << (j + 1) << ',' << fmt(spectrum_x(j)) << ',' << fmt(spectrum_y(j)) << ','
       << fmt(residual_spectrum.size() > j ? residual_spectrum(j) : 0.0) << '\n';
  }
  return os.str();
}

}  // namespace aniso

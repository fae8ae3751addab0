#include "aniso/synthetic.hpp"

#include "aniso/diagnostics.hpp"
#include "aniso/error.hpp"
#include "aniso/numerics.hpp"

#include <algorithm>

namespace aniso {

namespace {

constexpr std::uint64_t kBasisStream = 0xB0;
constexpr std::uint64_t kCorpusStream = 0;
constexpr std::uint64_t kMonteCarloStream = 1;

Index rest_begin(const PlantSpec& s) { return s.shared_dim + s.residual_dims + s.image_only_dims; }

}  // namespace

void PlantSpec::validate() const {
  require(n >= 2 && d >= 2, Errc::InvalidInput, "plant: need n >= 2 and d >= 2");
  require(shared_dim >= 0 && residual_dims >= 0 && image_only_dims >= 0, Errc::InvalidInput,
          "plant: dimensions must be non-negative");
  require(rest_begin(*this) + 2 <= d, Errc::InvalidInput,
          "plant: shared + residual + image-only dims must leave two columns for the means");
  require(shared_energy >= 0.0 && iso_noise >= 0.0 && image_only_energy >= 0.0 && mean_norm >= 0.0,
          Errc::InvalidInput, "plant: energies and scales must be non-negative");
  require(centroid_offset >= 0.0 && centroid_offset <= 2.0 * mean_norm, Errc::InvalidInput,
          "plant: centroid offset must lie in [0, 2 * mean_norm]");
  if (!target_anisotropy) {
    require(static_cast<Index>(residual_energies.size()) == residual_dims, Errc::InvalidInput,
            "plant: need one energy per residual direction");
    for (std::size_t j = 0; j < residual_energies.size(); ++j) {
      require(residual_energies[j] >= 0.0, Errc::InvalidInput, "plant: residual energies must be >= 0");
      if (j > 0)
        require(residual_energies[j] <= residual_energies[j - 1], Errc::InvalidInput,
                "plant: residual energies must be descending");
    }
  } else {
    require(residual_dims >= 1 && *target_anisotropy >= 1.0, Errc::InvalidInput,
            "plant: target anisotropy needs K >= 1 and A_r >= 1");
    require(*target_anisotropy * static_cast<double>(residual_dims) < static_cast<double>(d), Errc::InvalidInput,
            "plant: target A_r * K must stay below d");
  }
}

nlohmann::ordered_json PlantSpec::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["d"] = d;
  j["shared_dim"] = shared_dim;
  j["shared_energy"] = shared_energy;
  j["spectrum_decay"] = spectrum_decay;
  j["mean_norm"] = mean_norm;
  j["centroid_offset"] = centroid_offset;
  j["residual_dims"] = residual_dims;
  j["target_anisotropy"] = target_anisotropy ? nlohmann::ordered_json(*target_anisotropy) : nullptr;
  j["residual_energies"] = residual_energies;
  j["iso_noise"] = iso_noise;
  j["image_only_dims"] = image_only_dims;
  j["image_only_energy"] = image_only_energy;
  j["seed"] = seed;
  return j;
}

PlantSpec PlantSpec::from_json(const nlohmann::json& j) {
  PlantSpec s;
  static const std::vector<std::string> known{"n", "d", "shared_dim", "shared_energy", "spectrum_decay",
                                              "mean_norm", "centroid_offset", "residual_dims",
                                              "target_anisotropy", "residual_energies", "iso_noise",
                                              "image_only_dims", "image_only_energy", "seed"};
  require(j.is_object(), Errc::InvalidConfig, "plant spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    require(std::find(known.begin(), known.end(), key) != known.end(), Errc::InvalidConfig,
            "unknown plant key '" + key + "'");
  try {
    s.n = j.value("n", s.n);
    s.d = j.value("d", s.d);
    s.shared_dim = j.value("shared_dim", s.shared_dim);
    s.shared_energy = j.value("shared_energy", s.shared_energy);
    s.spectrum_decay = j.value("spectrum_decay", s.spectrum_decay);
    s.mean_norm = j.value("mean_norm", s.mean_norm);
    s.centroid_offset = j.value("centroid_offset", s.centroid_offset);
    s.residual_dims = j.value("residual_dims", s.residual_dims);
    if (j.contains("target_anisotropy")) {
      if (j["target_anisotropy"].is_null())
        s.target_anisotropy.reset();
      else
        s.target_anisotropy = j["target_anisotropy"].get<double>();
    }
    s.residual_energies = j.value("residual_energies", s.residual_energies);
    s.iso_noise = j.value("iso_noise", s.iso_noise);
    s.image_only_dims = j.value("image_only_dims", s.image_only_dims);
    s.image_only_energy = j.value("image_only_energy", s.image_only_energy);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, std::string("plant spec: ") + e.what());
  }
  return s;
}

Mat GroundTruth::planted_u() const {
  Mat u(shared_basis.rows(), shared_basis.cols() + residual_basis.cols());
  u << shared_basis, residual_basis;
  return u;
}

nlohmann::ordered_json GroundTruth::to_json() const {
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::ordered_json j;
  j["raw"] = {{"a_r", a_r}, {"d_eff_frac", d_eff_frac}, {"energy_k", energy_k}, {"eta_u", eta_u}, {"g_mu", g_mu}};
  if (sphere) {
    j["sphere"] = {{"a_r", sphere->a_r},       {"d_eff_frac", sphere->d_eff_frac}, {"energy_k", sphere->energy_k},
                   {"eta_u", sphere->eta_u},   {"g_mu", sphere->g_mu},             {"samples", sphere->samples}};
  } else {
    j["sphere"] = nullptr;
  }
  j["residual_energies"] = vec(residual_energies);
  j["shared_spectrum"] = vec(shared_spectrum);
  j["planted_u_dim"] = shared_basis.cols() + residual_basis.cols();
  j["mu_x"] = vec(mu_x);
  j["mu_y"] = vec(mu_y);
  return j;
}

GroundTruth plant(const PlantSpec& spec) {
  spec.validate();
  const Index d = spec.d;
  const double s2 = spec.iso_noise * spec.iso_noise;
  GroundTruth t;

  Rng basis_rng = make_rng(spec.seed, kBasisStream);
  const Mat b = haar_subspace(d, d, basis_rng);
  t.shared_basis = b.leftCols(spec.shared_dim);
  t.residual_basis = b.middleCols(spec.shared_dim, spec.residual_dims);
  t.image_only_basis = b.middleCols(spec.shared_dim + spec.residual_dims, spec.image_only_dims);
  const Vec axis_a = b.col(rest_begin(spec));
  const Vec axis_b = b.col(rest_begin(spec) + 1);

  t.shared_spectrum.resize(spec.shared_dim);
  for (Index j = 0; j < spec.shared_dim; ++j) t.shared_spectrum[j] = std::pow(static_cast<double>(j + 1), -spec.spectrum_decay);
  if (spec.shared_dim > 0) t.shared_spectrum *= spec.shared_energy / t.shared_spectrum.sum();

  const double k = static_cast<double>(spec.residual_dims);
  const double img_total = static_cast<double>(spec.image_only_dims) * spec.image_only_energy;
  if (spec.target_anisotropy) {
    // (e + 2 s2) = A (2 s2 + (K e + img_total) / d), solved for e.
    const double a = *spec.target_anisotropy;
    const double dd = static_cast<double>(d);
    const double e = (a * (2.0 * s2 + img_total / dd) - 2.0 * s2) / (1.0 - a * k / dd);
    require(e >= spec.image_only_energy, Errc::InvalidInput,
            "plant: target anisotropy too small for the image-only energy");
    t.residual_energies = Vec::Constant(spec.residual_dims, e);
  } else {
    t.residual_energies = Eigen::Map<const Vec>(spec.residual_energies.data(), spec.residual_dims);
  }

  const double beta = 2.0 * std::asin(spec.mean_norm > 0.0 ? spec.centroid_offset / (2.0 * spec.mean_norm) : 0.0);
  t.mu_x = spec.mean_norm * axis_a;
  t.mu_y = spec.mean_norm * (std::cos(beta) * axis_a + std::sin(beta) * axis_b);

  const Mat shared = t.shared_basis * t.shared_spectrum.asDiagonal() * t.shared_basis.transpose();
  const Mat resid = t.residual_basis * t.residual_energies.asDiagonal() * t.residual_basis.transpose();
  const Mat img = spec.image_only_energy * t.image_only_basis * t.image_only_basis.transpose();
  const Mat iso = s2 * Mat::Identity(d, d);
  t.sigma_x = shared + img + iso;
  t.sigma_y = shared + resid + iso;
  t.sigma_r = resid + img + 2.0 * iso;

  Vec eig = Vec::Constant(d, 2.0 * s2);
  eig.head(spec.residual_dims) += t.residual_energies;
  eig.segment(spec.residual_dims, spec.image_only_dims).array() += spec.image_only_energy;
  std::sort(eig.data(), eig.data() + d, std::greater<>());
  if (eig.sum() > 0.0) {
    const ResidualSpectrum rs = residual_spectrum(eig);
    t.a_r = rs.a_r;
    t.d_eff_frac = rs.d_eff / static_cast<double>(d);
    t.energy_k = spec.residual_dims > 0 ? rs.energy[spec.residual_dims - 1] : 0.0;
    const double covered = t.residual_energies.sum() + 2.0 * s2 * static_cast<double>(spec.shared_dim + spec.residual_dims);
    t.eta_u = covered / eig.sum();
  }
  t.g_mu = (t.mu_x - t.mu_y).norm();
  return t;
}

std::pair<Mat, Mat> sample_rows(const PlantSpec& spec, const GroundTruth& truth, Index begin, Index count,
                                std::uint64_t stream) {
  const Index d = spec.d;
  const Index rs = spec.shared_dim, k = spec.residual_dims, w = spec.image_only_dims;
  const Index draws = rs + k + w + 2 * d;
  // Shared, residual and image-only loadings stacked so each row is one
  // vector-matrix product of fixed shape; rows never depend on the chunking.
  Mat load_x = Mat::Zero(rs + k + w, d), load_y = Mat::Zero(rs + k + w, d);
  if (rs > 0) {
    load_x.topRows(rs) = truth.shared_spectrum.cwiseSqrt().asDiagonal() * truth.shared_basis.transpose();
    load_y.topRows(rs) = load_x.topRows(rs);
  }
  if (k > 0) load_y.middleRows(rs, k) = truth.residual_energies.cwiseSqrt().asDiagonal() * truth.residual_basis.transpose();
  if (w > 0) load_x.bottomRows(w) = std::sqrt(spec.image_only_energy) * truth.image_only_basis.transpose();
  Mat x(count, d), y(count, d);
  const std::uint64_t stream_seed = mix_seed(spec.seed, stream);
  parallel_for(count, [&](Index lo, Index hi) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::RowVectorXd z(draws);
    Eigen::RowVectorXd row(d);
    for (Index i = lo; i < hi; ++i) {
      Rng rng = make_rng(stream_seed, static_cast<std::uint64_t>(begin + i));
      for (Index j = 0; j < draws; ++j) z[j] = normal(rng);
      row.noalias() = z.head(rs + k + w) * load_x;
      x.row(i) = truth.mu_x.transpose() + row + spec.iso_noise * z.segment(rs + k + w, d);
      row.noalias() = z.head(rs + k + w) * load_y;
      y.row(i) = truth.mu_y.transpose() + row + spec.iso_noise * z.segment(rs + k + w + d, d);
    }
  });
  return {std::move(x), std::move(y)};
}

namespace {

SphereTargets sphere_targets(const PlantSpec& spec, const GroundTruth& truth, Index samples) {
  const Index d = spec.d;
  const Index chunk = 8192;
  Vec sum_x = Vec::Zero(d), sum_y = Vec::Zero(d), sum_r = Vec::Zero(d);
  Mat sum_rr = Mat::Zero(d, d);
  for (Index begin = 0; begin < samples; begin += chunk) {
    const Index count = std::min(chunk, samples - begin);
    auto [x, y] = sample_rows(spec, truth, begin, count, kMonteCarloStream);
    x = l2_normalize_rows(x);
    y = l2_normalize_rows(y);
    const Mat r = x - y;
    sum_x += x.colwise().sum().transpose();
    sum_y += y.colwise().sum().transpose();
    sum_r += r.colwise().sum().transpose();
    sum_rr.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose());
  }
  const double n = static_cast<double>(samples);
  Mat cov = sum_rr.selfadjointView<Eigen::Lower>();
  cov = cov / n - (sum_r / n) * (sum_r / n).transpose();
  const SymMatrix sr(cov);
  const ResidualSpectrum rs = residual_spectrum(sr);
  SphereTargets out;
  out.a_r = rs.a_r;
  out.d_eff_frac = rs.d_eff / static_cast<double>(d);
  out.energy_k = spec.residual_dims > 0 ? rs.energy[spec.residual_dims - 1] : 0.0;
  out.eta_u = coverage_ratio(truth.planted_u(), sr);
  out.g_mu = ((sum_x - sum_y) / n).norm();
  out.samples = samples;
  return out;
}

}  // namespace

std::pair<PairedSet, GroundTruth> generate(const PlantSpec& spec, Index mc_samples) {
  GroundTruth truth = plant(spec);
  auto [x, y] = sample_rows(spec, truth, 0, spec.n, kCorpusStream);
  PairedSet pairs(EmbeddingSet(l2_normalize_rows(x), "image", true), EmbeddingSet(l2_normalize_rows(y), "text", true));
  if (mc_samples > 1) truth.sphere = sphere_targets(spec, truth, mc_samples);
  return {std::move(pairs), std::move(truth)};
}

// ---- planted phases -----------------------------------------------------------

double PhasePlantSpec::potential(const Vec& phi) const {
  double u = 0.0;
  for (Index k = 0; k < m; ++k) u += kappa[k] * (1.0 - std::cos(phi[k] - anchors[k]));
  for (const Edge& e : couplings) u += e.coupling * (1.0 - std::cos(phi[e.k] - phi[e.l] - e.offset));
  return u;
}

Vec PhasePlantSpec::gradient(const Vec& phi) const {
  Vec g(m);
  for (Index k = 0; k < m; ++k) g[k] = kappa[k] * std::sin(phi[k] - anchors[k]);
  for (const Edge& e : couplings) {
    const double s = e.coupling * std::sin(phi[e.k] - phi[e.l] - e.offset);
    g[e.k] += s;
    g[e.l] -= s;
  }
  return g;
}

Mat PhaseCorpus::coeffs() const {
  Mat c(theta.rows(), 2 * theta.cols());
  for (Index k = 0; k < theta.cols(); ++k) {
    c.col(2 * k) = rho.col(k).cwiseProduct(Vec(theta.col(k).array().cos()));
    c.col(2 * k + 1) = rho.col(k).cwiseProduct(Vec(theta.col(k).array().sin()));
  }
  return c;
}

PhaseCorpus planted_phase_corpus(const PhasePlantSpec& spec) {
  require(spec.m >= 1 && spec.n >= 1, Errc::InvalidInput, "phase plant needs m >= 1 and n >= 1");
  require(spec.anchors.size() == spec.m && spec.kappa.size() == spec.m, Errc::InvalidInput,
          "phase plant needs m anchors and m strengths");
  require(spec.step > 0.0 && spec.thin >= 1 && spec.burn_in >= 0 && spec.radius > 0.0, Errc::InvalidInput,
          "phase plant: invalid sampler settings");
  for (const Edge& e : spec.couplings)
    require(e.k >= 0 && e.l < spec.m && e.k < e.l, Errc::InvalidInput, "phase plant: bad coupling edge");

  const Index chains = spec.chains > 0 ? spec.chains : std::max<Index>(1, (spec.n + 3) / 4);
  const Index per_chain = (spec.n + chains - 1) / chains;
  PhaseCorpus out{Mat(spec.n, spec.m), Mat::Constant(spec.n, spec.m, spec.radius)};
  const double noise = std::sqrt(2.0 * spec.step);
  parallel_for(chains, [&](Index lo, Index hi) {
    std::uniform_real_distribution<double> unif(-kPi, kPi);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec phi(spec.m);
    for (Index c = lo; c < hi; ++c) {
      Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(c));
      for (Index k = 0; k < spec.m; ++k) phi[k] = unif(rng);
      auto advance = [&]() {
        const Vec g = spec.gradient(phi);
        for (Index k = 0; k < spec.m; ++k) phi[k] = wrap(phi[k] - spec.step * g[k] + noise * normal(rng));
      };
      for (Index s = 0; s < spec.burn_in; ++s) advance();
      for (Index s = 0; s < per_chain; ++s) {
        for (Index t = 0; t < spec.thin; ++t) advance();
        const Index row = c * per_chain + s;
        if (row < spec.n) out.theta.row(row) = phi.transpose();
      }
    }
  }, 1);
  return out;
}

}  // namespace aniso

#include "aniso/evalsuite.hpp"

#include "aniso/diagnostics.hpp"
#include "aniso/error.hpp"
#include "aniso/numerics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace aniso {

namespace {

constexpr Index kQueryBlock = 128;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::PairMismatch,
          std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " differ");
}

}  // namespace

NeighborLists knn_self(const Mat& rows, Index k) {
  const Index n = rows.rows();
  require(k >= 1 && n > k, Errc::InvalidInput,
          "kNN needs more than k=" + std::to_string(k) + " rows, got " + std::to_string(n));
  const Mat unit = l2_normalize_rows(rows);
  NeighborLists out(static_cast<std::size_t>(n));
  // Fixed query blocks keep every similarity bitwise independent of the thread count.
  const Index blocks = (n + kQueryBlock - 1) / kQueryBlock;
  parallel_for(blocks, [&](Index lo, Index hi) {
    std::vector<Index> cand(static_cast<std::size_t>(n));
    for (Index blk = lo; blk < hi; ++blk) {
      const Index begin = blk * kQueryBlock;
      const Index count = std::min(kQueryBlock, n - begin);
      const Mat sim = unit.middleRows(begin, count) * unit.transpose();
      for (Index q = 0; q < count; ++q) {
        const Index self = begin + q;
        std::iota(cand.begin(), cand.end(), Index{0});
        std::swap(cand[static_cast<std::size_t>(self)], cand.back());
        const auto nearer = [&](Index a, Index b) {
          const double sa = sim(q, a), sb = sim(q, b);
          return sa > sb || (sa == sb && a < b);
        };
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end() - 1, nearer);
        out[static_cast<std::size_t>(self)].assign(cand.begin(), cand.begin() + k);
      }
    }
  }, 1);
  return out;
}

double instance_consistency(const Mat& y, const Mat& z) {
  require_same_shape(y, z, "instance consistency");
  require(y.rows() >= 1, Errc::InsufficientSamples, "instance consistency needs rows");
  return y.cwiseProduct(z).sum() / static_cast<double>(y.rows());
}

RelativeGeometry relative_geometry(const Mat& y, const Mat& z, Index pair_count, std::uint64_t seed,
                                   Index all_pairs_max_n) {
  require_same_shape(y, z, "relative geometry");
  const Index n = y.rows();
  require(n >= 2 && pair_count >= 2, Errc::InvalidInput, "relative geometry needs n >= 2 and pair_count >= 2");
  std::vector<std::pair<Index, Index>> pairs;
  if (n <= all_pairs_max_n) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    Rng rng = make_rng(seed, 0x51);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    pairs.reserve(static_cast<std::size_t>(pair_count));
    while (static_cast<Index>(pairs.size()) < pair_count) {
      const Index i = pick(rng), j = pick(rng);
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  const std::size_t p = pairs.size();
  Vec a(static_cast<Index>(p)), b(static_cast<Index>(p));
  for (std::size_t s = 0; s < p; ++s) {
    a[static_cast<Index>(s)] = y.row(pairs[s].first).dot(y.row(pairs[s].second));
    b[static_cast<Index>(s)] = z.row(pairs[s].first).dot(z.row(pairs[s].second));
  }
  const Vec ac = a.array() - a.mean();
  const Vec bc = b.array() - b.mean();
  const double va = ac.squaredNorm(), vb = bc.squaredNorm();
  require(va > 0.0 && vb > 0.0, Errc::DegenerateSpectrum, "relative geometry: zero variance in inner products");
  return {ac.dot(bc) / std::sqrt(va * vb), static_cast<Index>(p)};
}

double neighborhood_consistency(const Mat& y, const Mat& z, Index k) {
  require_same_shape(y, z, "neighborhood consistency");
  const NeighborLists ny = knn_self(y, k);
  const NeighborLists nz = knn_self(z, k);
  double total = 0.0;
  std::vector<Index> a, b, common;
  for (std::size_t i = 0; i < ny.size(); ++i) {
    a = ny[i];
    b = nz[i];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    common.clear();
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(k);
  }
  return total / static_cast<double>(ny.size());
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

MixingScores mixing_scores(const Mat& z, const Mat& x, Index k, Index permutations, std::uint64_t seed) {
  require(z.rows() >= 1 && x.rows() >= 1, Errc::InvalidInput, "mixing scores need both sets non-empty");
  require(z.cols() == x.cols(), Errc::InvalidInput, "mixing scores: dimension mismatch");
  require(permutations >= 1, Errc::InvalidInput, "mixing scores need at least one permutation");
  const Index nx = x.rows();
  const Index total = nx + z.rows();
  require(k >= 1 && k < total - 1, Errc::InvalidInput, "mixing scores need 1 <= k < |Z| + |X| - 1");
  Mat pool(total, x.cols());
  pool.topRows(nx) = x;
  pool.bottomRows(z.rows()) = z;
  const NeighborLists nn = knn_self(pool, k);

  // Mean entropy over each side for a labeling (true: X origin).
  const auto side_means = [&](const std::vector<char>& is_x) {
    double hx = 0.0, hz = 0.0;
    Index cx = 0, cz = 0;
    for (Index u = 0; u < total; ++u) {
      Index hits = 0;
      for (Index v : nn[static_cast<std::size_t>(u)]) hits += is_x[static_cast<std::size_t>(v)];
      const double h = binary_entropy(static_cast<double>(hits) / static_cast<double>(k));
      if (is_x[static_cast<std::size_t>(u)]) {
        hx += h;
        ++cx;
      } else {
        hz += h;
        ++cz;
      }
    }
    return std::pair<double, double>{hz / static_cast<double>(cz), hx / static_cast<double>(cx)};
  };

  std::vector<char> labels(static_cast<std::size_t>(total), 0);
  std::fill(labels.begin(), labels.begin() + nx, 1);
  MixingScores s;
  std::tie(s.raw_z, s.raw_x) = side_means(labels);
  std::vector<char> shuffled = labels;
  for (Index p = 0; p < permutations; ++p) {
    Rng rng = make_rng(seed, 0x3100 + static_cast<std::uint64_t>(p));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto [bz, bx] = side_means(shuffled);
    s.baseline_z += bz;
    s.baseline_x += bx;
  }
  s.baseline_z /= static_cast<double>(permutations);
  s.baseline_x /= static_cast<double>(permutations);
  s.m_z = s.baseline_z > 0.0 ? s.raw_z / s.baseline_z : 0.0;
  s.m_x = s.baseline_x > 0.0 ? s.raw_x / s.baseline_x : 0.0;
  return s;
}

MethodResidual method_residual(const Mat& x, const Mat& z) {
  require_same_shape(x, z, "method residual");
  const Mat r = x - z;
  MethodResidual out;
  try {
    const ResidualSpectrum spec = residual_spectrum(covariance(r, true));
    out.a_r = spec.a_r;
    out.spectrum = spec.normalized;
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateResidual) throw;
    out.degenerate = true;
    out.a_r = 1.0;
    out.spectrum = Vec::Zero(x.cols());
  }
  return out;
}

double centroid_gap(const Mat& z, const Mat& x) {
  require(z.cols() == x.cols() && z.rows() >= 1 && x.rows() >= 1, Errc::InvalidInput,
          "centroid gap needs non-empty sets of equal dimension");
  return (z.colwise().mean() - x.colwise().mean()).norm();
}

double mean_cross_cosine(const Mat& y, const Mat& x) {
  require(y.cols() == x.cols() && y.rows() >= 1 && x.rows() >= 1, Errc::InvalidInput,
          "mean cross cosine needs non-empty sets of equal dimension");
  return y.colwise().mean().dot(x.colwise().mean());
}

MetricReport evaluate(const std::string& method, const Mat& y_in, const Mat& z_in, const Mat& x_in,
                      const EvalOptions& opts) {
  require_same_shape(y_in, z_in, "evaluate (Y, Z)");
  require_same_shape(y_in, x_in, "evaluate (Y, X)");
  const Mat y = l2_normalize_rows(y_in);
  const Mat z = l2_normalize_rows(z_in);
  const Mat x = l2_normalize_rows(x_in);
  MetricReport r;
  r.method = method;
  r.n = y.rows();
  r.k = opts.k;
  r.phi = instance_consistency(y, z);
  const RelativeGeometry rg = relative_geometry(y, z, opts.pair_count, opts.seed, opts.all_pairs_max_n);
  r.psi = rg.psi;
  r.pair_sample_size = rg.pairs;
  r.omega_k = neighborhood_consistency(y, z, opts.k);
  const MixingScores mix = mixing_scores(z, x, opts.k, opts.permutations, opts.seed);
  r.m_z = mix.m_z;
  r.m_x = mix.m_x;
  const MethodResidual res = method_residual(x, z);
  r.a_r_t = res.a_r;
  r.residual_degenerate = res.degenerate;
  r.residual_spectrum_t = res.spectrum;
  r.centroid_gap = centroid_gap(z, x);
  return r;
}

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["n"] = n;
  j["k"] = k;
  j["phi"] = phi;
  j["psi"] = psi;
  j["pair_sample_size"] = pair_sample_size;
  j["omega_k"] = omega_k;
  j["m_z"] = m_z;
  j["m_x"] = m_x;
  j["a_r_t"] = a_r_t;
  j["residual_degenerate"] = residual_degenerate;
  j["centroid_gap"] = centroid_gap;
  j["residual_spectrum_t"] =
      std::vector<double>(residual_spectrum_t.data(), residual_spectrum_t.data() + residual_spectrum_t.size());
  return j;
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
  MetricReport r;
  try {
    r.method = j.at("method").get<std::string>();
    r.n = j.at("n").get<Index>();
    r.k = j.at("k").get<Index>();
    r.phi = j.at("phi").get<double>();
    r.psi = j.at("psi").get<double>();
    r.pair_sample_size = j.at("pair_sample_size").get<Index>();
    r.omega_k = j.at("omega_k").get<double>();
    r.m_z = j.at("m_z").get<double>();
    r.m_x = j.at("m_x").get<double>();
    r.a_r_t = j.at("a_r_t").get<double>();
    r.residual_degenerate = j.at("residual_degenerate").get<bool>();
    r.centroid_gap = j.at("centroid_gap").get<double>();
    const auto spec = j.at("residual_spectrum_t").get<std::vector<double>>();
    r.residual_spectrum_t = Eigen::Map<const Vec>(spec.data(), static_cast<Index>(spec.size()));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::FormatError, std::string("metric report: ") + e.what());
  }
  return r;
}

std::string MetricReport::csv_header() {
  return "method,n,k,phi,psi,omega_k,m_z,m_x,a_r_t,centroid_gap,pair_sample_size,residual_degenerate";
}

std::string MetricReport::csv_row() const {
  return method + "," + std::to_string(n) + "," + std::to_string(k) + "," + fmt(phi) + "," + fmt(psi) + "," +
         fmt(omega_k) + "," + fmt(m_z) + "," + fmt(m_x) + "," + fmt(a_r_t) + "," + fmt(centroid_gap) + "," +
         std::to_string(pair_sample_size) + "," + (residual_degenerate ? "1" : "0");
}

std::string MetricReport::spectrum_csv() const {
  std::string out = "index,normalized_eigenvalue\n";
  for (Index j = 0; j < residual_spectrum_t.size(); ++j)
    out += std::to_string(j + 1) + "," + fmt(residual_spectrum_t[j]) + "\n";
  return out;
}

}  // namespace aniso

#include "aniso/cli.hpp"

#include "aniso/aligner.hpp"
#include "aniso/diagnostics.hpp"
#include "aniso/evalsuite.hpp"
#include "aniso/frame.hpp"
#include "aniso/phase_prior.hpp"
#include "aniso/store.hpp"
#include "aniso/synthetic.hpp"
#include "aniso/transforms.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace aniso::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Seed streams derived from the top-level seed, one per consumer.
enum SeedStream : std::uint64_t {
  kSplitStream = 1,
  kUnpairStream = 2,
  kPriorStream = 3,
  kAlignStream = 4,
  kPermStream = 5,
  kC3Stream = 6,
  kEvalStream = 7,
  kCertifyStream = 8,
};

const std::vector<std::string> kBaselines{"id", "mu", "sigma", "perm", "alpha", "c3", "realign"};

std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string type_name(const nlohmann::json& v) {
  if (v.is_number_unsigned() || v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

// Overlays `patch` onto `base`, rejecting keys absent from base and values
// whose type differs from the default's. A null default accepts a string.
void overlay(ojson& base, const nlohmann::json& patch, const std::string& where) {
  require(patch.is_object(), Errc::InvalidConfig, where + " must be a JSON object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    require(base.contains(key), Errc::InvalidConfig, "unknown config key '" + path + "'");
    ojson& slot = base[key];
    if (slot.is_object()) {
      overlay(slot, value, path);
      continue;
    }
    bool ok = false;
    if (slot.is_null()) ok = value.is_null() || value.is_string();
    else if (slot.is_number_integer() || slot.is_number_unsigned())
      ok = value.is_number_integer() || value.is_number_unsigned();
    else if (slot.is_number()) ok = value.is_number();
    else if (slot.is_array()) ok = value.is_array();
    else ok = std::string(slot.type_name()) == value.type_name();
    require(ok, Errc::InvalidConfig,
            "config key '" + path + "' expects " + type_name(slot) + ", got " + type_name(value));
    if ((slot.is_number_unsigned()) && value.is_number_integer() && value.get<std::int64_t>() < 0)
      fail(Errc::InvalidConfig, "config key '" + path + "' must be non-negative");
    slot = value;
  }
}

template <typename T>
T get(const ojson& section, const std::string& key, const std::string& where) {
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, "config key '" + where + "." + key + "': " + e.what());
  }
}

// ---- run context --------------------------------------------------------------

struct FileRecord {
  std::string path;
  std::string sha256;
};

class Run {
 public:
  Run(const std::string& command, const RunConfig& cfg) : command_(command), cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    require(!ec && fs::is_directory(cfg.out), Errc::IoError,
            "cannot create output directory " + cfg.out.string() + (ec ? ": " + ec.message() : ""));
  }

  const RunConfig& cfg() const { return cfg_; }
  fs::path out(const std::string& name) const { return cfg_.out / name; }
  std::uint64_t seed(SeedStream s) const { return mix_seed(cfg_.seed(), s); }

  void input(const fs::path& path) { inputs_.push_back({display(path), sha256_file(path)}); }
  void output(const fs::path& path) { outputs_.push_back({path.filename().string(), sha256_file(path)}); }
  void output_text(const std::string& name, const std::string& text) {
    write_text(out(name), text);
    output(out(name));
  }
  void output_embd(const std::string& name, const Mat& rows, const std::string& modality) {
    save(EmbeddingSet(rows, modality), out(name));
    output(out(name));
  }

  /// Paired corpus from data.x / data.y, or from the gen outputs in the run directory.
  PairedSet load_pairs() {
    const auto& data = cfg_.section("data");
    const auto locate = [&](const char* key, const char* fallback) {
      if (!data.at(key).is_null()) return fs::path(data.at(key).get<std::string>());
      const fs::path p = out(fallback);
      require(fs::exists(p), Errc::DependencyMissing,
              "gen: " + p.string() + " not found; run gen first or set data." + key);
      return p;
    };
    const fs::path xp = locate("x", "x.embd");
    const fs::path yp = locate("y", "y.embd");
    PairedSet pairs(l2_normalize(load(xp, "image")), l2_normalize(load(yp, "text")));
    input(xp);
    input(yp);
    return pairs;
  }

  SplitResult split_pairs(const PairedSet& pairs) const {
    const double frac = get<double>(cfg_.section("split"), "estimation_fraction", "split");
    return split(pairs, SplitSpec{frac, seed(kSplitStream)});
  }

  void require_artifact(const std::string& stem, const std::string& stage) {
    for (const char* ext : {".json", ".bin"}) {
      const fs::path p = out(stem + ext);
      require(fs::exists(p), Errc::DependencyMissing, stage + ": " + p.string() + " not found; run " + stage + " first");
      input(p);
    }
  }

  void write_manifest() {
    ojson m;
    m["command"] = command_;
    m["config"] = cfg_.values;
    auto records = [](const std::vector<FileRecord>& files) {
      ojson arr = ojson::array();
      for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
      return arr;
    };
    m["inputs"] = records(inputs_);
    m["outputs"] = records(outputs_);
    write_text(out(command_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  // Files inside the run directory are recorded by name so reruns elsewhere match.
  std::string display(const fs::path& path) const {
    std::error_code ec;
    const fs::path rel = fs::relative(path, cfg_.out, ec);
    if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0) return rel.generic_string();
    return path.generic_string();
  }

  std::string command_;
  const RunConfig& cfg_;
  std::vector<FileRecord> inputs_;
  std::vector<FileRecord> outputs_;
};

FrameOptions frame_options(const RunConfig& cfg) {
  const auto& s = cfg.section("frame");
  FrameOptions o;
  o.r = get<Index>(s, "r", "frame");
  o.lambda_reg = get<double>(s, "lambda_reg", "frame");
  o.eps_polar = get<double>(s, "eps_polar", "frame");
  require(o.r >= 2 && o.r % 2 == 0, Errc::InvalidConfig, "frame.r must be an even integer >= 2");
  return o;
}

PriorConfig prior_config(const Run& run) {
  const auto& s = run.cfg().section("prior");
  PriorConfig c;
  c.schedule.sigma_min = get<double>(s, "sigma_min", "prior");
  c.schedule.sigma_max = get<double>(s, "sigma_max", "prior");
  c.schedule.tau = get<double>(s, "tau", "prior");
  c.p = get<Index>(s, "p", "prior");
  c.hidden = get<Index>(s, "hidden", "prior");
  c.steps = get<Index>(s, "steps", "prior");
  c.batch = get<Index>(s, "batch", "prior");
  c.lr = get<double>(s, "lr", "prior");
  c.mixing_lr_ratio = get<double>(s, "mixing_lr_ratio", "prior");
  try {
    c.mixing = mixing_mode_from_string(get<std::string>(s, "mixing", "prior"));
  } catch (const Error& e) {
    fail(Errc::InvalidConfig, std::string("prior.mixing: ") + e.what());
  }
  c.validation_size = get<Index>(s, "validation_size", "prior");
  c.eps_polar = frame_options(run.cfg()).eps_polar;
  c.seed = run.seed(kPriorStream);
  require(c.steps >= 0 && c.batch >= 1 && c.lr > 0.0 && c.validation_size >= 1 && c.hidden >= 0,
          Errc::InvalidConfig, "invalid prior optimizer settings");
  try {
    c.schedule.validate();
  } catch (const Error& e) {
    fail(Errc::InvalidConfig, std::string("prior schedule: ") + e.what());
  }
  return c;
}

AlignConfig align_config(const Run& run) {
  const auto& s = run.cfg().section("align");
  AlignConfig c;
  c.bounds = {get<double>(s, "alpha_theta", "align"), get<double>(s, "alpha_rho", "align"),
              get<double>(s, "alpha_v", "align")};
  c.beta = get<double>(s, "beta", "align");
  c.hidden = get<Index>(s, "hidden", "align");
  c.steps = get<Index>(s, "steps", "align");
  c.batch = get<Index>(s, "batch", "align");
  c.lr = get<double>(s, "lr", "align");
  c.validation_size = get<Index>(s, "validation_size", "align");
  c.seed = run.seed(kAlignStream);
  c.validate();
  return c;
}

// Method name to z file and back.
std::string z_file(const std::string& method) { return "z_" + method + ".embd"; }

struct AlphaSetting {
  std::string name;
  double alpha;
  Index rank;
};

std::vector<AlphaSetting> alpha_settings(const ojson& t) {
  const auto alphas = get<std::vector<double>>(t, "alpha_values", "transform");
  const auto ranks = get<std::vector<Index>>(t, "alpha_ranks", "transform");
  require(!alphas.empty() && !ranks.empty(), Errc::InvalidConfig, "transform.alpha_values and alpha_ranks must be non-empty");
  std::vector<AlphaSetting> out;
  for (double a : alphas)
    for (Index k : ranks) {
      const bool single = alphas.size() == 1 && ranks.size() == 1;
      out.push_back({single ? "alpha" : "alpha_a" + short_number(a) + "_k" + std::to_string(k), a, k});
    }
  return out;
}

std::vector<std::string> methods_with_files(const Run& run, const std::string& prefix, const std::string& suffix) {
  std::vector<std::string> found;
  for (const auto& entry : fs::directory_iterator(run.cfg().out)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > prefix.size() + suffix.size() && name.rfind(prefix, 0) == 0 &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      found.push_back(name.substr(prefix.size(), name.size() - prefix.size() - suffix.size()));
  }
  return canonical_order(found);
}

std::string producing_stage(const std::string& method) { return method == "anisoalign" ? "align" : "transform"; }

// ---- commands ----------------------------------------------------------------------

void cmd_gen(Run& run) {
  ojson spec_json = run.cfg().section("gen");
  const Index mc = spec_json.at("mc_samples").get<Index>();
  spec_json.erase("mc_samples");
  spec_json["seed"] = run.cfg().seed();
  PlantSpec spec = PlantSpec::from_json(spec_json);
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(Errc::InvalidConfig, std::string("gen: ") + e.what());
  }
  require(mc >= 0, Errc::InvalidConfig, "gen.mc_samples must be >= 0");
  const auto [pairs, truth] = generate(spec, mc);
  run.output_embd("x.embd", pairs.x().data(), "image");
  run.output_embd("y.embd", pairs.y().data(), "text");
  ojson t;
  t["spec"] = spec.to_json();
  t["truth"] = truth.to_json();
  run.output_text("truth.json", t.dump(2) + "\n");
}

void cmd_diagnose(Run& run) {
  const PairedSet pairs = run.load_pairs();
  DiagnoseOptions opts;
  opts.q_values = get<std::vector<Index>>(run.cfg().section("diagnose"), "q_values", "diagnose");
  const FrameOptions fo = frame_options(run.cfg());
  if (get<bool>(run.cfg().section("diagnose"), "eta_u", "diagnose") && fo.r < pairs.d())
    opts.frame_basis = fit_frame(pairs.x(), pairs.y(), fo).q_u;
  const GapReport report = diagnose(pairs, opts);
  run.output_text("gap_report.json", report.to_json().dump(2) + "\n");
  run.output_text("overlap.csv", report.overlap_csv());
  run.output_text("energy.csv", report.energy_csv());
  run.output_text("spectra.csv", report.spectra_csv());
}

void cmd_transform(Run& run) {
  const PairedSet pairs = run.load_pairs();
  const SplitResult parts = run.split_pairs(pairs);
  const ojson& t = run.cfg().section("transform");
  const MomentStats sx = MomentStats::of(parts.estimation.x());
  const MomentStats sy = MomentStats::of(parts.estimation.y());
  const Mat& y = parts.heldout.y().data();
  for (const std::string& name : get<std::vector<std::string>>(t, "methods", "transform")) {
    TransformKind kind;
    try {
      kind = transform_kind_from_string(name);
    } catch (const Error& e) {
      fail(Errc::InvalidConfig, std::string("transform.methods: ") + e.what());
    }
    const std::string label = to_string(kind);
    switch (kind) {
      case TransformKind::Identity: run.output_embd(z_file(label), t_id(y), "text"); break;
      case TransformKind::Centroid: run.output_embd(z_file(label), t_mu(y, sy.mean, sx.mean), "text"); break;
      case TransformKind::Moment: run.output_embd(z_file(label), t_sigma(y, sx, sy), "text"); break;
      case TransformKind::Perm:
        run.output_embd(z_file(label), t_perm(y, parts.heldout.x().data(), run.seed(kPermStream)), "text");
        break;
      case TransformKind::Alpha:
        for (const AlphaSetting& a : alpha_settings(t)) {
          TransformSpec ts{TransformKind::Alpha, a.alpha, a.rank, std::nullopt, std::nullopt};
          try {
            ts.validate(pairs.d());
          } catch (const Error& e) {
            fail(Errc::InvalidConfig, std::string("transform alpha: ") + e.what());
          }
          run.output_embd(z_file(a.name), t_alpha(parts.heldout, a.alpha, a.rank), "text");
        }
        break;
      case TransformKind::C3: {
        const double sigma = get<double>(t, "c3_sigma", "transform");
        require(sigma >= 0.0, Errc::InvalidConfig, "transform.c3_sigma must be >= 0");
        run.output_embd(z_file(label), c3_align(y, sy.mean, sx.mean, sigma, run.seed(kC3Stream)), "text");
        break;
      }
      case TransformKind::ReAlign:
        run.output_embd(z_file(label), realign(y, sy.mean, sx.mean, sx.trace(), sy.trace()), "text");
        break;
    }
  }
}

void cmd_train_prior(Run& run) {
  const PairedSet pairs = run.load_pairs();
  const SplitResult parts = run.split_pairs(pairs);
  const auto [x_est, y_est] = parts.unpaired_estimation(run.seed(kUnpairStream));
  const Frame base = fit_frame(x_est, y_est, frame_options(run.cfg()));
  const auto [prior, frame] = train_prior(x_est, base, prior_config(run));
  save_frame(frame, run.out("frame"));
  save_prior(prior, run.out("prior"));
  for (const char* f : {"frame.json", "frame.bin", "prior.json", "prior.bin"}) run.output(run.out(f));
}

void cmd_align(Run& run) {
  run.require_artifact("prior", "train-prior");
  run.require_artifact("frame", "train-prior");
  const AlignConfig ac = align_config(run);
  const PairedSet pairs = run.load_pairs();
  const SplitResult parts = run.split_pairs(pairs);
  const auto [x_est, y_est] = parts.unpaired_estimation(run.seed(kUnpairStream));
  AlignArtifacts a;
  a.frame = load_frame(run.out("frame"));
  a.prior = load_prior(run.out("prior"));
  require(a.frame.d == pairs.d(), Errc::InvalidInput, "frame dimension does not match the corpus");
  a.radial = fit_radial_transfer(x_est, y_est, a.frame);
  a.refiner = train_refiner(y_est, a.frame, a.prior, a.radial, ac);
  save_refiner(a.refiner, a.radial, run.out("refiner"));
  run.output(run.out("refiner.json"));
  run.output(run.out("refiner.bin"));

  const AlignTrace trace = align_corpus_traced(parts.heldout.y().data(), a);
  run.output_embd(z_file("anisoalign"), trace.z, "text");
  const Index pairs_checked = get<Index>(run.cfg().section("align"), "certificate_pairs", "align");
  const Certificates c =
      certify(trace.init, trace.refined, a.frame, a.refiner.bounds, pairs_checked, run.seed(kCertifyStream));
  run.output_text("certificates.json", c.to_json().dump(2) + "\n");
}

void cmd_eval(Run& run) {
  const ojson& e = run.cfg().section("eval");
  const PairedSet pairs = run.load_pairs();
  const SplitResult parts = run.split_pairs(pairs);
  auto methods = get<std::vector<std::string>>(e, "methods", "eval");
  if (methods.empty()) methods = methods_with_files(run, "z_", ".embd");
  require(!methods.empty(), Errc::DependencyMissing, "transform: no z_*.embd files in " + run.cfg().out.string());
  EvalOptions opts;
  opts.k = get<Index>(e, "k", "eval");
  opts.pair_count = get<Index>(e, "pair_count", "eval");
  opts.all_pairs_max_n = get<Index>(e, "all_pairs_max_n", "eval");
  opts.permutations = get<Index>(e, "permutations", "eval");
  opts.seed = run.seed(kEvalStream);
  std::string csv = MetricReport::csv_header() + "\n";
  for (const std::string& m : methods) {
    const fs::path zp = run.out(z_file(m));
    require(fs::exists(zp), Errc::DependencyMissing,
            producing_stage(m) + ": " + zp.string() + " not found; run " + producing_stage(m) + " first");
    run.input(zp);
    const EmbeddingSet z = load(zp, "text");
    require(z.n() == parts.heldout.n(), Errc::PairMismatch,
            zp.string() + " has " + std::to_string(z.n()) + " rows, the held-out split has " +
                std::to_string(parts.heldout.n()));
    const MetricReport r = evaluate(m, parts.heldout.y().data(), z.data(), parts.heldout.x().data(), opts);
    run.output_text("metrics_" + m + ".json", r.to_json().dump(2) + "\n");
    run.output_text("spectrum_" + m + ".csv", r.spectrum_csv());
    csv += r.csv_row() + "\n";
  }
  run.output_text("metrics.csv", csv);
}

void cmd_report(Run& run) {
  auto methods = get<std::vector<std::string>>(run.cfg().section("report"), "methods", "report");
  if (methods.empty()) methods = methods_with_files(run, "metrics_", ".json");
  require(!methods.empty(), Errc::DependencyMissing, "eval: no metrics_*.json files in " + run.cfg().out.string());
  std::string csv = MetricReport::csv_header() + "\n";
  ojson rows = ojson::array();
  for (const std::string& m : methods) {
    const fs::path p = run.out("metrics_" + m + ".json");
    require(fs::exists(p), Errc::DependencyMissing, "eval: " + p.string() + " not found; run eval first");
    run.input(p);
    const auto bytes = read_file(p);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& ex) {
      fail(Errc::FormatError, p.string() + ": " + ex.what());
    }
    const MetricReport r = MetricReport::from_json(j);
    csv += r.csv_row() + "\n";
    ojson row = r.to_json();
    row.erase("residual_spectrum_t");
    rows.push_back(row);
  }
  run.output_text("report.csv", csv);
  run.output_text("report.json", rows.dump(2) + "\n");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen", "diagnose", "transform", "train-prior", "align", "eval", "report"};
  return names;
}

ojson default_config() {
  ojson gen = PlantSpec{}.to_json();
  gen.erase("seed");
  gen["mc_samples"] = 0;
  const PriorConfig pc;
  const AlignConfig ac;
  ojson c;
  c["seed"] = 0;
  c["threads"] = 0;
  c["data"] = {{"x", nullptr}, {"y", nullptr}};
  c["gen"] = gen;
  c["split"] = {{"estimation_fraction", 0.5}};
  c["diagnose"] = {{"q_values", ojson::array()}, {"eta_u", true}};
  c["frame"] = {{"r", 64}, {"lambda_reg", 1e-6}, {"eps_polar", 1e-12}};
  c["prior"] = {{"sigma_min", pc.schedule.sigma_min},
                {"sigma_max", pc.schedule.sigma_max},
                {"tau", pc.schedule.tau},
                {"p", pc.p},
                {"hidden", pc.hidden},
                {"steps", pc.steps},
                {"batch", pc.batch},
                {"lr", pc.lr},
                {"mixing_lr_ratio", pc.mixing_lr_ratio},
                {"mixing", to_string(pc.mixing)},
                {"validation_size", pc.validation_size}};
  c["align"] = {{"alpha_theta", ac.bounds.alpha_theta},
                {"alpha_rho", ac.bounds.alpha_rho},
                {"alpha_v", ac.bounds.alpha_v},
                {"beta", ac.beta},
                {"hidden", ac.hidden},
                {"steps", ac.steps},
                {"batch", ac.batch},
                {"lr", ac.lr},
                {"validation_size", ac.validation_size},
                {"certificate_pairs", 10000}};
  c["transform"] = {{"methods", kBaselines},
                    {"alpha_values", std::vector<double>{0.5}},
                    {"alpha_ranks", std::vector<Index>{4}},
                    {"c3_sigma", 0.04}};
  c["eval"] = {{"k", 20},
               {"pair_count", 100000},
               {"all_pairs_max_n", 450},
               {"permutations", 20},
               {"methods", ojson::array()}};
  c["report"] = {{"methods", ojson::array()}};
  c["out"] = "run";
  return c;
}

RunConfig resolve_config(const CliOptions& o) {
  ojson values = default_config();
  if (o.config) {
    require(fs::exists(*o.config), Errc::InvalidConfig, "config file " + o.config->string() + " not found");
    const auto bytes = read_file(*o.config);
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::InvalidConfig, o.config->string() + ": " + e.what());
    }
    overlay(values, file, "");
  }
  if (o.seed) values["seed"] = *o.seed;
  if (o.threads) values["threads"] = *o.threads;
  if (o.out) values["out"] = o.out->string();
  require(values["seed"].is_number_unsigned() || values["seed"].get<std::int64_t>() >= 0, Errc::InvalidConfig,
          "seed must be non-negative");
  require(values["threads"].get<std::int64_t>() >= 0, Errc::InvalidConfig, "threads must be non-negative");
  RunConfig rc;
  rc.out = values["out"].get<std::string>();
  // The output location does not change results; keep it out of the recorded config.
  values.erase("out");
  rc.values = std::move(values);
  return rc;
}

void run_command(const std::string& command, const RunConfig& config) {
  Run run(command, config);
  if (command == "gen") cmd_gen(run);
  else if (command == "diagnose") cmd_diagnose(run);
  else if (command == "transform") cmd_transform(run);
  else if (command == "train-prior") cmd_train_prior(run);
  else if (command == "align") cmd_align(run);
  else if (command == "eval") cmd_eval(run);
  else if (command == "report") cmd_report(run);
  else fail(Errc::InvalidConfig, "unknown command '" + command + "'");
  run.write_manifest();
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::InvalidConfig: return 2;
    case Errc::TrainingDiverged: return 4;
    default: return 3;
  }
}

int run(const CliOptions& options) {
  try {
    const RunConfig cfg = resolve_config(options);
    const auto threads = cfg.values.at("threads").get<unsigned>();
    if (threads > 0) set_thread_limit(threads);
    run_command(options.command, cfg);
    return 0;
  } catch (const Error& e) {
    std::cerr << "aniso " << options.command << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "aniso " << options.command << ": " << e.what() << "\n";
    return 3;
  }
}

std::vector<std::string> canonical_order(std::vector<std::string> methods) {
  const auto rank = [](const std::string& m) -> int {
    const auto it = std::find(kBaselines.begin(), kBaselines.end(), m);
    if (it != kBaselines.end()) {
      const int pos = static_cast<int>(it - kBaselines.begin());
      return pos <= 4 ? pos : pos + 1;  // alpha sweeps sit right after alpha
    }
    if (m.rfind("alpha_", 0) == 0) return 5;
    if (m == "anisoalign") return 8;
    return 9;
  };
  std::sort(methods.begin(), methods.end(), [&](const std::string& a, const std::string& b) {
    const int ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  return methods;
}

}  // namespace aniso::cli

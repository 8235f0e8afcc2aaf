#include "cbmf/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cbmf/anova.hpp"
#include "cbmf/dataset.hpp"
#include "cbmf/eval.hpp"
#include "cbmf/factorize.hpp"
#include "cbmf/init.hpp"
#include "cbmf/insight.hpp"
#include "cbmf/model_io.hpp"
#include "cbmf/weights.hpp"

namespace cbmf {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDataEnv = "CBMF_DATA_DIR";

struct DataArgs {
  std::string ratings;
  std::string attributes;
  double rating_min = 0.0;
  double rating_max = 5.0;
  std::string profile = "auto";
};

struct LoadedData {
  RatingsDataset ratings;
  std::optional<AttributeMatrix> attrs;
  Profile profile = Profile::Movies;
  std::string id;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--ratings,--data", args.ratings,
                  "ML-100K directory or ratings file (user, item, rating); defaults to $CBMF_DATA_DIR");
  cmd->add_option("--attributes", args.attributes, "item attribute file (incidence lines or 0/1 grid)");
  cmd->add_option("--rating-min", args.rating_min, "lower end of the rating scale for ratings files")->capture_default_str();
  cmd->add_option("--rating-max", args.rating_max, "upper end of the rating scale for ratings files")->capture_default_str();
  cmd->add_option("--profile", args.profile, "hyperparameter table column: auto, movies or recipes")->capture_default_str();
}

LoadedData load_data(const DataArgs& args) {
  std::string path = args.ratings;
  if (path.empty()) {
    if (const char* env = std::getenv(kDataEnv)) path = env;
  }
  if (path.empty()) throw InputError("no dataset given (use --ratings or set CBMF_DATA_DIR)");

  LoadedData out;
  const bool directory = fs::is_directory(path);
  if (directory) {
    auto ml = parse_movielens(path);
    out.ratings = std::move(ml.ratings);
    out.attrs = std::move(ml.attributes);
  } else {
    if (!fs::is_regular_file(path)) throw InputError("dataset not found: " + path);
    out.ratings = parse_triplets(fs::path(path), args.rating_min, args.rating_max);
  }
  if (!args.attributes.empty()) out.attrs = parse_attributes(fs::path(args.attributes), out.ratings);
  out.profile = args.profile == "auto" ? (directory ? Profile::Movies : Profile::Recipes) : parse_profile(args.profile);
  out.id = fs::path(path).filename().string();
  if (out.id.empty()) out.id = fs::path(path).parent_path().filename().string();
  return out;
}

std::optional<double> auto_or_number(const std::string& s, const char* what) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + " must be 'auto' or a number, got '" + s + "'");
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

// --------------------------------------------------------------------------

int cmd_summary(const DataArgs& args, std::ostream& out) {
  auto data = load_data(args);
  auto s = summarize(data.ratings, data.attrs ? &*data.attrs : nullptr);
  out << "N " << s.n_users << '\n'
      << "M " << s.n_items << '\n'
      << "D " << s.n_attrs << '\n'
      << "T " << s.n_ratings << '\n'
      << "density " << std::setprecision(6) << s.density << " (" << std::fixed << std::setprecision(1)
      << 100.0 * s.density << "%)\n";
  return kExitOk;
}

struct TrainArgs {
  DataArgs data;
  std::string algo;
  int k = 5;
  std::optional<double> lambda;
  std::optional<double> eta;
  std::string gamma = "auto";
  int c = 1;
  double theta = 1.0;
  double epsilon = 0.005;
  int max_iters = 500;
  std::string init = "mixed";
  double kappa = 0.5;
  double sigma = 0.01;
  std::string delta = "auto";
  std::uint64_t seed = 0;
  std::string out = "model.txt";
  std::string trace;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const Variant variant = parse_variant(a.algo);
  auto data = load_data(a.data);
  if (uses_attributes(variant) && !data.attrs) throw InputError(std::string(to_string(variant)) + " requires attributes");
  const AttributeMatrix* attrs = data.attrs ? &*data.attrs : nullptr;

  Hyperparams h;
  h.k = a.k;
  auto table = default_step_settings(data.profile, a.k);
  if ((!a.lambda || !a.eta) && !table) {
    throw InputError("no lambda/eta defaults for K = " + std::to_string(a.k) + "; pass --lambda and --eta");
  }
  h.lambda = a.lambda ? *a.lambda : table->lambda;
  h.eta = a.eta ? *a.eta : table->eta;
  h.epsilon = a.epsilon;
  h.max_iters = a.max_iters;
  h.c = a.c;
  h.theta = a.theta;
  h.seed = a.seed;
  h.gamma = resolve_gamma(variant, data.ratings.n_users(), data.ratings.n_items(), attrs ? attrs->n_attrs() : 0,
                          auto_or_number(a.gamma, "--gamma"));
  h.validate();

  InitConfig ic;
  ic.strategy = parse_init_strategy(a.init);
  ic.kappa = a.kappa;
  ic.sigma = a.sigma;
  ic.delta = auto_or_number(a.delta, "--delta");
  ic.seed = a.seed;
  ic.validate();

  AnovaModel anova = fit_anova(data.ratings);
  RatingsDataset normalized = residualize(data.ratings, anova);

  const auto N = static_cast<Eigen::Index>(data.ratings.n_users());
  const auto K = static_cast<Eigen::Index>(h.k);
  Matrix P_svd = Matrix::Zero(N, K);
  Matrix V_svd;
  double kappa = ic.strategy == InitStrategy::Svd ? 1.0 : ic.strategy == InitStrategy::Random ? 0.0 : ic.kappa;
  if (ic.strategy != InitStrategy::Random) {
    auto svd = svd_init(normalized, h.k);
    P_svd = svd.P;
    V_svd = variant == Variant::RC ? map_B(*attrs, svd.Q, ic.delta).B : svd.Q;
  } else {
    V_svd = Matrix::Zero(variant == Variant::RC ? static_cast<Eigen::Index>(attrs->n_attrs())
                                                : static_cast<Eigen::Index>(data.ratings.n_items()),
                         K);
  }
  FactorState init;
  if (ic.strategy == InitStrategy::Svd) {
    init = {P_svd, V_svd};
  } else {
    init = {mixed_init(P_svd, ic.sigma, kappa, derive_seed(ic.seed, 0)),
            mixed_init(V_svd, ic.sigma, kappa, derive_seed(ic.seed, 1))};
  }

  std::optional<WeightMatrix> weights;
  if (uses_weights(variant)) weights = build_weights(variant, *attrs, h.c, h.theta);

  Problem problem;
  problem.variant = variant;
  problem.train = &normalized;
  problem.attrs = attrs;
  problem.weights = weights ? &*weights : nullptr;
  problem.lambda = h.lambda;
  problem.gamma = *h.gamma;

  out << "algo " << to_string(variant) << '\n'
      << "k " << h.k << '\n'
      << std::setprecision(17) << "lambda " << h.lambda << '\n'
      << "gamma " << *h.gamma << '\n'
      << "eta " << h.eta << '\n'
      << "epsilon " << h.epsilon << '\n'
      << "max_iters " << h.max_iters << '\n'
      << "c " << h.c << '\n'
      << "theta " << h.theta << '\n'
      << "init " << a.init << '\n'
      << "kappa " << kappa << '\n'
      << "sigma " << ic.sigma << '\n'
      << "delta " << a.delta << '\n'
      << "seed " << h.seed << '\n'
      << "profile " << to_string(data.profile) << '\n';

  TrainResult result = train(problem, std::move(init), {h.eta, h.epsilon, h.max_iters});
  if (result.trace.diverged) err << "warning: objective increased; training stopped early\n";
  out << "iterations " << result.trace.iterations() << '\n'
      << "objective_initial " << result.trace.initial_objective << '\n'
      << "objective_final " << objective(problem, result.state) << '\n'
      << "diverged " << (result.trace.diverged ? 1 : 0) << '\n';

  ModelFile file;
  file.hyper = h;
  file.n_users = data.ratings.n_users();
  file.n_items = data.ratings.n_items();
  file.n_attrs = attrs ? attrs->n_attrs() : 0;
  file.fingerprint = data.ratings.fingerprint();
  file.model.variant = variant;
  file.model.P = std::move(result.state.P);
  file.model.V = std::move(result.state.V);
  file.model.anova = std::move(anova);
  file.model.rating_min = data.ratings.rating_min();
  file.model.rating_max = data.ratings.rating_max();
  {
    auto mf = open_out(a.out);
    write_model(mf, file);
  }
  const std::string trace_path = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
  {
    auto tf = open_out(trace_path);
    result.trace.write_csv(tf);
  }
  out << "model " << a.out << '\n' << "trace " << trace_path << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  DataArgs data;
  int repeats = 15;
  double holdout = 0.5;
  std::vector<std::string> algos{"bl", "ab", "gab", "tg", "rc"};
  std::vector<int> ks{5, 10, 15};
  std::uint64_t seed = 1;
  std::optional<double> lambda;
  std::optional<double> eta;
  std::string gamma = "auto";
  int c = 1;
  double theta = 1.0;
  double epsilon = 0.005;
  int max_iters = 500;
  double sigma = 0.01;
  bool no_calibrate = false;
  double kappa = 0.5;
  double tolerance = 0.002;
  std::string out_dir = ".";
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (!(a.holdout > 0.0 && a.holdout < 1.0)) throw InputError("--holdout must lie strictly between 0 and 1");
  auto data = load_data(a.data);

  ExperimentConfig cfg;
  cfg.dataset_id = data.id;
  cfg.profile = data.profile;
  cfg.variants.clear();
  for (const auto& s : a.algos) cfg.variants.push_back(parse_variant(s));
  cfg.ks = a.ks;
  cfg.repeats = a.repeats;
  cfg.holdout = a.holdout;
  cfg.base_seed = a.seed;
  cfg.epsilon = a.epsilon;
  cfg.max_iters = a.max_iters;
  cfg.c = a.c;
  cfg.theta = a.theta;
  cfg.gamma = auto_or_number(a.gamma, "--gamma");
  cfg.sigma = a.sigma;
  cfg.calibrate = !a.no_calibrate;
  cfg.kappa = a.kappa;
  cfg.calibration_tolerance = a.tolerance;
  if (a.lambda || a.eta) {
    for (int k : a.ks) {
      auto table = default_step_settings(cfg.profile, k);
      if ((!a.lambda || !a.eta) && !table) throw InputError("no lambda/eta defaults for K = " + std::to_string(k));
      cfg.step_overrides[k] = {a.lambda ? *a.lambda : table->lambda, a.eta ? *a.eta : table->eta};
    }
  }
  for (Variant v : cfg.variants)
    if (uses_attributes(v) && !data.attrs) throw InputError(std::string(to_string(v)) + " requires attributes");

  auto report = run_experiment(data.ratings, data.attrs ? &*data.attrs : nullptr, cfg);

  const fs::path dir(a.out_dir);
  {
    auto f = open_out(dir / "detail.csv");
    write_detail_csv(f, report);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, report);
  }
  const std::string table = compare_table(report);
  {
    auto f = open_out(dir / "comparison.txt");
    f << table;
  }
  out << table;
  return kExitOk;
}

struct InsightArgs {
  DataArgs data;
  std::string model;
  std::size_t top = 10;
  std::string direction = "similar";
  std::string items;
  std::string out;
};

std::optional<LoadedData> maybe_load(const DataArgs& args) {
  if (args.ratings.empty() && !std::getenv(kDataEnv)) return std::nullopt;
  return load_data(args);
}

void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(out);
  } else {
    auto f = open_out(path);
    write(f);
  }
}

int cmd_attr_sim(const InsightArgs& a, std::ostream& out, std::ostream& err) {
  ModelFile mf = read_model(fs::path(a.model));
  if (mf.model.variant != Variant::RC) throw InputError("attribute factors absent: model variant is " + std::string(to_string(mf.model.variant)));
  std::vector<std::string> labels;
  if (auto data = maybe_load(a.data); data && data->attrs) {
    if (data->attrs->n_attrs() != mf.n_attrs) throw InputError("attribute count does not match the model");
    if (data->ratings.fingerprint() != mf.fingerprint) err << "warning: dataset fingerprint differs from the model's\n";
    labels = data->attrs->labels;
  } else {
    for (std::size_t d = 0; d < mf.n_attrs; ++d) labels.push_back("attr" + std::to_string(d));
  }
  SimilarityDirection dir;
  if (a.direction == "similar") dir = SimilarityDirection::Similar;
  else if (a.direction == "dissimilar") dir = SimilarityDirection::Dissimilar;
  else throw InputError("--direction must be similar or dissimilar");
  auto report = top_pairs(mf.model.V, labels, a.top, dir);
  emit(a.out, out, [&](std::ostream& o) { write_similarity_csv(o, report); });
  return kExitOk;
}

int cmd_item_map(const InsightArgs& a, std::ostream& out, std::ostream& err) {
  ModelFile mf = read_model(fs::path(a.model));
  auto data = maybe_load(a.data);
  if (!data) throw InputError("item-map needs the dataset for item labels (--ratings)");
  if (data->ratings.n_items() != mf.n_items) throw InputError("item count does not match the model");
  if (data->ratings.fingerprint() != mf.fingerprint) err << "warning: dataset fingerprint differs from the model's\n";

  Matrix Q = mf.model.V;
  if (mf.model.variant == Variant::RC) {
    if (!data->attrs) throw InputError("RC item map requires attributes");
    Q = data->attrs->incidence * mf.model.V;
  }
  std::vector<Index> selection;
  if (a.items.empty()) {
    for (Index i = 0; i < data->ratings.n_items(); ++i) selection.push_back(i);
  } else {
    std::ifstream in(a.items);
    if (!in) throw InputError("cannot open item list " + a.items);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      auto k = data->ratings.find_item(line);
      if (!k) throw InputError("unknown item '" + line + "'");
      selection.push_back(*k);
    }
  }
  std::vector<std::string> labels = data->ratings.item_labels;
  if (labels.empty()) for (Index i = 0; i < data->ratings.n_items(); ++i) labels.push_back(std::to_string(i));
  auto points = item_map(Q, labels, selection);
  emit(a.out, out, [&](std::ostream& o) { write_item_map_csv(o, points); });
  return kExitOk;
}

struct SynthArgs {
  SynthConfig config;
  std::string out_ratings = "ratings.tsv";
  std::string out_attributes = "attributes.tsv";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  auto data = synth_recipes(a.config);
  {
    auto f = open_out(a.out_ratings);
    write_triplets(f, data.ratings);
  }
  {
    auto f = open_out(a.out_attributes);
    for (Eigen::Index i = 0; i < data.attributes.incidence.rows(); ++i)
      for (Eigen::Index d = 0; d < data.attributes.incidence.cols(); ++d)
        if (data.attributes.incidence(i, d) != 0.0) f << i << '\t' << data.attributes.labels[static_cast<std::size_t>(d)] << '\n';
  }
  auto s = summarize(data.ratings, &data.attributes);
  out << "seed " << a.config.seed << '\n'
      << "N " << s.n_users << "\nM " << s.n_items << "\nD " << s.n_attrs << "\nT " << s.n_ratings << '\n'
      << "density " << std::setprecision(6) << s.density << '\n';
  return kExitOk;
}

struct WeightsArgs {
  DataArgs data;
  std::string algo = "ab";
  int c = 1;
  double theta = 1.0;
  bool raw = false;
  std::string out;
};

int cmd_weights(const WeightsArgs& a, std::ostream& out) {
  const Variant v = parse_variant(a.algo);
  if (!uses_weights(v)) throw InputError("--algo must be ab, gab or tg");
  auto data = load_data(a.data);
  if (!data.attrs) throw InputError(std::string(to_string(v)) + " requires attributes");
  WeightMatrix w;
  if (v == Variant::AB) w = alignment_weights(neighbor_sets(*data.attrs, a.c));
  else if (v == Variant::gAB) w = logistic_weights(*data.attrs, a.c, a.theta, !a.raw);
  else w = cosine_weights(*data.attrs, !a.raw);
  emit(a.out, out, [&](std::ostream& o) { write_weights(o, w); });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Content-boosted matrix factorization for collaborative filtering", "cbmf"};
  app.require_subcommand(1);

  DataArgs summary_args;
  auto* summary = app.add_subcommand("summary", "print N, M, D, |T| and density of a dataset");
  add_data_options(summary, summary_args);

  TrainArgs ta;
  auto* trn = app.add_subcommand("train", "fit one model on a full dataset and write a model file");
  add_data_options(trn, ta.data);
  trn->add_option("--algo", ta.algo, "bl, ab, gab, tg or rc")->required();
  trn->add_option("--k", ta.k, "latent dimension")->capture_default_str();
  trn->add_option("--lambda", ta.lambda, "penalty weight (default from the K/profile table)");
  trn->add_option("--eta", ta.eta, "learning rate (default from the K/profile table)");
  trn->add_option("--gamma", ta.gamma, "item-side penalty scale: auto or a number")->capture_default_str();
  trn->add_option("--c", ta.c, "shared-attribute threshold")->capture_default_str();
  trn->add_option("--theta", ta.theta, "logistic sharpness for gab")->capture_default_str();
  trn->add_option("--epsilon", ta.epsilon, "relative-improvement stopping threshold")->capture_default_str();
  trn->add_option("--max-iters", ta.max_iters, "iteration cap")->capture_default_str();
  trn->add_option("--init", ta.init, "svd, random or mixed")->capture_default_str();
  trn->add_option("--kappa", ta.kappa, "SVD weight of the mixed initialization")->capture_default_str();
  trn->add_option("--sigma", ta.sigma, "standard deviation of the random initialization")->capture_default_str();
  trn->add_option("--delta", ta.delta, "ridge term for mapping Q0 to B0: auto or a number")->capture_default_str();
  trn->add_option("--seed", ta.seed, "random seed")->capture_default_str();
  trn->add_option("--out", ta.out, "model file to write")->capture_default_str();
  trn->add_option("--trace", ta.trace, "trace CSV (default <out>.trace.csv)");

  EvaluateArgs ea;
  auto* evl = app.add_subcommand("evaluate", "repeated 50/50 holdout comparison of algorithms");
  add_data_options(evl, ea.data);
  evl->add_option("--repeats", ea.repeats, "number of random splits")->capture_default_str();
  evl->add_option("--holdout", ea.holdout, "validation fraction")->capture_default_str();
  evl->add_option("--algos", ea.algos, "comma-separated algorithms")->delimiter(',')->capture_default_str();
  evl->add_option("--ks", ea.ks, "comma-separated latent dimensions")->delimiter(',')->capture_default_str();
  evl->add_option("--seed", ea.seed, "base seed; split r uses seed + r")->capture_default_str();
  evl->add_option("--lambda", ea.lambda, "override lambda for every K");
  evl->add_option("--eta", ea.eta, "override eta for every K");
  evl->add_option("--gamma", ea.gamma, "auto or a number")->capture_default_str();
  evl->add_option("--c", ea.c, "shared-attribute threshold")->capture_default_str();
  evl->add_option("--theta", ea.theta, "logistic sharpness for gab")->capture_default_str();
  evl->add_option("--epsilon", ea.epsilon, "relative-improvement stopping threshold")->capture_default_str();
  evl->add_option("--max-iters", ea.max_iters, "iteration cap")->capture_default_str();
  evl->add_option("--sigma", ea.sigma, "random initialization scale")->capture_default_str();
  evl->add_flag("--no-calibrate", ea.no_calibrate, "use --kappa for every algorithm instead of calibrating");
  evl->add_option("--kappa", ea.kappa, "mixed-initialization weight when not calibrating")->capture_default_str();
  evl->add_option("--tolerance", ea.tolerance, "initial-MAE matching tolerance")->capture_default_str();
  evl->add_option("--out-dir", ea.out_dir, "directory for detail.csv, summary.csv, comparison.txt")->capture_default_str();

  InsightArgs sa;
  auto* sim = app.add_subcommand("attr-sim", "cosine similarity of attribute factors of an RC model");
  add_data_options(sim, sa.data);
  sim->add_option("--model", sa.model, "model file")->required();
  sim->add_option("--top", sa.top, "number of pairs")->capture_default_str();
  sim->add_option("--direction", sa.direction, "similar or dissimilar")->capture_default_str();
  sim->add_option("--out", sa.out, "CSV output (default stdout)");

  InsightArgs ma;
  auto* map = app.add_subcommand("item-map", "project item factors on their two leading principal components");
  add_data_options(map, ma.data);
  map->add_option("--model", ma.model, "model file")->required();
  map->add_option("--items", ma.items, "file with one item id or label per line (default: all items)");
  map->add_option("--out", ma.out, "CSV output (default stdout)");

  SynthArgs ya;
  auto* syn = app.add_subcommand("synth", "generate a Recipes-shaped synthetic dataset");
  syn->add_option("--seed", ya.config.seed)->capture_default_str();
  syn->add_option("--users", ya.config.n_users)->capture_default_str();
  syn->add_option("--items", ya.config.n_items)->capture_default_str();
  syn->add_option("--attrs", ya.config.n_attrs)->capture_default_str();
  syn->add_option("--density", ya.config.density)->capture_default_str();
  syn->add_option("--attrs-per-item", ya.config.attrs_per_item)->capture_default_str();
  syn->add_option("--out-ratings", ya.out_ratings)->capture_default_str();
  syn->add_option("--out-attributes", ya.out_attributes)->capture_default_str();

  WeightsArgs wa;
  auto* wts = app.add_subcommand("weights", "dump the item-item weight matrix as TSV");
  add_data_options(wts, wa.data);
  wts->add_option("--algo", wa.algo, "ab, gab or tg")->capture_default_str();
  wts->add_option("--c", wa.c)->capture_default_str();
  wts->add_option("--theta", wa.theta)->capture_default_str();
  wts->add_flag("--raw", wa.raw, "skip row normalization (gab, tg)");
  wts->add_option("--out", wa.out, "TSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*summary) return cmd_summary(summary_args, out);
    if (*trn) return cmd_train(ta, out, err);
    if (*evl) return cmd_evaluate(ea, out);
    if (*sim) return cmd_attr_sim(sa, out, err);
    if (*map) return cmd_item_map(ma, out, err);
    if (*syn) return cmd_synth(ya, out);
    if (*wts) return cmd_weights(wa, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cbmf

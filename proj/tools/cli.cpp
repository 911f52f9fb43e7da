#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mmnn/bayes_sim.hpp"
#include "mmnn/bounds.hpp"
#include "mmnn/dataset.hpp"
#include "mmnn/error.hpp"
#include "mmnn/model_io.hpp"
#include "mmnn/parallel.hpp"
#include "mmnn/srm.hpp"

namespace mmnn::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

// Grid syntax: "a,b,c", "lin:lo:hi:count" or "geom:lo:hi:count".
std::vector<double> parse_grid(const std::string& spec, const std::string& flag) {
  auto number = [&](const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ValidationError(flag + ": '" + s + "' is not a number");
    return v;
  };
  std::vector<std::string> parts;
  const char sep = (spec.rfind("lin:", 0) == 0 || spec.rfind("geom:", 0) == 0) ? ':' : ',';
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) parts.push_back(part);
  if (parts.empty()) throw ValidationError(flag + ": empty grid");
  if (sep == ',') {
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(number(p));
    return out;
  }
  if (parts.size() != 4) throw ValidationError(flag + ": expected kind:lo:hi:count");
  const double lo = number(parts[1]);
  const double hi = number(parts[2]);
  const double count = number(parts[3]);
  if (!(count >= 1) || count != std::floor(count))
    throw ValidationError(flag + ": count must be a positive integer");
  const auto m = static_cast<std::size_t>(count);
  const bool geom = parts[0] == "geom";
  if (geom && !(lo > 0.0 && hi > 0.0)) throw ValidationError(flag + ": geom grid needs lo, hi > 0");
  std::vector<double> out;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    double v = geom ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    if (i + 1 == m && m > 1) v = hi;
    out.push_back(v);
  }
  return out;
}

struct Output {
  std::ofstream file;
  std::ostream* stream;
  Output(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw Error("cannot write " + path);
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

MetricOracle oracle_for(const std::string& metric, const std::vector<Point>& points) {
  const MetricOracle oracle(parse_metric_kind(metric));
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      oracle.check_payload(points[i]);
    } catch (const MetricMismatchError& e) {
      throw MetricMismatchError(std::string(e.what()) + " (data row " + std::to_string(i + 1) + ")");
    }
  }
  return oracle;
}

struct TrainOpts {
  std::string data, out, report, metric = "l2", search = "sweep", penalty = "combined";
  double delta = 0.01;
  std::optional<double> ddim;
  double eta = 0.0;
  bool exact_nn = false;
  int fat = 16;
  bool count_units = false;
};

int run_train(const TrainOpts& o, std::ostream& out) {
  const auto raw = read_dataset(o.data);
  if (raw.points.empty()) throw ValidationError(o.data + ": no rows");
  const auto ls = make_sample(raw);
  const auto base = oracle_for(o.metric, ls.sample.points);
  const auto oracle = normalize_sample(ls.sample, base);

  SrmParams p;
  p.delta = o.delta;
  p.ddim = o.ddim;
  p.eta = o.eta;
  p.exact_nn = o.exact_nn || o.eta == 0.0;
  p.search = o.search == "binary" ? SearchMode::Binary : SearchMode::Sweep;
  p.penalty = parse_penalty_kind(o.penalty);
  p.fat = o.fat == 64 ? FatConstant::Entropy64 : FatConstant::Printed16;
  p.count_units = o.count_units;
  const auto res = srm_train(ls.sample, oracle, p);

  const auto report = training_report_json(res, p, ls.labels, ls.sample.size(), oracle.scale());
  write_json(o.out, model_json(*res.classifier, ls.labels, report["bounds"]));
  std::string report_path = o.report;
  if (report_path.empty()) report_path = o.out + ".report.json";
  write_json(report_path, report);
  out << "L=" << format_double(res.L_star) << " cover=" << res.cover.size
      << " q=" << format_double(res.q_value) << " s1=" << res.s1.size() << '\n';
  if (!res.zero_pairs.empty())
    out << "warning: " << res.zero_pairs.size()
        << " cross-label duplicate pair(s) conflict at every L\n";
  return kOk;
}

struct PredictOpts {
  std::string model, data, out;
  bool with_margin = false;
  std::optional<double> eta;
  bool exact_nn = false;
};

std::string describe_model_payload(const LipschitzClassifier& clf) {
  const auto& p = clf.points().front();
  std::string s = "model metric " + std::string(to_string(clf.oracle().kind()));
  if (p.is_vector()) s += " over vectors of length " + std::to_string(p.vec().size());
  else s += " over strings";
  return s;
}

int run_predict(const PredictOpts& o, std::ostream& out) {
  const auto doc = read_json(o.model);
  auto model = o.eta ? model_from_json(doc, *o.eta, o.exact_nn || *o.eta == 0.0)
                     : (o.exact_nn ? model_from_json(doc, 0.0, true) : model_from_json(doc));
  const auto& clf = model.classifier;
  const auto raw = read_dataset(o.data);
  const auto& ref = clf.points().front();
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    const auto& q = raw.points[i];
    const bool ok = q.is_vector() == ref.is_vector() &&
                    (!q.is_vector() || q.vec().size() == ref.vec().size());
    if (!ok)
      throw MetricMismatchError(describe_model_payload(clf) + " cannot score query row " +
                                std::to_string(i + 1) + " (" +
                                (q.is_vector() ? "vector of length " + std::to_string(q.vec().size())
                                               : std::string("string")) +
                                ")");
  }
  std::vector<LipschitzClassifier::Prediction> preds(raw.points.size());
  parallel_for(preds.size(), 0, [&](std::size_t i) { preds[i] = clf.predict_with_margin(raw.points[i]); });

  Output dst(o.out, out);
  *dst << "row,label" << (o.with_margin ? ",margin" : "") << '\n';
  for (std::size_t i = 0; i < preds.size(); ++i) {
    *dst << (i + 1) << ',' << model.labels.name(preds[i].label);
    if (o.with_margin) *dst << ',' << format_double(preds[i].margin);
    *dst << '\n';
  }
  return kOk;
}

struct BoundsOpts {
  std::string L = "geom:0.001:1:31", n = "1000000", D = "2", k = "10", delta = "0.01", out;
  double eta = 0.0;
  int fat = 16;
};

int run_bounds(const BoundsOpts& o, std::ostream& out) {
  const auto Ls = parse_grid(o.L, "--L");
  const auto ns = parse_grid(o.n, "--n");
  const auto Ds = parse_grid(o.D, "--D");
  const auto ks = parse_grid(o.k, "--k");
  const auto deltas = parse_grid(o.delta, "--delta");
  for (double k : ks)
    if (k != std::floor(k)) throw ValidationError("--k: class counts must be integers");

  std::ostringstream csv;
  csv << "L,n,D,k,delta,delta_rad,delta_fat,combined,winner,crossover\n";
  for (double n : ns)
    for (double D : Ds)
      for (double k : ks)
        for (double delta : deltas) {
          std::string prev;
          for (double L : Ls) {
            BoundParams p;
            p.n = n;
            p.L = L;
            p.D = D;
            p.k = static_cast<int>(k);
            p.delta = delta;
            p.eta = o.eta;
            p.fat = o.fat == 64 ? FatConstant::Entropy64 : FatConstant::Printed16;
            const auto v = delta_combined(p);
            const std::string winner = v.delta_rad <= v.delta_fat ? "rad" : "fat";
            const bool cross = !prev.empty() && prev != winner;
            prev = winner;
            csv << format_double(L) << ',' << format_double(n) << ',' << format_double(D) << ','
                << p.k << ',' << format_double(delta) << ',' << format_double(v.delta_rad) << ','
                << format_double(v.delta_fat) << ',' << format_double(v.combined) << ',' << winner
                << ',' << (cross ? 1 : 0) << '\n';
          }
        }
  Output dst(o.out, out);
  *dst << csv.str();
  return kOk;
}

struct SimOpts {
  std::string domain = "interval", n = "50,200,800,3200", out;
  int k = 2;
  double L_post = 1.0;
  int cells = 16;
  int trials = 200;
  int test_points = 1000;
  std::uint64_t seed = 1;
};

int run_simulate(const SimOpts& o, std::ostream& out, std::ostream& err) {
  DistributionSpec spec;
  spec.domain = parse_domain(o.domain);
  spec.k = o.k;
  spec.L_post = o.L_post;
  spec.seed = o.seed;
  spec.cells = o.cells;
  const auto dist = make_distribution(spec);
  for (const auto& w : dist.warnings()) err << "warning: " << w << '\n';
  const auto ns = parse_grid(o.n, "--n");

  std::ostringstream csv;
  csv << "n,trials,bayes_risk,mean_nn_risk,stderr,bound_rhs,pass,seed\n";
  for (double n : ns) {
    if (!(n >= 1) || n != std::floor(n)) throw ValidationError("--n: sizes must be positive integers");
    const auto r = nn_risk_trials(dist, static_cast<int>(n), o.trials, o.test_points, o.seed);
    csv << r.n << ',' << r.trials << ',' << format_double(r.bayes_risk) << ','
        << format_double(r.mean_nn_risk) << ',' << format_double(r.mc_stderr) << ','
        << format_double(r.bound_rhs) << ',' << (r.pass ? "true" : "false") << ',' << r.seed << '\n';
  }
  Output dst(o.out, out);
  *dst << csv.str();
  return kOk;
}

struct DimOpts {
  std::string data, metric = "l2";
};

int run_estimate_dim(const DimOpts& o, std::ostream& out) {
  const auto raw = read_dataset(o.data);
  const auto ls = make_sample(raw);
  const auto base = oracle_for(o.metric, ls.sample.points);
  const auto oracle = normalize_sample(ls.sample, base);
  const auto est = estimate_ddim(ls.sample, oracle);
  const nlohmann::json j{{"ddim", est.ddim},
                         {"method", to_string(est.method)},
                         {"n", ls.sample.size()},
                         {"raw_diameter", 1.0 / oracle.scale()},
                         {"scales_examined", est.scales_examined},
                         {"net_sizes", est.net_sizes}};
  out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Margin-regularized nearest-neighbor classification in metric spaces"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.fallthrough();
  app.add_option("--threads", threads, "Worker threads (default: METRIC_MARGIN_THREADS or all cores)");

  TrainOpts t;
  auto* train = app.add_subcommand("train", "Fit a classifier by structural risk minimization");
  train->add_option("data", t.data, "Training data (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", t.out, "Model JSON path")->required();
  train->add_option("--report", t.report, "Training report path (default: <out>.report.json)");
  train->add_option("--metric", t.metric, "l1, l2, linf or levenshtein");
  train->add_option("--delta", t.delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
  train->add_option("--ddim", t.ddim, "Doubling dimension (estimated when absent)");
  train->add_option("--eta", t.eta, "Approximate nearest-neighbor slack")->check(CLI::NonNegativeNumber);
  train->add_flag("--exact-nn", t.exact_nn, "Use an exact index even when --eta > 0");
  train->add_option("--search", t.search, "sweep or binary")->check(CLI::IsMember({"sweep", "binary"}));
  train->add_option("--penalty", t.penalty, "Penalty inside Q")->check(CLI::IsMember({"combined", "rad", "fat"}));
  train->add_option("--fat-constant", t.fat, "16 (default) or 64")->check(CLI::IsMember({16, 64}));
  train->add_flag("--count-units", t.count_units, "Q = cover size + penalty");

  PredictOpts p;
  auto* predict = app.add_subcommand("predict", "Label query points with a saved model");
  predict->add_option("model", p.model, "Model JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("data", p.data, "Queries (.csv or .jsonl); label column ignored")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", p.out, "Predictions CSV (default stdout)");
  predict->add_flag("--with-margin", p.with_margin, "Add the truncated margin column");
  predict->add_option("--eta", p.eta, "Answer through a (1+eta) index")->check(CLI::NonNegativeNumber);
  predict->add_flag("--exact-nn", p.exact_nn, "Force an exact index");

  BoundsOpts b;
  auto* bounds = app.add_subcommand("bounds", "Tabulate generalization bounds over a grid");
  bounds->add_option("--L", b.L, "Lipschitz grid");
  bounds->add_option("--n", b.n, "Sample size grid");
  bounds->add_option("--D", b.D, "Doubling dimension grid");
  bounds->add_option("--k", b.k, "Class count grid");
  bounds->add_option("--delta", b.delta, "Confidence grid");
  bounds->add_option("--eta", b.eta, "ANN slack")->check(CLI::NonNegativeNumber);
  bounds->add_option("--fat-constant", b.fat, "16 (default) or 64")->check(CLI::IsMember({16, 64}));
  bounds->add_option("--out", b.out, "CSV path (default stdout)");

  SimOpts s;
  auto* sim = app.add_subcommand("simulate-bayes", "Monte-Carlo check of the 1-NN risk bound");
  sim->add_option("--domain", s.domain, "interval, square-linf or square-l2");
  sim->add_option("--k", s.k, "Number of classes")->check(CLI::Range(2, 1 << 20));
  sim->add_option("--L-post", s.L_post, "Posterior Lipschitz constant")->check(CLI::PositiveNumber);
  sim->add_option("--cells", s.cells, "Grid cells per axis")->check(CLI::Range(1, 1 << 12));
  sim->add_option("--n", s.n, "Sample size grid");
  sim->add_option("--trials", s.trials, "Trials per sample size")->check(CLI::Range(1, 1 << 24));
  sim->add_option("--test-points", s.test_points, "Test points per trial")->check(CLI::Range(1, 1 << 24));
  sim->add_option("--seed", s.seed, "RNG seed");
  sim->add_option("--out", s.out, "CSV path (default stdout)");

  DimOpts d;
  auto* dim = app.add_subcommand("estimate-dim", "Estimate the doubling dimension of a dataset");
  dim->add_option("data", d.data, "Data (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  dim->add_option("--metric", d.metric, "l1, l2, linf or levenshtein");

  std::vector<const char*> argv{"metric-margin"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (threads > 0) set_default_threads(threads);
    int code = kOk;
    if (*train) code = run_train(t, out);
    else if (*predict) code = run_predict(p, out);
    else if (*bounds) code = run_bounds(b, out);
    else if (*sim) code = run_simulate(s, out, err);
    else if (*dim) code = run_estimate_dim(d, out);
    set_default_threads(0);
    return code;
  } catch (const ValidationError& e) {
    set_default_threads(0);
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    set_default_threads(0);
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mmnn::cli

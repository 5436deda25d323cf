#include "gravicut/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "gravicut/validate.hpp"

namespace gravicut {

namespace {

// Fixed off-center minimizer pattern for the canonical problems.
constexpr double kStarPattern[6] = {0.3, -0.25, 0.15, -0.1, 0.2, -0.05};

Vec canonical_minimizer(int dim) {
  Vec x(dim);
  for (int k = 0; k < dim; ++k) x[k] = kStarPattern[k % 6];
  return x;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

template <typename T, typename Parse>
std::string parse_list(const std::string& value, std::vector<T>& out, Parse parse) {
  std::vector<T> items;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) return "empty list element";
    T item;
    if (!parse(tok, item)) return "bad value '" + tok + "'";
    items.push_back(item);
  }
  if (items.empty()) return "empty list";
  out = std::move(items);
  return "";
}

bool parse_long(const std::string& s, long& out) {
  try {
    std::size_t pos = 0;
    out = std::stol(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoull(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

int worker_count(std::size_t tasks, bool trace) {
  if (trace) return 1;  // keep trace lines in run order
  unsigned hw = std::thread::hardware_concurrency();
  long cap = hw == 0 ? 1 : static_cast<long>(hw);
  if (const char* env = std::getenv("GRAVICUT_THREADS")) {
    long v = 0;
    if (parse_long(env, v) && v >= 1) cap = v;
  }
  return static_cast<int>(std::min<long>(cap, static_cast<long>(tasks) == 0
                                                  ? 1
                                                  : static_cast<long>(tasks)));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) return "cannot open config file: " + path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      return "line " + std::to_string(lineno) + ": expected key=value";
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string err;
    if (key == "objective") cfg.objective = value;
    else if (key == "noise") cfg.noise = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "suite") cfg.suite = value;
    else if (key == "q") { if (!parse_double(value, cfg.q)) err = "bad q"; }
    else if (key == "affine_scale") { if (!parse_double(value, cfg.affine_scale)) err = "bad affine_scale"; }
    else if (key == "noise_width") { if (!parse_double(value, cfg.noise_width)) err = "bad noise_width"; }
    else if (key == "delta") { if (!parse_double(value, cfg.delta)) err = "bad delta"; }
    else if (key == "eta_scale") { if (!parse_double(value, cfg.eta_scale)) err = "bad eta_scale"; }
    else if (key == "master_seed") { if (!parse_u64(value, cfg.master_seed)) err = "bad master_seed"; }
    else if (key == "trace") cfg.trace = (value == "1" || value == "true");
    else if (key == "dim" || key == "dims") {
      err = parse_list<int>(value, cfg.dims, [](const std::string& s, int& v) {
        long l; if (!parse_long(s, l) || l < 1 || l > 1000) return false;
        v = static_cast<int>(l); return true;
      });
    } else if (key == "budget" || key == "budgets") {
      err = parse_list<long>(value, cfg.budgets, [](const std::string& s, long& v) {
        return parse_long(s, v);
      });
    } else if (key == "seeds") {
      err = parse_list<std::uint64_t>(value, cfg.seeds,
                                      [](const std::string& s, std::uint64_t& v) {
                                        return parse_u64(s, v);
                                      });
      // a single value is a seed count: seeds 0 .. n-1
      if (err.empty() && cfg.seeds.size() == 1 && value.find(',') == std::string::npos) {
        std::uint64_t count = cfg.seeds[0];
        if (count == 0) return "line " + std::to_string(lineno) + ": seed count is zero";
        cfg.seeds.clear();
        for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(i);
      }
    } else {
      err = "unknown key '" + key + "'";
    }
    if (!err.empty()) return "line " + std::to_string(lineno) + ": " + err;
  }
  return "";
}

std::string validate_config(const ExperimentConfig& cfg) {
  if (!objective_from_name(cfg.objective))
    return "unknown objective '" + cfg.objective + "'";
  if (!noise_from_name(cfg.noise)) return "unknown noise '" + cfg.noise + "'";
  if (cfg.dims.empty()) return "no dimensions";
  if (cfg.budgets.empty()) return "no budgets";
  if (cfg.seeds.empty()) return "no seeds";
  for (long b : cfg.budgets)
    if (b < 1) return "budgets must be positive";
  for (int d : cfg.dims)
    if (d < 1) return "dimensions must be positive";
  std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
  if (uniq.size() != cfg.seeds.size()) return "seeds must be distinct";
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) return "delta must lie in (0,1)";
  if (cfg.noise == "additive_uniform" &&
      (cfg.noise_width < 0.0 || cfg.noise_width > 0.25))
    return "noise_width must lie in [0, 0.25]";
  return "";
}

ProblemSpec make_default_problem(const ExperimentConfig& cfg, int dim) {
  Box box = Box::cube(dim, -1.0, 1.0);
  Vec x_star = canonical_minimizer(dim);
  auto id = objective_from_name(cfg.objective);
  if (!id) throw std::invalid_argument("unknown objective " + cfg.objective);
  switch (*id) {
    case ObjectiveId::Quadratic: {
      double max_sq = 0.0;
      for (int k = 0; k < dim; ++k) {
        double m = std::max(x_star[k] + 1.0, 1.0 - x_star[k]);
        max_sq += m * m;
      }
      double q = cfg.q > 0.0 ? cfg.q : 0.9 / max_sq;
      return make_quadratic(box, x_star, q);
    }
    case ObjectiveId::MaxAffine: {
      double max_inf = 0.0;
      for (int k = 0; k < dim; ++k)
        max_inf = std::max({max_inf, x_star[k] + 1.0, 1.0 - x_star[k]});
      double f_star = 0.05;
      double s = cfg.affine_scale > 0.0 ? cfg.affine_scale
                                        : (0.9 - f_star) / max_inf;
      return make_max_affine(box, x_star, s, f_star);
    }
    case ObjectiveId::ClippedLinear: {
      // Estimator-only objective; kept constructible for the validate path.
      Vec slope = Vec::Constant(dim, 0.4 / dim);
      return make_clipped_linear(box, Vec::Zero(dim), slope, 0.5);
    }
  }
  throw std::logic_error("unreachable");
}

NoiseModel make_noise(const ExperimentConfig& cfg) {
  auto kind = noise_from_name(cfg.noise);
  if (!kind) throw std::invalid_argument("unknown noise " + cfg.noise);
  switch (*kind) {
    case NoiseModel::Kind::Noiseless: return NoiseModel::noiseless();
    case NoiseModel::Kind::Bernoulli: return NoiseModel::bernoulli();
    case NoiseModel::Kind::AdditiveUniform:
      return NoiseModel::additive_uniform(cfg.noise_width);
  }
  throw std::logic_error("unreachable");
}

std::vector<RunReport> run_experiments(const ExperimentConfig& cfg,
                                       std::vector<std::string>* trace_lines) {
  struct Task {
    int dim;
    long budget;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int dim : cfg.dims)
    for (long budget : cfg.budgets)
      for (std::uint64_t seed : cfg.seeds) tasks.push_back({dim, budget, seed});

  std::vector<RunReport> reports(tasks.size());
  std::vector<std::vector<std::string>> traces(tasks.size());
  const NoiseModel noise = make_noise(cfg);

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      ProblemSpec spec = make_default_problem(cfg, t.dim);
      RngStream rng = RngStream::derive(
          cfg.master_seed,
          {static_cast<std::uint64_t>(t.dim), static_cast<std::uint64_t>(t.budget),
           t.seed});
      DriverOptions opts;
      opts.seed_label = t.seed;
      long fcp_call = 0;
      if (cfg.trace && trace_lines) {
        opts.trace = [&, i](const FcpRoundTrace& tr) {
          if (tr.round == 0) ++fcp_call;
          std::ostringstream os;
          os << "dim=" << t.dim << " budget=" << t.budget << " seed=" << t.seed
             << " fcp_call=" << fcp_call << " round=" << tr.round << " z=";
          for (Eigen::Index k = 0; k < tr.z.size(); ++k)
            os << (k ? "," : "") << format_double(tr.z[k]);
          os << " g_hat=" << format_double(tr.g_hat)
             << " passing=" << tr.passing_candidates;
          traces[i].push_back(os.str());
        };
      }
      DriverResult res = run_driver(spec, noise, t.budget, cfg.delta, rng, opts);
      reports[i] = std::move(res.report);
    }
  };

  int workers = worker_count(tasks.size(), cfg.trace);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  if (trace_lines)
    for (auto& tl : traces)
      for (auto& line : tl) trace_lines->push_back(std::move(line));
  return reports;
}

void write_runs_csv(std::ostream& os, const std::vector<RunReport>& reports) {
  os << "dim,budget,seed,regret,iterations,q_init,q_fcp,q_grad,anomalies,wall_ms\n";
  for (const auto& r : reports) {
    os << r.dim << ',' << r.budget << ',' << r.seed << ','
       << format_double(r.simple_regret) << ',' << r.iterations << ',' << r.q_init
       << ',' << r.q_fcp << ',' << r.q_grad << ',' << r.anomaly_count << ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.wall_ms);
    os << buf << '\n';
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {
double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  double idx = p * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  double frac = idx - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}
}  // namespace

double iqr_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

std::vector<SummaryRow> summarize(const std::vector<RunReport>& reports) {
  std::vector<SummaryRow> rows;
  for (const auto& r : reports) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.dim == r.dim && s.budget == r.budget;
    });
    if (it == rows.end()) rows.push_back({r.dim, r.budget, 0.0, 0.0});
  }
  for (auto& row : rows) {
    std::vector<double> regrets;
    for (const auto& r : reports)
      if (r.dim == row.dim && r.budget == row.budget)
        regrets.push_back(r.simple_regret);
    row.median_regret = median_of(regrets);
    row.iqr = iqr_of(std::move(regrets));
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "dim,budget,median_regret,iqr\n";
  for (const auto& r : rows)
    os << r.dim << ',' << r.budget << ',' << format_double(r.median_regret) << ','
       << format_double(r.iqr) << '\n';
}

std::string render_svg_plot(const std::vector<SummaryRow>& rows) {
  constexpr double kW = 640, kH = 480, kMargin = 60;
  const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b"};

  // Positive values only on log axes; clamp nonpositive medians to half the
  // smallest positive one so degenerate series still render.
  double min_pos = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (r.median_regret > 0.0) min_pos = std::min(min_pos, r.median_regret);
  if (!std::isfinite(min_pos)) min_pos = 1e-6;
  auto clamp_pos = [&](double v) { return v > 0.0 ? v : 0.5 * min_pos; };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = 0.0;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = 0.0;
  for (const auto& r : rows) {
    x_lo = std::min(x_lo, static_cast<double>(r.budget));
    x_hi = std::max(x_hi, static_cast<double>(r.budget));
    double y = clamp_pos(r.median_regret);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  if (rows.empty()) { x_lo = 1; x_hi = 10; y_lo = 1e-3; y_hi = 1; }
  if (x_lo == x_hi) x_hi = x_lo * 10;
  if (y_lo == y_hi) { y_lo *= 0.5; y_hi *= 2.0; }

  auto px = [&](double budget) {
    return kMargin + (std::log10(budget) - std::log10(x_lo)) /
                         (std::log10(x_hi) - std::log10(x_lo)) * (kW - 2 * kMargin);
  };
  auto py = [&](double regret) {
    return kH - kMargin - (std::log10(regret) - std::log10(y_lo)) /
                              (std::log10(y_hi) - std::log10(y_lo)) *
                              (kH - 2 * kMargin);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
     << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
     << kW - kMargin << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
     << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
     << "\" text-anchor=\"middle\" font-size=\"14\">budget (log)</text>\n"
     << "<text x=\"18\" y=\"" << kH / 2
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
     << kH / 2 << ")\">median simple regret (log)</text>\n";

  std::vector<int> dims;
  for (const auto& r : rows)
    if (std::find(dims.begin(), dims.end(), r.dim) == dims.end())
      dims.push_back(r.dim);

  for (std::size_t di = 0; di < dims.size(); ++di) {
    const char* color = kColors[di % 6];
    std::ostringstream pts;
    for (const auto& r : rows)
      if (r.dim == dims[di])
        pts << px(static_cast<double>(r.budget)) << ','
            << py(clamp_pos(r.median_regret)) << ' ';
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    for (const auto& r : rows)
      if (r.dim == dims[di])
        os << "<circle cx=\"" << px(static_cast<double>(r.budget)) << "\" cy=\""
           << py(clamp_pos(r.median_regret)) << "\" r=\"3\" fill=\"" << color
           << "\"/>\n";
    os << "<text x=\"" << kW - kMargin + 6 << "\" y=\"" << kMargin + 18 * di
       << "\" font-size=\"12\" fill=\"" << color << "\">d=" << dims[di]
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

int write_file_or_fail(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return 2;
  out << body;
  out.flush();
  return out ? 0 : 2;
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg) {
  std::string err = validate_config(cfg);
  if (err.empty() && cfg.objective == "linear")
    err = "objective 'linear' has a boundary minimizer and is estimator-only";
  if (!err.empty()) {
    std::cerr << "config error: " << err << "\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);

  std::vector<std::string> trace_lines;
  std::vector<RunReport> reports =
      run_experiments(cfg, cfg.trace ? &trace_lines : nullptr);

  std::ostringstream csv;
  write_runs_csv(csv, reports);
  if (write_file_or_fail(std::filesystem::path(cfg.out_dir) / "runs.csv",
                         csv.str()) != 0) {
    std::cerr << "cannot write to output directory: " << cfg.out_dir << "\n";
    return 2;
  }
  if (cfg.trace) {
    std::ostringstream ts;
    for (const auto& line : trace_lines) ts << line << '\n';
    if (write_file_or_fail(std::filesystem::path(cfg.out_dir) / "trace.txt",
                           ts.str()) != 0)
      return 2;
  }
  std::cout << "wrote " << reports.size() << " runs to " << cfg.out_dir
            << "/runs.csv\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  std::string err = validate_config(cfg);
  if (err.empty() && cfg.objective == "linear")
    err = "objective 'linear' has a boundary minimizer and is estimator-only";
  if (!err.empty()) {
    std::cerr << "config error: " << err << "\n";
    return 2;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);

  std::vector<std::string> trace_lines;
  std::vector<RunReport> reports =
      run_experiments(cfg, cfg.trace ? &trace_lines : nullptr);
  std::vector<SummaryRow> rows = summarize(reports);

  std::ostringstream runs_csv, summary_csv;
  write_runs_csv(runs_csv, reports);
  write_summary_csv(summary_csv, rows);
  std::string svg = render_svg_plot(rows);

  auto dir = std::filesystem::path(cfg.out_dir);
  if (write_file_or_fail(dir / "runs.csv", runs_csv.str()) != 0 ||
      write_file_or_fail(dir / "summary.csv", summary_csv.str()) != 0 ||
      write_file_or_fail(dir / "regret_vs_budget.svg", svg) != 0) {
    std::cerr << "cannot write to output directory: " << cfg.out_dir << "\n";
    return 2;
  }
  if (cfg.trace) {
    std::ostringstream ts;
    for (const auto& line : trace_lines) ts << line << '\n';
    if (write_file_or_fail(dir / "trace.txt", ts.str()) != 0) return 2;
  }
  std::cout << "wrote " << reports.size() << " runs, " << rows.size()
            << " summary rows to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg) {
  std::vector<PropertyResult> results;
  try {
    results = run_validation_suite(cfg.suite, cfg.eta_scale, cfg.master_seed);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.details
              << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace gravicut

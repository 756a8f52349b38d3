#include "opnav/cli/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "opnav/analytics/comparison.hpp"
#include "opnav/assistant/assistant.hpp"
#include "opnav/config/toml.hpp"
#include "opnav/error.hpp"
#include "opnav/knowledge/corpus.hpp"
#include "opnav/search/index.hpp"
#include "opnav/service/json_codec.hpp"
#include "opnav/service/service.hpp"
#include "opnav/sim/reference.hpp"

#ifndef OPNAV_DEFAULT_DATA_DIR
#define OPNAV_DEFAULT_DATA_DIR "data"
#endif

namespace opnav::cli {

namespace fs = std::filesystem;
using codec::fixed;
using codec::Json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  f << content;
  if (!f.flush()) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// Integral values print without decimals, midrank halves with one.
std::string rank_text(double v) { return v == std::floor(v) ? fixed(v, 0) : fixed(v, 1); }

std::string mwu_line(int level, const stats::MwuResult& r) {
  std::ostringstream s;
  s << "level=" << level << " r1=" << rank_text(r.r1) << " r2=" << rank_text(r.r2) << " u=" << rank_text(r.u)
    << " critical_u=" << (r.critical_u ? std::to_string(*r.critical_u) : std::string("none")) << " z=" << fixed(r.z, 6)
    << " p=" << fixed(r.p_two_tailed, 6) << ' ' << (r.reject ? "REJECT" : "RETAIN");
  return s.str();
}

std::string curve_csv(const std::vector<int>& levels, const analytics::GroupSummary& g) {
  std::ostringstream s;
  s << "x,mean_y,fitted_y,learning_rate_pct\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    s << levels[i] << ',' << fixed(g.level_means[i], 4) << ',' << fixed(learning::predict(g.fit, levels[i]), 4) << ',';
    if (i > 0) s << fixed(g.doubling.rates[i - 1] * 100.0, 2);
    s << '\n';
  }
  return s.str();
}

std::string comparison_csv(const analytics::ComparisonReport& r) {
  std::ostringstream s;
  s << "x,mean_y_a,mean_y_b,marginal_difference\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    s << r.levels[i] << ',' << fixed(r.group_a.level_means[i], 4) << ',' << fixed(r.group_b.level_means[i], 4) << ','
      << fixed(r.marginal_differences[i], 4) << '\n';
  }
  return s.str();
}

std::string rates_csv(const analytics::ComparisonReport& r) {
  std::ostringstream s;
  s << "from_x,to_x,rate_a_pct,rate_b_pct\n";
  for (std::size_t i = 0; i + 1 < r.levels.size(); ++i) {
    s << r.levels[i] << ',' << r.levels[i + 1] << ',' << fixed(r.group_a.doubling.rates[i] * 100.0, 2) << ','
      << fixed(r.group_b.doubling.rates[i] * 100.0, 2) << '\n';
  }
  s << "mean,," << fixed(r.group_a.doubling.mean_rate * 100.0, 2) << ','
    << fixed(r.group_b.doubling.mean_rate * 100.0, 2) << '\n';
  return s.str();
}

std::string scatter_csv(const analytics::ComparisonReport& r, const analytics::OperatorDataset& a,
                        const analytics::OperatorDataset& b) {
  std::ostringstream s;
  s << "level,group,operator,value\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    for (std::size_t o = 0; o < r.values_a[i].size(); ++o) {
      s << r.levels[i] << ",a," << a.operator_ids[o] << ',' << fixed(r.values_a[i][o], 4) << '\n';
    }
    for (std::size_t o = 0; o < r.values_b[i].size(); ++o) {
      s << r.levels[i] << ",b," << b.operator_ids[o] << ',' << fixed(r.values_b[i][o], 4) << '\n';
    }
  }
  return s.str();
}

std::string learning_table_csv(const analytics::GroupSummary& g, const std::vector<int>& levels) {
  auto rates = g.doubling.rates_display();
  std::ostringstream s;
  s << "x,cumulative_average_min,learning_rate_pct\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    s << levels[i] << ',' << fixed(g.level_means[i], 2) << ',';
    if (i > 0) s << rates[i - 1];
    s << '\n';
  }
  s << "estimated,," << g.doubling.mean_rate_display() << '\n';
  return s.str();
}

std::string significance_table_csv(const analytics::ComparisonReport& r) {
  std::ostringstream s;
  s << "level,rank_sum_group_1,rank_sum_group_2,u,critical_u,z,p,decision\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& t = r.tests[i];
    s << r.levels[i] << ',' << rank_text(t.r1) << ',' << rank_text(t.r2) << ',' << rank_text(t.u) << ','
      << (t.critical_u ? std::to_string(*t.critical_u) : std::string("none")) << ',' << fixed(t.z, 6) << ','
      << fixed(t.p_two_tailed, 6) << ',' << (t.reject ? "reject" : "retain") << '\n';
  }
  return s.str();
}

sim::NoiseModel parse_noise_model(const std::string& s) {
  if (s == "truncated_gaussian") return sim::NoiseModel::truncated_gaussian;
  if (s == "lognormal") return sim::NoiseModel::lognormal;
  throw Error(ErrorCode::ConfigError, "noise_model must be truncated_gaussian or lognormal, got '" + s + "'");
}

sim::CurveTarget parse_curve_target(const std::string& s) {
  if (s == "cumulative_average") return sim::CurveTarget::cumulative_average;
  if (s == "unit_time") return sim::CurveTarget::unit_time;
  throw Error(ErrorCode::ConfigError, "curve_target must be cumulative_average or unit_time, got '" + s + "'");
}

// --- subcommands ---

int cmd_index(const std::string& corpus_path, const std::string& cache_path, std::ostream& out, std::ostream& err) {
  auto tree = load_corpus(corpus_path);
  auto violations = validate(tree);
  if (!violations.empty()) {
    for (const auto& v : violations) err << v.rule << ' ' << v.node_id << ": " << v.detail << '\n';
    return kExitValidation;
  }
  auto index = build_index(tree);
  if (!cache_path.empty()) save_index_cache(index, cache_path);
  Json j;
  j["corpus_version"] = tree.version();
  j["nodes"] = tree.size();
  j["depth"] = tree.depth();
  j["terms"] = index.postings.size();
  j["avg_doc_len"] = index.avg_doc_len;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_ask(const std::string& corpus_path, const std::string& question, const std::string& synonyms_path,
            std::size_t threshold, std::ostream& out) {
  bool blank = true;
  for (unsigned char c : question) blank = blank && std::isspace(c);
  if (blank) throw UsageError("ask: the question must not be empty");
  auto tree = load_corpus(corpus_path);
  auto violations = validate(tree);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::MalformedMarkup, "corpus invalid: " + v.rule + " at '" + v.node_id + "'");
  }
  SynonymTable synonyms;
  if (!synonyms_path.empty()) synonyms = load_synonyms(synonyms_path);
  Tokenizer tokenizer;
  auto index = build_index(tree, kDefaultKeywordBoost, tokenizer);
  AssistantConfig config;
  config.refinement_threshold = threshold;
  SessionState session;
  session.session_id = "cli";
  auto [answer, next] = answer_question(session, question, {tree, index, synonyms, tokenizer}, config, 0);
  out << codec::to_json(answer).dump(2) << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& config_path, std::ostream& err) {
  auto config = service::load_service_config(config_path);
  service::AssistantService svc(config);
  int port = svc.start();
  err << "listening on " << config.listen_address << ':' << port << '\n' << std::flush;
  g_stop = false;
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  svc.stop();
  return kExitOk;
}

int cmd_learning(const std::vector<std::string>& csvs, const std::string& out_dir, std::ostream& out) {
  const auto levels = analytics::default_levels();
  const fs::path dir(out_dir);
  if (csvs.size() == 1) {
    auto data = analytics::load_operator_csv(csvs[0]);
    auto summary = analytics::summarize_group(data.minutes, levels);
    write_file(dir / "curve_a.csv", curve_csv(levels, summary));
    out << codec::learning_summary(data, levels).dump(2) << '\n';
    return kExitOk;
  }
  auto a = analytics::load_operator_csv(csvs[0]);
  auto b = analytics::load_operator_csv(csvs[1]);
  auto report = analytics::compare_groups(a.minutes, b.minutes, levels, 0.05);
  write_file(dir / "curve_a.csv", curve_csv(levels, report.group_a));
  write_file(dir / "curve_b.csv", curve_csv(levels, report.group_b));
  write_file(dir / "comparison.csv", comparison_csv(report));
  write_file(dir / "rates.csv", rates_csv(report));
  out << codec::to_json(report).dump(2) << '\n';
  return kExitOk;
}

int cmd_mwu(const std::string& path_a, const std::string& path_b, double alpha, const std::string& method_name,
            const std::string& out_dir, std::ostream& out) {
  auto method = stats::parse_mwu_method(method_name);
  if (!method) throw UsageError("--method must be normal or exact");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  auto a = analytics::load_operator_csv(path_a);
  auto b = analytics::load_operator_csv(path_b);
  auto report = analytics::compare_groups(a.minutes, b.minutes, analytics::default_levels(), alpha, *method);
  const fs::path dir(out_dir);
  write_file(dir / "scatter.csv", scatter_csv(report, a, b));
  write_file(dir / "summary.json", codec::to_json(report).dump(2) + "\n");
  for (std::size_t i = 0; i < report.levels.size(); ++i) out << mwu_line(report.levels[i], report.tests[i]) << '\n';
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, bool reference,
                 const std::string& out_dir, std::ostream& out) {
  const fs::path dir(out_dir);
  if (reference) {
    sim::ReferenceOptions options;
    if (seed) options.first_seed = *seed;
    auto ref = sim::build_reference_cohort(options);
    write_file(dir / "traditional.csv", analytics::format_operator_csv(ref.traditional, options.decimals));
    write_file(dir / "assisted.csv", analytics::format_operator_csv(ref.assisted, options.decimals));
    Json meta;
    meta["format_version"] = 1;
    meta["rng"] = sim::kRngId;
    meta["seed"] = ref.seed;
    meta["noise_cv"] = options.noise_cv;
    meta["operators_per_group"] = options.operators_per_group;
    meta["batches"] = options.batches;
    meta["decimals"] = options.decimals;
    meta["construction"] = "simulate, shift each doubling segment to the target group means, round, keep the "
                           "first seed whose per-level rank sums match";
    write_file(dir / "reference.json", meta.dump(2) + "\n");
    out << (dir / "traditional.csv").string() << '\n' << (dir / "assisted.csv").string() << '\n'
        << (dir / "reference.json").string() << '\n';
    return kExitOk;
  }
  auto config = config_path.empty() ? sim::default_cohort_config(0) : load_cohort_config(config_path);
  if (seed) config.seed = *seed;
  auto dataset = sim::simulate_cohort(config);
  for (const auto& g : dataset.groups) {
    write_file(dir / (g.name + ".csv"), analytics::format_operator_csv(g.data));
    out << (dir / (g.name + ".csv")).string() << '\n';
  }
  write_file(dir / "cohort.json", sim::cohort_metadata_json(config, dataset));
  out << (dir / "cohort.json").string() << '\n';
  return kExitOk;
}

int cmd_report(const std::string& data_dir, const std::string& out_dir, std::ostream& out) {
  const fs::path data(data_dir);
  auto a = analytics::load_operator_csv((data / "reference" / "traditional.csv").string());
  auto b = analytics::load_operator_csv((data / "reference" / "assisted.csv").string());
  auto report = analytics::compare_groups(a.minutes, b.minutes, analytics::default_levels(), 0.05);
  const fs::path dir(out_dir);
  const std::vector<std::pair<std::string, std::string>> files{
      {"learning_rates_traditional.csv", learning_table_csv(report.group_a, report.levels)},
      {"learning_rates_assisted.csv", learning_table_csv(report.group_b, report.levels)},
      {"significance_tests.csv", significance_table_csv(report)},
  };
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    out << (dir / name).string() << '\n';
  }
  return kExitOk;
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("OPNAV_DATA_DIR"); env && *env) return env;
  return OPNAV_DEFAULT_DATA_DIR;
}

sim::CohortConfig cohort_config_from_json(const nlohmann::json& j) {
  try {
    sim::CohortConfig c;
    c.seed = j.value("seed", std::uint64_t{0});
    c.operators_per_group = j.value("operators_per_group", c.operators_per_group);
    c.batches = j.value("batches", c.batches);
    c.noise.cv = j.value("noise_cv", c.noise.cv);
    c.noise.model = parse_noise_model(j.value("noise_model", std::string("truncated_gaussian")));
    c.noise.target = parse_curve_target(j.value("curve_target", std::string("cumulative_average")));
    if (!j.contains("group")) {
      c.groups = sim::default_cohort_config(c.seed).groups;
      return c;
    }
    for (const auto& g : j.at("group")) {
      sim::GroupSpec spec;
      spec.name = g.at("name").get<std::string>();
      if (g.contains("means")) {
        auto means = g.at("means").get<std::vector<double>>();
        if (means.size() != 7) throw Error(ErrorCode::ConfigError, "group '" + spec.name + "': means needs 7 values");
        spec.curve = sim::reference_curve(std::span<const double, 7>(means.data(), 7));
      } else {
        spec.curve.b0 = g.at("b0").get<double>();
        spec.curve.b1 = g.at("b1").get<double>();
        spec.curve.b2 = g.at("b2").get<double>();
        if (spec.curve.b0 < 0 || spec.curve.b1 < 0 || spec.curve.b2 < 0) {
          throw Error(ErrorCode::ConfigError, "group '" + spec.name + "': curve parameters must be >= 0");
        }
      }
      c.groups.push_back(std::move(spec));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("cohort config: ") + e.what());
  }
}

sim::CohortConfig load_cohort_config(const std::string& path) { return cohort_config_from_json(config::load_toml(path)); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator knowledge assistant and learning-curve analytics", "opnav"};
  app.require_subcommand(1);

  std::string corpus, question, synonyms, cache, config_path, out_dir = ".", data_dir = default_data_dir();
  std::string csv_b, method = "normal";
  std::vector<std::string> csvs;
  std::size_t threshold = kDefaultRefinementThreshold;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  bool reference = false, paper_tables = false;

  auto* index = app.add_subcommand("index", "Validate a corpus, build its index and print statistics");
  index->add_option("corpus", corpus, "Corpus XML file")->required();
  index->add_option("--cache", cache, "Write the binary index cache here");

  auto* ask = app.add_subcommand("ask", "Answer one question as JSON");
  ask->add_option("corpus", corpus, "Corpus XML file")->required();
  ask->add_option("question", question, "Question text")->required();
  ask->add_option("--synonyms", synonyms, "Synonym file");
  ask->add_option("--threshold", threshold, "Refinement threshold")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "Service TOML config")->required();

  auto* analyze = app.add_subcommand("analyze", "Learning-curve and significance analytics");
  analyze->require_subcommand(1);
  auto* learning = analyze->add_subcommand("learning", "Doubling rates, curve fit and series CSVs");
  learning->add_option("csv", csvs, "One or two operator CSV files")->required()->expected(1, 2);
  learning->add_option("--out-dir", out_dir, "Directory for series CSVs");
  auto* mwu = analyze->add_subcommand("mwu", "Per-level Mann-Whitney tests and scatter CSV");
  mwu->add_option("csv_a", corpus, "Reference group CSV")->required();
  mwu->add_option("csv_b", csv_b, "Comparison group CSV")->required();
  mwu->add_option("--alpha", alpha, "Two-tailed significance level");
  mwu->add_option("--method", method, "normal or exact");
  mwu->add_option("--out-dir", out_dir, "Directory for scatter.csv and summary.json");

  auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic cohort");
  simulate->add_option("--config", config_path, "Cohort TOML config");
  simulate->add_option("--seed", seed, "Seed (overrides the config)");
  simulate->add_option("--out-dir", out_dir, "Output directory");
  simulate->add_flag("--reference", reference, "Rebuild the bundled reference datasets");

  auto* report = app.add_subcommand("report", "Regenerate the golden tables from the bundled datasets");
  report->add_flag("--paper-tables", paper_tables, "Learning-rate and significance tables")->required();
  report->add_option("--data-dir", data_dir, "Bundled data directory");
  report->add_option("--out-dir", out_dir, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) {
      failed = sub;
      for (auto* nested : sub->get_subcommands()) failed = nested;
    }
    err << failed->help();
    return kExitUsage;
  }

  try {
    if (index->parsed()) return cmd_index(corpus, cache, out, err);
    if (ask->parsed()) return cmd_ask(corpus, question, synonyms, threshold, out);
    if (serve->parsed()) return cmd_serve(config_path, err);
    if (learning->parsed()) return cmd_learning(csvs, out_dir, out);
    if (mwu->parsed()) return cmd_mwu(corpus, csv_b, alpha, method, out_dir, out);
    if (simulate->parsed()) return cmd_simulate(config_path, seed, reference, out_dir, out);
    if (report->parsed()) return cmd_report(data_dir, out_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    for (auto* sub : app.get_subcommands()) {
      const CLI::App* shown = sub;
      for (auto* nested : sub->get_subcommands()) shown = nested;
      err << shown->help();
    }
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace opnav::cli

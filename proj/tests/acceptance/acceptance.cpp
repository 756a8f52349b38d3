// Acceptance checks, one verdict line per criterion.
// Usage: acceptance [criterion]   (no argument runs every criterion)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "opnav/analytics/comparison.hpp"
#include "opnav/analytics/learning_curve.hpp"
#include "opnav/analytics/mann_whitney.hpp"
#include "opnav/assistant/session.hpp"
#include "opnav/error.hpp"
#include "opnav/knowledge/corpus.hpp"
#include "opnav/search/index.hpp"
#include "opnav/sim/cohort.hpp"
#include "opnav/sim/reference.hpp"

using namespace opnav;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- learning rates

Verdict rates_check(const std::array<double, 7>& means, const std::vector<double>& expected_pct, double expected_mean) {
  auto d = learning::doubling_rates(means);
  bool ok = d.rates.size() == expected_pct.size();
  std::string detail = "rates";
  for (std::size_t i = 0; ok && i < expected_pct.size(); ++i) {
    // independent recomputation of the ratio, then the reference figure
    const double ratio = means[i + 1] / means[i];
    ok = ok && std::abs(d.rates[i] - ratio) < 1e-15 && std::abs(100 * d.rates[i] - expected_pct[i]) <= 0.05;
    detail += " " + fmt("%.2f", 100 * d.rates[i]);
  }
  double mean = 0;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) mean += means[i + 1] / means[i];
  mean /= double(means.size() - 1);
  ok = ok && std::abs(d.mean_rate - mean) < 1e-15 && std::abs(100 * d.mean_rate - expected_mean) <= 0.005;
  detail += "; mean " + fmt("%.4f", 100 * d.mean_rate) + "% (decrease " + fmt("%.2f", 100 - 100 * d.mean_rate) + "%)";
  return {ok, detail};
}

Verdict learning_rates_traditional() {
  return rates_check(sim::kTraditionalMeans, {97.0, 95.1, 92.1, 90.3, 88.7, 87.9}, 91.85);
}

Verdict learning_rates_assisted() {
  auto v = rates_check(sim::kAssistedMeans, {93.4, 91.5, 90.4, 88.9, 87.6, 87.1}, 89.82);
  const double decrease = 100 - 100 * learning::doubling_rates(sim::kAssistedMeans).mean_rate;
  v.pass = v.pass && std::abs(decrease - 10.18) <= 0.005;
  return v;
}

// ---------------------------------------------------------------- significance

std::vector<std::uint64_t> enumerate_u(int n1, int n2) {
  const int n = n1 + n2;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n1 * n2) + 1, 0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != n1) continue;
    int rank_sum = 0;
    for (int i = 0; i < n; ++i) if (mask & (1u << i)) rank_sum += i + 1;
    ++counts[static_cast<std::size_t>(rank_sum - n1 * (n1 + 1) / 2)];
  }
  return counts;
}

Verdict significance_tables() {
  bool ok = true;
  std::string detail;
  const double rank_sums[7] = {152, 155, 155, 155, 155, 155, 155};
  for (int level = 0; level < 7; ++level) {
    const double r1 = rank_sums[level], r2 = 210 - r1;
    auto r = stats::mann_whitney_from_rank_sums(10, 10, r1, r2, 0.05);
    const bool first = level == 0;
    const double u = first ? 3 : 0, z = first ? 3.552866 : 3.779645, p = first ? 0.000381 : 0.000157;
    ok = ok && r.u == u && std::abs(r.z - z) <= 1e-6 && std::abs(r.p_two_tailed - p) <= 2e-6 && r.reject &&
         r.critical_u == 23;
    if (level < 2) {
      detail += "(" + fmt("%.0f", r1) + "," + fmt("%.0f", r2) + ") U=" + fmt("%.0f", r.u) + " Z=" + fmt("%.6f", r.z) +
                " p=" + fmt("%.6f", r.p_two_tailed) + (r.reject ? " reject; " : " retain; ");
    }
  }
  // critical value by exhaustive enumeration of all C(20,10) rank subsets
  auto counts = enumerate_u(10, 10);
  std::uint64_t total = 0, acc = 0;
  for (auto c : counts) total += c;
  int brute = -1;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    acc += counts[u];
    if (double(acc) / double(total) <= 0.025) brute = int(u); else break;
  }
  const auto dp = stats::critical_u(10, 10, 0.05);
  ok = ok && dp == 23 && brute == 23 && stats::exact_u_counts(10, 10) == counts;
  detail += "critical_u dp=" + std::to_string(dp.value_or(-1)) + " enumeration=" + std::to_string(brute);

  // the bundled reference cohort reproduces the same table end to end
  auto a = analytics::load_operator_csv(std::string(OPNAV_DATA_DIR) + "/reference/traditional.csv");
  auto b = analytics::load_operator_csv(std::string(OPNAV_DATA_DIR) + "/reference/assisted.csv");
  auto report = analytics::compare_groups(a.minutes, b.minutes, analytics::default_levels(), 0.05);
  for (std::size_t i = 0; i < report.tests.size(); ++i) ok = ok && report.tests[i].r1 == rank_sums[i] && report.tests[i].reject;
  return {ok, detail};
}

// ---------------------------------------------------------------- exact oracle

Verdict exact_oracle() {
  std::mt19937_64 rng(20240611);
  std::map<std::pair<int, int>, std::vector<std::uint64_t>> memo;
  int cases = 0, mismatches = 0;
  for (; cases < 500; ++cases) {
    const int n1 = 1 + int(rng() % 6), n2 = 1 + int(rng() % 6);
    std::set<double> seen;
    std::uniform_real_distribution<double> dist(-50, 50);
    auto draw = [&](int n) {
      std::vector<double> v;
      while (int(v.size()) < n) {
        double x = dist(rng);
        if (seen.insert(x).second) v.push_back(x);
      }
      return v;
    };
    auto a = draw(n1), b = draw(n2);
    auto r = stats::mann_whitney(a, b, 0.05, stats::MwuMethod::exact);
    // U from pairwise comparisons, independent of ranking
    int ua = 0;
    for (double x : a) for (double y : b) ua += x > y;
    const int u = std::min(ua, n1 * n2 - ua);
    auto& counts = memo[{n1, n2}];
    if (counts.empty()) counts = enumerate_u(n1, n2);
    std::uint64_t below = 0, total = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      total += counts[k];
      if (int(k) <= u) below += counts[k];
    }
    const double p = std::min(1.0, 2.0 * (double(below) / double(total)));
    if (r.u != u || r.p_two_tailed != p) ++mismatches;
  }
  return {mismatches == 0, std::to_string(cases) + " random tie-free cases, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------- fit recovery

Verdict fit_recovery() {
  std::vector<learning::CurvePoint> pts;
  for (int x : learning::kDoublingLevels) pts.push_back({double(x), 10 + 20 * std::pow(double(x), -0.5)});
  auto fit = learning::fit_towill(pts);
  bool ok = std::abs(fit.b0 - 10) <= 1e-3 && std::abs(fit.b1 - 20) <= 1e-3 && std::abs(fit.b2 - 0.5) <= 1e-3 &&
            fit.sse < 1e-8;
  std::string detail = "fit (" + fmt("%.6f", fit.b0) + ", " + fmt("%.6f", fit.b1) + ", " + fmt("%.6f", fit.b2) +
                       ") sse " + fmt("%.2e", fit.sse);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d0(0, 30), d1(0.1, 40), d2(0.05, 2);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double b[3] = {d0(rng), d1(rng), d2(rng)};
    std::vector<double> r, jac, rp, rm, scratch;
    learning::residuals_and_jacobian(pts, b[0], b[1], b[2], r, jac);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(b[k]));
      double up[3] = {b[0], b[1], b[2]}, dn[3] = {b[0], b[1], b[2]};
      up[k] += h;
      dn[k] -= h;
      learning::residuals_and_jacobian(pts, up[0], up[1], up[2], rp, scratch);
      learning::residuals_and_jacobian(pts, dn[0], dn[1], dn[2], rm, scratch);
      for (std::size_t row = 0; row < pts.size(); ++row) {
        const double fd = (rp[row] - rm[row]) / (2 * h), an = jac[row * 3 + std::size_t(k)];
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    }
  }
  ok = ok && worst <= 1e-6;
  detail += "; jacobian worst relative gap " + fmt("%.2e", worst) + " over 100 points";
  return {ok, detail};
}

// ---------------------------------------------------------------- simulation study

Verdict simulation_study() {
  const auto start = std::chrono::steady_clock::now();
  const int seeds = 100;
  int all_levels = 0;
  double rate_a = 0, rate_b = 0;
  std::vector<int> per_level(7, 0);
  for (int s = 1; s <= seeds; ++s) {
    auto config = sim::default_cohort_config(std::uint64_t(s));
    auto data = sim::simulate_cohort(config);
    auto report = analytics::compare_groups(data.group("traditional")->data.minutes,
                                            data.group("assisted")->data.minutes, analytics::default_levels(), 0.05);
    bool every = true;
    for (std::size_t i = 0; i < report.tests.size(); ++i) {
      per_level[i] += report.tests[i].reject;
      every = every && report.tests[i].reject;
    }
    all_levels += every;
    rate_a += report.group_a.doubling.mean_rate;
    rate_b += report.group_b.doubling.mean_rate;
  }
  rate_a /= seeds;
  rate_b /= seeds;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double freq = double(all_levels) / seeds;
  const bool rates_ok = std::abs(rate_a - 0.9185) <= 0.02 && std::abs(rate_b - 0.8982) <= 0.02;
  std::string detail = "all-level rejection in " + std::to_string(all_levels) + "/" + std::to_string(seeds) +
                       " seeds (need >= 90); per level";
  for (int c : per_level) detail += " " + std::to_string(c);
  detail += "; mean rates " + fmt("%.2f", 100 * rate_a) + "% / " + fmt("%.2f", 100 * rate_b) + "%; " +
            fmt("%.1f", secs) + " s";
  return {freq >= 0.9 && rates_ok && secs < 60, detail};
}

// ---------------------------------------------------------------- search

ContentTree flat(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<ContentNode> nodes(1);
  nodes[0].id = "root";
  for (const auto& [id, body] : docs) {
    ContentNode n;
    n.id = id;
    n.title = id;
    n.body = body;
    n.parent = "root";
    nodes[0].children.push_back(id);
    nodes.push_back(n);
  }
  return ContentTree::from_nodes("root", nodes);
}

Verdict search_properties() {
  const Tokenizer plain(std::set<std::string>{});
  int det_fail = 0, dom_fail = 0, thr_fail = 0;
  std::mt19937_64 rng(4242);

  auto corpus = load_corpus(std::string(OPNAV_DATA_DIR) + "/corpus/cnc_milling.xml");
  auto index = build_index(corpus);
  auto again = build_index(corpus);
  det_fail += !(index == again);
  std::vector<std::string> terms;
  for (const auto& [t, p] : index.postings) terms.push_back(t);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> q;
    for (int k = 0, n = 1 + int(rng() % 4); k < n; ++k) q.push_back(terms[rng() % terms.size()]);
    auto a = search(index, q, 10), b = search(again, q, 10);
    det_fail += !(a == b);
  }

  const std::vector<std::string> query{"q0", "q1", "q2", "q3"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::pair<std::string, std::string>> docs;
    std::vector<std::set<std::string>> has(4);
    for (int d = 0; d < 4; ++d) {
      std::string body;
      int used = 0;
      for (const auto& q : query) {
        if (rng() % 2) {
          has[std::size_t(d)].insert(q);
          body += q + " ";
          ++used;
        }
      }
      for (; used < 6; ++used) body += "f" + std::to_string(rng() % 40) + " ";
      docs.push_back({"d" + std::to_string(d), body});
    }
    auto idx = build_index(flat(docs), 3.0, plain);
    std::map<std::string, double> score;
    for (const auto& h : search(idx, query, 100)) score[h.node_id] = h.score;
    for (int x = 0; x < 4; ++x) {
      for (int y = 0; y < 4; ++y) {
        const auto& hx = has[std::size_t(x)];
        const auto& hy = has[std::size_t(y)];
        if (x != y && std::includes(hx.begin(), hx.end(), hy.begin(), hy.end()) &&
            score["d" + std::to_string(x)] < score["d" + std::to_string(y)] - 1e-12) {
          ++dom_fail;
        }
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 40; ++i) docs.push_back({"n" + std::to_string(i), "common w" + std::to_string(i % 7)});
  auto idx = build_index(flat(docs), 3.0, plain);
  auto all = search(idx, {"common"}, 1000);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = rng() % (all.size() + 1), threshold = 1 + rng() % 40;
    std::vector<SearchHit> hits(all.begin(), all.begin() + long(n));
    thr_fail += suggest_refinement(hits, idx, threshold).has_value() != (n > threshold);
  }
  return {det_fail + dom_fail + thr_fail == 0,
          "1000 cases each; failures: determinism " + std::to_string(det_fail) + ", dominance " +
              std::to_string(dom_fail) + ", threshold " + std::to_string(thr_fail)};
}

// ---------------------------------------------------------------- session FSM

Verdict session_fsm() {
  using P = SessionPhase;
  using E = EventKind;
  const std::map<std::pair<P, E>, P> table{
      {{P::Idle, E::AskQuestion}, P::QuestionPending},
      {{P::QuestionPending, E::AnswerReady}, P::AnswerDelivered},
      {{P::AnswerDelivered, E::OpenContent}, P::ContentViewing},
      {{P::AnswerDelivered, E::FollowSuggestion}, P::ContentViewing},
      {{P::AnswerDelivered, E::TypeKeywords}, P::ManualSearch},
      {{P::ContentViewing, E::Back}, P::AnswerDelivered},
      {{P::ContentViewing, E::AskQuestion}, P::QuestionPending},
      {{P::ManualSearch, E::AnswerReady}, P::AnswerDelivered},
  };
  int cells = 0, bad = 0;
  for (auto phase : kAllPhases) {
    for (auto kind : kAllEventKinds) {
      ++cells;
      std::optional<P> expected;
      if (kind == E::EndSession) {
        expected = P::Ended;
      } else if (phase != P::Ended) {
        if (auto it = table.find({phase, kind}); it != table.end()) expected = it->second;
      }
      SessionState s{"s", phase, {}, {}};
      InteractionEvent ev{0, "s", kind, "n"};
      try {
        auto next = transition(s, ev);
        bad += !expected || next.phase != *expected;
      } catch (const Error& e) {
        bad += expected.has_value() || e.code() != ErrorCode::IllegalTransition;
      }
    }
  }
  // absorbing: nothing leaves Ended
  bool absorbing = true;
  for (auto kind : kAllEventKinds) {
    auto n = next_phase(P::Ended, kind);
    absorbing = absorbing && (!n || *n == P::Ended);
  }
  return {bad == 0 && absorbing, std::to_string(cells) + " cells, " + std::to_string(bad) + " mismatches, Ended " +
                                     (absorbing ? "absorbing" : "NOT absorbing")};
}

// ---------------------------------------------------------------- corpus round-trip

ContentTree random_tree(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{"spindle", "a&b",  "<tag>", "\"q\"", "it's", "ție", "Ölstand", "压力",
                                               "x > y",   "50%",  "tab\t", "line\nbreak", "]]>", "&amp;", "  padded "};
  auto pick = [&](std::size_t n) { return std::size_t(rng() % n); };
  auto text = [&](std::size_t words) {
    std::string s;
    for (std::size_t i = 0; i < words; ++i) s += (i ? " " : "") + pieces[pick(pieces.size())];
    return s;
  };
  const std::size_t count = 1 + pick(30);
  std::vector<ContentNode> nodes(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& n = nodes[i];
    n.id = "n" + std::to_string(i);
    n.title = text(1 + pick(3));
    n.node_type = static_cast<NodeType>(pick(8));
    if (pick(4)) n.body = text(1 + pick(10));
    for (std::size_t k = pick(4); k > 0; --k) n.keywords.insert(pieces[pick(pieces.size())]);
    if (pick(5) == 0) n.media_refs.push_back("media/" + std::to_string(i) + ".png");
    if (i > 0) {
      const auto parent = pick(i);
      n.parent = nodes[parent].id;
      nodes[parent].children.push_back(n.id);
    }
  }
  for (std::size_t i = 0; i < count; ++i) if (pick(3) == 0) nodes[i].related.push_back(nodes[pick(count)].id);
  return ContentTree::from_nodes("n0", std::move(nodes), 1 + pick(100));
}

Verdict corpus_roundtrip() {
  auto bundled = load_corpus(std::string(OPNAV_DATA_DIR) + "/corpus/cnc_milling.xml");
  const auto text = serialize_corpus(bundled);
  bool ok = parse_corpus(text) == bundled && serialize_corpus(parse_corpus(text)) == text;
  std::mt19937_64 rng(500);
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    auto tree = random_tree(rng);
    try {
      failures += !(parse_corpus(serialize_corpus(tree)) == tree);
    } catch (const Error&) {
      ++failures;
    }
  }
  return {ok && failures == 0, "bundled corpus (" + std::to_string(bundled.size()) + " nodes) " +
                                   (ok ? "identical" : "DIFFERS") + "; 500 random trees, " +
                                   std::to_string(failures) + " failures"};
}

// ----------------------------------------------------------------

using Check = std::function<Verdict()>;

const std::vector<std::pair<std::string, Check>>& criteria();

Verdict primary_only() {
  // Every other criterion reaches a verdict using only the primary libraries
  // this binary links; no console assets or secondary build outputs involved.
  int ran = 0;
  std::string failed;
  for (const auto& [name, check] : criteria()) {
    if (name == "primary_only") continue;
    try {
      check();
      ++ran;
    } catch (const std::exception& e) {
      failed += " " + name + "(" + e.what() + ")";
    }
  }
  return {failed.empty(), std::to_string(ran) + " criteria executed without the console" +
                              (failed.empty() ? "" : "; aborted:" + failed)};
}

const std::vector<std::pair<std::string, Check>>& criteria() {
  static const std::vector<std::pair<std::string, Check>> list{
      {"learning_rates_traditional", learning_rates_traditional},
      {"learning_rates_assisted", learning_rates_assisted},
      {"significance_tables", significance_tables},
      {"exact_oracle", exact_oracle},
      {"fit_recovery", fit_recovery},
      {"simulation_study", simulation_study},
      {"search_properties", search_properties},
      {"session_fsm", session_fsm},
      {"corpus_roundtrip", corpus_roundtrip},
      {"primary_only", primary_only},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  bool any = false, all_pass = true;
  for (const auto& [name, check] : criteria()) {
    if (!only.empty() && name != only) continue;
    any = true;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    all_pass = all_pass && v.pass;
  }
  if (!any) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}

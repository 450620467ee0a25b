// Tests for the verification suite: configuration handling, deterministic
// sampling, the correction-retry ladder, verdict semantics, and report
// serialization.

#include "warpcheck/verify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace warpcheck {
namespace {

TEST(VerifyTest, SamplePointsAreDeterministicAndStayInsideTheShrunkBox) {
  const std::vector<std::pair<double, double>> box{{-1.0, 1.0}, {2.0, 6.0}};
  const std::vector<Vec> a = sample_points(box, 50, 42);
  const std::vector<Vec> b = sample_points(box, 50, 42);
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a, b);
  for (const Vec& p : a) {
    ASSERT_EQ(p.size(), 2u);
    EXPECT_GE(p[0], -1.0 + 0.01 * 2.0);
    EXPECT_LE(p[0], 1.0 - 0.01 * 2.0);
    EXPECT_GE(p[1], 2.0 + 0.01 * 4.0);
    EXPECT_LE(p[1], 6.0 - 0.01 * 4.0);
  }
  const std::vector<Vec> c = sample_points(box, 50, 43);
  EXPECT_NE(a, c);
}

TEST(VerifyTest, BuiltinConfigsConstructValidSpaces) {
  for (const std::string& name : builtin_config_names()) {
    const VerifyConfig cfg = builtin_config(name);
    EXPECT_EQ(cfg.name, name);
    const DwpSpace s = space_from_config(cfg);
    EXPECT_EQ(s.m, cfg.base.dim);
    EXPECT_EQ(s.n, cfg.fiber.dim);
    Vec x(static_cast<std::size_t>(s.m)), y(static_cast<std::size_t>(s.n));
    for (int i = 0; i < s.m; ++i)
      x[static_cast<std::size_t>(i)] =
          0.5 * (s.base.chart[static_cast<std::size_t>(i)].first +
                 s.base.chart[static_cast<std::size_t>(i)].second);
    for (int j = 0; j < s.n; ++j)
      y[static_cast<std::size_t>(j)] =
          0.5 * (s.fiber.chart[static_cast<std::size_t>(j)].first +
                 s.fiber.chart[static_cast<std::size_t>(j)].second);
    EXPECT_GT(s.b2.eval_value(x), 0.0) << name;
    EXPECT_GT(s.f2.eval_value(y), 0.0) << name;
  }
  EXPECT_THROW(builtin_config("cfg-nope"), std::invalid_argument);
}

TEST(VerifyTest, ParseConfigReadsTheFullSchema) {
  const std::string text = R"json({
    "name": "round-base",
    "base": {"dim": 2, "chart": [[0.3, 2.8], [-3.0, 3.0]],
             "metric": [["1", "0"], ["0", "sin(x1)^2"]]},
    "fiber": {"dim": 1, "chart": [[-1.0, 1.0]]},
    "b": "2+cos(x1)",
    "f2": "1",
    "phi": {"side": "fiber", "components": ["0.5*y1"]},
    "cases": ["connection", "curvature"],
    "samples": 25,
    "seed": 7,
    "tolerances": {"tol": 1e-8, "jet_order": 4}
  })json";
  const VerifyConfig cfg = parse_config(text);
  EXPECT_EQ(cfg.name, "round-base");
  EXPECT_EQ(cfg.base.dim, 2);
  EXPECT_EQ(cfg.base.metric.size(), 4u);
  EXPECT_EQ(cfg.b2, "(2+cos(x1))^2");
  EXPECT_EQ(cfg.f2, "1");
  ASSERT_TRUE(cfg.phi.has_value());
  EXPECT_EQ(cfg.phi->side, FactorSide::fiber);
  EXPECT_EQ(cfg.cases, (std::vector<std::string>{"connection", "curvature"}));
  EXPECT_EQ(cfg.samples, 25);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_DOUBLE_EQ(cfg.tol, 1e-8);

  const DwpSpace s = space_from_config(cfg);
  EXPECT_EQ(s.m, 2);
  const Vec probe{1.0, 0.0};
  EXPECT_NEAR(s.b2.eval_value(probe), (2.0 + std::cos(1.0)) * (2.0 + std::cos(1.0)),
              1e-12);

  EXPECT_THROW(parse_config(R"json({"fiber": {"dim":1, "chart":[[0,1]]}})json"),
               std::invalid_argument);
  EXPECT_THROW(parse_config(R"json({
    "base": {"dim":1, "chart":[[0,1]]},
    "fiber": {"dim":1, "chart":[[0,1]]},
    "b2": "1", "f2": "1",
    "phi": {"side": "sideways", "components": ["y1"]}
  })json"),
               std::invalid_argument);
}

TEST(VerifyTest, LoadConfigAcceptsBuiltinNamesAndFiles) {
  const VerifyConfig builtin = load_config("cfg-b");
  EXPECT_EQ(builtin.name, "cfg-b");
  EXPECT_EQ(builtin.b2, "1");

  const std::string path = ::testing::TempDir() + "/warpcheck_config.json";
  {
    std::ofstream out(path);
    out << R"json({"name":"from-file",
               "base": {"dim":1, "chart":[[-1,1]]},
               "fiber": {"dim":1, "chart":[[-1,1]]},
               "b2": "exp(2*x1)", "f2": "1"})json";
  }
  const VerifyConfig fromfile = load_config(path);
  EXPECT_EQ(fromfile.name, "from-file");
  EXPECT_EQ(fromfile.b2, "exp(2*x1)");
  std::remove(path.c_str());

  EXPECT_THROW(load_config("/no/such/warpcheck-config.json"), std::invalid_argument);
}

TEST(VerifyTest, CorrectionLadderResolvesExponentialConfig) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 40;

  const FieldReport conn = run_case(cfg, "connection");
  EXPECT_EQ(conn.verdict, "corrected-match");
  EXPECT_LE(conn.max_abs_err, 1e-12);
  ASSERT_EQ(conn.ledger.size(), 2u);
  for (const LedgerEntry& e : conn.ledger) {
    EXPECT_EQ(e.equation, "product-connection");
    EXPECT_GE(e.err_before, 1.0);
    EXPECT_LE(e.err_after, 1e-12);
  }

  const FieldReport inc = run_case(cfg, "inclusion-b");
  EXPECT_EQ(inc.verdict, "corrected-match");
  EXPECT_LE(inc.max_abs_err, 1e-9);
  EXPECT_GE(inc.ledger.size(), 3u);
  for (const LedgerEntry& e : inc.ledger) {
    EXPECT_TRUE(e.equation == "inclusion-base-tension" ||
                e.equation == "inclusion-base-bitension")
        << e.equation;
    EXPECT_GE(e.err_before, 1.0);
    EXPECT_LE(e.err_after, 1e-9);
  }

  // On this configuration the projection bitension needs only the missing
  // fiber-sourced term: the retry ladder must find that single correction and
  // not apply the other catalog entries.
  const FieldReport proj = run_case(cfg, "proj-first");
  EXPECT_EQ(proj.verdict, "corrected-match");
  bool found_single = false;
  for (const LedgerEntry& e : proj.ledger)
    if (e.equation == "projection-base-bitension") {
      EXPECT_EQ(e.term, "fiber-sourced term");
      found_single = true;
    }
  EXPECT_TRUE(found_single);
  EXPECT_EQ(std::count_if(proj.ledger.begin(), proj.ledger.end(),
                          [](const LedgerEntry& e) {
                            return e.equation == "projection-base-bitension";
                          }),
            1);
}

TEST(VerifyTest, SingleWarpingConfigMatchesWithoutFieldCorrections) {
  VerifyConfig cfg = builtin_config("cfg-b");
  cfg.samples = 40;
  for (const char* id :
       {"curvature", "inclusion-b", "inclusion-f", "proj-first", "proj-second"}) {
    const FieldReport r = run_case(cfg, id);
    EXPECT_EQ(r.verdict, "match") << id;
    EXPECT_TRUE(r.ledger.empty()) << id;
  }
  // The connection always needs at least the argument-slot repair.
  const FieldReport conn = run_case(cfg, "connection");
  EXPECT_EQ(conn.verdict, "corrected-match");
  EXPECT_EQ(conn.ledger.size(), 1u);
  EXPECT_EQ(conn.ledger[0].term, "argument slots");
}

TEST(VerifyTest, PrintedFormsModeDisablesTheLadder) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 20;
  cfg.printed_forms_only = true;
  const FieldReport r = run_case(cfg, "connection");
  EXPECT_EQ(r.verdict, "mismatch");
  EXPECT_TRUE(r.ledger.empty());
  EXPECT_GE(r.max_abs_err, 1.0);
  ASSERT_FALSE(r.notes.empty());
}

TEST(VerifyTest, SerialAndParallelSweepsProduceIdenticalReports) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 30;
  const std::vector<FieldReport> par = run_suite(cfg, RunMode::parallel);
  const std::vector<FieldReport> ser = run_suite(cfg, RunMode::serial);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].case_id, ser[i].case_id);
    EXPECT_EQ(par[i].verdict, ser[i].verdict);
    EXPECT_EQ(par[i].max_abs_err, ser[i].max_abs_err);
    EXPECT_EQ(par[i].max_rel_err, ser[i].max_rel_err);
    EXPECT_EQ(par[i].points, ser[i].points);
    ASSERT_EQ(par[i].ledger.size(), ser[i].ledger.size());
    for (std::size_t k = 0; k < par[i].ledger.size(); ++k) {
      EXPECT_EQ(par[i].ledger[k].equation, ser[i].ledger[k].equation);
      EXPECT_EQ(par[i].ledger[k].err_before, ser[i].ledger[k].err_before);
      EXPECT_EQ(par[i].ledger[k].err_after, ser[i].ledger[k].err_after);
    }
    EXPECT_EQ(par[i].notes, ser[i].notes);
  }
}

TEST(VerifyTest, ReportsSerializeDeterministically) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 15;
  cfg.cases = {"connection", "corollaries"};
  const std::vector<FieldReport> reports = run_suite(cfg);

  const std::string j1 = to_json(reports, cfg, "TS");
  const std::string j2 = to_json(run_suite(cfg), cfg, "TS");
  EXPECT_EQ(j1, j2);

  const nlohmann::json parsed = nlohmann::json::parse(j1);
  EXPECT_EQ(parsed.at("generated_at"), "TS");
  ASSERT_EQ(parsed.at("reports").size(), 2u);
  EXPECT_EQ(parsed.at("reports")[0].at("case"), "connection");
  EXPECT_EQ(parsed.at("reports")[0].at("verdict"), "corrected-match");
  EXPECT_TRUE(parsed.at("reports")[0].at("ledger").is_array());

  const std::string csv = to_csv(reports);
  EXPECT_NE(csv.find("case,verdict,max_abs_err,max_rel_err,points,corrections"),
            std::string::npos);
  EXPECT_NE(csv.find("connection,corrected-match"), std::string::npos);

  const std::string text = to_text(reports, cfg, "TS");
  EXPECT_NE(text.find("[corrected-match] connection"), std::string::npos);
  EXPECT_NE(text.find("overall: PASS"), std::string::npos);
}

TEST(VerifyTest, NonHarmonicConfiguredMapIsReportedNotSilentlyAccepted) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 10;
  cfg.phi = MapConfig{FactorSide::fiber, {"y1^2"}};
  const FieldReport r = run_case(cfg, "product-dom");
  EXPECT_EQ(r.verdict, "error");
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes.back().find("not harmonic"), std::string::npos);
  EXPECT_FALSE(all_passed({r}));
}

TEST(VerifyTest, InvalidRunParametersAreRejected) {
  VerifyConfig cfg = builtin_config("cfg-a");
  cfg.samples = 0;
  EXPECT_THROW(run_case(cfg, "connection"), std::invalid_argument);
  cfg.samples = 10;
  cfg.tol = 0.0;
  EXPECT_THROW(run_case(cfg, "connection"), std::invalid_argument);
  cfg.tol = 1e-6;
  cfg.jet_order = 3;
  EXPECT_THROW(run_case(cfg, "connection"), std::invalid_argument);
  cfg.jet_order = 4;
  EXPECT_THROW(run_case(cfg, "no-such-case"), std::invalid_argument);

  VerifyConfig bad = builtin_config("cfg-a");
  bad.base.chart.clear();
  EXPECT_THROW(run_case(bad, "connection"), std::invalid_argument);
}

TEST(VerifyTest, SuiteExpandsAllAndTracksOverallOutcome) {
  VerifyConfig cfg = builtin_config("cfg-b");
  cfg.samples = 15;
  cfg.cases = {"all"};
  const std::vector<FieldReport> reports = run_suite(cfg);
  EXPECT_EQ(reports.size(), case_ids().size());
  std::set<std::string> seen;
  for (const FieldReport& r : reports) seen.insert(r.case_id);
  for (const std::string& id : case_ids()) EXPECT_TRUE(seen.count(id)) << id;
  EXPECT_TRUE(all_passed(reports));
}

}  // namespace
}  // namespace warpcheck

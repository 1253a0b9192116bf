#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "signorini/study.hpp"

using namespace signorini;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("signorini_study_" + name);
  fs::remove_all(p);
  return p;
}

bool same_or_both_nan(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST(AveragedRate, KnownSequences) {
  EXPECT_NEAR(averaged_rate(3.2629e-01, 1.2955e-01, 2), 1.33, 0.005);
  EXPECT_NEAR(averaged_rate(1.0050e-01, 4.0559e-04, 5), 1.99, 0.005);
  EXPECT_EQ(averaged_rate(0.25, 0.25, 4), 0.0);
  EXPECT_NEAR(averaged_rate(1.0, 1.0 / 64, 4), 2.0, 1e-15);
}

TEST(AveragedRate, RejectsNonPositive) {
  EXPECT_THROW(averaged_rate(0.0, 1.0, 2), Error);
  EXPECT_THROW(averaged_rate(1.0, -1.0, 2), Error);
  EXPECT_THROW(averaged_rate(1.0, 0.5, 1), Error);
}

TEST(Config, ParseFlatKeyValue) {
  std::istringstream in(R"(# study
min_level = 2
max_level=4   # trailing comment
knots = 0.4, 0.9
weight = 0.5
pdas_start = empty
lambda_tilde = false
profiles = yes
timing = off
out_dir = /tmp/x y
)");
  const StudyConfig c = parse_config(in);
  EXPECT_EQ(c.min_level, 2);
  EXPECT_EQ(c.max_level, 4);
  EXPECT_EQ(c.knot_s0, 0.4);
  EXPECT_EQ(c.knot_s1, 0.9);
  EXPECT_EQ(c.weight, 0.5);
  EXPECT_EQ(c.pdas_start, InitialActiveSet::Empty);
  EXPECT_FALSE(c.lambda_tilde);
  EXPECT_TRUE(c.profiles);
  EXPECT_FALSE(c.timing);
  EXPECT_EQ(c.out_dir, "/tmp/x y");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Errors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(parse("bogus = 1"), Error);
  EXPECT_THROW(parse("min_level = two"), Error);
  EXPECT_THROW(parse("max_level = 3.5"), Error);
  EXPECT_THROW(parse("just text"), Error);
  EXPECT_THROW(parse("timing = maybe"), Error);
  EXPECT_THROW(parse("knots = 0.5"), Error);
  EXPECT_THROW(parse("max_level = 12").validate(), Error);
  EXPECT_THROW(parse("min_level = 3\nmax_level = 2").validate(), Error);
  EXPECT_THROW(parse("min_level = 0").validate(), Error);
  EXPECT_THROW(parse("knots = 0.9,0.5").validate(), Error);
  EXPECT_THROW(parse("knots = 0,0.5").validate(), Error);
  EXPECT_THROW(load_config("/nonexistent/config.txt"), Error);
}

TEST(RunStudy, SingleLevelHasNoRates) {
  StudyConfig c;
  c.min_level = c.max_level = 1;
  c.timing = false;
  const auto r = run_study(c);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_TRUE(r.records[0].ok);
  EXPECT_TRUE(r.records[0].rates.empty());
  EXPECT_TRUE(r.records[0].step_rates.empty());
}

TEST(RunStudy, RecordsAreFiniteAndTransmissionRatiosBelowOne) {
  StudyConfig c;
  c.max_level = 5;
  c.timing = false;
  const auto r = run_study(c);
  ASSERT_EQ(r.records.size(), 5u);
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.ok) << rec.failure;
    for (const auto& name : norm_names()) {
      const double e = report_value(rec.errors, name);
      EXPECT_TRUE(std::isfinite(e)) << name;
      EXPECT_GE(e, 0.0) << name;
    }
    EXPECT_LT(rec.xl_ratio, 1.0) << "level " << rec.level;
    EXPECT_LT(rec.xr_ratio, 1.0) << "level " << rec.level;
    EXPECT_LE(static_cast<std::size_t>(rec.iterations), rec.num_multipliers + 2);
    if (rec.level >= 2) {
      for (const auto& name : norm_names()) EXPECT_TRUE(std::isfinite(rec.rate(name))) << name;
    }
  }
}

TEST(RunStudy, L2RateLevelsOneToFive) {
  StudyConfig c;
  c.max_level = 5;
  c.timing = false;
  c.lambda_tilde = false;
  const auto r = run_study(c);
  const double rate = r.records.back().rate("L2_omega");
  EXPECT_GE(rate, 1.85);
  EXPECT_LE(rate, 2.15);
}

TEST(RunStudy, RateSanityFromLevelThree) {
  StudyConfig c;
  c.min_level = 3;
  c.max_level = 7;
  c.timing = false;
  const auto r = run_study(c);
  const auto& last = r.records.back();
  EXPECT_GE(last.rate("L2_omega"), 1.8);
  EXPECT_LE(last.rate("L2_omega"), 2.2);
  EXPECT_GE(last.rate("Hhalf"), 1.3);
  EXPECT_LE(last.rate("Hhalf"), 1.8);
  EXPECT_GE(last.rate("Hmhalf_lambda"), 1.25);
  EXPECT_LE(last.rate("Hmhalf_lambda"), 1.8);
  EXPECT_GE(last.rate("L2_lambda"), 0.9);
  EXPECT_LE(last.rate("L2_lambda"), 1.6);
}

TEST(RunStudy, DisabledFamiliesAreAbsent) {
  StudyConfig c;
  c.max_level = 2;
  c.timing = false;
  c.volume_norms = false;
  c.multiplier_norms = false;
  const auto r = run_study(c);
  for (const auto& rec : r.records) {
    EXPECT_TRUE(std::isnan(rec.errors.e_L2_omega));
    EXPECT_TRUE(std::isnan(rec.errors.e_L2_lambda));
    EXPECT_TRUE(std::isnan(rec.errors.e_Hminushalf_lambda_tilde));
    EXPECT_TRUE(std::isfinite(rec.errors.e_L2_gammaS));
  }
  EXPECT_TRUE(std::isnan(r.records[1].rate("L2_omega")));
}

TEST(RunStudy, FailedLevelIsRecordedAndStudyContinues) {
  StudyConfig c;
  c.max_level = 3;
  c.timing = false;
  c.pdas_max_iter = 1;
  c.pdas_start = InitialActiveSet::Empty;
  c.lambda_tilde = false;
  const auto r = run_study(c);
  ASSERT_EQ(r.records.size(), 3u);
  bool any_failed = false;
  for (const auto& rec : r.records) {
    if (!rec.ok) {
      any_failed = true;
      EXPECT_FALSE(rec.failure.empty());
      EXPECT_TRUE(std::isnan(rec.errors.e_L2_omega));
    }
  }
  EXPECT_TRUE(any_failed);
}

TEST(Reports, CsvJsonAndProfiles) {
  StudyConfig c;
  c.max_level = 3;
  c.timing = false;
  c.profiles = true;
  c.out_dir = scratch_dir("reports").string();
  const auto result = run_study(c);
  const auto files = emit_reports(result, c);
  EXPECT_EQ(files.size(), 5u);

  std::istringstream csv(read_file(fs::path(c.out_dir) / "convergence.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header,
            "level,h,e_L2_omega,rate_L2_omega,e_L2_gammaS,rate_L2_gammaS,e_L2_lambda,rate_L2_lambda,e_Hhalf,"
            "rate_Hhalf,e_Hmhalf_lambda,rate_Hmhalf_lambda,e_Hmhalf_lambda_tilde,rate_Hmhalf_lambda_tilde,"
            "xl_dist,xl_ratio,xr_dist,xr_ratio,iters,seconds");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 19);
  }
  EXPECT_EQ(rows, 3);

  const auto j = nlohmann::json::parse(read_file(fs::path(c.out_dir) / "convergence.json"));
  EXPECT_EQ(j.at("config").at("max_level"), 3);
  EXPECT_EQ(j.at("tolerances").at("dual_norm_reference_level"), 6);
  ASSERT_EQ(j.at("records").size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const ConvergenceRecord back = record_from_json(j.at("records")[i]);
    const ConvergenceRecord& orig = result.records[i];
    EXPECT_EQ(back.level, orig.level);
    EXPECT_EQ(back.h, orig.h);
    EXPECT_EQ(back.iterations, orig.iterations);
    EXPECT_EQ(back.rates, orig.rates);
    EXPECT_EQ(back.step_rates, orig.step_rates);
    for (const auto& name : norm_names()) {
      EXPECT_TRUE(same_or_both_nan(report_value(back.errors, name), report_value(orig.errors, name))) << name;
    }
    EXPECT_EQ(back.xl_dist, orig.xl_dist);
    EXPECT_EQ(back.xr_ratio, orig.xr_ratio);
  }

  for (int k = 1; k <= 3; ++k) {
    std::istringstream prof(read_file(fs::path(c.out_dir) / ("profile_level_" + std::to_string(k) + ".csv")));
    std::string line;
    std::getline(prof, line);
    EXPECT_EQ(line, "x,u,u_h,lambda,lambda_hat");
    double prev = -1.0;
    int n = 0;
    while (std::getline(prof, line)) {
      const double x = std::stod(line.substr(0, line.find(',')));
      EXPECT_GT(x, prev);
      prev = x;
      ++n;
    }
    EXPECT_EQ(n, (4 << (k - 1)) + 1);
  }
  fs::remove_all(c.out_dir);
}

TEST(Reports, DeterministicAcrossRuns) {
  StudyConfig c;
  c.max_level = 3;
  c.timing = false;
  c.out_dir = scratch_dir("det_a").string();
  emit_reports(run_study(c), c);
  const std::string a_csv = read_file(fs::path(c.out_dir) / "convergence.csv");
  const std::string a_json = read_file(fs::path(c.out_dir) / "convergence.json");
  fs::remove_all(c.out_dir);
  emit_reports(run_study(c), c);
  EXPECT_EQ(read_file(fs::path(c.out_dir) / "convergence.csv"), a_csv);
  EXPECT_EQ(read_file(fs::path(c.out_dir) / "convergence.json"), a_json);
  fs::remove_all(c.out_dir);
}

TEST(Reports, Errors) {
  StudyConfig c;
  EXPECT_THROW(emit_reports(StudyResult{}, c), Error);
  const fs::path file = scratch_dir("blocker");
  std::ofstream(file.string()) << "x";
  c.max_level = 1;
  c.out_dir = (file / "sub").string();
  EXPECT_THROW(emit_reports(run_study(c), c), Error);
  fs::remove(file);
}

TEST(Tables, PrintsBothTables) {
  StudyConfig c;
  c.max_level = 2;
  c.timing = false;
  std::ostringstream os;
  print_tables(os, run_study(c).records);
  EXPECT_NE(os.str().find("Errors and averaged rates"), std::string::npos);
  EXPECT_NE(os.str().find("Transmission points"), std::string::npos);
}

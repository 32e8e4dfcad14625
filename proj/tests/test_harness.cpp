#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "dimprof/io.hpp"
#include "dimprof/report.hpp"

using namespace dimprof;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dimprof_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentResult sample_result() {
  ExperimentResult er;
  er.name = "sample";
  er.header = {"k", "count"};
  for (int k = 2; k <= 10; k += 2) {
    er.rows.push_back({std::to_string(k), std::to_string(1 << (k / 2))});
    er.series.push_back({static_cast<double>(k), k / 2.0});
  }
  er.fits.push_back({"limsup", 0.5, 0.0});
  er.region_point = XYPair{0.5, 1.0};
  return er;
}

}  // namespace

TEST(Cli, BoundsCalculator) {
  const auto r = run({"bounds", "--m", "1", "--n", "2", "--ubd", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("threshold=4/3"), std::string::npos);
  EXPECT_NE(r.out.find("general_lower=2/3"), std::string::npos);
  EXPECT_NE(r.out.find("general_upper=1 "), std::string::npos);
}

TEST(Cli, BoundsSharpnessAndThetaChoice) {
  const auto r = run({"bounds", "--m", "1", "--n", "2", "--ubd", "1/2", "--ad", "5/4", "--sharp-s", "2", "--sharp-t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("improvement_theta=1/2"), std::string::npos);
  EXPECT_NE(r.out.find("improvement_bound=3/8"), std::string::npos);
  EXPECT_NE(r.out.find("sharpness_d=2/3"), std::string::npos);
}

TEST(Cli, ConstructEmitsCloud) {
  const auto r = run({"construct", "--type", "periodic", "--q", "2", "--residues", "0", "--depth", "4", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "x1");
  EXPECT_EQ(rows[4], "0.3125");
}

TEST(Cli, ConstructWritesFilesThatRoundTrip) {
  const auto dir = fresh_dir("construct");
  const auto r = run({"construct", "--type", "explicit", "--members", "1,3,4", "--n", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(listing(dir), (std::vector<std::string>{"cloud.csv", "set.txt"}));
  const auto cloud = read_cloud_file((dir / "cloud.csv").string());
  EXPECT_EQ(cloud.size(), 64u);
  const auto set = parse_digit_set(trim(read_file((dir / "set.txt").string())));
  EXPECT_EQ(set.members(), (std::vector<int>{1, 3, 4}));

  const auto from_cloud = run({"boxdim", "--cloud", (dir / "cloud.csv").string(), "--schedule", "1,2,3,4"});
  ASSERT_EQ(from_cloud.code, 0) << from_cloud.err;
  EXPECT_NE(from_cloud.out.find("4,64"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  const auto unknown = run({"frobnicate"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"bounds", "--m", "2", "--n", "2", "--ubd", "1"}).code, 2);
  EXPECT_EQ(run({"bounds", "--m", "1", "--n", "2", "--ubd", "x"}).code, 2);
  EXPECT_EQ(run({"boxdim", "--type", "periodic", "--q", "0"}).code, 2);
  EXPECT_EQ(run({"boxdim", "--schedule", "9,8,7"}).code, 2);
  const auto big = run({"construct", "--type", "periodic", "--q", "1", "--depth", "40", "--n", "2"});
  EXPECT_EQ(big.code, 3);
  EXPECT_NE(big.err.find("largest admissible depth"), std::string::npos);
  EXPECT_EQ(run({"boxdim", "--cloud", "/nonexistent/cloud.csv"}).code, 3);
}

TEST(Cli, UnwritableOutputIsAnIoError) {
  const auto dir = fresh_dir("unwritable");
  write_file((dir / "blocker").string(), "not a directory\n");
  const auto target = (dir / "blocker" / "sub").string();
  EXPECT_EQ(run({"boxdim", "--out", target}).code, 3);
  EXPECT_EQ(run({"report", "--out", target}).code, 3);
  EXPECT_THROW(emit_report({}, target), IoError);
}

TEST(Cli, IdenticalFlagsGiveIdenticalOutput) {
  const std::vector<std::string> project{"project", "--type", "periodic", "--q", "3", "--residues", "0,1",
                                         "--depth", "20", "--n", "2", "--seed", "17", "--schedule", "8:14:2"};
  const auto a = run(project), b = run(project);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto other = project;
  other[12] = "18";
  EXPECT_NE(run(other).out, a.out);

  const std::vector<std::string> profile{"profile", "--type", "periodic", "--q", "2", "--depth", "10",
                                         "--schedule", "4:10:2", "--kernel-s", "1"};
  const auto p = run(profile);
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(lines(p.out)[0], "s,k,capacity_log2,slope_mode,slope");
  EXPECT_EQ(run(profile).out, p.out);
}

TEST(Cli, ScheduleFlagHonoredBySubcommands) {
  const auto r = run({"project", "--depth", "20", "--n", "2", "--schedule", "8:12:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "k,count,count_lo,count_hi");
  EXPECT_EQ(rows[3].substr(0, 3), "12,");
  EXPECT_EQ(rows[4].substr(0, 1), "#");
}

TEST(Cli, ConfigFileMirrorsFlagsAndFlagsOverride) {
  const auto dir = fresh_dir("config");
  const auto config = (dir / "run.conf").string();
  write_file(config, "# boxdim manifest\ntype = periodic\nq=3\nresidues=0\nschedule=8:12:2\n");
  const auto from_file = run({"boxdim", "--config", config});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  const auto direct = run({"boxdim", "--type", "periodic", "--q", "3", "--residues", "0", "--schedule", "8:12:2"});
  EXPECT_EQ(from_file.out, direct.out);
  EXPECT_EQ(lines(from_file.out).size(), 5u);

  const auto overridden = run({"boxdim", "--config", config, "--schedule", "8:16:2"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(lines(overridden.out).size(), 7u);

  write_file(config, "no equals sign\n");
  EXPECT_EQ(run({"boxdim", "--config", config}).code, 2);
  EXPECT_EQ(run({"boxdim", "--config", (dir / "missing.conf").string()}).code, 3);
}

TEST(Cli, SharpnessExperimentPassesAndWritesReport) {
  const auto dir = fresh_dir("sharpness");
  const auto r = run({"experiment", "sharpness", "--s", "2", "--t", "1", "--n", "2", "--m", "1", "--trials", "20",
                      "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  const auto out = lines(r.out);
  EXPECT_EQ(out.front().rfind("claim: ", 0), 0u);
  EXPECT_EQ(out.back(), "PASS");
  EXPECT_NE(r.out.find("d_equals_general_lower=true"), std::string::npos);
  EXPECT_EQ(listing(dir), (std::vector<std::string>{"sharpness.csv", "sharpness.svg", "sharpness_summary.txt"}));
  EXPECT_EQ(lines(read_file((dir / "sharpness.csv").string()))[0], "trial,seed,k,count_lo,count_hi,slope_upper");
}

TEST(Cli, PreservationExperimentReportsClaim) {
  const std::vector<std::string> args{"experiment", "preservation", "--depth", "24", "--trials", "3",
                                      "--schedule", "8:14:2"};
  const auto a = run(args);
  ASSERT_TRUE(a.code == 0 || a.code == 1) << a.err;
  EXPECT_EQ(a.out.rfind("claim: ", 0), 0u);
  EXPECT_NE(a.out.find("median_upper="), std::string::npos);
  EXPECT_EQ(run(args).out, a.out);
}

TEST(Cli, ProfileLadderTable) {
  const auto r = run({"experiment", "profile-ladder", "--depth", "10", "--schedule", "4:10:2"});
  ASSERT_TRUE(r.code == 0 || r.code == 1) << r.err;
  EXPECT_NE(r.out.find("s,theta,profile_upper,bound,status"), std::string::npos);
  const auto out = lines(r.out);
  EXPECT_TRUE(out.back() == "PASS" || out.back() == "FAIL");
}

TEST(Cli, ReportFromCounts) {
  const auto dir = fresh_dir("report");
  const auto counts = (dir / "counts.csv").string();
  write_file(counts, "k,count\n8,16\n10,2^5\n12,64\n14,2^7\n");
  const auto outdir = dir / "out";
  const auto r = run({"report", "--counts", counts, "--name", "evens", "--ubd", "0.5", "--ad", "0.5", "--out",
                      outdir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(listing(outdir), (std::vector<std::string>{"evens.csv", "evens.svg"}));
  const auto csv = lines(read_file((outdir / "evens.csv").string()));
  EXPECT_EQ(csv[0], "k,count,log2_count");
  EXPECT_EQ(csv[2], "10,2^5,5");

  write_file(counts, "k,count\n8,abc\n");
  EXPECT_EQ(run({"report", "--counts", counts, "--out", outdir.string()}).code, 2);
  EXPECT_EQ(run({"report"}).code, 2);
}

TEST(Report, EmptyResultsWriteHeaderOnly) {
  const auto dir = fresh_dir("empty");
  const auto written = emit_report({}, dir.string());
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(listing(dir), std::vector<std::string>{"report.csv"});
  EXPECT_EQ(read_file(written[0]), "experiment,k,log2_count\n");
}

TEST(Report, SingleExperimentIsDeterministic) {
  const auto a = fresh_dir("single_a"), b = fresh_dir("single_b");
  emit_report({sample_result()}, a.string());
  emit_report({sample_result()}, b.string());
  EXPECT_EQ(listing(a), (std::vector<std::string>{"sample.csv", "sample.svg"}));
  for (const auto* name : {"sample.csv", "sample.svg"}) EXPECT_EQ(read_file((a / name).string()), read_file((b / name).string()));
  const auto svg = read_file((a / "sample.svg").string());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Report, RegionCurve) {
  EXPECT_EQ(region_curve(0.0), 1.0);
  EXPECT_DOUBLE_EQ(region_curve(1.0), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(region_curve(2.0), 1.5);
}

TEST(Io, CloudCsvRoundTrip) {
  const PointCloud cloud(2, 3, {0, 7, 3, 1, 5, 5});
  std::ostringstream out;
  write_cloud_csv(out, cloud);
  std::istringstream in(out.str());
  EXPECT_EQ(read_cloud_csv(in), cloud);
  std::istringstream negative("x1\n-0.5\n");
  EXPECT_THROW(read_cloud_csv(negative), InvalidInput);
  std::istringstream ragged("x1,x2\n0.5\n");
  EXPECT_THROW(read_cloud_csv(ragged), InvalidInput);
}

TEST(Io, ParseConfig) {
  const auto entries = parse_config("# comment\n a = 1 \n\nb=x,y # trailing\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(entries[1], (std::pair<std::string, std::string>{"b", "x,y"}));
  EXPECT_THROW(parse_config("novalue\n"), InvalidInput);
}

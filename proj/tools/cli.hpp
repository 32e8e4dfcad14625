#pragma once

// Command-line front end. run() parses a full argument vector (without the
// program name) and writes to the given streams, so tests can drive it
// in-process.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimprof/dimprof.hpp"

namespace dimprof::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid_input = 2;
inline constexpr int size_limit = 3;
}  // namespace exit_code

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string schedule = "8:40:2";
  std::string out;
  std::string config;
  std::vector<CLI::Option*> schedule_options;  // one per subcommand

  ScaleSchedule schedule_or(const std::string& fallback) const {
    const bool given = std::any_of(schedule_options.begin(), schedule_options.end(),
                                   [](const CLI::Option* o) { return o->count() > 0; });
    return ScaleSchedule::parse(given ? schedule : fallback);
  }
};

struct SetOptions {
  std::string type = "periodic";
  int q = 2;
  std::vector<int> residues{0};
  std::vector<int> members;
  double s = 2.0;
  double t = 1.0;
  std::vector<int> starts{4, 64, 4096};
  std::optional<int> depth;
  std::optional<int> n;
  std::string set_text;
  std::string cloud;
  std::optional<int> resolution;

  int dim() const { return n.value_or(type == "blocks" ? static_cast<int>(std::ceil(s)) : 1); }

  DigitSet build() const {
    if (!set_text.empty()) return parse_digit_set(set_text);
    if (type == "periodic") return periodic_set(q, residues, depth.value_or(40));
    if (type == "explicit") {
      int deepest = 1;
      for (int k : members) deepest = std::max(deepest, k);
      return explicit_set(members, depth.value_or(deepest));
    }
    if (type == "blocks") return sharpness_set(s, t, dim(), starts, depth.value_or(8192));
    throw InvalidInput("unknown set type '" + type + "' (expected periodic, explicit or blocks)");
  }

  bool has_cloud() const { return !cloud.empty(); }
  PointCloud load_cloud() const { return read_cloud_file(cloud, resolution); }
};

namespace detail {

inline void add_common(CLI::App* app, CommonOptions& common) {
  app->add_option("--seed", common.seed, "Random seed");
  common.schedule_options.push_back(app->add_option("--schedule", common.schedule, "Scale exponents: first:last[:step] or k1,k2,..."));
  app->add_option("--out", common.out, "Output directory");
  app->add_option("--config", common.config, "key=value file; command-line flags take precedence");
}

inline void add_set(CLI::App* app, SetOptions& set, bool with_cloud = true) {
  app->add_option("--type", set.type, "periodic, explicit or blocks");
  app->add_option("--q", set.q, "Period of a periodic digit set");
  app->add_option("--residues", set.residues, "Residues mod q")->delimiter(',');
  app->add_option("--members", set.members, "Members of an explicit digit set")->delimiter(',');
  app->add_option("--s", set.s, "Block construction: Assouad dimension s");
  app->add_option("--t", set.t, "Block construction: upper box dimension t");
  app->add_option("--starts", set.starts, "Block construction: block start digits")->delimiter(',');
  app->add_option("--depth", set.depth, "Truncation depth of the digit set");
  app->add_option("--n", set.n, "Ambient dimension of the product X_S^n");
  app->add_option("--set", set.set_text, "Digit set in its one-line text form");
  if (with_cloud) {
    app->add_option("--cloud", set.cloud, "Point-cloud CSV used instead of a digit set");
    app->add_option("--resolution", set.resolution, "Round cloud coordinates to the 2^-resolution grid");
  }
}

inline std::string num(double v) { return format_number(v); }

inline void warn(std::ostream& err, const DigitSet& set) {
  for (const auto& w : set.warnings) err << "warning: " << w << '\n';
}

inline std::string path_in(const std::string& dir, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return (std::filesystem::path(dir) / file).string();
}

inline std::string csv_text(const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::ostringstream s;
  write_csv(s, header, rows);
  return s.str();
}

/// Inserts config-file entries as --key=value tokens right after the
/// subcommand path, skipping keys already given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto entries = parse_config(read_file(path));
  std::size_t insert_at = 0;
  if (!args.empty() && args[0].rfind("-", 0) != 0) insert_at = 1;
  if (insert_at == 1 && args[0] == "experiment" && args.size() > 1 && args[1].rfind("-", 0) != 0) insert_at = 2;
  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    require(key != "config", "config: nested config files are not supported");
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) injected.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(), injected.end());
  return args;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using detail::num;
  CLI::App app{"Box, Assouad-type and capacity dimension estimates for digit sets and their projections", "dimprof"};
  app.require_subcommand(1);

  CommonOptions common;
  SetOptions set;

  auto* construct = app.add_subcommand("construct", "Emit a digit set and its enumerated point cloud");
  detail::add_common(construct, common);
  detail::add_set(construct, set, false);
  std::optional<int> enumerate_depth;
  construct->add_option("--enumerate-depth", enumerate_depth, "Enumeration depth (default: the set depth)");

  auto* boxdim = app.add_subcommand("boxdim", "Box-counting dimension estimates");
  detail::add_common(boxdim, common);
  detail::add_set(boxdim, set);

  std::vector<double> thetas{0.5, 0.75, 0.9, 0.95};
  auto* spectrum = app.add_subcommand("spectrum", "Upper Assouad spectrum estimates");
  detail::add_common(spectrum, common);
  detail::add_set(spectrum, set);
  spectrum->add_option("--theta", thetas, "Values of theta in (0,1)")->delimiter(',');

  auto* assouad = app.add_subcommand("assouad", "Assouad and quasi-Assouad estimates");
  detail::add_common(assouad, common);
  detail::add_set(assouad, set);

  double r = 1.0 / 256;
  double kernel_s = 1.0;
  std::optional<double> theta, alpha, beta;
  auto* capacity_cmd = app.add_subcommand("capacity", "Capacity C_r^s by energy minimization");
  detail::add_common(capacity_cmd, common);
  detail::add_set(capacity_cmd, set);
  capacity_cmd->add_option("--r", r, "Scale r");
  capacity_cmd->add_option("--kernel-s", kernel_s, "Kernel exponent s");
  capacity_cmd->add_option("--enumerate-depth", enumerate_depth, "Enumeration depth for digit sets");
  capacity_cmd->add_option("--theta", theta, "With --alpha and --beta: evaluate the separated-set bound");
  capacity_cmd->add_option("--alpha", alpha, "Spectrum exponent for the separated-set bound");
  capacity_cmd->add_option("--beta", beta, "Assouad exponent for the separated-set bound");

  auto* profile = app.add_subcommand("profile", "Dimension profile slopes from capacities");
  detail::add_common(profile, common);
  detail::add_set(profile, set);
  profile->add_option("--kernel-s", kernel_s, "Kernel exponent s");

  int m = 1;
  int guard_bits = 6;
  auto* project_cmd = app.add_subcommand("project", "Covering numbers of a random projection");
  detail::add_common(project_cmd, common);
  detail::add_set(project_cmd, set);
  project_cmd->add_option("--m", m, "Subspace dimension");
  project_cmd->add_option("--guard-bits", guard_bits, "Extra binary digits of the counting grid");

  int trials = 20;
  double tolerance = 0.1;
  std::vector<double> kernel_exponents{0.5, 1.0};
  std::vector<double> ladder_thetas{0.5, 0.75, 0.9};
  auto* experiment = app.add_subcommand("experiment", "Finite-scale checks of projection and profile bounds");
  experiment->require_subcommand(1);
  auto* preservation = experiment->add_subcommand("preservation", "Box dimension preserved by typical projections");
  auto* sharpness = experiment->add_subcommand("sharpness", "Block construction: every projection stays below d");
  auto* ladder = experiment->add_subcommand("profile-ladder", "Profile lower bound in terms of Assouad-type data");
  for (auto* sub : {preservation, sharpness, ladder}) {
    detail::add_common(sub, common);
    detail::add_set(sub, set, false);
    sub->add_option("--tolerance", tolerance, "Finite-scale tolerance");
  }
  for (auto* sub : {preservation, sharpness}) {
    sub->add_option("--m", m, "Subspace dimension");
    sub->add_option("--trials", trials, "Number of random subspaces");
    sub->add_option("--guard-bits", guard_bits, "Extra binary digits of the counting grid");
  }
  ladder->add_option("--kernel-s", kernel_exponents, "Kernel exponents")->delimiter(',');
  ladder->add_option("--theta", ladder_thetas, "Values of theta")->delimiter(',');

  std::string b_ubd, b_lbd, b_ad, b_qad, b_theta, b_s, b_sharp_s, b_sharp_t;
  int b_m = 1, b_n = 2;
  auto* bounds = app.add_subcommand("bounds", "Closed-form projection bounds with exact rational arithmetic");
  detail::add_common(bounds, common);
  bounds->add_option("--m", b_m, "Subspace dimension")->required();
  bounds->add_option("--n", b_n, "Ambient dimension")->required();
  bounds->add_option("--ubd", b_ubd, "Upper box dimension")->required();
  bounds->add_option("--lbd", b_lbd, "Lower box dimension");
  bounds->add_option("--ad", b_ad, "Assouad dimension (default n)");
  bounds->add_option("--qad", b_qad, "Quasi-Assouad dimension (default ad)");
  bounds->add_option("--theta", b_theta, "Evaluate the spectrum bound at this theta");
  bounds->add_option("--s", b_s, "Exponent in (0, m) for the exceptional-set bound");
  bounds->add_option("--sharp-s", b_sharp_s, "Block construction: s");
  bounds->add_option("--sharp-t", b_sharp_t, "Block construction: t");

  std::string counts_path, report_name = "report";
  std::optional<double> report_ubd, report_ad;
  auto* report = app.add_subcommand("report", "CSV and SVG plots from a k,count table");
  detail::add_common(report, common);
  report->add_option("--counts", counts_path, "CSV with header k,count");
  report->add_option("--name", report_name, "Output file stem");
  report->add_option("--ubd", report_ubd, "Marker position on the region diagram");
  report->add_option("--ad", report_ad, "Marker position on the region diagram");

  try {
    args = detail::merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return exit_code::ok;
    err << app.help();
    return exit_code::invalid_input;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::invalid_input;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::size_limit;
  }

  try {
    // ----------------------------------------------------------------- construct
    if (construct->parsed()) {
      const auto digits = set.build();
      detail::warn(err, digits);
      const auto cloud = enumerate_cloud(digits, set.dim(), enumerate_depth.value_or(std::min(digits.depth(), 62)));
      std::ostringstream csv;
      write_cloud_csv(csv, cloud);
      out << csv.str();
      if (!common.out.empty()) {
        write_file(detail::path_in(common.out, "set.txt"), to_text(digits) + "\n");
        write_file(detail::path_in(common.out, "cloud.csv"), csv.str());
      }
      return exit_code::ok;
    }

    // ------------------------------------------------------------------ boxdim
    if (boxdim->parsed()) {
      const auto schedule = common.schedule_or("8:40:2");
      std::vector<CsvRow> rows;
      BoxDimensionEstimate est;
      if (set.has_cloud()) {
        const auto cloud = set.load_cloud();
        est = box_dim_estimate(cloud, schedule);
        for (int k : schedule.exponents()) rows.push_back({std::to_string(k), std::to_string(box_count(cloud, k))});
      } else {
        const auto digits = set.build();
        detail::warn(err, digits);
        est = box_dim_estimate(DigitProduct{digits, set.dim()}, schedule);
        for (int k : schedule.exponents())
          rows.push_back({std::to_string(k), exact_count(digits, set.dim(), k).to_string()});
      }
      const auto csv = detail::csv_text({"k", "count"}, rows);
      out << csv << "# lower=" << num(est.lower.slope) << " upper=" << num(est.upper.slope) << '\n';
      if (!common.out.empty()) write_file(detail::path_in(common.out, "boxdim.csv"), csv);
      return exit_code::ok;
    }

    // -------------------------------------------------------- spectrum/assouad
    if (spectrum->parsed() || assouad->parsed()) {
      const auto schedule = common.schedule_or("8:40:2");
      std::optional<PointCloud> cloud;
      std::optional<DigitProduct> product;
      if (set.has_cloud()) {
        cloud = set.load_cloud();
      } else {
        product = DigitProduct{set.build(), set.dim()};
        detail::warn(err, product->set);
      }
      if (spectrum->parsed()) {
        std::vector<CsvRow> rows;
        for (double th : thetas) {
          require(th > 0.0 && th < 1.0, "theta must lie in (0, 1)");
          const auto fit =
              cloud ? assouad_spectrum_estimate(*cloud, th, schedule) : assouad_spectrum_estimate(*product, th, schedule);
          rows.push_back({num(th), num(fit.slope)});
        }
        const auto csv = detail::csv_text({"theta", "estimate"}, rows);
        out << csv;
        if (!common.out.empty()) write_file(detail::path_in(common.out, "spectrum.csv"), csv);
        return exit_code::ok;
      }
      const auto q = cloud ? quasi_assouad_estimate(*cloud, schedule) : quasi_assouad_estimate(*product, schedule);
      std::ostringstream text;
      text << "assouad=" << num(q.assouad) << '\n' << "quasi_assouad=" << num(q.value) << '\n';
      for (const auto& [th, v] : q.spectrum) text << "spectrum(" << num(th) << ")=" << num(v) << '\n';
      if (product) {
        const auto dims = analytic_dims(product->set, product->dim);
        text << "analytic_assouad=" << num(dims.assouad) << '\n' << "analytic_box=" << num(dims.box) << '\n';
      }
      out << text.str();
      if (!common.out.empty()) write_file(detail::path_in(common.out, "assouad.txt"), text.str());
      return exit_code::ok;
    }

    // ---------------------------------------------------------------- capacity
    if (capacity_cmd->parsed()) {
      require(r > 0.0 && r < 1.0, "--r must lie in (0, 1)");
      PointCloud cloud;
      if (set.has_cloud()) {
        cloud = set.load_cloud();
      } else {
        const auto digits = set.build();
        detail::warn(err, digits);
        const int k = static_cast<int>(std::ceil(-std::log2(r)));
        cloud = enumerate_cloud(digits, set.dim(), enumerate_depth.value_or(std::min(digits.depth(), k + 4)));
      }
      const auto result = capacity(cloud, r, kernel_s);
      std::ostringstream text;
      text << "capacity=" << num(result.capacity) << '\n'
           << "certified_lower=" << num(result.certified_lower) << '\n'
           << "energy=" << num(result.energy) << '\n'
           << "support_size=" << result.support_size << '\n'
           << "reduced=" << (result.reduced ? "true" : "false") << '\n';
      if (theta || alpha || beta) {
        require(theta && alpha && beta, "--theta, --alpha and --beta must be given together");
        const auto b = proof_measure_bound(cloud, r, kernel_s, *theta, *alpha, *beta);
        text << "separated_count=" << b.separated_count << '\n'
             << "proof_bound=" << num(b.bound) << '\n'
             << "uniform_energy=" << num(b.uniform_energy) << '\n'
             << "ring_energy_bound=" << num(b.ring_energy_bound) << '\n';
      }
      out << text.str();
      if (!common.out.empty()) write_file(detail::path_in(common.out, "capacity.txt"), text.str());
      return exit_code::ok;
    }

    // ----------------------------------------------------------------- profile
    if (profile->parsed()) {
      const auto schedule = common.schedule_or("4:12:2");
      ProfileEstimate est;
      if (set.has_cloud()) {
        est = profile_estimate(set.load_cloud(), kernel_s, schedule);
      } else {
        const auto digits = set.build();
        detail::warn(err, digits);
        est = profile_estimate(DigitProduct{digits, set.dim()}, kernel_s, schedule);
      }
      std::vector<CsvRow> rows;
      for (std::size_t i = 0; i < schedule.size(); ++i)
        for (const auto* fit : {&est.lower, &est.upper})
          rows.push_back({num(kernel_s), std::to_string(schedule.exponents()[i]), num(std::log2(est.capacities[i])),
                          to_string(fit->mode), num(fit->slope)});
      const auto csv = detail::csv_text({"s", "k", "capacity_log2", "slope_mode", "slope"}, rows);
      out << csv;
      if (!common.out.empty()) write_file(detail::path_in(common.out, "profile.csv"), csv);
      return exit_code::ok;
    }

    // ----------------------------------------------------------------- project
    if (project_cmd->parsed()) {
      if (set.has_cloud()) {
        const auto cloud = set.load_cloud();
        const auto v = sample_subspace(cloud.ambient_dim(), m, common.seed);
        std::ostringstream csv;
        write_cloud_csv(csv, project(cloud, v));
        out << csv.str();
        if (!common.out.empty()) write_file(detail::path_in(common.out, "projection.csv"), csv.str());
        return exit_code::ok;
      }
      const auto digits = set.build();
      detail::warn(err, digits);
      const int n = set.dim();
      const auto schedule = common.schedule_or("8:16:2");
      const auto v = m == n ? Subspace::coordinate(n, n) : sample_subspace(n, m, common.seed);
      ProjectionCountOptions opts;
      opts.guard_bits = guard_bits;
      const auto counts = project_counts(digits, n, std::min(digits.depth(), 60), v, schedule.exponents(), opts);
      std::vector<CsvRow> rows;
      std::vector<XYPair> series;
      for (const auto& c : counts) {
        rows.push_back({std::to_string(c.k), std::to_string(c.count), std::to_string(c.lo), std::to_string(c.hi)});
        series.push_back({static_cast<double>(c.k), std::log2(static_cast<double>(c.count))});
      }
      const auto fits = fit_both(series);
      const auto csv = detail::csv_text({"k", "count", "count_lo", "count_hi"}, rows);
      out << csv << "# lower=" << num(fits.lower.slope) << " upper=" << num(fits.upper.slope) << '\n';
      if (!common.out.empty()) write_file(detail::path_in(common.out, "project.csv"), csv);
      return exit_code::ok;
    }

    // -------------------------------------------------------------- experiment
    if (preservation->parsed() || sharpness->parsed()) {
      const bool preserve = preservation->parsed();
      if (preserve && set.set_text.empty()) {
        // Default fixture: digits congruent to 0 or 1 mod 5 in the plane.
        if (!preservation->get_option("--q")->count()) set.q = 5;
        if (!preservation->get_option("--residues")->count()) set.residues = {0, 1};
        if (!preservation->get_option("--n")->count()) set.n = 2;
        if (!preservation->get_option("--depth")->count()) set.depth = 60;
      }
      if (!preserve && set.set_text.empty()) set.type = "blocks";
      const auto digits = set.build();
      detail::warn(err, digits);
      const int n = set.dim();
      const auto schedule = common.schedule_or("8:22:2");
      ProjectionCountOptions opts;
      opts.guard_bits = guard_bits;
      const auto result = projection_experiment(digits, n, m, trials, schedule, common.seed, opts);

      bool pass = false;
      std::string claim;
      std::ostringstream summary;
      summary << "trials=" << trials << '\n'
              << "min_upper=" << num(result.min_upper) << '\n'
              << "median_upper=" << num(result.median_upper) << '\n'
              << "max_upper=" << num(result.max_upper) << '\n'
              << "source_upper=" << num(result.source.upper.slope) << '\n'
              << "analytic_box=" << num(result.analytic.box) << '\n'
              << "analytic_assouad=" << num(result.analytic.assouad) << '\n';
      if (result.bounds) {
        summary << "general_lower=" << num(result.bounds->general_lower) << '\n'
                << "general_upper=" << num(result.bounds->general_upper) << '\n';
      }
      if (preserve) {
        const double target = std::min<double>(m, result.analytic.box);
        claim = "if qad F <= max{m, ubd F} then ubd pi_V F = min{m, ubd F} for almost every V";
        summary << "target=" << num(target) << '\n';
        pass = result.median_upper >= target - tolerance;
      } else {
        require(result.sharpness.has_value(), "experiment sharpness: the set is not a block construction");
        claim = "for the block construction, ubd pi_V F <= mst/(m(s-t)+st) for every V";
        summary << "d=" << num(*result.sharpness) << '\n';
        if (result.bounds)
          summary << "d_equals_general_lower="
                  << (std::abs(*result.sharpness - result.bounds->general_lower) < 1e-12 ? "true" : "false")
                  << '\n';
        pass = result.max_upper <= *result.sharpness + tolerance;
      }

      std::vector<CsvRow> rows;
      for (const auto& trial : result.trials)
        for (const auto& c : trial.counts)
          rows.push_back({std::to_string(trial.trial), std::to_string(trial.seed), std::to_string(c.k),
                          std::to_string(c.lo), std::to_string(c.hi), num(trial.upper.slope)});
      out << "claim: " << claim << '\n' << summary.str() << (pass ? "PASS" : "FAIL") << '\n';
      if (!common.out.empty()) {
        ExperimentResult er;
        er.name = preserve ? "preservation" : "sharpness";
        er.header = {"trial", "seed", "k", "count_lo", "count_hi", "slope_upper"};
        er.rows = rows;
        const auto& median_trial = *std::min_element(result.trials.begin(), result.trials.end(),
                                                     [&](const auto& a, const auto& b) {
                                                       return std::abs(a.upper.slope - result.median_upper) <
                                                              std::abs(b.upper.slope - result.median_upper);
                                                     });
        for (const auto& c : median_trial.counts)
          er.series.push_back({static_cast<double>(c.k), std::log2(static_cast<double>(c.count))});
        er.fits.push_back({"limsup", median_trial.upper.slope, median_trial.upper.intercept});
        if (m == 1 && n == 2) er.region_point = XYPair{result.analytic.box, result.analytic.assouad};
        emit_report({er}, common.out);
        write_file(detail::path_in(common.out, er.name + "_summary.txt"),
                   "claim: " + claim + "\n" + summary.str() + (pass ? "PASS\n" : "FAIL\n"));
      }
      return pass ? exit_code::ok : 1;
    }

    if (ladder->parsed()) {
      if (set.set_text.empty() && !ladder->get_option("--depth")->count()) set.depth = 16;
      const auto digits = set.build();
      detail::warn(err, digits);
      const DigitProduct product{digits, set.dim()};
      const auto schedule = common.schedule_or("4:16:2");
      const auto box = box_dim_estimate(product, schedule).upper.slope;
      const auto ad = assouad_estimate(product, schedule).slope;
      const auto claim = "upper s-profile >= ubd F - max{0, spectrum(theta) - s, (ad F - s)(1 - theta)}";
      out << "claim: " << claim << '\n' << "box_upper=" << num(box) << '\n' << "assouad=" << num(ad) << '\n';
      std::vector<CsvRow> rows;
      bool pass = true;
      for (double s : kernel_exponents) {
        const auto prof = profile_estimate(product, s, schedule).upper.slope;
        for (double th : ladder_thetas) {
          const double spectrum_value = assouad_spectrum_estimate(product, th, schedule).slope;
          const double rhs = box - std::max({0.0, spectrum_value - s, (ad - s) * (1.0 - th)});
          const bool ok = prof >= rhs - tolerance;
          pass = pass && ok;
          rows.push_back({num(s), num(th), num(prof), num(rhs), ok ? "PASS" : "FAIL"});
        }
      }
      const auto csv = detail::csv_text({"s", "theta", "profile_upper", "bound", "status"}, rows);
      out << csv << (pass ? "PASS" : "FAIL") << '\n';
      if (!common.out.empty()) write_file(detail::path_in(common.out, "profile_ladder.csv"), csv);
      return pass ? exit_code::ok : 1;
    }

    // ------------------------------------------------------------------ bounds
    if (bounds->parsed()) {
      BoundInputs<Rational> in;
      in.m = b_m;
      in.n = b_n;
      in.ubd = Rational::parse(b_ubd);
      in.ad = b_ad.empty() ? Rational(b_n) : Rational::parse(b_ad);
      if (!b_lbd.empty()) in.lbd = Rational::parse(b_lbd);
      if (!b_qad.empty()) in.qad = Rational::parse(b_qad);
      if (!b_theta.empty()) in.theta = Rational::parse(b_theta);
      if (!b_s.empty()) in.s = Rational::parse(b_s);
      if (!b_sharp_s.empty() || !b_sharp_t.empty()) {
        require(!b_sharp_s.empty() && !b_sharp_t.empty(), "--sharp-s and --sharp-t must be given together");
        in.sharp_s = Rational::parse(b_sharp_s);
        in.sharp_t = Rational::parse(b_sharp_t);
      }
      const auto rep = bound_formulas(in);
      std::ostringstream text;
      auto line = [&](const std::string& key, const Rational& v) {
        text << key << '=' << v << " (" << num(v.to_double()) << ")\n";
      };
      auto flag = [&](const std::string& key, bool v) { text << key << '=' << (v ? "true" : "false") << '\n'; };
      line("general_lower", rep.general_lower);
      line("general_upper", rep.general_upper);
      if (rep.general_lower_lbd) line("general_lower_lbd", *rep.general_lower_lbd);
      line("threshold", rep.threshold);
      flag("improvement_applies", rep.improvement_applies);
      line("improvement_theta", rep.improvement_theta);
      line("improvement_bound", rep.improvement_bound);
      flag("preservation_applies", rep.preservation_applies);
      line("preserved_value", rep.preserved_value);
      line("drop_bound", rep.drop_bound);
      flag("exceptional_applies", rep.exceptional_applies);
      line("exceptional_dimension", rep.exceptional_dimension);
      if (rep.exceptional_dimension_at_s) line("exceptional_dimension_at_s", *rep.exceptional_dimension_at_s);
      if (rep.exceptional_bound) line("exceptional_bound", *rep.exceptional_bound);
      if (rep.at_theta) {
        line("spectrum_at_theta", rep.at_theta->spectrum);
        line("bound_at_theta", rep.at_theta->bound);
      }
      if (rep.at_theta_lbd) line("lower_bound_at_theta", rep.at_theta_lbd->bound);
      line("best_theta", rep.best.theta);
      line("best_bound", rep.best.bound);
      if (rep.sharpness) line("sharpness_d", *rep.sharpness);
      out << text.str();
      if (!common.out.empty()) write_file(detail::path_in(common.out, "bounds.txt"), text.str());
      return exit_code::ok;
    }

    // ------------------------------------------------------------------ report
    if (report->parsed()) {
      require(!common.out.empty(), "report: --out is required");
      std::vector<ExperimentResult> results;
      if (!counts_path.empty()) {
        ExperimentResult er;
        er.name = report_name;
        er.header = {"k", "count", "log2_count"};
        std::istringstream in(read_file(counts_path));
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
          line = trim(line);
          if (line.empty() || line[0] == '#') continue;
          if (header) {
            require(line == "k,count", "report: expected header k,count");
            header = false;
            continue;
          }
          const auto fields = split(line, ',');
          require(fields.size() == 2, "report: malformed row '" + line + "'");
          double log2_count = 0.0;
          try {
            log2_count = fields[1].rfind("2^", 0) == 0 ? std::stod(fields[1].substr(2)) : std::log2(std::stod(fields[1]));
            er.series.push_back({std::stod(fields[0]), log2_count});
          } catch (const std::exception&) {
            throw InvalidInput("report: malformed row '" + line + "'");
          }
          er.rows.push_back({fields[0], fields[1], num(log2_count)});
        }
        if (er.series.size() >= 3) {
          const auto fits = fit_both(er.series);
          er.fits.push_back({"liminf", fits.lower.slope, fits.lower.intercept});
          er.fits.push_back({"limsup", fits.upper.slope, fits.upper.intercept});
        }
        if (report_ubd && report_ad) er.region_point = XYPair{*report_ubd, *report_ad};
        results.push_back(std::move(er));
      }
      for (const auto& path : emit_report(results, common.out)) out << path << '\n';
      return exit_code::ok;
    }
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::size_limit;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::size_limit;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::invalid_input;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::invalid_input;
  }
  err << app.help();
  return exit_code::invalid_input;
}

}  // namespace dimprof::cli

// squeezelab: reproduce the worked examples, evaluate witnesses on state
// files and run the randomized verification suite.
//
// exit codes: 0 ok, 1 verification failure, 2 usage/parse error,
// 3 numerical inconsistency

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "squeezelab/csv.hpp"
#include "squeezelab/dynamics.hpp"
#include "squeezelab/io.hpp"
#include "squeezelab/verify.hpp"
#include "squeezelab/witness.hpp"
#include "squeezelab/worked_examples.hpp"

namespace sl = squeezelab;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sl::ParseError("cannot write " + path);
  return out;
}

void write_curve_csv(const sl::ExampleCurve& c, const std::string& path) {
  auto out = open_out(path);
  sl::write_csv(out, c.parameter, c.labels, c.grid, c.series);
  if (!out) throw sl::ParseError("write failed: " + path);
}

// gnuplot script plotting every series of `c` from `csv`.
void write_plot(const sl::ExampleCurve& c, const std::string& csv, const std::string& path) {
  auto out = open_out(path);
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << c.parameter << "'\n"
      << "set grid\n"
      << "set arrow from graph 0, first 0 to graph 1, first 0 nohead dt 2\n"
      << "plot ";
  for (std::size_t k = 0; k < c.labels.size(); ++k) {
    if (k) out << ", \\\n     ";
    out << "'" << csv << "' using 1:" << k + 2 << " with lines";
  }
  out << "\n";
}

// "out.csv" -> "out_<tag>.csv"
std::string tagged(const std::string& path, const std::string& tag) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + tag;
  return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

std::string plot_path(const std::string& csv) {
  const auto dot = csv.find_last_of('.');
  const auto slash = csv.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv + ".gp";
  return csv.substr(0, dot) + ".gp";
}

void summarize_violations(const sl::ExampleCurve& c, const std::string& label) {
  const auto& mask = c.mask(label);
  const auto& v = c.at(label);
  long count = 0;
  std::size_t first = mask.size(), last = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      ++count;
      first = std::min(first, i);
      last = i;
    }
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[argmin]) argmin = i;
  std::cout << label << ": ";
  if (count == 0) {
    std::cout << "never violated";
  } else {
    std::cout << "violated at " << count << "/" << mask.size() << " points, " << c.parameter << " in ["
              << sl::format_number(c.grid[first]) << ", " << sl::format_number(c.grid[last]) << "]";
  }
  std::cout << "; min " << sl::format_number(v[argmin]) << " at " << c.parameter << " = "
            << sl::format_number(c.grid[argmin]) << "\n";
}

int cmd_example1(int steps, const std::string& out, bool plot) {
  const sl::ExampleCurve c = sl::example1_curve(sl::linspace(0.0, 1.0, steps));
  write_curve_csv(c, out);
  if (plot) write_plot(c, out, plot_path(out));
  summarize_violations(c, "L");
  summarize_violations(c, "G");
  return 0;
}

int cmd_example2(int n, double theta_max, int steps, const std::string& suite, const std::string& out,
                 const std::string& form, bool plot) {
  const auto grid = sl::linspace(0.0, theta_max, steps);
  sl::InvariantOptions opts;
  opts.form = form == "printed" ? sl::InvariantForm::as_printed : sl::InvariantForm::consistent;
  const sl::Spin one = sl::Spin::from_twice(2);
  const sl::OneAxisTwisting evolution(n, one);
  const bool both = suite == "both";
  if (suite == "spin" || both) {
    const auto c = sl::curve_from_sweep(
        sl::sweep(evolution, grid, sl::collective_spin(one, n), sl::SweepSuite::original_invariant));
    const std::string path = both ? tagged(out, "spin") : out;
    write_curve_csv(c, path);
    if (plot) write_plot(c, path, plot_path(path));
    for (const auto& label : c.labels) {
      const auto& v = c.at(label);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      std::cout << label << ": range [" << sl::format_number(*lo) << ", " << sl::format_number(*hi) << "]\n";
    }
  }
  if (suite == "dichotomic" || both) {
    const auto c = sl::curve_from_sweep(sl::sweep(evolution, grid, sl::example_dichotomic_triple(n),
                                                  sl::SweepSuite::generalized_invariant, opts));
    const std::string path = both ? tagged(out, "dichotomic") : out;
    write_curve_csv(c, path);
    if (plot) write_plot(c, path, plot_path(path));
    std::cout << "form: " << sl::to_string(opts.form) << "\n";
    for (const auto& label : c.labels) summarize_violations(c, label);
  }
  return 0;
}

int cmd_witness(const std::string& state_path, const std::string& observables, const std::string& suite,
                const std::string& report, const std::string& form, double tolerance, int n_fixed,
                bool verbose) {
  const sl::MultiSpinState state = sl::load_state(state_path);
  const sl::ObservableTriple triple = sl::parse_observables(observables, state.sites(), state.local_dim());
  sl::ojson doc;
  if (suite == "invariant") {
    if (triple.kind == sl::TripleKind::dichotomic) {
      sl::InvariantOptions opts;
      opts.form = form == "printed" ? sl::InvariantForm::as_printed : sl::InvariantForm::consistent;
      opts.tolerance = tolerance;
      doc = sl::to_json(sl::generalized_invariant_report(state, triple, opts), verbose);
    } else {
      const sl::MomentSet ms = sl::moments(state, triple);
      if (std::abs(ms.n_mean - triple.sites) > 1e-9 || ms.n_variance() > 1e-10)
        throw sl::PreconditionError("spin invariant suite needs a fixed particle number");
      const sl::InvariantMatrices m = sl::build_invariant_spin(state, triple);
      const auto f = sl::original_invariant_suite(m, triple.spin, triple.sites);
      doc["suite"] = "original-invariant";
      doc["n_mean"] = ms.n_mean;
      sl::ojson margins = sl::ojson::object();
      for (int k = 0; k < 4; ++k) margins["F" + std::to_string(k + 1)] = f[k];
      doc["margins"] = margins;
      const double worst = *std::min_element(f.begin(), f.end());
      doc["verdict"] = sl::to_string(worst < -tolerance ? sl::Verdict::entangled_detected
                                                        : sl::Verdict::not_detected);
      if (verbose) {
        doc["C"] = sl::matrix_json(m.C);
        doc["gamma"] = sl::matrix_json(m.gamma);
        doc["Q"] = sl::matrix_json(*m.Q);
        doc["X"] = sl::matrix_json(m.X);
      }
    }
  } else {
    sl::ReportOptions opts;
    opts.tolerance = tolerance;
    if (n_fixed > 0) opts.n_fixed = n_fixed;
    const sl::Suite s = suite == "original" ? sl::Suite::original
                        : suite == "naive"  ? sl::Suite::naive
                                            : sl::Suite::generalized;
    const sl::WitnessReport r = sl::full_report(state, triple, s, opts);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    doc = sl::to_json(r);
  }
  const std::string text = doc.dump(2) + "\n";
  if (report.empty() || report == "-") {
    std::cout << text;
  } else {
    auto out = open_out(report);
    out << text;
  }
  return 0;
}

int cmd_verify(const sl::VerifyConfig& cfg, const std::string& summary_path) {
  const sl::VerifySummary s = sl::run_verification(cfg);
  for (const auto& c : s.checks) {
    std::printf("%-22s %7ld trials  min margin %-22s %s\n", c.name.c_str(), c.trials,
                c.trials ? sl::format_number(c.min_margin).c_str() : "-", c.passed() ? "ok" : "FAIL");
    if (!c.passed()) {
      std::printf("  %ld failures; seeds:", c.failures);
      for (auto seed : c.failing_seeds) std::printf(" %llu", static_cast<unsigned long long>(seed));
      std::printf("\n");
    }
  }
  if (!summary_path.empty()) {
    auto out = open_out(summary_path);
    out << sl::to_json(s).dump(2) << "\n";
  }
  std::fflush(stdout);
  return s.passed() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized spin-squeezing witnesses"};
  app.require_subcommand(1);

  auto* ex1 = app.add_subcommand("example1", "two spin-1 sites in rho(p): naive vs generalized margin");
  int ex1_steps = 101;
  std::string ex1_out = "example1.csv";
  bool ex1_plot = false;
  ex1->add_option("--steps", ex1_steps, "grid points on [0, 1]")->check(CLI::PositiveNumber);
  ex1->add_option("--out", ex1_out, "CSV path");
  ex1->add_flag("--plot", ex1_plot, "also write a gnuplot script next to the CSV");

  auto* ex2 = app.add_subcommand("example2", "one-axis twisting sweep of the frame-independent suites");
  int ex2_n = 5;
  double ex2_theta_max = 2.0 * std::numbers::pi;
  int ex2_steps = 200;
  std::string ex2_suite = "both";
  std::string ex2_out = "example2.csv";
  std::string ex2_form = "consistent";
  bool ex2_plot = false;
  ex2->add_option("--n", ex2_n, "number of spin-1 sites")->check(CLI::PositiveNumber);
  ex2->add_option("--theta-max", ex2_theta_max, "upper end of the theta grid");
  ex2->add_option("--steps", ex2_steps, "grid points on [0, theta-max]")->check(CLI::PositiveNumber);
  ex2->add_option("--suite", ex2_suite)->check(CLI::IsMember({"spin", "dichotomic", "both"}));
  ex2->add_option("--out", ex2_out, "CSV path (both: _spin/_dichotomic are inserted)");
  ex2->add_option("--invariant-form", ex2_form)->check(CLI::IsMember({"consistent", "printed"}));
  ex2->add_flag("--plot", ex2_plot, "also write gnuplot scripts");

  auto* wit = app.add_subcommand("witness", "evaluate a witness suite on a JSON state file");
  std::string w_state, w_obs, w_suite = "generalized", w_report, w_form = "consistent";
  double w_tol = sl::kVerdictTolerance;
  int w_nfixed = 0;
  bool w_verbose = false;
  wit->add_option("--state", w_state, "state file")->required();
  wit->add_option("--observables", w_obs, "spin:<j> | dichotomic:<m0>,<m1>[,factor] | projector:<file>")
      ->required();
  wit->add_option("--suite", w_suite)->check(CLI::IsMember({"generalized", "original", "invariant", "naive"}));
  wit->add_option("--report", w_report, "JSON output path (default stdout)");
  wit->add_option("--invariant-form", w_form)->check(CLI::IsMember({"consistent", "printed"}));
  wit->add_option("--tolerance", w_tol)->check(CLI::PositiveNumber);
  wit->add_option("--n-fixed", w_nfixed, "particle number for the original suite");
  wit->add_flag("--verbose", w_verbose, "include correlation matrices");

  auto* ver = app.add_subcommand("verify", "randomized property suite");
  sl::VerifyConfig vcfg;
  std::string v_summary;
  ver->add_option("--trials", vcfg.trials)->check(CLI::NonNegativeNumber);
  ver->add_option("--seed", vcfg.seed);
  ver->add_option("--max-sites", vcfg.max_sites)->check(CLI::Range(2, 12));
  ver->add_option("--local-dims", vcfg.local_dims)->delimiter(',')->check(CLI::Range(2, 16));
  ver->add_option("--tolerance", vcfg.tolerance)->check(CLI::PositiveNumber);
  ver->add_option("--checks", vcfg.checks, "subset of checks to run")->delimiter(',');
  ver->add_option("--summary", v_summary, "JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    sl::load_dimension_cap_from_env();
    if (*ex1) return cmd_example1(ex1_steps, ex1_out, ex1_plot);
    if (*ex2) return cmd_example2(ex2_n, ex2_theta_max, ex2_steps, ex2_suite, ex2_out, ex2_form, ex2_plot);
    if (*wit) return cmd_witness(w_state, w_obs, w_suite, w_report, w_form, w_tol, w_nfixed, w_verbose);
    if (*ver) return cmd_verify(vcfg, v_summary);
  } catch (const sl::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const sl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

// Command-line front end: quench, masses, spectrum, verify, sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hexhadron/cli.hpp"

namespace hx = hexhadron;
namespace cli = hexhadron::cli;

namespace {

// Flags that mirror config keys. Anything set here overrides the file.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key = value config file");
    for (const auto& key : cli::config_keys()) {
      app->add_option("--" + key, values[key], "override config key '" + key + "'");
    }
  }

  cli::KeyValues merged() const {
    cli::KeyValues kv = config_path.empty() ? cli::KeyValues{} : cli::read_config_file(config_path);
    for (const auto& [k, v] : values) {
      if (!v.empty()) kv[k] = v;
    }
    return kv;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = cli::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confinement dynamics on the infinite heavy-hex lattice"};
  app.require_subcommand(1);
  // -h would collide with the --h field option; subcommands inherit this
  app.set_help_flag("--help", "print this help and exit");

  ConfigFlags quench_flags;
  bool verbose = false;
  auto* quench = app.add_subcommand("quench", "run a quench and write timeseries.csv");
  quench_flags.add_to(quench);
  quench->add_flag("-v,--verbose", verbose, "print each recorded row");

  double m_j = 1.0, m_h = 0.0;
  std::string m_out;
  auto* masses = app.add_subcommand("masses", "print the five masses and their differences");
  masses->add_option("--j", m_j, "coupling J")->default_val(1.0);
  masses->add_option("--h", m_h, "transverse field h")->default_val(0.0);
  masses->add_option("-o,--out-dir", m_out, "write masses.csv and mass_differences.csv here");

  std::string s_input, s_out = ".";
  std::vector<std::string> s_channels{"mz_A", "mz_B"};
  double s_tmin = 10.0, s_tmax = 100.0, s_j = 1.0, s_h = 0.0, s_threshold = 0.05;
  std::size_t s_pad = 4;
  auto* spectrum = app.add_subcommand("spectrum", "FFT a time series and match peaks to the mass lines");
  spectrum->add_option("input", s_input, "timeseries.csv from quench")->required();
  spectrum->add_option("--channel", s_channels, "columns to analyse")->delimiter(',');
  spectrum->add_option("--t-min", s_tmin, "window start")->default_val(10.0);
  spectrum->add_option("--t-max", s_tmax, "window end")->default_val(100.0);
  spectrum->add_option("--j", s_j, "coupling J")->default_val(1.0);
  spectrum->add_option("--h", s_h, "transverse field h")->default_val(0.0);
  spectrum->add_option("--threshold", s_threshold, "relative peak threshold")->default_val(0.05);
  spectrum->add_option("--pad", s_pad, "zero-padding factor")->default_val(4);
  spectrum->add_option("-o,--out-dir", s_out, "output directory");

  std::string v_level = "quick";
  bool v_corrupt = false;
  auto* verify = app.add_subcommand("verify", "run the built-in checks");
  verify->add_option("level", v_level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--corrupt-coupling", v_corrupt, "replace sqrt(2) h by h in the model (must fail)");

  ConfigFlags sweep_flags;
  std::string w_h, w_chi;
  auto* sweep = app.add_subcommand("sweep", "run several quenches concurrently");
  sweep_flags.add_to(sweep);
  sweep->add_option("--h-list", w_h, "comma-separated h values");
  sweep->add_option("--chi-list", w_chi, "comma-separated chi_max values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  try {
    if (quench->parsed()) {
      const hx::QuenchConfig cfg = cli::apply_config(quench_flags.merged());
      const auto man = cli::cmd_quench(cfg, verbose ? &std::cerr : nullptr);
      for (const auto& w : man.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& o : man.outputs) std::cout << o << '\n';
      return cli::kOk;
    }
    if (masses->parsed()) {
      const hx::MassSpectrum m = hx::quasiparticle_masses(m_j, m_h);
      if (m_out.empty()) {
        cli::write_masses_csv(std::cout, std::cout, m);
      } else {
        std::filesystem::create_directories(m_out);
        std::ofstream fm = cli::open_out(std::filesystem::path(m_out) / "masses.csv");
        std::ofstream fd = cli::open_out(std::filesystem::path(m_out) / "mass_differences.csv");
        cli::write_masses_csv(fm, fd, m);
      }
      return cli::kOk;
    }
    if (spectrum->parsed()) {
      const hx::TimeSeries ts = cli::read_timeseries_csv(s_input);
      std::filesystem::create_directories(s_out);
      bool all_matched = true;
      for (const auto& ch : s_channels) {
        const auto r = cli::analyse_spectrum(ts, cli::parse_channel(ch), s_tmin, s_tmax, s_j, s_h, s_threshold, s_pad);
        const std::filesystem::path dir(s_out);
        cli::write_spectrum_csv(dir / ("spectrum_" + ch + ".csv"), r.spectrum);
        cli::write_peaks_csv(dir / ("peaks_" + ch + ".csv"), r.peaks);
        std::cout << ch << ": " << r.peaks.peaks.size() << " peaks, resolution " << r.peaks.resolution << '\n';
        for (const auto& p : r.peaks.peaks) {
          std::cout << "  omega=" << p.omega << " amp=" << p.amplitude;
          if (p.model_line) {
            std::cout << " line=" << *p.model_line << " delta=" << p.delta << '\n';
          } else {
            std::cout << " unmatched\n";
            all_matched = false;
          }
        }
      }
      if (!all_matched) std::cerr << "warning: some peaks match no model line\n";
      return cli::kOk;
    }
    if (verify->parsed()) {
      cli::VerifyOptions opt;
      opt.level = v_level == "full" ? cli::VerifyLevel::Full : cli::VerifyLevel::Quick;
      opt.corrupt_coupling = v_corrupt;
      const auto checks = cli::run_verify(opt);
      cli::print_report(std::cout, checks);
      for (const auto& c : checks) {
        if (!c.passed) return cli::kVerifyFailed;
      }
      return cli::kOk;
    }
    if (sweep->parsed()) {
      const cli::KeyValues base = sweep_flags.merged();
      const std::string root = base.count("out_dir") ? base.at("out_dir") : std::string("sweep");
      std::vector<std::string> hs = split_list(w_h), chis = split_list(w_chi);
      if (hs.empty()) hs.push_back(base.count("h") ? base.at("h") : "0");
      if (chis.empty()) chis.push_back(base.count("chi_max") ? base.at("chi_max") : "none");
      std::vector<hx::QuenchConfig> configs;
      for (const auto& h : hs) {
        for (const auto& chi : chis) {
          cli::KeyValues kv = base;
          kv["h"] = h;
          kv["chi_max"] = chi;
          kv["out_dir"] = (std::filesystem::path(root) / ("h" + h + "_chi" + chi)).string();
          configs.push_back(cli::apply_config(kv));
        }
      }
      const auto results = cli::run_sweep(configs, cli::worker_cap());
      int rc = cli::kOk;
      for (const auto& r : results) {
        std::cout << r.out_dir << ": " << (r.exit_code == 0 ? "ok" : r.message) << '\n';
        rc = std::max(rc, r.exit_code);
      }
      return rc;
    }
  } catch (const hx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  }
  return cli::kUsage;
}

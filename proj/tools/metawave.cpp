// Command-line front end. Talks to the library through the C API only.
#include "metawave/metawave.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::string out;
  int threads = 1;
  std::uint64_t seed = 20240101;
  int verify = 0;
};

struct CString {
  char *p = nullptr;
  ~CString() { mw_string_free(p); }
};

int report_error(mw_status s, const char *what) {
  std::fprintf(stderr, "metawave: %s failed (%s): %s\n", what, mw_status_name(s),
               mw_last_error());
  return mw_exit_code(s);
}

void print_summary(const json &r) {
  for (const auto &c : r["coeffs"])
    std::printf("%-7s alpha=%.6g |R|=%.6g |T|=%.6g\n",
                c["geometry"].get<std::string>().c_str(), c["alpha"].get<double>(),
                std::hypot(c["R"][0].get<double>(), c["R"][1].get<double>()),
                std::hypot(c["T"][0].get<double>(), c["T"][1].get<double>()));
  if (!r["cell"].is_null()) {
    const json &c = r["cell"];
    std::printf("cell n=%d alpha=%.6g A_eff=[[%.6g, %.6g], [%.6g, %.6g]]\n",
                c["n"].get<int>(), c["alpha"].get<double>(), c["A_eff"][0][0].get<double>(),
                c["A_eff"][0][1].get<double>(), c["A_eff"][1][0].get<double>(),
                c["A_eff"][1][1].get<double>());
    if (!c["gamma"].is_null())
      std::printf("cell gamma=%.10g\n", c["gamma"].get<double>());
    if (!c["mu_eff"].is_null())
      std::printf("cell mu_eff=%.10g%+.10gi\n", c["mu_eff"][0].get<double>(),
                  c["mu_eff"][1].get<double>());
  }
  for (const auto &f : r["fine"])
    std::printf("%-10s T_num=%.6g norm_QM=%.6g norm_inclusions=%.6g\n",
                f["mode"].get<std::string>().c_str(), f["T_num"].get<double>(),
                f["norm_QM"].get<double>(), f["norm_inclusions"].get<double>());
  if (!r["hmm"].is_null()) {
    const json &h = r["hmm"];
    std::printf("hmm T_num_macro=%.6g T_num_fine=%.6g rel_err_QL=%.6g rel_err_QM=%.6g\n",
                h["T_num_macro"].get<double>(), h["T_num_fine"].get<double>(),
                h["rel_err_QL"].get<double>(), h["rel_err_QM"].get<double>());
  }
  if (!r["sweep"].empty()) {
    int failed = 0;
    for (const auto &s : r["sweep"])
      failed += s["failed"].get<bool>() ? 1 : 0;
    std::printf("sweep rows=%zu failed=%d\n", r["sweep"].size(), failed);
  }
  for (const auto &w : r["warnings"])
    std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  for (const auto &f : r["failures"])
    std::fprintf(stderr, "failure in %s (%s): %s\n", f["stage"].get<std::string>().c_str(),
                 f["code"].get<std::string>().c_str(),
                 f["message"].get<std::string>().c_str());
}

int run(const std::string &stage, const Common &opt) {
  mw_config *raw = nullptr;
  mw_status s = opt.config.empty() ? mw_config_default(&raw)
                                   : mw_config_load(opt.config.c_str(), &raw);
  if (s != MW_OK)
    return report_error(s, "loading the config");
  std::unique_ptr<mw_config, void (*)(mw_config *)> cfg(raw, mw_config_free);
  if (!opt.out.empty() && (s = mw_config_set_out(cfg.get(), opt.out.c_str())) != MW_OK)
    return report_error(s, "setting the output directory");

  if (stage == "coeffs" && opt.verify > 0) {
    double dev = 0.0, energy = 0.0;
    if ((s = mw_check_slab_oracle(opt.verify, opt.seed, &dev, &energy)) != MW_OK)
      return report_error(s, "oracle check");
    const bool pass = dev < 1e-10 && energy < 1e-10;
    std::printf("oracle check draws=%d seed=%llu max_deviation=%.3e max_energy_defect=%.3e "
                "%s\n",
                opt.verify, static_cast<unsigned long long>(opt.seed), dev, energy,
                pass ? "PASS" : "FAIL");
    if (!pass)
      return 3;
  }

  mw_report *rep = nullptr;
  if ((s = mw_run(cfg.get(), stage.c_str(), opt.threads, 1, &rep)) != MW_OK)
    return report_error(s, stage.c_str());
  std::unique_ptr<mw_report, void (*)(mw_report *)> report(rep, mw_report_free);
  CString text;
  if ((s = mw_report_to_json(report.get(), &text.p)) != MW_OK)
    return report_error(s, "serialising the report");
  print_summary(json::parse(text.p));
  const mw_status st = mw_report_status(report.get());
  return mw_exit_code(st);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"metawave: meta-material transmission laboratory"};
  app.set_version_flag("--version", std::string(mw_version()));
  app.require_subcommand(1);

  Common opt;
  const std::pair<const char *, const char *> commands[] = {
      {"coeffs", "Closed-form slab coefficients for all four geometries"},
      {"cell", "Unit-cell effective tensors"},
      {"mu-sweep", "High-contrast mu_eff over a frequency grid"},
      {"solve-fine", "Fine-scale Helmholtz solves"},
      {"solve-hmm", "Homogenised macro solve with corrector reconstruction"},
      {"run", "Every mode of the config in dependency order"},
      {"sweep", "Frequency sweep of the configured modes"}};
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON scenario file (defaults if omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides the config)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1, 1024));
    sub->add_option("--seed", opt.seed, "Seed for randomised checks");
    if (std::string(name) == "coeffs")
      sub->add_option("--verify", opt.verify,
                      "Compare closed forms with the interface system on N random draws")
          ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}

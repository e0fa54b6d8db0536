#include "bsq/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "bsq/bohr_sommerfeld.hpp"
#include "bsq/parallel.hpp"
#include "bsq/spectral.hpp"
#include "bsq/symbols.hpp"
#include "bsq/theta_sections.hpp"
#include "bsq/torus_quant.hpp"

namespace bsq::cli {

namespace {

using nlohmann::ordered_json;

struct Common {
  std::string symbol_path;
  std::string out_dir;
  double nu = 4.0 * kPi;
};

struct Loaded {
  TrigSymbol sym;
  std::string origin;
};

Loaded load_symbol(const Common& c) {
  if (c.symbol_path.empty()) return {TrigSymbol::harper(), "builtin:harper"};
  return {TrigSymbol::load(c.symbol_path), c.symbol_path};
}

std::vector<int> levels(const std::optional<int>& k, const std::vector<int>& k_list) {
  std::vector<int> ks = k_list;
  if (k) ks.insert(ks.begin(), *k);
  if (ks.empty()) throw InputError("one of --k or --k-list is required");
  for (int v : ks) {
    if (v < 1) throw InputError("k must be a positive integer (got " + std::to_string(v) + ")");
  }
  return ks;
}

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

// Writes `name` into the output directory, or `text` to stdout when there is none.
void emit(const Common& c, const std::string& name, const std::string& text, std::ostream& out,
          bool primary) {
  if (!c.out_dir.empty()) {
    write_file_atomic(std::filesystem::path(c.out_dir) / name, text);
  } else if (primary) {
    out << text;
  }
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

int cmd_spectrum(const Common& c, const std::vector<int>& ks, std::ostream& out) {
  const Loaded L = load_symbol(c);
  auto spectra = parallel_map<SpectrumResult>(ks.size(), [&](std::size_t i) {
    return eigh(weyl_quantize(L.sym, QuantumTorusParams(ks[i])));
  });
  std::ostringstream csv;
  write_spectrum_csv(csv, spectra);
  emit(c, "spectrum.csv", csv.str(), out, true);
  return 0;
}

struct VerifyOptions {
  std::optional<double> e_cap;
  int resolution = 512;
  int grid_size = 200;
  std::vector<double> count_at;
};

int cmd_verify(const Common& c, const std::vector<int>& ks, const VerifyOptions& o,
               std::ostream& out) {
  const Loaded L = load_symbol(c);
  const SymplecticNormalization norm(c.nu);
  const double e_cap = o.e_cap ? *o.e_cap : default_e_cap(L.sym);
  auto profile = std::make_shared<const ActionProfile>(
      build_action_profile(L.sym, norm, e_cap, {o.grid_size, o.resolution}));
  std::vector<double> count_at = o.count_at;
  if (count_at.empty()) count_at.push_back(e_cap);

  struct Level {
    SpectrumResult spectrum;
    VerificationReport report;
  };
  auto results = parallel_map<Level>(ks.size(), [&](std::size_t i) {
    Level lv;
    lv.spectrum = eigh(weyl_quantize(L.sym, QuantumTorusParams(ks[i])));
    lv.report = verify(lv.spectrum, predict(profile, ks[i]), e_cap, count_at);
    return lv;
  });

  std::vector<VerificationReport> reports, zoom;
  ordered_json summary;
  summary["symbol"] = L.origin;
  summary["nu"] = norm.nu;
  summary["E_min"] = profile->E_min;
  summary["E_cap"] = e_cap;
  summary["E_sep"] = number(separatrix_energy(L.sym));
  summary["c0_prime_min"] = profile->c0_prime_min;
  summary["c0_prime_secant"] = profile->secant_c0_prime();
  summary["profile_grid_size"] = static_cast<int>(profile->E_grid.size());
  summary["profile_resolution"] = profile->resolution;
  summary["levels"] = ordered_json::array();
  for (const auto& lv : results) {
    const auto& rep = lv.report;
    reports.push_back(rep);
    // Lowest ten levels: [E_min, E_min + 10 * 2 pi / (k c0')].
    const double lo = profile->E_min;
    const double hi = lo + 10.0 * kTwoPi / (rep.k * profile->c0_prime_min);
    VerificationReport z = rep;
    z.rows.clear();
    for (const auto& r : rep.rows) {
      if (r.lambda >= lo && r.lambda <= hi) z.rows.push_back(r);
    }
    zoom.push_back(z);
    const auto& lam = lv.spectrum.eigenvalues;
    const long in_window =
        std::count_if(lam.begin(), lam.end(), [&](double l) { return l >= lo && l <= hi; });

    ordered_json lj;
    lj["k"] = rep.k;
    lj["rows"] = static_cast<int>(rep.rows.size());
    lj["max_residual"] = rep.max_residual();
    lj["gap_ratio"] = {{"count", static_cast<int>(rep.gaps.count)},
                       {"mean", rep.gaps.mean},
                       {"min", rep.gaps.min},
                       {"max", rep.gaps.max}};
    lj["counts"] = ordered_json::array();
    for (const auto& cc : rep.counts) {
      lj["counts"].push_back(
          {{"E", cc.E}, {"count", cc.count}, {"expected", cc.expected}, {"defect", cc.defect}});
    }
    lj["window"] = {{"lo", lo}, {"hi", hi}, {"eigenvalue_count", in_window}};
    summary["levels"].push_back(lj);
  }

  std::ostringstream csv, zcsv;
  write_report_csv(csv, reports);
  write_report_csv(zcsv, zoom);
  emit(c, "verify.csv", csv.str(), out, true);
  emit(c, "zoom.csv", zcsv.str(), out, false);
  emit(c, "summary.json", dump_json(summary), out, false);
  return 0;
}

struct EigfunOptions {
  int k = 100;
  std::optional<double> energy;
  std::vector<double> at{0.7, 0.6};
  int resolution = 512;
  double delta = 0.1;
};

int cmd_eigfun(const Common& c, const EigfunOptions& o, std::ostream& out) {
  if (o.k < 1) throw InputError("k must be a positive integer (got " + std::to_string(o.k) + ")");
  if (o.resolution < 2) throw InputError("--resolution must be at least 2");
  if (o.at.size() != 2) throw InputError("--at expects q,p");
  const Loaded L = load_symbol(c);
  const double E = o.energy ? *o.energy : L.sym.eval(o.at[0], o.at[1]);
  const SpectrumResult s = eigh(weyl_quantize(L.sym, QuantumTorusParams(o.k)), true);
  std::size_t jb = 0;
  for (std::size_t j = 1; j < s.size(); ++j) {
    if (std::fabs(s.eigenvalues[j] - E) < std::fabs(s.eigenvalues[jb] - E)) jb = j;
  }
  const Eigen::VectorXcd v = s.eigenvectors->col(static_cast<Eigen::Index>(jb));
  const auto field = eigenfunction_modulus(o.k, v, o.resolution);

  std::ostringstream csv;
  write_field_csv(csv, field, o.resolution);
  emit(c, "eigfun.csv", csv.str(), out, true);
  if (!c.out_dir.empty()) {
    ordered_json j;
    j["symbol"] = L.origin;
    j["k"] = o.k;
    j["j"] = static_cast<int>(jb);
    j["lambda"] = s.eigenvalues[jb];
    j["E"] = E;
    j["resolution"] = o.resolution;
    j["mass"] = field_mass(field, o.resolution);
    j["delta"] = o.delta;
    j["concentration"] = mass_concentration(field, o.resolution, L.sym, E, o.delta);
    emit(c, "eigfun.json", dump_json(j), out, false);
  }
  return 0;
}

struct SweepOptions {
  std::vector<int> k_list{50, 100, 200, 400};
  int j_max = 9;
  std::string mode = "near-min";
  double a1 = 0.0;
  std::optional<double> e_cap;
  int resolution = 512;
  int grid_size = 200;
};

int cmd_sweep(const Common& c, const SweepOptions& o, std::ostream& out) {
  for (int v : o.k_list) {
    if (v < 1) throw InputError("k must be a positive integer (got " + std::to_string(v) + ")");
  }
  const Loaded L = load_symbol(c);
  const SymplecticNormalization norm(c.nu);
  DecaySweepOptions so;
  so.a1_at_min = o.a1;
  if (o.mode == "profile") {
    so.mode = PredictorMode::profile;
    const double e_cap = o.e_cap ? *o.e_cap : default_e_cap(L.sym);
    so.profile = std::make_shared<const ActionProfile>(
        build_action_profile(L.sym, norm, e_cap, {o.grid_size, o.resolution}));
  } else if (o.mode != "near-min") {
    throw InputError("--mode must be near-min or profile");
  }
  const auto rows = decay_sweep(L.sym, norm, o.k_list, o.j_max, so);
  std::ostringstream csv, detail;
  write_sweep_csv(csv, rows);
  detail << "k,j,residual\n";
  for (std::size_t i = 0; i < o.k_list.size(); ++i) {
    for (const auto& r : rows) {
      detail << o.k_list[i] << ',' << r.j << ',' << format_double(r.residuals[i]) << '\n';
    }
  }
  emit(c, "sweep.csv", csv.str(), out, true);
  emit(c, "sweep_residuals.csv", detail.str(), out, false);
  return 0;
}

int cmd_contour(const Common& c, int resolution, std::ostream& out) {
  if (resolution < 2) throw InputError("--resolution must be at least 2");
  const Loaded L = load_symbol(c);
  std::vector<double> axis(resolution);
  for (int i = 0; i < resolution; ++i) axis[i] = static_cast<double>(i) / resolution;
  std::ostringstream csv;
  write_field_csv(csv, L.sym.eval_grid(axis, axis), resolution);
  emit(c, "contour.csv", csv.str(), out, true);
  return 0;
}

int cmd_operator(const Common& c, int k, std::ostream& out) {
  if (k < 1) throw InputError("k must be a positive integer (got " + std::to_string(k) + ")");
  const Loaded L = load_symbol(c);
  std::ostringstream csv;
  weyl_quantize(L.sym, QuantumTorusParams(k)).write_csv(csv);
  emit(c, "operator.csv", csv.str(), out, true);
  return 0;
}

int cmd_profile(const Common& c, const VerifyOptions& o, std::ostream& out) {
  const Loaded L = load_symbol(c);
  const SymplecticNormalization norm(c.nu);
  const double e_cap = o.e_cap ? *o.e_cap : default_e_cap(L.sym);
  const ActionProfile p = build_action_profile(L.sym, norm, e_cap, {o.grid_size, o.resolution});
  std::ostringstream csv;
  csv << "E,c0,f0\n";
  for (std::size_t i = 0; i < p.E_grid.size(); ++i) {
    csv << format_double(p.E_grid[i]) << ',' << format_double(p.c0[i]) << ','
        << format_double(p.f0[i]) << '\n';
  }
  emit(c, "profile.csv", csv.str(), out, true);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiclassical spectra of quantized torus Hamiltonians"};
  app.name("bs_spectra");
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--symbol", common.symbol_path, "symbol file (`m n re im` lines); default Harper");
    sub->add_option("--out", common.out_dir, "output directory; default: primary CSV to stdout");
    sub->add_option("--nu", common.nu, "symplectic density (total torus area)");
  };

  std::optional<int> k;
  std::vector<int> k_list;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues with residual certificates");
  add_common(spectrum);
  spectrum->add_option("--k", k, "quantization level");
  spectrum->add_option("--k-list", k_list, "comma-separated levels")->delimiter(',');

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "Bohr-Sommerfeld predictions against the spectrum");
  add_common(verify_cmd);
  verify_cmd->add_option("--k", k, "quantization level");
  verify_cmd->add_option("--k-list", k_list, "comma-separated levels")->delimiter(',');
  verify_cmd->add_option("--e-cap", vo.e_cap, "top of the energy window");
  verify_cmd->add_option("--resolution", vo.resolution, "area quadrature cells per axis");
  verify_cmd->add_option("--grid-size", vo.grid_size, "action profile samples");
  verify_cmd->add_option("--count-at", vo.count_at, "counting levels")->delimiter(',');

  EigfunOptions eo;
  auto* eigfun = app.add_subcommand("eigfun", "eigenfunction modulus on the torus");
  add_common(eigfun);
  eigfun->add_option("--k", eo.k, "quantization level");
  auto* energy_opt = eigfun->add_option("--energy", eo.energy, "target energy");
  eigfun->add_option("--at", eo.at, "target energy as a(q,p)")->delimiter(',')->excludes(energy_opt);
  eigfun->add_option("--resolution", eo.resolution, "grid points per axis");
  eigfun->add_option("--delta", eo.delta, "tube width for the concentration fraction");

  SweepOptions so;
  auto* sweep = app.add_subcommand("sweep", "decay exponents of prediction residuals");
  add_common(sweep);
  sweep->add_option("--k-list", so.k_list, "ascending levels")->delimiter(',');
  sweep->add_option("--j-max", so.j_max, "highest level index");
  sweep->add_option("--mode", so.mode, "near-min or profile");
  sweep->add_option("--a1", so.a1, "subprincipal symbol at the minimum");
  sweep->add_option("--e-cap", so.e_cap, "profile window top (profile mode)");
  sweep->add_option("--resolution", so.resolution, "area quadrature cells per axis");
  sweep->add_option("--grid-size", so.grid_size, "action profile samples");

  int contour_res = 256;
  auto* contour = app.add_subcommand("contour", "symbol values on a grid");
  add_common(contour);
  contour->add_option("--resolution", contour_res, "grid points per axis");

  int op_k = 0;
  auto* oper = app.add_subcommand("operator", "matrix entries of the quantized symbol");
  add_common(oper);
  oper->add_option("--k", op_k, "quantization level")->required();

  VerifyOptions po;
  auto* profile = app.add_subcommand("profile", "tabulated action c0(E) and f0(E)");
  add_common(profile);
  profile->add_option("--e-cap", po.e_cap, "top of the energy window");
  profile->add_option("--resolution", po.resolution, "area quadrature cells per axis");
  profile->add_option("--grid-size", po.grid_size, "action profile samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bs_spectra: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*spectrum) return cmd_spectrum(common, levels(k, k_list), out);
    if (*verify_cmd) return cmd_verify(common, levels(k, k_list), vo, out);
    if (*eigfun) return cmd_eigfun(common, eo, out);
    if (*sweep) return cmd_sweep(common, so, out);
    if (*contour) return cmd_contour(common, contour_res, out);
    if (*oper) return cmd_operator(common, op_k, out);
    if (*profile) return cmd_profile(common, po, out);
  } catch (const ContractViolation& e) {
    err << "bs_spectra: contract violation: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    err << "bs_spectra: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "bs_spectra: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error and out_of_range: a precondition on user input.
    err << "bs_spectra: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "bs_spectra: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace bsq::cli

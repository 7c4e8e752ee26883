// nagaoka: command-line front end. JSON reports carry the command echo, a
// SHA-256 digest of the model file and the tool version; wall-times appear only
// with --timings so repeated runs are byte-identical.
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nagaoka/acceptance.hpp"
#include "nagaoka/hamiltonian.hpp"
#include "nagaoka/model.hpp"
#include "nagaoka/parallel.hpp"
#include "nagaoka/positivity.hpp"
#include "nagaoka/radiation.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/spectral.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nagaoka;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string model_path;
  std::string m;
  bool all = false;
  std::optional<int> cutoff;
  std::string form;
  std::string u_list = "100,200,500,1000,2000,5000,10000,100000,1000000";
  std::string z = "auto";
  std::optional<int> qgrid;
  double spacing = GridSpec{}.spacing;
  std::string out;
  int jobs = 1;
  bool timings = false;
  bool list = false;
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Session {
  std::vector<std::string> argv;
  Options opt;
  std::string model_text;
  std::optional<LatticeModel> model;
  Clock::time_point start = Clock::now();

  const LatticeModel& load() {
    if (opt.model_path.empty()) throw ValidationError("--model is required");
    model_text = read_file(opt.model_path);
    model = parse_model(model_text);
    return *model;
  }

  std::vector<Magnetization> sectors(bool required) const {
    if (!opt.m.empty() && opt.all) throw ValidationError("give either --m or --all");
    if (!opt.m.empty()) {
      const Magnetization m = Magnetization::parse(opt.m);
      check_magnetization(model->sites(), m);
      return {m};
    }
    if (required && !opt.all) throw ValidationError("--m is required");
    return all_magnetizations(model->sites());
  }

  ordered_json report(ordered_json results) const {
    ordered_json r;
    r["command"] = argv;
    r["model_digest"] = model_text.empty() ? ordered_json(nullptr) : ordered_json("sha256:" + sha256_hex(model_text));
    r["version"] = kVersion;
    r["results"] = std::move(results);
    if (opt.timings) r["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
  }

  void emit(const std::string& text) const {
    if (opt.out.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + opt.out);
    f << text;
  }

  void emit_json(const ordered_json& j) const { emit(j.dump(2) + "\n"); }

  // Wall time of one job, attached only when requested.
  template <typename Fn>
  ordered_json timed(Fn&& fn) const {
    const auto t0 = Clock::now();
    ordered_json j = fn();
    if (opt.timings) j["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    return j;
  }

  template <typename Fn>
  ordered_json over_sectors(const std::vector<Magnetization>& ms, Fn fn) const {
    const auto rows = parallel_map<ordered_json>(ms.size(), opt.jobs, [&](std::size_t i) { return timed([&] { return fn(ms[i]); }); });
    return ordered_json(rows);
  }
};

std::string config_string(int sites, const HoleSpinConfig& c) {
  std::string s;
  for (int x = 0; x < sites; ++x) s += c.spin_at(x) == 0 ? '.' : (c.spin_at(x) > 0 ? 'u' : 'd');
  return s;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json to_json(const SpectralReport& r) {
  ordered_json j;
  j["m"] = r.m.str();
  j["provenance"] = to_string(r.provenance);
  j["dimension"] = r.dimension;
  j["boson_dim"] = r.boson_dim;
  j["cutoff"] = r.cutoff;
  j["ground_energy"] = r.ground_energy;
  j["degeneracy"] = r.degeneracy;
  j["gap"] = optional_number(r.gap);
  j["stot2_expectation"] = r.stot2_expectation;
  j["resolved_s"] = r.resolved_s();
  std::vector<double> spins;
  for (int t : r.twice_cluster_spins) spins.push_back(0.5 * t);
  j["cluster_spins"] = spins;
  j["dropped_constant"] = r.dropped_constant;
  j["max_residual"] = r.max_residual;
  j["lowest"] = r.lowest;
  return j;
}

ordered_json to_json(const PositivityCertificate& c) {
  ordered_json j;
  j["basis"] = c.basis;
  j["offdiag_sign_ok"] = c.offdiag_sign_ok;
  j["irreducible"] = c.irreducible;
  j["ground_unique"] = c.ground_unique;
  j["ground_strictly_positive"] = c.ground_strictly_positive;
  j["min_entry"] = c.min_entry;
  j["ground_energy"] = c.ground_energy;
  j["gap"] = optional_number(c.gap);
  j["holds"] = c.holds();
  return j;
}

// Configuration-basis Hamiltonian for `form`; an empty form picks from the model.
SectorHamiltonian sector_hamiltonian(const LatticeModel& model, Magnetization m, std::string form,
                                     std::optional<int> cutoff) {
  if (form.empty()) form = model.radiation() ? "radiation" : model.phonon() ? "holstein" : "nagaoka";
  if (form == "nagaoka") return assemble_nagaoka_sector(model, m);
  if (form == "hubbard") return assemble_nagaoka_projected(model, m);
  if (form == "holstein") return assemble_holstein_sector(model, m, cutoff);
  if (form == "langfirsov") return assemble_lang_firsov_sector(model, m, cutoff);
  if (form == "radiation") return assemble_radiation_sector(model, m, RadiationOptions{cutoff, false});
  throw ValidationError("unknown form '" + form + "'");
}

LatticeModel with_cutoff(const LatticeModel& model, std::optional<int> cutoff) {
  if (!cutoff || !model.phonon()) return model;
  if (*cutoff < 0) throw ValidationError("cutoff must be >= 0");
  return model.with([&](ModelSpec& s) { s.phonon->cutoff = *cutoff; });
}

// ---------------------------------------------------------------------------

int cmd_basis(Session& s) {
  const LatticeModel& model = s.load();
  const Magnetization m = s.sectors(true).front();
  const SectorBasis basis = enumerate_sector(model, m);
  std::ostringstream os;
  os << "dimension " << basis.size() << "\n";
  if (s.opt.list) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      os << i << " hole=" << basis[i].hole << " " << config_string(model.sites(), basis[i]) << "\n";
    }
  }
  s.emit(os.str());
  return 0;
}

int cmd_connectivity(Session& s) {
  const LatticeModel& model = s.load();
  s.emit_json(s.report(s.over_sectors(s.sectors(false), [&](Magnetization m) {
    const ConnectivityReport r = connectivity_check(model, m);
    ordered_json j;
    j["m"] = m.str();
    j["dimension"] = r.dimension;
    j["connected"] = r.connected;
    j["orbit_sizes"] = r.orbit_sizes();
    return j;
  })));
  return 0;
}

int cmd_assemble(Session& s) {
  const LatticeModel& model = s.load();
  const Magnetization m = s.sectors(true).front();
  const std::string form = s.opt.form.empty() ? "nagaoka" : s.opt.form;
  ordered_json header;
  SparseOperator op;
  if (form == "hubbard" && !model.onsite_u().is_infinite()) {
    const FockSectorHamiltonian h = assemble_hubbard_sector(with_cutoff(model, s.opt.cutoff), m, model.onsite_u().value());
    op = h.matrix;
    header["provenance"] = to_string(Provenance::hubbard_fock);
    header["boson_dim"] = h.boson_dim;
    header["cutoff"] = h.cutoff;
  } else {
    const SectorHamiltonian h = sector_hamiltonian(model, m, form, s.opt.cutoff);
    op = h.matrix;
    header["provenance"] = to_string(h.provenance);
    header["boson_dim"] = h.boson_dim;
    header["cutoff"] = h.cutoff;
    header["dropped_per_hole"] = h.dropped_per_hole;
    header["dropped_is_constant"] = h.dropped_is_constant;
    header["dropped_constant"] = h.dropped_constant();
    header["spectator_frequencies"] = h.spectator_frequencies;
  }
  header["m"] = m.str();
  header["dimension"] = op.dimension();
  header["nonzeros"] = op.nonzeros();
  ordered_json meta = s.report(std::move(header));

  // Triplets in column-major order, 1-based as in MatrixMarket.
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << "% " << meta.dump() << "\n";
  os << op.rows() << " " << op.cols() << " " << op.nonzeros() << "\n";
  const SpMat& a = op.matrix();
  for (int c = 0; c < a.outerSize(); ++c) {
    for (SpMat::InnerIterator it(a, c); it; ++it) {
      os << it.row() + 1 << " " << it.col() + 1 << " " << fmt17(it.value().real()) << " " << fmt17(it.value().imag()) << "\n";
    }
  }
  s.emit(os.str());
  return 0;
}

SpectralReport sector_report(const LatticeModel& model, Magnetization m, const Options& opt) {
  if (!model.onsite_u().is_infinite() && (opt.form.empty() || opt.form == "hubbard")) {
    const LatticeModel mc = with_cutoff(model, opt.cutoff);
    return ground_report(assemble_hubbard_sector(mc, m, model.onsite_u().value()), mc);
  }
  return ground_report(sector_hamiltonian(model, m, opt.form, opt.cutoff));
}

int cmd_ed(Session& s) {
  const LatticeModel& model = s.load();
  s.emit_json(s.report(s.over_sectors(s.sectors(false), [&](Magnetization m) { return to_json(sector_report(model, m, s.opt)); })));
  return 0;
}

int cmd_spin(Session& s) {
  const LatticeModel& model = s.load();
  const auto ms = s.sectors(false);
  const auto reports = parallel_map<SpectralReport>(ms.size(), s.opt.jobs, [&](std::size_t i) { return sector_report(model, ms[i], s.opt); });
  std::ostringstream os;
  os << "m,dimension,ground_energy,degeneracy,S,gap\n";
  for (const auto& r : reports) {
    os << r.m.str() << "," << r.dimension << "," << fmt17(r.ground_energy) << "," << r.degeneracy << ","
       << fmt17(r.resolved_s()) << "," << (r.gap ? fmt17(*r.gap) : std::string()) << "\n";
  }
  s.emit(os.str());
  return 0;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') throw ValidationError("bad number in list: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

int cmd_largeu(Session& s) {
  const LatticeModel& model = s.load();
  const std::vector<double> us = parse_csv_doubles(s.opt.u_list);
  cplx z;
  if (s.opt.z == "auto") {
    z = default_z(model);
  } else {
    const auto parts = parse_csv_doubles(s.opt.z);
    if (parts.size() != 2) throw ValidationError("--z expects auto or RE,IM");
    z = cplx(parts[0], parts[1]);
  }
  const ResolventStudy study(model, z);
  const auto gaps = parallel_map<double>(us.size(), s.opt.jobs, [&](std::size_t i) { return study.gap(us[i]); });
  std::ostringstream os;
  os << "U,delta,delta_times_U\n";
  for (std::size_t i = 0; i < us.size(); ++i) os << fmt17(us[i]) << "," << fmt17(gaps[i]) << "," << fmt17(gaps[i] * us[i]) << "\n";
  s.emit(os.str());
  return 0;
}

int cmd_certify(Session& s) {
  const LatticeModel& model = s.load();
  const auto ms = s.sectors(false);
  if (s.opt.qgrid) {
    const GridSpec grid{*s.opt.qgrid, s.opt.spacing};
    s.emit_json(s.report(s.over_sectors(ms, [&](Magnetization m) {
      const QgridResult q = qgrid_holstein_certify(model, m, grid);
      ordered_json j = to_json(q.certificate);
      j["m"] = m.str();
      j["dimension"] = q.dimension;
      j["relevant_modes"] = q.relevant_modes;
      j["dropped_constant"] = q.dropped_constant;
      j["shifts"] = q.shifts;
      return j;
    })));
    return 0;
  }
  s.emit_json(s.report(s.over_sectors(ms, [&](Magnetization m) {
    ordered_json j = to_json(pf_certificate(sector_hamiltonian(model, m, s.opt.form, s.opt.cutoff)));
    j["m"] = m.str();
    return j;
  })));
  return 0;
}

int cmd_reproduce(Session& s) {
  std::ostringstream os;
  int failed = 0;
  const auto criteria = acceptance::all_criteria();
  for (const auto& criterion : criteria) {
    const auto r = criterion();
    os << r.line() << "\n";
    if (s.opt.out.empty()) {
      std::cout << r.line() << "\n";
      std::cout.flush();
    }
    if (!r.passed) ++failed;
  }
  const std::string summary = std::to_string(failed) + " of " + std::to_string(criteria.size()) + " criteria failed\n";
  if (s.opt.out.empty()) {
    std::cout << summary;
  } else {
    s.emit(os.str() + summary);
  }
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  Session s;
  s.argv.assign(argv + 1, argv + argc);
  Options& o = s.opt;

  CLI::App app{"Single-hole Nagaoka ferromagnetism: bases, Hamiltonians, spectra and positivity certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto model_opt = [&](CLI::App* c) { c->add_option("--model", o.model_path, "model file")->required(); };
  auto sector_opts = [&](CLI::App* c) {
    c->add_option("--m", o.m, "magnetization, e.g. 1/2 or -1.5");
    c->add_flag("--all", o.all, "every admissible sector");
  };
  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "write the output here instead of stdout");
    c->add_option("--jobs", o.jobs, "worker cap")->check(CLI::PositiveNumber);
    c->add_flag("--timings", o.timings, "include wall-times in JSON reports");
  };
  const std::vector<std::string> forms{"hubbard", "nagaoka", "holstein", "langfirsov", "radiation"};

  CLI::App* basis = app.add_subcommand("basis", "sector dimension and configurations");
  model_opt(basis);
  basis->add_option("--m", o.m, "magnetization")->required();
  basis->add_flag("--list", o.list, "print every configuration");
  common(basis);

  CLI::App* conn = app.add_subcommand("connectivity", "configuration-graph connectivity per sector");
  model_opt(conn);
  sector_opts(conn);
  common(conn);

  CLI::App* assemble = app.add_subcommand("assemble", "sector Hamiltonian as sparse triplets");
  model_opt(assemble);
  assemble->add_option("--m", o.m, "magnetization")->required();
  assemble->add_option("--form", o.form, "construction")->check(CLI::IsMember(forms));
  assemble->add_option("--cutoff", o.cutoff, "boson cutoff per mode");
  common(assemble);

  CLI::App* ed = app.add_subcommand("ed", "sector ground states, gaps and total spin");
  model_opt(ed);
  sector_opts(ed);
  ed->add_option("--cutoff", o.cutoff, "boson cutoff per mode");
  ed->add_option("--form", o.form, "construction (default: from the model)")->check(CLI::IsMember(forms));
  common(ed);

  CLI::App* spin = app.add_subcommand("spin", "per-sector total-spin table");
  model_opt(spin);
  spin->add_option("--cutoff", o.cutoff, "boson cutoff per mode");
  spin->add_option("--form", o.form, "construction (default: from the model)")->check(CLI::IsMember(forms));
  common(spin);

  CLI::App* largeu = app.add_subcommand("largeu", "norm-resolvent distance sweep over U");
  model_opt(largeu);
  largeu->add_option("--u-list", o.u_list, "comma-separated U values");
  largeu->add_option("--z", o.z, "auto or RE,IM");
  common(largeu);

  CLI::App* certify = app.add_subcommand("certify", "Perron-Frobenius certificates");
  model_opt(certify);
  sector_opts(certify);
  certify->add_option("--cutoff", o.cutoff, "boson cutoff per mode");
  certify->add_option("--form", o.form, "construction (default: from the model)")->check(CLI::IsMember(forms));
  certify->add_option("--qgrid", o.qgrid, "position-grid points per relevant mode")->check(CLI::PositiveNumber);
  certify->add_option("--spacing", o.spacing, "grid spacing")->check(CLI::PositiveNumber);
  common(certify);

  CLI::App* reproduce = app.add_subcommand("reproduce", "run the acceptance suite on the built-in corpus");
  reproduce->add_option("--out", o.out, "write the summary here instead of stdout");

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*basis) return cmd_basis(s);
    if (*conn) return cmd_connectivity(s);
    if (*assemble) return cmd_assemble(s);
    if (*ed) return cmd_ed(s);
    if (*spin) return cmd_spin(s);
    if (*largeu) return cmd_largeu(s);
    if (*certify) return cmd_certify(s);
    if (*reproduce) return cmd_reproduce(s);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#pragma once

// Config-driven experiments. Each experiment expands its config into sweep
// points, evaluates them on a worker pool and merges rows in sweep order, so
// the output does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "rqed/config.hpp"
#include "rqed/csv.hpp"
#include "rqed/dynamics.hpp"
#include "rqed/grid_models.hpp"
#include "rqed/metrics.hpp"
#include "rqed/resolvent.hpp"

namespace rqed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  int threads = 1;
  std::optional<double> seed_tolerance;  // units of omega_c
  bool quiet = false;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> failures;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"atom-solve",      "spectrum-sweep",   "anharmonicity-sweep",
                                              "circuit-sweep",   "pulse",            "resolvent-order",
                                              "gauge-sweep",     "observables"};
  return names;
}

/// Runs f(0..n-1) on up to `threads` workers; results keep index order.
template <typename F>
auto parallel_map(std::size_t n, int threads, F&& f) {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t t = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (t <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < t; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace exp {

using Row = std::vector<std::string>;

struct PointResult {
  std::vector<std::vector<Row>> tables;
  std::vector<std::string> failures;
};

struct TableSpec {
  std::string suffix;
  std::vector<std::string> header;
};

struct Plan {
  std::vector<TableSpec> tables;
  std::size_t points = 0;
  std::function<PointResult(std::size_t)> run;
  std::function<void(std::vector<std::vector<Row>>&, std::vector<std::string>&)> finalize;
};

inline std::string num(double v) { return format_double(v); }
inline std::string num(Index v) { return std::to_string(v); }
inline std::string flag(bool b) { return b ? "1" : "0"; }

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const DispersiveError*>(&e)) return "dispersive";
  if (dynamic_cast<const ResonanceError*>(&e)) return "resonance";
  if (dynamic_cast<const InstabilityError*>(&e)) return "instability";
  if (dynamic_cast<const PoleError*>(&e)) return "pole";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  return "error";
}

inline std::vector<std::string> energy_header(Index n) {
  std::vector<std::string> h;
  for (Index j = 1; j <= n; ++j) h.push_back("E" + std::to_string(j));
  return h;
}

// (E_j - E_0) / scale for j = 1..n, or nan when the model failed.
inline void push_energies(Row& row, const RVector* e, Index n, double scale) {
  for (Index j = 1; j <= n; ++j) row.push_back(e ? num(((*e)(j) - (*e)(0)) / scale) : "nan");
}

// ---------------------------------------------------------------------------
// Parameter parsing

struct Sweep {
  std::string variable;
  std::vector<double> values;
};

inline const std::set<std::string>& sweep_keys() {
  static const std::set<std::string> k{"sweep.variable", "sweep.start", "sweep.stop", "sweep.points", "sweep.values"};
  return k;
}

/// Grid from sweep.values or (start, stop, points). Without sweep keys the
/// single point `fixed` of `default_var` is used.
inline Sweep parse_sweep(const Config& c, const std::set<std::string>& variables, const std::string& default_var,
                         const std::function<double()>& fixed) {
  Sweep s;
  if (!c.has("sweep.variable")) {
    for (const auto& k : sweep_keys()) {
      if (c.has(k)) throw c.bad_value(k, "sweep.variable to be set as well");
    }
    s.variable = default_var;
    s.values = {fixed()};
    return s;
  }
  s.variable = c.get_string("sweep.variable");
  if (!variables.count(s.variable)) {
    std::string list;
    for (const auto& v : variables) list += (list.empty() ? "" : ", ") + v;
    throw c.bad_value("sweep.variable", "one of {" + list + "}");
  }
  if (c.has("sweep.values")) {
    if (c.has("sweep.start") || c.has("sweep.stop") || c.has("sweep.points")) {
      throw c.bad_value("sweep.values", "no sweep.start/stop/points alongside it");
    }
    for (const auto& item : c.get_list("sweep.values")) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw c.bad_value("sweep.values", "a comma-separated list of numbers");
      }
      s.values.push_back(v);
    }
    return s;
  }
  const long points = c.get_int("sweep.points");
  if (points < 1) throw c.bad_value("sweep.points", "an integer >= 1");
  const double start = c.get_double("sweep.start");
  const double stop = points == 1 ? start : c.get_double("sweep.stop");
  for (long i = 0; i < points; ++i) {
    s.values.push_back(points == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return s;
}

inline std::vector<std::string> parse_models(const Config& c, const std::vector<std::string>& allowed,
                                             const std::vector<std::string>& fallback) {
  if (!c.has("models")) return fallback;
  std::vector<std::string> out = c.get_list("models");
  for (const auto& m : out) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw c.bad_value("models", "names from {" + list + "}");
    }
  }
  return out;
}

inline Index positive_int(const Config& c, const std::string& key, long fallback, long min = 1) {
  const long v = c.get_int(key, fallback);
  if (v < min) throw c.bad_value(key, "an integer >= " + std::to_string(min));
  return static_cast<Index>(v);
}

inline double positive(const Config& c, const std::string& key, double fallback) {
  const double v = c.get_double(key, fallback);
  if (!(v > 0.0)) throw c.bad_value(key, "a positive number");
  return v;
}

inline double positive(const Config& c, const std::string& key) {
  const double v = c.get_double(key);
  if (!(v > 0.0)) throw c.bad_value(key, "a positive number");
  return v;
}

// Name of the swept variable, or "" for a single point taken from fixed keys.
inline std::string swept(const Config& c, const Sweep& s) { return c.has("sweep.variable") ? s.variable : ""; }

struct Numerics {
  Index n_levels = 64;
  Index n_a = 12;
  Index n_ph = 40;
  Index n_report = 5;
  Index l_max = kDefaultLMax;
  double dispersive_threshold = kDispersiveThreshold;
};

inline const std::set<std::string>& numerics_keys() {
  static const std::set<std::string> k{"numerics.n_levels", "numerics.n_a", "numerics.n_ph", "numerics.n_report",
                                       "numerics.l_max", "numerics.dispersive_threshold"};
  return k;
}

inline Numerics parse_numerics(const Config& c, Index n_a_default, Index n_ph_default) {
  Numerics n;
  n.n_levels = positive_int(c, "numerics.n_levels", 64, 3);
  n.n_a = positive_int(c, "numerics.n_a", n_a_default, 2);
  n.n_ph = positive_int(c, "numerics.n_ph", n_ph_default, 2);
  n.n_report = positive_int(c, "numerics.n_report", 5);
  n.l_max = positive_int(c, "numerics.l_max", kDefaultLMax, 2);
  n.dispersive_threshold = positive(c, "numerics.dispersive_threshold", kDispersiveThreshold);
  if (n.n_a > n.n_levels) throw c.bad_value("numerics.n_a", "a value <= numerics.n_levels");
  if (2 * n.n_ph < n.n_report + 1) throw c.bad_value("numerics.n_ph", "room for numerics.n_report + 1 levels");
  return n;
}

struct CavityParams {
  double gamma = 60.0;
  double m = 1.0;
  double q = 1.0;
  double wc_over_w10 = 3.0;
  double g = 0.0;
  bool g_in_w10 = false;  // g given in units of omega_10 instead of omega_c
};

inline const std::set<std::string>& cavity_keys() {
  static const std::set<std::string> k{"atom.gamma", "atom.m", "cavity.q", "cavity.wc_over_w10", "cavity.g_over_wc",
                                       "cavity.g_over_w10"};
  return k;
}

inline CavityParams parse_cavity(const Config& c, const std::string& swept) {
  CavityParams p;
  if (swept != "gamma") p.gamma = positive(c, "atom.gamma");
  p.m = positive(c, "atom.m", 1.0);
  p.q = positive(c, "cavity.q", 1.0);
  p.wc_over_w10 = positive(c, "cavity.wc_over_w10", 3.0);
  if (c.has("cavity.g_over_wc") && c.has("cavity.g_over_w10")) {
    throw c.bad_value("cavity.g_over_w10", "to be absent when cavity.g_over_wc is given");
  }
  if (swept == "g_over_wc" || swept == "g_over_w10") {
    for (const char* k : {"cavity.g_over_wc", "cavity.g_over_w10"}) {
      if (c.has(k)) throw c.bad_value(k, "to be absent while it is swept");
    }
    p.g_in_w10 = swept == "g_over_w10";
  } else if (c.has("cavity.g_over_w10")) {
    p.g = c.get_double("cavity.g_over_w10");
    p.g_in_w10 = true;
  } else {
    p.g = c.get_double("cavity.g_over_wc");
  }
  if (swept == "gamma" && c.has("atom.gamma")) throw c.bad_value("atom.gamma", "to be absent while it is swept");
  if (p.g < 0.0) throw c.bad_value(p.g_in_w10 ? "cavity.g_over_w10" : "cavity.g_over_wc", "a non-negative number");
  return p;
}

inline CavityParams cavity_at(CavityParams p, const std::string& var, double v) {
  if (var == "gamma") p.gamma = v;
  if (var == "g_over_wc" || var == "g_over_w10") p.g = v;
  return p;
}

struct CavitySystem {
  AtomSpectrum atom;
  CouplingSet c;
  double wc = 0.0;
};

inline CouplingSet cavity_coupling_set(const AtomSpectrum& atom, const CavityParams& p) {
  const double wc = p.wc_over_w10 * atom.omega(1);
  const double g = p.g_in_w10 ? p.g * atom.omega(1) : p.g * wc;
  return cavity_couplings(atom, wc, a0_from_target_g(g, wc, p.q, atom.x_mat(0, 1)), p.q);
}

inline AtomSpectrum cavity_atom(const CavityParams& p, Index n_levels) {
  if (!(p.gamma > 0.0)) throw Error("gamma must be positive");
  return solve_double_well(double_well_from_gamma(p.gamma, p.m), n_levels);
}

struct FluxParams {
  double e_c = 2.5, e_l = 0.5, e_j = 9.0;  // GHz
  double phi_ext_over_pi = 1.0;
  double wc_over_w10 = 3.0;
  double g_over_wc = 0.0;

  FluxoniumParams physical() const { return FluxoniumParams::from_ghz(e_c, e_l, e_j, phi_ext_over_pi * kPi); }
};

inline const std::set<std::string>& flux_keys() {
  static const std::set<std::string> k{"fluxonium.e_c", "fluxonium.e_l", "fluxonium.e_j", "fluxonium.phi_ext_over_pi",
                                       "cavity.wc_over_w10", "cavity.g_over_wc"};
  return k;
}

inline FluxParams parse_flux(const Config& c, const std::string& swept) {
  FluxParams p;
  p.e_c = positive(c, "fluxonium.e_c");
  p.e_l = positive(c, "fluxonium.e_l");
  p.e_j = c.get_double("fluxonium.e_j");
  if (p.e_j < 0.0) throw c.bad_value("fluxonium.e_j", "a non-negative number");
  p.wc_over_w10 = positive(c, "cavity.wc_over_w10", 3.0);
  if (swept == "phi_ext_over_pi") {
    if (c.has("fluxonium.phi_ext_over_pi")) throw c.bad_value("fluxonium.phi_ext_over_pi", "to be absent while it is swept");
  } else {
    p.phi_ext_over_pi = c.get_double("fluxonium.phi_ext_over_pi");
  }
  if (swept == "g_over_wc") {
    if (c.has("cavity.g_over_wc")) throw c.bad_value("cavity.g_over_wc", "to be absent while it is swept");
  } else {
    p.g_over_wc = positive(c, "cavity.g_over_wc");
  }
  return p;
}

inline FluxParams flux_at(FluxParams p, const std::string& var, double v) {
  if (var == "phi_ext_over_pi") p.phi_ext_over_pi = v;
  if (var == "g_over_wc") p.g_over_wc = v;
  return p;
}

inline CouplingSet circuit_coupling_set(const AtomSpectrum& atom, const FluxParams& p) {
  if (!(p.g_over_wc > 0.0)) throw Error("circuit coupling must be positive");
  const double wc = p.wc_over_w10 * atom.omega(1);
  return circuit_couplings(atom, wc, l2_from_target_g(p.g_over_wc * wc, wc, atom.x_mat(0, 1)));
}

inline std::set<std::string> merge(std::initializer_list<std::set<std::string>> sets,
                                   std::initializer_list<std::string> extra = {}) {
  std::set<std::string> out{"experiment", "output.name", "models"};
  for (const auto& s : sets) out.insert(s.begin(), s.end());
  out.insert(extra.begin(), extra.end());
  return out;
}

// ---------------------------------------------------------------------------
// Spectral comparison shared by spectrum-sweep and circuit-sweep

struct ModelSpectrum {
  std::string name;
  std::optional<RVector> energies;
  std::string status = "ok";
  std::string message;
};

inline PointResult spectrum_rows(const std::string& var, double value, const std::vector<ModelSpectrum>& models,
                                 const RVector* reference, Index n_report, double scale, bool grid_converged,
                                 const CouplingSet* c, const SWCoefficients* s) {
  PointResult out;
  out.tables.resize(1);
  for (const auto& m : models) {
    Row row{num(value), m.name};
    const RVector* e = m.energies ? &*m.energies : nullptr;
    push_energies(row, e, n_report, scale);
    row.push_back(e && reference ? num(mse_sigma(*e, *reference, n_report, scale).sigma) : "nan");
    row.push_back(flag(grid_converged));
    row.push_back(s ? flag(s->converged) : "nan");
    row.push_back(c ? num(c->dispersive_ratio) : "nan");
    row.push_back(m.status);
    out.tables[0].push_back(std::move(row));
    if (m.status != "ok") out.failures.push_back(var + "=" + num(value) + " " + m.name + ": " + m.message);
  }
  return out;
}

inline std::vector<std::string> spectrum_header(const std::string& var, Index n_report) {
  std::vector<std::string> h{var, "model"};
  for (const auto& e : energy_header(n_report)) h.push_back(e);
  for (const char* k : {"sigma", "grid_converged", "sw_converged", "dispersive_ratio", "status"}) h.push_back(k);
  return h;
}

template <typename F>
ModelSpectrum try_model(const std::string& name, F&& f) {
  ModelSpectrum m{name, std::nullopt, "ok", ""};
  try {
    m.energies = f();
  } catch (const Error& e) {
    m.status = error_kind(e);
    m.message = e.what();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Experiments

inline Plan plan_spectrum_sweep(const Config& cfg) {
  cfg.check_keys(merge({cavity_keys(), numerics_keys(), sweep_keys()}));
  const Sweep sweep = parse_sweep(cfg, {"g_over_wc", "g_over_w10", "gamma"},
                                  cfg.has("cavity.g_over_w10") ? "g_over_w10" : "g_over_wc", [&] {
                                    return cfg.has("cavity.g_over_w10") ? cfg.get_double("cavity.g_over_w10")
                                                                        : cfg.get_double("cavity.g_over_wc");
                                  });
  const CavityParams base = parse_cavity(cfg, swept(cfg, sweep));
  const Numerics num_cfg = parse_numerics(cfg, 12, 40);
  const auto models = parse_models(cfg, {"full", "qrm", "rqrm", "rqrm_simple", "rqrm_bogo"}, {"full", "qrm", "rqrm"});
  auto shared = std::make_shared<std::optional<AtomSpectrum>>();
  if (sweep.variable != "gamma") *shared = cavity_atom(base, num_cfg.n_levels);

  Plan plan;
  plan.tables = {{"", spectrum_header(sweep.variable, num_cfg.n_report)}};
  plan.points = sweep.values.size();
  plan.run = [=](std::size_t i) {
    const double v = sweep.values[i];
    const CavityParams p = cavity_at(base, sweep.variable, v);
    std::optional<AtomSpectrum> local;
    const AtomSpectrum* atom = shared->has_value() ? &**shared : nullptr;
    std::vector<ModelSpectrum> rows;
    try {
      if (!atom) {
        local = cavity_atom(p, num_cfg.n_levels);
        atom = &*local;
      }
    } catch (const Error& e) {
      for (const auto& m : models) rows.push_back({m, std::nullopt, error_kind(e), e.what()});
      return spectrum_rows(sweep.variable, v, rows, nullptr, num_cfg.n_report, 1.0, false, nullptr, nullptr);
    }
    const CouplingSet c = cavity_coupling_set(*atom, p);
    std::optional<SWCoefficients> s;
    std::string sw_status = "ok", sw_message;
    try {
      s = sw_coefficients(c, num_cfg.l_max, num_cfg.dispersive_threshold);
    } catch (const Error& e) {
      sw_status = error_kind(e);
      sw_message = e.what();
    }
    std::optional<RVector> full;
    const Index n_ph = num_cfg.n_ph;
    for (const auto& m : models) {
      if (m == "full") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_full_dipole(c, num_cfg.n_a, n_ph)); }));
        full = rows.back().energies;
      } else if (m == "qrm") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_qrm_dipole(c, n_ph)); }));
      } else if (!s) {
        rows.push_back({m, std::nullopt, sw_status, sw_message});
      } else if (m == "rqrm") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_rqrm(c, *s, n_ph)); }));
      } else if (m == "rqrm_simple") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_rqrm_simplified(c, *s, n_ph)); }));
      } else {
        rows.push_back(try_model(m, [&] { return eigvalsh(bogoliubov_rqrm(c, *s, n_ph).H); }));
      }
    }
    if (!full) {
      try {
        full = eigvalsh(build_full_dipole(c, num_cfg.n_a, n_ph));
      } catch (const Error&) {
      }
    }
    return spectrum_rows(sweep.variable, v, rows, full ? &*full : nullptr, num_cfg.n_report, c.omega_c,
                         atom->grid_meta.converged, &c, s ? &*s : nullptr);
  };
  return plan;
}

inline Plan plan_circuit_sweep(const Config& cfg) {
  cfg.check_keys(merge({flux_keys(), numerics_keys(), sweep_keys()}));
  const Sweep sweep = parse_sweep(cfg, {"g_over_wc", "phi_ext_over_pi"}, "g_over_wc",
                                  [&] { return cfg.get_double("cavity.g_over_wc"); });
  const FluxParams base = parse_flux(cfg, swept(cfg, sweep));
  const Numerics num_cfg = parse_numerics(cfg, 15, 40);
  const auto models =
      parse_models(cfg, {"circuit_full", "circuit_qrm", "circuit_rqrm"}, {"circuit_full", "circuit_qrm", "circuit_rqrm"});
  auto shared = std::make_shared<std::optional<AtomSpectrum>>();
  if (sweep.variable != "phi_ext_over_pi") *shared = solve_fluxonium(base.physical(), num_cfg.n_levels);

  Plan plan;
  plan.tables = {{"", spectrum_header(sweep.variable, num_cfg.n_report)}};
  plan.points = sweep.values.size();
  plan.run = [=](std::size_t i) {
    const double v = sweep.values[i];
    const FluxParams p = flux_at(base, sweep.variable, v);
    std::optional<AtomSpectrum> local;
    const AtomSpectrum* atom = shared->has_value() ? &**shared : nullptr;
    std::vector<ModelSpectrum> rows;
    std::optional<CouplingSet> c;
    try {
      if (!atom) {
        local = solve_fluxonium(p.physical(), num_cfg.n_levels);
        atom = &*local;
      }
      c = circuit_coupling_set(*atom, p);
    } catch (const Error& e) {
      for (const auto& m : models) rows.push_back({m, std::nullopt, error_kind(e), e.what()});
      return spectrum_rows(sweep.variable, v, rows, nullptr, num_cfg.n_report, 1.0, false, nullptr, nullptr);
    }
    std::optional<SWCoefficients> s;
    std::string sw_status = "ok", sw_message;
    try {
      s = sw_coefficients(*c, num_cfg.l_max, num_cfg.dispersive_threshold);
    } catch (const Error& e) {
      sw_status = error_kind(e);
      sw_message = e.what();
    }
    std::optional<RVector> full;
    const Index n_ph = num_cfg.n_ph;
    for (const auto& m : models) {
      if (m == "circuit_full") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_circuit_full(*c, num_cfg.n_a, n_ph)); }));
        full = rows.back().energies;
      } else if (m == "circuit_qrm") {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_circuit_qrm(*c, n_ph)); }));
      } else if (!s) {
        rows.push_back({m, std::nullopt, sw_status, sw_message});
      } else {
        rows.push_back(try_model(m, [&] { return eigvalsh(build_circuit_rqrm(*c, *s, n_ph)); }));
      }
    }
    if (!full) {
      try {
        full = eigvalsh(build_circuit_full(*c, num_cfg.n_a, n_ph));
      } catch (const Error&) {
      }
    }
    return spectrum_rows(sweep.variable, v, rows, full ? &*full : nullptr, num_cfg.n_report, c->omega_c,
                         atom->grid_meta.converged, &*c, s ? &*s : nullptr);
  };
  return plan;
}

inline Plan plan_anharmonicity_sweep(const Config& cfg) {
  cfg.check_keys(merge({sweep_keys()}, {"atom.gamma", "atom.m", "numerics.n_levels"}));
  const Sweep sweep = parse_sweep(cfg, {"gamma"}, "gamma", [&] { return cfg.get_double("atom.gamma"); });
  if (sweep.variable == "gamma" && cfg.has("sweep.variable") && cfg.has("atom.gamma")) {
    throw cfg.bad_value("atom.gamma", "to be absent while it is swept");
  }
  const double m = positive(cfg, "atom.m", 1.0);
  const Index n_levels = positive_int(cfg, "numerics.n_levels", 12, 3);
  Plan plan;
  plan.tables = {{"", {"gamma", "omega_10", "omega_21", "ratio_21_10", "grid_points", "half_width", "grid_converged",
                       "status"}}};
  plan.points = sweep.values.size();
  plan.run = [=](std::size_t i) {
    const double g = sweep.values[i];
    PointResult out;
    out.tables.resize(1);
    try {
      const auto a = solve_double_well(double_well_from_gamma(g, m), n_levels);
      const double w10 = a.omega(1), w21 = a.omega(2) - a.omega(1);
      out.tables[0].push_back({num(g), num(w10), num(w21), num(w21 / w10), num(a.grid_meta.n_points),
                               num(a.grid_meta.half_width), flag(a.grid_meta.converged), "ok"});
    } catch (const Error& e) {
      out.tables[0].push_back({num(g), "nan", "nan", "nan", "nan", "nan", "0", error_kind(e)});
      out.failures.push_back("gamma=" + num(g) + ": " + e.what());
    }
    return out;
  };
  return plan;
}

inline Plan plan_atom_solve(const Config& cfg) {
  cfg.check_keys(merge({}, {"atom.kind", "atom.gamma", "atom.m", "fluxonium.e_c", "fluxonium.e_l", "fluxonium.e_j",
                            "fluxonium.phi_ext_over_pi", "numerics.n_levels", "numerics.report_levels",
                            "numerics.wavefunctions"}));
  const std::string kind = cfg.get_string("atom.kind");
  if (kind != "double_well" && kind != "fluxonium") throw cfg.bad_value("atom.kind", "double_well or fluxonium");
  const Index n_levels = positive_int(cfg, "numerics.n_levels", 64, 2);
  const Index report = positive_int(cfg, "numerics.report_levels", 10);
  const Index waves = positive_int(cfg, "numerics.wavefunctions", 4, 0);
  if (report > n_levels || waves > n_levels) throw cfg.bad_value("numerics.report_levels", "values <= numerics.n_levels");
  std::function<AtomSpectrum()> solve;
  if (kind == "double_well") {
    const double gamma = positive(cfg, "atom.gamma");
    const double m = positive(cfg, "atom.m", 1.0);
    solve = [=] { return solve_double_well(double_well_from_gamma(gamma, m), n_levels); };
  } else {
    FluxParams p;
    p.e_c = positive(cfg, "fluxonium.e_c");
    p.e_l = positive(cfg, "fluxonium.e_l");
    p.e_j = cfg.get_double("fluxonium.e_j");
    p.phi_ext_over_pi = cfg.get_double("fluxonium.phi_ext_over_pi");
    solve = [=] { return solve_fluxonium(p.physical(), n_levels); };
  }
  std::vector<std::string> wave_header{"x", "potential"};
  for (Index k = 0; k < waves; ++k) wave_header.push_back("psi_" + std::to_string(k));
  Plan plan;
  plan.tables = {{"_levels", {"level", "omega", "x_0j", "x_1j", "x_jj", "x2_jj"}},
                 {"_wavefunctions", wave_header},
                 {"_grid", {"n_points", "half_width", "grid_converged", "convergence_change", "ground_energy"}}};
  plan.points = 1;
  plan.run = [=](std::size_t) {
    PointResult out;
    out.tables.resize(3);
    const AtomSpectrum a = solve();
    for (Index j = 0; j < report; ++j) {
      out.tables[0].push_back({num(j), num(a.omega(j)), num(a.x_mat(0, j)), num(a.x_mat(1, j)), num(a.x_mat(j, j)),
                               num(a.x2_mat(j, j))});
    }
    const double dx = a.grid(1) - a.grid(0);
    for (Index i = 0; i < a.grid.size(); ++i) {
      Row r{num(a.grid(i)), num(a.potential(i))};
      for (Index k = 0; k < waves; ++k) r.push_back(num(a.states(i, k) / std::sqrt(dx)));
      out.tables[1].push_back(std::move(r));
    }
    out.tables[2].push_back({num(a.grid_meta.n_points), num(a.grid_meta.half_width), flag(a.grid_meta.converged),
                             num(a.grid_meta.convergence_change), num(a.ground_energy)});
    return out;
  };
  return plan;
}

inline Plan plan_observables(const Config& cfg) {
  cfg.check_keys(merge({cavity_keys(), numerics_keys(), sweep_keys()}));
  const Sweep sweep =
      parse_sweep(cfg, {"g_over_wc"}, "g_over_wc", [&] { return cfg.get_double("cavity.g_over_wc"); });
  const CavityParams base = parse_cavity(cfg, swept(cfg, sweep));
  if (base.g_in_w10) throw cfg.bad_value("cavity.g_over_w10", "cavity.g_over_wc for this experiment");
  const Numerics num_cfg = parse_numerics(cfg, 12, 40);
  const auto models = parse_models(cfg, {"full", "qrm", "rqrm", "rqrm_bogo"}, {"full", "qrm", "rqrm"});
  auto atom = std::make_shared<const AtomSpectrum>(cavity_atom(base, num_cfg.n_levels));
  Plan plan;
  plan.tables = {{"", {"g_over_wc", "model", "quad_sq_33", "quad_02", "x_02", "status"}},
                 {"_infidelity", {"g_over_wc", "state", "cavity_infidelity", "atom_infidelity", "status"}}};
  plan.points = sweep.values.size();
  plan.run = [=](std::size_t i) {
    const double v = sweep.values[i];
    const CavityParams p = cavity_at(base, sweep.variable, v);
    const Index n_ph = num_cfg.n_ph;
    PointResult out;
    out.tables.resize(2);
    const CouplingSet c = cavity_coupling_set(*atom, p);
    std::optional<SWCoefficients> s;
    std::string sw_status = "ok", sw_message;
    try {
      s = sw_coefficients(c, num_cfg.l_max, num_cfg.dispersive_threshold);
    } catch (const Error& e) {
      sw_status = error_kind(e);
      sw_message = e.what();
    }
    const auto two = two_level_operators(*atom, n_ph);
    std::optional<SpectrumResult> eq, er;
    for (const auto& m : models) {
      Row row{num(v), m};
      try {
        ObservableRecord rec;
        if (m == "full") {
          rec = eigenstate_observables(eigh(build_full_dipole(c, num_cfg.n_a, n_ph), false),
                                       full_model_operators(*atom, num_cfg.n_a, n_ph));
        } else if (m == "qrm") {
          eq = eigh(build_qrm_dipole(c, n_ph), false);
          rec = eigenstate_observables(*eq, two);
        } else if (!s) {
          throw Error(sw_message);
        } else if (m == "rqrm") {
          er = eigh(build_rqrm(c, *s, n_ph), false);
          rec = eigenstate_observables(*er, two);
        } else {
          const auto b = bogoliubov_rqrm(c, *s, n_ph);
          rec = eigenstate_observables(eigh(b.H, false), two_level_operators(*atom, n_ph, b.quadrature_scale));
        }
        row.insert(row.end(), {num(rec.quad_sq_33), num(rec.quad_02), num(rec.x_02), "ok"});
      } catch (const Error& e) {
        const std::string kind = (!s && m != "full" && m != "qrm") ? sw_status : error_kind(e);
        row.insert(row.end(), {"nan", "nan", "nan", kind});
        out.failures.push_back("g_over_wc=" + num(v) + " " + m + ": " + e.what());
      }
      out.tables[0].push_back(std::move(row));
    }
    try {
      if (!eq) eq = eigh(build_qrm_dipole(c, n_ph), false);
      if (!s) throw Error(sw_message);
      if (!er) er = eigh(build_rqrm(c, *s, n_ph), false);
      const std::vector<Index> dims{2, n_ph};
      out.tables[1].push_back({num(v), "2", num(eigenstate_infidelity(*er, *eq, dims, 2, Subsystem::cavity)),
                               num(eigenstate_infidelity(*er, *eq, dims, 2, Subsystem::atom)), "ok"});
    } catch (const Error& e) {
      out.tables[1].push_back({num(v), "2", "nan", "nan", s ? error_kind(e) : sw_status});
      out.failures.push_back("g_over_wc=" + num(v) + " infidelity: " + e.what());
    }
    return out;
  };
  return plan;
}

inline Plan plan_resolvent_order(const Config& cfg, const RunOptions& opt) {
  cfg.check_keys(merge({cavity_keys(), numerics_keys()},
                       {"resolvent.max_order", "resolvent.max_iter", "resolvent.tol", "resolvent.damping",
                        "resolvent.max_jump", "resolvent.omega0_shift"}));
  const CavityParams p = parse_cavity(cfg, "");
  const Numerics num_cfg = parse_numerics(cfg, 12, 40);
  const Index max_order = positive_int(cfg, "resolvent.max_order", 12, 0);
  ResolventConfig base;
  base.max_iter = static_cast<int>(positive_int(cfg, "resolvent.max_iter", 200));
  base.tol = positive(cfg, "resolvent.tol", 1e-10);
  base.damping = positive(cfg, "resolvent.damping", 0.5);
  if (base.damping > 1.0) throw cfg.bad_value("resolvent.damping", "a number in (0, 1]");
  base.max_jump = cfg.get_double("resolvent.max_jump", 0.5);
  const double omega0_shift = cfg.get_double("resolvent.omega0_shift", 0.0);

  struct Shared {
    CouplingSet c;
    SWCoefficients s;
    RVector full, qrm, rqrm, seeds;
    std::optional<ResolventProblem> problem;
  };
  auto sh = std::make_shared<Shared>();
  const AtomSpectrum atom = cavity_atom(p, num_cfg.n_levels);
  sh->c = cavity_coupling_set(atom, p);
  sh->s = sw_coefficients(sh->c, num_cfg.l_max, num_cfg.dispersive_threshold);
  const auto h = build_full_dipole(sh->c, num_cfg.n_a, num_cfg.n_ph);
  sh->full = eigvalsh(h);
  sh->qrm = eigvalsh(build_qrm_dipole(sh->c, num_cfg.n_ph));
  sh->rqrm = eigvalsh(build_rqrm(sh->c, sh->s, num_cfg.n_ph));
  sh->seeds = sh->rqrm.head(num_cfg.n_report + 1).array() + identity_offset(sh->c, sh->s);
  sh->problem.emplace(make_resolvent(h, sh->c, num_cfg.n_a, num_cfg.n_ph));
  base.omega0 = default_omega0(sh->c) + omega0_shift * sh->c.omega_c;

  std::vector<std::string> header{"mode", "order"};
  for (const auto& e : energy_header(num_cfg.n_report)) header.push_back(e);
  for (const char* k : {"sigma", "converged", "iterations", "diverging", "status"}) header.push_back(k);
  Plan plan;
  plan.tables = {{"", header}};
  plan.points = static_cast<std::size_t>(max_order) + 4;  // qrm, rqrm, series 0..M, exact
  const Index n = num_cfg.n_report;
  const auto seed_tol = opt.seed_tolerance;
  plan.run = [=](std::size_t i) {
    PointResult out;
    out.tables.resize(1);
    const double wc = sh->c.omega_c;
    auto reference_row = [&](const std::string& mode, const RVector& e) {
      Row r{mode, "-1"};
      push_energies(r, &e, n, wc);
      r.insert(r.end(), {num(mse_sigma(e, sh->full, n, wc).sigma), "1", "0", "0", "ok"});
      return r;
    };
    if (i == 0) {
      out.tables[0].push_back(reference_row("qrm", sh->qrm));
      return out;
    }
    if (i == 1) {
      out.tables[0].push_back(reference_row("rqrm", sh->rqrm));
      return out;
    }
    ResolventConfig rc = base;
    const bool exact = static_cast<Index>(i) == max_order + 3;
    rc.order = exact ? -1 : static_cast<int>(i - 2);
    const std::string mode = exact ? "exact" : "series";
    Row r{mode, std::to_string(rc.order)};
    try {
      SeriesDiagnostics diag;
      if (!exact) sh->problem->h_eff_series(sh->seeds(0), rc.order, rc.omega0, &diag);
      const auto res = sh->problem->solve_selfconsistent(rc, sh->seeds);
      bool all = true;
      int iters = 0;
      std::string status = "ok";
      for (Index k = 0; k < res.energies.size(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        iters = std::max(iters, res.iterations[ku]);
        if (!res.converged[ku]) {
          all = false;
          status = res.failure[ku];
        } else if (seed_tol && std::abs(res.energies(k) - sh->seeds(k)) > *seed_tol * wc) {
          all = false;
          status = "seed";
        }
      }
      push_energies(r, &res.energies, n, wc);
      r.insert(r.end(), {num(mse_sigma(res.energies, sh->full, n, wc).sigma), flag(all), std::to_string(iters),
                         flag(diag.diverging), status});
      if (!all) out.failures.push_back(mode + " order " + std::to_string(rc.order) + ": " + status);
    } catch (const Error& e) {
      push_energies(r, nullptr, n, wc);
      r.insert(r.end(), {"nan", "0", "0", "0", error_kind(e)});
      out.failures.push_back(mode + " order " + std::to_string(rc.order) + ": " + e.what());
    }
    out.tables[0].push_back(std::move(r));
    return out;
  };
  return plan;
}

inline Plan plan_gauge_sweep(const Config& cfg) {
  cfg.check_keys(merge({cavity_keys(), numerics_keys(), sweep_keys()},
                       {"numerics.grid_points", "numerics.grid_half_width", "numerics.n_ph_grid", "numerics.fock_pad"}));
  const Sweep sweep = parse_sweep(cfg, {"eta"}, "eta", [] { return 1.0; });
  for (double e : sweep.values) {
    if (!(e >= 0.0 && e <= 1.0)) throw cfg.bad_value("sweep.start", "eta values in [0, 1]");
  }
  const CavityParams p = parse_cavity(cfg, "");
  if (p.g_in_w10) throw cfg.bad_value("cavity.g_over_w10", "cavity.g_over_wc for this experiment");
  const Numerics num_cfg = parse_numerics(cfg, 12, 40);
  const Index grid_points = positive_int(cfg, "numerics.grid_points", 40, 8);
  const double half_width = positive(cfg, "numerics.grid_half_width", 4.5);
  const Index n_ph_grid = positive_int(cfg, "numerics.n_ph_grid", 30, 2);
  const Index pad = positive_int(cfg, "numerics.fock_pad", 100, 0);
  const auto models = parse_models(cfg, {"full_eta", "qrm_eta", "qrm_gi", "rqrm_gi"}, {"full_eta", "qrm_eta", "qrm_gi", "rqrm_gi"});

  struct Shared {
    AtomSpectrum grid_atom;
    CouplingSet c;
    std::optional<SWCoefficients> s;
    std::string sw_message;
    RVector full;
    double theta = 0.0;
    bool atom_converged = false;
  };
  auto sh = std::make_shared<Shared>();
  const AtomSpectrum atom = cavity_atom(p, num_cfg.n_levels);
  sh->c = cavity_coupling_set(atom, p);
  sh->atom_converged = atom.grid_meta.converged;
  try {
    sh->s = sw_coefficients(sh->c, num_cfg.l_max, num_cfg.dispersive_threshold);
  } catch (const Error& e) {
    sh->sw_message = e.what();
  }
  sh->full = eigvalsh(build_full_dipole(sh->c, num_cfg.n_a, num_cfg.n_ph));
  const auto dw = double_well_from_gamma(p.gamma, p.m);
  sh->grid_atom = solve_potential_1d(p.m, dw.potential(), GridSpec{grid_points, half_width},
                                     std::max<Index>(2, grid_points / 4), false);
  const double wc = sh->c.omega_c;
  sh->theta = a0_from_target_g(p.g * wc, wc, p.q, sh->grid_atom.x_mat(0, 1)) * p.q;

  Plan plan;
  plan.tables = {{"", spectrum_header("eta", num_cfg.n_report)}};
  plan.points = sweep.values.size();
  plan.run = [=](std::size_t i) {
    const double eta = sweep.values[i];
    std::vector<ModelSpectrum> rows;
    const double wc_l = sh->c.omega_c;
    std::optional<HermitianOperator> h_eta;
    auto grid_h = [&]() -> const HermitianOperator& {
      if (!h_eta) h_eta = full_eta_grid(sh->grid_atom, sh->theta, wc_l, n_ph_grid, eta, pad);
      return *h_eta;
    };
    for (const auto& m : models) {
      if (m == "full_eta") {
        rows.push_back(try_model(m, [&] { return eigvalsh(grid_h()); }));
      } else if (m == "qrm_eta") {
        rows.push_back(try_model(m, [&] { return eigvalsh(projected_two_level(grid_h(), sh->grid_atom, n_ph_grid)); }));
      } else if (!sh->s) {
        rows.push_back({m, std::nullopt, "dispersive", sh->sw_message});
      } else {
        const bool ren = m == "rqrm_gi";
        rows.push_back(try_model(m, [&] { return eigvalsh(build_gauge_truncated(eta, sh->c, ren, *sh->s, num_cfg.n_ph)); }));
      }
    }
    return spectrum_rows("eta", eta, rows, &sh->full, num_cfg.n_report, wc_l, sh->atom_converged, &sh->c,
                         sh->s ? &*sh->s : nullptr);
  };
  return plan;
}

inline Plan plan_pulse(const Config& cfg) {
  cfg.check_keys(merge({flux_keys()}, {"numerics.n_levels", "numerics.n_a", "numerics.n_ph", "numerics.samples",
                                       "numerics.steps_per_period", "numerics.l_max", "drive.sigma_factor",
                                       "drive.t0_factor", "drive.window_factor", "drive.variance_form"}));
  const FluxParams p = parse_flux(cfg, "");
  const Index n_levels = positive_int(cfg, "numerics.n_levels", 64, 3);
  const Index n_a = positive_int(cfg, "numerics.n_a", 15, 2);
  const Index n_ph = positive_int(cfg, "numerics.n_ph", 30, 2);
  const Index samples = positive_int(cfg, "numerics.samples", 4000);
  const double steps_per_period = positive(cfg, "numerics.steps_per_period", 40.0);
  const Index l_max = positive_int(cfg, "numerics.l_max", kDefaultLMax, 2);
  const double sigma_factor = positive(cfg, "drive.sigma_factor", 50.0);
  const double t0_factor = positive(cfg, "drive.t0_factor", 3.0);
  const double window_factor = positive(cfg, "drive.window_factor", 2.0);
  const bool variance_form = cfg.get_bool("drive.variance_form", false);
  const auto models = parse_models(cfg, {"circuit_full", "circuit_qrm", "circuit_rqrm"},
                                   {"circuit_full", "circuit_qrm", "circuit_rqrm"});
  if (n_a > n_levels) throw cfg.bad_value("numerics.n_a", "a value <= numerics.n_levels");

  struct Shared {
    AtomSpectrum atom;
    CouplingSet c;
    DriveSpec drive;
    double t_end = 0.0;
  };
  auto sh = std::make_shared<Shared>();
  sh->atom = solve_fluxonium(p.physical(), n_levels);
  sh->c = circuit_coupling_set(sh->atom, p);
  const RVector ef = eigvalsh(build_circuit_full(sh->c, n_a, n_ph));
  const double e10 = ef(1) - ef(0), e21 = ef(2) - ef(1);
  const double sigma = sigma_factor / (e21 - e10);
  if (!(sigma > 0.0)) throw Error("pulse: E21 <= E10, drive width undefined");
  sh->drive = pi_pulse(e10, sigma, t0_factor * sigma, variance_form);
  sh->t_end = window_factor * t0_factor * sigma;

  const auto n_models = models.size();
  Plan plan;
  std::vector<std::string> trace_header{"t_ns"};
  for (const auto& m : models) trace_header.push_back(m);
  plan.tables = {{"", trace_header}, {"_summary", {"model", "l2_distance", "norm_drift", "steps", "dt", "omega_dr",
                                                    "sigma_dr", "t0", "status"}}};
  plan.points = n_models;
  struct Trace {
    std::vector<double> t, y;
    double drift = 0.0, dt = 0.0;
    Index steps = 0;
    std::string status = "ok", message;
  };
  auto traces = std::make_shared<std::vector<Trace>>(n_models);
  // Each point evolves one model; the last point to finish cannot be known in
  // advance, so the merge happens in finalize.
  plan.run = [=](std::size_t i) {
    const std::string& m = models[i];
    Trace& tr = (*traces)[i];
    try {
      const CouplingSet& c = sh->c;
      std::optional<HermitianOperator> h;
      CMatrix drive_op, obs;
      const FockSpace f(n_ph);
      if (m == "circuit_full") {
        h = build_circuit_full(c, n_a, n_ph);
        const CMatrix phi = sh->atom.x_mat.topLeftCorner(n_a, n_a).cast<cplx>() / std::abs(sh->atom.x_mat(0, 1));
        drive_op = kron(phi, f.identity());
        obs = kron(CMatrix::Identity(n_a, n_a), CMatrix(kI * f.a_minus_adag()));
      } else {
        if (m == "circuit_qrm") {
          h = build_circuit_qrm(c, n_ph);
        } else {
          h = build_circuit_rqrm(c, sw_coefficients(c, l_max), n_ph);
        }
        drive_op = kron(pauli::x(), f.identity());
        obs = kron(pauli::identity(), CMatrix(kI * f.a_minus_adag()));
      }
      const auto spec = eigh(*h, false);
      const CVector psi0 = spec.eigenvectors.col(0);
      EvolveOptions eo;
      eo.samples = samples;
      eo.steps_per_period = steps_per_period;
      const auto run = evolve(*h, drive_op, sh->drive, psi0, sh->t_end, {{"y", obs}}, eo);
      tr.t = run.times;
      tr.y = run.series("y");
      tr.drift = run.norm_drift;
      tr.dt = run.dt;
      tr.steps = run.steps;
    } catch (const Error& e) {
      tr.status = error_kind(e);
      tr.message = e.what();
    }
    return PointResult{{{}, {}}, {}};
  };
  plan.finalize = [=](std::vector<std::vector<Row>>& tables, std::vector<std::string>& failures) {
    const Trace* ref = nullptr;
    for (std::size_t k = 0; k < n_models; ++k) {
      if (models[k] == "circuit_full" && (*traces)[k].status == "ok") ref = &(*traces)[k];
    }
    std::size_t n_t = 0;
    for (const auto& tr : *traces) n_t = std::max(n_t, tr.t.size());
    for (std::size_t s = 0; s < n_t; ++s) {
      std::string t = "nan";
      for (const auto& tr : *traces) {
        if (s < tr.t.size()) {
          t = num(tr.t[s]);
          break;
        }
      }
      Row r{t};
      for (const auto& tr : *traces) r.push_back(s < tr.y.size() ? num(tr.y[s]) : "nan");
      tables[0].push_back(std::move(r));
    }
    for (std::size_t k = 0; k < n_models; ++k) {
      const Trace& tr = (*traces)[k];
      std::string l2 = "nan";
      if (ref && tr.status == "ok" && tr.y.size() == ref->y.size()) l2 = num(trace_distance_l2(tr.y, ref->y));
      tables[1].push_back({models[k], l2, tr.status == "ok" ? num(tr.drift) : "nan", num(tr.steps), num(tr.dt),
                           num(sh->drive.omega_dr), num(sh->drive.sigma_dr), num(sh->drive.t0), tr.status});
      if (tr.status != "ok") failures.push_back(models[k] + ": " + tr.message);
    }
  };
  return plan;
}

inline Plan make_plan(const std::string& experiment, const Config& cfg, const RunOptions& opt) {
  if (experiment == "atom-solve") return plan_atom_solve(cfg);
  if (experiment == "spectrum-sweep") return plan_spectrum_sweep(cfg);
  if (experiment == "anharmonicity-sweep") return plan_anharmonicity_sweep(cfg);
  if (experiment == "circuit-sweep") return plan_circuit_sweep(cfg);
  if (experiment == "pulse") return plan_pulse(cfg);
  if (experiment == "resolvent-order") return plan_resolvent_order(cfg, opt);
  if (experiment == "gauge-sweep") return plan_gauge_sweep(cfg);
  if (experiment == "observables") return plan_observables(cfg);
  throw ConfigError("unknown experiment '" + experiment + "'");
}

inline std::string default_output_name(std::string experiment) {
  std::replace(experiment.begin(), experiment.end(), '-', '_');
  return experiment;
}

}  // namespace exp

/// Runs `experiment` with `cfg` and writes `<out_dir>/<output.name><suffix>.csv`
/// for each table. Config problems surface as ConfigError; failures inside
/// the physics are recorded as rows with a status token and exit code 3.
inline RunResult run_experiment(const std::string& experiment, const Config& cfg, const std::filesystem::path& out_dir,
                                const RunOptions& opt = {}) {
  if (cfg.has("experiment") && cfg.get_string("experiment") != experiment) {
    throw cfg.bad_value("experiment", "'" + experiment + "' to match the subcommand");
  }
  const auto t_start = std::chrono::steady_clock::now();
  RunResult result;
  exp::Plan plan;
  try {
    plan = exp::make_plan(experiment, cfg, opt);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    result.exit_code = kExitNumerical;
    result.failures.push_back(exp::error_kind(e) + ": " + e.what());
    if (!opt.quiet) std::cerr << "rqed: " << experiment << " setup failed: " << e.what() << "\n";
    return result;
  }
  const auto points = parallel_map(plan.points, opt.threads, plan.run);
  std::vector<std::vector<exp::Row>> rows(plan.tables.size());
  for (const auto& pr : points) {
    for (std::size_t t = 0; t < pr.tables.size() && t < rows.size(); ++t) {
      rows[t].insert(rows[t].end(), pr.tables[t].begin(), pr.tables[t].end());
    }
    result.failures.insert(result.failures.end(), pr.failures.begin(), pr.failures.end());
  }
  if (plan.finalize) plan.finalize(rows, result.failures);
  std::filesystem::create_directories(out_dir);
  const std::string name = cfg.get_string("output.name", exp::default_output_name(experiment));
  for (std::size_t t = 0; t < plan.tables.size(); ++t) {
    CsvTable table(plan.tables[t].header);
    for (auto& r : rows[t]) table.add_row(std::move(r));
    const auto path = out_dir / (name + plan.tables[t].suffix + ".csv");
    write_csv(path, table);
    result.files.push_back(path);
  }
  if (!result.failures.empty()) result.exit_code = kExitNumerical;
  if (!opt.quiet) {
    for (const auto& f : result.failures) std::cerr << "rqed: failure: " << f << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    std::cerr << "rqed: " << experiment << ": " << plan.points << " points, " << result.failures.size()
              << " failures, " << secs << " s\n";
  }
  return result;
}

}  // namespace rqed

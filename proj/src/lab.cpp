#include "eschlab/lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "eschlab/errors.hpp"

namespace eschlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCsvRows = 2000;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }
std::string csv_num(double v) { return fmt("%.12g", v); }

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += exact(xs[i]);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, std::size_t line, std::string_view key) {
  const auto t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("malformed number '" + std::string(t) + "' for key " + std::string(key), line);
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, std::size_t line, std::string_view key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start), line, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ExperimentPreset base(std::string name, DomainSpec domain, ModelParams params, InitialCondition ic,
                      double t_end, std::vector<double> outputs, std::vector<double> eps) {
  ExperimentPreset p;
  p.name = std::move(name);
  p.domain = domain;
  p.params = params;
  p.mbar_list = {params.mbar};
  p.initial = ic;
  p.t_end = t_end;
  p.output_times = std::move(outputs);
  p.epsilon_list = std::move(eps);
  if (!p.epsilon_list.empty()) p.params.epsilon = p.epsilon_list.front();
  return p;
}

DomainSpec interval(IntervalKind k) { return {DomainSpec::Kind::Interval, k, 0.0}; }
DomainSpec sphere(double vbar) {
  return {DomainSpec::Kind::SphereTangential, IntervalKind::Stationary, vbar};
}

const std::vector<double> kOneDimEps = {0.4, 0.1, 0.025};

ExperimentPreset make_builtin(std::string_view name) {
  const auto pm1 = quartic_params(-1.0, 1.0, 0.1, 1.0);
  const auto positive = quartic_params(0.2, 0.8, 0.1, 1.0);
  const auto sphere_params = quartic_params(-1.0, 1.0, 0.1, 5.0);
  const auto caps = InitialCondition::two_caps(0.8, 2.1, 1.45);
  const std::vector<double> interval_times = {0.25, 1.0, 2.0, 10.0};
  const std::vector<double> sphere_times = {0.0, 0.05, 0.1, 0.15};

  if (name == "stretch" || name == "sharp-interval") {
    auto p = base(std::string(name), interval(IntervalKind::StretchThenStop), pm1,
                  InitialCondition::scaled_tanh(0.0, 0.9, 10.0, 5.0), 10.0, interval_times,
                  name == "stretch" ? kOneDimEps : std::vector<double>{});
    p.comparison = Comparison::SharpInterval;
    p.sharp_lambda0 = 0.5;
    return p;
  }
  if (name == "compress") {
    auto p = base("compress", interval(IntervalKind::CompressThenStop), pm1,
                  InitialCondition::scaled_tanh(0.0, 0.9, 10.0, 15.0), 10.0, interval_times, kOneDimEps);
    p.comparison = Comparison::SharpInterval;
    p.sharp_lambda0 = 1.5;
    return p;
  }
  if (name == "stretch-positive") {
    return base("stretch-positive", interval(IntervalKind::StretchThenStop), positive,
                InitialCondition::width_tanh(0.5, 0.3, 0.5), 2.0, {0.25, 0.5, 1.0, 2.0}, kOneDimEps);
  }
  if (name == "genesis") {
    return base("genesis", interval(IntervalKind::FixedUnit), positive,
                InitialCondition::constant(0.5), 0.2, {0.0, 0.066, 0.099, 0.198}, {0.033});
  }
  if (name == "bulk-motion") {
    auto p = base("bulk-motion", interval(IntervalKind::CotangentGrowth), pm1,
                  InitialCondition::width_tanh(0.0, 1.0, 0.25), 2.0, {0.1, 1.0, 1.8}, {0.01});
    p.comparison = Comparison::SharpInterval;
    p.sharp_lambda0 = 0.25;
    p.dt = 1e-4;
    return p;
  }
  if (name == "sphere-coarsen") {
    return base("sphere-coarsen", sphere(0.0), sphere_params, caps, 0.15, sphere_times, {0.1});
  }
  if (name == "sphere-reverse") {
    return base("sphere-reverse", sphere(10.0), sphere_params, caps, 0.15, sphere_times, {0.1});
  }
  if (name == "sphere-energy" || name == "sharp-caps") {
    auto p = base(std::string(name), sphere(10.0), sphere_params, caps, 0.15, sphere_times,
                  name == "sphere-energy" ? std::vector<double>{0.2, 0.1, 0.05} : std::vector<double>{});
    p.comparison = Comparison::SharpCaps;
    return p;
  }
  if (name == "mobility-scaling") {
    auto p = base("mobility-scaling",
                  {DomainSpec::Kind::DeformingSphere, IntervalKind::Stationary, 0.0}, sphere_params,
                  InitialCondition::two_caps(1.0, 2.1, 1.55), 0.2, {0.0, 0.05, 0.2}, {0.1});
    p.mbar_list = {5.0, 50.0};
    return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'", 0);
}

std::string run_dir_name(double eps, double mbar, bool with_mbar) {
  std::string s = "eps_" + fmt("%g", eps);
  if (with_mbar) s += "_mbar_" + fmt("%g", mbar);
  return s;
}

// Linear interpolation of a sampled series at t, clamped to the sampled range.
template <typename State, typename Get>
std::vector<double> interpolate(const std::vector<State>& states, double t, Get get) {
  if (states.empty()) return {};
  if (t <= states.front().t) return get(states.front());
  if (t >= states.back().t) return get(states.back());
  const auto it = std::lower_bound(states.begin(), states.end(), t,
                                   [](const State& s, double v) { return s.t < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  auto va = get(a);
  const auto vb = get(b);
  for (std::size_t i = 0; i < va.size(); ++i) va[i] += s * (vb[i] - va[i]);
  return va;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string trace_csv(const RunResult& r) {
  std::string s = "t,energy,mass,iface1,iface2\n";
  for (const auto& row : r.trace) {
    s += csv_num(row.t) + ',' + csv_num(row.energy) + ',' + csv_num(row.mass) + ',';
    if (!row.interfaces.empty()) s += csv_num(row.interfaces[0]);
    s += ',';
    if (row.interfaces.size() > 1) s += csv_num(row.interfaces[1]);
    s += '\n';
  }
  return s;
}

std::string snapshot_csv(const Snapshot& snap) {
  std::string s = "coord,u,w\n";
  for (std::size_t i = 0; i < snap.coord.size(); ++i) {
    s += csv_num(snap.coord[i]) + ',' + csv_num(snap.u[i]) + ',' + csv_num(snap.w[i]) + '\n';
  }
  return s;
}

std::string sharp_csv(const SharpResult& sharp) {
  std::string s;
  auto stride = [](std::size_t n) { return std::max<std::size_t>(1, (n + kMaxCsvRows - 1) / kMaxCsvRows); };
  if (sharp.caps) {
    const auto& st = sharp.caps->states;
    s = "t,theta1,theta2,energy\n";
    const std::size_t k = stride(st.size());
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (i % k != 0 && i + 1 != st.size()) continue;
      s += csv_num(st[i].t) + ',' + csv_num(st[i].theta1) + ',' + csv_num(st[i].theta2) + ',' +
           csv_num(sharp_energy(st[i], sharp.cap_params)) + '\n';
    }
  } else if (sharp.interval) {
    const auto& st = sharp.interval->states;
    s = "t,lambda\n";
    const std::size_t k = stride(st.size());
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (i % k != 0 && i + 1 != st.size()) continue;
      s += csv_num(st[i].t) + ',' + csv_num(st[i].lambda) + '\n';
    }
  }
  if (const auto& ev = sharp.event()) s += "event," + csv_num(ev->time) + ',' + ev->kind + '\n';
  return s;
}

std::string opt_num(const std::optional<double>& v) { return v ? csv_num(*v) : std::string(); }

std::string summary_csv(const std::vector<SummaryRow>& rows, const SharpResult& sharp) {
  std::string s = "epsilon,mbar,final_time,iface1,iface2,sharp_iface1,sharp_iface2,"
                  "interface_error,max_energy_gap,mass_drift,status\n";
  for (const auto& r : rows) {
    const auto ref = sharp.interfaces_at(r.final_time);
    s += csv_num(r.epsilon) + ',' + csv_num(r.mbar) + ',' + csv_num(r.final_time) + ',';
    s += (r.interfaces.size() > 0 ? csv_num(r.interfaces[0]) : "") + ',';
    s += (r.interfaces.size() > 1 ? csv_num(r.interfaces[1]) : "") + ',';
    s += (ref.size() > 0 ? csv_num(ref[0]) : "") + ',';
    s += (ref.size() > 1 ? csv_num(ref[1]) : "") + ',';
    s += opt_num(r.interface_error) + ',' + opt_num(r.max_energy_gap) + ',' + csv_num(r.mass_drift) +
         ',' + r.status + '\n';
  }
  return s;
}

std::string gnuplot_script(const ExperimentPreset& p, const std::vector<PhaseFieldRun>& runs,
                           bool with_mbar) {
  std::ostringstream g;
  g << "set datafile separator ','\nset key outside\n";
  g << "set terminal pngcairo size 1200,800\n";
  for (double t : p.output_times) {
    if (t > p.t_end) continue;
    const std::string file = snapshot_file_name(p.name, t);
    g << "set output '" << file.substr(0, file.size() - 4) << ".png'\n";
    g << "set title '" << p.name << " t=" << fmt("%.4f", t) << "'\nset xlabel 'coord'\nset ylabel 'u'\n";
    g << "plot ";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto dir = run_dir_name(runs[i].epsilon, runs[i].mbar, with_mbar);
      g << (i ? ", " : "") << "'" << dir << "/" << file << "' using 1:2 with lines title '" << dir << "'";
    }
    g << "\n";
  }
  g << "set output '" << p.name << "_energy.png'\nset title '" << p.name
    << " energy'\nset xlabel 't'\nset ylabel 'energy'\nplot ";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto dir = run_dir_name(runs[i].epsilon, runs[i].mbar, with_mbar);
    g << (i ? ", " : "") << "'" << dir << "/trace.csv' using 1:2 with lines title '" << dir << "'";
  }
  if (p.comparison == Comparison::SharpCaps) {
    g << (runs.empty() ? "" : ", ") << "'sharp_trajectory.csv' using 1:4 with lines title 'sharp'";
  }
  g << "\n";
  return g.str();
}

}  // namespace

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::None: return "none";
    case Comparison::SharpInterval: return "sharp-interval";
    case Comparison::SharpCaps: return "sharp-caps";
  }
  return "none";
}

Domain DomainSpec::build() const {
  switch (kind) {
    case Kind::Interval: return MovingInterval(interval);
    case Kind::SphereTangential: return SurfaceOfRevolution::unit_sphere_tangential(vbar);
    case Kind::DeformingSphere: return SurfaceOfRevolution::deforming_sphere();
  }
  return MovingInterval(interval);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "stretch",        "compress",       "stretch-positive", "genesis",
      "bulk-motion",    "sphere-coarsen", "sphere-reverse",   "sphere-energy",
      "mobility-scaling", "sharp-caps",   "sharp-interval"};
  return names;
}

ExperimentPreset builtin_preset(std::string_view name) { return make_builtin(name); }

ExperimentPreset parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  static const char* const kKeys[] = {"preset", "epsilon", "mbar",   "vbar",     "u_a",
                                      "u_b",    "potential", "mobility", "t_end", "dt",
                                      "n_cells", "out_dir", "output_times", "theta", "theta_c",
                                      "k1",     "k2",      "alpha",  "beta"};
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
    if (entries.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    entries[key] = {value, line_no};
  }
  const auto preset_it = entries.find("preset");
  if (preset_it == entries.end()) throw ConfigError("missing preset key", 0);

  ExperimentPreset p;
  try {
    p = make_builtin(preset_it->second.value);
  } catch (const ConfigError& e) {
    throw ConfigError("unknown preset '" + preset_it->second.value + "'", preset_it->second.line);
  }

  auto get = [&](const char* key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto positive = [](double v, const Entry& e, const char* key) {
    if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive", e.line);
    return v;
  };

  if (const auto* e = get("epsilon")) {
    p.epsilon_list = parse_list(e->value, e->line, "epsilon");
    for (double v : p.epsilon_list) positive(v, *e, "epsilon");
    if (!p.epsilon_list.empty()) p.params.epsilon = p.epsilon_list.front();
  }
  if (const auto* e = get("mbar")) {
    p.mbar_list = parse_list(e->value, e->line, "mbar");
    if (p.mbar_list.empty()) throw ConfigError("mbar needs at least one value", e->line);
    for (double v : p.mbar_list) positive(v, *e, "mbar");
    p.params.mbar = p.mbar_list.front();
  }
  if (const auto* e = get("vbar")) {
    if (p.domain.kind != DomainSpec::Kind::SphereTangential) {
      throw ConfigError("vbar applies only to the tangential sphere presets", e->line);
    }
    p.domain.vbar = parse_number(e->value, e->line, "vbar");
    if (p.domain.vbar < 0.0) throw ConfigError("vbar must be non-negative", e->line);
  }
  if (const auto* e = get("potential")) {
    try {
      p.params.potential = potential_kind_from_string(e->value);
    } catch (const InvalidParamsError& err) {
      throw ConfigError(err.what(), e->line);
    }
  }
  if (const auto* e = get("mobility")) {
    try {
      p.params.mobility = mobility_kind_from_string(e->value);
    } catch (const InvalidParamsError& err) {
      throw ConfigError(err.what(), e->line);
    }
  }
  const std::pair<const char*, double*> log_fields[] = {
      {"theta", &p.params.theta}, {"theta_c", &p.params.theta_c}, {"k1", &p.params.k1},
      {"k2", &p.params.k2},       {"alpha", &p.params.alpha},     {"beta", &p.params.beta}};
  for (const auto& [key, field] : log_fields) {
    if (const auto* e = get(key)) *field = parse_number(e->value, e->line, key);
  }
  const bool log_pot = p.params.potential == PotentialKind::Logarithmic;
  for (const char* key : {"u_a", "u_b"}) {
    if (const auto* e = get(key)) {
      if (log_pot) throw ConfigError("wells follow from the logarithmic potential; remove " + std::string(key), e->line);
      (key[2] == 'a' ? p.params.u_a : p.params.u_b) = parse_number(e->value, e->line, key);
    }
  }
  if (const auto* e = get("t_end")) p.t_end = positive(parse_number(e->value, e->line, "t_end"), *e, "t_end");
  if (const auto* e = get("dt")) {
    if (e->value == "auto") {
      p.dt.reset();
    } else {
      p.dt = positive(parse_number(e->value, e->line, "dt"), *e, "dt");
    }
  }
  if (const auto* e = get("n_cells")) {
    if (e->value == "auto") {
      p.n_cells.reset();
    } else {
      const double v = parse_number(e->value, e->line, "n_cells");
      if (!(v >= 8.0) || v != std::floor(v)) throw ConfigError("n_cells must be an integer >= 8", e->line);
      p.n_cells = static_cast<std::size_t>(v);
    }
  }
  if (const auto* e = get("out_dir")) {
    if (e->value.empty()) throw ConfigError("out_dir must not be empty", e->line);
    p.out_dir = e->value;
  }
  if (const auto* e = get("output_times")) {
    p.output_times = parse_list(e->value, e->line, "output_times");
    if (!std::is_sorted(p.output_times.begin(), p.output_times.end())) {
      throw ConfigError("output_times must be sorted", e->line);
    }
    for (double t : p.output_times) {
      if (t < 0.0) throw ConfigError("output_times must be non-negative", e->line);
    }
  }

  try {
    if (log_pot) {
      if (!(p.params.alpha < p.params.beta)) throw InvalidParamsError("logarithmic potential needs alpha < beta");
      std::tie(p.params.u_a, p.params.u_b) = logarithmic_wells(p.params);
    }
    p.params.validate();
  } catch (const InvalidParamsError& err) {
    throw ConfigError(err.what(), 0);
  }
  return p;
}

std::string render_config(const ExperimentPreset& p) {
  std::ostringstream s;
  s << "preset=" << p.name << '\n';
  s << "epsilon=" << join(p.epsilon_list) << '\n';
  s << "mbar=" << join(p.mbar_list) << '\n';
  if (p.domain.kind == DomainSpec::Kind::SphereTangential) s << "vbar=" << exact(p.domain.vbar) << '\n';
  s << "potential=" << to_string(p.params.potential) << '\n';
  s << "mobility=" << to_string(p.params.mobility) << '\n';
  if (p.params.potential == PotentialKind::Quartic) {
    s << "u_a=" << exact(p.params.u_a) << '\n' << "u_b=" << exact(p.params.u_b) << '\n';
  }
  s << "theta=" << exact(p.params.theta) << '\n' << "theta_c=" << exact(p.params.theta_c) << '\n';
  s << "k1=" << exact(p.params.k1) << '\n' << "k2=" << exact(p.params.k2) << '\n';
  s << "alpha=" << exact(p.params.alpha) << '\n' << "beta=" << exact(p.params.beta) << '\n';
  s << "t_end=" << exact(p.t_end) << '\n';
  s << "dt=" << (p.dt ? exact(*p.dt) : "auto") << '\n';
  s << "n_cells=" << (p.n_cells ? std::to_string(*p.n_cells) : "auto") << '\n';
  s << "out_dir=" << p.out_dir << '\n';
  s << "output_times=" << join(p.output_times) << '\n';
  return s.str();
}

const std::optional<SharpEvent>& SharpResult::event() const {
  static const std::optional<SharpEvent> none;
  if (caps) return caps->event;
  if (interval) return interval->event;
  return none;
}

std::vector<double> SharpResult::interfaces_at(double t) const {
  if (caps) {
    const auto& ev = caps->event;
    if (ev && t >= caps->states.back().t) {
      const auto& last = caps->states.back();
      if (ev->kind == "south-cap-vanished") return {last.theta1};
      if (ev->kind == "north-cap-vanished") return {last.theta2};
      return {};
    }
    return interpolate(caps->states, t, [](const SharpCapState& s) {
      return std::vector<double>{s.theta1, s.theta2};
    });
  }
  if (interval) {
    if (interval->event && t >= interval->states.back().t) return {};
    return interpolate(interval->states, t, [](const SharpIntervalState& s) {
      return std::vector<double>{s.lambda};
    });
  }
  return {};
}

std::optional<double> SharpResult::energy_at(double t) const {
  if (caps) {
    double sum = 0.0;
    for (double th : interfaces_at(t)) sum += std::sin(th);
    return 2.0 * std::numbers::pi * tension * sum;
  }
  if (interval) return tension * static_cast<double>(interfaces_at(t).size());
  return std::nullopt;
}

SharpResult run_sharp(const ExperimentPreset& preset) {
  SharpResult r;
  if (preset.comparison == Comparison::None) return r;
  const auto profile = solve_profile(preset.params);
  r.tension = surface_tension_constant(profile, preset.params) * (preset.params.u_b - preset.params.u_a);
  if (preset.comparison == Comparison::SharpCaps) {
    if (preset.domain.kind != DomainSpec::Kind::SphereTangential) {
      throw UnsupportedError("cap comparison needs the tangential sphere");
    }
    if (preset.initial.kind != InitialCondition::Kind::TwoCaps) {
      throw UnsupportedError("cap comparison needs two-cap initial data");
    }
    r.cap_params.vbar = preset.domain.vbar;
    r.cap_params.mbar = preset.mbar_list.front();
    r.cap_params.s_const = r.tension / (preset.params.u_b - preset.params.u_a);
    r.cap_params.u_a = preset.params.u_a;
    r.cap_params.u_b = preset.params.u_b;
    r.caps = integrate_caps({preset.initial.first, preset.initial.second, 0.0}, r.cap_params, preset.t_end);
    return r;
  }
  if (preset.domain.kind != DomainSpec::Kind::Interval) {
    throw UnsupportedError("interval comparison needs an interval domain");
  }
  auto params = preset.params;
  params.mbar = preset.mbar_list.front();
  r.interval = integrate_interval({preset.sharp_lambda0, 0.0, preset.sharp_orientation},
                                  MovingInterval(preset.domain.interval), params, preset.t_end);
  return r;
}

PhaseFieldRun run_phase_field(const ExperimentPreset& preset, double epsilon, double mbar) {
  PhaseFieldRun out;
  out.epsilon = epsilon;
  out.mbar = mbar;
  try {
    auto params = preset.params;
    params.epsilon = epsilon;
    params.mbar = mbar;
    const Domain domain = preset.domain.build();
    out.resolution = default_resolution(domain, params, preset.t_end);
    if (preset.dt) out.resolution.dt = *preset.dt;
    if (preset.n_cells) out.resolution.n_cells = *preset.n_cells;

    SolverConfig cfg;
    cfg.dt = out.resolution.dt;
    cfg.output_times = preset.output_times;
    const double steps = preset.t_end / cfg.dt;
    cfg.trace_every = std::max(1, static_cast<int>(std::ceil(steps / static_cast<double>(kMaxCsvRows))));

    const auto initial = initialize(domain, params, preset.initial, out.resolution.n_cells);
    const double scale = std::max(std::abs(total_mass(initial, domain)), absolute_mass(initial, domain));
    out.result = run(domain, params, cfg, initial, preset.t_end);
    out.mass_drift = scale > 0.0 ? out.result.max_mass_deviation / scale : 0.0;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<SummaryRow> summary_rows(const std::vector<PhaseFieldRun>& runs, const SharpResult& sharp) {
  std::vector<SummaryRow> rows;
  for (const auto& run : runs) {
    SummaryRow row;
    row.epsilon = run.epsilon;
    row.mbar = run.mbar;
    row.status = run.ok() ? "ok" : "failed";
    if (!run.ok()) {
      rows.push_back(row);
      continue;
    }
    const auto& fin = run.result.final_state;
    row.final_time = fin.t;
    row.mass_drift = run.mass_drift;
    if (!run.result.trace.empty()) row.interfaces = run.result.trace.back().interfaces;
    if (sharp.caps || sharp.interval) {
      const auto ref = sharp.interfaces_at(fin.t);
      double err = kInf;
      if (ref.size() == row.interfaces.size()) {
        err = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - row.interfaces[i]));
        if (err < kInterfaceErrorFloor) err = 0.0;
      }
      row.interface_error = err;
      double gap = 0.0;
      for (const auto& tr : run.result.trace) gap = std::max(gap, std::abs(tr.energy - *sharp.energy_at(tr.t)));
      row.max_energy_gap = gap;
    }
    rows.push_back(row);
  }
  return rows;
}

SweepReport sweep_report(const std::vector<PhaseFieldRun>& runs, const SharpResult& sharp) {
  if (runs.size() < 2) throw InvalidParamsError("a sweep report needs at least two runs");
  SweepReport rep;
  rep.rows = summary_rows(runs, sharp);
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) { return a.epsilon > b.epsilon; });
  auto decreasing = [&](auto get) {
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      const auto prev = get(rep.rows[i - 1]);
      const auto cur = get(rep.rows[i]);
      if (!prev || !cur || !(*cur < *prev)) return false;
    }
    return true;
  };
  rep.interface_errors_decreasing = decreasing([](const SummaryRow& r) { return r.interface_error; });
  rep.energy_gaps_decreasing = decreasing([](const SummaryRow& r) { return r.max_energy_gap; });
  return rep;
}

std::string snapshot_file_name(std::string_view preset, double t) {
  return std::string(preset) + "_t" + fmt("%.4f", t) + ".csv";
}

PresetOutcome run_preset(const ExperimentPreset& preset, const RunOptions& options) {
  PresetOutcome out;
  std::vector<std::pair<double, double>> jobs;
  for (double eps : preset.epsilon_list) {
    for (double mbar : preset.mbar_list) jobs.emplace_back(eps, mbar);
  }
  if (options.parallel && jobs.size() > 1) {
    std::vector<std::future<PhaseFieldRun>> futures;
    for (const auto& [eps, mbar] : jobs) {
      futures.push_back(std::async(std::launch::async, [&preset, eps = eps, mbar = mbar] {
        return run_phase_field(preset, eps, mbar);
      }));
    }
    for (auto& f : futures) out.runs.push_back(f.get());
  } else {
    for (const auto& [eps, mbar] : jobs) out.runs.push_back(run_phase_field(preset, eps, mbar));
  }

  try {
    out.sharp = run_sharp(preset);
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.diagnostic = std::string("sharp solver failed: ") + e.what();
  }
  out.summary = summary_rows(out.runs, out.sharp);

  for (const auto& r : out.runs) {
    if (!r.ok()) {
      out.exit_code = 2;
      if (!out.diagnostic.empty()) out.diagnostic += "; ";
      out.diagnostic += "eps=" + fmt("%g", r.epsilon) + " mbar=" + fmt("%g", r.mbar) + ": " + r.error;
    }
  }
  if (out.exit_code == 0) {
    if (const auto& ev = out.sharp.event(); ev && ev->time < preset.t_end) {
      out.exit_code = 3;
      out.diagnostic = "sharp solver: " + ev->kind + " at t = " + fmt("%.6g", ev->time);
    }
  }

  if (options.write_files) {
    namespace fs = std::filesystem;
    const fs::path root(preset.out_dir);
    fs::create_directories(root);
    const bool with_mbar = preset.mbar_list.size() > 1;
    for (const auto& r : out.runs) {
      if (!r.ok()) continue;
      const fs::path dir = root / run_dir_name(r.epsilon, r.mbar, with_mbar);
      fs::create_directories(dir);
      for (const auto& snap : r.result.snapshots) {
        write_text(dir / snapshot_file_name(preset.name, snap.t), snapshot_csv(snap));
      }
      write_text(dir / "trace.csv", trace_csv(r.result));
    }
    if (out.sharp.caps || out.sharp.interval) write_text(root / "sharp_trajectory.csv", sharp_csv(out.sharp));
    write_text(root / "summary.csv", summary_csv(out.summary, out.sharp));
    if (out.runs.size() >= 2 && (out.sharp.caps || out.sharp.interval)) {
      const auto rep = sweep_report(out.runs, out.sharp);
      write_text(root / "sweep.csv", std::string("interface_errors_decreasing,energy_gaps_decreasing\n") +
                                         (rep.interface_errors_decreasing ? "1" : "0") + ',' +
                                         (rep.energy_gaps_decreasing ? "1" : "0") + '\n');
    }
    if (options.gnuplot) write_text(root / (preset.name + ".gp"), gnuplot_script(preset, out.runs, with_mbar));
  }
  return out;
}

}  // namespace eschlab

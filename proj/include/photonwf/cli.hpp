#pragma once

// Scenario runner and verification harness behind tools/photonwf.
// Exit codes: 0 pass, 1 check failure, 2 usage or config error.

#include "photonwf/beams.hpp"
#include "photonwf/operators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace photonwf::cli {

using json = nlohmann::json;

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string gfmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Flat-key reader; every key must be consumed or the config is rejected.
class ConfigReader {
public:
    explicit ConfigReader(json j) : j_(std::move(j)) {
        if (!j_.is_object()) throw UsageError("config must be a JSON object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    double number(const std::string& k, double def) {
        used_.insert(k);
        if (!j_.contains(k)) return def;
        if (!j_[k].is_number()) throw UsageError("config key '" + k + "' must be a number");
        return j_[k].get<double>();
    }
    int integer(const std::string& k, int def) {
        used_.insert(k);
        if (!j_.contains(k)) return def;
        if (!j_[k].is_number_integer()) throw UsageError("config key '" + k + "' must be an integer");
        return j_[k].get<int>();
    }
    std::string string(const std::string& k, const std::string& def) {
        used_.insert(k);
        if (!j_.contains(k)) return def;
        if (!j_[k].is_string()) throw UsageError("config key '" + k + "' must be a string");
        return j_[k].get<std::string>();
    }
    std::vector<double> numbers(const std::string& k, std::vector<double> def) {
        used_.insert(k);
        if (!j_.contains(k)) return def;
        if (!j_[k].is_array()) throw UsageError("config key '" + k + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& v : j_[k]) {
            if (!v.is_number()) throw UsageError("config key '" + k + "' must be an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    Vec3 vec3(const std::string& k, const Vec3& def) {
        const auto v = numbers(k, {def.x(), def.y(), def.z()});
        if (v.size() != 3) throw UsageError("config key '" + k + "' must have 3 components");
        return {v[0], v[1], v[2]};
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw UsageError("unknown config key '" + it.key() + "'");
    }

    const json& raw() const { return j_; }

private:
    json j_;
    std::set<std::string> used_;
};

// Any exception from module validation becomes a usage error.
template <class F>
auto validated(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(what + ": " + e.what());
    }
}

inline GaugeSpec read_gauge(ConfigReader& c) {
    if (c.has("gauge.m") && c.has("gauge.chi0")) throw UsageError("give either gauge.m or gauge.chi0, not both");
    if (c.has("gauge.m")) return GaugeSpec::azimuthal(c.integer("gauge.m", 0));
    return GaugeSpec::constant(c.number("gauge.chi0", 0.0));
}

inline AlphaWeight read_alpha(ConfigReader& c, double def) {
    const double a = c.number("alpha", def);
    return validated("alpha", [&] { return AlphaWeight::from_double(a); });
}

inline GridSpec read_grid(ConfigReader& c, const GridSpec& def) {
    GridSpec g;
    g.nk = c.integer("grid.nk", def.nk);
    g.ntheta = c.integer("grid.ntheta", def.ntheta);
    g.nphi = c.integer("grid.nphi", def.nphi);
    g.kmin = c.number("grid.kmin", def.kmin);
    g.kmax = c.number("grid.kmax", def.kmax);
    g.mode = validated("grid.mode", [&] { return normalization_from_string(c.string("grid.mode", to_string(def.mode))); });
    g.volume = c.number("grid.volume", def.volume);
    validated("grid", [&] { return KGrid(g).size(); });
    return g;
}

inline std::string grid_tag(const GridSpec& g) {
    std::ostringstream s;
    s << "(" << g.nk << "," << g.ntheta << "," << g.nphi << ") k=[" << g.kmin << "," << g.kmax << "] "
      << to_string(g.mode);
    return s.str();
}

// ---- outputs ---------------------------------------------------------------------------

struct Table {
    std::string name;
    std::vector<std::string> header_lines;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::string>> text_rows;  // optional leading text columns per row
};

struct Outcome {
    std::vector<Table> tables;
    std::map<std::string, json> summary;  // flat map of named scalars
    bool pass = true;
    std::string first_failure;
};

inline void write_outputs(const std::filesystem::path& dir, const std::string& stem, const Outcome& o,
                          const std::string& hash) {
    std::filesystem::create_directories(dir);
    for (const auto& t : o.tables) {
        std::ofstream f(dir / (stem + "_" + t.name + ".csv"), std::ios::binary);
        f << "# photonwf " << stem << " " << t.name << "\n";
        f << "# config_hash: " << hash << "\n";
        f << "# units: natural (hbar = c = eps0 = mu0 = 1)\n";
        for (const auto& h : t.header_lines) f << "# " << h << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) f << (i ? "," : "") << t.columns[i];
        f << "\n";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            bool firstcol = true;
            if (r < t.text_rows.size())
                for (const auto& s : t.text_rows[r]) {
                    f << (firstcol ? "" : ",") << s;
                    firstcol = false;
                }
            for (double v : t.rows[r]) {
                f << (firstcol ? "" : ",") << fmt(v);
                firstcol = false;
            }
            f << "\n";
        }
    }
    json s = json::object();
    for (const auto& [k, v] : o.summary) s[k] = v;
    s["config_hash"] = hash;
    s["units"] = "natural";
    std::ofstream f(dir / (stem + "_summary.json"), std::ios::binary);
    f << s.dump(2) << "\n";
}

// ---- verify ------------------------------------------------------------------------------

struct VerifyConfig {
    GridSpec base{8, 8, 16, 1.0, 2.0, Normalization::continuum, 1.0};
    double comm_kmin = 0.5, comm_kmax = 3.5, comm_center = 2.0, comm_width = 0.6;
    Vec3 r0{0.3, -0.2, 0.4};
    double ratio_min = 3.2, ratio_max = 4.8, exact = 1e-12;
    double step = 0.1;  // coarsest difference step of the dynamics checks
    int refinements = 1;
    PositionOptions position;
};

struct CheckResult {
    std::string name;
    std::vector<double> residuals;
    std::vector<double> ratios;
    bool exact = false;  // pass on residual <= tol instead of ratio
    bool pass = false;
};

inline void judge(CheckResult& c, const VerifyConfig& v) {
    c.ratios = convergence_ratios(c.residuals);
    if (c.exact) {
        c.pass = true;
        for (double r : c.residuals) c.pass = c.pass && r <= v.exact;
    } else {
        c.pass = !c.ratios.empty();
        for (double r : c.ratios) c.pass = c.pass && r >= v.ratio_min && r <= v.ratio_max;
    }
}

inline std::vector<CheckResult> verify_suite(const VerifyConfig& v) {
    std::vector<CheckResult> out;
    const int levels = v.refinements + 1;
    auto grid_at = [&](const GridSpec& base, int lev) {
        GridSpec g = base;
        g.nk <<= lev;
        g.ntheta <<= lev;
        g.nphi <<= lev;
        return std::make_shared<const KGrid>(g);
    };

    const AlphaWeight alphas[] = {AlphaWeight::minus_half(), AlphaWeight::zero(), AlphaWeight::plus_half()};
    const std::pair<GaugeSpec, std::string> gauges[] = {{GaugeSpec::constant(0.0), "chi0"},
                                                        {GaugeSpec::azimuthal(1), "m1"}};
    const std::pair<Vec3, std::string> centers[] = {{Vec3::Zero(), "origin"}, {v.r0, "offset"}};

    for (const auto& a : alphas)
        for (Helicity s : kHelicities)
            for (const auto& [g, gname] : gauges)
                for (const auto& [r0, rname] : centers) {
                    CheckResult c;
                    c.name = "eigen.alpha" + gfmt(a.value()) + ".sigma" + std::to_string(sign(s)) + "." + gname + "." +
                             rname;
                    for (int lev = 0; lev < levels; ++lev) {
                        const auto grid = grid_at(v.base, lev);
                        const auto psi = position_eigenvector(grid, r0, s, a, g);
                        c.residuals.push_back(eigen_residual(psi, r0, a, g, v.position));
                    }
                    judge(c, v);
                    out.push_back(c);
                }

    GridSpec cspec = v.base;
    cspec.kmin = v.comm_kmin;
    cspec.kmax = v.comm_kmax;
    const double kc = v.comm_center, kw = v.comm_width;
    auto window = [kc, kw](double k, double th, double) {
        return std::pow(std::sin(th), 4) * std::exp(-(k - kc) * (k - kc) / (2 * kw * kw));
    };
    for (const auto& [g, gname] : gauges) {
        CheckResult cxy{"commutator.xy." + gname}, jx{"jz_commutator.x." + gname}, jzz{"jz_commutator.z." + gname};
        for (int lev = 0; lev < levels; ++lev) {
            const auto grid = grid_at(cspec, lev);
            const auto f = position_eigenvector(grid, v.r0, Helicity::plus, AlphaWeight::zero(), g, window);
            cxy.residuals.push_back(commutator_residual(f, 0, 1, AlphaWeight::zero(), g, v.position));
            jx.residuals.push_back(jz_commutator_residual(f, 0, AlphaWeight::zero(), g, v.position));
            jzz.residuals.push_back(jz_commutator_residual(f, 2, AlphaWeight::zero(), g, v.position));
        }
        for (auto* c : {&cxy, &jx, &jzz}) {
            judge(*c, v);
            out.push_back(*c);
        }
    }

    {
        CheckResult b{"boost_identity"};
        b.exact = true;
        for (int lev = 0; lev < levels; ++lev) {
            const auto grid = grid_at(cspec, lev);
            const auto f = position_eigenvector(grid, v.r0, Helicity::plus, AlphaWeight::zero(), GaugeSpec{}, window);
            b.residuals.push_back(boost_identity_residual(f));
        }
        judge(b, v);
        out.push_back(b);
    }

    // dynamics on a packet; refinement halves the difference steps
    auto grid = std::make_shared<const KGrid>(GridSpec{8, 8, 16, 0.5, 3.5, Normalization::continuum, 1.0});
    const auto packet = gaussian_packet(ModeSet::from_grid(grid), Vec3(0, 0, 2), 0.5, Helicity::plus);
    const SampleBox box{Vec3(0.2, -0.1, 0.3), Vec3::Ones(), 3};
    const double t = 0.4;
    CheckResult wave{"wave_equation"}, fp{"field_potential"}, cont{"continuity"}, mdb{"maxwell.div_b"},
        mfar{"maxwell.faraday"}, mdd{"maxwell.div_d"}, mamp{"maxwell.ampere"};
    for (int lev = 0; lev < levels; ++lev) {
        const double h = v.step / (1 << lev);
        const Steps st{h, h};
        wave.residuals.push_back(wave_equation_residual(packet, AlphaWeight::plus_half(), GaugeSpec{}, box, t, st));
        fp.residuals.push_back(field_potential_residual(packet, GaugeSpec{}, box, t, h));
        cont.residuals.push_back(continuity_residual(packet, AlphaWeight::plus_half(), GaugeSpec{}, box, t, st));
        const auto m = maxwell_residual(packet, GaugeSpec{}, box, t, st);
        mdb.residuals.push_back(m.div_b);
        mfar.residuals.push_back(m.faraday);
        mdd.residuals.push_back(m.div_d);
        mamp.residuals.push_back(m.ampere);
    }
    for (auto* c : {&wave, &fp, &cont, &mdb, &mfar, &mdd, &mamp}) {
        judge(*c, v);
        out.push_back(*c);
    }
    return out;
}

inline VerifyConfig read_verify(ConfigReader& c, int refine, const std::string& ablate) {
    VerifyConfig v;
    const std::string sc = c.string("scenario", "verify");
    if (sc != "verify") throw UsageError("verify expects scenario 'verify' (or none), got '" + sc + "'");
    v.base = read_grid(c, v.base);
    v.comm_kmin = c.number("verify.comm_kmin", v.comm_kmin);
    v.comm_kmax = c.number("verify.comm_kmax", v.comm_kmax);
    v.comm_center = c.number("verify.comm_center", v.comm_center);
    v.comm_width = c.number("verify.comm_width", v.comm_width);
    v.r0 = c.vec3("verify.r0", v.r0);
    v.step = c.number("verify.step", v.step);
    v.ratio_min = c.number("tol.ratio_min", v.ratio_min);
    v.ratio_max = c.number("tol.ratio_max", v.ratio_max);
    v.exact = c.number("tol.exact", v.exact);
    if (!(v.comm_kmin > 0.0 && v.comm_kmax > v.comm_kmin)) throw UsageError("verify: need 0 < comm_kmin < comm_kmax");
    if (!(v.comm_width > 0.0)) throw UsageError("verify.comm_width must be > 0");
    if (!(v.step > 0.0 && v.step * 3.5 < 1.0)) throw UsageError("verify.step must lie in (0, 1/3.5)");
    if (!(v.ratio_min < v.ratio_max)) throw UsageError("tol.ratio_min must be < tol.ratio_max");
    if (v.base.nk < 4 || v.base.ntheta < 4 || v.base.nphi < 4) throw UsageError("verify grid needs >= 4 nodes per axis");
    v.refinements = refine;
    if (ablate == "cot" || ablate == "cot_theta")
        v.position.include_cot_term = false;
    else if (ablate == "spin" || ablate == "pryce")
        v.position.include_spin_term = false;
    else if (ablate == "alpha")
        v.position.include_alpha_term = false;
    else if (!ablate.empty())
        throw UsageError("unknown --ablate term '" + ablate + "' (expected cot, spin or alpha)");
    return v;
}

inline Outcome run_verify(const VerifyConfig& v) {
    Outcome o;
    const auto checks = verify_suite(v);
    Table t;
    t.name = "checks";
    t.header_lines = {"base grid " + grid_tag(v.base) + ", refinements " + std::to_string(v.refinements),
                      "ratio window [" + gfmt(v.ratio_min) + ", " + gfmt(v.ratio_max) + "], exact tol " + gfmt(v.exact),
                      std::string("cot term ") + (v.position.include_cot_term ? "on" : "off") + ", spin term " +
                          (v.position.include_spin_term ? "on" : "off") + ", alpha term " +
                          (v.position.include_alpha_term ? "on" : "off")};
    t.columns = {"check", "level", "residual", "ratio", "pass"};
    for (const auto& c : checks) {
        for (std::size_t l = 0; l < c.residuals.size(); ++l) {
            t.text_rows.push_back({c.name});
            t.rows.push_back({double(l), c.residuals[l], l == 0 ? NAN : c.ratios[l - 1], c.pass ? 1.0 : 0.0});
        }
        o.summary[c.name + ".residual"] = c.residuals.back();
        if (!c.exact) o.summary[c.name + ".ratio"] = c.ratios.back();
        o.summary[c.name + ".pass"] = c.pass;
        if (!c.pass && o.pass) {
            o.pass = false;
            o.first_failure = c.name;
        }
    }
    o.summary["checks"] = int(checks.size());
    o.summary["all_pass"] = o.pass;
    o.tables.push_back(std::move(t));
    return o;
}

// ---- scenarios --------------------------------------------------------------------------

using Scenario = std::function<Outcome()>;

inline Scenario scenario_negativity(ConfigReader& c) {
    const double k1 = c.number("modes.k1", 1.0), k2 = c.number("modes.k2", 4.0);
    const double V = c.number("modes.volume", 1.0);
    const AlphaWeight a = read_alpha(c, 0.5);
    const int samples = c.integer("sample.points", 200);
    const double tol = c.number("tol.exact", 1e-12);
    if (!(k1 > 0 && k2 > 0 && V > 0) || k1 == k2) throw UsageError("two-mode-negativity: need distinct k1, k2 > 0, V > 0");
    if (samples < 2) throw UsageError("sample.points must be >= 2");
    return [=] {
        Outcome o;
        const auto r = two_mode_negativity_scan(Vec3(0, 0, k1), Vec3(0, 0, k2), a, V);
        auto modes = ModeSet::collinear(V, Vec3::UnitZ(), {k1, k2});
        FockState st(modes);
        st.set_one(0, Helicity::plus, 1.0 / std::sqrt(2.0));
        st.set_one(1, Helicity::plus, 1.0 / std::sqrt(2.0));
        const DensityEvaluator ev(st, GaugeSpec{});
        Table t;
        t.name = "profile";
        t.header_lines = {"state c_k1 = c_k2 = 1/sqrt2, sigma = +1, modes along z, V = " + gfmt(V),
                          "alpha = " + gfmt(a.value())};
        t.columns = {"z", "n_alpha", "n_lp"};
        const double L = 2 * pi / std::abs(k2 - k1);
        for (int i = 0; i < samples; ++i) {
            const double z = L * i / samples;
            t.rows.push_back({z, ev.number(a, Vec3(0, 0, z), 0.0), ev.number(AlphaWeight::zero(), Vec3(0, 0, z), 0.0)});
        }
        o.tables.push_back(std::move(t));
        o.summary["min_n_half"] = r.min_numeric;
        o.summary["min_n_closed_form"] = r.min_closed_form;
        o.summary["min_n_lp"] = r.min_lp;
        o.summary["volume"] = V;
        o.pass = std::abs(r.min_numeric - r.min_closed_form) <= tol / V && r.min_lp >= -tol / V;
        if (!o.pass) o.first_failure = "two-mode-negativity.min";
        return o;
    };
}

inline Scenario scenario_beam(ConfigReader& c) {
    ParaxialLGSpec s;
    s.lz = c.integer("beam.lz", 1);
    s.sigma = validated("beam.sigma", [&] { return helicity_from_int(c.integer("beam.sigma", 1)); });
    s.kz = c.number("beam.kz", 1.0);
    s.omega = c.number("beam.omega", s.kz);
    s.w = c.number("beam.w", 50.0);
    s.edge = c.number("beam.edge", 1.0);
    s.profile = validated("beam.profile", [&] {
        return profile_from_string(c.string("beam.profile", s.lz == 0 ? "gaussian" : "lg_ring"));
    });
    const double tol = c.number("tol.per_photon", 0.01);
    validated("beam", [&] {
        s.validate();
        if (s.w * s.kz < 20.0) throw std::invalid_argument("non-paraxial spec (w*kz < 20)");
        return 0;
    });
    return [=] {
        Outcome o;
        const auto rep = jbeam_numeric_match(s);
        Table t;
        t.name = "profile";
        t.header_lines = {"lz = " + std::to_string(s.lz) + ", sigma = " + std::to_string(sign(s.sigma)) +
                          ", w = " + gfmt(s.w) + ", kz = " + gfmt(s.kz)};
        t.columns = {"r", "jz_numeric", "jz_analytic", "n_numeric", "n_analytic"};
        const double R = s.profile == Profile::flat_top ? s.w + 10 * s.edge : s.w * 4;
        const double h = 0.02 * std::min(s.profile == Profile::flat_top ? s.edge : s.w, 1.0 / s.kz);
        for (int i = 0; i <= 100; ++i) {
            const double r = R * i / 100;
            const auto d = beam_densities_numeric(s, Vec3(r, 0, 0), h);
            t.rows.push_back({r, d.jz, jbeam_analytic(s, r), d.n, beam_number_density_analytic(s, r)});
        }
        o.tables.push_back(std::move(t));
        o.summary["total_jz_per_photon"] = rep.jz_per_photon;
        o.summary["expected_jz_per_photon"] = rep.expected_per_photon;
        o.summary["max_profile_deviation"] = rep.max_profile_deviation;
        o.summary["total_jz"] = rep.total_jz;
        o.summary["total_n"] = rep.total_n;
        o.pass = std::abs(rep.jz_per_photon - rep.expected_per_photon) <= tol * std::max(1.0, std::abs(rep.expected_per_photon));
        if (!o.pass) o.first_failure = "beam-am.total_jz_per_photon";
        return o;
    };
}

inline Scenario scenario_localize(ConfigReader& c, int refine) {
    LocalizedScanSpec spec;
    spec.grid = read_grid(c, GridSpec{16, 16, 32, 0.2, 6.2, Normalization::continuum, 1.0});
    spec.k_center = c.number("localize.k_center", 3.0);
    spec.k_width = c.number("localize.k_width", 0.8);
    spec.rmax = c.number("localize.rmax", 8.0);
    spec.points = c.integer("localize.points", 81);
    const auto times = c.numbers("localize.times", {0.0, 0.5, 1.0, 1.5});
    const GaugeSpec g = read_gauge(c);
    const AlphaWeight a = read_alpha(c, 0.0);
    const Helicity s = validated("localize.sigma", [&] { return helicity_from_int(c.integer("localize.sigma", 1)); });
    if (!(spec.k_width > 0.0) || !(spec.rmax > 0.0) || spec.points < 2) throw UsageError("localize: bad window or sampling");
    if (times.empty()) throw UsageError("localize.times must not be empty");
    for (int i = 0; i < refine; ++i) {
        spec.grid.nk *= 2;
        spec.grid.ntheta *= 2;
        spec.grid.nphi *= 2;
    }
    return [=] {
        Outcome o;
        const auto sc = localized_state_scan(spec, g, s, a, times);
        Table t;
        t.name = "profiles";
        t.header_lines = {"grid " + grid_tag(spec.grid) + ", gauge " + g.tag() + ", alpha " + gfmt(a.value()),
                          "window exp(-(k-" + gfmt(spec.k_center) + ")^2/(2*" + gfmt(spec.k_width) + "^2))"};
        t.columns = {"t", "r", "n_x", "n_y", "n_z"};
        for (const auto& p : sc.profiles)
            for (std::size_t i = 0; i < p.r.size(); ++i) t.rows.push_back({p.t, p.r[i], p.n[0][i], p.n[1][i], p.n[2][i]});
        o.tables.push_back(std::move(t));
        bool monotone = true;
        for (std::size_t i = 0; i < sc.profiles.size(); ++i) {
            o.summary["peak_" + std::to_string(i)] = sc.profiles[i].peak;
            o.summary["center_" + std::to_string(i)] = sc.profiles[i].center;
            o.summary["t_" + std::to_string(i)] = sc.profiles[i].t;
            if (i > 0) monotone = monotone && sc.profiles[i].peak < sc.profiles[i - 1].peak;
        }
        const char* ax = "xyz";
        for (int k = 0; k < 3; ++k) {
            o.summary[std::string("initial_width_") + ax[k]] = sc.initial_width[k];
            o.summary[std::string("light_cone_excess_") + ax[k]] = sc.light_cone_excess[k];
        }
        o.summary["winding_sz_plus"] = sc.winding[0];
        o.summary["winding_sz_zero"] = sc.winding[1];
        o.summary["winding_sz_minus"] = sc.winding[2];
        o.summary["peak_monotone_decay"] = monotone;
        o.pass = monotone;
        if (!o.pass) o.first_failure = "localize.peak_monotone_decay";
        return o;
    };
}

inline Scenario scenario_two_photon(ConfigReader& c) {
    const double V = c.number("modes.volume", 8.0);
    const Vec3 k1 = c.vec3("modes.k1", Vec3(0, 0, 2 * pi / std::cbrt(8.0)));
    const Vec3 k2 = c.vec3("modes.k2", Vec3(2 * pi / std::cbrt(8.0), 0, 0));
    const AlphaWeight a = read_alpha(c, 0.5);
    const int nprime = c.integer("two_photon.rprime_points", 4);
    const int samples = c.integer("sample.points", 20);
    const double tol = c.number("tol.exact", 1e-12);
    if (!(V > 0) || nprime < 2 || samples < 1) throw UsageError("two-photon: bad volume or sampling");
    validated("modes", [&] { return ModeSet::box(V, {k1, k2})->size(); });
    return [=] {
        Outcome o;
        auto modes = ModeSet::box(V, {k1, k2});
        FockState st(modes);
        st.set_pair(0, Helicity::plus, 1, Helicity::minus, cplx(0.6, 0.2));
        st.set_pair(0, Helicity::plus, 0, Helicity::plus, cplx(-0.3, 0.5));
        st.set_pair(1, Helicity::minus, 1, Helicity::minus, cplx(0.4, 0.0));
        st = normalize(st);
        const DensityEvaluator ev(st, GaugeSpec{});
        Table t;
        t.name = "density";
        t.header_lines = {"pairs (k1+,k2-), (k1+,k1+), (k2-,k2-); box V = " + gfmt(V), "alpha = " + gfmt(a.value())};
        t.columns = {"x", "y", "z", "n_kspace", "n_rspace"};
        double sym = 0.0, path = 0.0, integral = 0.0;
        const double L = std::cbrt(V);
        for (int i = 0; i < samples; ++i) {
            const Vec3 r = Vec3(0.37, 0.11, 0.0) * L + Vec3(0.05, 0.03, 1.0) * (L * i / samples);
            const double nk = ev.number(a, r, 0.3);
            const double nr = two_photon_density_rspace(st, a, GaugeSpec{}, r, 0.3, nprime);
            path = std::max(path, std::abs(nk - nr));
            t.rows.push_back({r.x(), r.y(), r.z(), nk, nr});
            const Vec3 r2 = r + Vec3(0.2, -0.4, 0.1);
            const auto A = synthesize_two_photon(st, a, GaugeSpec{}, r, 0.3, r2, 0.7);
            const auto B = synthesize_two_photon(st, a, GaugeSpec{}, r2, 0.7, r, 0.3);
            sym = std::max(sym, (A.value - B.value.transpose()).cwiseAbs().maxCoeff());
        }
        const int ng = 6;
        for (int i = 0; i < ng; ++i)
            for (int j = 0; j < ng; ++j)
                for (int k = 0; k < ng; ++k)
                    integral += ev.number(a, Vec3(i, j, k) * (L / ng), 0.3) * V / (ng * ng * ng);
        o.tables.push_back(std::move(t));
        o.summary["max_exchange_asymmetry"] = sym;
        o.summary["max_density_path_difference"] = path;
        o.summary["integrated_number"] = integral;
        o.summary["p2"] = st.sector_probabilities().p2;
        o.pass = sym <= tol && path <= tol * 10 && std::abs(integral - 2.0) <= 1e-10;
        if (!o.pass) o.first_failure = "two-photon";
        return o;
    };
}

inline Scenario scenario_coherent(ConfigReader& c) {
    const double V = c.number("modes.volume", 1000.0);
    const double nbar = c.number("coherent.nbar", 5.0);
    const Vec3 k0 = c.vec3("packet.k0", Vec3(0, 0, 2.0));
    const double dk = c.number("packet.dk", 0.3);
    const int nmodes = c.integer("packet.modes_per_axis", 5);
    const int samples = c.integer("sample.points", 40);
    const double tol = c.number("tol.exact", 1e-12);
    if (!(V > 0) || !(nbar > 0) || !(dk > 0) || nmodes < 1 || samples < 1) throw UsageError("coherent: bad parameters");
    return [=] {
        Outcome o;
        const double L = std::cbrt(V), q = 2 * pi / L;
        std::vector<Vec3> kv;
        const Vec3 c0 = (k0 / q).array().round().matrix() * q;
        for (int i = -nmodes / 2; i <= nmodes / 2; ++i)
            for (int j = -nmodes / 2; j <= nmodes / 2; ++j)
                for (int k = -nmodes / 2; k <= nmodes / 2; ++k) kv.push_back(c0 + Vec3(i, j, k) * q);
        auto modes = ModeSet::box(V, kv);
        const auto one = gaussian_packet(modes, k0, dk, Helicity::plus);
        const auto coh = CoherentState::from_amplitudes(one, nbar);
        Table t;
        t.name = "densities";
        t.header_lines = {"one-photon packet and coherent state with the same profile, nbar = " + gfmt(nbar),
                          "n, j at alpha = 0; P, J from the one-photon state"};
        t.columns = {"x", "y", "z", "t", "n", "jx", "jy", "jz", "Px", "Py", "Pz", "Jx", "Jy", "Jz", "Pcoh_over_nbar_z"};
        const DensityEvaluator ev(one, GaugeSpec{});
        double diff = 0.0, scale = 0.0;
        for (int i = 0; i < samples; ++i) {
            const Vec3 r = Vec3(0.1, -0.2, -L / 2 + L * i / samples);
            const double tt = 0.0;
            const double n = ev.number(AlphaWeight::zero(), r, tt);
            const Vec3 j = ev.current(AlphaWeight::zero(), r, tt);
            const Vec3 P = momentum_density(one, GaugeSpec{}, r, tt);
            const Vec3 J = r.cross(P);
            const Vec3 Pc = momentum_density(coh, GaugeSpec{}, r, tt) / nbar;
            diff = std::max(diff, (P - Pc).norm());
            scale = std::max(scale, P.norm());
            t.rows.push_back({r.x(), r.y(), r.z(), tt, n, j.x(), j.y(), j.z(), P.x(), P.y(), P.z(), J.x(), J.y(), J.z(), Pc.z()});
        }
        o.tables.push_back(std::move(t));
        o.summary["max_shape_difference"] = diff / scale;
        o.summary["nbar"] = nbar;
        o.summary["modes"] = int(kv.size());
        o.pass = diff / scale <= tol;
        if (!o.pass) o.first_failure = "coherent-vs-one-photon.shape";
        return o;
    };
}

inline Scenario read_scenario(ConfigReader& c, int refine) {
    if (!c.has("scenario")) throw UsageError("run: config needs a 'scenario' key");
    const std::string name = c.string("scenario", "");
    if (name == "two-mode-negativity") return scenario_negativity(c);
    if (name == "beam-am") return scenario_beam(c);
    if (name == "localize") return scenario_localize(c, refine);
    if (name == "two-photon") return scenario_two_photon(c);
    if (name == "coherent-vs-one-photon") return scenario_coherent(c);
    throw UsageError("unknown scenario '" + name +
                     "' (expected two-mode-negativity, beam-am, localize, two-photon, coherent-vs-one-photon)");
}

// ---- entry point ------------------------------------------------------------------------

inline json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed config: ") + e.what());
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"photonwf: photon wave-function workbench"};
    app.require_subcommand(1);
    std::string config, outdir, ablate;
    int refine = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON config file")->required();
        sub->add_option("--out", outdir, "output directory (omit to print the summary only)");
        sub->add_option("--refine", refine, "number of grid doublings (default 1)")->check(CLI::Range(1, 4));
        sub->add_option("--ablate", ablate, "drop a position-operator term: cot, spin or alpha");
    };
    auto* verify = app.add_subcommand("verify", "run the residual and convergence suite");
    auto* runs = app.add_subcommand("run", "run a named scenario");
    add_common(verify);
    add_common(runs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    std::string stem;
    std::string hash;
    std::function<Outcome()> job;
    try {
        ConfigReader c(load_config(config));
        hash = hex64(fnv1a64(c.raw().dump()));
        if (verify->parsed()) {
            const VerifyConfig v = read_verify(c, refine, ablate);
            stem = "verify";
            job = [v] { return run_verify(v); };
        } else {
            if (!ablate.empty()) throw UsageError("--ablate only applies to verify");
            job = read_scenario(c, refine);
            stem = c.raw()["scenario"].get<std::string>();
        }
        c.finish();
    } catch (const UsageError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    }

    Outcome o;
    try {
        o = job();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFail;
    }
    if (!outdir.empty()) write_outputs(outdir, stem, o, hash);
    json s = json::object();
    for (const auto& [k, v] : o.summary) s[k] = v;
    s["config_hash"] = hash;
    out << s.dump(2) << "\n";
    if (!o.pass) {
        err << "check failed: " << o.first_failure << "\n";
        return kFail;
    }
    return kPass;
}

}  // namespace photonwf::cli

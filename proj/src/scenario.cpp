#include "mapenergy/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mapenergy {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
    }
}

std::vector<int> parse_resolution(const Json& j) {
    std::vector<int> res;
    if (j.is_number_integer()) {
        res.push_back(j.get<int>());
    } else if (j.is_array()) {
        for (const auto& e : j) res.push_back(e.get<int>());
    } else {
        throw ConfigError("resolution must be an integer or an array of integers");
    }
    for (int r : res)
        if (r < 2) throw ConfigError("resolution entries must be >= 2");
    return res;
}

FlowSpec parse_flow(const Json& j) {
    check_keys(j,
               {"mode", "grid", "fd_order", "pinned_rows", "dt", "dt_min_factor", "max_steps",
                "tau_tol", "energy_target_ratio", "sample_every", "max_rejects"},
               "flow");
    FlowSpec fs;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "harmonic")
        fs.mode = FlowMode::Harmonic;
    else if (mode == "biharmonic")
        fs.mode = FlowMode::Biharmonic;
    else
        throw ConfigError("flow mode must be 'harmonic' or 'biharmonic'");
    if (j.contains("grid")) {
        const auto g = parse_resolution(j.at("grid"));
        fs.grid0 = g[0];
        fs.grid1 = g.size() > 1 ? g[1] : g[0];
    }
    if (j.contains("fd_order")) fs.fd_order = j.at("fd_order").get<int>();
    if (j.contains("pinned_rows")) fs.pinned_rows = j.at("pinned_rows").get<int>();
    if (j.contains("dt")) fs.cfg.dt = j.at("dt").get<double>();
    if (j.contains("dt_min_factor")) fs.cfg.dt_min_factor = j.at("dt_min_factor").get<double>();
    if (j.contains("max_steps")) fs.cfg.max_steps = j.at("max_steps").get<int>();
    if (j.contains("tau_tol")) fs.cfg.tau_tol = j.at("tau_tol").get<double>();
    if (j.contains("energy_target_ratio"))
        fs.cfg.energy_target_ratio = j.at("energy_target_ratio").get<double>();
    if (j.contains("sample_every")) fs.cfg.sample_every = j.at("sample_every").get<int>();
    if (j.contains("max_rejects")) fs.cfg.max_rejects = j.at("max_rejects").get<int>();
    if (fs.cfg.tau_tol <= 0.0 || fs.cfg.dt < 0.0 || fs.cfg.max_steps <= 0 ||
        fs.cfg.sample_every <= 0)
        throw ConfigError("flow parameters out of range");
    return fs;
}

} // namespace

Scenario parse_scenario(const Json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    check_keys(j,
               {"version", "name", "mode", "domain", "target", "map", "resolution", "levels",
                "seed", "tolerances", "theta", "flow", "sweep"},
               "scenario");
    Scenario sc;
    if (!j.contains("version")) throw ConfigError("scenario missing 'version'");
    sc.version = j.at("version").get<int>();
    if (sc.version != 1) throw ConfigError("unsupported scenario version");
    sc.name = j.at("name").get<std::string>();
    sc.mode = j.at("mode").get<std::string>();
    if (sc.mode != "verify" && sc.mode != "flow" && sc.mode != "sweep" && sc.mode != "projective")
        throw ConfigError("mode must be verify | flow | sweep | projective");
    sc.domain_spec = j.at("domain").get<std::string>();
    sc.target_spec = j.at("target").get<std::string>();
    sc.map_spec = j.at("map").get<std::string>();
    if (j.contains("resolution")) sc.resolution = parse_resolution(j.at("resolution"));
    if (j.contains("levels")) sc.levels = j.at("levels").get<int>();
    if (sc.levels < 1) throw ConfigError("levels must be >= 1");
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        check_keys(t, {"rank", "slack", "npc", "projective"}, "tolerances");
        if (t.contains("rank")) sc.opts.rank_tolerance = t.at("rank").get<double>();
        if (t.contains("slack")) sc.opts.slack = t.at("slack").get<double>();
        if (t.contains("npc")) sc.opts.npc_tol = t.at("npc").get<double>();
        if (t.contains("projective")) sc.projective_tolerance = t.at("projective").get<double>();
        if (sc.opts.rank_tolerance <= 0.0 || sc.opts.slack <= 0.0 || sc.opts.npc_tol <= 0.0 ||
            sc.projective_tolerance <= 0.0)
            throw ConfigError("tolerances must be positive");
    }
    if (j.contains("theta")) sc.theta = j.at("theta").get<std::string>();
    if (j.contains("flow")) sc.flow = parse_flow(j.at("flow"));
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        check_keys(s, {"param", "values"}, "sweep");
        SweepSpec ss;
        ss.param = s.at("param").get<std::string>();
        if (s.contains("values"))
            for (const auto& v : s.at("values")) ss.values.push_back(v.get<double>());
        sc.sweep = ss;
    }
    if (sc.mode == "flow" && !sc.flow) throw ConfigError("flow mode needs a 'flow' block");
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file: " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
    }
    try {
        return parse_scenario(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario field error: ") + e.what());
    }
}

namespace {

std::vector<int> default_resolution(const ChartManifold& M) {
    std::vector<int> res;
    for (const Interval& iv : M.chart_box) res.push_back(iv.periodic ? 32 : 48);
    return res;
}

std::filesystem::path resolve_out_dir(const Scenario& sc, const RunOverrides& ov) {
    std::string base = ov.out_dir;
    if (base.empty())
        if (const char* env = std::getenv("MAPENERGY_OUT")) base = env;
    if (base.empty()) base = "out";
    return std::filesystem::path(base) / sc.name;
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::HOLDS:
        case Verdict::EQUALITY:
        case Verdict::NOT_PROJECTIVE:
            return kExitOk;
        case Verdict::PRECONDITION_FAILED:
            return kExitPrecondition;
        case Verdict::VIOLATION:
            return kExitViolation;
    }
    return kExitConfig;
}

OneFormField make_theta_field(const Scenario& sc, const MapBetweenManifolds& f) {
    if (sc.theta == "zero") {
        const int n = f.domain.dim;
        return [n](const Vec&) { return Vec::Zero(n); };
    }
    if (sc.theta == "recover") {
        return [f, rt = sc.opts.rank_tolerance](const Vec& p) {
            const MapJet j = f.jet(p);
            const Tensor3 sff = second_fundamental_form_at(f, p);
            const Mat g = f.domain.metric(p);
            const Mat gbar = f.target.metric(wrap_point(f.target, j.value));
            return fit_theta_pointwise(j.d1, sff, g, gbar);
        };
    }
    const MapSpec ms = parse_map_spec(sc.theta);
    if (ms.name == "constant") {
        Vec th = Vec::Zero(f.domain.dim);
        for (int i = 0; i < f.domain.dim; ++i) {
            const auto it = ms.params.find("t" + std::to_string(i + 1));
            if (it != ms.params.end()) th(i) = it->second;
        }
        return [th](const Vec&) { return th; };
    }
    throw ConfigError("unknown theta spec: " + sc.theta);
}

int run_verify(const Scenario& sc, const MapBetweenManifolds& f, const std::vector<int>& res,
               const std::filesystem::path& out, bool quiet) {
    const EnergyReport rep = energy_report(f, res, sc.levels, sc.opts);
    const Verdict v = verify_main_inequality(rep);
    Json j = to_json(rep);
    j["verdict"] = to_string(v);
    j["scenario"] = sc.name;
    write_text_file(out / "report.json", j.dump(2) + "\n");
    write_text_file(out / "report.csv", to_csv(rep));
    if (!quiet)
        std::cout << sc.name << ": " << to_string(v) << "  E1=" << rep.E1 << " E2=" << rep.E2
              << " margin=" << rep.margin << " residual=" << rep.bochner_residual << "\n";
    return exit_for(v);
}

int run_projective(const Scenario& sc, const MapBetweenManifolds& f, const std::vector<int>& res,
                   const std::filesystem::path& out, bool quiet) {
    const OneFormField theta = make_theta_field(sc, f);
    const ProjectiveReport rep =
        projective_check(f, res, sc.levels, theta, sc.opts, sc.projective_tolerance);
    Json j = to_json(rep);
    j["scenario"] = sc.name;
    write_text_file(out / "projective.json", j.dump(2) + "\n");
    write_text_file(out / "report.csv", to_csv(rep.base));
    if (!quiet)
        std::cout << sc.name << ": " << to_string(rep.verdict)
              << "  res_decomposition=" << rep.res_decomposition
              << " res_identity=" << rep.res_identity << " margin2=" << rep.margin2 << "\n";
    return exit_for(rep.verdict);
}

int run_flow_scenario(const Scenario& sc, const MapBetweenManifolds& f,
                      const std::filesystem::path& out, bool quiet) {
    const FlowSpec& fs = *sc.flow;
    DiscreteMap dm = sample_discrete_map(f, fs.grid0, fs.grid1, fs.fd_order, fs.pinned_rows);
    FlowTrace trace = run_flow(dm, fs.mode, fs.cfg);

    const RicciMinResult rm = ricci_min(dm.domain, {16, 32});
    bool margin_ok = true;
    for (const FlowSample& s : trace.samples) {
        const double band = rm.certificate * s.E1 + 1e-3 * (1.0 + s.E1);
        if (s.margin < -band) margin_ok = false;
    }

    Json j = to_json(trace);
    j["scenario"] = sc.name;
    j["margin_ok"] = margin_ok;
    write_text_file(out / "trace.json", j.dump(2) + "\n");
    write_text_file(out / "trace.csv", to_csv(trace));

    SvgSeries e1{"E1", {}, {}}, e2{"E2", {}, {}};
    for (const FlowSample& s : trace.samples) {
        e1.x.push_back(s.t);
        e1.y.push_back(s.E1);
        e2.x.push_back(s.t);
        e2.y.push_back(s.E2);
    }
    write_text_file(out / "trace.svg", render_svg({e1, e2}, sc.name + " energies", true));

    const FlowSample& last = trace.samples.back();
    if (!quiet)
        std::cout << sc.name << ": flow " << trace.termination << " steps=" << trace.steps
              << " E1=" << last.E1 << " E2=" << last.E2 << " sup_tau1=" << last.sup_tau1
              << (margin_ok ? "" : "  MARGIN VIOLATION") << "\n";
    if (!margin_ok) return kExitViolation;
    if (trace.termination == "blowup") return kExitConfig;
    return kExitOk;
}

int run_sweep(const Scenario& sc, const RunOverrides& ov, const std::vector<int>& res,
              const std::filesystem::path& out) {
    std::string param = ov.sweep_param;
    std::vector<double> values = ov.sweep_values;
    if (param.empty() && sc.sweep) {
        param = sc.sweep->param;
        if (values.empty()) values = sc.sweep->values;
    }
    if (param.empty()) throw ConfigError("sweep needs a parameter name");
    if (values.empty()) throw ConfigError("sweep needs a nonempty value list");

    MapSpec ms = parse_map_spec(sc.map_spec);
    const ChartManifold domain = make_manifold(sc.domain_spec);
    const ChartManifold target = make_manifold(sc.target_spec);

    std::ostringstream csv;
    csv << param << ",E1,E2,margin,residual,verdict\n";
    SvgSeries margin_series{"margin", {}, {}};
    int worst = kExitOk;
    char buf[40];
    for (double v : values) {
        ms.params[param] = v;
        const MapBetweenManifolds f = make_catalog_map(format_map_spec(ms), domain, target);
        const EnergyReport rep = energy_report(f, res, std::max(2, sc.levels - 1), sc.opts);
        const Verdict verdict = verify_main_inequality(rep);
        worst = std::max(worst, exit_for(verdict));
        auto put = [&](double x) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            csv << ',' << buf;
        };
        std::snprintf(buf, sizeof buf, "%.17g", v);
        csv << buf;
        put(rep.E1);
        put(rep.E2);
        put(rep.margin);
        put(rep.bochner_residual);
        csv << ',' << to_string(verdict) << '\n';
        margin_series.x.push_back(v);
        margin_series.y.push_back(rep.margin);
    }
    write_text_file(out / "sweep.csv", csv.str());
    write_text_file(out / "sweep.svg",
                    render_svg({margin_series}, sc.name + " margin vs " + param, false));
    if (!ov.quiet)
        std::cout << sc.name << ": sweep over " << param << " (" << values.size() << " values), "
              << (worst == kExitOk ? "all HOLDS/EQUALITY" : "verdict failures") << "\n";
    return worst;
}

} // namespace

int run_scenario(const Scenario& sc, const RunOverrides& ov) {
    Scenario s = sc;
    if (ov.levels > 0) s.levels = ov.levels;
    if (ov.seed) s.seed = *ov.seed;
    s.opts.seed = s.seed;
    const std::filesystem::path out = resolve_out_dir(s, ov);

    const ChartManifold domain = make_manifold(s.domain_spec);
    const ChartManifold target = make_manifold(s.target_spec);
    std::vector<int> res = s.resolution;
    if (ov.resolution > 0) res.assign(static_cast<size_t>(domain.dim), ov.resolution);
    if (res.empty()) res = default_resolution(domain);
    if (static_cast<int>(res.size()) == 1 && domain.dim > 1)
        res.assign(static_cast<size_t>(domain.dim), res[0]);
    if (static_cast<int>(res.size()) != domain.dim)
        throw ConfigError("resolution rank does not match the domain dimension");

    const MapBetweenManifolds f = make_catalog_map(s.map_spec, domain, target);

    if (s.mode == "verify") return run_verify(s, f, res, out, ov.quiet);
    if (s.mode == "projective") return run_projective(s, f, res, out, ov.quiet);
    if (s.mode == "flow") return run_flow_scenario(s, f, out, ov.quiet);
    return run_sweep(s, ov, res, out);
}

int run_scenario_file(const std::filesystem::path& path, const RunOverrides& ov) {
    try {
        const Scenario sc = load_scenario(path);
        return run_scenario(sc, ov);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownManifold& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownMap& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GeomError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace mapenergy

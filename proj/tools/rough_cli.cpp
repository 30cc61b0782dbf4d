// Experiment driver: sampling, lifting, hypothesis audits, solving and
// Monte-Carlo validation, all emitting CSV into an output directory.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rough/config.hpp"
#include "rough/csv.hpp"
#include "rough/dde.hpp"
#include "rough/fbm.hpp"
#include "rough/increments.hpp"
#include "rough/lift.hpp"
#include "rough/sde.hpp"

namespace {

using namespace rough;

struct Common {
    std::string config_file;
    std::string out_dir = ".";
    long long seed = 42;
    bool seed_set = false;
    int workers = 1;
    bool inject_fault = false;
    Config cfg;

    void finish() {
        if (!config_file.empty()) cfg = Config::load(config_file);
        if (!seed_set && cfg.has("seed")) seed = cfg.integer("seed", seed);
        if (const char* env = std::getenv("ROUGH_WORKERS")) {
            workers = std::atoi(env);
            if (workers < 1) throw ConfigError("ROUGH_WORKERS must be a positive integer");
        } else {
            workers = static_cast<int>(cfg.integer("workers", workers));
        }
        std::filesystem::create_directories(out_dir);
    }

    double H() const {
        double h = cfg.num("H", 0.35);
        if (!(h > 0.25 && h < 1.0)) throw ConfigError("H must lie in (1/4, 1)");
        return h;
    }
    int d() const {
        int v = static_cast<int>(cfg.integer("d", 1));
        if (v < 1) throw ConfigError("d must be >= 1");
        return v;
    }
    int n() const {
        int v = static_cast<int>(cfg.integer("n", 256));
        if (v < 2 || (v & (v - 1)) != 0) throw ConfigError("n must be a power of two >= 2");
        return v;
    }
    double T() const {
        double v = cfg.num("T", 1.0);
        if (v <= 0) throw ConfigError("T must be positive");
        return v;
    }
    std::vector<double> delays() const { return cfg.list("delays"); }
    std::string out(const std::string& name) const { return out_dir + "/" + name; }
};

Path1 sample_driver(const Common& c, const std::vector<double>& delays) {
    double h = c.T() / c.n();
    double rq = delays.empty() ? 0.0 : delays.back();
    Grid probe(-1.0, h, 2);  // placeholder to reuse cells_of validation
    int back = 0;
    for (double r : delays) back = std::max(back, probe.cells_of(r));
    back *= 2;
    Grid grid(-back * h, h, c.n() + back);
    std::string kind = c.cfg.str("driver", "fbm");
    if (kind == "fbm") return sample_fbm(FbmSpec(c.H(), c.d(), grid, static_cast<uint64_t>(c.seed)));
    Path1 x(grid, c.d());
    for (int i = 0; i <= grid.n; ++i)
        for (int k = 0; k < c.d(); ++k) {
            double t = grid.t(i);
            if (kind == "line")
                x.at(i, k) = t;
            else if (kind == "sin")
                x.at(i, k) = std::sin((k + 1) * t);
            else
                throw ConfigError("unknown driver: " + kind);
        }
    (void)rq;
    return x;
}

std::vector<double> initial_state(const Common& c, int l) {
    std::vector<double> a = c.cfg.list("a");
    if (a.empty()) a.assign(l, 1.0);
    if (static_cast<int>(a.size()) != l)
        throw ConfigError("initial condition a must have l entries");
    return a;
}

int cmd_sample(const Common& c) {
    Path1 x = sample_driver(c, {});
    write_path_csv(x, c.out("path.csv"));
    return 0;
}

int cmd_lift(const Common& c) {
    std::vector<double> delays = c.delays();
    Path1 x = sample_driver(c, delays);
    DelayedLift L = DelayedLift::build(x, delays);
    write_path_csv(x, c.out("path.csv"));
    export_lift_csv(L, c.out_dir);
    return 0;
}

int cmd_validate(const Common& c) {
    std::vector<double> delays = c.delays();
    Path1 x = sample_driver(c, delays);
    DelayedLift L = DelayedLift::build(x, delays);
    if (c.inject_fault) L.perturb_area_cell(0, L.grid().n / 2, 1e-3);
    AuditReport rep = verify_hypotheses(L, 10'000, static_cast<uint64_t>(c.seed));
    std::ofstream os(c.out("audit.csv"));
    write_audit_csv(rep, os);
    std::cout << "max_relative_residual = " << rep.max_relative() << "\n";
    return 0;
}

VectorField field_from_config(const Common& c, int l, int d) {
    return make_field(c.cfg.str("vector_field", "linear"), l, d, c.cfg.list("params"));
}

int cmd_solve_sde(const Common& c) {
    int l = static_cast<int>(c.cfg.integer("l", 1));
    Path1 x = sample_driver(c, {});
    RoughLift3 L = RoughLift3::lift_linear(x);
    VectorField sigma = field_from_config(c, l, c.d());
    std::vector<double> a = initial_state(c, l);
    double kappa = c.cfg.num("kappa", 0.95 * c.cfg.num("gamma", c.H()));
    SolveReport rep;
    if (c.cfg.str("method", "march") == "picard")
        rep = picard_solve(a, sigma, L, c.cfg.num("tol", 1e-10),
                           static_cast<int>(c.cfg.integer("max_iter", 100)), kappa);
    else
        rep = solve_sde(a, sigma, L, kappa);
    write_path_csv(rep.y, c.out("solution.csv"));
    std::ofstream os(c.out("report.txt"));
    write_report_kv(rep, os);
    return 0;
}

int cmd_solve_dde(const Common& c) {
    std::vector<double> delays = c.delays();
    if (delays.empty()) throw ConfigError("solve-dde requires a non-empty delays list");
    DelaySpec spec(delays);
    int n_state = static_cast<int>(c.cfg.integer("l", 1));
    Path1 x = sample_driver(c, delays);
    DelayedLift L = DelayedLift::build(x, delays);
    DelayVectorField sigma = make_delay_field(c.cfg.str("vector_field", "delay-linear"), n_state,
                                              c.d(), spec.q(), c.cfg.list("params"));
    int kq = L.delay_cells().back();
    Grid xg(-delays.back(), L.grid().h, kq);
    InitialSegment xi{Path1(xg, n_state)};
    std::vector<double> a = initial_state(c, n_state);
    for (int i = 0; i <= xg.n; ++i)
        for (int p = 0; p < n_state; ++p) xi.xi.at(i, p) = a[p];
    double kappa = c.cfg.num("kappa", 0.95 * c.cfg.num("gamma", c.H()));
    SolveReport rep = solve_dde(xi, sigma, L, kappa);
    write_path_csv(rep.y, c.out("solution.csv"));
    std::ofstream os(c.out("report.txt"));
    write_report_kv(rep, os);
    return 0;
}

int cmd_convergence(const Common& c) {
    int l = static_cast<int>(c.cfg.integer("l", 1));
    int rungs = static_cast<int>(c.cfg.integer("rungs", 4));
    int n0 = c.n();
    VectorField sigma = field_from_config(c, l, c.d());
    std::vector<double> a = initial_state(c, l);
    std::string kind = c.cfg.str("driver", "line");

    // Reference at 16x the finest rung.
    auto solve_at = [&](int n) {
        Common cc = c;
        cc.cfg.kv["n"] = std::to_string(n);
        cc.cfg.kv["driver"] = kind;
        Path1 x = sample_driver(cc, {});
        RoughLift3 L = RoughLift3::lift_linear(x);
        return solve_sde(a, sigma, L);
    };
    if (kind == "fbm")
        throw ConfigError("convergence: fbm self-reference requires shared samples; use the "
                          "library API (drivers: line, sin)");
    int nref = n0 * (1 << (rungs - 1)) * 16;
    SolveReport ref = solve_at(nref);

    std::ofstream os(c.out("convergence.csv"));
    os << "n,h,error\n";
    std::vector<double> hs, errs;
    for (int r = 0; r < rungs; ++r) {
        int n = n0 * (1 << r);
        SolveReport rep = solve_at(n);
        double err = 0.0;
        for (int p = 0; p < l; ++p)
            err = std::max(err, std::abs(rep.y.at(rep.y.grid.n, p) - ref.y.at(ref.y.grid.n, p)));
        double h = c.T() / n;
        os << n << "," << h << "," << err << "\n";
        if (err > 0) {
            hs.push_back(std::log(h));
            errs.push_back(std::log(err));
        }
    }
    if (hs.size() < 2) {
        std::cout << "order = exact\n";
        return 0;
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < hs.size(); ++i) {
        mx += hs[i];
        my += errs[i];
    }
    mx /= hs.size();
    my /= hs.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < hs.size(); ++i) {
        num += (hs[i] - mx) * (errs[i] - my);
        den += (hs[i] - mx) * (hs[i] - mx);
    }
    std::cout << "order = " << num / den << "\n";
    return 0;
}

int cmd_mc_area(const Common& c) {
    int N = static_cast<int>(c.cfg.integer("N", 2000));
    if (N < 1) throw ConfigError("N must be >= 1");
    std::ofstream os(c.out("mc.csv"));
    if (c.cfg.str("mode", "mean") == "scaling") {
        std::vector<double> taus = c.cfg.list("taus");
        if (taus.empty()) taus = {0.125, 0.25, 0.5, 1.0};
        ScalingReport rep = mc_scaling_exponent(
            static_cast<int>(c.cfg.integer("level", 2)), c.H(), c.cfg.num("v1", 0.0),
            c.cfg.num("v2", 0.0), taus, N, static_cast<int>(c.cfg.integer("n_per_unit", 256)),
            static_cast<uint64_t>(c.seed), c.workers);
        write_scaling_csv(rep, N, os);
        std::cout << "slope = " << rep.slope << "\n";
    } else {
        McAreaReport rep =
            mc_validate_area(c.H(), c.cfg.num("v1", 0.0), N, static_cast<int>(c.cfg.integer("n", 1024)),
                             c.cfg.num("tau", 1.0), static_cast<uint64_t>(c.seed), c.workers);
        write_mc_header(os);
        write_mc_row(rep, os);
        std::cout << "z = " << rep.z << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rough-path sampling, lifting and solving toolkit"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_file, "configuration file (key = value lines)");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "random seed")
            ->each([&](const std::string&) { common.seed_set = true; });
        sub->add_option("--workers", common.workers, "worker threads for Monte-Carlo commands");
        return sub;
    };
    auto* sample = add_common(app.add_subcommand("sample", "sample a fractional Brownian path"));
    auto* lift = add_common(app.add_subcommand("lift", "sample and export the delayed lift"));
    auto* validate =
        add_common(app.add_subcommand("validate", "audit the lift's algebraic identities"));
    validate->add_flag("--inject-fault", common.inject_fault,
                       "perturb one area cell before auditing");
    auto* ssde = add_common(app.add_subcommand("solve-sde", "solve dy = sigma(y) dx"));
    auto* sdde =
        add_common(app.add_subcommand("solve-dde", "solve dy = sigma(y, delayed y) dx"));
    auto* conv =
        add_common(app.add_subcommand("convergence", "refinement ladder and fitted order"));
    auto* mc = add_common(app.add_subcommand("mc-area", "Monte-Carlo area validation"));

    try {
        app.parse(argc, argv);
        common.finish();
        if (sample->parsed()) return cmd_sample(common);
        if (lift->parsed()) return cmd_lift(common);
        if (validate->parsed()) return cmd_validate(common);
        if (ssde->parsed()) return cmd_solve_sde(common);
        if (sdde->parsed()) return cmd_solve_dde(common);
        if (conv->parsed()) return cmd_convergence(common);
        if (mc->parsed()) return cmd_mc_area(common);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const NonFinite& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 3;
    } catch (const NoConvergence& e) {
        std::cerr << "error: numeric: " << e.what() << " (iterations=" << e.iterations
                  << ", last_distance=" << e.last_distance << ")\n";
        return 3;
    } catch (const EmbeddingFailed& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 3;
    }
}

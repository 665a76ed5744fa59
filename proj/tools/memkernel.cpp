// memkernel command-line front end: solve / msd / kernel / verify, figure
// presets, CSV/JSON/SVG output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memkernel/memkernel.hpp"

namespace mk = memkernel;

namespace {

mk::InitialCondition parse_ic(const std::string& spec) {
    if (spec == "delta") return mk::InitialCondition::delta();
    if (spec.rfind("box:", 0) == 0) return mk::InitialCondition::box(std::stod(spec.substr(4)));
    if (spec.rfind("gaussian:", 0) == 0)
        return mk::InitialCondition::gaussian(std::stod(spec.substr(9)));
    throw mk::config_error("unknown initial condition '" + spec +
                           "' (expected delta | box:<eps> | gaussian:<sigma>)");
}

mk::VelocityProfile parse_v0(const std::string& spec) {
    if (spec == "zero") return mk::VelocityProfile::zero();
    if (spec == "neg_dp0") return mk::VelocityProfile::neg_derivative_of_p0();
    if (spec.rfind("gauss_deriv:", 0) == 0)
        return mk::VelocityProfile::gaussian_derivative(std::stod(spec.substr(12)));
    if (spec.rfind("box_spikes:", 0) == 0)
        return mk::VelocityProfile::box_spikes(std::stod(spec.substr(11)));
    throw mk::config_error("unknown velocity profile '" + spec +
                           "' (expected zero | neg_dp0 | gauss_deriv:<sigma> | box_spikes:<eps>)");
}

struct GridSpec {
    double xmin = -10.0, xmax = 10.0;
    int nx = 1001;
};

void write_field(const mk::SolutionField& field, const std::string& format,
                 const std::string& path) {
    if (format == "csv") {
        mk::emit_csv(field, path);
    } else if (format == "json") {
        mk::emit_json(mk::to_json(field), path);
    } else if (format == "svg") {
        mk::emit_svg({{field.meta.kernel_id, &field.grid, &field.values}}, path);
    } else {
        throw mk::config_error("unknown format '" + format + "'");
    }
}

int run_preset(const std::string& name, const std::string& out_dir, const std::string& format,
               const GridSpec& gs) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto grid = mk::make_grid(gs.xmin, gs.xmax, gs.nx);
    auto path = [&](const std::string& stem) { return (fs::path(out_dir) / stem).string(); };
    std::vector<mk::SolutionField> fields;
    std::vector<std::string> labels;

    if (name == "fig1") {
        mk::TransportParams tp;
        tp.B = 1.0;
        tp.mu = 1.0;
        auto kernel = mk::make_power_law_kernel(0.5);
        fields.push_back(mk::solve_gfpe(kernel, mk::InitialCondition::delta(), tp, grid, 1.0));
        fields.push_back(mk::solve_gfpe(kernel, mk::InitialCondition::box(1.0), tp, grid, 1.0));
        fields.push_back(mk::solve_gfpe(kernel, mk::InitialCondition::gaussian(1.0), tp, grid, 1.0));
        labels = {"I delta", "II box", "III gaussian"};
        mk::emit_csv(fields[0], path("fig1_I.csv"));
        mk::emit_csv(fields[1], path("fig1_II.csv"));
        mk::emit_csv(fields[2], path("fig1_III.csv"));
    } else if (name == "fig2") {
        mk::TransportParams tp;
        tp.a = 1.0;
        auto kernel = mk::make_gdwe_power_kernel(0.75);
        auto v0 = mk::VelocityProfile::zero();
        fields.push_back(mk::solve_gdwe(kernel, mk::InitialCondition::delta(), v0, tp, grid, 1.0));
        fields.push_back(mk::solve_gdwe(kernel, mk::InitialCondition::box(0.5), v0, tp, grid, 1.0));
        fields.push_back(
            mk::solve_gdwe(kernel, mk::InitialCondition::gaussian(1.0), v0, tp, grid, 1.0));
        labels = {"I delta", "II box", "III gaussian"};
        mk::emit_csv(fields[0], path("fig2_I.csv"));
        mk::emit_csv(fields[1], path("fig2_II.csv"));
        mk::emit_csv(fields[2], path("fig2_III.csv"));
    } else if (name == "fig2a") {
        mk::TransportParams tp;
        tp.a = 1.0;
        auto kernel = mk::make_gdwe_power_kernel(0.75);
        auto p0 = mk::InitialCondition::gaussian(1.0);
        auto v0 = mk::VelocityProfile::zero();
        for (double t : {1.0, 2.0, 3.0}) {
            fields.push_back(mk::solve_gdwe(kernel, p0, v0, tp, grid, t));
            labels.push_back("t=" + std::to_string(int(t)));
            mk::emit_csv(fields.back(), path("fig2a_t" + std::to_string(int(t)) + ".csv"));
        }
    } else if (name == "fig3") {
        mk::TransportParams tp;
        tp.a = 1.0;
        auto kernel = mk::make_gdwe_power_kernel(0.75);
        auto p0 = mk::InitialCondition::gaussian(1.0);
        const char* roman[] = {"I", "II", "III"};
        int i = 0;
        for (double sigma : {0.5, 1.0, 1.5}) {
            fields.push_back(mk::solve_gdwe(
                kernel, p0, mk::VelocityProfile::gaussian_derivative(sigma), tp, grid, 1.0));
            labels.push_back("sigma=" + std::to_string(sigma).substr(0, 3));
            mk::emit_csv(fields.back(), path(std::string("fig3_") + roman[i++] + ".csv"));
        }
    } else {
        throw mk::config_error("unknown preset '" + name + "' (fig1|fig2|fig2a|fig3)");
    }

    if (format == "svg") {
        std::vector<mk::SvgSeries> series;
        for (std::size_t i = 0; i < fields.size(); ++i)
            series.push_back({labels[i], &fields[i].grid, &fields[i].values});
        mk::emit_svg(series, path(name + ".svg"), name);
    }
    std::cout << name << ": wrote " << fields.size() << " curves to " << out_dir << "\n";
    return 0;
}

// --config FILE: JSON object of long-option values, applied before the real
// command line so explicit flags take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") config_path = args[i + 1];
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw mk::io_error("cannot read config file '" + config_path + "'");
    nlohmann::json j;
    in >> j;
    std::vector<std::string> expanded;
    // keep subcommand words first
    std::size_t i = 0;
    while (i < args.size() && !args[i].empty() && args[i][0] != '-') expanded.push_back(args[i++]);
    for (auto it = j.begin(); it != j.end(); ++it) {
        expanded.push_back("--" + it.key());
        if (it->is_string())
            expanded.push_back(it->get<std::string>());
        else
            expanded.push_back(it->dump());
    }
    for (; i < args.size(); ++i) expanded.push_back(args[i]);
    return expanded;
}

std::vector<double> parse_grid_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw mk::config_error("empty numeric list");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"memkernel: evolution-operator solver for memory-kernel diffusion and "
                 "diffusion-wave equations"};
    app.require_subcommand(1);

    std::string kernel_id = "power_law:0.5", ic_spec = "delta", v0_spec = "zero";
    std::string out_path, out_dir = ".", format = "csv", preset, config_file, method = "closed";
    double B = 1.0, mu = 0.0, a = 1.0, t = 1.0;
    GridSpec gs;

    auto add_common = [&](CLI::App* cmd, bool wants_v0) {
        cmd->add_option("--kernel", kernel_id, "kernel id, e.g. power_law:0.5")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--ic", ic_spec, "delta | box:<eps> | gaussian:<sigma>")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        if (wants_v0)
            cmd->add_option("--v0", v0_spec, "zero | neg_dp0 | gauss_deriv:<s> | box_spikes:<e>")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--B", B)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--mu", mu)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--a", a)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--t", t)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--config", config_file, "JSON config file (flags override)");
    };

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "solve gfpe|gdwe on a grid, or run a figure preset");
    std::string equation;
    solve->add_option("equation", equation, "gfpe | gdwe");
    add_common(solve, true);
    solve->add_option("--xmin", gs.xmin)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    solve->add_option("--xmax", gs.xmax)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    solve->add_option("--nx", gs.nx)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    solve->add_option("--format", format, "csv | json | svg");
    solve->add_option("--out", out_path, "output file");
    solve->add_option("--out-dir", out_dir, "preset output directory");
    solve->add_option("--preset", preset, "fig1 | fig2 | fig2a | fig3");

    // ---- msd ----
    auto* msd = app.add_subcommand("msd", "mean square displacement");
    std::string msd_equation;
    msd->add_option("equation", msd_equation, "gfpe | gdwe")->required();
    add_common(msd, true);
    msd->add_option("--method", method, "closed | ilt | tauberian");

    // ---- kernel ----
    auto* kernel_cmd = app.add_subcommand("kernel", "kernel registry utilities");
    auto* kernel_eval = kernel_cmd->add_subcommand("eval", "evaluate the Laplace image at s");
    double s_re = 1.0, s_im = 0.0;
    kernel_eval->add_option("--kernel", kernel_id)->required();
    kernel_eval->add_option("--s", s_re, "Re s")->required();
    kernel_eval->add_option("--s-imag", s_im, "Im s");
    auto* kernel_list = kernel_cmd->add_subcommand("list", "list registry kernel ids");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a structural identity check");
    std::string identity, kernel2_id = "power_law:0.5", variant = "f_sM", s_grid_csv = "0.5,1,2";
    std::string image_name;
    double alpha = 0.5, t0 = 0.0, t2 = 1.0, kappa = 1.0, y = 1.0, x = 0.5, xi = 1.0, tol = 0.0;
    int n_max = 4;
    verify->add_option("identity", identity,
                       "normalization | efros | ml-composition | wave-composition | cmf | "
                       "pde-residual")
        ->required();
    add_common(verify, true);
    verify->add_option("--kernel2", kernel2_id);
    verify->add_option("--variant", variant, "f_sM | F_half | F_mixed");
    verify->add_option("--alpha", alpha);
    verify->add_option("--t0", t0);
    verify->add_option("--t2", t2);
    verify->add_option("--kappa", kappa);
    verify->add_option("--y", y);
    verify->add_option("--x", x);
    verify->add_option("--xi", xi);
    verify->add_option("--n-max", n_max);
    verify->add_option("--s-grid", s_grid_csv, "comma-separated s values");
    verify->add_option("--image", image_name, "builtin image for cmf: one_over_s | cos | exp_sqrt");
    verify->add_option("--tol", tol, "override the identity tolerance");
    verify->add_option("--out", out_path, "write the report as JSON");

    try {
        auto args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& s : args) cargs.push_back(s.c_str());
        app.parse(int(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (solve->parsed()) {
        if (!preset.empty()) return run_preset(preset, out_dir, format, gs);
        if (equation != "gfpe" && equation != "gdwe")
            throw mk::config_error("solve: equation must be gfpe or gdwe");
        if (out_path.empty()) throw mk::config_error("solve: --out is required");
        auto kernel = mk::kernel_from_id(kernel_id);
        auto grid = mk::make_grid(gs.xmin, gs.xmax, gs.nx);
        mk::TransportParams tp;
        tp.B = B;
        tp.mu = mu;
        tp.a = a;
        mk::SolutionField field;
        if (equation == "gfpe")
            field = mk::solve_gfpe(kernel, parse_ic(ic_spec), tp, grid, t);
        else
            field = mk::solve_gdwe(kernel, parse_ic(ic_spec), parse_v0(v0_spec), tp, grid, t);
        write_field(field, format, out_path);
        std::cout << "wrote " << out_path << " (" << field.grid.size() << " points)\n";
        return 0;
    }

    if (msd->parsed()) {
        auto kernel = mk::kernel_from_id(kernel_id);
        auto spec = mk::ICMomentSpec::from_ic(parse_ic(ic_spec));
        double value;
        if (method == "tauberian") {
            mk::TransportParams tp;
            tp.B = B;
            tp.mu = mu;
            tp.a = a;
            value = mk::msd_asymptotic(kernel,
                                       msd_equation == "gfpe" ? mk::Equation::gfpe
                                                              : mk::Equation::gdwe,
                                       tp, spec.C, t);
        } else if (msd_equation == "gfpe") {
            value = mk::msd_gfpe(kernel, spec, B, mu, t).msd;
        } else {
            auto v0 = parse_v0(v0_spec).resolve(parse_ic(ic_spec));
            value = mk::msd_gdwe(kernel, spec, mk::VelocityMomentSpec::from_v0(v0), a, t).msd;
        }
        std::printf("%.9g\n", value);
        return 0;
    }

    if (kernel_list->parsed()) {
        for (const auto& id : mk::kernel_registry_ids()) std::cout << id << "\n";
        return 0;
    }
    if (kernel_eval->parsed()) {
        auto kernel = mk::kernel_from_id(kernel_id);
        const auto v = kernel.image(mk::complex_t(s_re, s_im));
        std::printf("%.9g %.9g\n", v.real() + 0.0, v.imag() + 0.0);  // avoid "-0"
        return 0;
    }

    if (verify->parsed()) {
        mk::VerificationReport rep;
        if (identity == "normalization") {
            auto kernel = mk::kernel_from_id(kernel_id);
            mk::DensityVariant var = variant == "F_half"    ? mk::DensityVariant::F_half
                                     : variant == "F_mixed" ? mk::DensityVariant::F_mixed
                                                            : mk::DensityVariant::f_sM;
            rep = mk::check_normalization(mk::make_density(kernel, var), t,
                                          tol > 0.0 ? tol : 1e-5);
        } else if (identity == "efros") {
            rep = mk::check_efros_selfreproduction(mk::kernel_from_id(kernel_id),
                                                   mk::kernel_from_id(kernel2_id), y, t,
                                                   tol > 0.0 ? tol : 1e-4);
        } else if (identity == "ml-composition") {
            rep = mk::check_ml_composition(alpha, t0, t2, tol > 0.0 ? tol : 1e-3);
        } else if (identity == "wave-composition") {
            rep = mk::check_wave_composition(a, kappa, t0, t2, tol > 0.0 ? tol : 1e-4);
        } else if (identity == "cmf") {
            auto grid = parse_grid_list(s_grid_csv);
            if (!image_name.empty()) {
                std::function<double(double)> f;
                if (image_name == "one_over_s") f = [](double s) { return 1.0 / s; };
                else if (image_name == "cos") f = [](double s) { return std::cos(s); };
                else if (image_name == "exp_sqrt")
                    f = [](double s) { return std::exp(-std::sqrt(s)) / std::sqrt(s); };
                else throw mk::config_error("unknown builtin image '" + image_name + "'");
                rep = mk::check_complete_monotonicity(f, grid, n_max, image_name);
            } else {
                auto kernel = mk::kernel_from_id(kernel_id);
                mk::DensityVariant var = variant == "F_half"    ? mk::DensityVariant::F_half
                                         : variant == "F_mixed" ? mk::DensityVariant::F_mixed
                                                                : mk::DensityVariant::f_sM;
                auto density = mk::make_density(kernel, var);
                rep = mk::check_complete_monotonicity(density.image_at(xi), grid, n_max,
                                                      kernel_id + "/" + variant);
            }
        } else if (identity == "pde-residual") {
            auto kernel = mk::kernel_from_id(kernel_id);
            mk::TransportParams tp;
            tp.B = B;
            tp.mu = mu;
            tp.a = a;
            mk::PdeResidualOptions po;
            if (tol > 0.0) po.tolerance = tol;
            rep = mk::check_pde_residual(kernel.family, kernel, parse_ic(ic_spec),
                                         parse_v0(v0_spec), tp, x, t, po);
        } else {
            throw mk::config_error("unknown identity '" + identity + "'");
        }
        std::printf("identity=%s max_abs_residual=%.9g tolerance=%.9g %s\n", rep.identity.c_str(),
                    rep.max_abs_residual, rep.tolerance, rep.pass ? "pass" : "FAIL");
        if (!out_path.empty()) mk::emit_json(mk::to_json(rep), out_path);
        return rep.pass ? 0 : 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mk::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const mk::accuracy_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mk::integrity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// onebit: design and evaluate zero-delay mappings for a one-bit ADC receiver with
// decoder side information.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "onebit/baselines.hpp"
#include "onebit/csv_io.hpp"
#include "onebit/dop.hpp"
#include "onebit/elb.hpp"
#include "onebit/error.hpp"
#include "onebit/montecarlo.hpp"
#include "onebit/objective.hpp"
#include "onebit/optimizer.hpp"
#include "onebit/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Common {
    double sigma_v = 1.0, sigma_u = 1.0, sigma_w = 1.0, r = 0.0;
    std::string criterion = "mse";
    double d_target = 0.09;
    std::optional<double> power, lambda;
    std::size_t grid_n = 0;
    double grid_halfwidth = 5.0;
    double step_size = 0.1;
    std::size_t max_iters = 20000;
    double tol = 0.0;
    std::uint64_t seed = 1;
    std::size_t samples = 1000000;
    std::string out = ".";
    unsigned jobs = 1;
};

void add_model_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--sigma-v", c.sigma_v, "source std")->capture_default_str();
    cmd->add_option("--sigma-u", c.sigma_u, "side-information std")->capture_default_str();
    cmd->add_option("--sigma-w", c.sigma_w, "channel noise std")->capture_default_str();
    cmd->add_option("--r", c.r, "source/side-information correlation")->capture_default_str();
    cmd->add_option("--criterion", c.criterion, "mse or dop")
        ->check(CLI::IsMember({"mse", "dop"}))
        ->capture_default_str();
    cmd->add_option("--d-target", c.d_target, "DOP distortion target D")->capture_default_str();
    cmd->add_option("--grid-n", c.grid_n, "source grid nodes (odd; default 1001 mse, 2001 dop)");
    cmd->add_option("--grid-halfwidth", c.grid_halfwidth, "grid halfwidth in source stds")->capture_default_str();
}

void add_optimizer_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--step-size", c.step_size, "initial descent step")->capture_default_str();
    cmd->add_option("--max-iters", c.max_iters, "descent iteration cap")->capture_default_str();
    cmd->add_option("--tol", c.tol, "gradient sup-norm tolerance (default 1e-5 mse, 1e-4 dop)");
}

void add_out_flag(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

onebit::SystemParams params_of(const Common& c) {
    onebit::SystemParams p;
    p.sigma_v = c.sigma_v;
    p.sigma_u = c.sigma_u;
    p.sigma_w = c.sigma_w;
    p.r = c.r;
    p.d_target = c.d_target;
    p.lambda = c.lambda.value_or(0.0);
    p.validate();
    return p;
}

onebit::OptimizerConfig optimizer_of(const Common& c) {
    onebit::OptimizerConfig cfg;
    cfg.criterion = onebit::parse_criterion(c.criterion);
    cfg.step_size = c.step_size;
    cfg.max_step = std::max(cfg.max_step, c.step_size);
    cfg.max_iters = c.max_iters;
    cfg.grad_tol = c.tol;
    cfg.validate();
    return cfg;
}

onebit::SourceGrid grid_of(const Common& c) {
    const auto crit = onebit::parse_criterion(c.criterion);
    const std::size_t n = c.grid_n ? c.grid_n : onebit::default_grid(crit, c.sigma_v).size();
    return onebit::make_grid(c.sigma_v, c.grid_halfwidth, n);
}

json params_json(const Common& c) {
    json j{{"sigma_v", c.sigma_v},   {"sigma_u", c.sigma_u},       {"sigma_w", c.sigma_w},
           {"r", c.r},               {"criterion", c.criterion},   {"d_target", c.d_target},
           {"grid_n", c.grid_n},     {"grid_halfwidth", c.grid_halfwidth},
           {"step_size", c.step_size}, {"max_iters", c.max_iters}, {"tol", c.tol},
           {"seed", c.seed},         {"samples", c.samples},       {"jobs", c.jobs}};
    j["power"] = c.power ? json(*c.power) : json(nullptr);
    j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
    return j;
}

class Manifest {
public:
    explicit Manifest(std::string sub) : sub_(std::move(sub)), start_(std::chrono::steady_clock::now()) {}

    void output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& dir, const json& parameters) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json j{{"subcommand", sub_},
               {"parameters", parameters},
               {"outputs", outputs_},
               {"tool_version", ONEBIT_VERSION},
               {"wall_clock_seconds", secs}};
        const std::string path = (fs::path(dir) / "manifest.json").string();
        std::ofstream os(path);
        if (!os) throw onebit::ConfigError("cannot write " + path);
        os << j.dump(2) << '\n';
    }

private:
    std::string sub_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw onebit::ConfigError("--out: cannot create directory '" + dir + "': " + ec.message());
}

std::string in_dir(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void print_report(const onebit::OptimizerReport& rep, onebit::Criterion crit) {
    std::cout << onebit::summary_header() << '\n' << onebit::summary_record(rep, crit) << '\n';
    if (rep.power_warning) {
        std::cerr << "warning: power target not met within 0.1%; reporting nearest achievable power " << rep.power
                  << '\n';
    }
}

int cmd_optimize(const Common& c) {
    if (c.power.has_value() == c.lambda.has_value()) {
        throw CLI::ValidationError("--power/--lambda", "give exactly one of --power or --lambda");
    }
    Manifest manifest("optimize");
    const onebit::SystemParams p = params_of(c);
    const onebit::OptimizerConfig cfg = optimizer_of(c);
    const onebit::Objective obj(p, cfg.criterion, grid_of(c));
    const onebit::OptimizerReport rep =
        c.power ? onebit::solve_for_power(*c.power, obj, cfg) : onebit::optimize(obj, cfg);

    ensure_dir(c.out);
    const std::string mpath = in_dir(c.out, "mapping.csv");
    const std::string dpath = in_dir(c.out, "decoder.csv");
    const std::string spath = in_dir(c.out, "summary.csv");
    onebit::write_mapping_file(mpath, rep.mapping);
    onebit::write_decoder_file(dpath, rep.decoder);
    {
        std::ofstream os(spath);
        if (!os) throw onebit::ConfigError("cannot write " + spath);
        os << onebit::summary_header() << '\n' << onebit::summary_record(rep, cfg.criterion) << '\n';
    }
    manifest.output(mpath);
    manifest.output(dpath);
    manifest.output(spath);
    json params = params_json(c);
    params["start_used"] = rep.start_used;
    params["power_warning"] = rep.power_warning;
    manifest.write(c.out, params);
    print_report(rep, cfg.criterion);
    return 0;
}

struct FilePair {
    std::string mapping, decoder;
};

void add_file_flags(CLI::App* cmd, FilePair& f, bool decoder_required) {
    cmd->add_option("--mapping", f.mapping, "mapping CSV (v,f)")->required()->check(CLI::ExistingFile);
    auto* d = cmd->add_option("--decoder", f.decoder, "decoder CSV (u,g0,g1)")->check(CLI::ExistingFile);
    if (decoder_required) d->required();
}

int cmd_evaluate(const Common& c, const FilePair& files) {
    onebit::SystemParams p = params_of(c);
    const auto crit = onebit::parse_criterion(c.criterion);
    const onebit::EncoderMapping f = onebit::read_mapping_file(files.mapping, p.sigma_v);
    std::optional<onebit::DecoderTable> g;
    if (!files.decoder.empty()) g = onebit::read_decoder_file(files.decoder, p.sigma_u);
    const onebit::SourceGrid u_grid =
        g ? g->u_grid : onebit::make_grid(p.sigma_u, f.grid.halfwidth_sigmas, std::min<std::size_t>(f.grid.size(), 1001));
    const onebit::Objective obj(p, crit, f.grid, u_grid);
    const onebit::Evaluation e = g ? obj.evaluate(f.values, *g) : obj.evaluate(f.values);
    std::cout.precision(12);
    std::cout << "criterion,value,power,lagrangian,source_outage\n"
              << c.criterion << ',' << e.value << ',' << e.power << ',' << e.lagrangian << ','
              << (crit == onebit::Criterion::Dop ? e.source_outage : 0.0) << '\n';
    return 0;
}

int cmd_simulate(const Common& c, const FilePair& files) {
    const onebit::SystemParams p = params_of(c);
    const auto crit = onebit::parse_criterion(c.criterion);
    const onebit::EncoderMapping f = onebit::read_mapping_file(files.mapping, p.sigma_v);
    const onebit::DecoderTable g = onebit::read_decoder_file(files.decoder, p.sigma_u);
    onebit::SimOptions opt;
    opt.jobs = c.jobs;
    const onebit::SimResult r = onebit::simulate(f, g, p, crit, c.samples, c.seed, opt);
    std::cout << onebit::sim_header() << '\n' << onebit::sim_record(r) << '\n';
    return 0;
}

int cmd_validate(const Common& c, const FilePair& files) {
    const onebit::SystemParams p = params_of(c);
    const auto crit = onebit::parse_criterion(c.criterion);
    const onebit::EncoderMapping f = onebit::read_mapping_file(files.mapping, p.sigma_v);
    const onebit::DecoderTable g = onebit::read_decoder_file(files.decoder, p.sigma_u);
    const onebit::Objective obj(p, crit, f.grid, g.u_grid);
    const double quad = obj.evaluate(f.values, g).value;
    onebit::SimOptions opt;
    opt.jobs = c.jobs;
    const onebit::SimResult r = onebit::simulate(f, g, p, crit, c.samples, c.seed, opt);
    const double z = r.std_error > 0.0 ? std::abs(r.empirical_value - quad) / r.std_error
                                       : (r.empirical_value == quad ? 0.0 : INFINITY);
    const bool pass = z <= 4.0;
    std::cout.precision(10);
    std::cout << "quadrature=" << quad << " empirical=" << r.empirical_value << " std_error=" << r.std_error
              << " z=" << z << ' ' << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 1;
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "not a number: '" + item + "'");
        }
    }
    return out;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::string& schemes, const std::string& points) {
    Manifest manifest("sweep");
    onebit::SweepSpec spec;
    spec.criterion = onebit::parse_criterion(c.criterion);
    spec.base = params_of(c);
    spec.axis = onebit::parse_axis(axis);
    spec.axis_values = points.empty()
                           ? (spec.axis == onebit::SweepAxis::Snr ? onebit::default_snr_axis() : onebit::default_r_axis())
                           : parse_list(points, "--points");
    spec.power = c.power.value_or(5.0);
    std::stringstream ss(schemes);
    for (std::string s; std::getline(ss, s, ',');) spec.schemes.push_back(s);
    spec.optimizer = optimizer_of(c);
    spec.grid_n = c.grid_n;
    spec.grid_halfwidth = c.grid_halfwidth;
    spec.jobs = c.jobs;
    const auto rows = onebit::run_sweep(spec);

    ensure_dir(c.out);
    const std::string path = in_dir(c.out, "sweep.csv");
    std::ofstream os(path);
    if (!os) throw onebit::ConfigError("cannot write " + path);
    onebit::write_sweep_csv(os, rows);
    os.close();
    onebit::write_sweep_csv(std::cout, rows);
    manifest.output(path);
    json params = params_json(c);
    params["axis"] = axis;
    params["schemes"] = schemes;
    params["points"] = spec.axis_values;
    manifest.write(c.out, params);
    return 0;
}

int cmd_bound(const Common& c) {
    if (!c.power) throw CLI::ValidationError("--power", "bound needs --power");
    const onebit::SystemParams p = params_of(c);
    const onebit::OptimizerConfig cfg = optimizer_of(c);
    const onebit::SourceGrid grid = grid_of(c);
    std::cout.precision(12);
    std::cout << "scheme,value\n";
    if (cfg.criterion == onebit::Criterion::Mse) {
        std::cout << "slb," << onebit::slb(p, *c.power / (p.sigma_w * p.sigma_w)).value << '\n';
        std::cout << "elb," << onebit::elb_mse(p, *c.power, cfg, grid).bound.value << '\n';
    } else {
        std::cout << "elb," << onebit::elb_dop(p, *c.power, cfg, grid).bound.value << '\n';
        std::cout << "low_snr_limit," << onebit::dop_low_snr_limit(p) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-delay one-bit ADC mapping design with decoder side information"};
    app.set_version_flag("--version", std::string(ONEBIT_VERSION));
    app.require_subcommand(1);
    Common c;
    FilePair files;
    std::string axis = "snr", schemes = "noe,plt,pbt,slb,elb", points;

    auto* opt = app.add_subcommand("optimize", "design a mapping by gradient descent");
    add_model_flags(opt, c);
    add_optimizer_flags(opt, c);
    add_out_flag(opt, c);
    auto* pw = opt->add_option("--power", c.power, "average power target");
    opt->add_option("--lambda", c.lambda, "fixed Lagrange weight")->excludes(pw);

    auto* sw = app.add_subcommand("sweep", "complementary criterion over an SNR or r axis");
    add_model_flags(sw, c);
    add_optimizer_flags(sw, c);
    add_out_flag(sw, c);
    sw->add_option("--axis", axis, "snr or r")->check(CLI::IsMember({"snr", "r"}))->capture_default_str();
    sw->add_option("--schemes", schemes, "comma list of noe,plt,pbt,slb,elb")->capture_default_str();
    sw->add_option("--points", points, "comma list of axis points (SNR in dB, or r)");
    sw->add_option("--power", c.power, "power on the r axis (default 5)");
    sw->add_option("--jobs", c.jobs, "concurrent sweep points")->capture_default_str();

    auto* val = app.add_subcommand("validate", "Monte-Carlo check of a mapping/decoder pair against quadrature");
    add_model_flags(val, c);
    add_file_flags(val, files, true);
    val->add_option("--seed", c.seed, "base seed")->capture_default_str();
    val->add_option("--samples", c.samples, "Monte-Carlo samples")->capture_default_str();
    val->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();

    auto* ev = app.add_subcommand("evaluate", "quadrature criterion and power of a mapping");
    add_model_flags(ev, c);
    add_file_flags(ev, files, false);

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimate of a mapping/decoder pair");
    add_model_flags(sim, c);
    add_file_flags(sim, files, true);
    sim->add_option("--seed", c.seed, "base seed")->capture_default_str();
    sim->add_option("--samples", c.samples, "Monte-Carlo samples")->capture_default_str();
    sim->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();

    auto* bd = app.add_subcommand("bound", "lower bounds at a power target");
    add_model_flags(bd, c);
    add_optimizer_flags(bd, c);
    bd->add_option("--power", c.power, "average power target");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*opt) return cmd_optimize(c);
        if (*sw) return cmd_sweep(c, axis, schemes, points);
        if (*val) return cmd_validate(c, files);
        if (*ev) return cmd_evaluate(c, files);
        if (*sim) return cmd_simulate(c, files);
        if (*bd) return cmd_bound(c);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const onebit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

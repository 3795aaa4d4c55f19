#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "bayescfar/clutter.hpp"
#include "bayescfar/detectors.hpp"
#include "bayescfar/errors.hpp"
#include "bayescfar/predictive.hpp"
#include "bayescfar/report.hpp"
#include "bayescfar/simulate.hpp"

namespace bcfar::cli {

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct DetectorArgs {
    std::string family = "bayes_os";
    int n = 0;
    int k = 1;
    double pfa = 0.01;
};

struct ScenarioArgs {
    std::string clutter = "exponential";
    double lambda = 1.0;
    double alpha = 3.0;
    double beta = 1.0;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
};

void add_detector_flags(CLI::App* cmd, DetectorArgs& a) {
    cmd->add_option("--family", a.family, "bayes_os | min_cfar | ca_cfar")->capture_default_str();
    cmd->add_option("--n", a.n, "window size N")->required();
    cmd->add_option("--k", a.k, "order statistic index (bayes_os)")->capture_default_str();
    cmd->add_option("--pfa", a.pfa, "design probability of false alarm")->capture_default_str();
}

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a) {
    cmd->add_option("--clutter", a.clutter, "exponential | pareto")->capture_default_str();
    cmd->add_option("--lambda", a.lambda, "exponential rate")->capture_default_str();
    cmd->add_option("--alpha", a.alpha, "Pareto Type II shape")->capture_default_str();
    cmd->add_option("--beta", a.beta, "Pareto Type II scale")->capture_default_str();
    cmd->add_option("--trials", a.trials, "Monte Carlo trials")->capture_default_str();
    cmd->add_option("--seed", a.seed, "64-bit master seed")->capture_default_str();
}

DetectorSpec make_spec(const DetectorArgs& a) {
    const auto family = parse_family(a.family);
    if (!family || *family == DetectorFamily::custom_g) {
        throw UsageError("unsupported detector family '" + a.family + "'");
    }
    DetectorSpec spec{*family, a.n, a.k, a.pfa};
    spec.validate();
    return spec;
}

Scenario make_scenario(const DetectorArgs& d, const ScenarioArgs& s) {
    Scenario scenario;
    scenario.detector = make_spec(d);
    if (s.clutter == "exponential") {
        scenario.clutter = ExponentialClutter(s.lambda);
    } else if (s.clutter == "pareto") {
        scenario.clutter = ParetoClutter(s.alpha, s.beta);
    } else {
        throw UsageError("unknown clutter model '" + s.clutter + "'");
    }
    scenario.trials = s.trials;
    scenario.seed = s.seed;
    return scenario;
}

double parse_number(std::string_view text, const std::string& what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw UsageError("cannot parse " + what + " '" + std::string(text) + "'");
    }
    return value;
}

// start:stop:steps, inclusive of both ends.
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) {
        throw UsageError(what + " must look like start:stop:steps");
    }
    const double start = parse_number(std::string_view(text).substr(0, first), what);
    const double stop = parse_number(std::string_view(text).substr(first + 1, second - first - 1), what);
    const double steps = parse_number(std::string_view(text).substr(second + 1), what);
    if (!(steps >= 1.0) || steps != std::floor(steps) || steps > 1e7) {
        throw UsageError(what + ": steps must be a positive integer");
    }
    if (!(start >= 0.0) || !(stop >= 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
        throw UsageError(what + ": grid values must be finite and nonnegative");
    }
    const auto count = static_cast<std::size_t>(steps);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = count == 1 ? start
                             : start + (stop - start) * static_cast<double>(i) /
                                           static_cast<double>(count - 1);
    }
    grid.back() = count == 1 ? start : stop;
    return grid;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string_view rest(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(parse_number(rest.substr(0, comma), what));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
        if (rest.empty()) {
            throw UsageError(what + ": trailing comma");
        }
    }
    if (out.empty()) {
        throw UsageError(what + " is empty");
    }
    return out;
}

// Pfa and predictive density given the observed clutter statistic t
// (k-th order statistic for bayes_os, minimum for min_cfar, sum for ca_cfar).
double conditional_pfa(const DetectorSpec& spec, double t, double tau) {
    switch (spec.family) {
        case DetectorFamily::bayes_os: return os_pfa(tau, OsPredictive(spec.n, spec.k, t));
        case DetectorFamily::min_cfar: return os_pfa(tau, OsPredictive(spec.n, 1, t));
        case DetectorFamily::ca_cfar:
            if (!(t > 0.0)) {
                throw DegenerateWindowError("window sum must be positive");
            }
            return std::pow(1.0 + tau / t, -spec.n);
        case DetectorFamily::custom_g: break;
    }
    throw UsageError("unsupported detector family");
}

double conditional_density(const DetectorSpec& spec, double t, double z0) {
    switch (spec.family) {
        case DetectorFamily::bayes_os:
            return os_predictive_density(z0, OsPredictive(spec.n, spec.k, t));
        case DetectorFamily::min_cfar: return os_predictive_density(z0, OsPredictive(spec.n, 1, t));
        case DetectorFamily::ca_cfar:
            if (!(t > 0.0)) {
                throw DegenerateWindowError("window sum must be positive");
            }
            return spec.n / t * std::pow(1.0 + z0 / t, -(spec.n + 1.0));
        case DetectorFamily::custom_g: break;
    }
    throw UsageError("unsupported detector family");
}

double threshold_for(const DetectorSpec& spec, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw UsageError("--t must be positive and finite");
    }
    switch (spec.family) {
        case DetectorFamily::bayes_os: return bayes_os_threshold(spec, t);
        case DetectorFamily::min_cfar: return min_cfar_multiplier(spec) * t;
        case DetectorFamily::ca_cfar: return ca_cfar_multiplier(spec) * t;
        case DetectorFamily::custom_g: break;
    }
    throw UsageError("unsupported detector family");
}

std::vector<double> read_profile(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open profile '" + path + "'");
    }
    std::vector<double> profile;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (header && number == 1) {
            continue;
        }
        const auto where = "profile line " + std::to_string(number);
        if (line.empty()) {
            throw UsageError(where + ": empty line");
        }
        const double value = parse_number(line, where + " value");
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw UsageError(where + ": value " + line + " must be finite and nonnegative");
        }
        profile.push_back(value);
    }
    return profile;
}

void append_csv(const std::string& path, const std::string& mode, const Scenario& s,
                const SimReport& r) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw UsageError("cannot write '" + path + "'");
    }
    if (fresh) {
        out << "mode,family,n,k,pfa,estimate,wilson_low,wilson_high,trials,seed\n";
    }
    out << mode << ',' << to_string(s.detector.family) << ',' << s.detector.n << ','
        << s.detector.k << ',' << format_double(s.detector.design_pfa) << ','
        << format_double(r.estimate) << ',' << format_double(r.wilson_low) << ','
        << format_double(r.wilson_high) << ',' << r.trials << ',' << r.seed << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian sliding-window CFAR detectors", "bayes-cfar"};
    app.set_config("--config", "", "key-value configuration file; explicit flags win");
    app.require_subcommand(1);

    // threshold
    DetectorArgs th;
    double th_t = 0.0;
    auto* threshold = app.add_subcommand("threshold", "threshold tau for an observed statistic t");
    add_detector_flags(threshold, th);
    threshold->add_option("--t", th_t, "observed clutter statistic")->required();

    // pfa
    DetectorArgs pf;
    double pf_t = 0.0;
    std::string tau_grid;
    auto* pfa = app.add_subcommand("pfa", "Pfa curve over a threshold grid");
    add_detector_flags(pfa, pf);
    pfa->add_option("--t", pf_t, "observed clutter statistic")->required();
    pfa->add_option("--tau-grid", tau_grid, "start:stop:steps")->required();

    // density
    DetectorArgs de;
    double de_t = 0.0;
    std::string z_grid;
    auto* density = app.add_subcommand("density", "predictive density over a grid of z0");
    add_detector_flags(density, de);
    density->add_option("--t", de_t, "observed clutter statistic")->required();
    density->add_option("--z-grid", z_grid, "start:stop:steps")->required();

    // simulate
    DetectorArgs si;
    ScenarioArgs ss;
    std::string mode = "pfa";
    double snr = 0.0;
    std::string out_path;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo Pfa or Pd estimate");
    add_detector_flags(simulate, si);
    add_scenario_flags(simulate, ss);
    simulate->add_option("--mode", mode, "pfa | pd")->check(CLI::IsMember({"pfa", "pd"}));
    simulate->add_option("--snr", snr, "Swerling I SNR, linear (pd mode)");
    simulate->add_option("--out", out_path, "append a CSV row to this file");

    // sweep
    DetectorArgs sw;
    ScenarioArgs sws;
    std::string lambda_grid;
    auto* sweep = app.add_subcommand("sweep", "empirical Pfa across exponential clutter rates");
    add_detector_flags(sweep, sw);
    add_scenario_flags(sweep, sws);
    sweep->add_option("--lambda-grid", lambda_grid, "comma-separated rates")->required();

    // scan
    DetectorArgs sc;
    std::string profile_path;
    std::size_t leading = 0;
    std::size_t trailing = 0;
    bool header = false;
    auto* scan = app.add_subcommand("scan", "run a detector along a range profile");
    add_detector_flags(scan, sc);
    scan->add_option("--profile", profile_path, "single-column CSV of cell intensities")->required();
    scan->add_option("--leading", leading, "window cells before the cell under test")->required();
    scan->add_option("--trailing", trailing, "window cells after the cell under test")->required();
    scan->add_flag("--header", header, "skip the first line of the profile");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*threshold) {
            const DetectorSpec spec = make_spec(th);
            const double tau = threshold_for(spec, th_t);
            nlohmann::ordered_json record;
            record["family"] = std::string(to_string(spec.family));
            record["n"] = spec.n;
            record["k"] = spec.k;
            record["pfa"] = spec.design_pfa;
            record["t"] = th_t;
            record["tau"] = tau;
            out << format_double(tau) << '\n' << record.dump() << '\n';
        } else if (*pfa) {
            const DetectorSpec spec = make_spec(pf);
            const auto grid = parse_grid(tau_grid, "--tau-grid");
            std::ostringstream body;
            body << "tau,pfa\n";
            for (double tau : grid) {
                body << format_double(tau) << ',' << format_double(conditional_pfa(spec, pf_t, tau))
                     << '\n';
            }
            out << body.str();
        } else if (*density) {
            const DetectorSpec spec = make_spec(de);
            const auto grid = parse_grid(z_grid, "--z-grid");
            std::ostringstream body;
            body << "z0,density\n";
            for (double z : grid) {
                body << format_double(z) << ',' << format_double(conditional_density(spec, de_t, z))
                     << '\n';
            }
            out << body.str();
        } else if (*simulate) {
            Scenario scenario = make_scenario(si, ss);
            SimReport report;
            if (mode == "pd") {
                if (!(snr > 0.0)) {
                    throw UsageError("--snr must be positive in pd mode");
                }
                scenario.target = TargetModel{TargetKind::swerling1, snr};
                report = estimate_pd(scenario);
            } else {
                report = estimate_pfa(scenario);
            }
            out << to_json(report).dump() << '\n';
            if (!out_path.empty()) {
                append_csv(out_path, mode, scenario, report);
            }
        } else if (*sweep) {
            const Scenario scenario = make_scenario(sw, sws);
            const auto rates = parse_list(lambda_grid, "--lambda-grid");
            const SweepResult result = cfar_sweep(scenario, rates);
            std::ostringstream body;
            body << "lambda,estimate,wilson_low,wilson_high,trials\n";
            for (std::size_t i = 0; i < result.reports.size(); ++i) {
                const auto& r = result.reports[i];
                body << format_double(result.rates[i]) << ',' << format_double(r.estimate) << ','
                     << format_double(r.wilson_low) << ',' << format_double(r.wilson_high) << ','
                     << r.trials << '\n';
            }
            out << body.str();
            err << "max_deviation_se=" << format_double(result.max_deviation_se) << '\n';
        } else if (*scan) {
            const DetectorSpec spec = make_spec(sc);
            const auto profile = read_profile(profile_path, header);
            const auto decisions = scan_profile(profile, spec, {leading, trailing});
            std::ostringstream body;
            body << "cell_index,z0,comparison_value,verdict\n";
            for (std::size_t i = 0; i < decisions.size(); ++i) {
                const auto& d = decisions[i];
                body << leading + i << ',' << format_double(d.statistic_z0) << ','
                     << format_double(d.comparison_value) << ',' << to_string(d.verdict) << '\n';
            }
            out << body.str();
        }
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace bcfar::cli

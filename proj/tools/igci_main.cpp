// igci: command-line front end for information-geometric causal inference.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal numeric failure.

#include "igci/core.hpp"
#include "igci/error.hpp"
#include "igci/estimators.hpp"
#include "igci/io.hpp"
#include "igci/simulation.hpp"
#include "igci/trace_method.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string reference = "uniform";
    std::string estimator = "entropy";
    std::string format = "json";
};

igci::ReferenceFamily reference_of(const std::string& s) {
    return s == "gaussian" ? igci::ReferenceFamily::Gaussian : igci::ReferenceFamily::UniformUnit;
}

igci::EstimatorKind estimator_of(const std::string& s) {
    return s == "slope" ? igci::EstimatorKind::SlopeIntegral : igci::EstimatorKind::EntropySpacing;
}

igci::io::OutputFormat format_of(const std::string& s) {
    return s == "tsv" ? igci::io::OutputFormat::Tsv : igci::io::OutputFormat::Json;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("IGCI_SEED"); env != nullptr && *env != '\0') {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring non-numeric IGCI_SEED '" << env << "'\n";
        }
    }
    return 1;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--reference", opts.reference, "Reference measure")
        ->check(CLI::IsMember({"uniform", "gaussian"}))
        ->capture_default_str();
    cmd->add_option("--estimator", opts.estimator, "Score estimator")
        ->check(CLI::IsMember({"entropy", "slope"}))
        ->capture_default_str();
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"json", "tsv"}))
        ->capture_default_str();
}

std::vector<std::size_t> parse_columns(const std::string& text) {
    std::vector<std::size_t> cols;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string token = text.substr(start, end - start);
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
            throw CLI::ValidationError("columns", "expected a comma-separated list of column indices");
        }
        cols.push_back(std::stoul(token));
        start = end + 1;
    }
    return cols;
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> levels;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        levels.push_back(std::stod(text.substr(start, end - start)));
        start = end + 1;
    }
    return levels;
}

void emit(const ordered_json& record, igci::io::OutputFormat format, bool& header_done) {
    if (format == igci::io::OutputFormat::Json) {
        std::cout << record.dump() << '\n';
        return;
    }
    if (!header_done) {
        bool first = true;
        for (const auto& [key, value] : record.items()) {
            std::cout << (first ? "" : "\t") << key;
            first = false;
        }
        std::cout << '\n';
        header_done = true;
    }
    bool first = true;
    for (const auto& [key, value] : record.items()) {
        std::cout << (first ? "" : "\t");
        if (value.is_string()) {
            std::cout << value.get<std::string>();
        } else if (value.is_number_float()) {
            std::cout << fmt(value.get<double>());
        } else {
            std::cout << value.dump();
        }
        first = false;
    }
    std::cout << '\n';
}

igci::sim::NoiseKind noise_of(const std::string& s) {
    static const std::map<std::string, igci::sim::NoiseKind> kinds = {
        {"none", igci::sim::NoiseKind::None},
        {"uniform", igci::sim::NoiseKind::UniformUnit},
        {"normal", igci::sim::NoiseKind::StdNormal},
        {"laplace", igci::sim::NoiseKind::Laplace},
    };
    return kinds.at(s);
}

std::vector<double> verification_input(const std::string& kind, std::size_t m, std::uint64_t seed) {
    igci::sim::CounterRng rng(seed, {0x5EED});
    std::vector<double> x(m);
    for (double& v : x) {
        if (kind == "uniform") {
            v = rng.uniform();
        } else if (kind == "bimodal") {
            v = rng.normal(rng.uniform() < 0.5 ? -1.0 : 1.0, 0.25);
        } else {
            v = rng.normal();
        }
    }
    return x;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-geometric causal inference for deterministic and low-noise relations"};
    app.require_subcommand(1);

    CommonOptions common;
    std::uint64_t seed = default_seed();

    // infer
    auto* infer = app.add_subcommand("infer", "Infer the causal direction for one two-column data file");
    std::string infer_path, infer_id;
    std::size_t x_col = 0, y_col = 1;
    infer->add_option("file", infer_path, "Data file")->required()->check(CLI::ExistingFile);
    infer->add_option("--x-col", x_col, "Column holding X")->capture_default_str();
    infer->add_option("--y-col", y_col, "Column holding Y")->capture_default_str();
    infer->add_option("--id", infer_id, "Identifier written to the record (default: file name)");
    add_common(infer, common);

    // pairs
    auto* pairs = app.add_subcommand("pairs", "Score every entry of a pairs manifest and summarize accuracy");
    std::string manifest_path;
    pairs->add_option("manifest", manifest_path, "Manifest CSV")->required()->check(CLI::ExistingFile);
    add_common(pairs, common);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run the synthetic accuracy grid or the sine experiment");
    std::string mode = "grid", noise = "none";
    double lambda = 0.0, laplace_scale = 0.2, width = 0.2, epsilon = 0.005, omega = 40.0;
    std::size_t m = 1000, reps = 100;
    unsigned threads = 0;
    simulate->add_option("--mode", mode, "Experiment")->check(CLI::IsMember({"grid", "sine"}))->capture_default_str();
    simulate->add_option("--lambda", lambda, "Noise level")->capture_default_str();
    simulate->add_option("--noise", noise, "Noise distribution")
        ->check(CLI::IsMember({"none", "uniform", "normal", "laplace"}))
        ->capture_default_str();
    simulate->add_option("--laplace-scale", laplace_scale, "Scale of Laplace noise")->capture_default_str();
    simulate->add_option("--sigma", width, "Width of the input densities")->capture_default_str();
    simulate->add_option("-m,--samples", m, "Sample size per trial")->capture_default_str();
    simulate->add_option("--reps", reps, "Repetitions per cell")->capture_default_str();
    simulate->add_option("--epsilon", epsilon, "Sine amplitude")->capture_default_str();
    simulate->add_option("--omega", omega, "Sine frequency")->capture_default_str();
    simulate->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    simulate->add_option("--seed", seed, "Seed (default: $IGCI_SEED or 1)");
    add_common(simulate, common);

    // tracedir
    auto* tracedir = app.add_subcommand("tracedir", "Linear multivariate case with an isotropic Gaussian reference");
    std::string trace_path, x_cols_text, y_cols_text;
    bool refit = false;
    tracedir->add_option("file", trace_path, "Data file")->required()->check(CLI::ExistingFile);
    tracedir->add_option("--x-cols", x_cols_text, "Comma-separated X columns")->required();
    tracedir->add_option("--y-cols", y_cols_text, "Comma-separated Y columns")->required();
    tracedir->add_flag("--refit", refit, "Fit the reverse model by regressing X on Y");
    tracedir->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "tsv"}));

    // align
    auto* align = app.add_subcommand("align", "Find the lag maximizing the correlation of two series");
    std::string align_path;
    std::size_t a_col = 0, b_col = 1;
    std::optional<std::size_t> max_lag;
    bool align_infer = false;
    align->add_option("file", align_path, "Data file")->required()->check(CLI::ExistingFile);
    align->add_option("--a-col", a_col, "First series column")->capture_default_str();
    align->add_option("--b-col", b_col, "Second (shifted) series column")->capture_default_str();
    align->add_option("--max-lag", max_lag, "Largest lag searched (default: 10% of the series length)");
    align->add_flag("--infer", align_infer, "Also score the aligned pair");
    add_common(align, common);

    // verify
    auto* verify = app.add_subcommand("verify", "Numerical checks of the information-geometric identities");
    std::string check = "lemma1", input_kind = "gaussian", levels_text = "0,0.01,0.1,1";
    std::size_t trials = 1000, support = 8, verify_m = 100000;
    verify->add_option("check", check, "Which check")->check(CLI::IsMember({"lemma1", "lemma2"}))->capture_default_str();
    verify->add_option("--trials", trials, "Random density triples (lemma1)")->capture_default_str();
    verify->add_option("--support", support, "Support size of the densities (lemma1)")->capture_default_str();
    verify->add_option("--input", input_kind, "Input density (lemma2)")
        ->check(CLI::IsMember({"gaussian", "uniform", "bimodal"}))
        ->capture_default_str();
    verify->add_option("-m,--samples", verify_m, "Sample size (lemma2)")->capture_default_str();
    verify->add_option("--sigma-levels", levels_text, "Comma-separated noise variances (lemma2)")->capture_default_str();
    verify->add_option("--seed", seed, "Seed (default: $IGCI_SEED or 1)");
    verify->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "tsv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    const auto reference = reference_of(common.reference);
    const auto estimator = estimator_of(common.estimator);
    const auto format = format_of(common.format);
    bool header_done = false;

    try {
        if (*infer) {
            const auto loaded = igci::io::load_pair(infer_path, x_col, y_col);
            if (loaded.dropped_rows > 0) {
                std::cerr << "warning: dropped " << loaded.dropped_rows << " rows with non-finite values\n";
            }
            const auto report = igci::igci_score(loaded.pair, reference, estimator);
            const std::string id = infer_id.empty() ? std::filesystem::path(infer_path).filename().string() : infer_id;
            if (format == igci::io::OutputFormat::Tsv) std::cout << igci::io::tsv_header() << '\n';
            std::cout << igci::io::format_record(id, report, format) << '\n';
        } else if (*pairs) {
            const auto manifest = igci::io::load_manifest(manifest_path);
            const auto summary = igci::io::evaluate_manifest(manifest, reference, estimator);
            if (format == igci::io::OutputFormat::Tsv) std::cout << igci::io::tsv_header() << '\n';
            for (const auto& entry : summary.entries) {
                if (entry.report) {
                    std::cout << igci::io::format_record(entry.id, *entry.report, format) << '\n';
                } else {
                    std::cerr << "error: " << entry.id << ": " << entry.error << '\n';
                    if (format == igci::io::OutputFormat::Json) {
                        std::cout << ordered_json{{"id", entry.id}, {"error", entry.error}}.dump() << '\n';
                    } else {
                        std::cout << entry.id << "\tnan\tnan\terror\t" << common.estimator << '\t' << common.reference
                                  << "\t0\n";
                    }
                }
            }
            ordered_json s;
            s["summary"] = true;
            s["entries"] = summary.entries.size();
            s["decisions_pct"] = summary.decisions_pct;
            s["accuracy_pct"] = summary.accuracy_pct ? ordered_json(*summary.accuracy_pct) : ordered_json(nullptr);
            if (format == igci::io::OutputFormat::Json) {
                std::cout << s.dump() << '\n';
            } else {
                std::cout << "# entries=" << summary.entries.size() << " decisions_pct=" << fmt(summary.decisions_pct)
                          << " accuracy_pct=" << (summary.accuracy_pct ? fmt(*summary.accuracy_pct) : "nan") << '\n';
            }
        } else if (*simulate) {
            if (mode == "grid") {
                igci::sim::GridConfig config;
                config.noise = {noise_of(noise), noise == "none" ? 0.0 : lambda, laplace_scale};
                config.m = m;
                config.repetitions = reps;
                config.estimator = estimator;
                config.reference = reference;
                config.seed = seed;
                config.sigma = width;
                config.threads = threads;
                const auto result = igci::sim::run_grid(config);
                const auto inputs = igci::sim::grid_inputs(width);
                const char mechanisms[] = {'a', 'b', 'c', 'd', 'e'};
                for (std::size_t i = 0; i < 5; ++i) {
                    for (std::size_t j = 0; j < 5; ++j) {
                        const auto& cell = result.cell(i, j);
                        ordered_json r;
                        r["input"] = igci::sim::label(inputs[i]);
                        r["mechanism"] = std::string(1, mechanisms[j]);
                        r["correct"] = cell.correct;
                        r["wrong"] = cell.wrong;
                        r["undecided"] = cell.undecided;
                        r["accuracy_pct"] = cell.accuracy_pct();
                        r["m"] = m;
                        r["repetitions"] = reps;
                        r["lambda"] = config.noise.lambda;
                        r["noise"] = std::string(igci::sim::to_string(config.noise.kind));
                        r["estimator"] = common.estimator;
                        r["reference"] = common.reference;
                        r["seed"] = seed;
                        emit(r, format, header_done);
                    }
                }
            } else {
                igci::sim::SineConfig config;
                config.epsilon = epsilon;
                config.omega = omega;
                config.inputs = igci::sim::sine_inputs(width);
                config.m = m;
                config.repetitions = reps;
                config.estimator = estimator;
                config.reference = reference;
                config.seed = seed;
                for (const auto& res : igci::sim::run_sine(config)) {
                    ordered_json r;
                    r["input"] = igci::sim::label(res.input);
                    r["correct"] = res.tally.correct;
                    r["wrong"] = res.tally.wrong;
                    r["undecided"] = res.tally.undecided;
                    r["accuracy_pct"] = res.tally.accuracy_pct();
                    r["m"] = m;
                    r["repetitions"] = reps;
                    r["epsilon"] = epsilon;
                    r["omega"] = omega;
                    r["estimator"] = common.estimator;
                    r["reference"] = common.reference;
                    r["seed"] = seed;
                    emit(r, format, header_done);
                }
            }
        } else if (*tracedir) {
            const auto xc = parse_columns(x_cols_text);
            const auto yc = parse_columns(y_cols_text);
            igci::trace::LinearFitOptions options;
            options.refit_reverse = refit;
            const auto result = igci::trace::infer_linear_direction(
                igci::MultiSample(igci::io::load_columns(trace_path, xc)),
                igci::MultiSample(igci::io::load_columns(trace_path, yc)), options);
            if (result.nonlinear_warning) {
                std::cerr << "warning: relative residual " << result.relative_residual
                          << " suggests the relation is not linear\n";
            }
            ordered_json r;
            r["id"] = std::filesystem::path(trace_path).filename().string();
            r["delta_xy"] = result.delta_xy;
            r["delta_yx"] = result.delta_yx;
            r["direction"] = std::string(igci::to_string(result.direction));
            r["relative_residual"] = result.relative_residual;
            r["reference"] = "isotropic";
            emit(r, format, header_done);
        } else if (*align) {
            const auto loaded = igci::io::load_pair(align_path, a_col, b_col);
            const auto& pair = loaded.pair;
            const std::size_t lag_limit = max_lag.value_or(pair.size() / 10);
            const auto alignment = igci::io::align_lag(pair.x(), pair.y(), lag_limit);
            if (alignment.low_correlation) {
                std::cerr << "warning: best correlation " << alignment.correlation << " is below "
                          << igci::io::kLowCorrelation << '\n';
            }
            ordered_json r;
            r["lag"] = alignment.lag;
            r["correlation"] = alignment.correlation;
            r["overlap_length"] = alignment.overlap_length;
            r["max_lag"] = lag_limit;
            emit(r, format, header_done);
            if (align_infer) {
                const auto report =
                    igci::igci_score(igci::io::aligned_pair(pair.x(), pair.y(), alignment.lag), reference, estimator);
                if (format == igci::io::OutputFormat::Tsv) std::cout << igci::io::tsv_header() << '\n';
                std::cout << igci::io::format_record("aligned", report, format) << '\n';
            }
        } else if (*verify) {
            if (check == "lemma1") {
                igci::sim::CounterRng rng(seed, {0x1E1});
                double worst = 0.0;
                for (std::size_t t = 0; t < trials; ++t) {
                    std::vector<double> q(support), r(support), s(support);
                    for (auto* v : {&q, &r, &s}) {
                        double total = 0.0;
                        for (double& e : *v) total += (e = rng.uniform());
                        for (double& e : *v) e /= total;
                    }
                    const auto d = igci::orthogonality_defect(q, r, s);
                    worst = std::max(worst, std::abs(d.kl_defect - d.cross_term_defect));
                }
                ordered_json rec;
                rec["check"] = "lemma1";
                rec["trials"] = trials;
                rec["support"] = support;
                rec["max_abs_difference"] = worst;
                rec["holds"] = worst <= 1e-10;
                emit(rec, format, header_done);
            } else {
                const auto x = verification_input(input_kind, verify_m, seed);
                const auto levels = parse_levels(levels_text);
                const auto report = igci::sim::verify_noise_bound(x, levels, seed);
                for (const auto& level : report.levels) {
                    ordered_json rec;
                    rec["check"] = "lemma2";
                    rec["input"] = input_kind;
                    rec["sigma"] = level.sigma;
                    rec["entropy_x"] = report.entropy_x;
                    rec["fisher_x"] = report.fisher.value;
                    rec["entropy_noisy"] = level.entropy_noisy;
                    rec["bound"] = level.bound;
                    rec["slack"] = level.slack;
                    rec["holds"] = level.holds;
                    emit(rec, format, header_done);
                }
            }
        }
    } catch (const igci::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return igci::is_numeric_failure(e.code()) ? kExitNumeric : kExitData;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}

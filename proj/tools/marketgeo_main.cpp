#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "marketgeo/csv.hpp"
#include "marketgeo/errors.hpp"
#include "marketgeo/geometry.hpp"
#include "marketgeo/panel.hpp"
#include "marketgeo/parallel.hpp"
#include "marketgeo/pipeline.hpp"
#include "marketgeo/report.hpp"
#include "marketgeo/returns.hpp"
#include "marketgeo/stats.hpp"
#include "marketgeo/surrogates.hpp"
#include "marketgeo/synth.hpp"
#include "marketgeo/version.hpp"

namespace fs = std::filesystem;
using namespace marketgeo;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open for hashing: " + path);
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        if (ctx) EVP_MD_CTX_free(ctx);
        throw Error("cannot initialize SHA-256");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

SurrogateKind parse_kind(const std::string& name) {
    if (name == "permute") return SurrogateKind::time_permuted;
    if (name == "gaussian") return SurrogateKind::gaussian;
    throw ConfigError("unknown surrogate kind '" + name + "' (use permute or gaussian)");
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void split_baseline(const std::string& text, std::string& start, std::string& end) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("--baseline expects START:END, got '" + text + "'");
    }
    start = text.substr(0, colon);
    end = text.substr(colon + 1);
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& labels,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << "ticker";
    for (const auto& l : labels) out << ',' << csv::escape(l);
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << csv::escape(labels[static_cast<size_t>(r)]);
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << csv::format_double(m(r, c));
        out << '\n';
    }
}

void print_align_report(const AlignReport& report) {
    for (const auto& note : report.notes) {
        std::cerr << "align: " << note << '\n';
    }
}

struct AnalyzeArgs {
    std::string input;
    std::string output_dir;
    std::string baseline;
    int window = 0;
    int f = 6;
    bool estimate_f = false;
    double alpha = 0.05;
    int step = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    int surrogates = 100;
    double confidence = 0.99;
    std::string kind = "permute";
    bool one_sided = false;
    bool dump_geometry = false;
};

int run_analyze(const AnalyzeArgs& args) {
    AnalysisConfig config;
    config.window_length = args.window;
    config.step = args.step;
    config.f = args.f;
    config.estimate_f = args.estimate_f;
    split_baseline(args.baseline, config.baseline_start, config.baseline_end);
    config.alpha = args.alpha;
    config.two_sided = !args.one_sided;
    config.surrogate_kind = parse_kind(args.kind);
    config.n_surrogates = args.surrogates;
    config.confidence = args.confidence;
    config.seed = args.seed_given ? args.seed : fresh_seed();
    config.threads = args.threads;
    config.validate();

    const auto t_load = std::chrono::steady_clock::now();
    const PricePanel raw = load_price_panel(args.input);
    const double ms_load = elapsed_ms(t_load);

    const auto t_align = std::chrono::steady_clock::now();
    const AlignResult aligned = align_panel(raw);
    const double ms_align = elapsed_ms(t_align);
    print_align_report(aligned.report);

    fs::create_directories(args.output_dir);
    GeometryDump dump;
    if (args.dump_geometry) {
        const fs::path geo_dir = fs::path(args.output_dir) / "geometry";
        fs::create_directories(geo_dir);
        const std::vector<std::string> tickers = aligned.panel.tickers;
        dump = [geo_dir, tickers](int t, const CorrelationMatrix& c, const DistanceMatrix& d,
                                  const MarketEmbedding& e) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "window_%06d", t);
            write_matrix_csv(c.values, tickers, (geo_dir / (std::string(tag) + "_correlation.csv")).string());
            write_matrix_csv(d.values, tickers, (geo_dir / (std::string(tag) + "_distance.csv")).string());
            std::ofstream ev((geo_dir / (std::string(tag) + "_eigenvalues.csv")).string(),
                             std::ios::binary);
            ev << "rank,eigenvalue\n";
            for (Eigen::Index j = 0; j < e.eigenvalues.size(); ++j) {
                ev << (j + 1) << ',' << csv::format_double(e.eigenvalues(j)) << '\n';
            }
            std::ofstream co((geo_dir / (std::string(tag) + "_coordinates.csv")).string(),
                             std::ios::binary);
            co << "ticker";
            for (Eigen::Index j = 0; j < e.coordinates.cols(); ++j) co << ",axis" << (j + 1);
            co << '\n';
            for (Eigen::Index r = 0; r < e.coordinates.rows(); ++r) {
                co << csv::escape(tickers[static_cast<size_t>(r)]);
                for (Eigen::Index j = 0; j < e.coordinates.cols(); ++j) {
                    co << ',' << csv::format_double(e.coordinates(r, j));
                }
                co << '\n';
            }
        };
    }

    const auto t_run = std::chrono::steady_clock::now();
    const KurtosisSeries series = rolling_analysis(aligned.panel, config, dump);
    const double ms_run = elapsed_ms(t_run);

    size_t invalid = 0;
    size_t shown = 0;
    for (const auto& pt : series.points) {
        if (pt.valid) continue;
        ++invalid;
        if (shown < 20) {
            std::cerr << "gap: " << pt.note << '\n';
            ++shown;
        }
    }
    if (invalid > shown) {
        std::cerr << "gap: ... and " << (invalid - shown) << " more\n";
    }

    const auto t_write = std::chrono::steady_clock::now();
    const fs::path out_dir(args.output_dir);
    write_gseries_csv(series, (out_dir / "gseries.csv").string());

    nlohmann::json manifest;
    manifest["config"] = {
        {"command", "analyze"},
        {"input", args.input},
        {"output", args.output_dir},
        {"window", config.window_length},
        {"step", config.step},
        {"f", config.f},
        {"estimate_f", config.estimate_f},
        {"f_used", series.f_used},
        {"baseline_start", config.baseline_start},
        {"baseline_end", config.baseline_end},
        {"alpha", config.alpha},
        {"two_sided", config.two_sided},
        {"surrogate_kind", args.kind},
        {"n_surrogates", config.n_surrogates},
        {"confidence", config.confidence},
        {"seed", config.seed},
        {"threads", config.threads},
        {"dump_geometry", args.dump_geometry},
    };
    manifest["input_sha256"] = sha256_file(args.input);
    manifest["version"] = kVersion;
    const double ms_write = elapsed_ms(t_write);
    manifest["timings_ms"] = {
        {"load", ms_load}, {"align", ms_align}, {"analyze", ms_run}, {"write", ms_write}};
    std::ofstream mf((out_dir / "manifest.json").string(), std::ios::binary);
    if (!mf) {
        throw Error("cannot write manifest.json");
    }
    mf << manifest.dump(2) << '\n';

    size_t flagged = 0;
    for (bool flag : series.flags) {
        if (flag) ++flagged;
    }
    std::cout << series.n_windows() << " windows (" << invalid << " gaps), " << flagged
              << " flagged at alpha " << config.alpha << "; f = " << series.f_used
              << ", baseline b2p " << series.baseline.mean_b2p << " +- "
              << series.baseline.std_b2p << '\n';
    std::cout << "wrote " << (out_dir / "gseries.csv").string() << " and manifest.json\n";
    return 0;
}

struct SynthArgs {
    std::string spec_path;
    std::string output;
};

int run_synth(const SynthArgs& args) {
    const RegimeSpec spec = RegimeSpec::from_json_file(args.spec_path);
    const PricePanel panel = generate_synthetic_panel(spec);
    write_panel(panel, args.output);
    std::cout << "wrote " << panel.n_dates() << " dates x " << panel.n_assets() << " assets to "
              << args.output << '\n';
    return 0;
}

struct SpectrumArgs {
    std::string input;
    std::string at_date;
    std::string output = "spectrum.csv";
    int window = 0;
    int surrogates = 100;
    double confidence = 0.99;
    std::string kind = "permute";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
};

int run_spectrum(const SpectrumArgs& args) {
    if (args.window < 2) {
        throw ConfigError("window length must be at least 2");
    }
    if (!(args.confidence > 0.0 && args.confidence < 1.0)) {
        throw ConfigError("confidence must lie strictly inside (0, 1)");
    }
    const SurrogateKind kind = parse_kind(args.kind);
    const std::uint64_t seed = args.seed_given ? args.seed : fresh_seed();

    const PricePanel raw = load_price_panel(args.input);
    const AlignResult aligned = align_panel(raw);
    print_align_report(aligned.report);
    const ReturnsPanel returns = log_returns(aligned.panel);

    int end_row = -1;
    for (Eigen::Index r = 0; r < returns.n_rows(); ++r) {
        if (returns.dates[static_cast<size_t>(r)] == args.at_date) {
            end_row = static_cast<int>(r);
            break;
        }
    }
    if (end_row < 0) {
        throw ValidationError("date " + args.at_date + " is not a return date of the panel");
    }
    const int start = end_row - args.window + 1;
    if (start < 0) {
        throw ValidationError("only " + std::to_string(end_row + 1) +
                              " return days end at " + args.at_date + ", need " +
                              std::to_string(args.window));
    }

    const NormalizedWindow w = normalize_window(returns, start, args.window);
    const MarketEmbedding emb = embed(distance_matrix(correlation_matrix(w)));
    const SurrogateEnsemble ens = build_ensemble(w, kind, args.surrogates, args.confidence, seed,
                                                 resolve_threads(args.threads));
    const EffectiveDimensionResult dim = effective_dimension(
        eigenvalue_spectrum(emb, static_cast<int>(aligned.panel.n_assets())), ens,
        args.confidence);
    write_spectrum_csv(dim, args.output);
    std::cout << "f = " << dim.f << " at confidence " << args.confidence << " (seed " << seed
              << "), spectrum written to " << args.output << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market geometry: rolling shape and kurtosis analysis of a price panel"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Rolling kurtosis analysis with crisis flags");
    analyze->add_option("--input", an.input, "Price panel (.csv or .json)")->required();
    analyze->add_option("--window", an.window, "Window length in return days")->required();
    analyze->add_option("--baseline", an.baseline, "Business-as-usual range START:END (inclusive)")
        ->required();
    analyze->add_option("--output", an.output_dir, "Output directory")->required();
    analyze->add_option("--f", an.f, "Subspace dimension")->capture_default_str();
    analyze->add_flag("--estimate-f", an.estimate_f,
                      "Estimate the subspace dimension from the baseline period");
    analyze->add_option("--alpha", an.alpha, "Flagging significance level")->capture_default_str();
    analyze->add_option("--step", an.step, "Days between window starts")->capture_default_str();
    auto* an_seed = analyze->add_option("--seed", an.seed, "RNG seed (fresh and recorded if absent)");
    analyze->add_option("--threads", an.threads, "Worker threads (0 = MG_THREADS or hardware)")->capture_default_str();
    analyze->add_option("--surrogates", an.surrogates, "Ensemble size for --estimate-f")->capture_default_str();
    analyze->add_option("--confidence", an.confidence, "Surrogate quantile for --estimate-f")->capture_default_str();
    analyze->add_option("--kind", an.kind, "Surrogate kind: permute or gaussian")->capture_default_str();
    analyze->add_flag("--one-sided", an.one_sided, "Flag only positive g excursions");
    analyze->add_flag("--dump-geometry", an.dump_geometry,
                      "Write per-window correlation/distance/embedding CSVs");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic price panel from a regime spec");
    synth->add_option("--spec", sy.spec_path, "Regime spec JSON")->required();
    synth->add_option("--output", sy.output, "Panel file to write (.csv or .json)")->required();

    SpectrumArgs sp;
    auto* spectrum =
        app.add_subcommand("spectrum", "Eigenvalue spectrum vs surrogates for one window");
    spectrum->add_option("--input", sp.input, "Price panel (.csv or .json)")->required();
    spectrum->add_option("--window", sp.window, "Window length in return days")->required();
    spectrum->add_option("--at", sp.at_date, "Window end date (a return date)")->required();
    spectrum->add_option("--surrogates", sp.surrogates, "Ensemble size")->capture_default_str();
    spectrum->add_option("--confidence", sp.confidence, "Rank-wise quantile")->capture_default_str();
    spectrum->add_option("--kind", sp.kind, "Surrogate kind: permute or gaussian")->capture_default_str();
    auto* sp_seed = spectrum->add_option("--seed", sp.seed, "RNG seed (fresh if absent)");
    spectrum->add_option("--threads", sp.threads, "Worker threads (0 = MG_THREADS or hardware)")->capture_default_str();
    spectrum->add_option("--output", sp.output, "Spectrum CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }

    try {
        an.seed_given = an_seed->count() > 0;
        sp.seed_given = sp_seed->count() > 0;
        if (analyze->parsed()) return run_analyze(an);
        if (synth->parsed()) return run_synth(sy);
        if (spectrum->parsed()) return run_spectrum(sp);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

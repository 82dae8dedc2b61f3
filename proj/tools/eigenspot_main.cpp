// eigenspot: spatiotemporal hotspot detection from baseline/cases count
// matrices, plus the simulation and threshold-sweep study harness.
//
// Exit codes for `detect`: 0 hotspots found, 1 clean null result, 2 error.
// Other subcommands: 0 success, 2 error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eigenspot/eigenspot.hpp"

namespace fs = std::filesystem;
using namespace eigenspot;

namespace {

constexpr int kExitFound = 0;
constexpr int kExitNoHotspot = 1;
constexpr int kExitError = 2;

Tail parse_tail(const std::string& s) {
    if (s == "two") return Tail::two_tailed;
    if (s == "left") return Tail::left_tailed;
    if (s == "right") return Tail::right_tailed;
    throw ConfigError("unknown tail '" + s + "' (expected two|left|right)");
}

Method parse_method(const std::string& s) {
    if (s == "eigenspot") return Method::eigenspot;
    if (s == "ratio") return Method::baseline_ratio;
    throw ConfigError("unknown method '" + s + "' (expected eigenspot|ratio)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

// "1..5" or "1,2,3"
std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> sizes;
    const auto range = s.find("..");
    if (range != std::string::npos) {
        const long lo = std::stol(s.substr(0, range));
        const long hi = std::stol(s.substr(range + 2));
        if (lo < 0 || hi < lo) throw ConfigError("bad size range '" + s + "'");
        for (long h = lo; h <= hi; ++h) sizes.push_back(static_cast<std::size_t>(h));
    } else {
        for (const auto& tok : split_list(s)) sizes.push_back(std::stoul(tok));
    }
    if (sizes.empty()) throw ConfigError("no sizes given");
    return sizes;
}

std::vector<double> parse_impacts(const std::string& s) {
    std::vector<double> impacts;
    for (const auto& tok : split_list(s)) impacts.push_back(std::stod(tok));
    if (impacts.empty()) throw ConfigError("no impacts given");
    return impacts;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::string verdict_file_name(std::size_t setting_index, std::size_t replicate) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "verdicts_s%02zu_r%04zu.csv", setting_index, replicate);
    return buf;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
    std::string baseline_path;
    std::string cases_path;
    double alpha = 0.05;
    std::string tail = "two";
    std::string method = "eigenspot";
    std::string out_path;
    std::string format = "json";
    bool fill_missing_zero = false;
    bool quiet = false;
};

int run_detect(const DetectArgs& args) {
    const CountMatrix baseline = io::read_matrix_csv(args.baseline_path, args.fill_missing_zero);
    const CountMatrix cases = io::read_matrix_csv(args.cases_path, args.fill_missing_zero);
    if (!baseline.same_shape(cases)) {
        throw ShapeMismatchError("baseline is " + std::to_string(baseline.n_regions()) + "x" +
                                 std::to_string(baseline.n_periods()) + " but cases is " +
                                 std::to_string(cases.n_regions()) + "x" +
                                 std::to_string(cases.n_periods()));
    }
    if (baseline.has_labels() && cases.has_labels() &&
        (baseline.region_labels() != cases.region_labels() ||
         baseline.period_labels() != cases.period_labels())) {
        std::cerr << "warning: baseline and cases labels differ; using baseline labels\n";
    }

    const Tail tail = parse_tail(args.tail);
    const Method method = parse_method(args.method);
    const HotspotReport report = method == Method::eigenspot
                                     ? detect_eigenspot(baseline, cases, args.alpha, tail)
                                     : detect_baseline_method(baseline, cases, args.alpha, tail);

    std::string payload;
    if (args.format == "json") {
        payload = io::report_to_json(report, baseline, io::digest_file(args.baseline_path),
                                     io::digest_file(args.cases_path))
                      .dump(2);
        payload += '\n';
    } else if (args.format == "csv") {
        std::ostringstream out;
        io::write_report_csv(out, report, baseline);
        payload = out.str();
    } else {
        throw ConfigError("unknown format '" + args.format + "' (expected json|csv)");
    }

    if (args.out_path.empty()) {
        std::cout << payload;
    } else {
        write_text_file(args.out_path, payload);
    }
    if (!args.quiet) {
        std::cerr << "method=" << to_string(report.method) << " alpha=" << report.alpha
                  << " tail=" << to_string(report.tail) << ": " << report.cells.size()
                  << " hotspot cell(s), " << report.spatial_components.size() << " spatial / "
                  << report.temporal_components.size() << " temporal component(s)\n";
    }
    return report.found() ? kExitFound : kExitNoHotspot;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::size_t regions = 32;
    std::size_t periods = 19;
    double impact = 1.0;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    double growth = 0.012;
    std::string origin = "random";
    std::string baseline = "synthetic";
    std::uint64_t baseline_seed = 1;
    bool per_region_lambda = false;
    std::string out_dir;
    bool quiet = false;
};

SimulationConfig config_from_args(const SimulateArgs& args) {
    SimulationConfig cfg;
    cfg.growth_rate = args.growth;
    cfg.hotspot_size = args.size;
    cfg.hotspot_impact = args.size > 0 ? args.impact : 1.0;
    cfg.seed = args.seed;
    cfg.per_region_lambda = args.per_region_lambda;
    cfg.synthetic.seed = args.baseline_seed;
    if (args.baseline == "synthetic") {
        cfg.n_regions = args.regions;
        cfg.n_periods = args.periods;
    } else {
        cfg.external_baseline = io::read_matrix_csv(args.baseline);
        cfg.n_regions = cfg.external_baseline->n_regions();
        cfg.n_periods = cfg.external_baseline->n_periods();
    }
    if (args.origin != "random") {
        const auto comma = args.origin.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("--origin expects R,T (zero-based) or 'random'");
        }
        cfg.hotspot_origin = Cell{std::stoul(args.origin.substr(0, comma)),
                                  std::stoul(args.origin.substr(comma + 1))};
    }
    return cfg;
}

void write_dataset(const fs::path& dir, const SimulatedDataset& ds) {
    fs::create_directories(dir);
    {
        std::ostringstream out;
        io::write_wide_csv(out, ds.baseline);
        write_text_file(dir / "baseline.csv", out.str());
    }
    {
        std::ostringstream out;
        io::write_wide_csv(out, ds.cases);
        write_text_file(dir / "cases.csv", out.str());
    }
    write_text_file(dir / "meta.json", io::dataset_meta_json(ds).dump(2) + "\n");
}

int run_simulate(const SimulateArgs& args) {
    if (args.out_dir.empty()) throw ConfigError("--out-dir is required");
    const SimulatedDataset ds = generate(config_from_args(args));
    write_dataset(args.out_dir, ds);
    if (!args.quiet) {
        std::cerr << "wrote " << args.out_dir << ": " << ds.cases.n_regions() << "x"
                  << ds.cases.n_periods() << " grid, " << ds.injection_mask.count()
                  << " injected cell(s), lambda=" << ds.lambda_hat << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct StudyArgs {
    std::string sizes = "1..5";
    std::string impacts = "1.5,2,2.5";
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    std::string methods = "eigenspot,ratio";
    double z_lo = 1.28;
    double z_hi = 3.00;
    double z_step = 0.01;
    std::string tail = "two";
    std::size_t regions = 32;
    std::size_t periods = 19;
    double growth = 0.012;
    std::string baseline = "synthetic";
    std::uint64_t baseline_seed = 1;
    std::string out_dir;
    std::string external_verdicts;
    bool dump_datasets = false;
    bool quiet = false;
};

int run_study(const StudyArgs& args) {
    if (args.out_dir.empty()) throw ConfigError("--out-dir is required");

    StudyConfig cfg;
    for (const double impact : parse_impacts(args.impacts)) {
        for (const std::size_t size : parse_sizes(args.sizes)) {
            cfg.settings.push_back({size, impact});
        }
    }
    cfg.replicates = args.replicates;
    cfg.master_seed = args.seed;
    cfg.methods.clear();
    if (!args.methods.empty()) {
        for (const auto& tok : split_list(args.methods)) cfg.methods.push_back(parse_method(tok));
    }
    cfg.sweep.z_lo = args.z_lo;
    cfg.sweep.z_hi = args.z_hi;
    cfg.sweep.z_step = args.z_step;
    cfg.sweep.tail = parse_tail(args.tail);

    cfg.base.growth_rate = args.growth;
    cfg.base.synthetic.seed = args.baseline_seed;
    if (args.baseline == "synthetic") {
        cfg.base.n_regions = args.regions;
        cfg.base.n_periods = args.periods;
    } else {
        cfg.base.external_baseline = io::read_matrix_csv(args.baseline);
        cfg.base.n_regions = cfg.base.external_baseline->n_regions();
        cfg.base.n_periods = cfg.base.external_baseline->n_periods();
    }

    // labels shared by every dataset of the study, for verdict validation
    const CountMatrix label_grid =
        cfg.base.external_baseline
            ? *cfg.base.external_baseline
            : synthesize_baseline(cfg.base.n_regions, cfg.base.n_periods, cfg.base.growth_rate,
                                  cfg.base.synthetic.seed);

    if (!args.external_verdicts.empty()) {
        const fs::path dir = args.external_verdicts;
        cfg.external_verdicts = [dir, &label_grid](std::size_t si, std::size_t r) {
            return io::read_verdict_csv(dir / verdict_file_name(si, r), label_grid);
        };
    }

    if (args.dump_datasets) {
        for (std::size_t si = 0; si < cfg.settings.size(); ++si) {
            for (std::size_t r = 0; r < cfg.replicates; ++r) {
                char name[32];
                std::snprintf(name, sizeof(name), "s%02zu_r%04zu", si, r);
                write_dataset(fs::path(args.out_dir) / "datasets" / name,
                              generate(study_replicate_config(cfg, cfg.settings[si], r)));
            }
        }
    }

    std::function<void(std::size_t, std::size_t)> progress;
    if (!args.quiet) {
        progress = [](std::size_t done, std::size_t total) {
            if (done % 50 == 0 || done == total) {
                std::cerr << "\rdatasets " << done << "/" << total << std::flush;
                if (done == total) std::cerr << "\n";
            }
        };
    }

    const auto rows = eigenspot::run_study(cfg, progress);

    fs::create_directories(args.out_dir);
    {
        std::ostringstream out;
        io::write_study_table_csv(out, rows);
        write_text_file(fs::path(args.out_dir) / "table.csv", out.str());
    }
    write_text_file(fs::path(args.out_dir) / "detail.json",
                    io::study_detail_json(cfg, rows).dump() + "\n");
    if (!args.quiet) {
        std::cerr << "wrote " << (fs::path(args.out_dir) / "table.csv").string() << " and "
                  << (fs::path(args.out_dir) / "detail.json").string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EigenSpot spatiotemporal hotspot detection"};
    app.require_subcommand(1);

    DetectArgs detect_args;
    auto* detect = app.add_subcommand(
        "detect", "Detect hotspots in a cases matrix relative to a baseline matrix");
    detect->add_option("--baseline", detect_args.baseline_path, "Baseline CSV (wide or long)")
        ->required();
    detect->add_option("--cases", detect_args.cases_path, "Cases CSV (wide or long)")->required();
    detect->add_option("--alpha", detect_args.alpha, "Significance level (default 0.05)");
    detect->add_option("--tail", detect_args.tail, "Tail: two|left|right (default two)");
    detect->add_option("--method", detect_args.method, "Method: eigenspot|ratio");
    detect->add_option("--out", detect_args.out_path, "Report path (default: stdout)");
    detect->add_option("--format", detect_args.format, "Report format: json|csv");
    detect->add_flag("--fill-missing-zero", detect_args.fill_missing_zero,
                     "Treat absent long-CSV cells as zero");
    detect->add_flag("--quiet", detect_args.quiet, "Suppress progress lines");

    SimulateArgs sim_args;
    auto* simulate =
        app.add_subcommand("simulate", "Generate a semi-realistic baseline/cases dataset");
    simulate->add_option("--regions", sim_args.regions, "Spatial dimension (synthetic baseline)");
    simulate->add_option("--periods", sim_args.periods, "Temporal dimension (synthetic baseline)");
    simulate->add_option("--impact", sim_args.impact, "Hotspot impact multiplier I >= 1");
    simulate->add_option("--size", sim_args.size, "Hotspot window side H (0 = none)");
    simulate->add_option("--seed", sim_args.seed, "Case-draw RNG seed")->required();
    simulate->add_option("--growth", sim_args.growth, "Per-period growth rate (default 0.012)");
    simulate->add_option("--origin", sim_args.origin,
                         "Window origin 'R,T' (zero-based) or 'random'");
    simulate->add_option("--baseline", sim_args.baseline,
                         "'synthetic' or path to an external baseline CSV");
    simulate->add_option("--baseline-seed", sim_args.baseline_seed,
                         "Synthetic baseline seed (default 1)");
    simulate->add_flag("--per-region-lambda", sim_args.per_region_lambda,
                       "Region-specific Poisson rates from first-period counts");
    simulate->add_option("--out-dir", sim_args.out_dir,
                         "Output directory for baseline.csv, cases.csv, meta.json")
        ->required();
    simulate->add_flag("--quiet", sim_args.quiet, "Suppress progress lines");

    StudyArgs study_args;
    auto* study = app.add_subcommand(
        "study", "Threshold-swept accuracy study over simulated hotspot settings");
    study->add_option("--sizes", study_args.sizes, "Hotspot sizes: '1..5' or '1,3,5'");
    study->add_option("--impacts", study_args.impacts, "Hotspot impacts: '1.5,2,2.5'");
    study->add_option("--replicates", study_args.replicates, "Datasets per setting");
    study->add_option("--seed", study_args.seed, "Master seed for replicate streams");
    study->add_option("--methods", study_args.methods,
                      "Comma list of eigenspot|ratio (may be empty with --external-verdicts)");
    study->add_option("--z-lo", study_args.z_lo, "Sweep start z-score (default 1.28)");
    study->add_option("--z-hi", study_args.z_hi, "Sweep end z-score (default 3.0)");
    study->add_option("--z-step", study_args.z_step, "Sweep z increment (default 0.01)");
    study->add_option("--tail", study_args.tail, "Detection tail: two|left|right");
    study->add_option("--regions", study_args.regions, "Grid regions (synthetic baseline)");
    study->add_option("--periods", study_args.periods, "Grid periods (synthetic baseline)");
    study->add_option("--growth", study_args.growth, "Per-period growth rate");
    study->add_option("--baseline", study_args.baseline,
                      "'synthetic' or path to an external baseline CSV");
    study->add_option("--baseline-seed", study_args.baseline_seed, "Synthetic baseline seed");
    study->add_option("--out-dir", study_args.out_dir, "Output directory")->required();
    study->add_option("--external-verdicts", study_args.external_verdicts,
                      "Directory of per-dataset verdict files verdicts_sSS_rRRRR.csv "
                      "(region,period,flag), scored as method 'external'");
    study->add_flag("--dump-datasets", study_args.dump_datasets,
                    "Also write every generated dataset under <out-dir>/datasets/");
    study->add_flag("--quiet", study_args.quiet, "Suppress progress lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*detect) return run_detect(detect_args);
        if (*simulate) return run_simulate(sim_args);
        if (*study) return run_study(study_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

// Command-line front end: discover a causal graph from a CSV of time series,
// simulate the benchmark generators, or run the scoring harness.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causent/causent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInsufficient = 3;
constexpr int kExitInternal = 4;

struct CommonFlags {
    causent::EstimatorConfig cfg;
    int threads = 0;
    bool alpha_set = false;
    std::string config_path;
};

// Simple key=value file; '#' starts a comment. An explicit flag or an
// environment variable wins over the file.
void apply_config_file(CLI::App* cmd, CommonFlags& flags) {
    if (flags.config_path.empty()) return;
    std::ifstream in(flags.config_path);
    if (!in)
        throw causent::InvalidArgumentError("cannot open config file: " + flags.config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw causent::InvalidArgumentError(flags.config_path + ":" +
                                                std::to_string(lineno) + ": expected key=value");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw causent::InvalidArgumentError(flags.config_path + ":" +
                                                std::to_string(lineno) + ": unknown key '" +
                                                key + "'");
        if (opt->count() > 0) continue;  // flag or env var takes precedence
        try {
            if (key == "gamma") flags.cfg.gamma = std::stoi(value);
            else if (key == "k") flags.cfg.k = std::stoi(value);
            else if (key == "k-perm") flags.cfg.k_perm = std::stoi(value);
            else if (key == "n-perm") flags.cfg.n_perm = std::stoi(value);
            else if (key == "alpha") { flags.cfg.alpha = std::stod(value); flags.alpha_set = true; }
            else if (key == "max-level") flags.cfg.max_level = std::stoi(value);
            else if (key == "seed") flags.cfg.seed = std::stoull(value);
            else if (key == "threads") flags.threads = std::stoi(value);
            else
                throw causent::InvalidArgumentError(flags.config_path + ":" +
                                                    std::to_string(lineno) + ": key '" + key +
                                                    "' is not configurable from a file");
        } catch (const std::invalid_argument&) {
            throw causent::InvalidArgumentError(flags.config_path + ":" +
                                                std::to_string(lineno) + ": bad value '" +
                                                value + "' for " + key);
        }
    }
}

void add_estimator_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--gamma", flags.cfg.gamma, "Maximum lag of the past window")
        ->envname("CAUSENT_GAMMA")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--k", flags.cfg.k, "kNN neighbor count")
        ->envname("CAUSENT_K")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--k-perm", flags.cfg.k_perm, "Local permutation neighborhood size")
        ->envname("CAUSENT_K_PERM")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-perm", flags.cfg.n_perm, "Permutation count")
        ->envname("CAUSENT_N_PERM")
        ->check(CLI::PositiveNumber);
    auto* alpha = cmd->add_option("--alpha", flags.cfg.alpha,
                                  "Significance level (default 0.05 pcgce, 0.1 fcigce)")
                      ->envname("CAUSENT_ALPHA")
                      ->check(CLI::Range(0.0, 1.0));
    cmd->callback([&flags, alpha] { flags.alpha_set = flags.alpha_set || alpha->count() > 0; });
    cmd->add_option("--max-level", flags.cfg.max_level,
                    "Cap on the conditioning-set size (negative: unlimited)")
        ->envname("CAUSENT_MAX_LEVEL");
    cmd->add_option("--seed", flags.cfg.seed, "RNG seed")->envname("CAUSENT_SEED");
    cmd->add_option("--threads", flags.threads, "Worker threads (0: all cores)")
        ->envname("CAUSENT_THREADS");
    cmd->add_option("--config", flags.config_path, "Read estimator options from a key=value file")
        ->envname("CAUSENT_CONFIG");
    cmd->parse_complete_callback([cmd, &flags] { apply_config_file(cmd, flags); });
}

void apply_threads(int threads) {
    if (threads > 0) causent::ThreadPool::global().resize(threads);
}

void write_graph(const causent::ExtendedSummaryGraph& g, const std::string& path,
                 const std::string& format) {
    std::ofstream out(path);
    if (!out) throw causent::InvalidArgumentError("cannot open output file: " + path);
    if (format == "dot")
        causent::to_dot(g, out);
    else
        out << causent::to_json(g).dump(2) << '\n';
}

int run_discover(const std::string& input, const std::string& output,
                 const std::string& format, const std::string& algorithm,
                 const std::string& scoring, const std::string& testlog_path,
                 CommonFlags& flags) {
    (void)scoring;
    apply_threads(flags.threads);
    causent::EstimatorConfig cfg = flags.cfg;
    if (!flags.alpha_set) cfg.alpha = algorithm == "fcigce" ? 0.1 : 0.05;

    causent::TimeSeriesDataset data = causent::TimeSeriesDataset::from_csv_file(input);
    if (data.num_series() < 2)
        throw causent::CsvParseError("need at least 2 series, got " +
                                     std::to_string(data.num_series()));
    if (data.length() < static_cast<std::size_t>(cfg.gamma) + 50)
        throw causent::InsufficientDataError(
            "need at least gamma+50 = " + std::to_string(cfg.gamma + 50) + " rows, got " +
            std::to_string(data.length()));

    auto start = std::chrono::steady_clock::now();
    causent::ExtendedSummaryGraph graph;
    causent::TestLog log;
    if (algorithm == "fcigce") {
        causent::FcigceResult res = causent::fcigce(data, cfg);
        graph = std::move(res.graph);
        log = std::move(res.log);
    } else {
        causent::PcgceResult res = causent::pcgce(data, cfg);
        graph = std::move(res.graph);
        log = std::move(res.log);
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_graph(graph, output, format);
    if (!testlog_path.empty()) {
        std::ofstream tl(testlog_path);
        log.to_csv(tl, data.names());
    }

    std::cout << algorithm << ": " << graph.edge_count() << " edges, " << log.total_tests
              << " independence tests, " << seconds << " s\n";
    for (const auto& e : graph.edges()) {
        const char* left = e.mark_a == causent::Mark::Arrow
                               ? "<"
                               : (e.mark_a == causent::Mark::Circle ? "o" : "-");
        const char* right = e.mark_b == causent::Mark::Arrow
                                ? ">"
                                : (e.mark_b == causent::Mark::Circle ? "o" : "-");
        std::cout << "  " << graph.label(e.a) << ' ' << left << "--" << right << ' '
                  << graph.label(e.b) << '\n';
    }
    std::cout << "wrote " << output << '\n';
    return kExitOk;
}

int run_simulate(const std::string& structure, std::size_t T, std::uint64_t seed,
                 const std::string& out_dir) {
    causent::StructureId id = causent::structure_from_string(structure);
    auto [data, truth] = causent::generate(id, T, seed);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/data.csv");
        data.to_csv(out);
    }
    {
        std::ofstream out(out_dir + "/truth.json");
        out << causent::to_json(truth.graph).dump(2) << '\n';
    }
    {
        nlohmann::json meta;
        meta["structure"] = causent::to_string(id);
        meta["seed"] = truth.meta.seed;
        meta["T"] = truth.meta.T;
        meta["attempts"] = truth.meta.attempts;
        meta["hidden_series"] = truth.hidden_series;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : truth.meta.edges) {
            edges.push_back({{"cause", e.cause},
                             {"effect", e.effect},
                             {"lag", e.lag},
                             {"coef", e.coef},
                             {"fn", causent::to_string(e.fn)}});
        }
        meta["edges"] = edges;
        nlohmann::json selfs = nlohmann::json::array();
        for (const auto& s : truth.meta.self)
            selfs.push_back({{"series", s.series}, {"coef", s.coef}});
        meta["self"] = selfs;
        std::ofstream out(out_dir + "/meta.json");
        out << meta.dump(2) << '\n';
    }
    std::cout << "wrote " << out_dir << "/data.csv, truth.json, meta.json\n";
    return kExitOk;
}

int run_bench(const std::vector<std::string>& structures, int n, std::size_t T,
              const std::string& out_prefix, const std::string& scoring, CommonFlags& flags) {
    apply_threads(flags.threads);
    std::vector<causent::StructureId> ids;
    for (const auto& s : structures) {
        if (s == "all") {
            ids = causent::all_structures();
            break;
        }
        ids.push_back(causent::structure_from_string(s));
    }
    causent::BenchmarkOptions opts;
    opts.n_datasets = n;
    opts.T = T;
    opts.cfg = flags.cfg;
    opts.alpha_overridden = flags.alpha_set;
    opts.mode = scoring == "strict" ? causent::ScoringMode::Strict
                                    : causent::ScoringMode::Compatible;
    std::vector<causent::BenchmarkRow> rows = causent::run_benchmark(ids, opts);

    causent::report_markdown(rows, std::cout);
    {
        std::ofstream md(out_prefix + ".md");
        causent::report_markdown(rows, md);
    }
    {
        std::ofstream csv(out_prefix + ".csv");
        causent::report_csv(rows, csv);
    }
    std::cout << "wrote " << out_prefix << ".md and " << out_prefix << ".csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extended summary causal graph discovery from time series"};
    app.require_subcommand(1);

    CommonFlags flags;

    // discover
    std::string input, output = "graph.json", format = "json", algorithm = "pcgce";
    std::string scoring = "compatible", testlog_path;
    CLI::App* discover = app.add_subcommand("discover", "Run PCGCE or FCIGCE on a CSV");
    discover->add_option("input", input, "Input CSV (header row, one column per series)")
        ->required();
    discover->add_option("--algorithm", algorithm, "pcgce or fcigce")
        ->envname("CAUSENT_ALGORITHM")
        ->check(CLI::IsMember({"pcgce", "fcigce"}));
    discover->add_option("--output", output, "Output graph file")->envname("CAUSENT_OUTPUT");
    discover->add_option("--format", format, "Output format")
        ->envname("CAUSENT_FORMAT")
        ->check(CLI::IsMember({"json", "dot"}));
    discover->add_option("--scoring", scoring, "Mark-compatibility mode used by bench")
        ->envname("CAUSENT_SCORING")
        ->check(CLI::IsMember({"compatible", "strict"}));
    discover->add_option("--testlog", testlog_path, "Write the independence-test log as CSV")
        ->envname("CAUSENT_TESTLOG");
    add_estimator_flags(discover, flags);

    // simulate
    std::string sim_structure, sim_out = ".";
    std::size_t sim_T = 1000;
    std::uint64_t sim_seed = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate benchmark data");
    simulate->add_option("structure", sim_structure,
                         "ring4ts_t0 | fourts_tpos | ring4ts_tpos | seven2h_tpos | "
                         "ring7t2h_tpos")
        ->required();
    simulate->add_option("T", sim_T, "Series length")->required();
    simulate->add_option("seed", sim_seed, "RNG seed");
    simulate->add_option("out_dir", sim_out, "Output directory");

    // bench
    std::vector<std::string> bench_structures{"all"};
    int bench_n = 10;
    std::size_t bench_T = 1000;
    std::string bench_out = "report";
    CLI::App* bench = app.add_subcommand("bench", "Score discovery against ground truth");
    bench->add_option("--structures", bench_structures, "Structure ids or 'all'")
        ->envname("CAUSENT_STRUCTURES")
        ->delimiter(',');
    bench->add_option("--n", bench_n, "Datasets per structure")->envname("CAUSENT_N");
    bench->add_option("--T", bench_T, "Series length")->envname("CAUSENT_T");
    bench->add_option("--out", bench_out, "Report path prefix")->envname("CAUSENT_OUT");
    bench->add_option("--scoring", scoring, "compatible or strict")
        ->envname("CAUSENT_SCORING")
        ->check(CLI::IsMember({"compatible", "strict"}));
    add_estimator_flags(bench, flags);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? kExitOk : kExitUsage;
        }
        if (discover->parsed())
            return run_discover(input, output, format, algorithm, scoring, testlog_path, flags);
        if (simulate->parsed()) return run_simulate(sim_structure, sim_T, sim_seed, sim_out);
        if (bench->parsed())
            return run_bench(bench_structures, bench_n, bench_T, bench_out, scoring, flags);
    } catch (const causent::CsvParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const causent::InvalidConditionerError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const causent::InvalidArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const causent::InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

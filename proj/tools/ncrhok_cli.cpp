#include <algorithm>
#include <cstdint>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ncrhok/controllability.hpp"
#include "ncrhok/errors.hpp"
#include "ncrhok/graph.hpp"
#include "ncrhok/models.hpp"
#include "ncrhok/netgen.hpp"
#include "ncrhok/params.hpp"
#include "ncrhok/pipeline.hpp"
#include "ncrhok/rng.hpp"

namespace fs = std::filesystem;
using namespace ncrhok;

namespace {

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/** NCRHOK_SEED fills in for --seed when neither the flag nor a config file set it. */
std::uint64_t effective_seed(const CLI::Option* opt, std::uint64_t parsed) {
    if (opt->count() > 0) return parsed;
    const char* env = std::getenv("NCRHOK_SEED");
    if (!env) return parsed;
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("NCRHOK_SEED is not an unsigned integer: '") + env + "'");
    }
}

/** Per-graph generation seeds, derived so each file has its own stream. */
std::uint64_t graph_seed(std::uint64_t base, int index) {
    return Rng::derive(base, static_cast<std::uint64_t>(index)).next_u64();
}

void write_graphs_manifest(const std::vector<GenSpec>& specs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write manifest '" + path + "'");
    out << "format=ncrhok-graphs\n";
    out << "version=1\n";
    out << "count=" << specs.size() << '\n';
    for (std::size_t i = 0; i < specs.size(); ++i)
        out << "record." << i << '=' << specs[i].to_manifest() << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::vector<GenSpec> read_graphs_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open manifest '" + path + "'");
    std::string line;
    int count = -1;
    std::vector<GenSpec> specs;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "format") {
            if (val != "ncrhok-graphs")
                throw InputError(path + ": not a graphs manifest (format=" + val + ")");
        } else if (key == "version") {
            if (val != "1") throw InputError(path + ": unsupported version " + val);
        } else if (key == "count") {
            count = std::stoi(val);
        } else if (key.rfind("record.", 0) == 0) {
            specs.push_back(GenSpec::from_manifest(val));
        } else {
            throw InputError(path + ": unknown key '" + key + "'");
        }
    }
    if (count != static_cast<int>(specs.size()))
        throw InputError(path + ": count=" + std::to_string(count) + " but " +
                         std::to_string(specs.size()) + " record lines");
    if (specs.empty()) throw InputError(path + ": no graphs listed");
    return specs;
}

std::string graph_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d.edges", index);
    return buf;
}

/** Flat key=value option files; blank lines and #/; comments are ignored. */
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    auto trim = [](const std::string& s) {
        const auto a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return std::string();
        return s.substr(a, s.find_last_not_of(" \t") - a + 1);
    };
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty())
            throw InputError(path + ":" + std::to_string(line_no) + ": empty key");
        std::string val = trim(t.substr(eq + 1));
        if (val.size() >= 2 && ((val.front() == '"' && val.back() == '"') ||
                                (val.front() == '\'' && val.back() == '\'')))
            val = val.substr(1, val.size() - 2);
        pairs.emplace_back(std::move(key), std::move(val));
    }
    return pairs;
}

/**
 * Expands `--config file` into the matching long options, inserted right after
 * the subcommand name.  Keys given explicitly on the command line are skipped,
 * so flags always win over file values.
 */
std::vector<std::string> overlay_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (sub_pos == args.size()) {
            if (!a.empty() && a[0] != '-') sub_pos = i;
            continue;
        }
        if (a == "--config") {
            if (i + 1 >= args.size()) return args;  // parser reports the missing value
            config_path = args[i + 1];
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        }
    }
    if (config_path.empty() || sub_pos == args.size()) return args;

    std::set<std::string> given;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) continue;
        const auto eq = a.find('=');
        given.insert(eq == std::string::npos ? a.substr(2) : a.substr(2, eq - 2));
    }

    std::vector<std::string> merged(args.begin(), args.begin() + sub_pos + 1);
    for (const auto& [key, val] : read_flat_config(config_path)) {
        if (key == "config" || given.count(key)) continue;
        merged.push_back("--" + key + "=" + val);
    }
    merged.insert(merged.end(), args.begin() + sub_pos + 1, args.end());
    return merged;
}

/** Writes curve rows to a file, or to stdout when the path is "-". */
void emit_curves(const std::vector<CurveRow>& rows, const std::string& out) {
    if (out != "-") {
        save_curves_csv(out, rows);
        return;
    }
    const auto tmp = fs::temp_directory_path() / ("ncrhok_stdout_" +
                                                  std::to_string(::getpid()) + ".csv");
    save_curves_csv(tmp.string(), rows);
    std::ifstream in(tmp);
    std::cout << in.rdbuf();
    std::cout.flush();
    fs::remove(tmp);
}

void emit_eval(const pipeline::EvalReport& report, const std::string& out) {
    if (out != "-") {
        pipeline::save_eval_csv(report, out);
        return;
    }
    const auto tmp = fs::temp_directory_path() / ("ncrhok_stdout_" +
                                                  std::to_string(::getpid()) + ".csv");
    pipeline::save_eval_csv(report, tmp.string());
    std::ifstream in(tmp);
    std::cout << in.rdbuf();
    std::cout.flush();
    fs::remove(tmp);
}

struct CommonTrainFlags {
    pipeline::TrainConfig cfg;
    bool no_bc = false;
    CLI::Option* seed_opt = nullptr;

    void attach(CLI::App* cmd, bool curve_model) {
        cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
        cmd->add_option("--lr", cfg.lr, "Adam learning rate")->capture_default_str();
        cmd->add_option("--lr-decay", cfg.lr_decay, "Learning-rate multiplier per decay step")
            ->capture_default_str();
        cmd->add_option("--decay-every", cfg.decay_every, "Epochs between decay steps")
            ->capture_default_str();
        cmd->add_option("--l2", cfg.l2, "Decoupled weight decay")->capture_default_str();
        cmd->add_option("--clip", cfg.clip, "Global gradient-norm ceiling (0 disables)")
            ->capture_default_str();
        cmd->add_option("--batch", cfg.batch_size, "Graphs per gradient-accumulation batch")
            ->capture_default_str();
        seed_opt = cmd->add_option("--seed", cfg.seed,
                                   "Initialization and shuffling seed (or NCRHOK_SEED)");
        if (curve_model) {
            cmd->add_option("--val-fraction", cfg.val_fraction,
                            "Fraction of records held out for validation")
                ->capture_default_str();
            cmd->add_option("--k-hop", cfg.k_hop, "Hop radius of the first hypergraph")
                ->capture_default_str();
            cmd->add_option("--k-nn", cfg.k_nn, "Neighbor count of the second hypergraph")
                ->capture_default_str();
            cmd->add_option("--d-feat", cfg.d_feat, "Per-channel encoder width")
                ->capture_default_str();
            cmd->add_option("--d-model", cfg.d_model, "Embedding width")->capture_default_str();
            cmd->add_option("--mlp-hidden", cfg.mlp_hidden, "Readout hidden width")
                ->capture_default_str();
            cmd->add_flag("--no-bc", no_bc, "Drop the betweenness input feature");
            cmd->add_option("--hgnn-branches", cfg.hgnn_branches,
                            "Hypergraph streams: 2 = k-hop + k-NN, 1 = k-hop, 0 = none")
                ->capture_default_str();
        }
    }
};

struct GenerateCmd {
    std::string topology = "er";
    int n = 0;
    double k_avg = 0.0;
    int count = 1;
    std::uint64_t seed = 0;
    double sf_beta = 0.999;
    double sf_theta = 1.0;
    int qsn_rq = 1;
    std::string out;
    CLI::Option* seed_opt = nullptr;

    void run() {
        if (count < 1) throw InputError("--count must be positive");
        GenSpec base;
        base.topology = topology_from_string(topology);
        base.n = n;
        base.k_avg = k_avg;
        base.sf_beta = sf_beta;
        base.sf_theta = sf_theta;
        base.qsn_rq = qsn_rq;

        std::vector<GenSpec> specs;
        for (int i = 0; i < count; ++i) {
            GenSpec spec = base;
            spec.seed = graph_seed(seed, i);
            specs.push_back(spec);
        }

        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw InputError("cannot create directory '" + out + "': " + ec.message());
        for (int i = 0; i < count; ++i) {
            const DirectedGraph g = generate(specs[static_cast<std::size_t>(i)]);
            save_edge_list(g, (fs::path(out) / graph_filename(i)).string());
        }
        write_graphs_manifest(specs, (fs::path(out) / "manifest.txt").string());
        std::cerr << "wrote " << count << " graphs to " << out << "\n";
    }
};

struct SimulateCmd {
    std::string in;
    std::string attack = "ra";
    bool static_ranking = false;
    std::uint64_t seed = 0;
    std::uint64_t shuffle_seed = 0;
    int repeats = 1;
    bool bc_labels = false;
    int threads = default_threads();
    std::string out;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* shuffle_opt = nullptr;

    void run() {
        AttackSpec spec;
        spec.kind = attack_from_string(attack);
        spec.recompute = !static_ranking;
        spec.seed = seed;
        spec.repeats = repeats;

        if (fs::is_directory(in)) {
            const auto specs = read_graphs_manifest((fs::path(in) / "manifest.txt").string());
            const std::uint64_t shuffle = shuffle_opt->count() ? shuffle_seed : seed;
            const pipeline::Dataset ds =
                pipeline::build_dataset(specs, spec, shuffle, bc_labels, threads);
            pipeline::save_dataset(ds, out);
            std::cerr << "simulated " << ds.size() << " curves into " << out << "\n";
            return;
        }

        const DirectedGraph g = load_edge_list(in);
        const RobustnessCurve curve = simulate_attack(g, spec);
        emit_curves({{ "attack=" + attack + " seed=" + std::to_string(seed) + " graph=" + in,
                       curve.values }},
                    out);
        if (out != "-") std::cerr << "wrote curve to " << out << "\n";
    }
};

struct PretrainCmd {
    std::string data;
    std::string out;
    std::string log;
    CommonTrainFlags flags;

    void run() {
        const pipeline::Dataset ds = pipeline::load_dataset(data);
        pipeline::TrainResult result = pipeline::pretrain_bc_gat(ds, flags.cfg);
        result.params.save(out);
        if (!log.empty()) result.log.save_csv(log);
        if (!result.log.rows.empty())
            std::cerr << "final epoch mean loss "
                      << result.log.epoch_mean_loss(flags.cfg.epochs - 1) << "\n";
        std::cerr << "wrote surrogate parameters to " << out << "\n";
    }
};

struct TrainCmd {
    std::string data;
    std::string bc;
    std::string out;
    std::string log;
    CommonTrainFlags flags;

    void run() {
        flags.cfg.use_bc = !flags.no_bc;
        const pipeline::Dataset ds = pipeline::load_dataset(data);
        ad::ParamStore bc_store;
        const bool have_bc = !bc.empty();
        if (have_bc) bc_store = ad::ParamStore::load(bc);
        pipeline::TrainResult result =
            pipeline::train_ncr_hok(ds, have_bc ? &bc_store : nullptr, flags.cfg);
        result.params.save(out);
        if (!log.empty()) result.log.save_csv(log);
        if (!std::isnan(result.best_val_er))
            std::cerr << "best validation error " << result.best_val_er << "\n";
        std::cerr << "wrote model parameters to " << out << "\n";
    }
};

struct PredictCmd {
    std::string graph;
    std::string model;
    std::string bc;
    std::string out;

    void run() {
        const DirectedGraph g = load_edge_list(graph);
        const ad::ParamStore store = ad::ParamStore::load(model);
        const model::NcrHokParams params = model::ncr_hok_from_store(store);
        model::BcGatParams bc_params;
        const model::BcGatParams* bc_ptr = nullptr;
        if (params.cfg.use_bc) {
            if (bc.empty())
                throw InputError("the model uses the betweenness feature; pass --bc");
            bc_params = model::bc_gat_from_store(ad::ParamStore::load(bc));
            bc_ptr = &bc_params;
        }
        const auto curve = model::ncr_hok_forward(g, bc_ptr, params, nullptr).value();
        emit_curves({{"graph=" + graph + " model=" + model, curve}}, out);
        if (out != "-") std::cerr << "wrote prediction to " << out << "\n";
    }
};

struct EvalCmd {
    std::string data;
    std::string model;
    std::string bc;
    std::string pred;
    int threads = default_threads();
    std::string out;

    void run() {
        const pipeline::Dataset ds = pipeline::load_dataset(data);
        pipeline::EvalReport report;
        if (!pred.empty()) {
            if (!model.empty())
                throw InputError("--model and --pred are mutually exclusive");
            const auto rows = load_curves_csv(pred);
            std::vector<RobustnessCurve> curves;
            curves.reserve(rows.size());
            for (const auto& row : rows) curves.push_back({row.values});
            report = pipeline::evaluate_predictions(ds, std::move(curves));
        } else {
            if (model.empty()) throw InputError("pass --model or --pred");
            const ad::ParamStore store = ad::ParamStore::load(model);
            ad::ParamStore bc_store;
            const bool have_bc = !bc.empty();
            if (have_bc) bc_store = ad::ParamStore::load(bc);
            report = pipeline::evaluate(store, have_bc ? &bc_store : nullptr, ds, threads);
        }
        emit_eval(report, out);
        std::cerr << "overall er " << report.bundle.er_mean << " sigma "
                  << report.bundle.sigma_mean << " over " << ds.size() << " curves\n";
    }
};

struct BenchCmd {
    std::string topology = "er";
    int n = 100;
    double k_avg = 5.0;
    int count = 4;
    std::uint64_t seed = 0;
    std::string attack = "ra";
    bool static_ranking = false;
    int repeats = 1;
    int runs = 5;
    std::string model;
    std::string bc;
    CLI::Option* seed_opt = nullptr;

    void run() {
        if (count < 1) throw InputError("--count must be positive");
        GenSpec spec;
        spec.topology = topology_from_string(topology);
        spec.n = n;
        spec.k_avg = k_avg;
        std::vector<DirectedGraph> graphs;
        for (int i = 0; i < count; ++i) {
            spec.seed = graph_seed(seed, i);
            graphs.push_back(generate(spec));
        }

        AttackSpec a;
        a.kind = attack_from_string(attack);
        a.recompute = !static_ranking;
        a.seed = seed;
        a.repeats = repeats;

        ad::ParamStore model_store, bc_store;
        const bool have_model = !model.empty();
        if (have_model) model_store = ad::ParamStore::load(model);
        const bool have_bc = !bc.empty();
        if (have_bc) bc_store = ad::ParamStore::load(bc);

        const pipeline::BenchReport report =
            pipeline::benchmark_runtime(graphs, have_model ? &model_store : nullptr,
                                        have_bc ? &bc_store : nullptr, a, runs);
        std::cout << report.format();
        std::cout.flush();
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact controllability-robustness curves and a learned curve predictor"};
    app.name("ncrhok");
    app.require_subcommand(1);
    std::string config_file;

    GenerateCmd gen;
    auto* cmd_gen = app.add_subcommand("generate", "Generate random graphs as edge lists");
    cmd_gen->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_gen->add_option("--topology", gen.topology, "er, sf, qsn or sw")->capture_default_str();
    cmd_gen->add_option("--n", gen.n, "Nodes per graph")->required();
    cmd_gen->add_option("--k-avg", gen.k_avg, "Average out-degree")->required();
    cmd_gen->add_option("--count", gen.count, "Number of graphs")->capture_default_str();
    gen.seed_opt = cmd_gen->add_option("--seed", gen.seed, "Base seed (or NCRHOK_SEED)");
    cmd_gen->add_option("--sf-beta", gen.sf_beta, "Scale-free weight exponent")
        ->capture_default_str();
    cmd_gen->add_option("--sf-theta", gen.sf_theta, "Scale-free weight offset")
        ->capture_default_str();
    cmd_gen->add_option("--qsn-rq", gen.qsn_rq, "Snapback stride")->capture_default_str();
    cmd_gen->add_option("--out", gen.out, "Output directory")->required();

    SimulateCmd sim;
    auto* cmd_sim = app.add_subcommand("simulate",
                                       "Simulate attack curves for a graph or a graph directory");
    cmd_sim->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_sim->add_option("--in", sim.in, "Edge-list file, or a directory written by generate")
        ->required();
    cmd_sim->add_option("--attack", sim.attack, "ra, tda or tba")->capture_default_str();
    cmd_sim->add_flag("--static-ranking", sim.static_ranking,
                      "Rank targets once instead of after every removal");
    sim.seed_opt = cmd_sim->add_option("--seed", sim.seed, "Attack seed (or NCRHOK_SEED)");
    sim.shuffle_opt = cmd_sim->add_option("--shuffle-seed", sim.shuffle_seed,
                                          "Record shuffle seed (defaults to --seed)");
    cmd_sim->add_option("--repeats", sim.repeats, "Random-attack orders averaged per curve")
        ->capture_default_str();
    cmd_sim->add_flag("--bc-labels", sim.bc_labels,
                      "Store normalized betweenness labels (directory mode)");
    cmd_sim->add_option("--threads", sim.threads, "Worker threads")->capture_default_str();
    cmd_sim->add_option("--out", sim.out, "Dataset directory, curve file, or - for stdout")
        ->required();

    PretrainCmd pre;
    auto* cmd_pre = app.add_subcommand("pretrain-bc", "Train the betweenness surrogate");
    cmd_pre->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_pre->add_option("--data", pre.data, "Dataset directory with betweenness labels")
        ->required();
    cmd_pre->add_option("--out", pre.out, "Parameter file to write")->required();
    cmd_pre->add_option("--log", pre.log, "Training log CSV");
    pre.flags.attach(cmd_pre, false);

    TrainCmd trn;
    auto* cmd_trn = app.add_subcommand("train", "Train the curve predictor");
    cmd_trn->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_trn->add_option("--data", trn.data, "Dataset directory")->required();
    cmd_trn->add_option("--bc", trn.bc, "Betweenness surrogate parameter file");
    cmd_trn->add_option("--out", trn.out, "Parameter file to write")->required();
    cmd_trn->add_option("--log", trn.log, "Training log CSV");
    trn.flags.attach(cmd_trn, true);

    PredictCmd prd;
    auto* cmd_prd = app.add_subcommand("predict", "Predict one curve from a graph and a model");
    cmd_prd->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_prd->add_option("--graph", prd.graph, "Edge-list file")->required();
    cmd_prd->add_option("--model", prd.model, "Curve model parameter file")->required();
    cmd_prd->add_option("--bc", prd.bc, "Betweenness surrogate parameter file");
    cmd_prd->add_option("--out", prd.out, "Curve CSV path, or - for stdout")->required();

    EvalCmd evl;
    auto* cmd_evl = app.add_subcommand("eval", "Score predictions against a dataset");
    cmd_evl->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_evl->add_option("--data", evl.data, "Dataset directory")->required();
    cmd_evl->add_option("--model", evl.model, "Curve model parameter file");
    cmd_evl->add_option("--bc", evl.bc, "Betweenness surrogate parameter file");
    cmd_evl->add_option("--pred", evl.pred, "Curve CSV to score instead of a model");
    cmd_evl->add_option("--threads", evl.threads, "Worker threads")->capture_default_str();
    cmd_evl->add_option("--out", evl.out, "Metrics CSV path, or - for stdout")->required();

    BenchCmd ben;
    auto* cmd_ben = app.add_subcommand("bench", "Time simulation against prediction");
    cmd_ben->add_option("--config", config_file, "Flat key=value option file (flags win)");
    cmd_ben->add_option("--topology", ben.topology, "er, sf, qsn or sw")->capture_default_str();
    cmd_ben->add_option("--n", ben.n, "Nodes per graph")->capture_default_str();
    cmd_ben->add_option("--k-avg", ben.k_avg, "Average out-degree")->capture_default_str();
    cmd_ben->add_option("--count", ben.count, "Graphs to time over")->capture_default_str();
    ben.seed_opt = cmd_ben->add_option("--seed", ben.seed, "Base seed (or NCRHOK_SEED)");
    cmd_ben->add_option("--attack", ben.attack, "ra, tda or tba")->capture_default_str();
    cmd_ben->add_flag("--static-ranking", ben.static_ranking,
                      "Rank targets once instead of after every removal");
    cmd_ben->add_option("--repeats", ben.repeats, "Random-attack orders per curve")
        ->capture_default_str();
    cmd_ben->add_option("--runs", ben.runs, "Timed passes (median reported)")
        ->capture_default_str();
    cmd_ben->add_option("--model", ben.model, "Curve model parameter file");
    cmd_ben->add_option("--bc", ben.bc, "Betweenness surrogate parameter file");

    try {
        std::vector<std::string> args = overlay_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));

        gen.seed = effective_seed(gen.seed_opt, gen.seed);
        sim.seed = effective_seed(sim.seed_opt, sim.seed);
        pre.flags.cfg.seed = effective_seed(pre.flags.seed_opt, pre.flags.cfg.seed);
        trn.flags.cfg.seed = effective_seed(trn.flags.seed_opt, trn.flags.cfg.seed);
        ben.seed = effective_seed(ben.seed_opt, ben.seed);

        if (cmd_gen->parsed()) gen.run();
        if (cmd_sim->parsed()) sim.run();
        if (cmd_pre->parsed()) pre.run();
        if (cmd_trn->parsed()) trn.run();
        if (cmd_prd->parsed()) prd.run();
        if (cmd_evl->parsed()) evl.run();
        if (cmd_ben->parsed()) ben.run();
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#include "ncrhok/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "ncrhok/centrality.hpp"
#include "ncrhok/errors.hpp"
#include "ncrhok/optim.hpp"
#include "ncrhok/rng.hpp"

namespace fs = std::filesystem;

namespace ncrhok::pipeline {

namespace {

using ad::ParamStore;
using ad::Tape;
using ad::Tensor;

/**
 * Runs fn(0..count-1) across up to `threads` workers. Work items must be
 * independent; the first failing index (in index order) has its exception
 * rethrown after all workers finish.
 */
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, count > 0 ? count : 1);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string curve_problem(const RobustnessCurve& curve, int n) {
    if (static_cast<int>(curve.values.size()) != n - 1)
        return "curve length " + std::to_string(curve.values.size()) + " for " +
               std::to_string(n) + " nodes";
    for (double v : curve.values)
        if (!std::isfinite(v) || v <= 0.0 || v > 1.0)
            return "curve value " + std::to_string(v) + " outside (0, 1]";
    return {};
}

std::uint64_t record_attack_seed(std::uint64_t attack_seed, int index) {
    return Rng::derive(attack_seed, static_cast<std::uint64_t>(index)).next_u64();
}

/** Simulates curves (and labels) for records whose order is already final. */
void simulate_records(Dataset& ds, int threads) {
    parallel_for(ds.size(), threads, [&](int i) {
        auto& rec = ds.records[static_cast<std::size_t>(i)];
        const std::string where = "record " + std::to_string(i) + " (" + rec.spec.to_manifest() +
                                  ")";
        try {
            rec.graph = generate(rec.spec);
            AttackSpec attack;
            attack.kind = ds.attack;
            attack.recompute = ds.recompute;
            attack.repeats = ds.repeats;
            attack.seed = record_attack_seed(ds.attack_seed, i);
            rec.curve = simulate_attack(rec.graph, attack);
            if (ds.has_bc_labels) rec.bc = minmax_normalized(brandes_bc(rec.graph));
        } catch (const ShapeError& e) {
            throw ShapeError(where + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError(where + ": " + e.what());
        } catch (const std::exception& e) {
            throw InputError(where + ": " + e.what());
        }
        const std::string problem = curve_problem(rec.curve, rec.spec.n);
        if (!problem.empty()) throw NumericError(where + ": " + problem);
    });
}

std::string record_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d.edges", index);
    return buf;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int parse_int_field(const std::string& key, const std::string& val) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        return v;
    } catch (const std::exception&) {
        throw InputError("manifest: bad integer for '" + key + "': '" + val + "'");
    }
}

std::uint64_t parse_u64_field(const std::string& key, const std::string& val) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        return v;
    } catch (const std::exception&) {
        throw InputError("manifest: bad integer for '" + key + "': '" + val + "'");
    }
}

struct Manifest {
    Dataset skeleton; ///< records hold specs only
};

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open manifest '" + path + "'");

    Manifest m;
    std::map<std::string, std::string> kv;
    std::vector<std::string> record_lines;
    std::string line;
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
        if (key.rfind("record.", 0) == 0) {
            const int idx = parse_int_field(key, key.substr(7));
            if (idx != static_cast<int>(record_lines.size()))
                throw InputError(path + ": record lines out of order at " + key);
            record_lines.push_back(val);
        } else if (!kv.emplace(key, val).second) {
            throw InputError(path + ": duplicate key '" + key + "'");
        }
    }

    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw InputError(path + ": missing key '" + key + "'");
        return it->second;
    };
    if (need("format") != "ncrhok-dataset")
        throw InputError(path + ": not a dataset manifest (format=" + kv["format"] + ")");
    if (parse_int_field("version", need("version")) != 1)
        throw InputError(path + ": unsupported manifest version " + kv["version"]);

    Dataset& ds = m.skeleton;
    ds.attack = attack_from_string(need("attack"));
    ds.recompute = parse_int_field("recompute", need("recompute")) != 0;
    ds.repeats = parse_int_field("repeats", need("repeats"));
    ds.attack_seed = parse_u64_field("attack_seed", need("attack_seed"));
    ds.shuffle_seed = parse_u64_field("shuffle_seed", need("shuffle_seed"));
    ds.has_bc_labels = parse_int_field("bc_labels", need("bc_labels")) != 0;
    const int count = parse_int_field("records", need("records"));
    if (count != static_cast<int>(record_lines.size()))
        throw InputError(path + ": records=" + std::to_string(count) + " but " +
                         std::to_string(record_lines.size()) + " record lines");
    if (ds.repeats < 1) throw InputError(path + ": repeats must be positive");

    ds.records.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        ds.records[static_cast<std::size_t>(i)].spec =
            GenSpec::from_manifest(record_lines[static_cast<std::size_t>(i)]);
    return m;
}

void write_manifest(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write manifest '" + path + "'");
    out << "format=ncrhok-dataset\n";
    out << "version=1\n";
    out << "attack=" << to_string(ds.attack) << '\n';
    out << "recompute=" << (ds.recompute ? 1 : 0) << '\n';
    out << "repeats=" << ds.repeats << '\n';
    out << "attack_seed=" << ds.attack_seed << '\n';
    out << "shuffle_seed=" << ds.shuffle_seed << '\n';
    out << "bc_labels=" << (ds.has_bc_labels ? 1 : 0) << '\n';
    out << "records=" << ds.size() << '\n';
    for (int i = 0; i < ds.size(); ++i)
        out << "record." << i << '=' << ds.records[static_cast<std::size_t>(i)].spec.to_manifest()
            << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

/** Snapshot / restore of every tensor value in store iteration order. */
std::vector<std::vector<double>> snapshot_values(const ParamStore& store) {
    std::vector<std::vector<double>> vals;
    vals.reserve(store.size());
    for (const auto& [name, t] : store.items()) vals.push_back(t.value());
    return vals;
}

void restore_values(ParamStore& store, const std::vector<std::vector<double>>& vals) {
    std::size_t i = 0;
    for (auto& [name, t] : store.items()) t.value() = vals[i++];
}

} // namespace

Dataset build_dataset(const std::vector<GenSpec>& specs, const AttackSpec& attack,
                      std::uint64_t shuffle_seed, bool with_bc_labels, int threads) {
    if (specs.empty()) throw InputError("dataset needs at least one graph spec");
    if (attack.repeats < 1) throw InputError("attack repeats must be positive");

    Dataset ds;
    ds.attack = attack.kind;
    ds.recompute = attack.recompute;
    ds.repeats = attack.repeats;
    ds.attack_seed = attack.seed;
    ds.shuffle_seed = shuffle_seed;
    ds.has_bc_labels = with_bc_labels;
    ds.records.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) ds.records[i].spec = specs[i];

    Rng rng(shuffle_seed);
    rng.shuffle(ds.records);

    simulate_records(ds, threads);
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "graphs", ec);
    if (ec) throw InputError("cannot create dataset directory '" + dir + "': " + ec.message());

    write_manifest(ds, (fs::path(dir) / "manifest.txt").string());

    std::vector<CurveRow> curves;
    std::vector<CurveRow> labels;
    curves.reserve(ds.records.size());
    for (int i = 0; i < ds.size(); ++i) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        save_edge_list(rec.graph, (fs::path(dir) / "graphs" / record_filename(i)).string());
        curves.push_back({"record=" + std::to_string(i) + " " + rec.spec.to_manifest(),
                          rec.curve.values});
        if (ds.has_bc_labels) labels.push_back({"record=" + std::to_string(i), rec.bc});
    }
    save_curves_csv((fs::path(dir) / "curves.csv").string(), curves);
    if (ds.has_bc_labels) save_curves_csv((fs::path(dir) / "labels_bc.csv").string(), labels);
}

Dataset load_dataset(const std::string& dir) {
    Dataset ds = read_manifest((fs::path(dir) / "manifest.txt").string()).skeleton;

    const auto curves = load_curves_csv((fs::path(dir) / "curves.csv").string());
    if (static_cast<int>(curves.size()) != ds.size())
        throw InputError(dir + ": manifest lists " + std::to_string(ds.size()) +
                         " records but curves.csv has " + std::to_string(curves.size()));

    std::vector<CurveRow> labels;
    if (ds.has_bc_labels) {
        labels = load_curves_csv((fs::path(dir) / "labels_bc.csv").string());
        if (labels.size() != curves.size())
            throw InputError(dir + ": labels_bc.csv row count does not match curves.csv");
    }

    for (int i = 0; i < ds.size(); ++i) {
        auto& rec = ds.records[static_cast<std::size_t>(i)];
        rec.graph = load_edge_list((fs::path(dir) / "graphs" / record_filename(i)).string());
        if (rec.graph.num_nodes() != rec.spec.n)
            throw InputError(dir + ": record " + std::to_string(i) + " graph has " +
                             std::to_string(rec.graph.num_nodes()) + " nodes, manifest says " +
                             std::to_string(rec.spec.n));
        rec.curve.values = curves[static_cast<std::size_t>(i)].values;
        const std::string problem = curve_problem(rec.curve, rec.spec.n);
        if (!problem.empty())
            throw InputError(dir + ": record " + std::to_string(i) + ": " + problem);
        if (ds.has_bc_labels) {
            rec.bc = labels[static_cast<std::size_t>(i)].values;
            if (static_cast<int>(rec.bc.size()) != rec.spec.n)
                throw InputError(dir + ": record " + std::to_string(i) +
                                 " has " + std::to_string(rec.bc.size()) + " labels for " +
                                 std::to_string(rec.spec.n) + " nodes");
        }
    }
    return ds;
}

Dataset dataset_from_manifest(const std::string& manifest_path, int threads) {
    Dataset ds = read_manifest(manifest_path).skeleton;
    if (ds.records.empty()) throw InputError(manifest_path + ": no records");
    simulate_records(ds, threads);
    return ds;
}

void TrainConfig::validate() const {
    if (epochs < 0) throw InputError("epochs must be >= 0");
    if (!(lr > 0.0)) throw InputError("learning rate must be positive");
    if (!(lr_decay > 0.0) || lr_decay > 1.0) throw InputError("lr decay must be in (0, 1]");
    if (decay_every < 1) throw InputError("decay interval must be >= 1 epoch");
    if (l2 < 0.0) throw InputError("weight decay must be >= 0");
    if (clip < 0.0) throw InputError("gradient clip must be >= 0");
    if (batch_size < 1) throw InputError("batch size must be >= 1");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw InputError("validation fraction must be in [0, 1)");
    if (k_hop < 1 || k_nn < 1 || d_feat < 1 || d_model < 1 || mlp_hidden < 1)
        throw InputError("model dimensions must be positive");
    if (hgnn_branches < 0 || hgnn_branches > 2)
        throw InputError("hgnn_branches must be 0, 1 or 2");
}

model::ModelConfig TrainConfig::model_config(int n) const {
    model::ModelConfig mc;
    mc.n = n;
    mc.d_feat = d_feat;
    mc.d_model = d_model;
    mc.mlp_hidden = mlp_hidden;
    mc.k_hop = k_hop;
    mc.k_nn = k_nn;
    mc.use_bc = use_bc;
    mc.hgnn_branches = hgnn_branches;
    return mc;
}

double TrainLog::epoch_mean_loss(int epoch) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : rows)
        if (row.epoch == epoch) {
            sum += row.loss;
            ++count;
        }
    return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

void TrainLog::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write training log '" + path + "'");
    out << "epoch,batch,loss,val_er\n";
    for (const auto& row : rows) {
        out << row.epoch << ',' << row.batch << ',' << fmt_g17(row.loss) << ',';
        if (row.has_val) out << fmt_g17(row.val_er);
        out << '\n';
    }
    if (!out) throw InputError("write failed for '" + path + "'");
}

namespace {

double scheduled_lr(const TrainConfig& cfg, int epoch) {
    return cfg.lr * std::pow(cfg.lr_decay, epoch / cfg.decay_every);
}

ad::Adam make_optimizer(const TrainConfig& cfg, ParamStore& store) {
    ad::AdamConfig ac;
    ac.lr = cfg.lr;
    ac.weight_decay = cfg.l2;
    ac.clip_norm = cfg.clip;
    ad::Adam opt(ac);
    for (auto& [name, t] : store.items()) opt.add_param(t);
    return opt;
}

std::vector<int> shuffled_indices(int count, std::uint64_t seed, int epoch) {
    std::vector<int> idx(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(epoch) + 1);
    rng.shuffle(idx);
    return idx;
}

} // namespace

int validation_count(int records, double fraction) {
    if (fraction <= 0.0 || records < 2) return 0;
    const int n_val = static_cast<int>(std::lround(fraction * records));
    return std::clamp(n_val, 1, records - 1);
}

TrainResult pretrain_bc_gat(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.records.empty()) throw InputError("pretraining needs a non-empty dataset");
    if (!ds.has_bc_labels) throw InputError("pretraining needs betweenness labels");
    for (int i = 0; i < ds.size(); ++i) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        if (static_cast<int>(rec.bc.size()) != rec.graph.num_nodes())
            throw InputError("record " + std::to_string(i) + " is missing betweenness labels");
    }

    auto params = model::init_bc_gat(cfg.seed);
    TrainResult result;
    register_bc_gat(params, result.params);
    result.best_val_er = std::numeric_limits<double>::quiet_NaN();
    ad::Adam opt = make_optimizer(cfg, result.params);

    const int count = ds.size();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_lr(scheduled_lr(cfg, epoch));
        const auto order = shuffled_indices(count, cfg.seed, epoch);
        int batch_index = 0;
        for (int start = 0; start < count; start += cfg.batch_size, ++batch_index) {
            const int batch_n = std::min(cfg.batch_size, count - start);
            opt.zero_grads();
            double batch_loss = 0.0;
            for (int off = 0; off < batch_n; ++off) {
                const auto& rec =
                    ds.records[static_cast<std::size_t>(order[static_cast<std::size_t>(start + off)])];
                Tape tape;
                Tensor pred = bc_gat_forward(rec.graph, model::degree_feature(rec.graph), params,
                                             &tape);
                Tensor target = ad::make_tensor(rec.graph.num_nodes(), 1, rec.bc);
                Tensor loss = ad::mse_loss(pred, target);
                Tensor scaled = ad::scale(loss, 1.0 / batch_n);
                tape.backward(scaled);
                batch_loss += loss.value()[0] / batch_n;
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("pretraining diverged at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(batch_index) + " (loss " +
                                   std::to_string(batch_loss) + ")");
            try {
                opt.step();
            } catch (const NumericError& e) {
                throw NumericError("pretraining diverged at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(batch_index) + ": " + e.what());
            }
            result.log.rows.push_back({epoch, batch_index, batch_loss, 0.0, false});
        }
    }
    return result;
}

TrainResult train_ncr_hok(const Dataset& ds, const ParamStore* bc_gat, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.records.empty()) throw InputError("training needs a non-empty dataset");
    const int n = ds.records.front().graph.num_nodes();
    for (int i = 0; i < ds.size(); ++i)
        if (ds.records[static_cast<std::size_t>(i)].graph.num_nodes() != n)
            throw ShapeError("record " + std::to_string(i) + " has " +
                             std::to_string(ds.records[static_cast<std::size_t>(i)].graph.num_nodes()) +
                             " nodes; the curve model needs a single node count (first record has " +
                             std::to_string(n) + ")");

    model::BcGatParams bc_params;
    if (cfg.use_bc) {
        if (!bc_gat)
            throw InputError("training with the betweenness feature needs surrogate parameters");
        bc_params = model::bc_gat_from_store(*bc_gat);
    }
    const model::BcGatParams* bc_ptr = cfg.use_bc ? &bc_params : nullptr;

    auto params = model::init_ncr_hok(cfg.model_config(n), cfg.seed);
    TrainResult result;
    register_ncr_hok(params, result.params);
    result.best_val_er = std::numeric_limits<double>::quiet_NaN();

    const int count = ds.size();
    const int n_val = validation_count(count, cfg.val_fraction);
    const int n_train = count - n_val;

    auto validation_er = [&]() {
        std::vector<std::vector<double>> tv, pv;
        tv.reserve(static_cast<std::size_t>(n_val));
        pv.reserve(static_cast<std::size_t>(n_val));
        for (int i = n_train; i < count; ++i) {
            const auto& rec = ds.records[static_cast<std::size_t>(i)];
            tv.push_back(rec.curve.values);
            pv.push_back(model::ncr_hok_forward(rec.graph, bc_ptr, params, nullptr).value());
        }
        return curve_metrics(std::move(tv), std::move(pv)).er_mean;
    };

    if (cfg.epochs == 0) return result;

    ad::Adam opt = make_optimizer(cfg, result.params);
    double best_er = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_values;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_lr(scheduled_lr(cfg, epoch));
        const auto order = shuffled_indices(n_train, cfg.seed, epoch);
        int batch_index = 0;
        for (int start = 0; start < n_train; start += cfg.batch_size, ++batch_index) {
            const int batch_n = std::min(cfg.batch_size, n_train - start);
            opt.zero_grads();
            double batch_loss = 0.0;
            for (int off = 0; off < batch_n; ++off) {
                const auto& rec =
                    ds.records[static_cast<std::size_t>(order[static_cast<std::size_t>(start + off)])];
                Tape tape;
                Tensor pred = model::ncr_hok_forward(rec.graph, bc_ptr, params, &tape);
                Tensor target = ad::make_tensor(1, n - 1, rec.curve.values);
                Tensor loss = ad::smooth_l1_loss(pred, target);
                Tensor scaled = ad::scale(loss, 1.0 / batch_n);
                tape.backward(scaled);
                batch_loss += loss.value()[0] / batch_n;
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(batch_index) + " (loss " +
                                   std::to_string(batch_loss) + ")");
            try {
                opt.step();
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(batch_index) + ": " + e.what());
            }
            result.log.rows.push_back({epoch, batch_index, batch_loss, 0.0, false});
        }
        if (n_val > 0 && !result.log.rows.empty()) {
            const double ver = validation_er();
            auto& last = result.log.rows.back();
            last.val_er = ver;
            last.has_val = true;
            if (ver < best_er) {
                best_er = ver;
                best_values = snapshot_values(result.params);
            }
        }
    }

    if (!best_values.empty()) {
        restore_values(result.params, best_values);
        result.best_val_er = best_er;
    }
    return result;
}

EvalReport evaluate_predictions(const Dataset& ds, std::vector<RobustnessCurve> preds) {
    if (static_cast<int>(preds.size()) != ds.size())
        throw ShapeError("got " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(ds.size()) + " records");

    std::vector<std::vector<double>> tv, pv;
    tv.reserve(preds.size());
    pv.reserve(preds.size());
    for (int i = 0; i < ds.size(); ++i) {
        tv.push_back(ds.records[static_cast<std::size_t>(i)].curve.values);
        pv.push_back(preds[static_cast<std::size_t>(i)].values);
    }

    EvalReport report;
    report.bundle = curve_metrics(tv, pv);

    std::map<std::tuple<int, double, int>, std::vector<int>> cohorts;
    for (int i = 0; i < ds.size(); ++i) {
        const auto& spec = ds.records[static_cast<std::size_t>(i)].spec;
        cohorts[{static_cast<int>(spec.topology), spec.k_avg, static_cast<int>(ds.attack)}]
            .push_back(i);
    }
    for (const auto& [key, members] : cohorts) {
        std::vector<std::vector<double>> ct, cp;
        ct.reserve(members.size());
        cp.reserve(members.size());
        for (int i : members) {
            ct.push_back(tv[static_cast<std::size_t>(i)]);
            cp.push_back(pv[static_cast<std::size_t>(i)]);
        }
        const CurveBundle bundle = curve_metrics(std::move(ct), std::move(cp));
        EvalGroup group;
        group.topology = static_cast<Topology>(std::get<0>(key));
        group.k_avg = std::get<1>(key);
        group.attack = static_cast<AttackKind>(std::get<2>(key));
        group.count = static_cast<int>(members.size());
        group.er_mean = bundle.er_mean;
        group.sigma_mean = bundle.sigma_mean;
        report.groups.push_back(group);
    }
    report.preds = std::move(preds);
    return report;
}

EvalReport evaluate(const ParamStore& model_store, const ParamStore* bc_gat, const Dataset& ds,
                    int threads) {
    if (ds.records.empty()) throw InputError("evaluation needs a non-empty dataset");
    const auto params = model::ncr_hok_from_store(model_store);
    model::BcGatParams bc_params;
    if (params.cfg.use_bc) {
        if (!bc_gat)
            throw InputError("model expects a betweenness surrogate but none was given");
        bc_params = model::bc_gat_from_store(*bc_gat);
    }
    const model::BcGatParams* bc_ptr = params.cfg.use_bc ? &bc_params : nullptr;

    std::vector<RobustnessCurve> preds(ds.records.size());
    parallel_for(ds.size(), threads, [&](int i) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        try {
            preds[static_cast<std::size_t>(i)].values =
                model::ncr_hok_forward(rec.graph, bc_ptr, params, nullptr).value();
        } catch (const ShapeError& e) {
            throw ShapeError("record " + std::to_string(i) + ": " + e.what());
        }
    });
    return evaluate_predictions(ds, std::move(preds));
}

void save_eval_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write evaluation report '" + path + "'");
    out << "topology,k_avg,attack,count,er_mean,sigma_mean\n";
    int total = 0;
    for (const auto& g : report.groups) {
        out << to_string(g.topology) << ',' << fmt_g17(g.k_avg) << ',' << to_string(g.attack)
            << ',' << g.count << ',' << fmt_g17(g.er_mean) << ',' << fmt_g17(g.sigma_mean)
            << '\n';
        total += g.count;
    }
    out << "overall,,," << total << ',' << fmt_g17(report.bundle.er_mean) << ','
        << fmt_g17(report.bundle.sigma_mean) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::string BenchReport::format() const {
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf, "graphs: %d at n=%d, runs: %d\n", num_graphs, n, runs);
    s += buf;
    std::snprintf(buf, sizeof buf, "simulation: %.6f s/graph\n", sim_seconds_per_graph);
    s += buf;
    if (pred_seconds_per_graph > 0.0) {
        std::snprintf(buf, sizeof buf, "prediction: %.6f s/graph\n", pred_seconds_per_graph);
        s += buf;
        std::snprintf(buf, sizeof buf, "speedup: %.2fx\n", speedup);
        s += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "reference at n=1000: simulation 23.581 s/graph, prediction 0.085 s/graph "
                  "(%.1fx)\n",
                  23.581 / 0.085);
    s += buf;
    return s;
}

BenchReport benchmark_runtime(const std::vector<DirectedGraph>& graphs, const ParamStore* model,
                              const ParamStore* bc_gat, const AttackSpec& attack, int runs) {
    if (graphs.empty()) throw InputError("benchmark needs at least one graph");
    if (runs < 1) throw InputError("benchmark needs at least one run");

    BenchReport report;
    report.n = graphs.front().num_nodes();
    report.num_graphs = static_cast<int>(graphs.size());
    report.runs = runs;

    model::NcrHokParams params;
    model::BcGatParams bc_params;
    const model::BcGatParams* bc_ptr = nullptr;
    if (model) {
        params = model::ncr_hok_from_store(*model);
        if (params.cfg.use_bc) {
            if (!bc_gat)
                throw InputError("model expects a betweenness surrogate but none was given");
            bc_params = model::bc_gat_from_store(*bc_gat);
            bc_ptr = &bc_params;
        }
    }

    auto simulate_pass = [&](std::uint64_t salt) {
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            AttackSpec spec = attack;
            spec.seed = Rng::derive(attack.seed + salt, i).next_u64();
            simulate_attack(graphs[i], spec);
        }
    };
    auto predict_pass = [&] {
        for (const auto& g : graphs)
            model::ncr_hok_forward(g, bc_ptr, params, nullptr);
    };

    simulate_pass(0);
    std::vector<double> sim_times;
    for (int r = 0; r < runs; ++r) {
        const double t0 = now_seconds();
        simulate_pass(static_cast<std::uint64_t>(r) + 1);
        sim_times.push_back((now_seconds() - t0) / static_cast<double>(graphs.size()));
    }
    report.sim_seconds_per_graph = median(std::move(sim_times));

    if (model) {
        predict_pass();
        std::vector<double> pred_times;
        for (int r = 0; r < runs; ++r) {
            const double t0 = now_seconds();
            predict_pass();
            pred_times.push_back((now_seconds() - t0) / static_cast<double>(graphs.size()));
        }
        report.pred_seconds_per_graph = median(std::move(pred_times));
        if (report.pred_seconds_per_graph > 0.0)
            report.speedup = report.sim_seconds_per_graph / report.pred_seconds_per_graph;
    }
    return report;
}

} // namespace ncrhok::pipeline

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncrhok/controllability.hpp"
#include "ncrhok/graph.hpp"
#include "ncrhok/models.hpp"
#include "ncrhok/netgen.hpp"
#include "ncrhok/params.hpp"

namespace ncrhok::pipeline {

/** One graph with its simulated ground truth and enough provenance to rebuild it. */
struct DatasetRecord {
    GenSpec spec;
    DirectedGraph graph{0};
    RobustnessCurve curve;
    std::vector<double> bc; ///< min-max normalized betweenness labels; may be empty
};

/**
 * A bag of records plus the seeds that produced them. Records are stored in
 * their final (shuffled) order; per-record attack streams are derived from
 * attack_seed and the record's position, so the whole dataset is a pure
 * function of the manifest.
 */
struct Dataset {
    AttackKind attack = AttackKind::Random;
    bool recompute = true;
    int repeats = 1;
    std::uint64_t attack_seed = 0;
    std::uint64_t shuffle_seed = 0;
    bool has_bc_labels = false;
    std::vector<DatasetRecord> records;

    int size() const { return static_cast<int>(records.size()); }
};

/**
 * Generates every spec'd graph, shuffles the records, then simulates the
 * attack curve for each (and Brandes labels when requested). `attack.seed`
 * seeds the per-record attack streams; `attack.bc_fn` is ignored (degree and
 * betweenness attacks use their exact built-in rankings).
 */
Dataset build_dataset(const std::vector<GenSpec>& specs, const AttackSpec& attack,
                      std::uint64_t shuffle_seed, bool with_bc_labels, int threads = 1);

/**
 * Directory layout: manifest.txt (key=value plus one record.<i> line per
 * graph), graphs/<i>.edges, curves.csv, and labels_bc.csv when labels exist.
 */
void save_dataset(const Dataset& ds, const std::string& dir);

/** Reads the files written by save_dataset. */
Dataset load_dataset(const std::string& dir);

/** Rebuilds the dataset from manifest.txt alone; bit-identical to the saved one. */
Dataset dataset_from_manifest(const std::string& manifest_path, int threads = 1);

/** Training hyperparameters shared by the surrogate and the curve predictor. */
struct TrainConfig {
    int epochs = 10;
    double lr = 1e-3;
    double lr_decay = 0.5; ///< multiplies lr every decay_every epochs
    int decay_every = 3;
    double l2 = 1e-6;   ///< decoupled weight decay
    double clip = 0.8;  ///< global gradient-norm ceiling
    int batch_size = 8; ///< gradient accumulation window
    std::uint64_t seed = 0;
    double val_fraction = 0.1;

    int k_hop = 3;
    int k_nn = 10;
    int d_feat = 64;
    int d_model = 64;
    int mlp_hidden = 512;
    bool use_bc = true;
    int hgnn_branches = 2;

    void validate() const;
    model::ModelConfig model_config(int n) const;
};

struct TrainLogRow {
    int epoch = 0;
    int batch = 0;
    double loss = 0.0;
    double val_er = 0.0;
    bool has_val = false; ///< val_er is only filled on the last batch of an epoch
};

struct TrainLog {
    std::vector<TrainLogRow> rows;

    /** Mean of the batch losses logged for one epoch. */
    double epoch_mean_loss(int epoch) const;
    void save_csv(const std::string& path) const;
};

struct TrainResult {
    ad::ParamStore params;
    TrainLog log;
    double best_val_er = 0.0; ///< NaN when no validation split
};

/**
 * Size of the held-out tail of a dataset: round(fraction * records), clamped
 * to [1, records - 1], or 0 when the fraction is 0 or there is only one record.
 */
int validation_count(int records, double fraction);

/**
 * Trains the betweenness surrogate with per-node MSE against the stored
 * labels. Works across mixed node counts. Aborts with NumericError when the
 * loss stops being finite.
 */
TrainResult pretrain_bc_gat(const Dataset& ds, const TrainConfig& cfg);

/**
 * Trains the curve predictor with smooth-L1 loss, gradient accumulation over
 * batch_size graphs, norm clipping, decoupled weight decay and a stepped lr
 * schedule. The last val_fraction of the records is held out; the checkpoint
 * with the best validation error is returned (final parameters when there is
 * no validation split). bc_gat may be null only when cfg.use_bc is false.
 */
TrainResult train_ncr_hok(const Dataset& ds, const ad::ParamStore* bc_gat,
                          const TrainConfig& cfg);

struct EvalGroup {
    Topology topology = Topology::Er;
    double k_avg = 0.0;
    AttackKind attack = AttackKind::Random;
    int count = 0;
    double er_mean = 0.0;
    double sigma_mean = 0.0;
};

struct EvalReport {
    CurveBundle bundle;                 ///< metrics over the whole dataset
    std::vector<EvalGroup> groups;      ///< keyed by (topology, k_avg, attack)
    std::vector<RobustnessCurve> preds; ///< aligned with the dataset records
};

/** Aggregates externally produced predictions against the dataset's curves. */
EvalReport evaluate_predictions(const Dataset& ds, std::vector<RobustnessCurve> preds);

/** Predicts every record with the stored model, then aggregates. */
EvalReport evaluate(const ad::ParamStore& model, const ad::ParamStore* bc_gat,
                    const Dataset& ds, int threads = 1);

/** Writes one row per group plus an overall row; see README for columns. */
void save_eval_csv(const EvalReport& report, const std::string& path);

struct BenchReport {
    int n = 0;
    int num_graphs = 0;
    int runs = 0;
    double sim_seconds_per_graph = 0.0;  ///< median over runs
    double pred_seconds_per_graph = 0.0; ///< median over runs; 0 when no model given
    double speedup = 0.0;                ///< sim / pred

    std::string format() const;
};

/**
 * Times attack simulation and (when a model is given) curve prediction on the
 * same graphs, wall-clock, one warmup pass plus `runs` measured passes, and
 * reports the medians. Prediction timing includes hypergraph construction and
 * the betweenness surrogate, everything downstream of having a graph in hand.
 */
BenchReport benchmark_runtime(const std::vector<DirectedGraph>& graphs,
                              const ad::ParamStore* model, const ad::ParamStore* bc_gat,
                              const AttackSpec& attack, int runs = 5);

} // namespace ncrhok::pipeline

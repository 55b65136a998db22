#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncrhok/centrality.hpp"
#include "ncrhok/controllability.hpp"
#include "ncrhok/errors.hpp"
#include "ncrhok/graph.hpp"
#include "ncrhok/models.hpp"
#include "ncrhok/netgen.hpp"
#include "ncrhok/params.hpp"
#include "ncrhok/pipeline.hpp"

namespace py = pybind11;
using namespace ncrhok;

namespace {

GenSpec spec_from_dict(const py::dict& d) {
    GenSpec spec;
    for (const auto& item : d) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "topology")
            spec.topology = topology_from_string(py::cast<std::string>(item.second));
        else if (key == "n")
            spec.n = py::cast<int>(item.second);
        else if (key == "k_avg")
            spec.k_avg = py::cast<double>(item.second);
        else if (key == "seed")
            spec.seed = py::cast<std::uint64_t>(item.second);
        else if (key == "sf_beta")
            spec.sf_beta = py::cast<double>(item.second);
        else if (key == "sf_theta")
            spec.sf_theta = py::cast<double>(item.second);
        else if (key == "qsn_rq")
            spec.qsn_rq = py::cast<int>(item.second);
        else
            throw InputError("unknown spec key '" + key + "'");
    }
    if (spec.n <= 0) throw InputError("spec needs a positive 'n'");
    return spec;
}

AttackSpec attack_spec(const std::string& attack, bool recompute, std::uint64_t seed,
                       int repeats) {
    AttackSpec a;
    a.kind = attack_from_string(attack);
    a.recompute = recompute;
    a.seed = seed;
    a.repeats = repeats;
    return a;
}

pipeline::TrainConfig train_config(int epochs, double lr, double lr_decay, int decay_every,
                                   double l2, double clip, int batch, std::uint64_t seed,
                                   double val_fraction, int k_hop, int k_nn, int d_feat,
                                   int d_model, int mlp_hidden, bool use_bc, int hgnn_branches) {
    pipeline::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.lr = lr;
    cfg.lr_decay = lr_decay;
    cfg.decay_every = decay_every;
    cfg.l2 = l2;
    cfg.clip = clip;
    cfg.batch_size = batch;
    cfg.seed = seed;
    cfg.val_fraction = val_fraction;
    cfg.k_hop = k_hop;
    cfg.k_nn = k_nn;
    cfg.d_feat = d_feat;
    cfg.d_model = d_model;
    cfg.mlp_hidden = mlp_hidden;
    cfg.use_bc = use_bc;
    cfg.hgnn_branches = hgnn_branches;
    return cfg;
}

py::dict bundle_dict(const CurveBundle& b) {
    py::dict out;
    out["er_mean"] = b.er_mean;
    out["sigma_mean"] = b.sigma_mean;
    out["er_curve"] = b.er_curve;
    out["sigma_curve"] = b.sigma_curve;
    return out;
}

py::dict report_dict(const pipeline::EvalReport& report) {
    py::dict out = bundle_dict(report.bundle);
    py::list groups;
    for (const auto& g : report.groups) {
        py::dict row;
        row["topology"] = to_string(g.topology);
        row["k_avg"] = g.k_avg;
        row["attack"] = to_string(g.attack);
        row["count"] = g.count;
        row["er_mean"] = g.er_mean;
        row["sigma_mean"] = g.sigma_mean;
        groups.append(row);
    }
    out["groups"] = groups;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact controllability-robustness curves and a learned curve predictor";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<DirectedGraph>(m, "Graph", "Directed graph with contiguous integer nodes")
        .def_property_readonly("num_nodes", &DirectedGraph::num_nodes)
        .def_property_readonly("num_edges", &DirectedGraph::num_edges)
        .def(
            "edges",
            [](const DirectedGraph& g) {
                std::vector<std::pair<int, int>> out;
                out.reserve(static_cast<std::size_t>(g.num_edges()));
                for (NodeId u = 0; u < g.num_nodes(); ++u)
                    for (NodeId v : g.out_neighbors(u)) out.emplace_back(u, v);
                return out;
            },
            "All edges as (src, dst) pairs in source order")
        .def(
            "out_neighbors",
            [](const DirectedGraph& g, int u) {
                const auto& nb = g.out_neighbors(u);
                return std::vector<int>(nb.begin(), nb.end());
            },
            py::arg("u"))
        .def(
            "save", [](const DirectedGraph& g, const std::string& path) { save_edge_list(g, path); },
            py::arg("path"), "Write the edge-list file format used across the toolkit")
        .def_static(
            "load", [](const std::string& path) { return load_edge_list(path); }, py::arg("path"))
        .def_static(
            "from_edges",
            [](int n, const std::vector<std::pair<int, int>>& edges) {
                DirectedGraph g(n);
                for (const auto& [u, v] : edges) g.add_edge(u, v);
                return g;
            },
            py::arg("n"), py::arg("edges"))
        .def("__repr__", [](const DirectedGraph& g) {
            return "Graph(n=" + std::to_string(g.num_nodes()) +
                   ", edges=" + std::to_string(g.num_edges()) + ")";
        });

    m.def(
        "generate",
        [](const std::string& topology, int n, double k_avg, std::uint64_t seed, double sf_beta,
           double sf_theta, int qsn_rq) {
            GenSpec spec;
            spec.topology = topology_from_string(topology);
            spec.n = n;
            spec.k_avg = k_avg;
            spec.seed = seed;
            spec.sf_beta = sf_beta;
            spec.sf_theta = sf_theta;
            spec.qsn_rq = qsn_rq;
            return generate(spec);
        },
        py::arg("topology"), py::arg("n"), py::arg("k_avg"), py::arg("seed") = 0,
        py::arg("sf_beta") = 0.999, py::arg("sf_theta") = 1.0, py::arg("qsn_rq") = 1,
        "Seeded random graph: er, sf, qsn or sw");

    m.def("min_driver_nodes", py::overload_cast<const DirectedGraph&>(&min_driver_nodes),
          py::arg("graph"), "Minimum driver nodes of a directed network");
    m.def("min_driver_nodes_undirected", &min_driver_nodes_undirected, py::arg("graph"),
          "Minimum driver nodes via the exact adjacency-rank criterion");
    m.def(
        "max_matching_size",
        [](const DirectedGraph& g) { return max_matching_size(g); }, py::arg("graph"),
        "Maximum bipartite matching size of the out/in split");
    m.def(
        "betweenness",
        [](const DirectedGraph& g, bool normalized) {
            const auto bc = brandes_bc(g);
            return normalized ? minmax_normalized(bc) : bc;
        },
        py::arg("graph"), py::arg("normalized") = false,
        "Exact betweenness centrality, optionally min-max normalized");

    m.def(
        "simulate",
        [](const DirectedGraph& g, const std::string& attack, bool recompute, std::uint64_t seed,
           int repeats) {
            return simulate_attack(g, attack_spec(attack, recompute, seed, repeats)).values;
        },
        py::arg("graph"), py::arg("attack") = "ra", py::arg("recompute") = true,
        py::arg("seed") = 0, py::arg("repeats") = 1,
        "Controllability curve under node-removal attack; one value per removal");

    m.def(
        "curve_metrics",
        [](const std::vector<std::vector<double>>& truth,
           const std::vector<std::vector<double>>& pred) {
            return bundle_dict(curve_metrics(truth, pred));
        },
        py::arg("true_curves"), py::arg("pred_curves"),
        "Mean absolute error and error spread, per curve position and overall");

    m.def(
        "build_dataset",
        [](const std::string& out_dir, const std::vector<py::dict>& specs,
           const std::string& attack, bool recompute, std::uint64_t seed,
           std::uint64_t shuffle_seed, int repeats, bool bc_labels, int threads) {
            std::vector<GenSpec> gs;
            gs.reserve(specs.size());
            for (const auto& d : specs) gs.push_back(spec_from_dict(d));
            const pipeline::Dataset ds = pipeline::build_dataset(
                gs, attack_spec(attack, recompute, seed, repeats), shuffle_seed, bc_labels,
                threads);
            pipeline::save_dataset(ds, out_dir);
            return ds.size();
        },
        py::arg("out_dir"), py::arg("specs"), py::arg("attack") = "ra",
        py::arg("recompute") = true, py::arg("seed") = 0, py::arg("shuffle_seed") = 0,
        py::arg("repeats") = 1, py::arg("bc_labels") = false, py::arg("threads") = 1,
        "Generate, shuffle and simulate a labeled dataset directory; returns its size");

    m.def(
        "dataset_curves",
        [](const std::string& dir) {
            const pipeline::Dataset ds = pipeline::load_dataset(dir);
            std::vector<std::vector<double>> out;
            out.reserve(ds.records.size());
            for (const auto& rec : ds.records) out.push_back(rec.curve.values);
            return out;
        },
        py::arg("dir"), "True curves of a dataset directory, in record order");

    m.def(
        "pretrain_bc",
        [](const std::string& data_dir, const std::string& out_path, int epochs, double lr,
           double lr_decay, int decay_every, double l2, double clip, int batch,
           std::uint64_t seed, const std::string& log_path) {
            const pipeline::Dataset ds = pipeline::load_dataset(data_dir);
            const pipeline::TrainConfig cfg =
                train_config(epochs, lr, lr_decay, decay_every, l2, clip, batch, seed, 0.0, 3,
                             10, 64, 64, 512, true, 2);
            const pipeline::TrainResult result = pipeline::pretrain_bc_gat(ds, cfg);
            result.params.save(out_path);
            if (!log_path.empty()) result.log.save_csv(log_path);
            return result.log.epoch_mean_loss(epochs - 1);
        },
        py::arg("data_dir"), py::arg("out_path"), py::arg("epochs") = 10, py::arg("lr") = 1e-3,
        py::arg("lr_decay") = 0.5, py::arg("decay_every") = 3, py::arg("l2") = 1e-6,
        py::arg("clip") = 0.8, py::arg("batch") = 8, py::arg("seed") = 0,
        py::arg("log_path") = "",
        "Train the betweenness surrogate on a labeled dataset; returns final epoch mean loss");

    m.def(
        "train",
        [](const std::string& data_dir, const std::string& out_path, const std::string& bc_path,
           int epochs, double lr, double lr_decay, int decay_every, double l2, double clip,
           int batch, std::uint64_t seed, double val_fraction, int k_hop, int k_nn, int d_feat,
           int d_model, int mlp_hidden, bool use_bc, int hgnn_branches,
           const std::string& log_path) {
            const pipeline::Dataset ds = pipeline::load_dataset(data_dir);
            const pipeline::TrainConfig cfg =
                train_config(epochs, lr, lr_decay, decay_every, l2, clip, batch, seed,
                             val_fraction, k_hop, k_nn, d_feat, d_model, mlp_hidden, use_bc,
                             hgnn_branches);
            ad::ParamStore bc_store;
            const bool have_bc = !bc_path.empty();
            if (have_bc) bc_store = ad::ParamStore::load(bc_path);
            const pipeline::TrainResult result =
                pipeline::train_ncr_hok(ds, have_bc ? &bc_store : nullptr, cfg);
            result.params.save(out_path);
            if (!log_path.empty()) result.log.save_csv(log_path);
            return result.best_val_er;
        },
        py::arg("data_dir"), py::arg("out_path"), py::arg("bc_path") = "",
        py::arg("epochs") = 10, py::arg("lr") = 1e-3, py::arg("lr_decay") = 0.5,
        py::arg("decay_every") = 3, py::arg("l2") = 1e-6, py::arg("clip") = 0.8,
        py::arg("batch") = 8, py::arg("seed") = 0, py::arg("val_fraction") = 0.1,
        py::arg("k_hop") = 3, py::arg("k_nn") = 10, py::arg("d_feat") = 64,
        py::arg("d_model") = 64, py::arg("mlp_hidden") = 512, py::arg("use_bc") = true,
        py::arg("hgnn_branches") = 2, py::arg("log_path") = "",
        "Train the curve predictor; returns the best validation error (NaN without a split)");

    m.def(
        "predict",
        [](const DirectedGraph& g, const std::string& model_path, const std::string& bc_path) {
            const ad::ParamStore store = ad::ParamStore::load(model_path);
            const model::NcrHokParams params = model::ncr_hok_from_store(store);
            model::BcGatParams bc_params;
            const model::BcGatParams* bc_ptr = nullptr;
            if (params.cfg.use_bc) {
                if (bc_path.empty())
                    throw InputError("the model uses the betweenness feature; pass bc_path");
                bc_params = model::bc_gat_from_store(ad::ParamStore::load(bc_path));
                bc_ptr = &bc_params;
            }
            return model::ncr_hok_forward(g, bc_ptr, params, nullptr).value();
        },
        py::arg("graph"), py::arg("model_path"), py::arg("bc_path") = "",
        "Predicted controllability curve of length n - 1");

    m.def(
        "evaluate",
        [](const std::string& data_dir, const std::string& model_path,
           const std::string& bc_path, int threads) {
            const pipeline::Dataset ds = pipeline::load_dataset(data_dir);
            const ad::ParamStore store = ad::ParamStore::load(model_path);
            ad::ParamStore bc_store;
            const bool have_bc = !bc_path.empty();
            if (have_bc) bc_store = ad::ParamStore::load(bc_path);
            return report_dict(
                pipeline::evaluate(store, have_bc ? &bc_store : nullptr, ds, threads));
        },
        py::arg("data_dir"), py::arg("model_path"), py::arg("bc_path") = "",
        py::arg("threads") = 1, "Score a model over a dataset directory");

    m.def(
        "evaluate_curves",
        [](const std::string& data_dir, const std::vector<std::vector<double>>& pred) {
            const pipeline::Dataset ds = pipeline::load_dataset(data_dir);
            std::vector<RobustnessCurve> curves;
            curves.reserve(pred.size());
            for (const auto& c : pred) curves.push_back({c});
            return report_dict(pipeline::evaluate_predictions(ds, std::move(curves)));
        },
        py::arg("data_dir"), py::arg("pred_curves"),
        "Score externally produced curves against a dataset directory");
}

#include "ncrhok/models.hpp"

#include <algorithm>
#include <cmath>

#include "ncrhok/errors.hpp"
#include "ncrhok/rng.hpp"

namespace ncrhok::model {

namespace {

using ad::Groups;
using ad::make_tensor;

int parse_config_int(const std::map<std::string, std::string>& config, const std::string& key) {
    auto it = config.find(key);
    if (it == config.end()) throw InputError("model config is missing '" + key + "'");
    try {
        std::size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw InputError("model config '" + key + "' is not an integer: " + it->second);
    }
}

Tensor uniform_init(int rows, int cols, double bound, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (auto& x : v) x = -bound + 2.0 * bound * rng.next_double();
    return make_tensor(rows, cols, std::move(v));
}

/** Linear-layer init: weights fan-in uniform, bias zero. */
void init_linear(Tensor& w, Tensor& b, int d_in, int d_out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
    w = uniform_init(d_in, d_out, bound, rng);
    b = make_tensor(1, d_out, 0.0);
}

Tensor use(const Tensor& param, Tape* tape) {
    return tape ? tape->watch(param) : Tensor(param.data(), nullptr);
}

struct NeighborPlan {
    Groups groups;
    std::vector<int> entry_dst; ///< destination node per entry, aligned with members
};

NeighborPlan in_neighbor_plan(const DirectedGraph& g, bool add_self) {
    NeighborPlan plan;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        std::vector<int> members(g.in_neighbors(i).begin(), g.in_neighbors(i).end());
        if (add_self)
            members.insert(std::lower_bound(members.begin(), members.end(), i), i);
        else if (members.empty())
            members.push_back(i);
        plan.groups.push_group(members);
        plan.entry_dst.insert(plan.entry_dst.end(), members.size(), i);
    }
    return plan;
}

Tensor scalar_column(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return make_tensor(n, 1, std::move(v));
}

void check_rows(const Tensor& h, int n, const char* where) {
    if (h.rows() != n)
        throw ShapeError(std::string(where) + ": feature rows " + std::to_string(h.rows()) +
                         " do not match node count " + std::to_string(n));
}

} // namespace

std::map<std::string, std::string> ModelConfig::to_config() const {
    return {{"n", std::to_string(n)},
            {"d_feat", std::to_string(d_feat)},
            {"d_model", std::to_string(d_model)},
            {"mlp_hidden", std::to_string(mlp_hidden)},
            {"k_hop", std::to_string(k_hop)},
            {"k_nn", std::to_string(k_nn)},
            {"use_bc", use_bc ? "1" : "0"},
            {"hgnn_branches", std::to_string(hgnn_branches)}};
}

ModelConfig ModelConfig::from_config(const std::map<std::string, std::string>& config) {
    ModelConfig cfg;
    cfg.n = parse_config_int(config, "n");
    cfg.d_feat = parse_config_int(config, "d_feat");
    cfg.d_model = parse_config_int(config, "d_model");
    cfg.mlp_hidden = parse_config_int(config, "mlp_hidden");
    cfg.k_hop = parse_config_int(config, "k_hop");
    cfg.k_nn = parse_config_int(config, "k_nn");
    cfg.use_bc = parse_config_int(config, "use_bc") != 0;
    cfg.hgnn_branches = parse_config_int(config, "hgnn_branches");
    if (cfg.n < 2) throw InputError("model config n must be at least 2");
    if (cfg.d_feat < 1 || cfg.d_model < 1 || cfg.mlp_hidden < 1 || cfg.k_hop < 1 ||
        cfg.k_nn < 1)
        throw InputError("model config dimensions must be positive");
    if (cfg.hgnn_branches < 0 || cfg.hgnn_branches > 2)
        throw InputError("model config hgnn_branches must be 0, 1 or 2");
    return cfg;
}

BcGatParams init_bc_gat(std::uint64_t seed) {
    Rng rng(seed);
    BcGatParams p;
    auto head = [&rng](int d_in, int d_out) {
        BcGatHeadParams h;
        const double wb = 1.0 / std::sqrt(static_cast<double>(d_in));
        const double ab = 1.0 / std::sqrt(static_cast<double>(d_out));
        h.w = uniform_init(d_in, d_out, wb, rng);
        h.a_src = uniform_init(d_out, 1, ab, rng);
        h.a_dst = uniform_init(d_out, 1, ab, rng);
        h.b = make_tensor(1, d_out, 0.0);
        return h;
    };
    for (int k = 0; k < BcGatParams::kHeads; ++k)
        p.layer1.push_back(head(1, BcGatParams::kHidden));
    p.layer2 = head(BcGatParams::kHeads * BcGatParams::kHidden, BcGatParams::kHidden);
    init_linear(p.fc_w, p.fc_b, BcGatParams::kHidden, 1, rng);
    return p;
}

NcrHokParams init_ncr_hok(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.n < 2) throw InputError("model needs at least 2 nodes");
    Rng rng(seed);
    NcrHokParams p;
    p.cfg = cfg;

    init_linear(p.enc.w_out, p.enc.b_out, 1, cfg.d_feat, rng);
    init_linear(p.enc.w_in, p.enc.b_in, 1, cfg.d_feat, rng);
    init_linear(p.enc.w_bc, p.enc.b_bc, 1, cfg.d_feat, rng);
    init_linear(p.enc.w_fuse, p.enc.b_fuse, 3 * cfg.d_feat, cfg.d_model, rng);

    auto gat = [&rng, &cfg] {
        GatLayerParams l;
        init_linear(l.w, l.b, cfg.d_model, cfg.d_model, rng);
        l.a = uniform_init(cfg.d_model, 1, 1.0 / std::sqrt(static_cast<double>(cfg.d_model)),
                           rng);
        return l;
    };
    p.gat1 = gat();
    p.gat2 = gat();

    auto hgnn = [&rng, &cfg] {
        DualHgnnLayerParams l;
        const double ab = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
        init_linear(l.w_n, l.b_n, cfg.d_model, cfg.d_model, rng);
        l.a2 = uniform_init(cfg.d_model, 1, ab, rng);
        init_linear(l.w_e, l.b_e, cfg.d_model, cfg.d_model, rng);
        l.a3 = uniform_init(cfg.d_model, 1, ab, rng);
        return l;
    };
    if (cfg.hgnn_branches >= 1) {
        p.khop1 = hgnn();
        p.khop2 = hgnn();
    }
    if (cfg.hgnn_branches >= 2) {
        p.knn1 = hgnn();
        p.knn2 = hgnn();
    }

    init_linear(p.mlp_w1, p.mlp_b1, cfg.n * cfg.streams() * cfg.d_model, cfg.mlp_hidden, rng);
    init_linear(p.mlp_w2, p.mlp_b2, cfg.mlp_hidden, cfg.curve_len(), rng);
    return p;
}

namespace {

void register_head(const BcGatHeadParams& h, const std::string& prefix, ParamStore& store) {
    store.add(prefix + ".w", h.w);
    store.add(prefix + ".asrc", h.a_src);
    store.add(prefix + ".adst", h.a_dst);
    store.add(prefix + ".b", h.b);
}

BcGatHeadParams head_from_store(const ParamStore& store, const std::string& prefix) {
    BcGatHeadParams h;
    h.w = store.at(prefix + ".w");
    h.a_src = store.at(prefix + ".asrc");
    h.a_dst = store.at(prefix + ".adst");
    h.b = store.at(prefix + ".b");
    return h;
}

void register_hgnn(const DualHgnnLayerParams& l, const std::string& prefix, ParamStore& store) {
    store.add(prefix + ".node.w", l.w_n);
    store.add(prefix + ".node.b", l.b_n);
    store.add(prefix + ".node.a", l.a2);
    store.add(prefix + ".edge.w", l.w_e);
    store.add(prefix + ".edge.b", l.b_e);
    store.add(prefix + ".edge.a", l.a3);
}

DualHgnnLayerParams hgnn_from_store(const ParamStore& store, const std::string& prefix) {
    DualHgnnLayerParams l;
    l.w_n = store.at(prefix + ".node.w");
    l.b_n = store.at(prefix + ".node.b");
    l.a2 = store.at(prefix + ".node.a");
    l.w_e = store.at(prefix + ".edge.w");
    l.b_e = store.at(prefix + ".edge.b");
    l.a3 = store.at(prefix + ".edge.a");
    return l;
}

} // namespace

void register_bc_gat(const BcGatParams& p, ParamStore& store) {
    for (int k = 0; k < static_cast<int>(p.layer1.size()); ++k)
        register_head(p.layer1[static_cast<std::size_t>(k)], "gat1.h" + std::to_string(k),
                      store);
    register_head(p.layer2, "gat2", store);
    store.add("fc.w", p.fc_w);
    store.add("fc.b", p.fc_b);
    store.config["model"] = "bc-gat";
    store.config["heads"] = std::to_string(BcGatParams::kHeads);
    store.config["hidden"] = std::to_string(BcGatParams::kHidden);
}

BcGatParams bc_gat_from_store(const ParamStore& store) {
    auto it = store.config.find("model");
    if (it == store.config.end() || it->second != "bc-gat")
        throw InputError("parameter file does not hold a betweenness surrogate");
    BcGatParams p;
    for (int k = 0; k < BcGatParams::kHeads; ++k)
        p.layer1.push_back(head_from_store(store, "gat1.h" + std::to_string(k)));
    p.layer2 = head_from_store(store, "gat2");
    p.fc_w = store.at("fc.w");
    p.fc_b = store.at("fc.b");
    return p;
}

void register_ncr_hok(const NcrHokParams& p, ParamStore& store) {
    store.add("enc.out.w", p.enc.w_out);
    store.add("enc.out.b", p.enc.b_out);
    store.add("enc.in.w", p.enc.w_in);
    store.add("enc.in.b", p.enc.b_in);
    store.add("enc.bc.w", p.enc.w_bc);
    store.add("enc.bc.b", p.enc.b_bc);
    store.add("enc.fuse.w", p.enc.w_fuse);
    store.add("enc.fuse.b", p.enc.b_fuse);
    store.add("gat.0.w", p.gat1.w);
    store.add("gat.0.b", p.gat1.b);
    store.add("gat.0.a", p.gat1.a);
    store.add("gat.1.w", p.gat2.w);
    store.add("gat.1.b", p.gat2.b);
    store.add("gat.1.a", p.gat2.a);
    if (p.cfg.hgnn_branches >= 1) {
        register_hgnn(p.khop1, "khop.0", store);
        register_hgnn(p.khop2, "khop.1", store);
    }
    if (p.cfg.hgnn_branches >= 2) {
        register_hgnn(p.knn1, "knn.0", store);
        register_hgnn(p.knn2, "knn.1", store);
    }
    store.add("mlp.0.w", p.mlp_w1);
    store.add("mlp.0.b", p.mlp_b1);
    store.add("mlp.1.w", p.mlp_w2);
    store.add("mlp.1.b", p.mlp_b2);
    store.config["model"] = "ncr-hok";
    auto cfg = p.cfg.to_config();
    store.config.insert(cfg.begin(), cfg.end());
}

NcrHokParams ncr_hok_from_store(const ParamStore& store) {
    auto it = store.config.find("model");
    if (it == store.config.end() || it->second != "ncr-hok")
        throw InputError("parameter file does not hold a curve predictor");
    NcrHokParams p;
    p.cfg = ModelConfig::from_config(store.config);
    p.enc.w_out = store.at("enc.out.w");
    p.enc.b_out = store.at("enc.out.b");
    p.enc.w_in = store.at("enc.in.w");
    p.enc.b_in = store.at("enc.in.b");
    p.enc.w_bc = store.at("enc.bc.w");
    p.enc.b_bc = store.at("enc.bc.b");
    p.enc.w_fuse = store.at("enc.fuse.w");
    p.enc.b_fuse = store.at("enc.fuse.b");
    p.gat1.w = store.at("gat.0.w");
    p.gat1.b = store.at("gat.0.b");
    p.gat1.a = store.at("gat.0.a");
    p.gat2.w = store.at("gat.1.w");
    p.gat2.b = store.at("gat.1.b");
    p.gat2.a = store.at("gat.1.a");
    if (p.cfg.hgnn_branches >= 1) {
        p.khop1 = hgnn_from_store(store, "khop.0");
        p.khop2 = hgnn_from_store(store, "khop.1");
    }
    if (p.cfg.hgnn_branches >= 2) {
        p.knn1 = hgnn_from_store(store, "knn.0");
        p.knn2 = hgnn_from_store(store, "knn.1");
    }
    p.mlp_w1 = store.at("mlp.0.w");
    p.mlp_b1 = store.at("mlp.0.b");
    p.mlp_w2 = store.at("mlp.1.w");
    p.mlp_b2 = store.at("mlp.1.b");
    return p;
}

std::vector<double> degree_feature(const DirectedGraph& g) {
    const int n = g.num_nodes();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    int mx = 0;
    for (NodeId v = 0; v < n; ++v) mx = std::max(mx, g.total_degree(v));
    if (mx == 0) return x;
    for (NodeId v = 0; v < n; ++v)
        x[static_cast<std::size_t>(v)] =
            static_cast<double>(g.total_degree(v)) / static_cast<double>(mx);
    return x;
}

Tensor encode_features(const DirectedGraph& g, const std::vector<double>& bc,
                       const EncoderParams& p, Tape* tape) {
    const int n = g.num_nodes();
    if (static_cast<int>(bc.size()) != n)
        throw ShapeError("centrality vector length " + std::to_string(bc.size()) +
                         " does not match node count " + std::to_string(n));

    int max_out = 0, max_in = 0;
    for (NodeId v = 0; v < n; ++v) {
        max_out = std::max(max_out, g.out_degree(v));
        max_in = std::max(max_in, g.in_degree(v));
    }
    std::vector<double> xo(static_cast<std::size_t>(n), 0.0), xi(xo);
    for (NodeId v = 0; v < n; ++v) {
        if (max_out)
            xo[static_cast<std::size_t>(v)] =
                static_cast<double>(g.out_degree(v)) / static_cast<double>(max_out);
        if (max_in)
            xi[static_cast<std::size_t>(v)] =
                static_cast<double>(g.in_degree(v)) / static_cast<double>(max_in);
    }

    auto encode = [tape](const Tensor& x, const Tensor& w, const Tensor& b) {
        return ad::add_rowvec(ad::matmul(x, use(w, tape)), use(b, tape));
    };
    Tensor e_out = encode(scalar_column(std::move(xo)), p.w_out, p.b_out);
    Tensor e_in = encode(scalar_column(std::move(xi)), p.w_in, p.b_in);
    Tensor e_bc = encode(scalar_column(bc), p.w_bc, p.b_bc);
    return encode(ad::concat_cols({e_out, e_in, e_bc}), p.w_fuse, p.b_fuse);
}

Tensor gat_layer(const Tensor& h, const DirectedGraph& g, const GatLayerParams& p, Tape* tape,
                 AttentionTrace* trace) {
    check_rows(h, g.num_nodes(), "gat_layer");
    auto plan = in_neighbor_plan(g, false);
    Tensor u = ad::relu(ad::add_rowvec(ad::matmul(h, use(p.w, tape)), use(p.b, tape)));
    Tensor scores = ad::matmul(u, use(p.a, tape));
    Tensor alpha = ad::group_softmax(ad::gather_rows(scores, plan.groups.member), plan.groups);
    if (trace) {
        trace->groups = plan.groups;
        trace->alpha = alpha;
    }
    return ad::relu(ad::group_weighted_rows(alpha, u, plan.groups));
}

Tensor bc_gat_head(const Tensor& h, const DirectedGraph& g, const BcGatHeadParams& p,
                   Tape* tape, AttentionTrace* trace) {
    check_rows(h, g.num_nodes(), "bc_gat_head");
    auto plan = in_neighbor_plan(g, true);
    Tensor z = ad::matmul(h, use(p.w, tape));
    Tensor s_src = ad::matmul(z, use(p.a_src, tape));
    Tensor s_dst = ad::matmul(z, use(p.a_dst, tape));
    Tensor scores = ad::leaky_relu(ad::add(ad::gather_rows(s_src, plan.groups.member),
                                           ad::gather_rows(s_dst, plan.entry_dst)),
                                   0.2);
    Tensor alpha = ad::group_softmax(scores, plan.groups);
    if (trace) {
        trace->groups = plan.groups;
        trace->alpha = alpha;
    }
    return ad::add_rowvec(ad::group_weighted_rows(alpha, z, plan.groups), use(p.b, tape));
}

Tensor bc_gat_forward(const DirectedGraph& g, const std::vector<double>& x,
                      const BcGatParams& p, Tape* tape) {
    if (static_cast<int>(x.size()) != g.num_nodes())
        throw ShapeError("input length " + std::to_string(x.size()) +
                         " does not match node count " + std::to_string(g.num_nodes()));
    if (static_cast<int>(p.layer1.size()) != BcGatParams::kHeads)
        throw ShapeError("betweenness surrogate expects " +
                         std::to_string(BcGatParams::kHeads) + " first-layer heads");
    Tensor h0 = scalar_column(x);
    std::vector<Tensor> heads;
    heads.reserve(p.layer1.size());
    for (const auto& head : p.layer1) heads.push_back(bc_gat_head(h0, g, head, tape));
    Tensor h1 = ad::relu(ad::concat_cols(heads));
    Tensor h2 = ad::relu(bc_gat_head(h1, g, p.layer2, tape));
    return ad::add_rowvec(ad::matmul(h2, use(p.fc_w, tape)), use(p.fc_b, tape));
}

Tensor hgnn_edge_agg(const Tensor& h_nodes, const Hypergraph& hg,
                     const DualHgnnLayerParams& p, Tape* tape, AttentionTrace* trace) {
    check_rows(h_nodes, hg.n, "hgnn_edge_agg");
    Groups groups;
    for (const auto& members : hg.edges) groups.push_group(members);
    Tensor s =
        ad::relu(ad::add_rowvec(ad::matmul(h_nodes, use(p.w_n, tape)), use(p.b_n, tape)));
    Tensor scores = ad::matmul(s, use(p.a2, tape));
    Tensor alpha = ad::group_softmax(ad::gather_rows(scores, groups.member), groups);
    if (trace) {
        trace->groups = groups;
        trace->alpha = alpha;
    }
    return ad::relu(ad::group_weighted_rows(alpha, h_nodes, groups));
}

Tensor hgnn_node_agg(const Tensor& h_edges, const Hypergraph& hg,
                     const DualHgnnLayerParams& p, Tape* tape, AttentionTrace* trace) {
    check_rows(h_edges, hg.num_edges(), "hgnn_node_agg");
    Groups groups;
    for (const auto& containing : hg.node_edges) groups.push_group(containing);
    Tensor s =
        ad::relu(ad::add_rowvec(ad::matmul(h_edges, use(p.w_e, tape)), use(p.b_e, tape)));
    Tensor scores = ad::matmul(s, use(p.a3, tape));
    Tensor alpha = ad::group_softmax(ad::gather_rows(scores, groups.member), groups);
    if (trace) {
        trace->groups = groups;
        trace->alpha = alpha;
    }
    return ad::relu(ad::group_weighted_rows(alpha, h_edges, groups));
}

Tensor dual_hgnn_layer(const Tensor& h, const Hypergraph& hg, const DualHgnnLayerParams& p,
                       Tape* tape) {
    return hgnn_node_agg(hgnn_edge_agg(h, hg, p, tape), hg, p, tape);
}

Tensor ncr_hok_forward(const DirectedGraph& g, const BcGatParams* frozen_bc,
                       const NcrHokParams& p, Tape* tape, Tensor* node_embeddings) {
    const int n = g.num_nodes();
    if (n != p.cfg.n)
        throw ShapeError("graph has " + std::to_string(n) + " nodes but the model was built for " +
                         std::to_string(p.cfg.n));

    std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
    if (p.cfg.use_bc) {
        if (!frozen_bc)
            throw InputError("model expects a betweenness surrogate but none was given");
        bc = bc_gat_forward(g, degree_feature(g), *frozen_bc, nullptr).value();
    }
    Tensor f = encode_features(g, bc, p.enc, tape);

    std::vector<Tensor> streams;
    streams.push_back(gat_layer(gat_layer(f, g, p.gat1, tape), g, p.gat2, tape));

    if (p.cfg.hgnn_branches >= 1) {
        const Hypergraph hg_khop = build_khop(g, p.cfg.k_hop);
        Tensor h_khop =
            dual_hgnn_layer(dual_hgnn_layer(f, hg_khop, p.khop1, tape), hg_khop, p.khop2, tape);
        if (p.cfg.hgnn_branches >= 2) {
            const Hypergraph hg_knn = build_knn(n, p.cfg.d_model, h_khop.value(), p.cfg.k_nn);
            Tensor h_knn = dual_hgnn_layer(dual_hgnn_layer(h_khop, hg_knn, p.knn1, tape), hg_knn,
                                           p.knn2, tape);
            streams.push_back(std::move(h_khop));
            streams.push_back(std::move(h_knn));
        } else {
            streams.push_back(std::move(h_khop));
        }
    }

    Tensor cat = streams.size() == 1 ? streams.front() : ad::concat_cols(streams);
    if (node_embeddings) *node_embeddings = cat;

    Tensor flat = ad::reshape(cat, 1, n * p.cfg.streams() * p.cfg.d_model);
    Tensor hidden =
        ad::relu(ad::add_rowvec(ad::matmul(flat, use(p.mlp_w1, tape)), use(p.mlp_b1, tape)));
    Tensor out =
        ad::add_rowvec(ad::matmul(hidden, use(p.mlp_w2, tape)), use(p.mlp_b2, tape));
    return ad::sigmoid(out);
}

} // namespace ncrhok::model

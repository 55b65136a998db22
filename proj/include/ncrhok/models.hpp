#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncrhok/graph.hpp"
#include "ncrhok/hypergraph.hpp"
#include "ncrhok/params.hpp"
#include "ncrhok/tensor.hpp"

namespace ncrhok::model {

using ad::ParamStore;
using ad::Tape;
using ad::Tensor;

/**
 * Width/size configuration of the curve predictor. The MLP head consumes the
 * flattened per-node embeddings, so a trained model is tied to one node
 * count n and emits curves of length n - 1.
 */
struct ModelConfig {
    int n = 0;
    int d_feat = 64;
    int d_model = 64;
    int mlp_hidden = 512;
    int k_hop = 3;
    int k_nn = 10;
    /** Feed predicted betweenness into the encoder (zeros when disabled). */
    bool use_bc = true;
    /** Hypergraph streams next to the GAT stream: 2 = k-hop + k-NN, 1 = k-hop, 0 = none. */
    int hgnn_branches = 2;

    int curve_len() const { return n - 1; }
    int streams() const { return 1 + hgnn_branches; }

    std::map<std::string, std::string> to_config() const;
    static ModelConfig from_config(const std::map<std::string, std::string>& config);
};

/** Three scalar feature encoders plus the fusing linear map. */
struct EncoderParams {
    Tensor w_out, b_out; ///< 1 x d_feat, 1 x d_feat
    Tensor w_in, b_in;
    Tensor w_bc, b_bc;
    Tensor w_fuse, b_fuse; ///< 3*d_feat x d_model, 1 x d_model
};

/** Context-vector attention layer over graph neighborhoods. */
struct GatLayerParams {
    Tensor w; ///< d_in x d_out
    Tensor b; ///< 1 x d_out
    Tensor a; ///< d_out x 1 context vector scoring transformed neighbors
};

/** One dual hypergraph attention layer: node side then edge side. */
struct DualHgnnLayerParams {
    Tensor w_n, b_n, a2; ///< score members of a hyperedge
    Tensor w_e, b_e, a3; ///< score hyperedges around a node
};

/** Single attention head in the betweenness surrogate (source/dest scoring). */
struct BcGatHeadParams {
    Tensor w;     ///< d_in x d_out
    Tensor a_src; ///< d_out x 1
    Tensor a_dst; ///< d_out x 1
    Tensor b;     ///< 1 x d_out, added after aggregation
};

/**
 * Betweenness-centrality surrogate: 4 attention heads on the scalar degree
 * feature (concatenated to 256), one 256->64 head, then a 64->1 linear
 * readout. Attention neighborhoods include a self-loop.
 */
struct BcGatParams {
    static constexpr int kHeads = 4;
    static constexpr int kHidden = 64;

    std::vector<BcGatHeadParams> layer1;
    BcGatHeadParams layer2;
    Tensor fc_w, fc_b;
};

/**
 * Full curve predictor: encoder, 2 GAT layers, 2+2 dual HGNN layers, MLP.
 * The hypergraph layer pairs exist only for the streams cfg enables.
 */
struct NcrHokParams {
    ModelConfig cfg;
    EncoderParams enc;
    GatLayerParams gat1, gat2;
    DualHgnnLayerParams khop1, khop2, knn1, knn2;
    Tensor mlp_w1, mlp_b1; ///< (n*streams*d_model) x hidden
    Tensor mlp_w2, mlp_b2; ///< hidden x (n-1)
};

/** Optional peek at one attention application for inspection in tests. */
struct AttentionTrace {
    ad::Groups groups;
    Tensor alpha;
};

BcGatParams init_bc_gat(std::uint64_t seed);
NcrHokParams init_ncr_hok(const ModelConfig& cfg, std::uint64_t seed);

/** Registers every tensor under its canonical name and embeds the config. */
void register_bc_gat(const BcGatParams& p, ParamStore& store);
void register_ncr_hok(const NcrHokParams& p, ParamStore& store);

/** Rebinds parameter structs onto tensors owned by a loaded store. */
BcGatParams bc_gat_from_store(const ParamStore& store);
NcrHokParams ncr_hok_from_store(const ParamStore& store);

/** Per-node total degree normalized by the graph maximum (zeros if empty). */
std::vector<double> degree_feature(const DirectedGraph& g);

/**
 * Per-node initial embedding: out-degree, in-degree (each normalized by the
 * graph's max of that kind) and the given centrality scalar go through their
 * own linear encoders; the concatenation is fused linearly to d_model.
 */
Tensor encode_features(const DirectedGraph& g, const std::vector<double>& bc,
                       const EncoderParams& p, Tape* tape);

/**
 * Attention over in-neighborhoods: neighbors are transformed, scored by the
 * context vector, softmax-weighted and aggregated, with a ReLU on top. A
 * node without in-neighbors attends to itself.
 */
Tensor gat_layer(const Tensor& h, const DirectedGraph& g, const GatLayerParams& p, Tape* tape,
                 AttentionTrace* trace = nullptr);

/** One surrogate head: edge scores leaky-ReLU(a_src.z_j + a_dst.z_i). */
Tensor bc_gat_head(const Tensor& h, const DirectedGraph& g, const BcGatHeadParams& p,
                   Tape* tape, AttentionTrace* trace = nullptr);

/** Full surrogate on a scalar per-node input; returns n x 1 predictions. */
Tensor bc_gat_forward(const DirectedGraph& g, const std::vector<double>& x,
                      const BcGatParams& p, Tape* tape);

/** Hyperedge embeddings: attention-weighted sums of raw member features. */
Tensor hgnn_edge_agg(const Tensor& h_nodes, const Hypergraph& hg,
                     const DualHgnnLayerParams& p, Tape* tape,
                     AttentionTrace* trace = nullptr);

/** Node embeddings: attention-weighted sums over containing hyperedges. */
Tensor hgnn_node_agg(const Tensor& h_edges, const Hypergraph& hg,
                     const DualHgnnLayerParams& p, Tape* tape,
                     AttentionTrace* trace = nullptr);

/** Edge aggregation feeding node aggregation; keeps the feature width. */
Tensor dual_hgnn_layer(const Tensor& h, const Hypergraph& hg, const DualHgnnLayerParams& p,
                       Tape* tape);

/**
 * Full forward pass to a curve of length n - 1 in (0, 1). The surrogate runs
 * detached (its parameters never receive gradients); it may be null when the
 * config disables the betweenness feature. When node_embeddings is given it
 * receives the per-node stream concatenation before the MLP.
 */
Tensor ncr_hok_forward(const DirectedGraph& g, const BcGatParams* frozen_bc,
                       const NcrHokParams& p, Tape* tape, Tensor* node_embeddings = nullptr);

} // namespace ncrhok::model

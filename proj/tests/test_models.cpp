#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <vector>

#include "ncrhok/errors.hpp"
#include "ncrhok/models.hpp"
#include "ncrhok/netgen.hpp"
#include "ncrhok/rng.hpp"

using namespace ncrhok;
using namespace ncrhok::model;
namespace fs = std::filesystem;

namespace {

DirectedGraph fixture_graph(int n, double k_avg, std::uint64_t seed) {
    GenSpec spec;
    spec.topology = Topology::Er;
    spec.n = n;
    spec.k_avg = k_avg;
    spec.seed = seed;
    return generate(spec);
}

Tensor random_features(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (auto& x : v) x = -1.0 + 2.0 * rng.next_double();
    return ad::make_tensor(rows, cols, std::move(v));
}

Tensor fixed_weights(int rows, int cols) {
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 0.2 + 0.9 * static_cast<double>(i % 7) - 1.7 * static_cast<double>(i % 4);
    return ad::make_tensor(rows, cols, std::move(w));
}

/**
 * Finite-difference check over every tensor in the store: the builder must
 * produce the same scalar loss in value mode (null tape) and record mode.
 * samples_per_tensor = 0 checks every element.
 */
void check_param_grads(ParamStore& store, const std::function<Tensor(Tape*)>& build,
                       int samples_per_tensor = 0) {
    for (auto& [name, t] : store.items())
        std::fill(t.grad().begin(), t.grad().end(), 0.0);
    {
        Tape tape;
        Tensor loss = build(&tape);
        REQUIRE(loss.size() == 1);
        tape.backward(loss);
    }
    const double eps = 1e-5;
    for (auto& [name, t] : store.items()) {
        std::vector<std::size_t> picks;
        if (samples_per_tensor <= 0 || t.size() <= static_cast<std::size_t>(samples_per_tensor)) {
            picks.resize(t.size());
            std::iota(picks.begin(), picks.end(), 0);
        } else {
            for (int s = 0; s < samples_per_tensor; ++s)
                picks.push_back(t.size() * static_cast<std::size_t>(s) /
                                static_cast<std::size_t>(samples_per_tensor));
            picks.push_back(t.size() - 1);
        }
        for (std::size_t j : picks) {
            const double save = t.value()[j];
            t.value()[j] = save + eps;
            const double up = build(nullptr).value()[0];
            t.value()[j] = save - eps;
            const double dn = build(nullptr).value()[0];
            t.value()[j] = save;
            const double fd = (up - dn) / (2.0 * eps);
            const double an = t.grad()[j];
            const double tol = 1e-4 * std::max({1.0, std::abs(fd), std::abs(an)});
            INFO("param ", name, " element ", j, ": analytic ", an, " numeric ", fd);
            CHECK(std::abs(an - fd) <= tol);
        }
    }
}

void check_alpha_groups_sum_to_one(const AttentionTrace& trace) {
    for (int gi = 0; gi + 1 < static_cast<int>(trace.groups.offsets.size()); ++gi) {
        double sum = 0.0;
        for (int e = trace.groups.offsets[static_cast<std::size_t>(gi)];
             e < trace.groups.offsets[static_cast<std::size_t>(gi) + 1]; ++e)
            sum += trace.alpha.value()[static_cast<std::size_t>(e)];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

ModelConfig tiny_config(int n) {
    ModelConfig cfg;
    cfg.n = n;
    cfg.d_feat = 3;
    cfg.d_model = 5;
    cfg.mlp_hidden = 7;
    cfg.k_hop = 2;
    cfg.k_nn = 3;
    return cfg;
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("surrogate layer sizes match the fixed architecture") {
    auto p = init_bc_gat(42);
    ParamStore store;
    register_bc_gat(p, store);

    auto prefix_scalars = [&store](const std::string& prefix) {
        std::size_t total = 0;
        for (const auto& [name, t] : store.items())
            if (name.rfind(prefix, 0) == 0) total += t.size();
        return total;
    };
    CHECK(prefix_scalars("gat1.") == 1024);
    CHECK(prefix_scalars("gat2.") == 16576);
    CHECK(prefix_scalars("fc.") == 65);
    CHECK(store.num_scalars() == 1024 + 16576 + 65);
}

TEST_CASE("encoder maps equal node profiles to equal rows") {
    DirectedGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(3, 0);
    auto cfg = tiny_config(4);
    auto p = init_ncr_hok(cfg, 7);
    // nodes 1 and 2: identical in/out degree; give them the same centrality
    std::vector<double> bc = {0.9, 0.3, 0.3, 0.1};
    Tensor f = encode_features(g, bc, p.enc, nullptr);
    CHECK(f.rows() == 4);
    CHECK(f.cols() == cfg.d_model);
    for (int c = 0; c < cfg.d_model; ++c)
        CHECK(f.value()[1 * cfg.d_model + c] == f.value()[2 * cfg.d_model + c]);

    CHECK_THROWS_AS(encode_features(g, {0.1, 0.2}, p.enc, nullptr), ShapeError);
}

TEST_CASE("encoder is permutation-equivariant") {
    auto g = fixture_graph(9, 2.5, 311);
    const int n = g.num_nodes();
    std::vector<double> bc(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bc[static_cast<std::size_t>(i)] = 0.1 * i;

    // relabel v -> n-1-v
    DirectedGraph gp(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.out_neighbors(u)) gp.add_edge(n - 1 - u, n - 1 - v);
    std::vector<double> bcp(bc.rbegin(), bc.rend());

    auto p = init_ncr_hok(tiny_config(n), 13);
    Tensor f = encode_features(g, bc, p.enc, nullptr);
    Tensor fp = encode_features(gp, bcp, p.enc, nullptr);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 5; ++c)
            CHECK(fp.value()[static_cast<std::size_t>(n - 1 - i) * 5 + c] ==
                  f.value()[static_cast<std::size_t>(i) * 5 + c]);
}

TEST_CASE("graph attention aggregates transformed in-neighbors") {
    auto cfg = tiny_config(3);
    auto p = init_ncr_hok(cfg, 21);
    DirectedGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(2, 1);

    Tensor h = random_features(3, cfg.d_model, 5);
    AttentionTrace trace;
    Tensor out = gat_layer(h, g, p.gat1, nullptr, &trace);
    CHECK(out.rows() == 3);
    CHECK(out.cols() == cfg.d_model);
    check_alpha_groups_sum_to_one(trace);

    // nodes 0 and 2 have no in-neighbors: they attend to themselves, so the
    // output equals their own transformed feature relu(W h + b)
    Tensor u = ad::relu(ad::add_rowvec(ad::matmul(h, p.gat1.w), p.gat1.b));
    for (int c = 0; c < cfg.d_model; ++c) {
        CHECK(out.value()[0 * cfg.d_model + c] ==
              doctest::Approx(u.value()[0 * cfg.d_model + c]));
        CHECK(out.value()[2 * cfg.d_model + c] ==
              doctest::Approx(u.value()[2 * cfg.d_model + c]));
    }

    // node 1 sees both sources; its output is a convex mix passed through relu
    const double a0 = trace.alpha.value()[trace.groups.offsets[1]];
    const double a2 = trace.alpha.value()[trace.groups.offsets[1] + 1];
    CHECK(a0 + a2 == doctest::Approx(1.0));
    for (int c = 0; c < cfg.d_model; ++c) {
        const double expect = std::max(0.0, a0 * u.value()[0 * cfg.d_model + c] +
                                                a2 * u.value()[2 * cfg.d_model + c]);
        CHECK(out.value()[1 * cfg.d_model + c] == doctest::Approx(expect));
    }
}

TEST_CASE("identical neighbor features attend uniformly") {
    auto cfg = tiny_config(3);
    auto p = init_ncr_hok(cfg, 23);
    DirectedGraph g(3);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    auto h = ad::make_tensor(3, cfg.d_model, 0.7);
    AttentionTrace trace;
    gat_layer(h, g, p.gat1, nullptr, &trace);
    const int lo = trace.groups.offsets[2];
    CHECK(trace.alpha.value()[static_cast<std::size_t>(lo)] == doctest::Approx(0.5));
    CHECK(trace.alpha.value()[static_cast<std::size_t>(lo) + 1] == doctest::Approx(0.5));
}

TEST_CASE("zeroed context vectors give exactly uniform attention") {
    auto g = fixture_graph(10, 3.0, 99);
    auto cfg = tiny_config(10);
    auto p = init_ncr_hok(cfg, 31);
    std::fill(p.gat1.a.value().begin(), p.gat1.a.value().end(), 0.0);
    Tensor h = random_features(10, cfg.d_model, 77);
    AttentionTrace trace;
    gat_layer(h, g, p.gat1, nullptr, &trace);
    for (int gi = 0; gi + 1 < static_cast<int>(trace.groups.offsets.size()); ++gi) {
        const int lo = trace.groups.offsets[static_cast<std::size_t>(gi)];
        const int hi = trace.groups.offsets[static_cast<std::size_t>(gi) + 1];
        for (int e = lo; e < hi; ++e)
            CHECK(trace.alpha.value()[static_cast<std::size_t>(e)] == 1.0 / (hi - lo));
    }

    auto hg = build_khop(g, 2);
    std::fill(p.khop1.a2.value().begin(), p.khop1.a2.value().end(), 0.0);
    AttentionTrace et;
    hgnn_edge_agg(h, hg, p.khop1, nullptr, &et);
    for (int gi = 0; gi + 1 < static_cast<int>(et.groups.offsets.size()); ++gi) {
        const int lo = et.groups.offsets[static_cast<std::size_t>(gi)];
        const int hi = et.groups.offsets[static_cast<std::size_t>(gi) + 1];
        for (int e = lo; e < hi; ++e)
            CHECK(et.alpha.value()[static_cast<std::size_t>(e)] == 1.0 / (hi - lo));
    }
}

TEST_CASE("hyperedge aggregation honors singleton and symmetric cases") {
    auto cfg = tiny_config(4);
    auto p = init_ncr_hok(cfg, 37);
    Hypergraph hg = make_hypergraph(4, {{2}, {0, 1}, {0, 1, 3}});

    auto h = random_features(4, cfg.d_model, 11);
    // make rows 0 and 1 identical so their attention must split evenly
    for (int c = 0; c < cfg.d_model; ++c)
        h.value()[1 * cfg.d_model + c] = h.value()[0 * cfg.d_model + c];

    AttentionTrace trace;
    Tensor he = hgnn_edge_agg(h, hg, p.khop1, nullptr, &trace);
    CHECK(he.rows() == 3);
    check_alpha_groups_sum_to_one(trace);
    CHECK(trace.alpha.value()[static_cast<std::size_t>(trace.groups.offsets[0])] == 1.0);
    const int lo = trace.groups.offsets[1];
    CHECK(trace.alpha.value()[static_cast<std::size_t>(lo)] == doctest::Approx(0.5));
    CHECK(trace.alpha.value()[static_cast<std::size_t>(lo) + 1] == doctest::Approx(0.5));

    AttentionTrace nt;
    Tensor hn = hgnn_node_agg(he, hg, p.khop1, nullptr, &nt);
    CHECK(hn.rows() == 4);
    check_alpha_groups_sum_to_one(nt);
    // node 2 sits in exactly one hyperedge
    CHECK(nt.alpha.value()[static_cast<std::size_t>(nt.groups.offsets[2])] == 1.0);
}

TEST_CASE("attention weights sum to one on random inputs everywhere") {
    auto g = fixture_graph(12, 3.0, 1234);
    auto cfg = tiny_config(12);
    auto p = init_ncr_hok(cfg, 41);
    Tensor h = random_features(12, cfg.d_model, 3);

    AttentionTrace t1;
    gat_layer(h, g, p.gat1, nullptr, &t1);
    check_alpha_groups_sum_to_one(t1);

    auto hg = build_khop(g, 2);
    AttentionTrace t2, t3;
    Tensor he = hgnn_edge_agg(h, hg, p.khop1, nullptr, &t2);
    hgnn_node_agg(he, hg, p.khop1, nullptr, &t3);
    check_alpha_groups_sum_to_one(t2);
    check_alpha_groups_sum_to_one(t3);

    auto bc = init_bc_gat(43);
    Tensor x = random_features(12, 1, 9);
    AttentionTrace t4;
    bc_gat_head(x, g, bc.layer1[0], nullptr, &t4);
    check_alpha_groups_sum_to_one(t4);
    // the surrogate's neighborhoods include the node itself
    for (int i = 0; i + 1 < static_cast<int>(t4.groups.offsets.size()); ++i) {
        const int lo = t4.groups.offsets[static_cast<std::size_t>(i)];
        const int hi = t4.groups.offsets[static_cast<std::size_t>(i) + 1];
        CHECK(std::find(t4.groups.member.begin() + lo, t4.groups.member.begin() + hi, i) !=
              t4.groups.member.begin() + hi);
    }
}

TEST_CASE("gradients flow through a two-layer graph attention stack") {
    auto g = fixture_graph(7, 2.0, 55);
    auto cfg = tiny_config(7);
    auto p = init_ncr_hok(cfg, 47);
    ParamStore store;
    store.add("e.ow", p.enc.w_out);
    store.add("e.ob", p.enc.b_out);
    store.add("e.iw", p.enc.w_in);
    store.add("e.ib", p.enc.b_in);
    store.add("e.bw", p.enc.w_bc);
    store.add("e.bb", p.enc.b_bc);
    store.add("e.fw", p.enc.w_fuse);
    store.add("e.fb", p.enc.b_fuse);
    store.add("g0.w", p.gat1.w);
    store.add("g0.b", p.gat1.b);
    store.add("g0.a", p.gat1.a);
    store.add("g1.w", p.gat2.w);
    store.add("g1.b", p.gat2.b);
    store.add("g1.a", p.gat2.a);

    std::vector<double> bc(7);
    for (int i = 0; i < 7; ++i) bc[static_cast<std::size_t>(i)] = 0.05 + 0.11 * i;
    Tensor w = fixed_weights(7, cfg.d_model);
    check_param_grads(store, [&](Tape* tape) {
        Tensor f = encode_features(g, bc, p.enc, tape);
        Tensor h = gat_layer(gat_layer(f, g, p.gat1, tape), g, p.gat2, tape);
        return ad::sum_all(ad::mul(h, w));
    });
}

TEST_CASE("gradients flow through a two-layer dual hypergraph stack") {
    auto g = fixture_graph(8, 2.5, 66);
    auto hg = build_khop(g, 2);
    auto cfg = tiny_config(8);
    auto p = init_ncr_hok(cfg, 53);
    ParamStore store;
    store.add("l0.wn", p.khop1.w_n);
    store.add("l0.bn", p.khop1.b_n);
    store.add("l0.a2", p.khop1.a2);
    store.add("l0.we", p.khop1.w_e);
    store.add("l0.be", p.khop1.b_e);
    store.add("l0.a3", p.khop1.a3);
    store.add("l1.wn", p.khop2.w_n);
    store.add("l1.bn", p.khop2.b_n);
    store.add("l1.a2", p.khop2.a2);
    store.add("l1.we", p.khop2.w_e);
    store.add("l1.be", p.khop2.b_e);
    store.add("l1.a3", p.khop2.a3);

    Tensor h0 = random_features(8, cfg.d_model, 15);
    Tensor w = fixed_weights(8, cfg.d_model);
    check_param_grads(store, [&](Tape* tape) {
        Tensor h = dual_hgnn_layer(dual_hgnn_layer(h0, hg, p.khop1, tape), hg, p.khop2, tape);
        return ad::sum_all(ad::mul(h, w));
    });
}

TEST_CASE("gradients flow through the betweenness surrogate") {
    auto g = fixture_graph(7, 2.0, 77);
    auto p = init_bc_gat(59);
    ParamStore store;
    register_bc_gat(p, store);

    std::vector<double> x = degree_feature(g);
    Tensor target = random_features(7, 1, 19);
    check_param_grads(
        store,
        [&](Tape* tape) {
            return ad::mse_loss(bc_gat_forward(g, x, p, tape), target);
        },
        3);
}

TEST_CASE("full forward emits a curve in the open unit interval") {
    auto g = fixture_graph(9, 2.5, 88);
    auto cfg = tiny_config(9);
    auto p = init_ncr_hok(cfg, 61);
    auto bc = init_bc_gat(62);

    Tensor out = ncr_hok_forward(g, &bc, p, nullptr);
    CHECK(out.rows() == 1);
    CHECK(out.cols() == 8);
    for (double v : out.value()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }

    Tensor again = ncr_hok_forward(g, &bc, p, nullptr);
    CHECK(out.value() == again.value());

    auto wrong = fixture_graph(8, 2.5, 88);
    CHECK_THROWS_AS(ncr_hok_forward(wrong, &bc, p, nullptr), ShapeError);
}

TEST_CASE("node embeddings are equivariant up to rounding; readout is not") {
    auto g = fixture_graph(8, 2.5, 313);
    const int n = g.num_nodes();
    DirectedGraph gp(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.out_neighbors(u)) gp.add_edge(n - 1 - u, n - 1 - v);

    auto cfg = tiny_config(n);
    auto p = init_ncr_hok(cfg, 67);
    auto bc = init_bc_gat(68);

    Tensor emb, embp;
    ncr_hok_forward(g, &bc, p, nullptr, &emb);
    ncr_hok_forward(gp, &bc, p, nullptr, &embp);
    const int d = emb.cols();
    REQUIRE(embp.cols() == d);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) {
            const double a = emb.value()[static_cast<std::size_t>(i) * d + c];
            const double b = embp.value()[static_cast<std::size_t>(n - 1 - i) * d + c];
            CHECK(a == doctest::Approx(b).epsilon(1e-7));
        }
}

TEST_CASE("gradients flow through the whole curve predictor") {
    auto g = fixture_graph(8, 2.5, 414);
    auto cfg = tiny_config(8);
    auto p = init_ncr_hok(cfg, 71);
    auto bc = init_bc_gat(72);
    ParamStore store;
    register_ncr_hok(p, store);

    std::vector<double> tv(7);
    for (int i = 0; i < 7; ++i) tv[static_cast<std::size_t>(i)] = 0.15 + 0.1 * i;
    Tensor target = ad::make_tensor(1, 7, tv);
    check_param_grads(
        store,
        [&](Tape* tape) {
            return ad::smooth_l1_loss(ncr_hok_forward(g, &bc, p, tape), target);
        },
        2);
}

TEST_CASE("parameters survive a disk round trip bit-for-bit") {
    const auto path = (fs::temp_directory_path() / "ncrhok_model_roundtrip.bin").string();
    auto g = fixture_graph(7, 2.0, 515);
    auto cfg = tiny_config(7);
    auto p = init_ncr_hok(cfg, 73);
    auto bc = init_bc_gat(74);

    ParamStore store;
    register_ncr_hok(p, store);
    store.save(path);
    auto loaded = ParamStore::load(path);
    auto p2 = ncr_hok_from_store(loaded);
    CHECK(p2.cfg.n == 7);
    CHECK(p2.cfg.d_model == cfg.d_model);

    Tensor a = ncr_hok_forward(g, &bc, p, nullptr);
    Tensor b = ncr_hok_forward(g, &bc, p2, nullptr);
    CHECK(a.value() == b.value());
    fs::remove(path);

    const auto bcpath = (fs::temp_directory_path() / "ncrhok_bc_roundtrip.bin").string();
    ParamStore bs;
    register_bc_gat(bc, bs);
    bs.save(bcpath);
    auto bc2 = bc_gat_from_store(ParamStore::load(bcpath));
    Tensor y1 = bc_gat_forward(g, degree_feature(g), bc, nullptr);
    Tensor y2 = bc_gat_forward(g, degree_feature(g), bc2, nullptr);
    CHECK(y1.value() == y2.value());
    fs::remove(bcpath);

    ParamStore wrongKind;
    register_bc_gat(init_bc_gat(1), wrongKind);
    CHECK_THROWS_AS(ncr_hok_from_store(wrongKind), InputError);
}

TEST_CASE("model config round trips and validates") {
    auto cfg = tiny_config(20);
    cfg.use_bc = false;
    cfg.hgnn_branches = 1;
    auto m = cfg.to_config();
    auto back = ModelConfig::from_config(m);
    CHECK(back.n == 20);
    CHECK(back.d_feat == 3);
    CHECK(back.d_model == 5);
    CHECK(back.mlp_hidden == 7);
    CHECK(back.k_hop == 2);
    CHECK(back.k_nn == 3);
    CHECK(back.use_bc == false);
    CHECK(back.hgnn_branches == 1);
    CHECK(back.curve_len() == 19);
    CHECK(back.streams() == 2);

    m.erase("d_model");
    CHECK_THROWS_AS(ModelConfig::from_config(m), InputError);
    m["d_model"] = "sixty-four";
    CHECK_THROWS_AS(ModelConfig::from_config(m), InputError);
    m["d_model"] = "64";
    m["n"] = "1";
    CHECK_THROWS_AS(ModelConfig::from_config(m), InputError);
    m["n"] = "20";
    m["hgnn_branches"] = "3";
    CHECK_THROWS_AS(ModelConfig::from_config(m), InputError);
}

TEST_CASE("config switches drop the betweenness input and hypergraph streams") {
    auto g = fixture_graph(8, 2.5, 616);
    auto bc = init_bc_gat(99);

    auto run = [&](bool use_bc, int branches) {
        auto cfg = tiny_config(8);
        cfg.use_bc = use_bc;
        cfg.hgnn_branches = branches;
        auto p = init_ncr_hok(cfg, 80);
        Tensor out = ncr_hok_forward(g, use_bc ? &bc : nullptr, p, nullptr);
        CHECK(out.rows() == 1);
        CHECK(out.cols() == 7);
        for (double v : out.value()) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }

        ParamStore store;
        register_ncr_hok(p, store);
        CHECK(store.contains("khop.0.node.w") == (branches >= 1));
        CHECK(store.contains("knn.0.node.w") == (branches >= 2));
        auto p2 = ncr_hok_from_store(store);
        Tensor again = ncr_hok_forward(g, use_bc ? &bc : nullptr, p2, nullptr);
        CHECK(out.value() == again.value());
        return store.num_scalars();
    };

    const auto full = run(true, 2);
    const auto khop_only = run(true, 1);
    const auto plain = run(false, 0);
    CHECK(full > khop_only);
    CHECK(khop_only > plain);

    // Disabling the betweenness feature changes inputs, never parameter shapes.
    auto cfg = tiny_config(8);
    cfg.use_bc = false;
    auto p = init_ncr_hok(cfg, 80);
    ParamStore store;
    register_ncr_hok(p, store);
    CHECK(store.contains("enc.bc.w"));
    CHECK_THROWS_AS(
        ncr_hok_forward(g, nullptr, init_ncr_hok(tiny_config(8), 80), nullptr), InputError);

    // Gradients still flow with the surrogate off and the k-NN stream absent.
    auto cfg1 = tiny_config(8);
    cfg1.use_bc = false;
    cfg1.hgnn_branches = 1;
    auto p1 = init_ncr_hok(cfg1, 81);
    ParamStore s1;
    register_ncr_hok(p1, s1);
    Tensor target = ad::make_tensor(1, 7, 0.4);
    check_param_grads(
        s1,
        [&](Tape* tape) {
            return ad::smooth_l1_loss(ncr_hok_forward(g, nullptr, p1, tape), target);
        },
        1);
}

} // TEST_SUITE

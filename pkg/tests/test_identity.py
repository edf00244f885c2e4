import random

import pytest

from graphseq import (
    AttributedGraph,
    ReindexConfig,
    SamplerConfig,
    build_codebook,
    build_vocab,
    codebook_from_partition,
    decode_node,
    detokenize,
    encode_node,
    isomorphic,
    load_partition,
    sample,
    serialize_graph,
    with_identity_attrs,
    with_label_attrs,
)

from conftest import random_connected_graph


def _ring(n):
    return AttributedGraph(num_nodes=n, edges=tuple((i, (i + 1) % n) for i in range(n)))


def test_nine_nodes_three_clusters():
    g = _ring(9)
    labels = [0, 0, 0, 1, 1, 1, 2, 2, 2]
    cb = build_codebook(g, k=2, strategy="given-labels", labels=labels, dataset_tag="t")
    codes = {cb.code(v) for v in range(9)}
    assert len(codes) == 9
    assert cb.slot_sizes == (3, 3)


def test_k1_gives_unique_token_per_node():
    g = _ring(5)
    cb = build_codebook(g, k=1, strategy="given-labels", labels=[0] * 5, dataset_tag="t")
    tokens = {encode_node(cb, v) for v in range(5)}
    assert len(tokens) == 5
    assert all(len(t) == 1 for t in tokens)


def test_species_style_labels_and_token_format():
    g = _ring(6)
    labels = [17, 17, 20, 17, 27, 20]
    cb = build_codebook(g, k=2, strategy="given-labels", labels=labels, dataset_tag="ogbl-ppa")
    assert encode_node(cb, 0) == ("ogbl-ppa#node#0#17", "ogbl-ppa#node#1#0")
    # local indices run in ascending global-id order within a cluster
    assert encode_node(cb, 3) == ("ogbl-ppa#node#0#17", "ogbl-ppa#node#1#2")
    assert cb.slot_sizes == (3, 3)
    for v in range(6):
        assert decode_node(cb, encode_node(cb, v)) == v


def test_token_pair_decodes_to_a_single_node():
    # a cluster large enough that local index 1959 exists
    n = 2500
    g = AttributedGraph(num_nodes=n)
    labels = [17] * 2000 + [20] * 500
    cb = build_codebook(g, k=2, strategy="given-labels", labels=labels, dataset_tag="ogbl-ppa")
    node = decode_node(cb, ("ogbl-ppa#node#0#17", "ogbl-ppa#node#1#1959"))
    assert node == 1959
    assert encode_node(cb, node) == ("ogbl-ppa#node#0#17", "ogbl-ppa#node#1#1959")


def test_decode_unknown_tuple_is_an_error():
    g = _ring(4)
    cb = build_codebook(g, k=2, strategy="given-labels", labels=[0, 0, 1, 1], dataset_tag="t")
    with pytest.raises(ValueError, match="not in codebook"):
        decode_node(cb, ("t#node#0#0", "t#node#1#9"))
    with pytest.raises(ValueError, match="slot"):
        decode_node(cb, ("t#node#1#0", "t#node#0#0"))


def test_capacity_check():
    # 2 label clusters capped at 2 local indices cannot cover 5 nodes
    g = _ring(5)
    with pytest.raises(ValueError, match="cannot cover"):
        build_codebook(
            g,
            k=2,
            strategy="given-labels",
            labels=[0, 0, 0, 1, 1],
            max_cluster=2,
            dataset_tag="t",
        )


def test_oversized_label_cluster_rejected():
    g = _ring(6)
    with pytest.raises(ValueError, match="exceeds max_cluster"):
        build_codebook(
            g,
            k=2,
            strategy="given-labels",
            labels=[0, 0, 0, 0, 1, 1],
            max_cluster=3,
            dataset_tag="t",
        )


def test_bfs_partition_respects_cluster_cap():
    rng = random.Random(1)
    g = random_connected_graph(rng, n_min=40, n_max=60, max_node_width=0, max_edge_width=0)
    cb = build_codebook(g, k=2, strategy="bfs-partition", max_cluster=8, seed=3, dataset_tag="t")
    sizes = {}
    for v in range(g.num_nodes):
        sizes[cb.partition[v]] = sizes.get(cb.partition[v], 0) + 1
    assert max(sizes.values()) <= 8
    assert sum(sizes.values()) == g.num_nodes
    cb2 = build_codebook(g, k=2, strategy="bfs-partition", max_cluster=8, seed=3, dataset_tag="t")
    assert cb2 == cb


def test_k3_decomposition_is_injective():
    g = _ring(30)
    cb = build_codebook(g, k=3, strategy="bfs-partition", max_cluster=10, seed=0, dataset_tag="t")
    codes = {cb.code(v) for v in range(30)}
    assert len(codes) == 30
    assert all(len(c) == 3 for c in codes)
    for v in range(30):
        assert decode_node(cb, encode_node(cb, v)) == v


def test_given_labels_requires_labels():
    with pytest.raises(ValueError, match="label column"):
        build_codebook(_ring(3), k=2, strategy="given-labels")


def test_partition_file_roundtrip(tmp_path):
    path = tmp_path / "part.tsv"
    path.write_text("0\t5\n1\t5\n2\t7\n")
    labels = load_partition(path)
    assert labels == [5, 5, 7]
    cb = codebook_from_partition(labels, k=2, dataset_tag="t")
    assert cb.slot_sizes == (2, 2)


def test_partition_file_must_be_dense(tmp_path):
    path = tmp_path / "part.tsv"
    path.write_text("0\t1\n2\t1\n")
    with pytest.raises(ValueError, match="cover node ids"):
        load_partition(path)


def test_codebook_file_format(tmp_path):
    g = _ring(4)
    cb = build_codebook(g, k=2, strategy="given-labels", labels=[1, 1, 2, 2], dataset_tag="t")
    path = tmp_path / "cb.tsv"
    cb.save(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "0\tt#node#0#1\tt#node#1#0"
    assert len(lines) == 4


def test_identity_attrs_replace_node_attrs():
    parent = _ring(12)
    cb = build_codebook(parent, k=2, strategy="bfs-partition", max_cluster=4, dataset_tag="t")
    cfg = SamplerConfig(mode="node-ego", depth=2, neighbors=2, max_seq_len=256, seed=0)
    sub = with_identity_attrs(sample(parent, (3,), cfg), cb)
    assert sub.graph.node_attr_width == 2
    assert sub.graph.node_defaults == (-1, -1)
    for local, gid in enumerate(sub.origin_ids):
        assert sub.graph.node_attrs[local] == cb.code(gid)


def test_identity_encoded_sample_roundtrips_with_unique_nodes():
    parent = _ring(20)
    cb = build_codebook(parent, k=2, strategy="bfs-partition", max_cluster=5, dataset_tag="t")
    cfg = SamplerConfig(mode="node-ego", depth=3, neighbors=2, max_seq_len=256, seed=4)
    sub = with_identity_attrs(sample(parent, (7,), cfg), cb)
    rcfg = ReindexConfig()
    vocab = build_vocab([sub.graph], "t", rcfg, node_attr_style="inline")
    grid = serialize_graph(sub.graph, vocab, "prolonged", rcfg, 2)
    report = detokenize(grid, vocab, node_attr_width=2, node_defaults=(-1, -1))
    assert isomorphic(report.graph, sub.graph)
    # identity blocks stay decodable back to parent-graph node ids
    decoded = {decode_node(cb, encode_node(cb, gid)) for gid in sub.origin_ids}
    assert decoded == set(sub.origin_ids)


def test_label_only_ablation_still_roundtrips_structure():
    parent = _ring(16)
    labels = [v % 3 for v in range(16)]
    cfg = SamplerConfig(mode="node-ego", depth=3, neighbors=2, max_seq_len=256, seed=9)
    sub = with_label_attrs(sample(parent, (5,), cfg), labels)
    assert sub.graph.node_attr_width == 1
    rcfg = ReindexConfig()
    vocab = build_vocab([sub.graph], "t", rcfg, node_attr_style="inline")
    grid = serialize_graph(sub.graph, vocab, "prolonged", rcfg, 3)
    report = detokenize(grid, vocab, node_attr_width=1, node_defaults=(-1,))
    # labels no longer identify nodes uniquely, but the structure (and the
    # coarse labels themselves) still come back isomorphic
    assert isomorphic(report.graph, sub.graph)


def test_slot_vocab_growth_is_bounded():
    g = _ring(64)
    cb = build_codebook(g, k=2, strategy="bfs-partition", max_cluster=8, seed=0, dataset_tag="t")
    assert sum(cb.slot_sizes) <= 2 * 8 + 2 * (64 // 8)

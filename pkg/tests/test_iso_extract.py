import json
from itertools import product

import networkx as nx
import pytest

from src.core.errors import ContractError
from src.core.graph_core import Partition, from_networkx, relabel
from src.core.graph_library import (
    complete,
    empty,
    path,
    petersen,
    random_graph,
    random_permutation,
    rook,
    shrikhande,
    srg25_pair,
)
from src.core.iso_extract import (
    IsoResult,
    IsoVerdict,
    StepKind,
    ZChain,
    a2_decide,
    extend_chain,
    read_gamma,
    verify_iso,
)
from src.core.oracle import isomorphism_bruteforce
from src.core.reduction import make_partitioner
from src.core.settings import Settings

oracle = make_partitioner("oracle")
a1prime = make_partitioner("a1prime")


class TestVerifyIso:
    def test_identity(self):
        assert verify_iso(complete(3), complete(3), [0, 1, 2])

    def test_relabeling_is_verified(self, rng):
        for _ in range(5):
            g = random_graph(6, 0.5, rng)
            perm = random_permutation(6, rng)
            assert verify_iso(g, relabel(g, perm), perm)

    def test_wrong_map(self):
        assert not verify_iso(path(3), path(3), [1, 0, 2])
        assert not verify_iso(path(3), complete(3), [0, 1, 2])

    @pytest.mark.parametrize("gamma", [[0, 0, 1], [0, 1], [0, 1, 3]])
    def test_rejects_non_bijections(self, gamma):
        with pytest.raises(ContractError):
            verify_iso(path(3), path(3), gamma)


class TestZChain:
    def test_cross_edges_grow_by_level(self):
        chain = ZChain.start(complete(3), complete(3), 0, 3).extended(1, 4)
        assert chain.level == 1
        assert chain.cross_edges(0) == {(0, 3)}
        assert chain.cross_edges() == {(0, 3), (0, 4), (1, 3)}
        assert len(chain.edge_set()) == 9

    def test_pinned_degrees_are_distinct(self):
        chain = ZChain.start(complete(3), complete(3), 0, 3).extended(1, 4)
        assert chain.graph().degrees() == [4, 3, 2, 4, 3, 2]

    @pytest.mark.parametrize(
        "sigmas, taus",
        [
            ((), ()),
            ((0, 1), (3,)),
            ((0, 0), (3, 4)),
            ((3,), (3,)),
            ((0,), (2,)),
        ],
    )
    def test_validation(self, sigmas, taus):
        with pytest.raises(ContractError):
            ZChain(complete(3), complete(3), sigmas, taus)

    def test_order_mismatch(self):
        with pytest.raises(ContractError):
            ZChain.start(complete(3), complete(4), 0, 3)


class TestExtendChain:
    def test_done_when_paired(self):
        chain = ZChain.start(complete(2), complete(2), 0, 2)
        step = extend_chain(chain, Partition(((0, 2), (1, 3))))
        assert step.kind is StepKind.DONE

    def test_stuck_at_last_level(self):
        chain = ZChain.start(complete(2), complete(2), 0, 2)
        step = extend_chain(chain, Partition(((0, 1, 2, 3),)))
        assert step.kind is StepKind.STUCK

    def test_extends_with_first_free_tau(self):
        chain = ZChain.start(complete(3), complete(3), 0, 3)
        partition = Partition(((0, 3), (1, 2, 4, 5)))
        step = extend_chain(chain, partition)
        assert step.kind is StepKind.EXTENDED
        assert (step.chain.sigmas, step.chain.taus) == ((0, 1), (3, 4))

        retry = extend_chain(chain, partition, exclude=[4])
        assert retry.chain.taus == (3, 5)
        assert extend_chain(chain, partition, exclude=[4, 5]).kind is StepKind.STUCK

    def test_size_mismatch(self):
        chain = ZChain.start(complete(3), complete(3), 0, 3)
        with pytest.raises(ContractError):
            extend_chain(chain, Partition.discrete(4))


class TestReadGamma:
    def test_pairs(self):
        chain = ZChain.start(complete(3), complete(3), 0, 4)
        assert read_gamma(chain, Partition(((0, 4), (1, 3), (2, 5)))) == [1, 0, 2]

    def test_unpaired(self):
        chain = ZChain.start(complete(3), complete(3), 0, 3)
        with pytest.raises(ContractError):
            read_gamma(chain, Partition(((0, 1, 3, 4), (2, 5))))


def _connected_atlas(n):
    return [
        from_networkx(G)
        for G in nx.graph_atlas_g()
        if G.number_of_nodes() == n and nx.is_connected(G)
    ]


def _assert_oracle_agrees(g1, g2, settings):
    result = a2_decide(g1, g2, oracle, settings)
    assert result.verdict is not IsoVerdict.DONT_KNOW
    if isomorphism_bruteforce(g1, g2) is None:
        assert result.verdict is IsoVerdict.NO
    else:
        assert result.verdict is IsoVerdict.YES
        assert verify_iso(g1, g2, result.gamma)


class TestDecide:
    @pytest.mark.parametrize("g", [complete(2), complete(3), empty(2), path(4)])
    def test_yes_on_equal_graphs(self, g, settings):
        result = a2_decide(g, g, oracle, settings)
        assert result.verdict is IsoVerdict.YES
        assert verify_iso(g, g, result.gamma)
        assert result.reason == "isomorphism verified"

    def test_no_on_degree_mismatch(self, settings):
        result = a2_decide(path(3), complete(3), oracle, settings)
        assert result.verdict is IsoVerdict.NO
        assert result.reason == "degree partition mismatch"
        assert result.gamma is None

    @pytest.mark.parametrize("partitioner", [oracle, a1prime], ids=["oracle", "a1prime"])
    def test_relabeled_petersen(self, partitioner, rng, settings):
        g = petersen()
        h = relabel(g, random_permutation(10, rng))
        result = a2_decide(g, h, partitioner, settings)
        assert result.verdict is IsoVerdict.YES
        assert verify_iso(g, h, result.gamma)

    @pytest.mark.parametrize("n", [4, 7, 9])
    def test_chain_stays_short(self, n, rng, settings):
        for _ in range(3):
            g = random_graph(n, 0.5, rng)
            h = relabel(g, random_permutation(n, rng))
            result = a2_decide(g, h, oracle, settings)
            assert result.verdict is IsoVerdict.YES
            # trace holds Z_0 plus one entry per extension
            assert len(result.trace) - 1 <= n - 2
            assert result.partitioner_calls >= len(result.trace)

    def test_no_retries_needed_with_orbits(self, rng):
        g = petersen()
        h = relabel(g, random_permutation(10, rng))
        result = a2_decide(g, h, oracle, Settings(max_retries=0))
        assert result.verdict is IsoVerdict.YES

    def test_threads_agree(self, rng):
        g = petersen()
        h = relabel(g, random_permutation(10, rng))
        sequential = a2_decide(g, h, oracle, Settings(threads=1))
        threaded = a2_decide(g, h, oracle, Settings(threads=3))
        assert sequential.gamma == threaded.gamma

    def test_never_yes_on_non_isomorphic_pairs(self, rng):
        for _ in range(15):
            g = random_graph(6, 0.5, rng)
            h = random_graph(6, 0.5, rng)
            result = a2_decide(g, h, a1prime, Settings())
            if isomorphism_bruteforce(g, h) is None:
                assert result.verdict is not IsoVerdict.YES

    @pytest.mark.parametrize("n", [3, 4])
    def test_complete_with_orbit_partitions(self, n, settings):
        graphs = [from_networkx(G) for G in nx.graph_atlas_g() if G.number_of_nodes() == n]
        for g1, g2 in product(graphs, repeat=2):
            result = a2_decide(g1, g2, oracle, settings)
            expected = IsoVerdict.YES if isomorphism_bruteforce(g1, g2) else IsoVerdict.NO
            assert result.verdict is expected

    @pytest.mark.slow
    def test_orbits_decide_every_connected_pair_on_five_vertices(self, settings):
        graphs = _connected_atlas(5)
        for g1, g2 in product(graphs, repeat=2):
            _assert_oracle_agrees(g1, g2, settings)

    @pytest.mark.slow
    def test_orbits_decide_sampled_pairs_on_six_vertices(self, rng, settings):
        graphs = _connected_atlas(6)
        for _ in range(150):
            g1 = rng.choice(graphs)
            g2 = rng.choice(graphs)
            _assert_oracle_agrees(g1, g2, settings)
            _assert_oracle_agrees(g1, relabel(g1, random_permutation(6, rng)), settings)

    @pytest.mark.slow
    def test_shrikhande_vs_rook(self):
        result = a2_decide(shrikhande(), rook(4), a1prime, Settings())
        assert result.verdict is IsoVerdict.NO

    @pytest.mark.slow
    def test_srg25_pair_is_never_yes(self):
        first, second = srg25_pair()
        result = a2_decide(first, second, a1prime, Settings())
        assert result.verdict in (IsoVerdict.NO, IsoVerdict.DONT_KNOW)


class TestRecords:
    def test_round_trip(self, settings):
        result = a2_decide(path(4), path(4), oracle, settings)
        record = json.loads(json.dumps(result.to_record()))
        assert IsoResult.from_record(record) == result

    def test_malformed(self):
        with pytest.raises(ContractError, match="malformed"):
            IsoResult.from_record({"verdict": "maybe"})

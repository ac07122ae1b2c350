"""Unit tests for architecture models"""
import itertools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from modules.archgraph import (
    UNREACHABLE,
    TopologyError,
    TopologyGraph,
    bus,
    canonical_graph_form,
    canonical_labeling,
    derive_architecture_graph,
    induced_subgraph,
    keystone,
    mesh,
    parallella,
    ring,
)
from modules.perm import Permutation
from oracles import brute_force_isomorphic


def manhattan(cols, a, b):
    return abs(a // cols - b // cols) + abs(a % cols - b % cols)


class TestBuilders:
    """Topology builders"""

    @pytest.mark.parametrize("rows,cols,nodes,links", [(2, 2, 4, 4), (4, 4, 16, 24), (1, 1, 1, 0), (2, 3, 6, 7)])
    def test_mesh_sizes(self, rows, cols, nodes, links):
        topology = mesh(rows, cols)
        assert topology.num_pes == nodes
        assert len(topology.links) == links

    def test_zero_dimension_is_rejected(self):
        with pytest.raises(TopologyError):
            mesh(0, 3)

    def test_keystone_and_parallella(self):
        k = keystone()
        assert k.num_pes == 12
        assert set(k.types) == {"ARM", "DSP"}
        assert k.types.count("ARM") == 4
        p = parallella()
        assert p.num_pes == 16
        assert set(p.types) == {"Epiphany"}

    def test_bus_edge_cases(self):
        assert bus({"A": 1}).num_pes == 1
        with pytest.raises(TopologyError):
            bus({})
        with pytest.raises(TopologyError):
            bus({"A": 0})

    def test_invalid_links_and_labels(self):
        topology = TopologyGraph()
        topology.add_pe("RISC")
        topology.add_pe("RISC")
        with pytest.raises(TopologyError):
            topology.add_link(0, 0)
        with pytest.raises(TopologyError):
            topology.add_link(0, 5)
        with pytest.raises(TopologyError):
            topology.add_link(0, 1, resource="")
        with pytest.raises(TopologyError):
            topology.add_pe("")

    def test_networkx_view_is_a_copy(self):
        topology = mesh(2, 2)
        view = topology.to_networkx()
        view.remove_edge(0, 1)
        assert len(topology.links) == 4


class TestDerivedGraph:
    """Complete labeled graphs derived from topologies"""

    def test_2x2_mesh_labels(self):
        graph = derive_architecture_graph(mesh(2, 2))
        assert graph.edge_label(0, 1) == (1, "noc")
        assert graph.edge_label(0, 3) == (2, "")
        assert graph.edge_label(1, 2) == (2, "")

    @pytest.mark.parametrize("rows,cols", [(1, 5), (2, 2), (3, 3), (3, 4), (4, 4), (5, 5)])
    def test_mesh_hops_are_manhattan_distances(self, rows, cols):
        graph = derive_architecture_graph(mesh(rows, cols))
        n = rows * cols
        for a, b in itertools.combinations(range(n), 2):
            assert graph.hops[a, b] == manhattan(cols, a, b)

    def test_4x4_hop_range(self, mesh4x4_graph):
        hops = {int(mesh4x4_graph.hops[a, b]) for a, b in itertools.combinations(range(16), 2)}
        assert hops == set(range(1, 7))

    def test_hops_satisfy_triangle_inequality(self, mesh4x4_graph):
        hops = mesh4x4_graph.hops
        for a, b, c in itertools.permutations(range(16), 3):
            assert hops[a, c] <= hops[a, b] + hops[b, c]

    def test_bus_has_a_single_edge_label(self):
        graph = derive_architecture_graph(keystone())
        assert graph.label_vocabulary == ((1, "bus"),)

    def test_weighted_links_use_shortest_paths(self):
        topology = TopologyGraph.from_parts(["A", "A", "A"], [(0, 1, "noc", 1), (1, 2, "noc", 1), (0, 2, "noc", 5)])
        graph = derive_architecture_graph(topology)
        assert graph.hops[0, 2] == 2
        assert graph.resources[0][2] == "noc"

    def test_disconnected_topology_needs_the_flag(self):
        with pytest.raises(TopologyError):
            derive_architecture_graph(TopologyGraph.from_parts(["A", "A"], []))
        graph = derive_architecture_graph(TopologyGraph.from_parts(["A", "A"], [], allow_disconnected=True))
        assert graph.edge_label(0, 1) == (-1, UNREACHABLE)

    def test_ring_hops(self):
        graph = derive_architecture_graph(ring(6))
        assert graph.hops[0, 3] == 3
        assert graph.hops[0, 5] == 1

    def test_diagonal_has_no_label(self, mesh2x2_graph):
        with pytest.raises(TopologyError):
            mesh2x2_graph.edge_label(1, 1)
        assert mesh2x2_graph.label_codes[2][2] == -1


class TestInducedSubgraph:
    """Sub-architectures"""

    def test_full_vertex_set_gives_the_same_graph(self, mesh4x4_graph):
        assert induced_subgraph(mesh4x4_graph, range(16)) == mesh4x4_graph

    def test_adjacent_pair(self, mesh4x4_graph):
        sub = induced_subgraph(mesh4x4_graph, [0, 1])
        assert sub.n == 2
        assert sub.edge_label(0, 1) == (1, "noc")

    def test_opposite_corners(self, mesh4x4_graph):
        sub = induced_subgraph(mesh4x4_graph, [0, 15])
        assert sub.edge_label(0, 1) == (6, "")
        assert sub.origin == (0, 15)

    def test_empty_and_out_of_range_subsets(self, mesh4x4_graph):
        with pytest.raises(TopologyError):
            induced_subgraph(mesh4x4_graph, [])
        with pytest.raises(TopologyError):
            induced_subgraph(mesh4x4_graph, [3, 16])


class TestCanonicalForm:
    """Certificates identify graphs up to isomorphism"""

    @staticmethod
    def hetero_graph():
        topology = mesh(2, 4)
        types = ["ARM", "DSP", "DSP", "ARM", "RISC", "DSP", "ARM", "RISC"]
        retyped = TopologyGraph.from_parts(types, topology.links)
        return derive_architecture_graph(retyped)

    def test_certificate_is_invariant_under_relabeling(self):
        rng = np.random.default_rng(42)
        for graph in (derive_architecture_graph(mesh(2, 4)), self.hetero_graph()):
            certificate = canonical_graph_form(graph)
            for _ in range(50):
                sigma = Permutation.from_image(rng.permutation(8).tolist())
                assert canonical_graph_form(graph.relabel(sigma)) == certificate

    def test_single_nodes_with_different_types_differ(self):
        a = derive_architecture_graph(bus({"ARM": 1}))
        b = derive_architecture_graph(bus({"DSP": 1}))
        assert canonical_graph_form(a) != canonical_graph_form(b)

    def test_two_by_three_blocks_are_equivalent(self, mesh4x4_graph):
        top = induced_subgraph(mesh4x4_graph, [0, 1, 2, 4, 5, 6])
        middle = induced_subgraph(mesh4x4_graph, [4, 5, 6, 8, 9, 10])
        assert canonical_graph_form(top) == canonical_graph_form(middle)

    def test_three_pe_paths_share_a_form(self, mesh4x4_graph):
        # hop labels (1, 1, 2) on both: a straight line and a bent corner are the same path
        line = induced_subgraph(mesh4x4_graph, [0, 1, 2])
        corner = induced_subgraph(mesh4x4_graph, [0, 1, 4])
        assert canonical_graph_form(line) == canonical_graph_form(corner)
        assert brute_force_isomorphic(line, corner)

    def test_different_hop_patterns_differ(self, mesh4x4_graph):
        line = induced_subgraph(mesh4x4_graph, [0, 1, 2])
        spread = induced_subgraph(mesh4x4_graph, [0, 1, 3])
        assert canonical_graph_form(line) != canonical_graph_form(spread)
        assert not brute_force_isomorphic(line, spread)

    def test_forms_agree_with_isomorphism_oracle(self, mesh3x3_graph):
        rng = np.random.default_rng(23)
        subsets = [sorted(rng.choice(9, size=4, replace=False).tolist()) for _ in range(12)]
        graphs = [induced_subgraph(mesh3x3_graph, s) for s in subsets]
        for a, b in itertools.combinations(graphs, 2):
            assert (canonical_graph_form(a) == canonical_graph_form(b)) == brute_force_isomorphic(a, b)

    def test_canonical_order_relabels_to_the_same_graph(self):
        rng = np.random.default_rng(9)
        graph = self.hetero_graph()
        sigma = Permutation.from_image(rng.permutation(8).tolist())
        other = graph.relabel(sigma)
        first, second = canonical_labeling(graph), canonical_labeling(other)
        assert sorted(first.order) == list(range(8))
        # position i holds node first.order[i] in one graph and second.order[i] in the other
        for i, j in itertools.combinations(range(8), 2):
            assert graph.edge_label(first.order[i], first.order[j]) == other.edge_label(second.order[i], second.order[j])
        assert [graph.types[v] for v in first.order] == [other.types[v] for v in second.order]

    def test_keystone_certificate_is_fast_and_stable(self, keystone_graph):
        assert canonical_graph_form(keystone_graph) == canonical_graph_form(keystone_graph)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

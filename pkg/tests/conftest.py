"""Shared fixtures for the test suite."""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules import archgraph
from modules.schemas import ArchitectureDocument, TaskGraphDocument, load_document

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(REPO_ROOT, "data")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: heavy acceptance checks (deselect with -m 'not slow')")


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def mesh2x2_graph():
    return archgraph.derive_architecture_graph(archgraph.mesh(2, 2))


@pytest.fixture(scope="session")
def clockwise2x2_graph():
    """2x2 mesh numbered clockwise from the top left: PE_1 PE_2 over PE_4 PE_3."""
    links = [(0, 1, "noc", 1), (1, 2, "noc", 1), (2, 3, "noc", 1), (3, 0, "noc", 1)]
    return archgraph.derive_architecture_graph(archgraph.TopologyGraph.from_parts(["RISC"] * 4, links))


@pytest.fixture(scope="session")
def mesh3x3_graph():
    return archgraph.derive_architecture_graph(archgraph.mesh(3, 3))


@pytest.fixture(scope="session")
def mesh4x4_graph():
    return archgraph.derive_architecture_graph(archgraph.mesh(4, 4))


@pytest.fixture(scope="session")
def keystone_graph():
    return archgraph.derive_architecture_graph(archgraph.keystone())


@pytest.fixture(scope="session")
def hetero_bus_graph():
    path = os.path.join(DATA_DIR, "architectures", "hetero_bus.json")
    return archgraph.derive_architecture_graph(load_document(path, ArchitectureDocument).to_topology())


@pytest.fixture(scope="session")
def taskgraph_documents():
    """Every bundled task graph document, keyed by file stem."""
    folder = os.path.join(DATA_DIR, "taskgraphs")
    documents = {}
    for filename in sorted(os.listdir(folder)):
        if filename.endswith(".json"):
            documents[filename[:-5]] = load_document(os.path.join(folder, filename), TaskGraphDocument)
    return documents

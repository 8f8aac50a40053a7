"""
Pytest configuration and shared fixtures
"""
import os
import sys
import json
import pytest
from unittest.mock import patch

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from structures import chain, metric_from_pairs, ordered_graph, poset, relational, tournament  # noqa: E402


@pytest.fixture
def mock_env_vars(tmp_path):
    """Mock environment variables for testing."""
    with patch.dict(os.environ, {
        'CANRP_MAX_COLORINGS': '1000',
        'CANRP_MAX_POINTS': '256',
        'CANRP_WORKERS': '1',
        'CANRP_QUASIORDER_CAP': '4',
        'CANRP_LOG_DIR': str(tmp_path / 'logs'),
    }):
        yield


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document to a temporary file and return its path."""
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)
    return _write


@pytest.fixture
def path_graph():
    """Ordered path 0-1-2."""
    return ordered_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def k2():
    """Single edge on two vertices."""
    return ordered_graph(2, [(0, 1)])


@pytest.fixture
def two_cycle_tournament():
    """Two vertices with arcs both ways (not a tournament)."""
    return tournament(2, [(0, 1), (1, 0)])


@pytest.fixture
def chains():
    """Chains on 0..7 vertices, indexed by size."""
    return [chain(n) for n in range(8)]


@pytest.fixture
def two_chain_poset():
    """Poset a < b."""
    return poset(2, [(0, 1)], add_loops=True)


@pytest.fixture
def unit_pair():
    """Two points at distance 1."""
    return metric_from_pairs(2, {(0, 1): 1})


@pytest.fixture
def one_point():
    """One-point metric space."""
    return metric_from_pairs(1, {})


@pytest.fixture
def binary_relation():
    """Factory for structures with a single binary relation."""
    def _make(n, pairs):
        return relational(n, (2,), [pairs])
    return _make

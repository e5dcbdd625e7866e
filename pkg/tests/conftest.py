import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from netclear import Network, Obligation


@pytest.fixture
def t3() -> Network:
    """The triangle A->B:5, B->C:3, C->A:7 used throughout."""
    return Network.ingest(
        [Obligation("A", "B", 5), Obligation("B", "C", 3), Obligation("C", "A", 7)]
    )


@pytest.fixture
def p4() -> Network:
    """Four dealers: 1->2:4, 2->3:2, 3->1:5, 3->4:3, 4->3:3."""
    return Network.ingest(
        [
            Obligation("1", "2", 4),
            Obligation("2", "3", 2),
            Obligation("3", "1", 5),
            Obligation("3", "4", 3),
            Obligation("4", "3", 3),
        ]
    )

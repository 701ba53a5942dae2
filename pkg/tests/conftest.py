import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from betti_scope.generators import (
    cycle,
    disjoint_union,
    full_simplex,
    hollow_triangle,
    path,
    random_flag,
    solid_triangle,
    sphere_boundary,
    torus_grid,
)

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def named_complexes():
    return {
        "hollow_triangle": hollow_triangle(),
        "solid_triangle": solid_triangle(),
        "path5": path(5),
        "cycle6": cycle(6),
        "tetra_boundary": sphere_boundary(2),
        "s3": sphere_boundary(3),
        "simplex3": full_simplex(3),
        "torus3": torus_grid(3),
        "torus4": torus_grid(4),
        "two_triangles": disjoint_union(hollow_triangle(), 2),
        "flag": random_flag(20, 4, seed=7),
    }


@pytest.fixture(scope="session")
def zoo():
    return named_complexes()


flag_complexes = st.builds(
    random_flag,
    n=st.integers(1, 14),
    d=st.integers(1, 5),
    seed=st.integers(0, 2**31 - 1),
)

import pytest

from partoracle.applications import is_planar_exact
from partoracle.generators import GeneratorError, GeneratorSpec, generate, grid, random_regular, random_triangulation, tree_union


def test_grid_three_by_three():
    g = grid(3, 3)
    assert g.n == 9 and g.m == 12 and is_planar_exact(g)


def test_random_regular_ten():
    g = random_regular(10, 3, 0)
    assert g.m == 15 and all(g.degree(v) == 3 for v in range(10))


def test_triangulation_fifty():
    g = random_triangulation(50, 8, 0)
    assert is_planar_exact(g) and g.m <= 144


@pytest.mark.parametrize("seed", range(4))
def test_planar_families_euler_bound(seed):
    for g in (random_triangulation(2000, 8, seed), grid(40, 50)):
        assert g.m <= 3 * g.n - 6
        assert max(g.degree(v) for v in range(g.n)) <= g.d


def test_triangulation_spot_check_large():
    assert is_planar_exact(random_triangulation(10_000, 8, 1))


def test_generators_deterministic():
    for spec in (GeneratorSpec("random_triangulation", 300, seed=4), GeneratorSpec("random_regular", 300, 3, 4), GeneratorSpec("tree_union", 300, 6, 4)):
        assert generate(spec).edges() == generate(spec).edges()


def test_tree_union_degrees():
    g = tree_union(500, 6, 1)
    assert max(g.degree(v) for v in range(g.n)) <= 6
    assert g.m >= 499


@pytest.mark.parametrize(
    "spec",
    [
        GeneratorSpec("random_regular", 7, 3),
        GeneratorSpec("random_regular", 3, 3),
        GeneratorSpec("grid", 7),
        GeneratorSpec("grid", 0),
        GeneratorSpec("nope", 10),
        GeneratorSpec("tree_union", 10, 3),
    ],
)
def test_infeasible_specs(spec):
    with pytest.raises(GeneratorError):
        generate(spec)


def test_generate_grid_shape():
    g = generate(GeneratorSpec("grid", 100))
    assert g.n == 100 and g.m == 180

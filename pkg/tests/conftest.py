import importlib.resources

import pytest

from modbench.algebras import FiniteAlgebra, Signature, parse_algebra
from modbench.checks import PWContext

CORPUS = ("one", "z2", "lattice2", "chain3", "semilattice2", "pixley3")


def load_corpus(name: str) -> FiniteAlgebra:
    res = importlib.resources.files("modbench") / "data" / f"{name}.alg"
    return parse_algebra(res.read_text())


@pytest.fixture(scope="session")
def corpus():
    return {name: load_corpus(name) for name in CORPUS}


@pytest.fixture(scope="session")
def z2(corpus):
    return corpus["z2"]


@pytest.fixture(scope="session")
def lattice2(corpus):
    return corpus["lattice2"]


@pytest.fixture(scope="session")
def chain3(corpus):
    return corpus["chain3"]


@pytest.fixture(scope="session")
def semilattice2(corpus):
    return corpus["semilattice2"]


@pytest.fixture(scope="session")
def pixley3(corpus):
    return corpus["pixley3"]


@pytest.fixture(scope="session")
def one(corpus):
    return corpus["one"]


_CTX_CACHE: dict = {}


@pytest.fixture(scope="session")
def pw_context():
    """Per-algebra PWContext cache shared by the whole session (free
    algebras are the expensive part)."""

    def get(algebra: FiniteAlgebra) -> PWContext:
        if algebra not in _CTX_CACHE:
            _CTX_CACHE[algebra] = PWContext(algebra)
        return _CTX_CACHE[algebra]

    return get


# ---------------------------------------------------------------------------
# Random small algebras (deterministic)


def random_algebra(rng, size=None, max_arity=3, n_ops=None,
                   name="rand") -> FiniteAlgebra:
    size = size if size is not None else rng.choice([2, 2, 3, 3, 4])
    n_ops = n_ops if n_ops is not None else rng.choice([1, 1, 2])
    ops = []
    tables = {}
    for i in range(n_ops):
        arity = rng.choice(range(1, max_arity + 1))
        ops.append((f"f{i}", arity))
        tables[f"f{i}"] = [rng.randrange(size) for _ in range(size ** arity)]
    return FiniteAlgebra(name, size, Signature(tuple(ops)), tables)


MAJ2 = [0, 0, 0, 1, 0, 1, 1, 1]        # majority on {0,1}
MEDIAN3 = None  # filled lazily


def median3_table():
    # median of the 3-chain = majority lattice term
    table = []
    for x in range(3):
        for y in range(3):
            for z in range(3):
                table.append(sorted((x, y, z))[1])
    return table


def jonsson_friendly_algebra(rng, idx: int) -> FiniteAlgebra:
    """Small algebras likely to be congruence distributive: majority-style
    ternary operations with random extra structure."""
    kind = idx % 3
    if kind == 0:
        size = 2
        tables = {"m": list(MAJ2)}
        ops = [("m", 3)]
        if rng.random() < 0.7:
            ops.append(("g", rng.choice([1, 2])))
            tables["g"] = [rng.randrange(size)
                           for _ in range(size ** ops[-1][1])]
    elif kind == 1:
        size = 3
        tables = {"m": median3_table()}
        ops = [("m", 3)]
        if rng.random() < 0.7:
            ops.append(("g", 1))
            tables["g"] = [rng.randrange(3) for _ in range(3)]
    else:
        size = rng.choice([2, 3])
        ops = [("f", 3)]
        # ternary discriminator pattern restricted to the chosen size
        table = []
        for x in range(size):
            for y in range(size):
                for z in range(size):
                    table.append(z if x == y else x)
        tables = {"f": table}
    return FiniteAlgebra(f"cd{idx}", size, Signature(tuple(ops)), tables)

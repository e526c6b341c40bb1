"""Known seed families and bundled seed matrices."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .dsrg import DsrgParams
from .family import FamilySpec


@dataclass(frozen=True)
class CatalogRow:
    """One published family.

    ``g1`` and ``g2`` are the printed parameter tuples of the first two
    terms. The n-th term is printed as
    ``(2^n (a 2^n - b), a 2^n - b, t, lam, t)``; ``a`` and ``b`` hold those
    two constants.
    """

    index: int
    g1: tuple[int, int, int, int, int]
    g2: tuple[int, int, int, int, int]
    a: int
    b: int

    @property
    def seed(self) -> DsrgParams:
        return DsrgParams.from_seq(self.g1)

    def gn(self, n: int) -> tuple[int, int, int, int, int]:
        deg = self.a * 2**n - self.b
        _, _, t, lam, mu = self.g1
        return (2**n * deg, deg, t, lam, mu)


TABLE = (
    CatalogRow(1, (6, 3, 2, 1, 2), (28, 7, 2, 1, 2), 2, 1),
    CatalogRow(2, (8, 4, 3, 1, 3), (40, 10, 3, 1, 3), 3, 2),
    CatalogRow(3, (10, 5, 3, 2, 3), (44, 11, 3, 2, 3), 3, 1),
    CatalogRow(4, (12, 6, 4, 2, 4), (56, 14, 4, 2, 4), 4, 2),
    CatalogRow(5, (14, 7, 4, 3, 4), (60, 15, 4, 3, 4), 4, 1),
    CatalogRow(6, (16, 8, 5, 3, 5), (72, 18, 5, 3, 5), 5, 2),
    CatalogRow(7, (18, 9, 5, 4, 5), (76, 19, 5, 4, 5), 5, 1),
    CatalogRow(8, (18, 9, 6, 3, 6), (84, 21, 6, 3, 6), 6, 3),
    CatalogRow(9, (20, 10, 6, 4, 6), (88, 22, 6, 4, 6), 6, 2),
    CatalogRow(10, (22, 11, 6, 5, 6), (92, 23, 6, 5, 6), 6, 1),
    CatalogRow(11, (24, 12, 7, 5, 7), (104, 26, 7, 5, 7), 7, 2),
)


def row(index: int) -> CatalogRow:
    if not 1 <= index <= len(TABLE):
        raise KeyError(f"family index must be in 1..{len(TABLE)}, got {index}")
    return TABLE[index - 1]


def _fixture_name(index: int, part: str) -> str:
    return f"family{index:02d}_{part}.txt"


def fixture_indices() -> list[int]:
    """Catalog rows with bundled (A1, B1, C1) matrices."""
    data = resources.files("dsrgkron") / "data"
    out = []
    for r in TABLE:
        if all((data / _fixture_name(r.index, part)).is_file() for part in ("a1", "b1", "c1")):
            out.append(r.index)
    return out


def load_fixture(index: int) -> FamilySpec:
    """Bundled seed triple for catalog row ``index``, validated on load."""
    from .fileio import parse_text

    r = row(index)
    data = resources.files("dsrgkron") / "data"
    mats = []
    for part in ("a1", "b1", "c1"):
        f = data / _fixture_name(index, part)
        if not f.is_file():
            raise FileNotFoundError(f"no bundled seed matrices for family {index}")
        mats.append(parse_text(f.read_text()))
    return FamilySpec(r.seed, *mats)

from pathlib import Path

import pytest
import sympy

from dualis.exact_algebra import GF, QQ

ROOT = Path(__file__).resolve().parent.parent
CORPUS = sorted((ROOT / "corpus").glob("*.scn"))
NEGATIVE = ROOT / "tests" / "data" / "negative_control.scn"


def to_sympy(p, gens):
    """Independent re-reading of a polynomial by sympy (over Q)."""
    text = str(p).replace("^", "**")
    return sympy.Poly(sympy.sympify(text, locals={str(g): g for g in gens}), *gens)


@pytest.fixture
def Q():
    return QQ


@pytest.fixture
def F101():
    return GF(101)

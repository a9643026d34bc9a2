import glob
import os

import pytest

from nanoprover.inductive import define_fixpoint
from nanoprover.kernel import Clause, Ctor, FixpointDef, FunApp, Var
from nanoprover.prelude import standard_env

CORPUS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "corpus")

RANGE_SUM_DEF = FixpointDef(
    "range_sum", (("n", "nat"),), "nat", 0,
    (Clause("O", (), Ctor("O")),
     Clause("S", (("p", "nat"),),
            FunApp("add", (FunApp("range_sum", (Var("p", "nat"),)),
                           Ctor("S", (Var("p", "nat"),)))))),
)


@pytest.fixture(scope="session")
def env():
    return standard_env()


@pytest.fixture(scope="session")
def range_env(env):
    return define_fixpoint(RANGE_SUM_DEF, env)


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS_DIR, name)


def corpus_files() -> list[str]:
    return sorted(glob.glob(os.path.join(CORPUS_DIR, "*.npv")))


def read_corpus(name: str) -> str:
    with open(corpus_path(name), encoding="utf-8") as fh:
        return fh.read()


def replay_theorems(name: str, mode=None):
    """Replay a corpus script, returning the full Theorem objects.

    The session engine registers only statement records; this re-runs qed on
    each completed proof so tests can inspect the derivations.
    """
    from nanoprover.kernel import CalculusMode
    from nanoprover.session import execute_item, initial_state
    from nanoprover.surface import QedItem, parse_script
    from nanoprover.tactics import qed

    st = initial_state(mode or CalculusMode.INTUITIONISTIC)
    theorems = []
    for item in parse_script(read_corpus(name)).items:
        if isinstance(item, QedItem) and st.proof is not None:
            theorems.append((qed(st.proof.state, st.proof.name), st.env, st.mode))
        st = execute_item(st, item)
    return theorems

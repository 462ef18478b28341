"""Past-time separation logic: heap and history algebras, temporal
predicates, a proof-outline checker and an exhaustive interleaving explorer
for small concurrent structures."""

__version__ = "0.1.0"

from .sepalg import (ABORT, Computation, Ghost, Heap, History, State, UniverseConfig,
                     compose, enumerate_states)

__all__ = ["ABORT", "Computation", "Ghost", "Heap", "History", "State", "UniverseConfig",
           "compose", "enumerate_states", "run_lemma_suite"]


def run_lemma_suite(*args, **kw):
    from .lemmas import run_lemma_suite as run
    return run(*args, **kw)

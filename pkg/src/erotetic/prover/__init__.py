"""Resolution prover, Herbrand grounding and interpolation."""

from .clauses import Clausifier, clause_str, nnf, normalize
from .interpolation import (
    LEFT, RIGHT, InterpolationError, InterpolationResult, UntaggedClauseError, ground_interpolate,
    identity_instances, interpolate, lift,
)
from .resolution import (
    DEFAULT_BUDGET, Proof, Saturation, Step, check_proof, equality_axioms, parse_proof, saturate,
    subsumes, unify,
)
from .sequent import (
    CounterexampleFound, FOSequent, NotProved, Proved, ProverError, finite_counterexample,
    herbrand_ground, prove, prove_grounded, sequent_clauses,
)
from .tptp import sequent_to_tptp, to_tptp


def clausify(f, skolem_prefix: str = "__sk"):
    """Clause set of a closed formula (see `Clausifier`)."""
    return Clausifier(skolem_prefix).clausify(f)


__all__ = [
    "Clausifier", "CounterexampleFound", "DEFAULT_BUDGET", "FOSequent", "InterpolationError",
    "InterpolationResult", "LEFT", "NotProved", "Proof", "Proved", "ProverError", "RIGHT", "Saturation", "Step",
    "UntaggedClauseError", "check_proof", "clause_str", "clausify", "equality_axioms",
    "finite_counterexample", "ground_interpolate", "herbrand_ground", "identity_instances",
    "interpolate", "lift", "nnf", "normalize", "parse_proof", "prove", "prove_grounded", "saturate",
    "sequent_clauses", "sequent_to_tptp", "subsumes", "to_tptp", "unify",
]

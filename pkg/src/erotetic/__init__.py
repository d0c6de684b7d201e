"""Partition semantics of questions: entailment, answerhood and developments."""

from .answerhood import (
    AnswerhoodError, EngineConfig, Entailed, ExtractionError, ExtractionResult, NotEntailed,
    SoundnessError, Unknown, decide_entailment, extract_development, is_answer,
    translate_entailment, verify_extraction,
)
from .development import (
    VARIANTS, DevelopmentVariant, check_development, classify_answer, enumerate_developments,
    random_development, theorem1_property,
)
from .semantics import (
    Bounds, Countermodel, ModalStructure, Partition, evaluate, find_countermodel,
    question_partition, questions_partition, refines, two_world_correspondence,
)
from .syntax import (
    Formula, Question, Signature, parse_formula, pretty, prime, sharp,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerhoodError", "Bounds", "check_development", "classify_answer", "Countermodel",
    "decide_entailment", "DevelopmentVariant", "EngineConfig", "Entailed",
    "enumerate_developments", "evaluate", "extract_development", "ExtractionError",
    "ExtractionResult", "find_countermodel", "Formula", "is_answer", "ModalStructure",
    "NotEntailed", "parse_formula", "Partition", "pretty", "prime", "Question",
    "question_partition", "questions_partition", "random_development", "refines", "sharp",
    "Signature", "SoundnessError", "theorem1_property", "translate_entailment",
    "two_world_correspondence", "Unknown", "VARIANTS", "verify_extraction",
]

"""Dempster-Shafer evidence clustering with prototype classification."""

from ._dsproto import (
    Bpa,
    Classifier,
    DomainPrior,
    DsprotoError,
    Frame,
    Partition,
    PrototypeModel,
    TotalConflictError,
    UnrepresentableSubsetError,
    ValidationError,
    build_model,
    classify,
    cluster,
    combine,
    conflict,
    generate,
    joint_conflict,
    metaconflict,
    read_evidence,
    read_evidence_text,
    specify,
)

__all__ = [
    "Bpa",
    "Classifier",
    "DomainPrior",
    "DsprotoError",
    "Frame",
    "Partition",
    "PrototypeModel",
    "TotalConflictError",
    "UnrepresentableSubsetError",
    "ValidationError",
    "build_model",
    "classify",
    "cluster",
    "combine",
    "conflict",
    "generate",
    "joint_conflict",
    "metaconflict",
    "read_evidence",
    "read_evidence_text",
    "specify",
]

"""Writers for estimation and inference documents."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from backend.core.hashing import sha256_array, sha256_file
from backend.core.schema import EstimationDocument, InferenceDocument, write_document
from backend.domain import EstimationResult, InferenceSolution


def estimate_digest(est: EstimationResult) -> str:
    """Digest of ``A_plus, A_minus, a_plus, a_minus`` stacked as ``n x (2n + 2)``."""
    return sha256_array(np.hstack([est.A_plus, est.A_minus, est.a_plus[:, None], est.a_minus[:, None]]))


def write_estimation(path: Path, est: EstimationResult, *, source: Path | None = None) -> Path:
    document = EstimationDocument.from_domain(est)
    document.provenance["estimate_sha256"] = estimate_digest(est)
    if source is not None:
        document.provenance["source"] = source.name
        document.provenance["source_sha256"] = sha256_file(source)
    return write_document(path, document)


def write_inference(path: Path, sol: InferenceSolution) -> Path:
    return write_document(path, InferenceDocument.from_domain(sol))

"""Similarity kernel selection: compiled extension when built, else pure Python."""

from revlab._kernels import _pysim

try:
    from revlab._kernels import _simcore

    similarity_matrix = _simcore.similarity_matrix
    BACKEND = "cython"
except (ImportError, AttributeError):  # not built; identical-results fallback
    _simcore = None
    similarity_matrix = _pysim.similarity_matrix
    BACKEND = "python"


def available_backends() -> dict:
    """Name -> kernel function, for tests and the benchmark."""
    backends = {"python": _pysim.similarity_matrix}
    if _simcore is not None:
        backends["cython"] = _simcore.similarity_matrix
    return backends

"""Interpolative decompositions of sparse matrices and CP tensors."""

import json as _json

from ._sketchid import (
    CpTensor,
    InterpolativeDecomposition,
    NumericalError,
    SparseMatrix,
    TensorIdResult,
    cp_diff_norm,
    cp_norm,
    gen_synthetic_matrix,
    gen_synthetic_tensor,
    gram_hadamard,
    read_cp,
    tensor_id,
    tensorsketch,
    write_cp,
)
from . import _sketchid

__all__ = [
    "CpTensor",
    "InterpolativeDecomposition",
    "NumericalError",
    "SparseMatrix",
    "TensorIdResult",
    "as_sparse",
    "countsketch",
    "cp_diff_norm",
    "cp_norm",
    "estimate_id_error",
    "estimate_spectral_norm",
    "gaussian_sketch",
    "gen_synthetic_matrix",
    "gen_synthetic_tensor",
    "gram_hadamard",
    "matrix_id",
    "read_cp",
    "read_matrix_market",
    "run_experiment",
    "srft",
    "tensor_id",
    "tensorsketch",
    "to_scipy",
    "write_cp",
    "write_matrix_market",
]


def as_sparse(a):
    """Convert a scipy.sparse matrix to a SparseMatrix (other inputs pass through)."""
    if hasattr(a, "tocsc") and not isinstance(a, SparseMatrix):
        csc = a.tocsc(copy=True)
        csc.sum_duplicates()
        csc.eliminate_zeros()
        csc.sort_indices()
        return SparseMatrix(csc.shape[0], csc.shape[1], csc.indptr, csc.indices, csc.data)
    return a


def to_scipy(a):
    """SparseMatrix as a scipy.sparse.csc_matrix."""
    import numpy as np
    import scipy.sparse

    indptr = np.asarray(a.indptr, dtype=np.int64)
    indices = np.asarray(a.indices, dtype=np.int64)
    return scipy.sparse.csc_matrix((a.data, indices, indptr), shape=a.shape)


def matrix_id(a, k, method="countsketch", oversample=10, seed=0):
    """Rank-k column ID: a ~ a[:, id.j] @ id.p. `a` may be dense, scipy.sparse or SparseMatrix."""
    return _sketchid.matrix_id(as_sparse(a), k, method, oversample, seed)


def estimate_id_error(a, id, iters=10, probes=2, seed=0):
    return _sketchid.estimate_id_error(as_sparse(a), id, iters, probes, seed)


def estimate_spectral_norm(a, iters=10, probes=2, seed=0):
    return _sketchid.estimate_spectral_norm(as_sparse(a), iters, probes, seed)


def countsketch(a, l, seed=0, surjective=False):
    return _sketchid.countsketch(as_sparse(a), l, seed, surjective)


def srft(a, l, seed=0):
    return _sketchid.srft(as_sparse(a), l, seed)


def gaussian_sketch(a, l, seed=0):
    return _sketchid.gaussian_sketch(as_sparse(a), l, seed)


def read_matrix_market(path):
    return _sketchid.read_matrix_market(path)


def write_matrix_market(path, a):
    _sketchid.write_matrix_market(path, as_sparse(a))


def run_experiment(config):
    """Run a benchmark sweep from a config dict; returns the report as a dict."""
    return _json.loads(_sketchid._run_experiment_json(_json.dumps(config)))

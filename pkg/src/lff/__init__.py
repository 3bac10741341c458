"""Harmonic analysis on GF(q)((t)) and affine, quasi-affine and co-affine frames."""

from .errors import DomainError, LFFError, ParameterError, PreconditionError, ValidationError
from .field import FieldElement, FieldParams, GFElement, chi, fe_abs, u_of
from .fourier import ft
from .frames import (
    AffineSystemSpec,
    BoundsReport,
    FormKind,
    coaffine_decay_table,
    duality_defect,
    effective_index_set,
    form_value,
    invariance_defect,
    lemma33_decay,
    quasi_identity_defect,
    restricted_frame_bounds,
    wf_average,
)
from .funcspace import CoaffineWeights, StepFunction, SystemElementIndex, SystemKind, dilate, translate
from .linalg import hermitian_spectrum
from .wavelets import haar_generators, load_generators, perturbed_haar, save_generators

__version__ = "0.1.0"

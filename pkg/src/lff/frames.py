"""Affine, quasi-affine and co-affine systems: forms, frame bounds, checks.

Every infinite sum over (l, j, k) is reduced to an exact finite sum.  For a
mean-zero f whose support sits in one coset of P^-r, which is constant on
P^n cosets and lies in P^-b, and a mean-zero generator supported in
P^-M_psi and constant on P^N_psi cosets:

* scales j < -(r + N_psi) vanish: supp f falls inside one constancy cell of
  the element, leaving (value) * integral(f) = 0;
* scales j > n + M_psi vanish: the element sits inside one cell of f,
  leaving (value) * integral(psi) = 0;
* at each remaining scale only translations whose support meets P^-b count.

Forms restricted to a single scale (K_j) need only the last rule and hold
for arbitrary f.
"""

from __future__ import annotations

import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, PreconditionError
from .field import FieldElement, u_of
from .fourier import ft
from .funcspace import (
    CoaffineWeights,
    StepFunction,
    SystemElementIndex,
    SystemKind,
    cell_rep,
    common_refinement,
    dilate,
    integral,
    norm,
    project_to_grid,
    system_element,
    translate,
    union_window,
    window,
)
from .linalg import hermitian_eigh
from .rng import SplitMix64, random_mean_zero

MEAN_ZERO_TOL = 1e-12
_ROW_CACHE_LIMIT = 200_000


class FormKind(str, enum.Enum):
    K = "K"
    KTILDE = "Ktilde"
    KJ = "Kj"
    KTILDE_J = "Ktilde_j"


def _is_mean_zero(f: StepFunction) -> bool:
    return abs(integral(f)) <= MEAN_ZERO_TOL * max(1.0, norm(f))


@dataclass(frozen=True, eq=False)
class AffineSystemSpec:
    """Generators, system kind and (for co-affine systems) weights.

    Generators must be mean-zero; this is what makes all coefficient sums
    finite and exact.
    """

    generators: tuple[StepFunction, ...]
    kind: SystemKind = SystemKind.AFFINE
    weights: CoaffineWeights | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise PreconditionError("at least one generator is required")
        for g in gens[1:]:
            if g.params != gens[0].params:
                raise ParameterError("all generators must share field parameters")
        for l, g in enumerate(gens, 1):
            if not _is_mean_zero(g):
                raise PreconditionError(
                    f"generator {l} has integral {integral(g):.3e}; only mean-zero generators are "
                    "supported, since exact truncation of the coefficient sums relies on it"
                )
        kind = SystemKind(self.kind)
        weights = self.weights
        if kind is SystemKind.CO_AFFINE and weights is None:
            weights = CoaffineWeights.constant(1.0)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "weights", weights)

    @property
    def params(self):
        return self.generators[0].params

    @property
    def q(self) -> int:
        return self.params.q

    @cached_property
    def windows(self):
        return [window(g) for g in self.generators]

    def element(self, idx: SystemElementIndex) -> StepFunction:
        return system_element(self.generators, idx, self.kind, self.weights)

    @cached_property
    def _rows(self) -> dict:
        return {}

    @cached_property
    def _siblings(self) -> dict:
        return {}

    def row(self, idx: SystemElementIndex, M: int, N: int) -> np.ndarray:
        """Cell averages of the element on the level-(M, N) grid (memoised)."""
        key = (idx, M, N)
        r = self._rows.get(key)
        if r is None:
            if len(self._rows) >= _ROW_CACHE_LIMIT:
                self._rows.clear()
            r = project_to_grid(self.element(idx), M, N)
            self._rows[key] = r
        return r

    def with_kind(self, kind: SystemKind | str) -> "AffineSystemSpec":
        kind = SystemKind(kind)
        if kind is self.kind:
            return self
        if kind not in self._siblings:
            self._siblings[kind] = AffineSystemSpec(self.generators, kind, self.weights)
        return self._siblings[kind]


def _as_spec(gens, kind: SystemKind, weights=None) -> AffineSystemSpec:
    if isinstance(gens, AffineSystemSpec):
        return gens.with_kind(kind) if gens.kind is not kind else gens
    return AffineSystemSpec(tuple(gens), kind, weights)


def effective_index_set(
    spec: AffineSystemSpec,
    M_f: int,
    N_f: int,
    *,
    ball: int | None = None,
    levels: Iterable[int] | None = None,
    pad_j: int = 0,
    pad_k: int = 0,
) -> list[SystemElementIndex]:
    """Indices whose coefficient can be nonzero for a mean-zero test function.

    ``M_f`` is the support radius level and ``N_f`` the resolution level of
    the test functions; ``ball`` (default ``M_f``) bounds their support
    around the origin.  With ``levels`` the scales are given explicitly and
    the mean-zero cutoffs are not applied.  ``pad_j``/``pad_k`` enlarge the
    ranges (by levels, and by factors of q) for completeness checks.
    """
    ball = M_f if ball is None else ball
    q = spec.q
    chosen = None if levels is None else sorted(set(levels))
    out = []
    for l, w in enumerate(spec.windows, 1):
        if w.zero:
            continue
        M_psi, N_psi = w.ball, w.resolution
        if chosen is None:
            scales = range(-(M_f + N_psi) - pad_j, N_f + M_psi + pad_j + 1)
        else:
            scales = chosen
        for j in scales:
            if spec.kind is SystemKind.AFFINE or (spec.kind is SystemKind.QUASI_AFFINE and j >= 0):
                e = max(0, M_psi, ball + j)
            else:
                e = max(0, M_psi - j, ball)
            out.extend(SystemElementIndex(l, j, k) for k in range(q ** (e + pad_k)))
    return out


def thread_count() -> int:
    """Worker threads for matrix assembly, from ``LFF_THREADS`` (default 1)."""
    raw = os.environ.get("LFF_THREADS", "").strip()
    if not raw:
        return 1
    if not raw.isdigit() or int(raw) < 1:
        raise ParameterError(f"LFF_THREADS must be a positive integer, got {raw!r}")
    return int(raw)


_PARALLEL_MIN_ROWS = 512


def analysis_matrix(spec: AffineSystemSpec, indices: Sequence[SystemElementIndex], M: int, N: int) -> np.ndarray:
    """Rows r with <f, eta> = r @ f.values for every f at level (M, N)."""
    q = spec.q
    A = np.empty((len(indices), q ** (M + N)), dtype=np.complex128)

    def fill(lo: int, hi: int):
        for r in range(lo, hi):
            A[r] = spec.row(indices[r], M, N)

    workers = thread_count()
    if workers > 1 and len(indices) >= _PARALLEL_MIN_ROWS:
        # rows are independent, so the result does not depend on scheduling
        bounds = np.linspace(0, len(indices), workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill, bounds[:-1], bounds[1:]))
    else:
        fill(0, len(indices))
    return A.conj() * float(q) ** (-N)


def coefficients(
    spec: AffineSystemSpec,
    f: StepFunction,
    *,
    levels: Iterable[int] | None = None,
    pad_j: int = 0,
    pad_k: int = 0,
) -> tuple[list[SystemElementIndex], np.ndarray]:
    """Effective indices for f and the coefficients <f, eta> on them."""
    w = window(f)
    if w.zero:
        return [], np.zeros(0, dtype=np.complex128)
    if levels is None and not _is_mean_zero(f):
        raise PreconditionError("test function must be mean-zero")
    idx = effective_index_set(spec, w.radius, w.resolution, ball=w.ball, levels=levels, pad_j=pad_j, pad_k=pad_k)
    return idx, analysis_matrix(spec, idx, f.M, f.N) @ f.values


def form_value(
    kind: FormKind | str,
    psi,
    phi,
    f: StepFunction,
    g: StepFunction,
    j: int | None = None,
) -> complex:
    """K, K~ (all scales) or K_j, K~_j (one scale) of the pair (Psi, Phi) at (f, g)."""
    kind = FormKind(kind)
    system = SystemKind.AFFINE if kind in (FormKind.K, FormKind.KJ) else SystemKind.QUASI_AFFINE
    sp, sf = _as_spec(psi, system), _as_spec(phi, system)
    if len(sp.generators) != len(sf.generators):
        raise PreconditionError(f"|Psi|={len(sp.generators)} differs from |Phi|={len(sf.generators)}")
    if kind in (FormKind.KJ, FormKind.KTILDE_J):
        if j is None:
            raise PreconditionError(f"form {kind.value} needs a scale j")
        levels = [j]
    else:
        levels = None
        if not (_is_mean_zero(f) and _is_mean_zero(g)):
            raise PreconditionError("f and g must be mean-zero")
    f, g = common_refinement(f, g)
    w = union_window(window(f), window(g))
    if w.zero:
        return 0j
    idx = sorted(
        set(effective_index_set(sp, w.radius, w.resolution, ball=w.ball, levels=levels))
        | set(effective_index_set(sf, w.radius, w.resolution, ball=w.ball, levels=levels))
    )
    a = analysis_matrix(sp, idx, f.M, f.N) @ f.values
    b = analysis_matrix(sf, idx, g.M, g.N) @ g.values
    return complex(np.sum(a * b.conj()))


def quasi_identity_defect(psi, phi, f: StepFunction, g: StepFunction, J: int, j: int) -> float:
    """|K~_j(f, g) - q^-J sum_{nu in D_J} K_j(tau_u(nu) f, tau_u(nu) g)|."""
    if J < 1:
        raise PreconditionError(f"J must be positive, got {J}")
    if j < -J:
        raise PreconditionError(f"identity needs j >= -J, got j={j}, J={J}")
    psi, phi = _as_spec(psi, SystemKind.AFFINE), _as_spec(phi, SystemKind.AFFINE)
    q = f.q
    lhs = form_value(FormKind.KTILDE_J, psi, phi, f, g, j)
    rhs = 0j
    for nu in range(q**J, 2 * q**J):
        y = u_of(f.params, nu)
        rhs += form_value(FormKind.KJ, psi, phi, translate(f, y), translate(g, y), j)
    return abs(lhs - rhs * float(q) ** (-J))


@dataclass
class BoundsReport:
    spectrum: np.ndarray
    lambda_min: float
    lambda_max: float
    index_count: int
    test_space: tuple[int, int]
    system_kind: SystemKind
    q: int
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "system": self.system_kind.value,
            "q": self.q,
            "M": self.test_space[0],
            "N": self.test_space[1],
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "spectrum": [float(x) for x in self.spectrum],
            "index_count": self.index_count,
            "elapsed_ms": self.elapsed_ms,
        }


def frame_operator(spec: AffineSystemSpec, M: int, N: int) -> tuple[np.ndarray, int]:
    """S[a, b] = sum <e_a, eta><eta, e_b> over the orthonormal cell basis of level (M, N)."""
    idx = effective_index_set(spec, M, N)
    C = analysis_matrix(spec, idx, M, N) * float(spec.q) ** (N / 2)
    return C.T @ C.conj(), len(idx)


def restricted_frame_bounds(spec: AffineSystemSpec, M: int, N: int) -> BoundsReport:
    """Spectrum of the frame operator compressed to mean-zero functions at level (M, N)."""
    start = time.perf_counter()
    S, count = frame_operator(spec, M, N)
    dim = S.shape[0]
    v = np.full(dim, 1 / np.sqrt(dim))
    P = np.eye(dim) - np.outer(v, v)
    w, V = hermitian_eigh(P @ S @ P)
    keep = np.ones(dim, dtype=bool)
    keep[int(np.argmax(np.abs(v @ V)))] = False
    spectrum = np.sort(w[keep])
    elapsed = (time.perf_counter() - start) * 1e3
    lo = float(spectrum[0]) if spectrum.size else float("nan")
    hi = float(spectrum[-1]) if spectrum.size else float("nan")
    return BoundsReport(spectrum, lo, hi, count, (M, N), spec.kind, spec.q, elapsed)


def _energy(spec: AffineSystemSpec, f: StepFunction, keep: Callable[[int], bool]) -> float:
    w = window(f)
    if w.zero:
        return 0.0
    idx = [i for i in effective_index_set(spec, w.radius, w.resolution, ball=w.ball) if keep(i.j)]
    if not idx:
        return 0.0
    c = analysis_matrix(spec, idx, f.M, f.N) @ f.values
    return float(np.sum(np.abs(c) ** 2))


def wf_average(psi, c: CoaffineWeights, f: StepFunction, side: str = "time") -> float:
    """Average over D of w_f(x) = sum |<tau_x f, psi*^l_{j,k}>|^2.

    ``side="time"`` sums coefficients of translates of f over the cells of
    P^N in D (w_f is constant there since tau_y f = f for y in P^N);
    ``side="fourier"`` integrates sum |c_lj|^2 q^-j |psi^(p^j xi)|^2 |f^(xi)|^2.
    """
    spec = _as_spec(psi, SystemKind.CO_AFFINE, c)
    if spec.kind is SystemKind.CO_AFFINE and c is not None and spec.weights is not c:
        spec = AffineSystemSpec(spec.generators, SystemKind.CO_AFFINE, c)
    if not _is_mean_zero(f):
        raise PreconditionError("f must be mean-zero")
    fw = window(f)
    if fw.zero:
        return 0.0
    if side == "time":
        return _wf_time(spec, f)
    if side == "fourier":
        return _wf_fourier(spec, f, fw)
    raise ValueError(f"unknown side {side!r}")


def _wf_time(spec: AffineSystemSpec, f: StepFunction) -> float:
    params, q = f.params, f.q
    M, N = max(f.M, 0), f.N
    shifted = [translate(f, cell_rep(params, 0, N, n)).embed(M, N) for n in range(q**N)]
    w = union_window(*(window(s) for s in shifted))
    idx = effective_index_set(spec, w.radius, w.resolution, ball=w.ball)
    A = analysis_matrix(spec, idx, M, N)
    coef = A @ np.stack([s.values for s in shifted], axis=1)
    return float(np.mean(np.sum(np.abs(coef) ** 2, axis=0)))


def _wf_fourier(spec: AffineSystemSpec, f: StepFunction, fw) -> float:
    # f^ vanishes on P^ball(f) and lives in P^-res(f); likewise for psi^.
    fh = ft(f)
    fh2 = fh.with_values(np.abs(fh.values) ** 2)
    total = 0.0
    for l, (psi, pw) in enumerate(zip(spec.generators, spec.windows), 1):
        if pw.zero:
            continue
        ph = ft(psi)
        ph2 = ph.with_values(np.abs(ph.values) ** 2)
        for j in range(-fw.ball - pw.resolution, fw.resolution + pw.ball + 1):
            weight = abs(spec.weights(l, j)) ** 2
            if weight == 0:
                continue
            # q^-j |psi^(t^j xi)|^2 = |delta_{-j} psi^|^2 (xi)
            d = dilate(ph2, -j) * float(spec.q) ** (-j / 2)
            a, b = common_refinement(d, fh2)
            total += weight * float(np.sum(a.values.real * b.values.real)) * float(spec.q) ** (-a.N)
    return total


def shell_function(params, m: int) -> StepFunction:
    """Unit-norm f whose transform is constant on the shell |xi| = q**m (m >= 1)."""
    q = params.q
    vals = np.zeros(q**m)
    vals[q ** (m - 1):] = 1 / np.sqrt(q**m - q ** (m - 1))
    return ft(StepFunction(params, m, 0, vals), "inverse")


class DecayRow(NamedTuple):
    m: int
    avg_time: float
    avg_fourier: float
    bound_witness: float


def coaffine_decay_table(psi, c: CoaffineWeights, m_max: int) -> list[DecayRow]:
    """Averages of w_{f_m} for shell functions f_m, m = 1..m_max.

    Any co-affine lower frame bound A* satisfies A* <= avg(m) for every m;
    ``bound_witness`` is the running minimum of the averages.
    """
    spec = _as_spec(psi, SystemKind.CO_AFFINE, c)
    rows = []
    best = float("inf")
    for m in range(1, m_max + 1):
        f = shell_function(spec.params, m)
        t = wf_average(spec, spec.weights, f, "time")
        fr = wf_average(spec, spec.weights, f, "fourier")
        best = min(best, t)
        rows.append(DecayRow(m, t, fr, best))
    return rows


def duality_defect(
    psi,
    phi,
    sample_count: int,
    variant: str = "affine",
    seed: int = 0,
    M: int = 1,
    N: int = 2,
) -> float:
    """max |K(f, f) - ||f||^2| / ||f||^2 over seeded random mean-zero f."""
    kind = {"affine": FormKind.K, "quasiAffine": FormKind.KTILDE}[variant]
    sp = _as_spec(psi, SystemKind.AFFINE)
    sf = _as_spec(phi, SystemKind.AFFINE)
    if len(sp.generators) != len(sf.generators):
        raise PreconditionError(f"|Psi|={len(sp.generators)} differs from |Phi|={len(sf.generators)}")
    rng = SplitMix64(seed)
    worst = 0.0
    for _ in range(sample_count):
        f = random_mean_zero(sp.params, M, N, rng)
        nf = norm(f) ** 2
        worst = max(worst, abs(form_value(kind, sp, sf, f, f) - nf) / nf)
    return worst


def invariance_defect(
    psi,
    phi,
    sample_count: int,
    shifts: Sequence[FieldElement],
    seed: int = 0,
    M: int = 1,
    N: int = 2,
) -> tuple[float, float]:
    """(max |K(tau_y f, tau_y g) - K(f, g)|, max |K(f, g) - K~(f, g)|)."""
    sp = _as_spec(psi, SystemKind.AFFINE)
    sf = _as_spec(phi, SystemKind.AFFINE)
    rng = SplitMix64(seed)
    trans = gap = 0.0
    for _ in range(sample_count):
        f = random_mean_zero(sp.params, M, N, rng)
        g = random_mean_zero(sp.params, M, N, rng)
        base = form_value(FormKind.K, sp, sf, f, g)
        gap = max(gap, abs(base - form_value(FormKind.KTILDE, sp, sf, f, g)))
        for y in shifts:
            moved = form_value(FormKind.K, sp, sf, translate(f, y), translate(g, y))
            trans = max(trans, abs(moved - base))
    return trans, gap


class DecayTail(NamedTuple):
    N: int
    tail_a: float
    tail_b: float


def coarse_cutoff(psi, f: StepFunction) -> int:
    """Smallest N from which both lemma33 tails are empty sums."""
    spec = _as_spec(psi, SystemKind.AFFINE)
    return window(f).radius + max(w.resolution for w in spec.windows if not w.zero)


def lemma33_decay(psi, f: StepFunction, N_max: int) -> list[DecayTail]:
    """For N = 1..N_max:

    tail_a = sum_{j<0} K~_j(delta_N f, delta_N f)
    tail_b = q^-N sum_{j<-N} sum_{nu in D_N} K_j(tau_u(nu) f, tau_u(nu) f)
    """
    quasi = _as_spec(psi, SystemKind.QUASI_AFFINE)
    affine = quasi.with_kind(SystemKind.AFFINE)
    q = f.q
    rows = []
    for n in range(1, N_max + 1):
        a = _energy(quasi, dilate(f, n), lambda j: j < 0)
        b = 0.0
        for nu in range(q**n, 2 * q**n):
            b += _energy(affine, translate(f, u_of(f.params, nu)), lambda j, n=n: j < -n)
        rows.append(DecayTail(n, a, b * float(q) ** (-n)))
    return rows

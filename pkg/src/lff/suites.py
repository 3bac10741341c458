"""Verification suites: each returns a list of :class:`Check` records.

Suites take a list of field parameter sets, or ``None`` for their default
configurations.  Tolerances are fixed per check.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .field import Abs, FieldElement, FieldParams, chi, fe_abs, index_in_lambda, irreducible_moduli, u_of
from .fourier import character_on_D, fourier_coefficient_on_D, ft
from .frames import (
    AffineSystemSpec,
    coaffine_decay_table,
    coarse_cutoff,
    coefficients,
    duality_defect,
    invariance_defect,
    lemma33_decay,
    quasi_identity_defect,
    restricted_frame_bounds,
    wf_average,
)
from .funcspace import (
    CoaffineWeights,
    StepFunction,
    SystemKind,
    _digits,
    _from_digits,
    dilate,
    norm,
    translate,
)
from .linalg import hermitian_eigh, hermitian_spectrum
from .oracles import ExactStep, exact_coefficient
from .rng import SplitMix64, random_mean_zero, random_step_function
from .wavelets import haar_generators, perturbed_haar


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    tol: float | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.value is not None:
            out["value"] = self.value
        if self.tol is not None:
            out["tol"] = self.tol
        if self.detail:
            out["detail"] = self.detail
        return out


def _at_most(name: str, value: float, tol: float, **detail) -> Check:
    return Check(name, bool(value <= tol), float(value), tol, detail)


def _exact(name: str, ok: bool, **detail) -> Check:
    return Check(name, bool(ok), None, 0.0, detail)


def _fields(params: Sequence[FieldParams] | None, default_qs: Sequence[tuple[int, int]]) -> list[FieldParams]:
    if params is not None:
        return list(params)
    return [FieldParams(p, c) for p, c in default_qs]


def random_field_element(params: FieldParams, rng: SplitMix64, lo: int = -6, hi: int = 4) -> FieldElement:
    terms = {}
    for _ in range(1 + rng.next_u64() % 4):
        e = lo + rng.next_u64() % (hi - lo + 1)
        terms[e] = rng.next_u64() % params.q
    return FieldElement(params, terms)


def _exhaustive_digits(q: int) -> int:
    """Digits D for the exhaustive range n < q**D."""
    if q == 2:
        return 12
    if q == 3:
        return 7
    return max(1, int(math.floor(math.log(4096, q) + 1e-9)))


# -- field core ------------------------------------------------------------


def suite_un_props(params=None) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1)]):
        q = P.q
        D = _exhaustive_digits(q)
        size = q**D
        tag = f"q={q} n<{q}^{D}"
        us = [u_of(P, n) for n in range(size)]
        out.append(_exact(f"{tag}: u(n)=0 iff n=0", all(u.is_zero() == (n == 0) for n, u in enumerate(us))))
        abs_ok = all(fe_abs(u) == Abs(False, len(_base_digits(n, q))) for n, u in enumerate(us) if n > 0)
        out.append(_exact(f"{tag}: |u(n)|=q^k iff q^(k-1)<=n<q^k", abs_ok and fe_abs(us[0]).zero))
        neg_ok = True
        for u in us:
            m = index_in_lambda(-u)
            neg_ok &= m < size and us[m] == -u
        out.append(_exact(f"{tag}: closed under negation", neg_ok))
        out.append(_exact(f"{tag}: closed under u(l) shift (all l, n)", _shift_closure(P, D, us)))
        out.append(_exact(f"q={q}: u(rq^k+s)=u(r)t^-k+u(s), r<q^4, k<=3, s<q^k", _eq_un(P)))
        out.extend(_abs_checks(P))
    return out


def _base_digits(n: int, q: int) -> list[int]:
    out = []
    while n:
        out.append(n % q)
        n //= q
    return out


def _shift_closure(P: FieldParams, D: int, us: list[FieldElement]) -> bool:
    q = P.q
    size = q**D
    dig = _digits(q, D)
    ok = True
    for l in range(size):
        dl = dig[:, l : l + 1]
        s = _from_digits(P.add_table[dl, dig], q)
        ok &= bool(np.array_equal(np.sort(s), np.arange(size)))
        if l < q**4 or l % 97 == 0:
            for n in range(0, size, 1 if l < q**2 else 37):
                ok &= us[int(s[n])] == us[l] + us[n]
    return ok


def _eq_un(P: FieldParams) -> bool:
    q = P.q
    ok = True
    for k in range(4):
        for r in range(q**4):
            ur = u_of(P, r).shift(-k)
            for s in range(q**k):
                ok &= u_of(P, r * q**k + s) == ur + u_of(P, s)
    return ok


def _abs_checks(P: FieldParams, pairs: int = 10_000) -> list[Check]:
    rng = SplitMix64(1000 + P.q)
    mult = ultra = equality = True
    for _ in range(pairs):
        x, y = random_field_element(P, rng), random_field_element(P, rng)
        ax, ay, axy = fe_abs(x), fe_abs(y), fe_abs(x * y)
        if ax.zero or ay.zero:
            mult &= axy.zero
        else:
            mult &= axy == Abs(False, ax.k + ay.k)
        s = fe_abs(x + y)
        val = lambda a: -math.inf if a.zero else a.k
        ultra &= val(s) <= max(val(ax), val(ay))
        if val(ax) != val(ay):
            equality &= val(s) == max(val(ax), val(ay))
    tag = f"q={P.q} {pairs} random pairs"
    return [
        _exact(f"{tag}: |xy|=|x||y|", mult),
        _exact(f"{tag}: |x+y|<=max(|x|,|y|)", ultra),
        _exact(f"{tag}: equality when |x|!=|y|", equality),
    ]


def suite_characters(params=None) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1), (2, 2)]):
        q = P.q
        for N in (1, 2, 3):
            X = np.stack([character_on_D(P, n, N).values for n in range(q**N)], axis=1)
            G = X.conj().T @ X * float(q) ** (-N)
            err = float(np.max(np.abs(G - np.eye(q**N))))
            out.append(_at_most(f"q={q} N={N}: Gram of chi_n on D is identity", err, 1e-12))
        rng = SplitMix64(2000 + q)
        hom = unit = True
        for _ in range(10_000):
            x, y = random_field_element(P, rng), random_field_element(P, rng)
            a, b, c = chi(x), chi(y), chi(x + y)
            hom &= c == (a + b) % P.p
            unit &= 0 <= a < P.p
        out.append(_exact(f"q={q} 10^4 random pairs: chi(x+y)=chi(x)chi(y) as exact indices", hom))
        out.append(_exact(f"q={q}: chi stored as p-th root of unity index", unit))
    return out


# -- Fourier ----------------------------------------------------------------


def suite_fourier(params=None, samples: int = 100) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1), (2, 2)]):
        q = P.q
        rng = SplitMix64(3000 + q)
        for M in (0, 1, 2):
            for N in (1, 2):
                nerr = rerr = ferr = perr = 0.0
                for _ in range(samples):
                    f = random_step_function(P, M, N, rng)
                    fh = ft(f)
                    nerr = max(nerr, abs(norm(fh) - norm(f)) / norm(f))
                    back = ft(fh, "inverse")
                    rerr = max(rerr, float(np.max(np.abs(back.values - f.values))))
                    ferr = max(ferr, float(np.max(np.abs(ft(f, method="direct").values - fh.values))))
                    if M == 0:
                        coef = [fourier_coefficient_on_D(f, n) for n in range(q**N)]
                        perr = max(perr, abs(sum(abs(c) ** 2 for c in coef) - norm(f) ** 2) / norm(f) ** 2)
                tag = f"q={q} (M,N)=({M},{N}) {samples} samples"
                out.append(_at_most(f"{tag}: ||f^||=||f||", nerr, 1e-12))
                out.append(_at_most(f"{tag}: inverse(forward(f))=f", rerr, 1e-12))
                out.append(_at_most(f"{tag}: fast transform matches character sums", ferr, 1e-12))
                if M == 0:
                    out.append(_at_most(f"{tag}: Parseval on D", perr, 1e-12))
    return out


def suite_commutation(params=None) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1)]):
        q = P.q
        rng = SplitMix64(4000 + q)
        probes = [haar_generators(P)[0], random_step_function(P, 1, 2, rng), random_step_function(P, 0, 3, rng)]
        for j in (-1, -2):
            ok = True
            for k in range(16):
                for f in probes:
                    lhs = dilate(translate(f, u_of(P, k)), j)
                    rhs = translate(dilate(f, j), u_of(P, k * q ** (-j)))
                    ok &= lhs.equals(rhs)
            out.append(_exact(f"q={q} j={j} k<16: delta_j tau_u(k) = tau_u(q^-j k) delta_j", ok))
    return out


# -- frames -------------------------------------------------------------------


def _generator_sets(P: FieldParams):
    return [("haar", haar_generators(P)), ("perturbed", perturbed_haar(P))]


def suite_lemma32(params=None, pairs: int = 20) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1)]):
        for label, gens in _generator_sets(P):
            spec = AffineSystemSpec(tuple(gens))
            rng = SplitMix64(5000 + P.q)
            worst = 0.0
            for _ in range(pairs):
                f = random_mean_zero(P, 1, 2, rng)
                g = random_mean_zero(P, 1, 2, rng)
                for J in (1, 2):
                    for j in range(-J, 3):
                        worst = max(worst, quasi_identity_defect(spec, spec, f, g, J, j))
            out.append(_at_most(f"q={P.q} {label}, J in {{1,2}}, j in [-J,2], {pairs} pairs: quasi-affine averaging identity", worst, 1e-9))
    return out


@lru_cache(maxsize=16)
def haar_bounds(P: FieldParams, levels=((1, 2), (2, 3))) -> dict:
    spec = AffineSystemSpec(tuple(haar_generators(P)))
    res = {}
    for kind in (SystemKind.AFFINE, SystemKind.QUASI_AFFINE):
        for M, N in levels:
            res[(kind.value, M, N)] = restricted_frame_bounds(spec.with_kind(kind), M, N)
    return res


def suite_haar_tight(params=None) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1), (2, 2)]):
        for (kind, M, N), r in haar_bounds(P).items():
            dev = max(abs(r.lambda_min - 1), abs(r.lambda_max - 1))
            out.append(
                _at_most(
                    f"q={P.q} {kind} V({M},{N}): lambda_min=lambda_max=1",
                    dev,
                    1e-9,
                    lambda_min=r.lambda_min,
                    lambda_max=r.lambda_max,
                    index_count=r.index_count,
                )
            )
    return out


@lru_cache(maxsize=16)
def perturbed_bounds(P: FieldParams, levels=((1, 2), (2, 3))) -> dict:
    spec = AffineSystemSpec(tuple(perturbed_haar(P)))
    return {
        (kind.value, M, N): restricted_frame_bounds(spec.with_kind(kind), M, N)
        for kind in (SystemKind.AFFINE, SystemKind.QUASI_AFFINE)
        for M, N in levels
    }


def suite_bracketing(params=None) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1)]):
        b = perturbed_bounds(P)
        gap = {
            (which, M, N): abs(getattr(b[("affine", M, N)], which) - getattr(b[("quasiAffine", M, N)], which))
            for which in ("lambda_min", "lambda_max")
            for M, N in ((1, 2), (2, 3))
        }
        for which in ("lambda_max", "lambda_min"):
            small, large = gap[(which, 1, 2)], gap[(which, 2, 3)]
            out.append(_at_most(f"q={P.q} perturbed: |affine - quasi| {which} on V(2,3) < 0.05", large, 0.05, **{"V(1,2)": small}))
            out.append(Check(f"q={P.q} perturbed: {which} gap shrinks from V(1,2) to V(2,3)", large < small, large, small))
        for kind in ("affine", "quasiAffine"):
            lo, hi = b[(kind, 1, 2)], b[(kind, 2, 3)]
            out.append(
                _exact(
                    f"q={P.q} perturbed {kind}: nested spaces widen the bracket",
                    hi.lambda_min <= lo.lambda_min + 1e-12 and hi.lambda_max >= lo.lambda_max - 1e-12,
                    V12=[lo.lambda_min, lo.lambda_max],
                    V23=[hi.lambda_min, hi.lambda_max],
                )
            )
    return out


def _probe_shifts(P: FieldParams) -> list[FieldElement]:
    t = FieldElement.monomial(P, 1, 1)
    one = FieldElement.monomial(P, 0, 1)
    return [u_of(P, 1), u_of(P, 2), u_of(P, 3), one, t]


def suite_invariance(params=None, samples: int = 5) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1)]):
        H = haar_generators(P)
        shifts = _probe_shifts(P)
        pe = FieldElement.monomial(P, 1, 1) * u_of(P, 1)
        shifted = [translate(h, pe) for h in H]
        tr, gap = invariance_defect(H, H, samples, shifts, seed=6000)
        out.append(_at_most(f"q={P.q} (Haar, Haar): translation defect", tr, 1e-9))
        out.append(_at_most(f"q={P.q} (Haar, Haar): |K - K~|", gap, 1e-9))
        tr, gap = invariance_defect(H, shifted, samples, shifts, seed=6000)
        out.append(Check(f"q={P.q} (Haar, tau_pu(1) Haar): translation defect > 0.01", tr > 0.01, tr, 0.01))
        out.append(Check(f"q={P.q} (Haar, tau_pu(1) Haar): |K - K~| > 0.01", gap > 0.01, gap, 0.01))
        tr, gap = invariance_defect(H, perturbed_haar(P), samples, shifts, seed=6000)
        out.append(Check(f"q={P.q} (Haar, perturbed): translation defect > 0.01", tr > 0.01, tr, 0.01))
        out.append(Check(f"q={P.q} (Haar, perturbed): |K - K~| > 0.01", gap > 0.01, gap, 0.01))
    return out


def suite_duality(params=None, samples: int = 10) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1)]):
        H = haar_generators(P)
        for variant in ("affine", "quasiAffine"):
            d = duality_defect([2 * h for h in H], [0.5 * h for h in H], samples, variant, seed=7000)
            out.append(_at_most(f"q={P.q} {variant}: ({{2psi}}, {{psi/2}}) are duals", d, 1e-9))
            d = duality_defect([2 * h for h in H], H, samples, variant, seed=7000)
            out.append(_at_most(f"q={P.q} {variant}: ({{2psi}}, {{psi}}) defect = 1", abs(d - 1), 1e-9, defect=d))
            d = duality_defect(H, H, samples, variant, seed=7000)
            out.append(_at_most(f"q={P.q} {variant}: (Haar, Haar) are duals", d, 1e-9))
    return out


def suite_wf(params=None, samples: int = 10) -> list[Check]:
    out = []
    c = CoaffineWeights.constant(1.0)
    for P in _fields(params, [(2, 1), (3, 1)]):
        H = haar_generators(P)
        rng = SplitMix64(8000 + P.q)
        worst = 0.0
        for _ in range(samples):
            f = random_mean_zero(P, 1, 2, rng)
            worst = max(worst, abs(wf_average(H, c, f, "time") - wf_average(H, c, f, "fourier")))
        out.append(_at_most(f"q={P.q} Haar c=1, {samples} samples: time side = Fourier side", worst, 1e-9))
    return out


def suite_coaffine_decay(params=None, m_max: int = 4) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1)]):
        rows = coaffine_decay_table(haar_generators(P), CoaffineWeights.constant(1.0), m_max)
        for r in rows:
            pred = float(P.q) ** (1 - r.m)
            dev = max(abs(r.avg_time - pred), abs(r.avg_fourier - pred))
            out.append(_at_most(f"q={P.q} m={r.m}: avg = q^(1-m) = {pred:g}", dev, 1e-9, avg_time=r.avg_time, avg_fourier=r.avg_fourier))
        ratio = max(abs(b.avg_time / a.avg_time - 1 / P.q) for a, b in zip(rows, rows[1:]))
        out.append(_at_most(f"q={P.q}: avg(m+1)/avg(m) = 1/q", ratio, 1e-9))
    return out


def suite_lemma33(params=None, samples: int = 3) -> list[Check]:
    out = []
    for P in _fields(params, [(2, 1), (3, 1)]):
        for label, gens in _generator_sets(P):
            rng = SplitMix64(9000 + P.q)
            probes = [("psi^1", gens[0])] + [(f"random #{i}", random_mean_zero(P, 1, 2, rng)) for i in range(samples)]
            for name, f in probes:
                cut = coarse_cutoff(gens, f)
                rows = lemma33_decay(gens, f, max(cut, 1) + 2)
                zero = all(r.tail_a == 0.0 and r.tail_b == 0.0 for r in rows if r.N >= cut)
                mono = all(
                    b.tail_a <= a.tail_a + 1e-15 and b.tail_b <= a.tail_b + 1e-15 for a, b in zip(rows, rows[1:])
                )
                tails = [[r.tail_a, r.tail_b] for r in rows]
                out.append(_exact(f"q={P.q} {label} f={name}: tails exactly 0 for N >= {cut}", zero, tails=tails))
                out.append(_exact(f"q={P.q} {label} f={name}: tails non-increasing", mono))
    return out


def _truncation_configs(count: int = 20):
    """(q, generators as rational values at level (0, N_psi), f level) rotations."""
    rng = SplitMix64(10_000)
    gens = {
        2: [[(1, -1)], [(5, 4, -4, -5)]],
        3: [[(1, -1, 0), (1, 1, -2)]],
    }
    levels = {2: [(1, 2), (0, 2), (1, 1), (2, 1)], 3: [(0, 1), (1, 0), (0, 2)]}
    kinds = list(SystemKind)
    out = []
    for i in range(count):
        q = 2 if i % 3 != 2 else 3
        g = gens[q][i % len(gens[q])]
        M, N = levels[q][i % len(levels[q])]
        size = q ** (M + N)
        vals = [int(rng.next_u64() % 11) - 5 for _ in range(size)]
        vals[-1] -= sum(vals)
        # occasionally leave the top cells empty so the support is off-centre
        if size >= 4 and i % 4 == 1:
            vals = vals[: size // q] + [0] * (size - size // q)
            vals[size // q - 1] -= sum(vals)
        out.append((q, g, M, N, vals, kinds[i % 3]))
    return out


def suite_truncation(params=None, count: int = 20) -> list[Check]:
    """Padding j by 2 levels each side and k by q^2 adds only exact zeros."""
    worst_float = 0.0
    padded_nonzero = 0
    changed = 0
    oracle_err = 0.0
    configs = _truncation_configs(count)
    for q, gvals, M, N, fvals, kind in configs:
        P = FieldParams(q, 1)
        egens = [ExactStep(P, 0, round(math.log(len(v), q)), tuple(Fraction(x) for x in v)) for v in gvals]
        spec = AffineSystemSpec(tuple(StepFunction(P, g.M, g.N, g.to_floats()) for g in egens), kind)
        ef = ExactStep(P, M, N, tuple(Fraction(x) for x in fvals))
        f = StepFunction(P, M, N, ef.to_floats())
        base, cb = coefficients(spec, f)
        padded, cp = coefficients(spec, f, pad_j=2, pad_k=2)
        inside = dict(zip(base, cb))
        for idx, c in zip(padded, cp):
            exact = exact_coefficient(egens, idx, kind, ef)
            if idx in inside:
                changed += inside[idx] != c
                oracle_err = max(oracle_err, abs(exact.as_float(q) - c))
            else:
                padded_nonzero += exact.value != 0
                worst_float = max(worst_float, abs(c))
    tag = f"{len(configs)} configurations"
    return [
        _exact(f"{tag}: every padded-only coefficient is exactly 0 (rational oracle)", padded_nonzero == 0, nonzero=padded_nonzero),
        _exact(f"{tag}: in-range coefficients unchanged by padding", changed == 0, changed=changed),
        _at_most(f"{tag}: float coefficients match the rational oracle", oracle_err, 1e-12),
        _at_most(f"{tag}: padded-only float coefficients", worst_float, 1e-12),
    ]


def suite_eigensolver(params=None) -> list[Check]:
    out = []
    out.append(_at_most("identity(3) -> (1,1,1)", float(np.max(np.abs(hermitian_spectrum(np.eye(3)) - 1))), 1e-12))
    n = 3
    F = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    H = F @ np.diag([2.0, 5.0, 7.0]) @ F.conj().T
    out.append(_at_most("DFT-conjugated diag(2,5,7) -> (2,5,7)", float(np.max(np.abs(hermitian_spectrum(H) - [2, 5, 7]))), 1e-12))
    out.append(
        _at_most("[[2,1],[1,2]] -> (1,3)", float(np.max(np.abs(hermitian_spectrum(np.array([[2.0, 1], [1, 2]])) - [1, 3]))), 1e-12)
    )
    rng = SplitMix64(11_000)
    for dim in (12, 40, 100):
        raw = rng.uniform_array(2 * dim * dim).reshape(2, dim, dim)
        A = raw[0] + 1j * raw[1]
        A = A + A.conj().T
        runs = [hermitian_eigh(A) for _ in range(3)]
        same = all(np.array_equal(runs[0][0], r[0]) and np.array_equal(runs[0][1], r[1]) for r in runs)
        out.append(_exact(f"n={dim}: repeated runs are bit-identical", same))
        w, V = runs[0]
        resid = float(np.max(np.abs(A @ V - V * w))) / float(np.linalg.norm(A))
        out.append(_at_most(f"n={dim}: eigen-residual relative to ||H||_F", resid, 1e-12))
    return out


def suite_moduli(params=None) -> list[Check]:
    """Haar bounds under every irreducible modulus must agree."""
    out = []
    targets = [(FieldParams(2, 2), ((1, 2), (2, 3)), True)]
    if params is None:
        targets += [(FieldParams(2, 3), ((1, 1), (1, 2)), False), (FieldParams(3, 2), ((1, 1),), False)]
    else:
        targets = [(P, ((1, 1), (1, 2)), True) for P in params]
    for P, levels, primary in targets:
        moduli = irreducible_moduli(P.p, P.c)
        tag = f"q={P.q}" + ("" if primary else " (supplementary)")
        out.append(
            Check(
                f"{tag}: at least two distinct irreducible moduli exist",
                len(moduli) >= 2,
                float(len(moduli)),
                2.0,
                {"moduli": [list(m) for m in moduli]},
            )
        )
        results = {m: haar_bounds(FieldParams(P.p, P.c, m), levels) for m in moduli}
        ref = results[moduli[0]]
        spread = max(
            (abs(getattr(r[key], w) - getattr(ref[key], w)) for r in results.values() for key in ref for w in ("lambda_min", "lambda_max")),
            default=0.0,
        )
        tight = max(abs(getattr(x, w) - 1) for r in results.values() for x in r.values() for w in ("lambda_min", "lambda_max"))
        out.append(_at_most(f"{tag}: bounds agree across {len(moduli)} moduli", spread if len(moduli) >= 2 else math.inf, 1e-9))
        out.append(_at_most(f"{tag}: bounds equal 1 under every modulus", tight, 1e-9))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "un-props": suite_un_props,
    "characters": suite_characters,
    "fourier": suite_fourier,
    "commutation": suite_commutation,
    "lemma32": suite_lemma32,
    "haar-tight": suite_haar_tight,
    "bracketing": suite_bracketing,
    "invariance": suite_invariance,
    "duality": suite_duality,
    "wf": suite_wf,
    "coaffine-decay": suite_coaffine_decay,
    "lemma33": suite_lemma33,
    "truncation": suite_truncation,
    "eigensolver": suite_eigensolver,
    "moduli": suite_moduli,
}


def run_suite(name: str, params: Sequence[FieldParams] | None = None) -> list[Check]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(params)

"""Empirical order checks against the exact eigendecomposition/SVD reference.

Each *problem* maps a scale ``t`` to the norm of ``exact(t) - approx(t)``; the
order is the least-squares slope of ``log error`` against ``log t``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .core import (
    PSD_TOL,
    PreconditionError,
    eigh,
    frobenius_norm,
    matrix_modulus,
    matrix_power,
    spectral_norm,
)
from .decomposition import SchurSplit, schur_reassemble
from .first_order import (
    dk_approx,
    modulus_approx,
    modulus_approx_invertible,
    modulus_approx_psd,
    power_approx,
    power_approx_s,
    power_function,
)
from .projectors import projector_first_order, spectral_projectors

EPS = np.finfo(float).eps
DEFAULT_SCALES = 0.1 * 2.0 ** -np.arange(12)
MIN_FIT_POINTS = 3

KINDS = (
    "hermitian_psd_compatible",
    "general_complex",
    "hermitian",
    "hermitian_indefinite",
    "projector",
)


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed: the first 64-bit word of ``SeedSequence([seed, trial])``."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def power_order(p: float) -> float | None:
    """Guaranteed error exponent ``min(1 + 1/p, 3/p)``, or ``None`` outside ``1 < p < 3``."""
    return min(1 + 1 / p, 3 / p) if 1 < p < 3 else None


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    rank: int
    spectrum_range: tuple[float, float] = (0.5, 2.0)
    perturbation_kind: str = "hermitian_psd_compatible"
    seed: int = 0
    # spectral norm of each direction block, relative to spectrum_range[0]
    direction_scale: float = 0.2

    def __post_init__(self):
        lo, hi = self.spectrum_range
        if not 1 <= self.n <= 64:
            raise PreconditionError(f"n must lie in [1, 64], got {self.n}")
        if not 0 <= self.rank <= self.n:
            raise PreconditionError(f"rank must lie in [0, n], got {self.rank}")
        if not 0 < lo <= hi:
            raise PreconditionError(f"spectrum_range must satisfy 0 < lo <= hi, got {self.spectrum_range}")
        if self.perturbation_kind not in KINDS:
            raise PreconditionError(f"unknown perturbation kind {self.perturbation_kind!r}")
        if not self.direction_scale > 0:
            raise PreconditionError("direction_scale must be positive")


@dataclass(frozen=True)
class Instance:
    """A base matrix (``A`` or ``X``) and a perturbation direction (``E`` or ``Z``).

    Unpacks as ``base, direction``.  For the ``projector`` kind the base is
    ``diag(alpha)`` and ``extra`` holds the kernel-supported PSD matrix ``Z``.
    """

    base: np.ndarray
    direction: np.ndarray
    spec: InstanceSpec
    U: np.ndarray
    values: np.ndarray
    V: np.ndarray | None = None
    blocks: tuple | None = None
    extra: np.ndarray | None = None

    def __iter__(self):
        yield self.base
        yield self.direction


def _unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def _hermitian(rng, n):
    G = _complex(rng, n, n)
    return (G + G.conj().T) / 2


def _normalized(M: np.ndarray, target: float) -> np.ndarray:
    norm = spectral_norm(M)
    return M * (target / norm) if norm > 0 else M


def _psd_compatible_direction(alpha_plus, blocks, m) -> np.ndarray:
    B, C, G = blocks
    split = SchurSplit(alpha_plus, B, C, G.conj().T @ G)
    return schur_reassemble(split)


def random_instance(spec: InstanceSpec) -> Instance:
    """Seeded random instance of the requested kind."""
    rng = np.random.default_rng(spec.seed)
    n, l = spec.n, spec.rank
    m = n - l
    lo, hi = spec.spectrum_range
    size = spec.direction_scale * lo
    positive = np.sort(rng.uniform(lo, hi, l))[::-1]
    values = np.concatenate([positive, np.zeros(m)])
    U = _unitary(rng, n)
    kind = spec.perturbation_kind

    if kind == "hermitian_psd_compatible":
        B = _normalized(_hermitian(rng, l), size) if l else np.zeros((0, 0), complex)
        C = _normalized(_complex(rng, l, m), size) if l and m else np.zeros((l, m), complex)
        G = _normalized(_complex(rng, m, m), math.sqrt(size)) if m else np.zeros((0, 0), complex)
        E_hat = _psd_compatible_direction(positive, (B, C, G), m)
        A = (U * values) @ U.conj().T
        return Instance(A, U @ E_hat @ U.conj().T, spec, U, values, blocks=(B, C, G))

    if kind == "general_complex":
        V = _unitary(rng, n)
        X = (U * values) @ V.conj().T
        return Instance(X, _normalized(_complex(rng, n, n), size), spec, U, values, V=V)

    if kind == "hermitian_indefinite":
        signs = rng.choice([-1.0, 1.0], size=n)
        if n > 1:
            # both signs present, otherwise |X| = X and the formula is exact
            signs[rng.permutation(n)[:2]] = (1.0, -1.0)
        values = values * signs
    if kind == "projector":
        E = _normalized(_hermitian(rng, n), size)
        Gz = _complex(rng, m, m)
        Z = np.zeros((n, n), complex)
        Z[l:, l:] = _normalized(Gz.conj().T @ Gz, 1.0)
        return Instance(np.diag(values).astype(complex), E, spec, np.eye(n), values, extra=Z)
    A = (U * values) @ U.conj().T
    return Instance(A, _normalized(_hermitian(rng, n), size), spec, U, values)


def rescale_spectrum(instance: Instance, factors) -> Instance:
    """Copy of a PSD-compatible instance with ``alpha_plus`` multiplied by ``factors``.

    The direction is rebuilt from the same ``(B, C, G)`` blocks so it stays
    PSD-compatible for the new spectrum.
    """
    if instance.blocks is None:
        raise PreconditionError("only hermitian_psd_compatible instances can be rescaled")
    l = instance.spec.rank
    positive = instance.values[:l] * np.asarray(factors, dtype=float)
    values = np.concatenate([positive, instance.values[l:]])
    U = instance.U
    E_hat = _psd_compatible_direction(positive, instance.blocks, instance.spec.n - l)
    return replace(
        instance,
        base=(U * values) @ U.conj().T,
        direction=U @ E_hat @ U.conj().T,
        values=values,
    )


@dataclass
class OrderFitReport:
    problem: str
    scales: list[float]
    errors: list[float]
    fitted_slope: float
    fit_points_used: int
    expected_order: float | None
    slope_margin: float
    passed: bool
    norm_used: str = "spectral"
    seed: int | None = None
    params: dict = field(default_factory=dict)

    @property
    def threshold(self) -> float | None:
        if self.expected_order is None:
            return None
        return self.expected_order - self.slope_margin

    def to_dict(self) -> dict:
        d = asdict(self)
        d["threshold"] = self.threshold
        if math.isinf(self.fitted_slope):
            d["fitted_slope"] = "inf"
        elif math.isnan(self.fitted_slope):
            d["fitted_slope"] = "nan"
        return d


def fit_order(scales, errors, floors=None) -> tuple[float, int]:
    """Least-squares slope of ``log(errors)`` vs ``log(scales)`` above the noise floor.

    Returns ``(slope, points_used)``; ``(inf, 0)`` if every error is at the floor
    and ``(nan, k)`` if only ``k < MIN_FIT_POINTS`` points survive.
    """
    t = np.asarray(scales, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > (0.0 if floors is None else np.asarray(floors, dtype=float))
    used = int(keep.sum())
    if used == 0:
        return math.inf, 0
    if used < MIN_FIT_POINTS:
        return math.nan, used
    slope, _ = np.polyfit(np.log(t[keep]), np.log(e[keep]), 1)
    return float(slope), used


def noise_floor(reference_norm: float) -> float:
    return 1e3 * EPS * (1.0 + reference_norm)


# A problem evaluates (exact, approximation) at scale t; both are n x n matrices.
ErrorFn = Callable[[float], tuple[np.ndarray, np.ndarray]]


class ProblemDef(NamedTuple):
    kind: str
    margin: float
    expected: Callable[[dict], float | None]
    build: Callable[[Instance, dict], ErrorFn]


def _build_dk(inst: Instance, params: dict) -> ErrorFn:
    s = params.get("s", 0.5)
    f, df = power_function(s)
    A, E = inst
    dec = eigh(A)
    return lambda t: (matrix_power(A + t * E, s), dk_approx(dec, t * E, f, df))


def _build_power_p(inst: Instance, params: dict) -> ErrorFn:
    p = params["p"]
    A, E = inst
    dec = eigh(A)
    return lambda t: (matrix_power(A + t * E, 1 / p), power_approx(dec, t * E, p).approximation)


def _build_power_s(inst: Instance, params: dict) -> ErrorFn:
    s = params["s"]
    A, E = inst
    dec = eigh(A)
    return lambda t: (matrix_power(A + t * E, s), power_approx_s(dec, t * E, s).approximation)


def _build_modulus(approx) -> Callable[[Instance, dict], ErrorFn]:
    def build(inst: Instance, params: dict) -> ErrorFn:
        X, Z = inst
        return lambda t: (matrix_modulus(X + t * Z), approx(X, t * Z).approximation)

    return build


def _build_gt(inst: Instance, params: dict) -> ErrorFn:
    alpha, l = inst.values, inst.spec.rank

    def fn(t):
        E = t * inst.direction
        exact = spectral_projectors(alpha, E, l).P1
        return exact, projector_first_order(alpha[:l], E[:l, l:]).P1

    return fn


def _build_gt1(inst: Instance, params: dict) -> ErrorFn:
    p = params["p"]
    alpha, l = inst.values, inst.spec.rank

    def fn(t):
        Z = t * inst.extra
        P0 = spectral_projectors(alpha, t * inst.direction, l).P0
        return matrix_power(P0 @ Z @ P0, 1 / p, psd_tol=np.inf), matrix_power(Z, 1 / p)

    return fn


def _build_gt2(which: str) -> Callable[[Instance, dict], ErrorFn]:
    def build(inst: Instance, params: dict) -> ErrorFn:
        alpha, l = inst.values, inst.spec.rank

        def fn(t):
            Z = t * inst.extra
            P = spectral_projectors(alpha, t * inst.direction, l)
            right = P.P0 if which == "P1ZP0" else P.P1
            return P.P1 @ Z @ right, np.zeros_like(Z)

        return fn

    return build


PROBLEMS: dict[str, ProblemDef] = {
    "dk": ProblemDef("hermitian", 0.05, lambda q: 2.0, _build_dk),
    "power_p": ProblemDef("hermitian_psd_compatible", 0.05, lambda q: power_order(q["p"]), _build_power_p),
    "power_s": ProblemDef("hermitian_psd_compatible", 0.1, lambda q: 2.0, _build_power_s),
    "modulus": ProblemDef("general_complex", 0.05, lambda q: 1.5, _build_modulus(modulus_approx)),
    "modulus_psd": ProblemDef("hermitian", 0.05, lambda q: 1.5, _build_modulus(modulus_approx_psd)),
    "modulus_inv": ProblemDef(
        "hermitian_indefinite", 0.05, lambda q: 1.5, _build_modulus(modulus_approx_invertible)
    ),
    "projector_lemma_gt": ProblemDef("projector", 0.1, lambda q: 2.0, _build_gt),
    "projector_lemma_gt1": ProblemDef("projector", 0.1, lambda q: power_order(q["p"]), _build_gt1),
    "projector_lemma_gt2_P1ZP0": ProblemDef("projector", 0.1, lambda q: 2.0, _build_gt2("P1ZP0")),
    "projector_lemma_gt2_P1ZP1": ProblemDef("projector", 0.1, lambda q: 3.0, _build_gt2("P1ZP1")),
}


def _validate_scales(scales) -> np.ndarray:
    scales = np.asarray(scales, dtype=float)
    if scales.ndim != 1 or scales.size < 6:
        raise PreconditionError(f"need at least 6 scales, got {scales.size}")
    if np.any(scales <= 0) or np.any(np.diff(scales) >= 0):
        raise PreconditionError("scales must be positive and strictly decreasing")
    return scales


def error_order_fit(
    problem: str,
    instance: Instance,
    params: dict | None = None,
    scales=DEFAULT_SCALES,
    *,
    slope_margin: float | None = None,
) -> OrderFitReport:
    """Measure ``|exact(t) - approx(t)|`` in the spectral norm over ``scales`` and fit the order."""
    params = dict(params or {})
    if problem not in PROBLEMS:
        raise PreconditionError(f"unknown problem {problem!r}; choose from {sorted(PROBLEMS)}")
    definition = PROBLEMS[problem]
    scales = _validate_scales(scales)
    margin = definition.margin if slope_margin is None else slope_margin
    expected = definition.expected(params)
    fn = definition.build(instance, params)
    errors, floors = [], []
    for t in scales:
        exact, approx = fn(float(t))
        errors.append(spectral_norm(exact - approx))
        floors.append(noise_floor(spectral_norm(exact)))
    slope, used = fit_order(scales, errors, floors)
    if used == 0:
        passed = True
    elif math.isnan(slope):
        passed = False
    else:
        passed = expected is None or slope >= expected - margin
    return OrderFitReport(
        problem=problem,
        scales=[float(t) for t in scales],
        errors=[float(e) for e in errors],
        fitted_slope=slope,
        fit_points_used=used,
        expected_order=expected,
        slope_margin=margin,
        passed=bool(passed),
        seed=instance.spec.seed,
        params=params,
    )


def run_campaign(
    problem: str,
    n: int,
    rank: int,
    params: dict | None = None,
    *,
    trials: int = 10,
    seed: int = 0,
    scales=DEFAULT_SCALES,
    spectrum_range: tuple[float, float] = (0.5, 2.0),
    max_workers: int | None = None,
) -> list[OrderFitReport]:
    """Run ``trials`` independent order fits; the result order follows the trial index."""
    if problem not in PROBLEMS:
        raise PreconditionError(f"unknown problem {problem!r}; choose from {sorted(PROBLEMS)}")
    kind = PROBLEMS[problem].kind

    def one(trial: int) -> OrderFitReport:
        spec = InstanceSpec(n, rank, spectrum_range, kind, trial_seed(seed, trial))
        return error_order_fit(problem, random_instance(spec), params, scales)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(one, range(trials)))
    return [one(k) for k in range(trials)]


class WihlerResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs


def wihler_check(A, Z, p: float, *, psd_tol: float = PSD_TOL) -> WihlerResult:
    """Hoelder bound ``|Z^(1/p) - A^(1/p)|_F <= n^((p-1)/2) |Z - A|_F^(1/p)``.

    The norm is Frobenius.
    """
    if not p >= 1:
        raise PreconditionError(f"p must be at least 1, got {p}")
    A, Z = np.asarray(A, dtype=complex), np.asarray(Z, dtype=complex)
    n = A.shape[0]
    lhs = frobenius_norm(matrix_power(Z, 1 / p, psd_tol=psd_tol) - matrix_power(A, 1 / p, psd_tol=psd_tol))
    rhs = n ** ((p - 1) / 2) * frobenius_norm(Z - A) ** (1 / p)
    return WihlerResult(lhs, rhs, bool(lhs <= rhs * (1 + 1e-10)))


def random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    """PSD matrix of random rank and log-uniform scale."""
    r = int(rng.integers(0, n + 1))
    G = _complex(rng, n, r) * 10.0 ** rng.uniform(-3, 1)
    return G @ G.conj().T


@dataclass
class WihlerSweep:
    n: int
    p: float
    trials: int
    violations: int
    max_ratio: float
    sharpness_ratio: float | None
    norm_used: str = "frobenius"


def wihler_sweep(n: int, p: float, trials: int = 1000, seed: int = 0) -> WihlerSweep:
    """Check the bound on ``trials`` seeded random PSD pairs of size ``n``.

    A third of the pairs are close (``Z = A + small PSD``), a third have ``A = 0``.
    For ``n = 1`` the scalar equality case ``A = 0, Z = t`` is included.
    """
    if not p >= 1:
        raise PreconditionError(f"p must be at least 1, got {p}")
    if n < 1:
        raise PreconditionError(f"n must be positive, got {n}")
    violations, max_ratio = 0, 0.0
    for k in range(trials):
        rng = np.random.default_rng(trial_seed(seed, k))
        A = random_psd(rng, n)
        if k % 3 == 0:
            Z = A + random_psd(rng, n) * 1e-4
        elif k % 3 == 1:
            A, Z = np.zeros((n, n)), random_psd(rng, n)
        else:
            Z = random_psd(rng, n)
        res = wihler_check(A, Z, p)
        violations += not res.holds
        max_ratio = max(max_ratio, res.ratio)
    sharp = None
    if n == 1:
        sharp = wihler_check(np.zeros((1, 1)), np.full((1, 1), 0.37), p).ratio
        max_ratio = max(max_ratio, sharp)
    return WihlerSweep(n, p, trials, violations, max_ratio, sharp)


@dataclass
class RemarkReport:
    p: float
    structured_slope: float
    generic_slope: float
    threshold: float
    passed: bool


def lemma_remark_check(
    p_values=(1.5, 2.0, 2.5), *, n: int = 6, rank: int = 3, seed: int = 0, scales=DEFAULT_SCALES
) -> list[RemarkReport]:
    """Show that kernel-structured perturbations beat the generic Hoelder rate ``1/p``.

    For each ``p`` the projector-compression error is fitted on a structured
    instance and must exceed ``1/p + 0.2``; the scalar case ``A = 0, Z = t``
    attains exactly ``1/p``.
    """
    scales = _validate_scales(scales)
    out = []
    for p in p_values:
        spec = InstanceSpec(n, rank, perturbation_kind="projector", seed=seed)
        rep = error_order_fit("projector_lemma_gt1", random_instance(spec), {"p": p}, scales)
        generic = [wihler_check(np.zeros((1, 1)), np.full((1, 1), t), p).lhs for t in scales]
        generic_slope, _ = fit_order(scales, generic)
        threshold = 1 / p + 0.2
        out.append(RemarkReport(p, rep.fitted_slope, generic_slope, threshold, rep.fitted_slope > threshold))
    return out

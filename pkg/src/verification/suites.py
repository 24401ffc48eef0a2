"""Standalone verification suites behind ``fsi-beam verify``.

Each suite returns a ``SuiteResult`` of named checks, every check being a
measured value compared against a limit. Suites never raise on a failed
check; the CLI turns ``SuiteResult.passed`` into the exit code.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from src.assembly.mapped import transport
from src.assembly.operators import DEFAULT_OPTIONS, AssemblyOptions, assemble_first_order
from src.assembly.quadrature import QuadratureGrid, build_quadrature
from src.assembly.tensors import assemble_differentiated_tensors
from src.basis.basis_set import build_basis_set
from src.core.state import StateVector
from src.geometry.mapping import l2_norm_ratio, pullback, pushforward
from src.geometry.transform import (
    GeometrySample,
    correction_field,
    matvec,
    pressure_test_field,
    transform_matrices,
)
from src.pipeline.config import DiscretizationConfig, InitialConfig, PhysicsConfig, SimConfig, TimeConfig

from .oracle import direct_operators, relative_error

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class CheckResult:
    """One measured quantity; ``at_least`` flips the comparison to value >= limit."""

    name: str
    value: float
    limit: float
    at_least: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value >= self.limit if self.at_least else self.value <= self.limit

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "limit": self.limit,
            "comparison": ">=" if self.at_least else "<=",
            "passed": self.passed,
        }


@dataclass
class SuiteResult:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    info: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, value: float, limit: float, at_least: bool = False) -> CheckResult:
        check = CheckResult(name, float(value), float(limit), at_least)
        self.checks.append(check)
        level = logging.INFO if check.passed else logging.WARNING
        logger.log(level, "[%s] %s: %.3e (limit %.1e) %s", self.suite, name, check.value, limit,
                   "ok" if check.passed else "FAILED")
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "info": self.info,
        }


@dataclass(frozen=True)
class VerifyContext:
    """Shared knobs: assembly options (mutation hook), seed and sizes."""

    options: AssemblyOptions = DEFAULT_OPTIONS
    seed: int = 0
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    geometry_samples: int = 10_000
    lemma_samples: int = 20
    basis_pairs: int = 24
    oracle_pairs: int = 6
    energy_dts: Sequence[float] = (4e-3, 2e-3, 1e-3)
    energy_t_end: float = 0.048
    energy_bound: float = 1e-6

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values), initial=0.0))


def _scaled(difference: np.ndarray, scale: np.ndarray) -> float:
    """Largest |difference| relative to a per-point scale floored at one."""
    return float(np.max(np.abs(difference) / np.maximum(1.0, scale), initial=0.0))


def _transpose(matrix: np.ndarray) -> np.ndarray:
    return np.swapaxes(matrix, -1, -2)


def _product_scale(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Entrywise |left| @ |right|, the rounding scale of a matrix product."""
    return np.abs(left) @ np.abs(right)


def _spectral_divergence(w: np.ndarray, grid: QuadratureGrid):
    dx_w1 = grid.dx(w[..., 0], axis=0)
    dz_w2 = grid.dz(w[..., 1], axis=1)
    return dx_w1 + dz_w2, max(1.0, _max_abs(dx_w1), _max_abs(dz_w2))


# ---------------------------------------------------------------------------
# Geometry identities
# ---------------------------------------------------------------------------


def geometry_suite(ctx: VerifyContext) -> SuiteResult:
    result = SuiteResult("geometry")
    rng = ctx.rng(1)
    n = ctx.geometry_samples

    h = rng.uniform(0.2, 3.0, n)
    hx, ht, htx = (rng.uniform(-2.0, 2.0, n) for _ in range(3))
    z = rng.uniform(0.0, 1.0, n)
    mats = transform_matrices(GeometrySample(h=h, dx_h=hx, dt_h=ht, dtdx_h=htx, z=z))
    B, Bt = mats.B, _transpose(mats.B)
    eye = np.broadcast_to(np.eye(2), B.shape)

    det = B[..., 0, 0] * B[..., 1, 1] - B[..., 0, 1] * B[..., 1, 0]
    result.add("det B = h", float(np.max(np.abs(det - h) / h)), 8 * EPS)

    gram = Bt @ B / h[:, None, None]
    scale = _product_scale(Bt, B) / h[:, None, None]
    result.add("A = B^T B / h", _scaled(mats.A - gram, scale), 8 * EPS)

    inverse = B @ _transpose(mats.B_invT)
    result.add("B (B^-T)^T = I", _scaled(inverse - eye, _product_scale(B, _transpose(mats.B_invT))), 8 * EPS)

    left = mats.B_invT @ _transpose(mats.dtB)
    right = -(mats.dtB_invT @ Bt)
    scale = _product_scale(mats.B_invT, _transpose(mats.dtB)) + _product_scale(mats.dtB_invT, Bt)
    result.add("B^-T dtB^T = -dtB^-T B^T", _scaled(left - right, scale), 8 * EPS)

    # dt h = div(B^T chi_t) on a periodic grid
    grid = build_quadrature(1.0, 32, 16)
    X = grid.x
    a, b = rng.uniform(-0.2, 0.2, 2)
    c, d = rng.uniform(-1.0, 1.0, 2)
    kappa = 2.0 * math.pi
    hh = 1.0 + a * np.cos(kappa * X) + b * np.sin(2 * kappa * X)
    hhx = -a * kappa * np.sin(kappa * X) + 2 * b * kappa * np.cos(2 * kappa * X)
    hht = c * np.cos(kappa * X) + d * np.sin(kappa * X)
    hhtx = kappa * (-c * np.sin(kappa * X) + d * np.cos(kappa * X))
    col = lambda v: v[:, None]  # noqa: E731
    grid_mats = transform_matrices(
        GeometrySample(h=col(hh), dx_h=col(hhx), dt_h=col(hht), dtdx_h=col(hhtx), z=grid.z[None, :])
    )
    divergence, scale = _spectral_divergence(transport(grid_mats.chi_dt, grid_mats.B), grid)
    result.add("dt h = div(B^T chi_t)", _max_abs(divergence - col(hht)) / scale, 1e-12)

    # norm ratio pinned between min h and max h
    worst = 0.0
    for _ in range(10):
        f_hat = rng.normal(size=grid.shape + (2,))
        heights = rng.uniform(0.1, 4.0, grid.n_x)
        ratio = l2_norm_ratio(f_hat, heights, grid.wx, grid.wz)
        worst = max(worst, heights.min() - ratio, ratio - heights.max())
    result.add("min h <= L2 ratio <= max h", max(worst, 0.0), 1e-14)

    # pullback / pushforward round trip for a field polynomial in y
    length = 1.0
    coeffs = rng.normal(size=(4, 2))

    def f(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return sum(y**p * (coeffs[p, 0] * np.cos(kappa * x) + coeffs[p, 1] * np.sin(kappa * x)) for p in range(4))

    def height(x: np.ndarray) -> np.ndarray:
        return 1.0 + 0.3 * np.cos(2.0 * math.pi * x / length)

    f_hat = pullback(f, height, grid.x, grid.z)
    y = rng.uniform(0.0, 1.0, (grid.n_x, 12)) * height(grid.x)[:, None]
    physical = pushforward(f_hat, height, grid.x, y, grid.z)
    exact = f(np.broadcast_to(grid.x[:, None], y.shape), y)
    result.add("pushforward(pullback(f)) = f", _max_abs(physical - exact) / max(1.0, _max_abs(exact)), 1e-10)
    return result


# ---------------------------------------------------------------------------
# Correction field and pressure test field
# ---------------------------------------------------------------------------


@dataclass
class _ManufacturedFlow:
    """Time-dependent height and a stream-function velocity with div(B^T u) = 0.

    h = 1 + sum_m A_m(t) cos(k_m x) + C_m(t) sin(k_m x) with quadratic A, C.
    The stream function carries a bubble part vanishing with its slope at
    z = 0, 1 and a top part equal to -int dt h dx at z = 1, so the velocity
    satisfies no-slip at z = 0 and u_hat(x, 1) = dt h e2.
    """

    length: float
    heights: np.ndarray  # (modes, 6): a, b, e for cos then sin
    stream: np.ndarray  # (modes + 1, 4): p, r for cos then sin
    bubble: Polynomial

    @classmethod
    def random(cls, rng: np.random.Generator, length: float = 1.0, modes: int = 2) -> "_ManufacturedFlow":
        z = Polynomial([0.0, 1.0])
        bubble = z**2 * (1.0 - z) ** 2 * (1.0 + rng.uniform(-0.5, 0.5) * z)
        return cls(
            length=length,
            heights=rng.uniform(-0.03, 0.03, (modes, 6)),
            stream=rng.uniform(-1.0, 1.0, (modes + 1, 4)),
            bubble=bubble,
        )

    def sample(self, x: np.ndarray, z: np.ndarray, t: float) -> Dict[str, np.ndarray]:
        X = x[:, None]
        Z = z[None, :]
        h = np.ones_like(X)
        hx, ht, htx, htt = (np.zeros_like(X) for _ in range(4))
        eta, eta_t = np.zeros_like(X), np.zeros_like(X)
        for m, (a, b, e, c, d, f) in enumerate(self.heights, start=1):
            kappa = 2.0 * math.pi * m / self.length
            cos, sin = np.cos(kappa * X), np.sin(kappa * X)
            A, A1, A2 = a + b * t + 0.5 * e * t**2, b + e * t, e
            C, C1, C2 = c + d * t + 0.5 * f * t**2, d + f * t, f
            h = h + A * cos + C * sin
            hx = hx + kappa * (-A * sin + C * cos)
            ht = ht + A1 * cos + C1 * sin
            htx = htx + kappa * (-A1 * sin + C1 * cos)
            htt = htt + A2 * cos + C2 * sin
            eta = eta - (A1 * sin - C1 * cos) / kappa
            eta_t = eta_t - (A2 * sin - C2 * cos) / kappa

        q, q1 = self.bubble(Z), self.bubble.deriv()(Z)
        top, top1 = 3.0 * Z**2 - 2.0 * Z**3, 6.0 * Z - 6.0 * Z**2

        v1 = top1 * eta
        v2 = top * ht
        dv1 = top1 * eta_t
        dv2 = top * htt
        for m, (p, r, s, w) in enumerate(self.stream):
            kappa = 2.0 * math.pi * m / self.length
            cos, sin = np.cos(kappa * X), np.sin(kappa * X)
            P, S = p + r * t, s + w * t
            v1 = v1 + (P * cos + S * sin) * q1
            v2 = v2 - kappa * (-P * sin + S * cos) * q
            dv1 = dv1 + (r * cos + w * sin) * q1
            dv2 = dv2 - kappa * (-r * sin + w * cos) * q

        shape = np.broadcast_shapes(X.shape, Z.shape)
        v = np.stack([np.broadcast_to(v1, shape), np.broadcast_to(v2, shape)], axis=-1)
        dv = np.stack([np.broadcast_to(dv1, shape), np.broadcast_to(dv2, shape)], axis=-1)
        return {"h": h, "hx": hx, "ht": ht, "htx": htx, "htt": htt, "v": v, "dv": dv, "z": Z}


def _lemma_fields(sample: GeometrySample, u_hat: np.ndarray, dt_u_hat: np.ndarray) -> Dict[str, np.ndarray]:
    mats = transform_matrices(sample)
    G = correction_field(u_hat, sample).G
    corrected = dt_u_hat + G
    return {
        "mats": mats,
        "G": G,
        "G_direct": matvec(mats.B_invT, transport(u_hat, mats.dtB)),
        "corrected": corrected,
        "phi": pressure_test_field(u_hat, dt_u_hat, sample).phi,
        "phi_direct": matvec(mats.B_invT, transport(corrected, mats.dtB)),
    }


def _divergence_identity(fields: Dict[str, Any], grid: QuadratureGrid) -> float:
    mats = fields["mats"]
    left, left_scale = _spectral_divergence(transport(fields["corrected"], mats.dtB), grid)
    right, right_scale = _spectral_divergence(transport(fields["phi"], mats.B), grid)
    return _max_abs(left - right) / max(left_scale, right_scale)


def lemma_suite(ctx: VerifyContext) -> SuiteResult:
    result = SuiteResult("lemma")
    rng = ctx.rng(2)
    length = 1.0
    grid = build_quadrature(length, 64, 32)
    x, z = grid.x, grid.z
    col = lambda v: v[:, None]  # noqa: E731
    kappa = 2.0 * math.pi / length

    # h = 1 + 0.1 sin(kx) cos t with u_hat^1 = z^2 (1 - z)^2 sin(kx), steady in t
    t0 = 0.3
    sk, ck = np.sin(kappa * x), np.cos(kappa * x)
    sample = GeometrySample(
        h=col(1.0 + 0.1 * sk * math.cos(t0)),
        dx_h=col(0.1 * kappa * ck * math.cos(t0)),
        dt_h=col(-0.1 * sk * math.sin(t0)),
        dtdx_h=col(-0.1 * kappa * ck * math.sin(t0)),
        z=z[None, :],
    )
    u_hat = np.zeros(grid.shape + (2,))
    u_hat[..., 0] = col(sk) * (z**2 * (1.0 - z) ** 2)[None, :]
    fields = _lemma_fields(sample, u_hat, np.zeros_like(u_hat))
    result.add("div identity (closed-form case)", _divergence_identity(fields, grid), 1e-8)

    worst = {"G": 0.0, "solenoidal": 0.0, "phi": 0.0, "identity": 0.0, "top": 0.0, "top accel": 0.0}
    top_z = np.array([1.0])
    for _ in range(ctx.lemma_samples):
        flow = _ManufacturedFlow.random(rng, length)
        t = float(rng.uniform(0.0, 0.5))

        data = flow.sample(x, z, t)
        sample = GeometrySample(h=data["h"], dx_h=data["hx"], dt_h=data["ht"], dtdx_h=data["htx"], z=data["z"])
        mats = transform_matrices(sample)
        u_hat = matvec(mats.B_invT, data["v"])
        dt_u_hat = matvec(mats.dtB_invT, data["v"]) + matvec(mats.B_invT, data["dv"])
        fields = _lemma_fields(sample, u_hat, dt_u_hat)

        worst["G"] = max(worst["G"], _scaled(fields["G"] - fields["G_direct"], np.abs(fields["G_direct"])))
        divergence, scale = _spectral_divergence(transport(fields["corrected"], mats.B), grid)
        worst["solenoidal"] = max(worst["solenoidal"], _max_abs(divergence) / scale)
        worst["phi"] = max(worst["phi"], _scaled(fields["phi"] - fields["phi_direct"], np.abs(fields["phi_direct"])))
        worst["identity"] = max(worst["identity"], _divergence_identity(fields, grid))

        top = flow.sample(x, top_z, t)
        top_sample = GeometrySample(h=top["h"], dx_h=top["hx"], dt_h=top["ht"], dtdx_h=top["htx"], z=top["z"])
        top_mats = transform_matrices(top_sample)
        top_u = matvec(top_mats.B_invT, top["v"])
        top_du = matvec(top_mats.dtB_invT, top["v"]) + matvec(top_mats.B_invT, top["dv"])
        top_fields = _lemma_fields(top_sample, top_u, top_du)
        worst["top"] = max(worst["top"], _max_abs(top_fields["phi"]) / max(1.0, _max_abs(fields["phi"])))
        expected = np.zeros_like(top_du)
        expected[..., 1] = top["htt"]
        worst["top accel"] = max(
            worst["top accel"], _max_abs(top_fields["corrected"] - expected) / max(1.0, _max_abs(expected))
        )

    result.add("G closed form", worst["G"], 1e-12)
    result.add("div B^T (dt u + G) = 0", worst["solenoidal"], 1e-8)
    result.add("phi closed form", worst["phi"], 1e-12)
    result.add("div dtB^T (dt u + G) = div B^T phi", worst["identity"], 1e-8)
    result.add("phi(x, 1) = 0", worst["top"], 1e-12)
    result.add("(dt u + G)(x, 1) = dtt h e2", worst["top accel"], 1e-12)
    result.info["samples"] = ctx.lemma_samples
    return result


# ---------------------------------------------------------------------------
# Basis properties
# ---------------------------------------------------------------------------


def basis_suite(ctx: VerifyContext) -> SuiteResult:
    result = SuiteResult("basis")
    length = ctx.physics.length
    basis = build_basis_set(length, ctx.basis_pairs)
    n_x, n_z = DiscretizationConfig(n_pairs=ctx.basis_pairs, oversampling=4.0).grid_sizes(
        basis.max_wavenumber, basis.max_z_degree, length
    )
    grid = build_quadrature(length, n_x, n_z, basis.max_wavenumber, basis.max_z_degree)
    result.info.update(basis.describe())
    result.info["grid"] = {"n_x": n_x, "n_z": n_z}

    psi, grad = basis.evaluate(grid.x, np.array([0.0, 1.0]))
    beam = basis.beam_rows(grid.x)
    scale = max(1.0, _max_abs(psi))
    result.add("no-slip trace at z = 0", _max_abs(psi[:, :, 0, :]) / scale, 1e-10)
    top = psi[:, :, 1, :]
    result.add("top trace = psi_k e2", max(_max_abs(top[..., 0]), _max_abs(top[..., 1] - beam)) / scale, 1e-10)
    result.add("interior beam traces vanish", _max_abs(beam[basis.interior_positions]), 0.0)

    table = basis.tabulate(grid)
    divergence = table.grad[..., 0, 0] + table.grad[..., 1, 1]
    result.add("div Psi = 0", _max_abs(divergence) / max(1.0, _max_abs(table.grad)), 1e-10)

    lifted, interior = basis.lifted_positions, basis.interior_positions
    beam_gram = np.einsum("kx,jx,x->kj", table.beam[lifted], table.beam[lifted], grid.wx)
    result.add("beam modes L2-orthonormal", _max_abs(beam_gram - np.eye(lifted.size)), 1e-10)

    gram = basis.gram_v1(grid)
    block = gram[np.ix_(interior, interior)]
    result.add("interior modes V1-orthonormal", _max_abs(block - np.eye(interior.size)), 1e-10)
    result.add("lifted/interior V1 coupling", _max_abs(gram[np.ix_(lifted, interior)]), 1e-10)
    return result


# ---------------------------------------------------------------------------
# Assembly against the direct-quadrature oracle
# ---------------------------------------------------------------------------


def assembly_suite(ctx: VerifyContext) -> SuiteResult:
    result = SuiteResult("assembly")
    rng = ctx.rng(3)
    physics = ctx.physics
    basis = build_basis_set(physics.length, ctx.oracle_pairs)
    grid = build_quadrature(physics.length, 64, 48, basis.max_wavenumber, basis.max_z_degree)

    state = StateVector(
        t=0.0,
        alpha=rng.uniform(-0.5, 0.5, basis.n_pairs),
        g_coeffs=rng.uniform(-0.04, 0.04, basis.n_beam),
        g_mean=1.0,
    )
    alpha_dot = rng.uniform(-0.5, 0.5, basis.n_pairs)

    operators = assemble_first_order(state, basis, grid, physics, ctx.options, with_tensor=True)
    tensors = assemble_differentiated_tensors(
        state, basis, grid, physics, alpha_dot=alpha_dot, options=ctx.options
    )
    reference = direct_operators(state, basis, grid, physics, alpha_dot).as_dict()

    produced = {
        "M": operators.mass,
        "S": operators.viscous,
        "A": tensors.A,
        "B": tensors.B,
        "C": tensors.C,
        "C3": operators.convection,
        "D": tensors.D,
        "E_sym": 0.5 * (tensors.E + np.transpose(tensors.E, (0, 2, 1))),
    }
    for name, values in produced.items():
        result.add(f"{name} vs direct quadrature", relative_error(values, reference[name]), 1e-10)

    result.add("A symmetric", relative_error(tensors.A, tensors.A.T), 1e-12)
    result.info["n_pairs"] = basis.n_pairs
    return result


# ---------------------------------------------------------------------------
# Energy balance under dt refinement
# ---------------------------------------------------------------------------


def energy_suite(ctx: VerifyContext) -> SuiteResult:
    # Local import: the integrator pulls in the scenario and export layers.
    from src.integrator.driver import prepare, run

    result = SuiteResult("energy")
    base = SimConfig(
        physics=ctx.physics,
        discretization=DiscretizationConfig(n_pairs=ctx.oracle_pairs),
        time=TimeConfig(dt=ctx.energy_dts[0], t_end=ctx.energy_t_end),
        initial=InitialConfig(scenario="sine_perturbation", params={"amplitude": 0.1}),
        seed=ctx.seed,
    )

    simulation = None
    residuals: List[float] = []
    for dt in ctx.energy_dts:
        config = replace(base, time=replace(base.time, dt=dt))
        if simulation is None:
            simulation = prepare(config, ctx.options)
        else:
            simulation = _retimed(simulation, config)
        outcome = run(config, simulation=simulation, progress=False, options=ctx.options)
        residuals.append(max(abs(row.balance_residual) for row in outcome.trajectory.ledger))
        logger.info("dt=%.1e: max |balance residual| = %.3e", dt, residuals[-1])

    orders = [
        math.log2(coarse / fine) if fine > 0.0 else math.inf
        for coarse, fine in zip(residuals[:-1], residuals[1:])
    ]
    result.info["dts"] = list(ctx.energy_dts)
    result.info["residuals"] = residuals
    result.info["orders"] = orders
    result.add("observed order of the balance residual", min(orders), 1.9, at_least=True)
    result.add("max balance residual at the finest dt", residuals[-1], ctx.energy_bound)
    return result


def _retimed(simulation: Any, config: SimConfig) -> Any:
    from src.integrator.stepper import StepScheme

    return replace(simulation, config=config, scheme=StepScheme.from_config(config.time))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SuiteFn = Callable[[VerifyContext], SuiteResult]

SUITES: Dict[str, SuiteFn] = {
    "geometry": geometry_suite,
    "lemma": lemma_suite,
    "basis": basis_suite,
    "assembly": assembly_suite,
    "energy": energy_suite,
}

MUTATIONS: Dict[str, AssemblyOptions] = {
    "sign-flip": AssemblyOptions(skew_sign=-1.0),
}


def run_suites(names: Optional[Sequence[str]] = None, ctx: Optional[VerifyContext] = None) -> List[SuiteResult]:
    """Run the named suites (all when ``names`` is empty or contains 'all')."""
    ctx = ctx or VerifyContext()
    if not names or "all" in names:
        names = list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise KeyError(f"unknown verification suite(s): {', '.join(unknown)}; available: {', '.join(SUITES)}")
    results = []
    for name in names:
        logger.info("Running verification suite '%s'", name)
        results.append(SUITES[name](ctx))
    return results

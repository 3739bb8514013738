"""Markov chain Monte Carlo for the confined particle gas.

Two schemes target the Boltzmann weight exp(-beta * E_n):

* single-particle Metropolis (`metropolis`): one uniformly chosen particle
  receives a Gaussian displacement; the move costs O(n) through the
  incremental energy difference. This is the default scheme.
* Metropolis-adjusted Langevin (`mala`): all particles move along the tamed
  energy gradient plus noise, with an exact accept/reject correction so the
  discrete chain still targets the gas law despite the singular drift. Each
  step costs O(n^2).

Both drivers consume pre-drawn blocks of randomness from a seeded PCG64
generator, so a (seed, config) pair fully determines the output regardless
of scheduling. The hot loops are compiled with numba; a pure-Python mirror
of each kernel consumes the same blocks and is used by the test suite to
pin the compiled path to readable reference code.

Step-size adaptation runs during burn-in only: an exponentially weighted
acceptance estimate is compared against the target after every step and the
step size is nudged by x1.01 or /1.01, then frozen for the sampling phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .equilibrium import equilibrium_for, sample_equilibrium
from .kernel import (
    CACHE_REFRESH_MOVES,
    CollisionError,
    Configuration,
    GasParameters,
    Potential,
    Quadratic,
    SphericalLog,
    energy_delta,
    energy_total,
    gradient_energy,
)

__all__ = [
    "SamplerConfig",
    "ChainState",
    "ChainOutput",
    "mh_step",
    "mala_step",
    "run_chain",
    "run_parallel_chains",
    "run_hermite_chain",
]

_EWMA_WEIGHT = 0.02
_BLOCK_STEPS = 1 << 16

# potential codes understood by the compiled kernels
_POT_QUADRATIC = 0
_POT_SPHERICAL_LOG = 1


@dataclass(frozen=True)
class SamplerConfig:
    """Scheme, step size, adaptation, and chain layout for one MCMC run."""

    scheme: str = "metropolis"  # "metropolis" or "mala"
    step: float = 0.25
    adapt: bool = True
    target_acceptance: float = 0.4
    burn_in: int = 5_000
    thin: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("metropolis", "mala"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not 0.0 < self.target_acceptance < 1.0:
            raise ValueError("target_acceptance must be in (0, 1)")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")


@dataclass
class ChainState:
    """Mutable state of a running chain."""

    cfg: Configuration
    step_count: int = 0
    accept_count: int = 0
    current_step_size: float = 0.0


@dataclass
class ChainOutput:
    """Collected samples plus acceptance and trace diagnostics."""

    samples: list
    acceptance_rate: float
    diagnostics: dict = field(default_factory=dict)


def _pot_code(potential: Potential) -> tuple[int, float]:
    if isinstance(potential, Quadratic):
        return _POT_QUADRATIC, potential.gamma_coeff
    if isinstance(potential, SphericalLog):
        return _POT_SPHERICAL_LOG, potential._c()
    return -1, 0.0


def mh_step(
    state: ChainState, p: GasParameters, sc: SamplerConfig, rng: np.random.Generator
) -> ChainState:
    """One single-particle Metropolis move, in place.

    Draw order: particle index, Gaussian displacement, acceptance uniform.
    Colliding proposals are rejected outright.
    """
    cfg = state.cfg
    i = int(rng.integers(p.n))
    disp = state.current_step_size * rng.standard_normal(p.dim)
    u = rng.random()
    x_new = cfg.points[i] + disp
    try:
        delta = energy_delta(cfg, i, x_new, p)
        collided = False
    except CollisionError:
        delta = math.inf
        collided = True
    state.step_count += 1
    if not collided and (delta <= 0.0 or u < math.exp(-p.beta * delta)):
        cfg.points[i] = x_new
        cfg.cached_energy += delta
        state.accept_count += 1
    return state


def _tamed_drift(grad: np.ndarray, step: float, n: int) -> np.ndarray:
    norm = float(np.linalg.norm(grad))
    return grad / (1.0 + step * norm / n)


def mala_step(
    state: ChainState, p: GasParameters, sc: SamplerConfig, rng: np.random.Generator
) -> ChainState:
    """One Metropolis-adjusted Langevin move on all particles, in place.

    Proposal x' = x - h D(x) + sqrt(2h/beta) xi with the tamed drift
    D = grad E / (1 + h |grad E| / n); the acceptance ratio includes the
    forward/backward Gaussian proposal densities so the chain is exact.
    """
    cfg = state.cfg
    h = state.current_step_size
    noise = rng.standard_normal(cfg.points.shape)
    u = rng.random()
    grad = gradient_energy(cfg, p)
    drift = _tamed_drift(grad, h, p.n)
    x_new = cfg.points - h * drift + math.sqrt(2.0 * h / p.beta) * noise
    state.step_count += 1
    try:
        new_cfg = Configuration(x_new)
        e_new = energy_total(new_cfg, p)
        grad_new = gradient_energy(new_cfg, p)
    except CollisionError:
        return state
    drift_new = _tamed_drift(grad_new, h, p.n)
    back = cfg.points - (x_new - h * drift_new)
    # forward residual is exactly the injected noise, so its density term
    # reduces to -|xi|^2 / 2
    log_q_fwd = -0.5 * float(np.sum(noise**2))
    log_q_back = -p.beta * float(np.sum(back**2)) / (4.0 * h)
    log_alpha = -p.beta * (e_new - cfg.cached_energy) + log_q_back - log_q_fwd
    if log_alpha >= 0.0 or u < math.exp(log_alpha):
        cfg.points = x_new
        cfg.cached_energy = e_new
        state.accept_count += 1
    return state


# ---------------------------------------------------------------------------
# compiled block drivers and their pure-python mirrors
# ---------------------------------------------------------------------------


@njit(cache=True)
def _potential_value(code, param, x):
    r2 = 0.0
    for k in range(x.shape[0]):
        r2 += x[k] * x[k]
    if code == _POT_QUADRATIC:
        return param * r2
    return 0.5 * param * math.log(1.0 + r2)


@njit(cache=True)
def _pair_energy(pts, d):
    n = pts.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                r2 += diff * diff
            if d == 2:
                total += -0.5 * math.log(r2)
            else:
                total += r2 ** (0.5 * (2.0 - d)) / (d - 2.0)
    return total


@njit(cache=True)
def _total_energy(pts, d, beta_n, code, param):
    n = pts.shape[0]
    v = 0.0
    for i in range(n):
        v += _potential_value(code, param, pts[i])
    return beta_n * v + _pair_energy(pts, d)


@njit(cache=True)
def _mh_block(
    pts,
    energy,
    step,
    ewma,
    acc_since_refresh,
    beta,
    code,
    param,
    idx_u,
    disps,
    acc_u,
    adapt,
    target,
    collect_every,
    out_pts,
    out_energy,
):
    n, d = pts.shape
    n_steps = idx_u.shape[0]
    accepts = 0
    n_collected = 0
    log_step_sum = 0.0
    x_new = np.empty(d)
    for t in range(n_steps):
        i = int(idx_u[t] * n)
        if i == n:
            i = n - 1
        for k in range(d):
            x_new[k] = pts[i, k] + step * disps[t, k]
        # potential part of the energy difference
        delta = n * (
            _potential_value(code, param, x_new) - _potential_value(code, param, pts[i])
        )
        collided = False
        for j in range(n):
            if j == i:
                continue
            r2_new = 0.0
            r2_old = 0.0
            for k in range(d):
                dn = x_new[k] - pts[j, k]
                do = pts[i, k] - pts[j, k]
                r2_new += dn * dn
                r2_old += do * do
            if r2_new == 0.0:
                collided = True
                break
            if d == 2:
                delta += -0.5 * (math.log(r2_new) - math.log(r2_old))
            else:
                delta += (
                    r2_new ** (0.5 * (2.0 - d)) - r2_old ** (0.5 * (2.0 - d))
                ) / (d - 2.0)
        accepted = False
        if not collided:
            if delta <= 0.0 or acc_u[t] < math.exp(-beta * delta):
                accepted = True
        if accepted:
            for k in range(d):
                pts[i, k] = x_new[k]
            energy += delta
            accepts += 1
            acc_since_refresh += 1
            if acc_since_refresh >= CACHE_REFRESH_MOVES:
                energy = _total_energy(pts, d, n, code, param)
                acc_since_refresh = 0
        if adapt:
            a = 1.0 if accepted else 0.0
            ewma = (1.0 - _EWMA_WEIGHT) * ewma + _EWMA_WEIGHT * a
            if ewma > target:
                step *= 1.01
            else:
                step /= 1.01
            log_step_sum += math.log(step)
        if collect_every > 0 and (t + 1) % collect_every == 0:
            for a_i in range(n):
                for k in range(d):
                    out_pts[n_collected, a_i, k] = pts[a_i, k]
            out_energy[n_collected] = energy
            n_collected += 1
    return energy, step, ewma, accepts, acc_since_refresh, log_step_sum


def _mh_block_py(
    pts,
    energy,
    step,
    ewma,
    acc_since_refresh,
    beta,
    code,
    param,
    idx_u,
    disps,
    acc_u,
    adapt,
    target,
    collect_every,
    out_pts,
    out_energy,
):
    """Readable mirror of `_mh_block`, same arithmetic and draw consumption."""
    n, d = pts.shape
    n_steps = idx_u.shape[0]
    accepts = 0
    n_collected = 0
    log_step_sum = 0.0
    x_new = np.empty(d)
    for t in range(n_steps):
        i = min(int(idx_u[t] * n), n - 1)
        for k in range(d):
            x_new[k] = pts[i, k] + step * disps[t, k]
        delta = n * (
            _potential_value.py_func(code, param, x_new)
            - _potential_value.py_func(code, param, pts[i])
        )
        collided = False
        for j in range(n):
            if j == i:
                continue
            r2_new = 0.0
            r2_old = 0.0
            for k in range(d):
                dn = x_new[k] - pts[j, k]
                do = pts[i, k] - pts[j, k]
                r2_new += dn * dn
                r2_old += do * do
            if r2_new == 0.0:
                collided = True
                break
            if d == 2:
                delta += -0.5 * (math.log(r2_new) - math.log(r2_old))
            else:
                delta += (
                    r2_new ** (0.5 * (2.0 - d)) - r2_old ** (0.5 * (2.0 - d))
                ) / (d - 2.0)
        accepted = False
        if not collided:
            if delta <= 0.0 or acc_u[t] < math.exp(-beta * delta):
                accepted = True
        if accepted:
            pts[i, :] = x_new
            energy += delta
            accepts += 1
            acc_since_refresh += 1
            if acc_since_refresh >= CACHE_REFRESH_MOVES:
                energy = _total_energy.py_func(pts, d, n, code, param)
                acc_since_refresh = 0
        if adapt:
            a = 1.0 if accepted else 0.0
            ewma = (1.0 - _EWMA_WEIGHT) * ewma + _EWMA_WEIGHT * a
            if ewma > target:
                step *= 1.01
            else:
                step /= 1.01
            log_step_sum += math.log(step)
        if collect_every > 0 and (t + 1) % collect_every == 0:
            out_pts[n_collected] = pts
            out_energy[n_collected] = energy
            n_collected += 1
    return energy, step, ewma, accepts, acc_since_refresh, log_step_sum


@njit(cache=True)
def _gradient(pts, d, beta_n, code, param, out):
    n = pts.shape[0]
    for i in range(n):
        r2 = 0.0
        for k in range(d):
            r2 += pts[i, k] * pts[i, k]
        if code == _POT_QUADRATIC:
            for k in range(d):
                out[i, k] = beta_n * 2.0 * param * pts[i, k]
        else:
            for k in range(d):
                out[i, k] = beta_n * param * pts[i, k] / (1.0 + r2)
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                r2 += diff * diff
            w = r2 ** (-0.5 * d)
            for k in range(d):
                diff = pts[i, k] - pts[j, k]
                out[i, k] -= w * diff
                out[j, k] += w * diff


@njit(cache=True)
def _mala_block(
    pts,
    energy,
    step,
    ewma,
    beta,
    code,
    param,
    noises,
    acc_u,
    adapt,
    target,
    collect_every,
    out_pts,
    out_energy,
):
    n, d = pts.shape
    n_steps = acc_u.shape[0]
    accepts = 0
    n_collected = 0
    log_step_sum = 0.0
    grad = np.empty((n, d))
    grad_new = np.empty((n, d))
    x_new = np.empty((n, d))
    for t in range(n_steps):
        _gradient(pts, d, n, code, param, grad)
        gnorm = 0.0
        for i in range(n):
            for k in range(d):
                gnorm += grad[i, k] * grad[i, k]
        gnorm = math.sqrt(gnorm)
        tame = 1.0 / (1.0 + step * gnorm / n)
        sigma = math.sqrt(2.0 * step / beta)
        noise_sq = 0.0
        for i in range(n):
            for k in range(d):
                xi = noises[t, i, k]
                noise_sq += xi * xi
                x_new[i, k] = pts[i, k] - step * tame * grad[i, k] + sigma * xi
        collided = False
        for i in range(n):
            for j in range(i + 1, n):
                r2 = 0.0
                for k in range(d):
                    diff = x_new[i, k] - x_new[j, k]
                    r2 += diff * diff
                if r2 == 0.0:
                    collided = True
        accepted = False
        e_new = energy
        if not collided:
            e_new = _total_energy(x_new, d, n, code, param)
            _gradient(x_new, d, n, code, param, grad_new)
            gnorm_new = 0.0
            for i in range(n):
                for k in range(d):
                    gnorm_new += grad_new[i, k] * grad_new[i, k]
            gnorm_new = math.sqrt(gnorm_new)
            tame_new = 1.0 / (1.0 + step * gnorm_new / n)
            back_sq = 0.0
            for i in range(n):
                for k in range(d):
                    b = pts[i, k] - (x_new[i, k] - step * tame_new * grad_new[i, k])
                    back_sq += b * b
            log_alpha = (
                -beta * (e_new - energy)
                - beta * back_sq / (4.0 * step)
                + 0.5 * noise_sq
            )
            if log_alpha >= 0.0 or acc_u[t] < math.exp(log_alpha):
                accepted = True
        if accepted:
            for i in range(n):
                for k in range(d):
                    pts[i, k] = x_new[i, k]
            energy = e_new
            accepts += 1
        if adapt:
            a = 1.0 if accepted else 0.0
            ewma = (1.0 - _EWMA_WEIGHT) * ewma + _EWMA_WEIGHT * a
            if ewma > target:
                step *= 1.01
            else:
                step /= 1.01
            log_step_sum += math.log(step)
        if collect_every > 0 and (t + 1) % collect_every == 0:
            for i in range(n):
                for k in range(d):
                    out_pts[n_collected, i, k] = pts[i, k]
            out_energy[n_collected] = energy
            n_collected += 1
    return energy, step, ewma, accepts, log_step_sum


# ---------------------------------------------------------------------------
# chain drivers
# ---------------------------------------------------------------------------


def _initial_configuration(p: GasParameters, rng: np.random.Generator) -> Configuration:
    """Start from the matching limiting measure when one is known.

    Quadratic confinement gamma |x|^2 has the uniform ball of radius
    (2 gamma)^(-1/d) as its limit; the weak log confinement has the
    heavy-tailed law. Anything else starts from standard Gaussian points.
    """
    pot = p.potential
    if isinstance(pot, Quadratic):
        radius = (2.0 * pot.gamma_coeff) ** (-1.0 / p.dim)
        measure = equilibrium_for("uniform_ball", d=p.dim)
        pts = radius * sample_equilibrium(measure, p.n, rng)
    elif isinstance(pot, SphericalLog) and p.dim == 2:
        measure = equilibrium_for("spherical_heavy_tail")
        pts = sample_equilibrium(measure, p.n, rng)
    else:
        pts = rng.standard_normal((p.n, p.dim))
    cfg = Configuration(pts)
    cfg.cached_energy = energy_total(cfg, p)
    return cfg


def _drive_mh(p, sc, n_samples, rng, cfg, use_python=False):
    code, param = _pot_code(p.potential)
    block_fn = _mh_block_py if use_python else _mh_block
    pts = cfg.points
    energy = cfg.cached_energy
    step = sc.step
    ewma = sc.target_acceptance
    acc_since_refresh = 0
    burn_accepts = 0

    dummy_pts = np.empty((1, p.n, p.dim))
    dummy_energy = np.empty(1)
    # the adapted step oscillates around its fixed point; freezing at the
    # geometric mean over the second half of burn-in removes the snapshot bias
    half = sc.burn_in // 2
    log_step_acc = 0.0
    done = 0
    while done < sc.burn_in:
        t = min(_BLOCK_STEPS, (half - done) if done < half else (sc.burn_in - done))
        idx_u = rng.random(t)
        disps = rng.standard_normal((t, p.dim))
        acc_u = rng.random(t)
        energy, step, ewma, acc, acc_since_refresh, lss = block_fn(
            pts, energy, step, ewma, acc_since_refresh,
            p.beta, code, param, idx_u, disps, acc_u,
            sc.adapt, sc.target_acceptance, 0, dummy_pts, dummy_energy,
        )
        burn_accepts += acc
        if done >= half:
            log_step_acc += lss
        done += t
    if sc.adapt and sc.burn_in - half > 0:
        step = math.exp(log_step_acc / (sc.burn_in - half))

    samples_pts = np.empty((n_samples, p.n, p.dim))
    samples_energy = np.empty(n_samples)
    samples_pts[0] = pts
    samples_energy[0] = energy
    collected = 1
    accepts = 0
    total_steps = (n_samples - 1) * sc.thin
    seg_per_block = max(1, _BLOCK_STEPS // sc.thin)
    while collected < n_samples:
        segs = min(seg_per_block, n_samples - collected)
        t = segs * sc.thin
        idx_u = rng.random(t)
        disps = rng.standard_normal((t, p.dim))
        acc_u = rng.random(t)
        energy, step, ewma, acc, acc_since_refresh, _ = block_fn(
            pts, energy, step, ewma, acc_since_refresh,
            p.beta, code, param, idx_u, disps, acc_u,
            False, sc.target_acceptance, sc.thin,
            samples_pts[collected : collected + segs],
            samples_energy[collected : collected + segs],
        )
        accepts += acc
        collected += segs

    rate = accepts / total_steps if total_steps > 0 else 0.0
    diag = {
        "energy": samples_energy,
        "sum_coord": samples_pts.sum(axis=1),
        "sum_sq": np.einsum("sik,sik->s", samples_pts, samples_pts),
        "final_step": step,
        "burnin_acceptance": burn_accepts / sc.burn_in if sc.burn_in else 0.0,
    }
    samples = [
        Configuration(samples_pts[i].copy(), float(samples_energy[i]))
        for i in range(n_samples)
    ]
    return ChainOutput(samples, rate, diag)


def _drive_mala(p, sc, n_samples, rng, cfg):
    code, param = _pot_code(p.potential)
    pts = cfg.points
    energy = cfg.cached_energy
    step = sc.step
    ewma = sc.target_acceptance
    burn_accepts = 0
    dummy_pts = np.empty((1, p.n, p.dim))
    dummy_energy = np.empty(1)
    block = max(1, _BLOCK_STEPS // max(1, p.n))
    half = sc.burn_in // 2
    log_step_acc = 0.0
    done = 0
    while done < sc.burn_in:
        t = min(block, (half - done) if done < half else (sc.burn_in - done))
        noises = rng.standard_normal((t, p.n, p.dim))
        acc_u = rng.random(t)
        energy, step, ewma, acc, lss = _mala_block(
            pts, energy, step, ewma, p.beta, code, param, noises, acc_u,
            sc.adapt, sc.target_acceptance, 0, dummy_pts, dummy_energy,
        )
        burn_accepts += acc
        if done >= half:
            log_step_acc += lss
        done += t
    if sc.adapt and sc.burn_in - half > 0:
        step = math.exp(log_step_acc / (sc.burn_in - half))

    samples_pts = np.empty((n_samples, p.n, p.dim))
    samples_energy = np.empty(n_samples)
    samples_pts[0] = pts
    samples_energy[0] = energy
    collected = 1
    accepts = 0
    total_steps = (n_samples - 1) * sc.thin
    seg_per_block = max(1, block // sc.thin)
    while collected < n_samples:
        segs = min(seg_per_block, n_samples - collected)
        t = segs * sc.thin
        noises = rng.standard_normal((t, p.n, p.dim))
        acc_u = rng.random(t)
        energy, step, ewma, acc, _ = _mala_block(
            pts, energy, step, ewma, p.beta, code, param, noises, acc_u,
            False, sc.target_acceptance, sc.thin,
            samples_pts[collected : collected + segs],
            samples_energy[collected : collected + segs],
        )
        accepts += acc
        collected += segs

    rate = accepts / total_steps if total_steps > 0 else 0.0
    diag = {
        "energy": samples_energy,
        "sum_coord": samples_pts.sum(axis=1),
        "sum_sq": np.einsum("sik,sik->s", samples_pts, samples_pts),
        "final_step": step,
        "burnin_acceptance": burn_accepts / sc.burn_in if sc.burn_in else 0.0,
    }
    samples = [
        Configuration(samples_pts[i].copy(), float(samples_energy[i]))
        for i in range(n_samples)
    ]
    return ChainOutput(samples, rate, diag)


def _drive_generic(p, sc, n_samples, rng, cfg):
    """Fallback driver for potentials without a compiled kernel."""
    state = ChainState(cfg, 0, 0, sc.step)
    step_fn = mh_step if sc.scheme == "metropolis" else mala_step
    ewma = sc.target_acceptance
    half = sc.burn_in // 2
    log_step_acc = 0.0
    for t in range(sc.burn_in):
        before = state.accept_count
        step_fn(state, p, sc, rng)
        if sc.adapt:
            a = 1.0 if state.accept_count > before else 0.0
            ewma = (1.0 - _EWMA_WEIGHT) * ewma + _EWMA_WEIGHT * a
            if ewma > sc.target_acceptance:
                state.current_step_size *= 1.01
            else:
                state.current_step_size /= 1.01
            if t >= half:
                log_step_acc += math.log(state.current_step_size)
    if sc.adapt and sc.burn_in - half > 0:
        state.current_step_size = math.exp(log_step_acc / (sc.burn_in - half))
    samples = [state.cfg.copy()]
    accepts0 = state.accept_count
    for _ in range(n_samples - 1):
        for _ in range(sc.thin):
            step_fn(state, p, sc, rng)
        samples.append(state.cfg.copy())
    total = (n_samples - 1) * sc.thin
    rate = (state.accept_count - accepts0) / total if total else 0.0
    sum_sq = np.array([float(np.sum(s.points**2)) for s in samples])
    diag = {
        "energy": np.array([s.cached_energy for s in samples]),
        "sum_coord": np.array([s.points.sum(axis=0) for s in samples]),
        "sum_sq": sum_sq,
        "final_step": state.current_step_size,
    }
    return ChainOutput(samples, rate, diag)


def run_chain(p: GasParameters, sc: SamplerConfig, n_samples: int) -> ChainOutput:
    """Run one chain: burn-in with adaptation, then thinned collection.

    The first collected sample is the state at the end of burn-in (the
    initializer itself when burn_in = 0); subsequent samples are separated
    by `thin` steps. Identical (seed, config) pairs give bit-identical
    outputs.
    """
    if n_samples < 1:
        raise ValueError("need n_samples >= 1")
    rng = np.random.Generator(np.random.PCG64(sc.seed))
    cfg = _initial_configuration(p, rng)
    code, _ = _pot_code(p.potential)
    if code < 0:
        return _drive_generic(p, sc, n_samples, rng, cfg)
    if sc.scheme == "metropolis":
        return _drive_mh(p, sc, n_samples, rng, cfg)
    return _drive_mala(p, sc, n_samples, rng, cfg)


def run_parallel_chains(
    p: GasParameters,
    sc: SamplerConfig,
    n_chains: int,
    n_samples: int,
    workers: int = 1,
) -> list[ChainOutput]:
    """Independent chains; chain k runs with seed sc.seed + k.

    Outputs are identical whether the chains execute sequentially or on a
    process pool: each chain owns its generator and no state is shared.
    """
    if n_chains < 1:
        raise ValueError("need n_chains >= 1")
    import dataclasses

    configs = [dataclasses.replace(sc, seed=sc.seed + k) for k in range(n_chains)]
    if workers <= 1 or n_chains == 1:
        return [run_chain(p, c, n_samples) for c in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_chain, p, c, n_samples) for c in configs]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# line gas (1D log-interaction, quadratic confinement)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mh1d_block(
    pts, energy, step, ewma, beta, idx_u, disps, acc_u, adapt, target,
    collect_every, out_pts, out_energy,
):
    n = pts.shape[0]
    n_steps = idx_u.shape[0]
    accepts = 0
    n_collected = 0
    log_step_sum = 0.0
    for t in range(n_steps):
        i = int(idx_u[t] * n)
        if i == n:
            i = n - 1
        x_new = pts[i] + step * disps[t]
        delta = n * 0.25 * (x_new * x_new - pts[i] * pts[i])
        collided = False
        for j in range(n):
            if j == i:
                continue
            dn = abs(x_new - pts[j])
            do = abs(pts[i] - pts[j])
            if dn == 0.0:
                collided = True
                break
            delta += -(math.log(dn) - math.log(do))
        accepted = False
        if not collided:
            if delta <= 0.0 or acc_u[t] < math.exp(-beta * delta):
                accepted = True
        if accepted:
            pts[i] = x_new
            energy += delta
            accepts += 1
        if adapt:
            a = 1.0 if accepted else 0.0
            ewma = (1.0 - _EWMA_WEIGHT) * ewma + _EWMA_WEIGHT * a
            if ewma > target:
                step *= 1.01
            else:
                step /= 1.01
            log_step_sum += math.log(step)
        if collect_every > 0 and (t + 1) % collect_every == 0:
            for a_i in range(n):
                out_pts[n_collected, a_i] = pts[a_i]
            out_energy[n_collected] = energy
            n_collected += 1
    return energy, step, ewma, accepts, log_step_sum


def run_hermite_chain(
    n: int, beta: float, sc: SamplerConfig, n_samples: int
) -> tuple[np.ndarray, float]:
    """Metropolis sampler for the quadratically confined gas on the line
    with logarithmic repulsion (density ~ exp(-n beta/4 sum x_i^2)
    prod |x_i - x_j|^beta).

    Returns the (n_samples, n) position array and the sampling-phase
    acceptance rate. Serves the CLI's one-dimensional ensemble and the
    exact-law checks for sums and sums of squares.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.Generator(np.random.PCG64(sc.seed))
    semi = equilibrium_for("semicircle")
    pts = np.array([semi.quantile(u) for u in rng.random(n)])
    energy = n * 0.25 * float(np.sum(pts**2)) - float(
        np.sum([math.log(abs(a - b)) for idx, a in enumerate(pts) for b in pts[idx + 1 :]])
    )
    step = sc.step
    ewma = sc.target_acceptance
    dummy_pts = np.empty((1, n))
    dummy_energy = np.empty(1)
    half = sc.burn_in // 2
    log_step_acc = 0.0
    done = 0
    while done < sc.burn_in:
        t = min(_BLOCK_STEPS, (half - done) if done < half else (sc.burn_in - done))
        energy, step, ewma, _, lss = _mh1d_block(
            pts, energy, step, ewma, beta,
            rng.random(t), rng.standard_normal(t), rng.random(t),
            sc.adapt, sc.target_acceptance, 0, dummy_pts, dummy_energy,
        )
        if done >= half:
            log_step_acc += lss
        done += t
    if sc.adapt and sc.burn_in - half > 0:
        step = math.exp(log_step_acc / (sc.burn_in - half))
    out = np.empty((n_samples, n))
    out_energy = np.empty(n_samples)
    out[0] = pts
    collected = 1
    accepts = 0
    while collected < n_samples:
        segs = min(max(1, _BLOCK_STEPS // sc.thin), n_samples - collected)
        t = segs * sc.thin
        energy, step, ewma, acc, _ = _mh1d_block(
            pts, energy, step, ewma, beta,
            rng.random(t), rng.standard_normal(t), rng.random(t),
            False, sc.target_acceptance, sc.thin,
            out[collected : collected + segs],
            out_energy[collected : collected + segs],
        )
        accepts += acc
        collected += segs
    total = (n_samples - 1) * sc.thin
    return out, (accepts / total if total else 0.0)

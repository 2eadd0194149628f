"""Level map of the cascaded detector-enhancement scheme and its iteration.

One enhancement level wraps a base detector stage in ``n`` controlled-gate
modules, detects the signal path plus the ``n`` auxiliary paths with
stage-level detectors, and reports positive iff at least ``k`` of the
``n + 1`` detectors fire.  The map sends the stage figures of merit
``(eta, dcr)`` — efficiency on a non-vacuum input, false-positive rate on a
vacuum input — to the figures of the wrapped stage.

The decomposition mirrors the physics: a signal photon either survives all
``n`` modules (weight ``p**n``) or is lost right after module ``i`` (weight
``p**(i-1) * (1-p)``, having activated gates ``1..i``), and conditioned on
the loss scenario every detector fires independently with one of four
per-level probabilities (``p_pos``/``q_pos`` for auxiliaries fed by a
non-vacuum/vacuum gate input, ``p_sig``/``q_sig`` for the signal detector).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import binomial

__all__ = [
    "N_MAX",
    "DetectorPerformance",
    "ComponentParams",
    "LevelConfig",
    "Schedule",
    "LevelIntermediates",
    "TrajectoryPoint",
    "Trajectory",
    "ConvergenceRule",
    "level_intermediates",
    "approx_intermediates",
    "de_loss_case",
    "de_survive_case",
    "de_from_intermediates",
    "dcr_from_intermediates",
    "level_de",
    "level_dcr",
    "level_map",
    "iterate_schedule",
    "effective_transmission",
]

# Hard cap on controlled modules per level; math.comb stays exact and the
# per-level tail sums stay O(n**3) at worst.
N_MAX = 64


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class DetectorPerformance:
    """A detector stage's efficiency/dark-count pair (both probabilities)."""

    eta: float
    dcr: float

    def __post_init__(self) -> None:
        _check_prob("eta", self.eta)
        _check_prob("dcr", self.dcr)


@dataclass(frozen=True)
class ComponentParams:
    """Intrinsic constants of one (non-cascaded) controlled-gate module.

    p      -- signal-path transmission through a single module
    P_act  -- probability the auxiliary path is non-vacuum before detection
              given a non-vacuum module input
    Q_err  -- same probability given a vacuum input (auxiliary SPAM error
              floor, detection excluded)

    The constants are module-level and do not degrade with cascade depth;
    cumulative loss enters through the level map's scenario weights.
    """

    p: float
    P_act: float
    Q_err: float

    def __post_init__(self) -> None:
        _check_prob("p", self.p)
        _check_prob("P_act", self.P_act)
        _check_prob("Q_err", self.Q_err)


@dataclass(frozen=True)
class LevelConfig:
    """Per-level choice: n controlled modules, vote threshold k."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not isinstance(self.k, int):
            raise ValueError("n and k must be integers")
        if self.n < 1 or self.n > N_MAX:
            raise ValueError(f"n must be in [1, {N_MAX}], got {self.n}")
        if self.k < 1 or self.k > self.n:
            raise ValueError(f"k must be in [1, n], got k={self.k} with n={self.n}")


@dataclass(frozen=True)
class Schedule:
    """Ordered per-level configs plus the shared module constants."""

    params: ComponentParams
    levels: tuple[LevelConfig, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) == 0:
            raise ValueError("schedule must contain at least one level")
        for cfg in self.levels:
            if not isinstance(cfg, LevelConfig):
                raise ValueError("schedule levels must be LevelConfig instances")


@dataclass(frozen=True)
class LevelIntermediates:
    """Per-detector positive-report probabilities for one level.

    p_pos / q_pos -- auxiliary detector fires, non-vacuum / vacuum gate input
    p_sig / q_sig -- signal detector fires, photon survived / was lost
    """

    p_pos: float
    q_pos: float
    p_sig: float
    q_sig: float

    def __post_init__(self) -> None:
        _check_prob("p_pos", self.p_pos)
        _check_prob("q_pos", self.q_pos)
        _check_prob("p_sig", self.p_sig)
        _check_prob("q_sig", self.q_sig)


@dataclass(frozen=True)
class TrajectoryPoint:
    level: int
    config: LevelConfig | None
    perf: DetectorPerformance


@dataclass(frozen=True)
class Trajectory:
    """Performance sequence produced by iterating the level map.

    ``points[0]`` is the seed detector (no config); every later point carries
    the config that produced it.
    """

    points: tuple[TrajectoryPoint, ...]
    converged: bool = False
    converged_at: int | None = None

    def final(self) -> DetectorPerformance:
        return self.points[-1].perf


@dataclass(frozen=True)
class ConvergenceRule:
    """Stop rule for iteration: level cap plus absolute step tolerances.

    Iteration stops early once BOTH successive changes fall strictly below
    the tolerances; a tolerance of 0.0 therefore disables early stopping.
    """

    max_levels: int = 32
    eta_tol: float = 1e-12
    dcr_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.max_levels < 1:
            raise ValueError(f"max_levels must be >= 1, got {self.max_levels}")
        if self.eta_tol < 0.0 or self.dcr_tol < 0.0:
            raise ValueError("tolerances must be >= 0")


def level_intermediates(
    det: DetectorPerformance, params: ComponentParams
) -> LevelIntermediates:
    """Exact per-detector firing probabilities for the next level.

    An auxiliary path that is non-vacuum (probability P_act or Q_err
    depending on the gate input) is seen by a stage detector with efficiency
    ``eta``; a vacuum path can still fire through the dark count ``dcr``::

        p_pos = P_act * eta * (1 - dcr) + dcr
        q_pos = Q_err * eta * (1 - dcr) + dcr
        p_sig = eta + (1 - eta) * dcr
        q_sig = dcr
    """
    eta, d = det.eta, det.dcr
    return LevelIntermediates(
        p_pos=params.P_act * eta * (1.0 - d) + d,
        q_pos=params.Q_err * eta * (1.0 - d) + d,
        p_sig=eta + (1.0 - eta) * d,
        q_sig=d,
    )


def approx_intermediates(
    det: DetectorPerformance, params: ComponentParams
) -> LevelIntermediates:
    """Small-dark-count approximation of :func:`level_intermediates`.

    Used only for diagnostics (table-regression variant studies); the exact
    forms are authoritative everywhere else.
    """
    eta, d = det.eta, det.dcr
    return LevelIntermediates(
        p_pos=min(params.P_act * eta, 1.0),
        q_pos=min(params.Q_err * eta + d, 1.0),
        p_sig=eta,
        q_sig=d,
    )


def de_loss_case(
    inter: LevelIntermediates, config: LevelConfig, i: int
) -> float:
    """Positive-report probability given the photon was lost after module i.

    Gates ``1..i`` were activated, so ``i`` auxiliary detectors fire with
    ``p_pos`` and the remaining ``n - i`` with ``q_pos``; the signal detector
    sees vacuum (``q_sig``).  The vote tail is the convolution of the two
    auxiliary binomials, with the threshold lowered by one when the signal
    detector fires.
    """
    n, k = config.n, config.k
    if i < 1 or i > n:
        raise ValueError(f"loss position i must be in [1, n], got i={i} with n={n}")
    t_k = binomial.conv_tail(i, inter.p_pos, n - i, inter.q_pos, k)
    t_k1 = binomial.conv_tail(i, inter.p_pos, n - i, inter.q_pos, k - 1)
    return (1.0 - inter.q_sig) * t_k + inter.q_sig * t_k1


def de_survive_case(inter: LevelIntermediates, config: LevelConfig) -> float:
    """Positive-report probability given the photon survived all modules.

    All ``n`` auxiliaries fire with ``p_pos`` and the signal detector with
    ``p_sig``; a firing signal detector lowers the auxiliary vote threshold
    by one.
    """
    n, k = config.n, config.k
    t_k = binomial.tail(n, inter.p_pos, k)
    t_k1 = binomial.tail(n, inter.p_pos, k - 1)
    return inter.p_sig * t_k1 + (1.0 - inter.p_sig) * t_k


def de_from_intermediates(
    inter: LevelIntermediates, p: float, config: LevelConfig
) -> float:
    """Next-level efficiency from precomputed intermediates.

    Mixture over loss scenarios: survive-all with weight ``p**n`` plus
    lost-after-module-i with weight ``p**(i-1) * (1-p)``.
    """
    n = config.n
    total = 0.0
    pw = 1.0
    for i in range(1, n + 1):
        total += pw * (1.0 - p) * de_loss_case(inter, config, i)
        pw *= p
    total += pw * de_survive_case(inter, config)
    return min(total, 1.0)


def dcr_from_intermediates(inter: LevelIntermediates, config: LevelConfig) -> float:
    """Next-level dark-count rate from precomputed intermediates.

    Vacuum input: every auxiliary fires with ``q_pos``, the signal detector
    with ``q_sig``.  Transmission plays no role (nothing can be lost).
    """
    n, k = config.n, config.k
    t_k = binomial.tail(n, inter.q_pos, k)
    t_k1 = binomial.tail(n, inter.q_pos, k - 1)
    return min((1.0 - inter.q_sig) * t_k + inter.q_sig * t_k1, 1.0)


def level_de(
    det: DetectorPerformance, params: ComponentParams, config: LevelConfig
) -> float:
    """Efficiency of the next level built on ``det`` with ``config``."""
    return de_from_intermediates(level_intermediates(det, params), params.p, config)


def level_dcr(
    det: DetectorPerformance, params: ComponentParams, config: LevelConfig
) -> float:
    """Dark-count rate of the next level built on ``det`` with ``config``."""
    return dcr_from_intermediates(level_intermediates(det, params), config)


def level_map(
    det: DetectorPerformance, params: ComponentParams, config: LevelConfig
) -> DetectorPerformance:
    """One application of the enhancement map ``(eta, dcr) -> (eta', dcr')``."""
    inter = level_intermediates(det, params)
    return DetectorPerformance(
        eta=de_from_intermediates(inter, params.p, config),
        dcr=dcr_from_intermediates(inter, config),
    )


def iterate_schedule(
    init: DetectorPerformance,
    schedule: Schedule,
    stop: ConvergenceRule | None = None,
) -> Trajectory:
    """Iterate the level map along a schedule, recording every level.

    If ``stop.max_levels`` exceeds the schedule length the final config is
    repeated (constant-tail schedule).  Iteration halts early once both
    successive changes fall strictly below the rule's tolerances.
    """
    if stop is None:
        stop = ConvergenceRule()
    points = [TrajectoryPoint(0, None, init)]
    det = init
    converged = False
    converged_at: int | None = None
    for s in range(1, stop.max_levels + 1):
        config = schedule.levels[min(s, len(schedule.levels)) - 1]
        nxt = level_map(det, schedule.params, config)
        points.append(TrajectoryPoint(s, config, nxt))
        if (
            abs(nxt.eta - det.eta) < stop.eta_tol
            and abs(nxt.dcr - det.dcr) < stop.dcr_tol
        ):
            converged = True
            converged_at = s
            det = nxt
            break
        det = nxt
    return Trajectory(tuple(points), converged, converged_at)


def effective_transmission(p: float, N: int) -> float:
    """Per-module transmission under a 1/N post-selection gate: ``p**N``."""
    _check_prob("p", p)
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    return p**N

"""Bandit policies used for channel / spreading-factor selection.

Four policies share one small interface (``select(rng)`` and
``update(arm, success)``):

* :class:`TowBandit` -- tug-of-war dynamics with discounted Q values,
  forgetting-factor reward statistics and a phase-shifted oscillation.
* :class:`Ucb1TunedBandit`, :class:`EpsilonGreedyBandit`,
  :class:`RandomBandit` -- the baselines, all backed by plain
  (pulls, successes, sum of squared rewards) counters.

Arms are 0-based positions within the dimension's arm list. The mapping
from arm position to a physical channel number or SF value lives in the
simulator, which is also what shows up in reports.

:class:`JointSelector` pairs two independent bandits (channel, SF) and
feeds them the same ACK bit.
"""
from __future__ import annotations

import math
import random
from typing import Sequence

POLICIES = ("tow", "ucb1tuned", "egreedy", "random")

DEFAULT_ALPHA = 0.9
DEFAULT_BETA = 0.9
DEFAULT_AMP = 0.5
DEFAULT_EPSILON = 0.1
DEFAULT_OMEGA_MAX = 1e6

_OMEGA_FLOOR = 1e-9
_TIE_TOL = 1e-12


def _argmax_set(values: Sequence[float]) -> list[int]:
    best = max(values)
    tol = _TIE_TOL * max(1.0, abs(best))
    return [k for k in range(len(values)) if values[k] >= best - tol]


def compute_osc(k: int, t: int, n_arms: int, amp: float) -> float:
    """Oscillation term for arm ``k`` (0-based) at decision ``t``."""
    return amp * math.cos(2.0 * math.pi * (t + k) / n_arms)


def omega_from_probs(p1st: float, p2nd: float, omega_max: float = DEFAULT_OMEGA_MAX) -> float:
    denom = 2.0 - p1st - p2nd
    if denom < _OMEGA_FLOOR:
        return omega_max
    return min(max((p1st + p2nd) / denom, 0.0), omega_max)


class TowBandit:
    """Tug-of-war dynamics over ``n_arms`` arms.

    Stores exactly three scalars per arm: the discounted score ``q``, the
    forgetting pull count ``n`` and the forgetting success count ``r``.
    """

    policy = "tow"

    def __init__(
        self,
        n_arms: int,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        amp: float = DEFAULT_AMP,
        omega_max: float = DEFAULT_OMEGA_MAX,
    ) -> None:
        if n_arms < 1:
            raise ValueError("n_arms must be >= 1")
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        if amp < 0.0:
            raise ValueError(f"amp must be >= 0, got {amp}")
        if omega_max <= 0.0:
            raise ValueError("omega_max must be > 0")
        self.n_arms = n_arms
        self.alpha = alpha
        self.beta = beta
        self.amp = amp
        self.omega_max = omega_max
        self.t = 0
        self.q = [0.0] * n_arms
        self.n = [0.0] * n_arms
        self.r = [0.0] * n_arms

    def scores(self) -> list[float]:
        """X_k(t) for every arm, from the Q values of the previous decision."""
        d = self.n_arms
        q = self.q
        if d == 1:
            return [q[0] + compute_osc(0, self.t, 1, self.amp)]
        total = 0.0
        for k in range(d):
            total += q[k]
        out = []
        for k in range(d):
            qk = q[k]
            out.append(qk - (total - qk) / (d - 1) + compute_osc(k, self.t, d, self.amp))
        return out

    def select(self, rng: random.Random) -> int:
        if self.n_arms == 1:
            return 0
        best = _argmax_set(self.scores())
        if len(best) == 1:
            return best[0]
        return best[rng.randrange(len(best))]

    def reward_probs(self) -> list[float]:
        n, r = self.n, self.r
        return [r[k] / n[k] if n[k] > 0.0 else 0.0 for k in range(self.n_arms)]

    def omega(self) -> float:
        p = self.reward_probs()
        # stable sort keeps the lower arm index first on equal p
        order = sorted(range(self.n_arms), key=lambda k: -p[k])
        p1 = p[order[0]]
        p2 = p[order[1]] if self.n_arms > 1 else 0.0
        return omega_from_probs(p1, p2, self.omega_max)

    def update(self, arm: int, success: bool) -> None:
        if not 0 <= arm < self.n_arms:
            raise ValueError(f"arm {arm} outside 0..{self.n_arms - 1}")
        beta = self.beta
        n, r = self.n, self.r
        for k in range(self.n_arms):
            n[k] *= beta
            r[k] *= beta
        n[arm] += 1.0
        if success:
            r[arm] += 1.0
            delta = 1.0
        else:
            delta = -self.omega()
        q = self.q
        alpha = self.alpha
        for k in range(self.n_arms):
            q[k] *= alpha
        q[arm] += delta
        self.t += 1

    def stored_scalars(self) -> int:
        return len(self.q) + len(self.n) + len(self.r)


class _CountingBandit:
    """Shared sufficient statistics for the baseline policies."""

    policy = ""

    def __init__(self, n_arms: int) -> None:
        if n_arms < 1:
            raise ValueError("n_arms must be >= 1")
        self.n_arms = n_arms
        self.t = 0
        self.pulls = [0] * n_arms
        self.successes = [0] * n_arms
        self.sum_sq = [0.0] * n_arms

    def update(self, arm: int, success: bool) -> None:
        if not 0 <= arm < self.n_arms:
            raise ValueError(f"arm {arm} outside 0..{self.n_arms - 1}")
        reward = 1 if success else 0
        self.pulls[arm] += 1
        self.successes[arm] += reward
        self.sum_sq[arm] += float(reward * reward)
        self.t += 1

    def mean(self, arm: int) -> float:
        n = self.pulls[arm]
        return self.successes[arm] / n if n else 0.0

    def variance(self, arm: int) -> float:
        """Population variance of the rewards observed on ``arm``."""
        n = self.pulls[arm]
        if n == 0:
            return 0.0
        mu = self.successes[arm] / n
        return max(self.sum_sq[arm] / n - mu * mu, 0.0)

    def stored_scalars(self) -> int:
        return len(self.pulls) + len(self.successes) + len(self.sum_sq)


class Ucb1TunedBandit(_CountingBandit):
    policy = "ucb1tuned"

    def index(self, arm: int) -> float:
        n = self.pulls[arm]
        log_t = math.log(self.t + 1)
        v = self.variance(arm) + math.sqrt(2.0 * log_t / n)
        return self.mean(arm) + math.sqrt(log_t / n * min(0.25, v))

    def select(self, rng: random.Random | None = None) -> int:
        for k in range(self.n_arms):
            if self.pulls[k] == 0:
                return k
        best, best_val = 0, -math.inf
        for k in range(self.n_arms):
            val = self.index(k)
            if val > best_val:
                best, best_val = k, val
        return best


class EpsilonGreedyBandit(_CountingBandit):
    policy = "egreedy"

    def __init__(self, n_arms: int, epsilon: float = DEFAULT_EPSILON) -> None:
        super().__init__(n_arms)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        self.epsilon = epsilon

    def select(self, rng: random.Random) -> int:
        if self.n_arms == 1:
            return 0
        if rng.random() < self.epsilon:
            return rng.randrange(self.n_arms)
        best = _argmax_set([self.mean(k) for k in range(self.n_arms)])
        if len(best) == 1:
            return best[0]
        return best[rng.randrange(len(best))]


class RandomBandit(_CountingBandit):
    policy = "random"

    def select(self, rng: random.Random) -> int:
        return random_select(self.n_arms, rng)


def random_select(n_arms: int, rng: random.Random) -> int:
    if n_arms == 1:
        return 0
    return rng.randrange(n_arms)


def make_bandit(
    policy: str,
    n_arms: int,
    *,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    amp: float = DEFAULT_AMP,
    epsilon: float = DEFAULT_EPSILON,
    omega_max: float = DEFAULT_OMEGA_MAX,
):
    if policy == "tow":
        return TowBandit(n_arms, alpha=alpha, beta=beta, amp=amp, omega_max=omega_max)
    if policy == "ucb1tuned":
        return Ucb1TunedBandit(n_arms)
    if policy == "egreedy":
        return EpsilonGreedyBandit(n_arms, epsilon=epsilon)
    if policy == "random":
        return RandomBandit(n_arms)
    raise ValueError(f"unknown policy {policy!r}; expected one of {', '.join(POLICIES)}")


class JointSelector:
    """Two independent bandits: one over channels, one over SFs."""

    def __init__(self, policy: str, n_channels: int, n_sfs: int, **params) -> None:
        self.policy = policy
        self.ch = make_bandit(policy, n_channels, **params)
        self.sf = make_bandit(policy, n_sfs, **params)

    @property
    def t(self) -> int:
        return self.ch.t

    def decide(self, rng: random.Random) -> tuple[int, int]:
        if self.ch.t == 0:
            # first decision is uniform for every policy
            return random_select(self.ch.n_arms, rng), random_select(self.sf.n_arms, rng)
        return self.ch.select(rng), self.sf.select(rng)

    def feedback(self, pair: tuple[int, int], success: bool) -> None:
        self.ch.update(pair[0], success)
        self.sf.update(pair[1], success)

    def stored_scalars(self) -> int:
        return self.ch.stored_scalars() + self.sf.stored_scalars()

"""RSMA power allocation, SINRs, effective outage thresholds and rates.

Shared by the closed-form and Monte Carlo paths.  All internal math is in
linear units; thresholds enter in dB at the construction boundary and are
converted exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation

__all__ = [
    "RsmaConfig",
    "EffectiveThreshold",
    "db_to_linear",
    "common_sinr",
    "private_sinr",
    "effective_thresholds",
    "instantaneous_rates",
]


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class RsmaConfig:
    """Two-stage RSMA downlink configuration (linear units).

    ``t_common + sum(t_private) = 1`` is enforced to 1e-12; thresholds are
    per-user SINR requirements for the common and private decoding stages.
    """

    num_users: int
    snr: float
    t_common: float
    t_private: tuple[float, ...]
    common_thresholds: tuple[float, ...]
    private_thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        u = self.num_users
        if int(u) != u or u < 1:
            raise ContractViolation(f"num_users must be a positive integer, got {u}")
        if not (self.snr > 0.0 and math.isfinite(self.snr)):
            raise ContractViolation(f"snr must be positive and finite, got {self.snr}")
        if not 0.0 < self.t_common < 1.0:
            raise ContractViolation(f"t_common must lie in (0,1), got {self.t_common}")
        if len(self.t_private) != u:
            raise ContractViolation("need one private allocation per user")
        if any(t <= 0.0 for t in self.t_private):
            raise ContractViolation("private allocations must be strictly positive")
        if abs(self.t_common + sum(self.t_private) - 1.0) > 1e-12:
            raise ContractViolation(
                f"power allocations must sum to 1, got {self.t_common + sum(self.t_private)}"
            )
        for name, th in (("common", self.common_thresholds), ("private", self.private_thresholds)):
            if len(th) != u:
                raise ContractViolation(f"need one {name} threshold per user")
            if any(not (v > 0.0 and math.isfinite(v)) for v in th):
                raise ContractViolation(f"{name} thresholds must be positive, got {th}")

    @classmethod
    def from_db(
        cls,
        num_users: int,
        snr_db: float,
        t_common: float,
        private_split: tuple[float, ...],
        common_threshold_db: float | tuple[float, ...],
        private_threshold_db: float | tuple[float, ...],
    ) -> "RsmaConfig":
        """Build a config from dB thresholds and private-budget fractions.

        ``private_split`` holds each user's fraction of the private budget
        ``1 - t_common`` and must sum to one.
        """
        if abs(sum(private_split) - 1.0) > 1e-9:
            raise ContractViolation(f"private split must sum to 1, got {private_split}")
        budget = 1.0 - t_common
        t_private = tuple(f * budget for f in private_split)
        # renormalise the last entry so the total is exact to 1e-12
        total = t_common + sum(t_private)
        t_private = t_private[:-1] + (t_private[-1] + (1.0 - total),)

        def expand(th) -> tuple[float, ...]:
            if isinstance(th, (int, float)):
                return tuple(db_to_linear(float(th)) for _ in range(num_users))
            return tuple(db_to_linear(float(v)) for v in th)

        return cls(
            num_users=num_users,
            snr=db_to_linear(snr_db),
            t_common=t_common,
            t_private=t_private,
            common_thresholds=expand(common_threshold_db),
            private_thresholds=expand(private_threshold_db),
        )

    @classmethod
    def default_two_user(cls, snr_db: float) -> "RsmaConfig":
        """The reference two-user operating point: t_c = 0.7, private budget
        split 60/40, common threshold 0 dB, private thresholds -6.5 dB."""
        return cls.from_db(
            num_users=2,
            snr_db=snr_db,
            t_common=0.7,
            private_split=(0.6, 0.4),
            common_threshold_db=0.0,
            private_threshold_db=-6.5,
        )


@dataclass(frozen=True)
class EffectiveThreshold:
    """Per-user outage threshold mapped into the channel-gain domain.

    ``gain`` is max of the common- and private-stage gain thresholds (the
    outage event is ``g < gain``); ``amplitude`` is its square root.  When a
    decoding requirement is algebraically infeasible the marker is carried
    here and downstream outage probability is pinned to one.
    """

    feasible: bool
    gain: float
    amplitude: float
    common_part: float
    private_part: float

    @classmethod
    def infeasible(cls) -> "EffectiveThreshold":
        return cls(False, math.inf, math.inf, math.inf, math.inf)


def common_sinr(cfg: RsmaConfig, gain):
    """SINR of the common stream at channel gain ``gain`` (array-friendly)."""
    g = np.asarray(gain, dtype=float)
    out = cfg.snr * cfg.t_common * g / (cfg.snr * (1.0 - cfg.t_common) * g + 1.0)
    return out if out.ndim else float(out)


def private_sinr(cfg: RsmaConfig, user: int, gain):
    """Post-SIC SINR of ``user``'s private stream (array-friendly)."""
    t_u = cfg.t_private[user]
    resid = 1.0 - cfg.t_common - t_u
    g = np.asarray(gain, dtype=float)
    out = cfg.snr * t_u * g / (cfg.snr * resid * g + 1.0)
    return out if out.ndim else float(out)


def effective_thresholds(cfg: RsmaConfig) -> list[EffectiveThreshold]:
    """Gain-domain outage thresholds per user.

    Common stage:   th_c / (snr * (t_c - sum_u t_u * th_c))
    Private stage:  th_p / (snr * (t_u - sum_{u' != u} t_{u'} * th_p(u')))

    A non-positive denominator means the requirement cannot be met at any
    gain; the user is marked infeasible (outage probability one) rather than
    raising.
    """
    out: list[EffectiveThreshold] = []
    for u in range(cfg.num_users):
        th_c = cfg.common_thresholds[u]
        den_c = cfg.snr * (cfg.t_common - th_c * sum(cfg.t_private))
        th_p = cfg.private_thresholds[u]
        den_p = cfg.snr * (
            cfg.t_private[u]
            - sum(
                cfg.t_private[v] * cfg.private_thresholds[v]
                for v in range(cfg.num_users)
                if v != u
            )
        )
        if den_c <= 0.0 or den_p <= 0.0:
            out.append(EffectiveThreshold.infeasible())
            continue
        g_c = th_c / den_c
        g_p = th_p / den_p
        gain = max(g_c, g_p)
        out.append(
            EffectiveThreshold(
                feasible=True,
                gain=gain,
                amplitude=math.sqrt(gain),
                common_part=g_c,
                private_part=g_p,
            )
        )
    return out


def instantaneous_rates(cfg: RsmaConfig, gains):
    """Common rates, private rates and the system sum rate.

    ``gains`` has shape (..., num_users).  The sum rate counts the common
    rate of the weakest user (smallest gain; ties resolve to the lowest
    index) plus every private rate.
    """
    g = np.asarray(gains, dtype=float)
    if g.shape[-1] != cfg.num_users:
        raise ContractViolation(
            f"expected {cfg.num_users} per-user gains, got shape {g.shape}"
        )
    rate_c = np.log2(1.0 + common_sinr(cfg, g))
    rate_p = np.empty_like(g)
    for u in range(cfg.num_users):
        rate_p[..., u] = np.log2(1.0 + private_sinr(cfg, u, g[..., u]))
    weakest = np.argmin(g, axis=-1)
    rate_c_weakest = np.take_along_axis(
        rate_c, weakest[..., None], axis=-1
    )[..., 0]
    total = rate_c_weakest + rate_p.sum(axis=-1)
    return rate_c, rate_p, total if total.ndim else float(total)

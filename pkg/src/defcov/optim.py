"""AdamW with decoupled weight decay, plus the two LR schedules used in training.

Both schedules are pure functions of the step/epoch index so a training
run's LR trace can be reproduced (and unit-checked) without touching any
optimizer state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .autodiff import NumericsError


@dataclass
class AdamWConfig:
    lr: float = 2e-4
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    weight_decay: float = 1e-4

    def validate(self):
        if self.lr <= 0.0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        b1, b2 = self.betas
        if not (0.0 <= b1 < 1.0 and 0.0 <= b2 < 1.0):
            raise ValueError(f"betas must lie in [0, 1), got {self.betas}")
        if self.eps <= 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.weight_decay < 0.0:
            raise ValueError(f"weight_decay must be non-negative, got {self.weight_decay}")


class AdamWState:
    """First/second moment buffers keyed like the parameter dict."""

    def __init__(self):
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def ensure(self, name, like):
        if name not in self.m:
            self.m[name] = np.zeros_like(like)
            self.v[name] = np.zeros_like(like)


def adamw_step(params, grads, state, cfg, step):
    """Apply one AdamW update in place.

    ``params`` maps name -> Tensor, ``grads`` maps name -> ndarray.  Weight
    decay is decoupled: parameters shrink by lr * wd * p before the moment
    update, so decay never enters the moment estimates.  ``step`` is
    1-based for bias correction.
    """
    cfg.validate()
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    b1, b2 = cfg.betas
    bc1 = 1.0 - b1**step
    bc2 = 1.0 - b2**step
    for name, p in params.items():
        if name not in grads:
            continue
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericsError(f"non-finite gradient for parameter '{name}'")
        state.ensure(name, p.data)
        if cfg.weight_decay != 0.0:
            p.data *= 1.0 - cfg.lr * cfg.weight_decay
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        mhat = m / bc1
        vhat = v / bc2
        p.data -= cfg.lr * mhat / (np.sqrt(vhat) + cfg.eps)


@dataclass
class OneCycleConfig:
    max_lr: float = 2e-4
    total_steps: int = 1000
    pct_start: float = 0.1
    div_factor: float = 10.0
    final_div_factor: float = 100.0

    def validate(self):
        if self.max_lr <= 0.0:
            raise ValueError(f"max_lr must be positive, got {self.max_lr}")
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be >= 1, got {self.total_steps}")
        if not 0.0 < self.pct_start < 1.0:
            raise ValueError(f"pct_start must lie in (0, 1), got {self.pct_start}")
        if self.div_factor <= 0.0 or self.final_div_factor <= 0.0:
            raise ValueError("div factors must be positive")


def onecycle_lr(step, cfg):
    """One-cycle LR at 0-based ``step``: cosine ramp up, cosine anneal down.

    Starts at max_lr / div_factor, peaks at max_lr after pct_start of the
    run, and ends at initial_lr / final_div_factor on the last step.
    """
    cfg.validate()
    if not 0 <= step < cfg.total_steps:
        raise ValueError(f"step {step} outside [0, {cfg.total_steps})")
    initial = cfg.max_lr / cfg.div_factor
    final = initial / cfg.final_div_factor
    peak_step = round(cfg.pct_start * cfg.total_steps)
    if step <= peak_step:
        if peak_step == 0:
            return cfg.max_lr
        frac = step / peak_step
        return initial + (cfg.max_lr - initial) * 0.5 * (1.0 - math.cos(math.pi * frac))
    span = cfg.total_steps - 1 - peak_step
    frac = (step - peak_step) / span if span > 0 else 1.0
    return final + (cfg.max_lr - final) * 0.5 * (1.0 + math.cos(math.pi * frac))


@dataclass
class CosineRestartConfig:
    initial_lr: float = 2e-5
    t0: int = 15
    t_mult: int = 1
    eta_min: float = 2e-7

    def validate(self):
        if self.initial_lr <= 0.0:
            raise ValueError(f"initial_lr must be positive, got {self.initial_lr}")
        if self.t0 < 1:
            raise ValueError(f"t0 must be >= 1, got {self.t0}")
        if self.t_mult < 1:
            raise ValueError(f"t_mult must be >= 1, got {self.t_mult}")
        if self.eta_min < 0.0 or self.eta_min > self.initial_lr:
            raise ValueError("eta_min must lie in [0, initial_lr]")


def cosine_restart_lr(epoch, cfg):
    """Cosine annealing with warm restarts at fractional ``epoch`` >= 0.

    Cycle i has length t0 * t_mult**i epochs; within a cycle the LR decays
    from initial_lr to eta_min along a half cosine and snaps back at the
    restart boundary.
    """
    cfg.validate()
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    if cfg.t_mult == 1:
        t_cur = math.fmod(epoch, cfg.t0)
        t_i = cfg.t0
    else:
        t_i = cfg.t0
        t_cur = epoch
        while t_cur >= t_i:
            t_cur -= t_i
            t_i *= cfg.t_mult
    return cfg.eta_min + (cfg.initial_lr - cfg.eta_min) * 0.5 * (1.0 + math.cos(math.pi * t_cur / t_i))


def clip_grad_norm(grads, max_norm):
    """Scale the whole gradient dict so its global L2 norm is <= max_norm."""
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = math.sqrt(total)
    if norm > max_norm > 0.0:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm

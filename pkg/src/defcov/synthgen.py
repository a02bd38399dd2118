"""Synthetic play generator.

Plays are built at 10 Hz from scheme templates: each non-rushing defender
gets a coverage class, aligns at the class's pre-snap spot (or at a decoy
scheme's spot when the play is disguised), and after the snap moves
toward the class's behavior: man defenders shadow a receiver with a
cushion, zone defenders break for their landmark and rally to the catch
point once the ball is out, rushers chase the quarterback.  Ground-truth
labels fall straight out of the construction, which is what makes the
generator usable as an oracle for the models downstream.

Every play draws from an RNG stream keyed on (seed, play_index), so any
subset of a dataset can be regenerated independently and generation order
never matters.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import vocab
from .play_data import (
    CH_DIR,
    CH_ORI,
    CH_SPD,
    CH_X,
    CH_Y,
    PRE_SNAP_FRAMES,
    Agent,
    DataError,
    LabelSet,
    Play,
    PlayEvents,
    Situation,
    write_jsonl,
)
from .vocab import FIELD_LENGTH, FIELD_WIDTH

SCHEMA_VERSION = 1

_MID_Y = FIELD_WIDTH / 2.0

ROUTES = ("go", "out", "in", "curl", "post", "corner", "flat", "cross")
_ROUTE_P = (0.16, 0.15, 0.15, 0.16, 0.1, 0.1, 0.09, 0.09)


def default_scheme_mix():
    return {
        "MAN": 0.15,
        "COVER_1": 0.20,
        "COVER_2": 0.15,
        "COVER_3": 0.25,
        "COVER_4": 0.12,
        "COVER_6": 0.08,
        "PREVENT": 0.05,
    }


@dataclass(frozen=True)
class TeamProfile:
    team_id: str
    p_disguise: float


@dataclass
class GenConfig:
    n_plays: int
    n_defenders: int = 7
    n_receivers: int = 6
    n_rushers: int = 1
    scheme_mix: dict[str, float] = field(default_factory=default_scheme_mix)
    p_disguise: float = 0.0
    p_double_coverage: float = 0.0
    p_screen: float = 0.03
    p_left: float = 0.25
    noise_sigma: float = 0.35
    seed: int = 0
    team_profiles: tuple[TeamProfile, ...] | None = None

    def validate(self):
        if self.n_plays < 0:
            raise DataError(f"n_plays must be >= 0, got {self.n_plays}")
        if self.n_receivers < 1:
            raise DataError("need at least one eligible receiver")
        if self.n_rushers < 1 or self.n_rushers >= self.n_defenders:
            raise DataError(f"n_rushers {self.n_rushers} incompatible with {self.n_defenders} defenders")
        for name, p in (
            ("p_disguise", self.p_disguise),
            ("p_double_coverage", self.p_double_coverage),
            ("p_screen", self.p_screen),
            ("p_left", self.p_left),
        ):
            if not 0.0 <= p <= 1.0:
                raise DataError(f"{name} must lie in [0, 1], got {p}")
        if self.noise_sigma < 0.0:
            raise DataError("noise_sigma must be non-negative")
        total = 0.0
        n_slots = self.n_defenders - self.n_rushers
        for scheme, p in self.scheme_mix.items():
            if scheme not in vocab.SCHEME_INDEX:
                raise DataError(f"unknown scheme in mix: {scheme!r}")
            if p < 0.0:
                raise DataError(f"negative mix weight for {scheme}")
            total += p
            if p > 0.0:
                n_man = sum(1 for c in vocab.scheme_template(scheme, n_slots) if c in vocab.MAN_CLASSES)
                if n_man > self.n_receivers:
                    raise DataError(
                        f"scheme {scheme} needs {n_man} man defenders but only "
                        f"{self.n_receivers} receivers exist"
                    )
        if abs(total - 1.0) > 1e-9:
            raise DataError(f"scheme_mix must sum to 1, got {total}")
        if self.team_profiles is not None:
            if not self.team_profiles:
                raise DataError("team_profiles must be non-empty when given")
            for tp in self.team_profiles:
                if not 0.0 <= tp.p_disguise <= 1.0:
                    raise DataError(f"team {tp.team_id} p_disguise out of range")


def _play_rng(seed, play_index):
    return np.random.default_rng(np.random.SeedSequence((seed, play_index)))


def _smooth_noise(rng, n, sigma, knot_every=8):
    """Piecewise-linear positional noise; gentle enough to keep speeds sane."""
    if sigma <= 0.0 or n == 0:
        return np.zeros((n, 2))
    k = max(2, n // knot_every + 2)
    knots_t = np.linspace(0, n - 1, k)
    vals = rng.normal(0.0, sigma, (k, 2))
    t = np.arange(n)
    return np.stack([np.interp(t, knots_t, vals[:, i]) for i in range(2)], axis=1)


def _interp_path(times, pts, tq):
    """Waypoint interpolation; holds the final waypoint."""
    times = np.asarray(times, dtype=np.float64)
    pts = np.asarray(pts, dtype=np.float64)
    return np.stack([np.interp(tq, times, pts[:, i]) for i in range(2)], axis=1)


def _route_waypoints(route, x0, y0, rng):
    """Absolute-coordinate waypoints (t, x, y) for one receiver route."""
    v = rng.uniform(7.0, 9.0)
    lat = math.copysign(1.0, y0 - _MID_Y)  # +1 = toward the high-y sideline
    if route == "go":
        d = rng.uniform(18.0, 30.0)
        return [(0.0, x0, y0), (d / v, x0 + d, y0 + rng.uniform(-1.5, 1.5))]
    if route == "out":
        stem = rng.uniform(5.0, 9.0)
        run = rng.uniform(6.0, 10.0)
        t1 = stem / v
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + run / v, x0 + stem + 0.5, y0 + lat * run)]
    if route == "in":
        stem = rng.uniform(5.0, 9.0)
        run = rng.uniform(8.0, 14.0)
        t1 = stem / v
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + run / v, x0 + stem + 1.0, y0 - lat * run)]
    if route == "curl":
        stem = rng.uniform(8.0, 12.0)
        t1 = stem / v
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + 0.8, x0 + stem - 1.5, y0)]
    if route == "post":
        stem = rng.uniform(7.0, 10.0)
        d = rng.uniform(10.0, 16.0)
        t1 = stem / v
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + d / v, x0 + stem + d * 0.8, y0 - lat * d * 0.6)]
    if route == "corner":
        stem = rng.uniform(7.0, 10.0)
        d = rng.uniform(8.0, 14.0)
        t1 = stem / v
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + d / v, x0 + stem + d * 0.8, y0 + lat * d * 0.6)]
    if route == "flat":
        run = rng.uniform(6.0, 10.0)
        return [(0.0, x0, y0), (0.3, x0 + 1.0, y0 + lat * 1.0), (0.3 + run / v, x0 + 2.5, y0 + lat * run)]
    if route == "cross":
        stem = rng.uniform(3.0, 5.0)
        t1 = stem / v
        run = rng.uniform(12.0, 20.0)
        return [(0.0, x0, y0), (t1, x0 + stem, y0), (t1 + run / v, x0 + stem + 3.0, y0 - lat * run)]
    if route == "swing":
        run = rng.uniform(7.0, 11.0)
        return [(0.0, x0, y0), (0.5, x0 - 2.0, y0 + lat * 2.0), (0.5 + run / 8.0, x0 - 3.5, y0 + lat * run)]
    raise ValueError(f"unknown route {route!r}")


def _receiver_lanes(rng, n, x_los):
    """Pre-snap receiver spots, split across both sides of the formation."""
    left = [49.0, 40.5, 33.0, 29.5]
    right = [4.3, 12.8, 20.3, 23.8]
    lanes = []
    for i in range(n):
        pool = left if i % 2 == 0 else right
        lanes.append(pool[i // 2 % len(pool)])
    lanes = [ln + rng.uniform(-1.2, 1.2) for ln in lanes]
    rng.shuffle(lanes)
    return [(x_los - rng.uniform(0.8, 1.6), ln) for ln in lanes]


def _chase_path(tq, start, target_path):
    """Blend from a start point onto a moving target path.

    The blend time scales with the initial gap so closing speed stays
    plausible even when a disguised defender starts far from his man.
    """
    gap = float(np.hypot(*(target_path[0] - start)))
    t_blend = min(max(gap / 9.0, 0.5), 2.5)
    alpha = np.minimum(tq / t_blend, 1.0)[:, None]
    return start[None, :] + alpha * (target_path - start[None, :])


def _zone_path(tq, start, landmark, v, t_pf, catch, v_rally):
    """Break for the landmark, then rally toward the catch point at t_pf."""
    d = landmark - start
    dist = float(np.hypot(*d))
    u = d / dist if dist > 1e-9 else np.zeros(2)
    pre = start[None, :] + u[None, :] * np.minimum(tq * v, dist)[:, None]
    p0 = start + u * min(t_pf * v, dist)
    d2 = catch - p0
    dist2 = float(np.hypot(*d2))
    u2 = d2 / dist2 if dist2 > 1e-9 else np.zeros(2)
    dt = np.maximum(tq - t_pf, 0.0)
    post = p0[None, :] + u2[None, :] * np.minimum(dt * v_rally, dist2)[:, None]
    return np.where((tq <= t_pf)[:, None], pre, post)


def _finish_track(pre_xy, post_xy, is_offense):
    """Assemble one agent's [T, 5] channel block from raw positions."""
    xy = np.concatenate([pre_xy, post_xy], axis=0)
    xy[:, 0] = np.clip(xy[:, 0], 0.5, FIELD_LENGTH - 0.5)
    xy[:, 1] = np.clip(xy[:, 1], 0.3, FIELD_WIDTH - 0.3)
    xy = np.round(xy, 3)
    t_total = xy.shape[0]
    delta = np.diff(xy, axis=0)
    speed = np.concatenate([[0.0], np.hypot(delta[:, 0], delta[:, 1]) * 10.0])
    if t_total > 1:
        speed[0] = speed[1]
    ang = np.degrees(np.arctan2(delta[:, 1], delta[:, 0])) % 360.0
    drn = np.concatenate([[0.0], ang])
    if t_total > 1:
        drn[0] = drn[1]
    facing = 0.0 if is_offense else 180.0
    ori = np.where(speed < 0.3, facing, drn)
    out = np.empty((t_total, 5))
    out[:, CH_X] = xy[:, 0]
    out[:, CH_Y] = xy[:, 1]
    out[:, CH_ORI] = np.round(ori, 2) % 360.0
    out[:, CH_DIR] = np.round(drn, 2) % 360.0
    out[:, CH_SPD] = np.round(speed, 3)
    return out


def _position_for_alignment(cls, depth, y, deepest):
    if cls == "NO_ASSIGNMENT":
        return "DL"
    if cls in vocab.MAN_CLASSES or (depth < 5.5 and abs(y - _MID_Y) > 12.0):
        return "CB"
    if depth >= 9.0:
        return "FS" if deepest else "S"
    return "LB"


def _assign_alignments(classes, matchups, rec_spots, x_los, rng):
    """Pre-snap (x, y) per coverage defender for the shown scheme."""
    spots = []
    for cls, rec_idx in zip(classes, matchups):
        if cls in vocab.MAN_CLASSES:
            rx, ry = rec_spots[rec_idx]
            depth = rng.uniform(1.0, 2.2) if cls == "MAN" else rng.uniform(4.0, 6.0)
            spots.append((x_los + depth, ry + rng.uniform(-0.8, 0.8)))
        elif cls == "PREVENT":
            spots.append((x_los + rng.uniform(16.0, 22.0), _MID_Y + rng.uniform(-16.0, 16.0)))
        else:
            ax, ay = vocab.alignment_xy(cls, x_los)
            spots.append((ax + rng.uniform(-1.0, 1.0), ay + rng.uniform(-1.5, 1.5)))
    return spots


def _coverage_roles(cfg, scheme, rng):
    """Shuffle a scheme's template classes onto coverage defenders.

    Returns (classes, matchup receiver indices) aligned with coverage-slot
    order; ``matchup[i]`` is None for non-man classes.
    """
    n_slots = cfg.n_defenders - cfg.n_rushers
    classes = list(vocab.scheme_template(scheme, n_slots))
    rng.shuffle(classes)
    man_slots = [i for i, c in enumerate(classes) if c in vocab.MAN_CLASSES]
    rec_order = list(rng.permutation(cfg.n_receivers))
    if len(man_slots) > len(rec_order):
        raise DataError(f"scheme {scheme} has more man defenders than receivers")
    matchups = [None] * n_slots
    for slot, rec in zip(man_slots, rec_order):
        matchups[slot] = int(rec)
    return classes, matchups


def _inject_double_coverage(classes, matchups, rng, n_receivers):
    """Force two man-type defenders onto one receiver; returns the receiver."""
    target = int(rng.integers(n_receivers))
    on_target = [i for i, m in enumerate(matchups) if m == target]
    zone_slots = [i for i, c in enumerate(classes) if c not in vocab.MAN_CLASSES]
    rng.shuffle(zone_slots)
    needed = 2 - len(on_target)
    converts = []
    while needed > 0 and zone_slots:
        converts.append(zone_slots.pop())
        needed -= 1
    if needed > 0:
        # All-man call: steal defenders assigned to other receivers.
        others = [i for i, m in enumerate(matchups) if m is not None and m != target]
        rng.shuffle(others)
        converts.extend(others[:needed])
    primary_present = any(classes[i] == "MAN" for i in on_target)
    for j, slot in enumerate(converts):
        classes[slot] = "MAN" if (not primary_present and j == 0) else "MAN_BRACKET"
        matchups[slot] = target
    return target


def _target_defender_truth(play_scheme, screen, def_ids, classes, matchups, target_rec, catch, x_los, def_final):
    """Ground-truth target defender id, or None for uncoverable throws.

    Priority: the man defender on the targeted receiver; else the zone
    defender whose landmark owns the catch point; else (degenerate all-man
    roster with the receiver's defender stolen away) whoever arrives
    nearest the catch.  Ties break toward the lowest agent id.
    """
    if screen or play_scheme == "PREVENT":
        return None
    man_on_target = [
        (def_ids[i], classes[i]) for i in range(len(def_ids)) if matchups[i] == target_rec
    ]
    if man_on_target:
        primaries = sorted(d for d, c in man_on_target if c == "MAN") or sorted(d for d, _ in man_on_target)
        return primaries[0]
    zone = [
        (def_ids[i], classes[i])
        for i in range(len(def_ids))
        if classes[i] not in vocab.MAN_CLASSES and classes[i] != "NO_ASSIGNMENT" and classes[i] != "PREVENT"
    ]
    if zone:
        def landmark_dist(item):
            _, cls = item
            lx, ly = vocab.landmark_xy(cls, x_los)
            return (lx - catch[0]) ** 2 + (ly - catch[1]) ** 2

        best = min(zone, key=lambda item: (landmark_dist(item), item[0]))
        return best[0]
    dists = [float(np.hypot(*(def_final[i] - catch))) for i in range(len(def_ids))]
    return min(zip(dists, def_ids))[1]


def gen_play(cfg, play_index):
    """Generate one labeled play; deterministic in (cfg.seed, play_index)."""
    rng = _play_rng(cfg.seed, play_index)
    profiles = cfg.team_profiles or (TeamProfile("TEAM_00", cfg.p_disguise),)
    profile = profiles[play_index % len(profiles)]

    scheme_names = list(cfg.scheme_mix.keys())
    scheme_probs = np.array([cfg.scheme_mix[s] for s in scheme_names])
    scheme = scheme_names[int(rng.choice(len(scheme_names), p=scheme_probs))]

    yard_line = float(rng.integers(20, 71))
    x_los = 10.0 + yard_line
    if scheme == "PREVENT":
        clock = float(np.round(rng.uniform(10.0, 115.0), 1))
    else:
        clock = float(np.round(rng.uniform(30.0, 1800.0), 1))
    situation = Situation(
        down=int(rng.integers(1, 5)),
        distance=float(rng.integers(2, 13)),
        yard_line=yard_line,
        game_clock_s=clock,
        team_scheme=scheme,
    )

    screen = bool(rng.random() < cfg.p_screen)
    if screen:
        k_pf = int(rng.integers(10, 19))
        k_pa = k_pf + int(rng.integers(3, 7))
    else:
        k_pf = int(rng.integers(15, 36))
        k_pa = k_pf + int(rng.integers(4, 13))
    t_pf = k_pf * 0.1
    n_pre = PRE_SNAP_FRAMES + 1
    tq = np.arange(1, k_pa + 1) * 0.1

    # -- offense ------------------------------------------------------------
    rec_ids = [f"R{i + 1}" for i in range(cfg.n_receivers)]
    rec_spots = _receiver_lanes(rng, cfg.n_receivers, x_los)
    backfield = None
    if cfg.n_receivers >= 3 and rng.random() < 0.5:
        backfield = int(rng.integers(cfg.n_receivers))
        rec_spots[backfield] = (x_los - rng.uniform(5.0, 7.0), _MID_Y + rng.uniform(-2.5, 2.5))

    target_rec = int(rng.integers(cfg.n_receivers))
    routes = [ROUTES[int(rng.choice(len(ROUTES), p=_ROUTE_P))] for _ in range(cfg.n_receivers)]
    if screen:
        routes[target_rec] = "swing"

    rec_paths = []
    for i, (rx, ry) in enumerate(rec_spots):
        wps = _route_waypoints(routes[i], rx, ry, rng)
        times = [w[0] for w in wps]
        pts = [(w[1], w[2]) for w in wps]
        path = _interp_path(times, pts, tq)
        path[:, 0] = np.clip(path[:, 0], 1.0, FIELD_LENGTH - 2.0)
        path[:, 1] = np.clip(path[:, 1], 1.0, FIELD_WIDTH - 1.0)
        path += _smooth_noise(rng, k_pa, cfg.noise_sigma)
        rec_paths.append(path)

    qb_spot = np.array([x_los - 1.5, _MID_Y + rng.uniform(-0.6, 0.6)])
    drop = np.array([x_los - rng.uniform(5.0, 7.0), qb_spot[1] + rng.uniform(-1.0, 1.0)])
    qb_path = _interp_path([0.0, 1.1], [qb_spot, drop], tq)
    qb_path += _smooth_noise(rng, k_pa, cfg.noise_sigma * 0.4)

    # -- defensive roles ----------------------------------------------------
    classes, matchups = _coverage_roles(cfg, scheme, rng)
    double_cov = bool(rng.random() < cfg.p_double_coverage)
    if double_cov:
        _inject_double_coverage(classes, matchups, rng, cfg.n_receivers)

    disguised = bool(rng.random() < profile.p_disguise)
    if disguised:
        decoy = scheme_names[int(rng.choice(len(scheme_names), p=scheme_probs))]
        shown_classes, shown_matchups = _coverage_roles(cfg, decoy, rng)
    else:
        shown_classes, shown_matchups = classes, matchups

    align = _assign_alignments(shown_classes, shown_matchups, rec_spots, x_los, rng)
    catch = rec_paths[target_rec][-1].copy()

    max_depth = max((x - x_los) for x, _ in align) if align else 0.0
    cov_positions = [
        _position_for_alignment(shown_classes[i], align[i][0] - x_los, align[i][1], (align[i][0] - x_los) == max_depth)
        for i in range(len(align))
    ]

    def_paths = []
    for i, cls in enumerate(classes):
        start = np.array(align[i])
        if cls in vocab.MAN_CLASSES:
            rec = matchups[i]
            lag = int(rng.integers(1, 3))
            shifted = np.concatenate([np.repeat(rec_paths[rec][:1], lag, axis=0), rec_paths[rec][:-1]])[:k_pa]
            beaten = (not screen) and rec == target_rec and cls == "MAN"
            if cls == "MAN":
                cush_x = rng.uniform(2.2, 3.2) if beaten else rng.uniform(0.8, 1.8)
                cush_y = rng.uniform(-0.6, 0.6)
            else:
                cush_x = rng.uniform(2.0, 3.0)
                cush_y = rng.uniform(-2.0, 2.0)
            target_path = shifted + np.array([cush_x, cush_y])[None, :]
            path = _chase_path(tq, start, target_path)
        elif cls == "PREVENT":
            lane_y = _MID_Y + (i - (len(classes) - 1) / 2.0) * (FIELD_WIDTH - 18.0) / max(len(classes) - 1, 1)
            landmark = np.array([x_los + 25.0 + rng.uniform(-2.0, 2.0), lane_y])
            path = _zone_path(tq, start, landmark, rng.uniform(4.0, 5.5), t_pf, catch, 4.0)
        else:
            lx, ly = vocab.landmark_xy(cls, x_los)
            landmark = np.array([lx + rng.uniform(-1.0, 1.0), ly + rng.uniform(-1.5, 1.5)])
            owner_dist = (lx - catch[0]) ** 2 + (ly - catch[1]) ** 2
            v_rally = rng.uniform(7.5, 8.5) if owner_dist < 150.0 else rng.uniform(5.0, 6.5)
            path = _zone_path(tq, start, landmark, rng.uniform(5.5, 7.5), t_pf, catch, v_rally)
        path = path + _smooth_noise(rng, k_pa, cfg.noise_sigma)
        def_paths.append(path)

    rush_paths = []
    rush_aligns = []
    for _ in range(cfg.n_rushers):
        ra = np.array([x_los + rng.uniform(0.5, 1.5), _MID_Y + rng.uniform(-4.0, 4.0)])
        t_reach = rng.uniform(0.9, 1.7)
        goal = drop + rng.normal(0.0, 0.7, 2)
        path = _interp_path([0.0, t_reach], [ra, goal], tq)
        path += _smooth_noise(rng, k_pa, cfg.noise_sigma)
        rush_paths.append(path)
        rush_aligns.append(ra)

    # -- assemble roster and tracks ----------------------------------------
    agents = [Agent("QB0", "offense", "QB", False)]
    blocks = []
    pre_noise = lambda: _smooth_noise(rng, n_pre, 0.05, knot_every=5)
    blocks.append(_finish_track(qb_spot[None, :] + pre_noise(), qb_path, True))
    for i, rid in enumerate(rec_ids):
        wide = abs(rec_spots[i][1] - _MID_Y)
        if backfield is not None and i == backfield:
            pos = "RB"
        elif wide > 15.0:
            pos = "WR"
        else:
            pos = "TE" if rng.random() < 0.6 else "WR"
        agents.append(Agent(rid, "offense", pos, True))
        blocks.append(_finish_track(np.array(rec_spots[i])[None, :] + pre_noise(), rec_paths[i], True))

    def_ids = [f"D{i + 1}" for i in range(cfg.n_defenders)]
    cov_ids = def_ids[: len(classes)]
    rush_ids = def_ids[len(classes) :]
    for i, did in enumerate(cov_ids):
        agents.append(Agent(did, "defense", cov_positions[i], False))
        blocks.append(_finish_track(np.array(align[i])[None, :] + pre_noise(), def_paths[i], False))
    for i, did in enumerate(rush_ids):
        agents.append(Agent(did, "defense", "DL", False))
        blocks.append(_finish_track(rush_aligns[i][None, :] + pre_noise(), rush_paths[i], False))

    tracks = np.stack(blocks, axis=0)

    # -- labels -------------------------------------------------------------
    coverage = {did: classes[i] for i, did in enumerate(cov_ids)}
    coverage.update({did: vocab.NO_ASSIGNMENT for did in rush_ids})
    matchup = {
        did: (rec_ids[matchups[i]] if matchups[i] is not None else None) for i, did in enumerate(cov_ids)
    }
    matchup.update({did: None for did in rush_ids})
    target_def = _target_defender_truth(
        scheme, screen, cov_ids, classes, matchups, target_rec, catch, x_los,
        [p[-1] for p in def_paths],
    )
    labels = LabelSet(
        coverage=coverage,
        matchup=matchup,
        target_defender=target_def,
        targeted_receiver=rec_ids[target_rec],
    )

    direction = "left" if rng.random() < cfg.p_left else "right"
    if direction == "left":
        tracks = tracks.copy()
        tracks[:, :, CH_X] = np.round(FIELD_LENGTH - tracks[:, :, CH_X], 3)
        tracks[:, :, CH_Y] = np.round(FIELD_WIDTH - tracks[:, :, CH_Y], 3)
        tracks[:, :, CH_ORI] = np.round(tracks[:, :, CH_ORI] + 180.0, 2) % 360.0
        tracks[:, :, CH_DIR] = np.round(tracks[:, :, CH_DIR] + 180.0, 2) % 360.0

    play = Play(
        play_id=f"play_{cfg.seed}_{play_index:06d}",
        play_direction=direction,
        agents=tuple(agents),
        tracks=tracks,
        events=PlayEvents(PRE_SNAP_FRAMES, PRE_SNAP_FRAMES + k_pf, PRE_SNAP_FRAMES + k_pa),
        situation=situation,
        defense_team=profile.team_id,
    )
    return play, labels


def gen_plays(cfg):
    """In-memory generation of the whole configured dataset."""
    cfg.validate()
    return [gen_play(cfg, i) for i in range(cfg.n_plays)]


def gen_dataset(cfg, out_dir, name="plays"):
    """Write the dataset JSONL plus a manifest; returns both paths.

    Output is byte-identical for identical configs: per-play RNG streams,
    sorted JSON keys, and values rounded at generation time.
    """
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    jsonl_path = os.path.join(out_dir, f"{name}.jsonl")
    write_jsonl((gen_play(cfg, i) for i in range(cfg.n_plays)), jsonl_path)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "n_plays": cfg.n_plays,
        "seed": cfg.seed,
        "config": {
            "n_defenders": cfg.n_defenders,
            "n_receivers": cfg.n_receivers,
            "n_rushers": cfg.n_rushers,
            "scheme_mix": cfg.scheme_mix,
            "p_disguise": cfg.p_disguise,
            "p_double_coverage": cfg.p_double_coverage,
            "p_screen": cfg.p_screen,
            "p_left": cfg.p_left,
            "noise_sigma": cfg.noise_sigma,
            "team_profiles": (
                [{"team_id": tp.team_id, "p_disguise": tp.p_disguise} for tp in cfg.team_profiles]
                if cfg.team_profiles
                else None
            ),
        },
    }
    manifest_path = os.path.join(out_dir, f"{name}.manifest.json")
    tmp = manifest_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    return jsonl_path, manifest_path

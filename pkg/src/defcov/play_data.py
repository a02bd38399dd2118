"""Play data model: parsing, validation, normalization, feature extraction.

A play is tracking data at 10 Hz for every agent on the field plus event
frames (snap, pass forward, pass arrival), the game situation, and label
annotations.  Tracks are stored as a read-only [A, T, 5] array in field
coordinates (x along the 120 yd length, y across the 53.3 yd width).
Labels are expressed in the normalized (offense driving +x) frame, so
consumers must run ``normalize_direction`` before extracting features.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import vocab
from .vocab import FIELD_LENGTH, FIELD_WIDTH, FPS

# Track channels.
CH_X, CH_Y, CH_ORI, CH_DIR, CH_SPD = range(5)
N_TRACK_CHANNELS = 5

# Model feature channels (per agent, per frame).
N_FEATURES = 8

# Frames of pre-snap context every play must carry.
PRE_SNAP_FRAMES = 30

TASKS = ("coverage", "matchup", "target")


class DataError(Exception):
    """Raised for unreadable files or irrecoverably malformed datasets."""


@dataclass(frozen=True)
class Agent:
    agent_id: str
    team_side: str
    position: str
    eligible_receiver: bool = False


@dataclass(frozen=True)
class PlayEvents:
    """Event frame indices into the raw track arrays."""

    snap: int
    pass_forward: int | None
    pass_arrival: int | None

    def valid(self):
        return (
            self.pass_forward is not None
            and self.pass_arrival is not None
            and 0 <= self.snap < self.pass_forward <= self.pass_arrival
        )


@dataclass(frozen=True)
class Situation:
    down: int
    distance: float
    yard_line: float
    game_clock_s: float
    team_scheme: str


@dataclass(frozen=True)
class Play:
    play_id: str
    play_direction: str
    agents: tuple[Agent, ...]
    tracks: np.ndarray
    events: PlayEvents
    situation: Situation
    defense_team: str = "TEAM_00"

    def __post_init__(self):
        self.tracks.flags.writeable = False

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def n_frames(self):
        return self.tracks.shape[1]

    def agent_index(self, agent_id):
        for i, a in enumerate(self.agents):
            if a.agent_id == agent_id:
                return i
        raise KeyError(f"no agent {agent_id!r} on play {self.play_id}")

    def defenders(self):
        return [a for a in self.agents if a.team_side == "defense"]

    def receivers(self):
        return [a for a in self.agents if a.eligible_receiver]

    def los_x(self):
        return 10.0 + self.situation.yard_line


@dataclass(frozen=True)
class LabelSet:
    """Per-play annotations; any of the three tasks may be unlabeled."""

    coverage: dict[str, str] | None = None
    matchup: dict[str, str | None] | None = None
    target_defender: str | None = None
    targeted_receiver: str | None = None


@dataclass(frozen=True)
class ParseError:
    line_no: int
    reason: str


@dataclass
class ParseResult:
    plays: list[tuple[Play, LabelSet]] = field(default_factory=list)
    errors: list[ParseError] = field(default_factory=list)


@dataclass(frozen=True)
class FilterResult:
    keep: bool
    reason: str | None = None


@dataclass(frozen=True)
class Window:
    """A frame window in snap-relative coordinates, both ends inclusive."""

    start: int
    end: int
    pass_forward: int
    pass_arrival: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"empty window [{self.start}, {self.end}]")

    @property
    def n_frames(self):
        return self.end - self.start + 1


# -- parsing ----------------------------------------------------------------


def _angles_ok(a):
    return np.all((a >= 0.0) & (a < 360.0))


def _build_play(obj, expected_defenders):
    """Turn one decoded JSON object into (Play, LabelSet); raises ValueError."""
    for key in ("play_id", "play_direction", "situation", "events", "agents", "frames", "labels"):
        if key not in obj:
            raise ValueError(f"missing field: {key}")
    if obj["play_direction"] not in ("left", "right"):
        raise ValueError(f"bad play_direction: {obj['play_direction']!r}")

    ev = obj["events"]
    for name in ("snap", "pass_forward", "pass_arrival"):
        if name not in ev or ev[name] is None:
            raise ValueError(f"missing event: {name}")
    events = PlayEvents(int(ev["snap"]), int(ev["pass_forward"]), int(ev["pass_arrival"]))
    if not events.valid():
        raise ValueError("event order")

    agents = []
    seen_ids = set()
    for a in obj["agents"]:
        agent = Agent(
            agent_id=str(a["agent_id"]),
            team_side=a["team_side"],
            position=a["position"],
            eligible_receiver=bool(a.get("eligible_receiver", False)),
        )
        if agent.agent_id in seen_ids:
            raise ValueError(f"duplicate agent id: {agent.agent_id}")
        seen_ids.add(agent.agent_id)
        if agent.team_side not in vocab.TEAM_SIDES:
            raise ValueError(f"bad team_side: {agent.team_side!r}")
        if agent.position not in vocab.POSITION_INDEX:
            raise ValueError(f"unknown position: {agent.position!r}")
        if agent.eligible_receiver and agent.team_side != "offense":
            raise ValueError("eligible flag on defense")
        agents.append(agent)
    n_agents = len(agents)
    if n_agents < 2:
        raise ValueError("too few agents")
    if sum(1 for a in agents if a.position == "QB") != 1:
        raise ValueError("quarterback count")
    n_def = sum(1 for a in agents if a.team_side == "defense")
    if n_def < 1:
        raise ValueError("no defenders")
    if expected_defenders is not None and n_def != expected_defenders:
        raise ValueError(f"defender count: {n_def} != {expected_defenders}")

    frames = obj["frames"]
    n_frames = len(frames)
    if events.snap < PRE_SNAP_FRAMES:
        raise ValueError("insufficient pre-snap frames")
    if events.pass_arrival >= n_frames:
        raise ValueError("frames end before pass arrival")

    tracks = np.empty((n_agents, n_frames, N_TRACK_CHANNELS), dtype=np.float64)
    speed_missing = False
    for t, frame in enumerate(frames):
        if len(frame) != n_agents:
            raise ValueError("frame shape")
        for i, f in enumerate(frame):
            tracks[i, t, CH_X] = f["x"]
            tracks[i, t, CH_Y] = f["y"]
            tracks[i, t, CH_ORI] = f["o"]
            tracks[i, t, CH_DIR] = f["dir"]
            s = f.get("s")
            if s is None:
                speed_missing = True
                tracks[i, t, CH_SPD] = np.nan
            else:
                tracks[i, t, CH_SPD] = s
    if speed_missing:
        _fill_speed(tracks)

    xy = tracks[:, :, (CH_X, CH_Y)]
    if not (
        np.all((xy[:, :, 0] >= 0.0) & (xy[:, :, 0] <= FIELD_LENGTH))
        and np.all((xy[:, :, 1] >= 0.0) & (xy[:, :, 1] <= FIELD_WIDTH))
    ):
        raise ValueError("coordinates out of bounds")
    if not (_angles_ok(tracks[:, :, CH_ORI]) and _angles_ok(tracks[:, :, CH_DIR])):
        raise ValueError("angle out of range")
    if np.any(tracks[:, :, CH_SPD] < 0.0):
        raise ValueError("negative speed")

    sit = obj["situation"]
    for key in ("down", "distance", "yard_line", "game_clock_s", "team_scheme"):
        if key not in sit:
            raise ValueError(f"missing situation field: {key}")
    situation = Situation(
        down=int(sit["down"]),
        distance=float(sit["distance"]),
        yard_line=float(sit["yard_line"]),
        game_clock_s=float(sit["game_clock_s"]),
        team_scheme=sit["team_scheme"],
    )
    if not 1 <= situation.down <= 4:
        raise ValueError("down out of range")
    if not 0.0 < situation.distance <= 100.0:
        raise ValueError("distance out of range")
    if not 0.0 <= situation.yard_line <= 100.0:
        raise ValueError("yard_line out of range")
    if not 0.0 <= situation.game_clock_s <= 3600.0:
        raise ValueError("game clock out of range")
    if situation.team_scheme not in vocab.SCHEME_INDEX:
        raise ValueError(f"unknown scheme: {situation.team_scheme!r}")

    play = Play(
        play_id=str(obj["play_id"]),
        play_direction=obj["play_direction"],
        agents=tuple(agents),
        tracks=tracks,
        events=events,
        situation=situation,
        defense_team=str(obj.get("defense_team", "TEAM_00")),
    )
    labels = _build_labels(obj["labels"], play)
    return play, labels


def _build_labels(lab, play):
    defender_ids = {a.agent_id for a in play.defenders()}
    receiver_ids = {a.agent_id for a in play.receivers()}

    coverage = lab.get("coverage")
    if coverage is not None:
        coverage = {str(k): v for k, v in coverage.items()}
        for k, v in coverage.items():
            if k not in defender_ids:
                raise ValueError(f"coverage label for non-defender: {k}")
            if v not in vocab.COVERAGE_INDEX:
                raise ValueError(f"unknown coverage class: {v!r}")

    matchup = lab.get("matchup")
    if matchup is not None:
        matchup = {str(k): v for k, v in matchup.items()}
        for k, v in matchup.items():
            if k not in defender_ids:
                raise ValueError(f"matchup label for non-defender: {k}")
            if v is not None and v not in receiver_ids:
                raise ValueError(f"matchup target is not an eligible receiver: {v!r}")

    target = lab.get("target_defender")
    if target is not None and target not in defender_ids:
        raise ValueError(f"target defender not on defense: {target!r}")

    targeted = lab.get("targeted_receiver")
    if targeted is not None and targeted not in receiver_ids:
        raise ValueError(f"targeted receiver not eligible: {targeted!r}")

    return LabelSet(coverage=coverage, matchup=matchup, target_defender=target, targeted_receiver=targeted)


def _fill_speed(tracks):
    """Fill missing speed from frame-to-frame displacement at 10 Hz."""
    xy = tracks[:, :, (CH_X, CH_Y)]
    step = np.linalg.norm(np.diff(xy, axis=1), axis=2) * FPS
    derived = np.concatenate([step[:, :1], step], axis=1) if step.shape[1] else np.zeros_like(tracks[:, :, 0])
    missing = np.isnan(tracks[:, :, CH_SPD])
    tracks[:, :, CH_SPD][missing] = derived[missing]


def parse_plays(path, expected_defenders=None):
    """Parse a JSONL play file.

    Malformed lines are collected as ``ParseError`` entries with their
    1-based line number; an unreadable file raises ``DataError``.
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    result = ParseResult()
    with fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                result.errors.append(ParseError(line_no, "invalid json"))
                continue
            try:
                result.plays.append(_build_play(obj, expected_defenders))
            except (ValueError, KeyError, TypeError) as e:
                result.errors.append(ParseError(line_no, str(e)))
    return result


# -- serialization ----------------------------------------------------------


def play_to_obj(play, labels):
    """Schema dict for one play; inverse of ``_build_play``."""
    frames = []
    for t in range(play.n_frames):
        row = []
        for i in range(play.n_agents):
            x, y, o, d, s = play.tracks[i, t]
            row.append({"x": float(x), "y": float(y), "o": float(o), "dir": float(d), "s": float(s)})
        frames.append(row)
    return {
        "play_id": play.play_id,
        "play_direction": play.play_direction,
        "defense_team": play.defense_team,
        "situation": {
            "down": play.situation.down,
            "distance": play.situation.distance,
            "yard_line": play.situation.yard_line,
            "game_clock_s": play.situation.game_clock_s,
            "team_scheme": play.situation.team_scheme,
        },
        "events": {
            "snap": play.events.snap,
            "pass_forward": play.events.pass_forward,
            "pass_arrival": play.events.pass_arrival,
        },
        "agents": [
            {
                "agent_id": a.agent_id,
                "team_side": a.team_side,
                "position": a.position,
                "eligible_receiver": a.eligible_receiver,
            }
            for a in play.agents
        ],
        "frames": frames,
        "labels": {
            "coverage": labels.coverage,
            "matchup": labels.matchup,
            "target_defender": labels.target_defender,
            "targeted_receiver": labels.targeted_receiver,
        },
    }


def dump_play_line(play, labels):
    return json.dumps(play_to_obj(play, labels), sort_keys=True, separators=(",", ":"))


def write_jsonl(pairs, path):
    """Write (play, labels) pairs as JSONL, atomically."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for play, labels in pairs:
            fh.write(dump_play_line(play, labels))
            fh.write("\n")
    os.replace(tmp, path)


# -- normalization ----------------------------------------------------------


def normalize_direction(play):
    """Mirror a leftward play so the offense always drives +x.

    Already-normalized plays come back unchanged, so the op is idempotent;
    applying the raw mirror twice is the identity.
    """
    if play.play_direction == "right":
        return play
    tracks = play.tracks.copy()
    tracks[:, :, CH_X] = FIELD_LENGTH - tracks[:, :, CH_X]
    tracks[:, :, CH_Y] = FIELD_WIDTH - tracks[:, :, CH_Y]
    tracks[:, :, CH_ORI] = np.mod(tracks[:, :, CH_ORI] + 180.0, 360.0)
    tracks[:, :, CH_DIR] = np.mod(tracks[:, :, CH_DIR] + 180.0, 360.0)
    return replace(play, play_direction="right", tracks=tracks)


# -- feature extraction -----------------------------------------------------


def full_window(play):
    """Snap-relative window covering everything a model may see."""
    ev = play.events
    return Window(
        start=-PRE_SNAP_FRAMES,
        end=ev.pass_arrival - ev.snap,
        pass_forward=ev.pass_forward - ev.snap,
        pass_arrival=ev.pass_arrival - ev.snap,
    )


def features_for_window(play, window):
    """Feature tensor [A, T, N_FEATURES] for a snap-relative window."""
    if play.play_direction != "right":
        raise ValueError("normalize the play before extracting features")
    snap = play.events.snap
    lo = snap + window.start
    hi = snap + window.end
    if lo < 0 or hi >= play.n_frames:
        raise ValueError(f"window [{window.start}, {window.end}] outside play {play.play_id}")
    tr = play.tracks[:, lo : hi + 1]
    ori = np.deg2rad(tr[:, :, CH_ORI])
    drn = np.deg2rad(tr[:, :, CH_DIR])
    t_rel = np.arange(window.start, window.end + 1, dtype=np.float64)
    feats = np.empty((play.n_agents, tr.shape[1], N_FEATURES), dtype=np.float64)
    feats[:, :, 0] = tr[:, :, CH_X] / FIELD_LENGTH
    feats[:, :, 1] = tr[:, :, CH_Y] / FIELD_WIDTH
    feats[:, :, 2] = np.sin(ori)
    feats[:, :, 3] = np.cos(ori)
    feats[:, :, 4] = np.sin(drn)
    feats[:, :, 5] = np.cos(drn)
    feats[:, :, 6] = tr[:, :, CH_SPD] / 10.0
    feats[:, :, 7] = t_rel[None, :] / 50.0
    return feats


def extract_sequence(play, start_offset, end_event):
    """Feature tensor from ``start_offset`` frames before the snap through an event.

    ``end_event`` is one of "snap", "pass_forward", "pass_arrival";
    ``start_offset`` is <= 0, at most PRE_SNAP_FRAMES back.
    """
    if not -PRE_SNAP_FRAMES <= start_offset <= 0:
        raise ValueError(f"start_offset {start_offset} outside [-{PRE_SNAP_FRAMES}, 0]")
    ev = play.events
    ends = {
        "snap": 0,
        "pass_forward": ev.pass_forward - ev.snap,
        "pass_arrival": ev.pass_arrival - ev.snap,
    }
    if end_event not in ends:
        raise ValueError(f"unknown end event {end_event!r}")
    fw = full_window(play)
    window = Window(start_offset, ends[end_event], fw.pass_forward, fw.pass_arrival)
    return features_for_window(play, window)


# -- task filtering ---------------------------------------------------------


def filter_play(play, labels, task):
    """Decide whether a play is usable for a task, with a reject reason."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if not play.events.valid():
        return FilterResult(False, "no pass forward")
    if not play.defenders():
        return FilterResult(False, "no defenders")
    if not play.receivers():
        return FilterResult(False, "no eligible receivers")
    if task == "coverage":
        if not labels.coverage:
            return FilterResult(False, "missing coverage labels")
    elif task == "matchup":
        if labels.matchup is None:
            return FilterResult(False, "missing matchup labels")
    else:
        if labels.targeted_receiver is None:
            return FilterResult(False, "missing target label")
    return FilterResult(True)

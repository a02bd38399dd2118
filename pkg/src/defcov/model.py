"""Factorized spatio-temporal encoder and the three task heads.

The encoder alternates temporal self-attention (per agent, over frames,
with sinusoidal positional encoding) and agent self-attention (per frame,
over agents, with no ordering signal on the agent axis, which is what
makes the whole model permutation-equivariant over agents).  Static
per-agent embeddings (position code, team side, and for the target task a
targeted-receiver flag) are added at the input and concatenated again to
the temporally pooled vector before a fusion layer produces one latent
per agent.

Heads:
  coverage  -- per-defender 20-way logits, conditioned on the game
               situation and a scheme embedding broadcast into each row;
  matchup   -- per-(defender, receiver) pairwise score plus a learned
               null-receiver column at index 0;
  target    -- one logit per defender plus a slot for the targeted
               receiver, masked to -1e9 so its probability vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from . import autodiff as ad
from . import vocab
from .autodiff import MASK_SENTINEL, NumericsError, Tensor
from .play_data import N_FEATURES, DataError, Window, full_window, features_for_window

TASK_DEFAULTS = {
    # task: (n_heads, n_layers, dropout)
    "target": (4, 3, 0.1),
    "matchup": (4, 3, 0.2),
    "coverage": (8, 6, 0.1),
}

N_SITUATION_FEATURES = 4


@dataclass
class ModelConfig:
    task: str
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 3
    dropout: float = 0.1
    n_coverage_classes: int = vocab.N_COVERAGE_CLASSES
    ffn_mult: int = 4
    head_hidden: int = 128
    scheme_emb_dim: int = 16
    dtype: str = "float32"

    @classmethod
    def for_task(cls, task, **overrides):
        """Config with the published per-task defaults, override-friendly."""
        if task not in TASK_DEFAULTS:
            raise ValueError(f"unknown task {task!r}")
        heads, layers, dropout = TASK_DEFAULTS[task]
        cfg = cls(task=task, n_heads=heads, n_layers=layers, dropout=dropout)
        for k, v in overrides.items():
            if not hasattr(cfg, k):
                raise ValueError(f"unknown config field {k!r}")
            setattr(cfg, k, v)
        cfg.validate()
        return cfg

    def validate(self):
        if self.task not in TASK_DEFAULTS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.n_coverage_classes != vocab.N_COVERAGE_CLASSES:
            raise ValueError(f"n_coverage_classes must be {vocab.N_COVERAGE_CLASSES}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype}")

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64

    @property
    def use_target_flag(self):
        return self.task == "target"


def _glorot(rng, fan_in, fan_out, dtype):
    std = math.sqrt(2.0 / (fan_in + fan_out))
    return rng.normal(0.0, std, (fan_in, fan_out)).astype(dtype)


def init_params(cfg, seed):
    """Fresh parameter dict for a config; deterministic in the seed."""
    cfg.validate()
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x0DE1)))
    dt = cfg.np_dtype
    d = cfg.d_model
    p = {}

    def lin(name, fin, fout):
        p[f"{name}.w"] = _glorot(rng, fin, fout, dt)
        p[f"{name}.b"] = np.zeros(fout, dtype=dt)

    def ln(name):
        p[f"{name}.g"] = np.ones(d, dtype=dt)
        p[f"{name}.b"] = np.zeros(d, dtype=dt)

    lin("input", N_FEATURES, d)
    p["emb_position"] = rng.normal(0.0, 0.1, (len(vocab.POSITIONS), d)).astype(dt)
    p["emb_side"] = rng.normal(0.0, 0.1, (2, d)).astype(dt)
    if cfg.use_target_flag:
        p["emb_tflag"] = rng.normal(0.0, 0.1, (2, d)).astype(dt)
    for i in range(cfg.n_layers):
        ln(f"enc{i}.ln_t")
        lin(f"enc{i}.t_qkv", d, 3 * d)
        lin(f"enc{i}.t_proj", d, d)
        ln(f"enc{i}.ln_a")
        lin(f"enc{i}.a_qkv", d, 3 * d)
        lin(f"enc{i}.a_proj", d, d)
        ln(f"enc{i}.ln_f")
        lin(f"enc{i}.ffn1", d, cfg.ffn_mult * d)
        lin(f"enc{i}.ffn2", cfg.ffn_mult * d, d)
    ln("enc_out_ln")
    lin("fuse", 2 * d, d)

    h = cfg.head_hidden
    if cfg.task == "coverage":
        p["emb_scheme"] = rng.normal(0.0, 0.1, (len(vocab.SCHEMES), cfg.scheme_emb_dim)).astype(dt)
        lin("cov1", d + N_SITUATION_FEATURES + cfg.scheme_emb_dim, h)
        lin("cov2", h, cfg.n_coverage_classes)
    elif cfg.task == "matchup":
        p["null_receiver"] = rng.normal(0.0, 0.1, (d,)).astype(dt)
        lin("mat1", 2 * d, h)
        lin("mat2", h, 1)
    else:
        lin("tgt1", 2 * d, h)
        lin("tgt2", h, 1)
    return {k: Tensor(v, requires_grad=True) for k, v in p.items()}


@dataclass
class PreparedBatch:
    """Numpy-side batch: padded features plus index/label arrays.

    All plays in one batch must share (n_agents, n_defenders, n_receivers);
    time is right-padded and masked.
    """

    feats: np.ndarray            # [B, A, T, F]
    frame_pos: np.ndarray        # [B, T] snap-relative frame index (float)
    frame_mask: np.ndarray       # [B, T] bool, True = real frame
    position_codes: np.ndarray   # [B, A] int
    team_side: np.ndarray        # [B, A] int, 0 offense / 1 defense
    target_flag: np.ndarray      # [B, A] int, 1 = targeted receiver
    defender_idx: np.ndarray     # [B, D] agent indices of defenders
    receiver_idx: np.ndarray     # [B, R] agent indices of eligible receivers
    targeted_idx: np.ndarray     # [B] agent index of the targeted receiver (-1 unknown)
    situation: np.ndarray        # [B, 4] scaled numeric situation
    scheme_idx: np.ndarray       # [B] int
    play_ids: list[str]
    defender_ids: list[list[str]]
    receiver_ids: list[list[str]]

    @property
    def size(self):
        return self.feats.shape[0]


def _situation_vec(sit):
    return np.array(
        [sit.down / 4.0, sit.distance / 15.0, sit.yard_line / 100.0, sit.game_clock_s / 3600.0]
    )


def prepare_batch(pairs, windows, dtype=np.float64, need_target=False):
    """Collate (play, labels) pairs over per-play windows into one batch.

    ``windows`` gives the snap-relative window per play.  Plays must be
    normalized and share roster shape; time is padded to the longest
    window with ``frame_mask`` marking validity.
    """
    if not pairs:
        raise DataError("empty batch")
    n_a = pairs[0][0].n_agents
    n_d = len(pairs[0][0].defenders())
    n_r = len(pairs[0][0].receivers())
    t_max = max(w.n_frames for w in windows)
    b = len(pairs)

    feats = np.zeros((b, n_a, t_max, N_FEATURES), dtype=dtype)
    frame_pos = np.zeros((b, t_max), dtype=np.float64)
    frame_mask = np.zeros((b, t_max), dtype=bool)
    position_codes = np.zeros((b, n_a), dtype=np.intp)
    team_side = np.zeros((b, n_a), dtype=np.intp)
    target_flag = np.zeros((b, n_a), dtype=np.intp)
    defender_idx = np.zeros((b, n_d), dtype=np.intp)
    receiver_idx = np.zeros((b, n_r), dtype=np.intp)
    targeted_idx = np.full(b, -1, dtype=np.intp)
    situation = np.zeros((b, N_SITUATION_FEATURES), dtype=np.float64)
    scheme_idx = np.zeros(b, dtype=np.intp)
    play_ids, defender_ids, receiver_ids = [], [], []

    for k, ((play, labels), win) in enumerate(zip(pairs, windows)):
        if play.n_agents != n_a or len(play.defenders()) != n_d or len(play.receivers()) != n_r:
            raise DataError("plays in one batch must share roster shape")
        f = features_for_window(play, win)
        t = f.shape[1]
        feats[k, :, :t] = f
        frame_pos[k, :t] = np.arange(win.start, win.end + 1)
        frame_mask[k, :t] = True
        d_list, r_list = [], []
        for i, agent in enumerate(play.agents):
            position_codes[k, i] = vocab.POSITION_INDEX[agent.position]
            team_side[k, i] = 0 if agent.team_side == "offense" else 1
            if agent.team_side == "defense":
                d_list.append(i)
            if agent.eligible_receiver:
                r_list.append(i)
        defender_idx[k] = d_list
        receiver_idx[k] = r_list
        if labels.targeted_receiver is not None:
            ti = play.agent_index(labels.targeted_receiver)
            targeted_idx[k] = ti
            target_flag[k, ti] = 1
        elif need_target:
            raise DataError(f"play {play.play_id} lacks a targeted receiver")
        situation[k] = _situation_vec(play.situation)
        scheme_idx[k] = vocab.scheme_index(play.situation.team_scheme)
        play_ids.append(play.play_id)
        defender_ids.append([play.agents[i].agent_id for i in d_list])
        receiver_ids.append([play.agents[i].agent_id for i in r_list])

    return PreparedBatch(
        feats, frame_pos, frame_mask, position_codes, team_side, target_flag,
        defender_idx, receiver_idx, targeted_idx, situation, scheme_idx,
        play_ids, defender_ids, receiver_ids,
    )


def positional_encoding(frame_pos, d_model, dtype):
    """Sinusoidal encoding of snap-relative frame indices: [B, T, d_model]."""
    half = d_model // 2
    freq = np.exp(-math.log(10000.0) * np.arange(half) / half)
    ang = frame_pos[:, :, None] * freq[None, None, :]
    pe = np.zeros((*frame_pos.shape, d_model))
    pe[:, :, 0::2] = np.sin(ang)
    pe[:, :, 1::2] = np.cos(ang[:, :, : d_model - half])
    return pe.astype(dtype)


def _linear(p, name, x):
    return ad.add(ad.matmul(x, p[f"{name}.w"]), p[f"{name}.b"])


def _heads_split(x, n_heads, axes_to):
    """[.., S, 3d] -> three [.., h, S, dh] tensors."""
    d3 = x.shape[-1]
    d = d3 // 3
    q, k, v = x[..., :d], x[..., d : 2 * d], x[..., 2 * d :]
    out = []
    for t in (q, k, v):
        s = t.shape
        t = ad.reshape(t, (*s[:-1], n_heads, d // n_heads))
        out.append(ad.transpose(t, axes_to))
    return out


def _mha_time(p, cfg, name, x, mask_add, train, rng):
    """Temporal self-attention per agent: x [B, A, T, d]."""
    b, a, t, d = x.shape
    qkv = _linear(p, name + "_qkv", x)
    q, k, v = _heads_split(qkv, cfg.n_heads, (0, 1, 3, 2, 4))  # [B, A, h, T, dh]
    out = ad.scaled_dot_attention(q, k, v, mask=mask_add)
    out = ad.transpose(out, (0, 1, 3, 2, 4))
    out = ad.reshape(out, (b, a, t, d))
    out = _linear(p, name + "_proj", out)
    return ad.dropout(out, cfg.dropout, rng, train)


def _mha_agent(p, cfg, name, x, train, rng):
    """Agent self-attention per frame: x [B, A, T, d]; no mask, no ordering."""
    b, a, t, d = x.shape
    xt = ad.transpose(x, (0, 2, 1, 3))  # [B, T, A, d]
    qkv = _linear(p, name + "_qkv", xt)
    q, k, v = _heads_split(qkv, cfg.n_heads, (0, 1, 3, 2, 4))  # [B, T, h, A, dh]
    out = ad.scaled_dot_attention(q, k, v)
    out = ad.transpose(out, (0, 1, 3, 2, 4))
    out = ad.reshape(out, (b, t, a, d))
    out = _linear(p, name + "_proj", out)
    out = ad.transpose(out, (0, 2, 1, 3))
    return ad.dropout(out, cfg.dropout, rng, train)


def _static_embedding(p, cfg, batch):
    emb = ad.add(
        ad.take(p["emb_position"], batch.position_codes),
        ad.take(p["emb_side"], batch.team_side),
    )
    if cfg.use_target_flag:
        emb = ad.add(emb, ad.take(p["emb_tflag"], batch.target_flag))
    return emb  # [B, A, d]


def encode_batch(p, cfg, batch, train=False, rng=None):
    """Latents [B, A, d_model] for a prepared batch."""
    dt = p["input.w"].dtype
    x = _linear(p, "input", Tensor(batch.feats.astype(dt, copy=False)))
    static = _static_embedding(p, cfg, batch)
    pe = positional_encoding(batch.frame_pos, cfg.d_model, dt)
    x = ad.add(x, ad.reshape(static, (batch.size, 1 if False else batch.feats.shape[1], 1, cfg.d_model)))
    x = ad.add(x, pe[:, None, :, :])

    # Padded frames are blocked as attention keys; their latent rows are
    # garbage but excluded from pooling below.
    mask_add = np.where(batch.frame_mask, 0.0, MASK_SENTINEL).astype(dt)
    mask_add = mask_add[:, None, None, None, :]  # [B, 1(A), 1(h), 1(Tq), Tk]

    for i in range(cfg.n_layers):
        name = f"enc{i}"
        h = ad.layer_norm(x, p[f"{name}.ln_t.g"], p[f"{name}.ln_t.b"])
        x = ad.add(x, _mha_time(p, cfg, f"{name}.t", h, mask_add, train, rng))
        h = ad.layer_norm(x, p[f"{name}.ln_a.g"], p[f"{name}.ln_a.b"])
        x = ad.add(x, _mha_agent(p, cfg, f"{name}.a", h, train, rng))
        h = ad.layer_norm(x, p[f"{name}.ln_f.g"], p[f"{name}.ln_f.b"])
        h = _linear(p, f"{name}.ffn2", ad.gelu(_linear(p, f"{name}.ffn1", h)))
        x = ad.add(x, ad.dropout(h, cfg.dropout, rng, train))

    x = ad.layer_norm(x, p["enc_out_ln.g"], p["enc_out_ln.b"])
    # Mean over real frames only.
    fmask = batch.frame_mask.astype(dt)[:, None, :, None]
    counts = batch.frame_mask.sum(axis=1).astype(dt)[:, None, None]
    pooled = ad.mul(ad.tsum(ad.mul(x, fmask), axis=2), 1.0 / counts)
    fused = _linear(p, "fuse", ad.concat([pooled, static], axis=-1))
    return fused  # [B, A, d]


def head_coverage_batch(p, cfg, lat_def, batch, train=False, rng=None):
    """[B, D, n_classes] coverage logits."""
    b, n_d, d = lat_def.shape
    dt = p["input.w"].dtype
    scheme = ad.take(p["emb_scheme"], batch.scheme_idx)  # [B, E]
    scheme = ad.broadcast_to(ad.reshape(scheme, (b, 1, cfg.scheme_emb_dim)), (b, n_d, cfg.scheme_emb_dim))
    sit = np.broadcast_to(
        batch.situation.astype(dt)[:, None, :], (b, n_d, N_SITUATION_FEATURES)
    )
    x = ad.concat([lat_def, Tensor(sit.copy()), scheme], axis=-1)
    h = ad.dropout(ad.gelu(_linear(p, "cov1", x)), cfg.dropout, rng, train)
    return _linear(p, "cov2", h)


def head_matchup_batch(p, cfg, lat_def, lat_rec, train=False, rng=None):
    """[B, D, R+1] matchup logits; column 0 is the NO_MATCHUP class."""
    b, n_d, d = lat_def.shape
    n_r = lat_rec.shape[1]

    def pair_scores(rec_block, n_cols):
        d_exp = ad.broadcast_to(ad.reshape(lat_def, (b, n_d, 1, d)), (b, n_d, n_cols, d))
        x = ad.concat([d_exp, rec_block], axis=-1)
        h = ad.dropout(ad.gelu(_linear(p, "mat1", x)), cfg.dropout, rng, train)
        return ad.reshape(_linear(p, "mat2", h), (b, n_d, n_cols))

    null = ad.broadcast_to(ad.reshape(p["null_receiver"], (1, 1, 1, d)), (b, n_d, 1, d))
    null_col = pair_scores(null, 1)
    rec = ad.broadcast_to(ad.reshape(lat_rec, (b, 1, n_r, d)), (b, n_d, n_r, d))
    rec_cols = pair_scores(rec, n_r)
    return ad.concat([null_col, rec_cols], axis=-1)


def head_target_batch(p, cfg, lat_def, lat_targeted, train=False, rng=None):
    """[B, D+1] target logits; the final (receiver) slot is masked to -1e9."""
    b, n_d, d = lat_def.shape
    tgt = ad.reshape(lat_targeted, (b, 1, d))
    slots = ad.concat([lat_def, tgt], axis=1)  # [B, D+1, d]
    tgt_exp = ad.broadcast_to(tgt, (b, n_d + 1, d))
    x = ad.concat([slots, tgt_exp], axis=-1)
    h = ad.dropout(ad.gelu(_linear(p, "tgt1", x)), cfg.dropout, rng, train)
    z = ad.reshape(_linear(p, "tgt2", h), (b, n_d + 1))
    return ad.fill_index(z, n_d, MASK_SENTINEL, axis=-1)


def forward_batch(p, cfg, batch, train=False, rng=None):
    """Task logits for a prepared batch."""
    latents = encode_batch(p, cfg, batch, train, rng)
    lat_def = ad.gather_rows(latents, batch.defender_idx)
    if cfg.task == "coverage":
        return head_coverage_batch(p, cfg, lat_def, batch, train, rng)
    if cfg.task == "matchup":
        lat_rec = ad.gather_rows(latents, batch.receiver_idx)
        return head_matchup_batch(p, cfg, lat_def, lat_rec, train, rng)
    if np.any(batch.targeted_idx < 0):
        raise DataError("target task requires a targeted receiver on every play")
    lat_tgt = ad.gather_rows(latents, batch.targeted_idx[:, None])[:, 0]
    return head_target_batch(p, cfg, lat_def, lat_tgt, train, rng)


class Model:
    """A config plus parameters; the unit that trains, predicts, persists."""

    def __init__(self, cfg, params):
        cfg.validate()
        self.cfg = cfg
        self.params = params

    @classmethod
    def create(cls, cfg, seed=0):
        return cls(cfg, init_params(cfg, seed))

    def zero_grad(self):
        for t in self.params.values():
            t.zero_grad()

    def forward(self, batch, train=False, rng=None):
        return forward_batch(self.params, self.cfg, batch, train, rng)

    def predict_window(self, pairs, window_of, batch_size=64):
        """Probabilities for each play at a per-play window, eval mode.

        ``window_of`` maps a play to a Window.  Plays are grouped by roster
        shape internally; output order matches input order.
        """
        out = [None] * len(pairs)
        groups = {}
        for i, (play, labels) in enumerate(pairs):
            key = (play.n_agents, len(play.defenders()), len(play.receivers()))
            groups.setdefault(key, []).append(i)
        need_t = self.cfg.task == "target"
        for idxs in groups.values():
            for lo in range(0, len(idxs), batch_size):
                chunk = idxs[lo : lo + batch_size]
                sub = [pairs[i] for i in chunk]
                wins = [window_of(p) for p, _ in sub]
                batch = prepare_batch(sub, wins, dtype=self.cfg.np_dtype, need_target=need_t)
                with ad.no_grad():
                    logits = self.forward(batch, train=False)
                probs = ad.softmax(Tensor(logits.data.astype(np.float64)), axis=-1).data
                for j, i in enumerate(chunk):
                    out[i] = probs[j]
        return out


@dataclass
class FramePrediction:
    """All available head probabilities for one (play, end-frame) pair."""

    play_id: str
    end_frame: int
    coverage: dict[str, list[float]] | None = None
    matchup: dict[str, list[float]] | None = None
    target: dict[str, float] | None = None


def predict_frames(play, labels, models, stride=1):
    """Frame-by-frame predictions over growing windows.

    Windows all start at -30 relative to snap; end frames run from -30 to
    pass arrival stepping by ``stride``.  ``models`` maps task name to a
    trained Model (any non-empty subset).
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if isinstance(models, Model):
        models = {models.cfg.task: models}
    if not models:
        raise ValueError("need at least one model")
    fw = full_window(play)
    ends = list(range(fw.start, fw.pass_arrival + 1, stride))
    defenders = [a.agent_id for a in play.defenders()]
    receivers = [a.agent_id for a in play.receivers()]
    rows = [FramePrediction(play.play_id, e) for e in ends]
    pairs = [(play, labels)] * len(ends)
    for task, model in models.items():
        it = iter(ends)
        probs = model.predict_window(
            pairs, lambda _play: Window(fw.start, next(it), fw.pass_forward, fw.pass_arrival)
        )
        for row, pr in zip(rows, probs):
            if task == "coverage":
                row.coverage = {d: pr[i].tolist() for i, d in enumerate(defenders)}
            elif task == "matchup":
                row.matchup = {d: pr[i].tolist() for i, d in enumerate(defenders)}
            else:
                slots = defenders + [labels.targeted_receiver]
                row.target = {s: float(pr[i]) for i, s in enumerate(slots)}
    return rows


# -- single-play op surface (thin wrappers over the batched core) -----------


def _single_batch(seq, agents, labels=None, situation=None, dtype=np.float64):
    """Wrap one extracted sequence as a PreparedBatch of size 1."""
    from .play_data import Situation

    a, t, f = seq.shape
    if a < 2:
        raise NumericsError(f"need at least 2 agents, got {a}")
    if t < 1:
        raise NumericsError("empty time axis")
    feats = seq[None].astype(dtype)
    frame_pos = np.round(seq[0, :, 7] * 50.0)[None]
    frame_mask = np.ones((1, t), dtype=bool)
    position_codes = np.array([[vocab.POSITION_INDEX[ag.position] for ag in agents]])
    team_side = np.array([[0 if ag.team_side == "offense" else 1 for ag in agents]])
    target_flag = np.zeros((1, a), dtype=np.intp)
    d_idx = [i for i, ag in enumerate(agents) if ag.team_side == "defense"]
    r_idx = [i for i, ag in enumerate(agents) if ag.eligible_receiver]
    targeted = -1
    if labels is not None and labels.targeted_receiver is not None:
        targeted = next(i for i, ag in enumerate(agents) if ag.agent_id == labels.targeted_receiver)
        target_flag[0, targeted] = 1
    sit = situation or Situation(1, 10.0, 50.0, 900.0, vocab.SCHEMES[0])
    return PreparedBatch(
        feats, frame_pos, frame_mask, position_codes, team_side, target_flag,
        np.array([d_idx]), np.array([r_idx]), np.array([targeted]),
        _situation_vec(sit)[None], np.array([vocab.scheme_index(sit.team_scheme)]),
        ["_"], [[agents[i].agent_id for i in d_idx]], [[agents[i].agent_id for i in r_idx]],
    )


def encode(seq, agents, cfg, params, labels=None):
    """Latents [A, d_model] for one extracted sequence."""
    batch = _single_batch(seq, agents, labels, dtype=np.dtype(params["input.w"].dtype).type)
    with ad.no_grad():
        return encode_batch(params, cfg, batch, train=False).data[0]


def head_coverage(defender_latents, situation, cfg, params):
    """[n_defenders, n_classes] logits from per-defender latents."""
    lat = Tensor(np.asarray(defender_latents)[None])
    n_d = lat.shape[1]
    batch_sit = _situation_vec(situation)[None]
    scheme = np.array([vocab.scheme_index(situation.team_scheme)])

    class _Stub:
        situation = batch_sit
        scheme_idx = scheme

    with ad.no_grad():
        return head_coverage_batch(params, cfg, lat, _Stub, train=False).data[0]


def head_matchup(defender_latents, receiver_latents, cfg, params):
    """[n_defenders, n_receivers+1] logits; column 0 = NO_MATCHUP."""
    with ad.no_grad():
        return head_matchup_batch(
            params, cfg,
            Tensor(np.asarray(defender_latents)[None]),
            Tensor(np.asarray(receiver_latents)[None]),
            train=False,
        ).data[0]


def head_target(defender_latents, targeted_latent, cfg, params):
    """[n_defenders + 1] logits with the receiver slot masked to -1e9."""
    with ad.no_grad():
        return head_target_batch(
            params, cfg,
            Tensor(np.asarray(defender_latents)[None]),
            Tensor(np.asarray(targeted_latent)[None]),
            train=False,
        ).data[0]

"""Scenario configuration, episode orchestration, sweeps and CSV output.

An episode runs one (policy, comm SNR, trial) tuple over a slotted horizon:
the scene advances every slot, the policy picks a beam (or spends the slot
on radar search), the link maps the served SNR to a bit error rate, and the
regret tracker compares against the per-slot genie-best beam.  Sweeps fan
episodes out over an optional process pool; everything is keyed by
counter-based RNG streams so reruns are byte-identical.
"""

import configparser
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bandit, link, rsp, scene as sc, timing, ula, waveform as wf

POLICIES = ("dbf", "ucb_isac", "lucb", "ucb_snr", "random")
PHASE_EXPLORE = "explore"

_STREAM_SCENE = 1
_STREAM_RADAR = 2
_STREAM_POLICY = 3


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation campaign needs; mirrors the INI schema."""

    kind: str = "stationary_radial"
    target: str = "point"
    users: int = 1
    multipaths: int = 1
    clutter: int = 0
    slots: int = 2000
    trials: int = 15
    seed: int = 0
    policies: tuple = POLICIES
    # codebook / arrays
    beams: int = 41
    fov_deg: float = 80.0
    bs_elements: int = 32
    user_elements: int = 32
    carrier_hz: float = 60e9
    # waveform
    golay_order: int = 9
    sample_rate_hz: float = 40e6
    pri_s: float = 125e-6
    packets: int = 20
    duty_cycle: float = 0.5
    # radar processing
    radar_snr_db: float = 10.0
    threshold_db: float = rsp.DEFAULT_THRESHOLD_DB
    fd_max_hz: float = 4000.0
    fd_step_hz: float = 400.0
    v_static: float = 0.5
    subset_cap: int = 8
    # comm
    snr_sweep_db: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0)
    bits_per_packet: int = 40_000
    slot_period_s: float = 0.004
    modulation_order: int = 16
    # restarts; "auto" resolves per scenario kind (forecast-driven
    # realignment only makes sense when the user actually leaves the beam)
    restart_interval: int = 2000
    restart_ucb_snr: str = "none"
    restart_lucb: str = "none"
    restart_ucb_isac: str = "auto"
    # custom-scenario user placement
    user_x: float = 0.0
    user_y: float = 10.0
    user_vx: float = 0.0
    user_vy: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))
        object.__setattr__(self, "snr_sweep_db", tuple(self.snr_sweep_db))
        self.validate()

    def validate(self) -> None:
        if self.kind not in ("stationary_radial", "quasi_lateral", "custom"):
            raise ConfigError("scenario.kind", self.kind)
        if self.target not in ("point", "pedestrian", "car"):
            raise ConfigError("scenario.target", self.target)
        if self.trials < 1:
            raise ConfigError("scenario.trials", self.trials)
        if self.slots < self.beams:
            raise ConfigError(
                "scenario.slots", f"{self.slots} < beams ({self.beams})"
            )
        if self.users < 1:
            raise ConfigError("scenario.users", self.users)
        for p in self.policies:
            if p not in POLICIES:
                raise ConfigError("scenario.policies", p)
        if not 0 < self.fov_deg < 90:
            raise ConfigError("codebook.fov_deg", self.fov_deg)
        if self.fd_step_hz <= 0 or self.fd_max_hz <= 0:
            raise ConfigError("radar.fd_step_hz", self.fd_step_hz)
        if self.fd_max_hz > 1.0 / (2 * self.pri_s) * (1 + 1e-12):
            raise ConfigError(
                "radar.fd_max_hz",
                f"{self.fd_max_hz} exceeds 1/(2*pri) = {1.0 / (2 * self.pri_s):.1f}",
            )
        for name in ("restart_ucb_snr", "restart_lucb"):
            if getattr(self, name) not in ("none", "periodic"):
                raise ConfigError(f"restart.{name[8:]}", getattr(self, name))
        if self.restart_ucb_isac not in ("auto", "none", "periodic", "rsp_forecast"):
            raise ConfigError("restart.ucb_isac", self.restart_ucb_isac)
        if self.restart_interval < 1:
            raise ConfigError("restart.interval", self.restart_interval)

    def isac_restart_kind(self) -> str:
        if self.restart_ucb_isac != "auto":
            return self.restart_ucb_isac
        return "rsp_forecast" if self.kind == "quasi_lateral" else "none"

    # derived builders ------------------------------------------------------

    def waveform(self) -> wf.RadarWaveform:
        return wf.RadarWaveform(
            pair=wf.generate_golay_pair(self.golay_order),
            sample_period=1.0 / self.sample_rate_hz,
            pri=self.pri_s,
            packets=self.packets,
            duty_cycle=self.duty_cycle,
        )

    def bs_array(self) -> ula.ArrayConfig:
        return ula.ArrayConfig(
            elements=self.bs_elements, carrier_frequency=self.carrier_hz
        )

    def codebook(self) -> ula.BeamCodebook:
        return ula.make_codebook(math.radians(self.fov_deg), self.beams)

    def comm(self) -> link.CommConfig:
        return link.CommConfig(
            modulation_order=self.modulation_order,
            data_bits_per_packet=self.bits_per_packet,
            slot_period=self.slot_period_s,
            snr_sweep=self.snr_sweep_db,
        )

    def music(self) -> rsp.MusicConfig:
        return rsp.MusicConfig(fd_max=self.fd_max_hz, fd_step=self.fd_step_hz)

    def selection(self) -> rsp.SelectionConfig:
        return rsp.SelectionConfig(
            v_static=self.v_static,
            subset_cap=self.subset_cap,
            threshold_db=self.threshold_db,
            max_unambiguous_range=ula.SPEED_OF_LIGHT * self.pri_s / 2.0,
        )

    def timing_model(self) -> timing.TimingModel:
        return timing.TimingModel()


class ConfigError(ValueError):
    """A configuration value violates a module precondition."""

    def __init__(self, field_name: str, value):
        self.field_name = field_name
        super().__init__(f"invalid config field {field_name}: {value!r}")


_INI_SCHEMA = {
    "scenario": {
        "kind": str, "target": str, "users": int, "multipaths": int,
        "clutter": int, "slots": int, "trials": int, "seed": int,
        "policies": "strlist",
    },
    "codebook": {"beams": int, "fov_deg": float},
    "array": {"bs_elements": int, "user_elements": int, "carrier_hz": float},
    "waveform": {
        "golay_order": int, "sample_rate_hz": float, "pri_s": float,
        "packets": int, "duty_cycle": float,
    },
    "radar": {
        "snr_db": ("radar_snr_db", float), "threshold_db": float,
        "fd_max_hz": float, "fd_step_hz": float, "v_static": float,
        "subset_cap": int,
    },
    "comm": {
        "snr_sweep_db": "floatlist", "bits_per_packet": int,
        "slot_period_s": float, "modulation_order": int,
    },
    "restart": {
        "ucb_snr": ("restart_ucb_snr", str),
        "lucb": ("restart_lucb", str),
        "ucb_isac": ("restart_ucb_isac", str),
        "interval": ("restart_interval", int),
    },
    "user": {
        "x": ("user_x", float), "y": ("user_y", float),
        "vx": ("user_vx", float), "vy": ("user_vy", float),
    },
}


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Parse an INI scenario file into a validated ScenarioConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError("config", f"cannot read {path}")
    kwargs = {}
    for section, fields in _INI_SCHEMA.items():
        if not parser.has_section(section):
            continue
        for key in parser[section]:
            if key not in fields:
                raise ConfigError(f"{section}.{key}", "unknown key")
            spec = fields[key]
            dest, conv = (key, spec) if not isinstance(spec, tuple) else spec
            raw = parser[section][key]
            try:
                if conv == "strlist":
                    kwargs[dest] = tuple(s.strip() for s in raw.split(",") if s.strip())
                elif conv == "floatlist":
                    kwargs[dest] = tuple(float(s) for s in raw.split(","))
                else:
                    kwargs[dest] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}", raw) from exc
    if overrides:
        kwargs.update(overrides)
    return ScenarioConfig(**kwargs)


# ---------------------------------------------------------------------------
# scene construction
# ---------------------------------------------------------------------------


def _scene_rng(cfg: ScenarioConfig, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(_STREAM_SCENE, trial))
    return np.random.Generator(np.random.Philox(seq))


def radar_rng(cfg: ScenarioConfig, trial: int, slot: int, beam: int):
    seq = np.random.SeedSequence(
        cfg.seed, spawn_key=(_STREAM_RADAR, trial, slot, beam)
    )
    return np.random.Generator(np.random.Philox(seq))


def _policy_rng(cfg: ScenarioConfig, trial: int, policy: str):
    pid = POLICIES.index(policy)
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(_STREAM_POLICY, trial, pid))
    return np.random.Generator(np.random.Philox(seq))


def build_scene(cfg: ScenarioConfig, trial: int) -> sc.Scene:
    """Deterministic scene for one trial: users, drawn multipath and clutter."""
    rng = _scene_rng(cfg, trial)
    if cfg.kind == "stationary_radial":
        position, velocity = (0.0, 10.0), (0.0, 3.0)
    elif cfg.kind == "quasi_lateral":
        position, velocity = (20.0, 15.0), (-3.0, 0.0)
    else:
        position = (cfg.user_x, cfg.user_y)
        velocity = (cfg.user_vx, cfg.user_vy)

    builders = {
        "point": sc.make_point_user,
        "pedestrian": sc.make_pedestrian,
        "car": sc.make_car,
    }
    users = []
    for ui in range(cfg.users):
        if ui == 0:
            pos, vel = position, velocity
        else:
            ang = rng.uniform(-0.8, 0.8) * math.radians(cfg.fov_deg)
            rad = rng.uniform(10.0, 35.0)
            heading = rng.uniform(0, 2 * math.pi)
            pos = (rad * math.sin(ang), rad * math.cos(ang))
            vel = (3.0 * math.cos(heading), 3.0 * math.sin(heading))
        if cfg.target == "point":
            users.append(sc.make_point_user(pos, vel, uid=f"mu{ui}"))
        else:
            users.append(builders[cfg.target](pos, vel, rng, uid=f"mu{ui}"))

    fov = math.radians(cfg.fov_deg)
    multipaths = []
    for ui, user in enumerate(users):
        share = cfg.multipaths if ui == 0 else 0
        multipaths.extend(
            sc.draw_multipaths(rng, share, user, ui, fov, cfg.fd_max_hz)
        )
    clutter = sc.draw_clutter(rng, cfg.clutter, fov)
    return sc.Scene(
        users=tuple(users),
        multipaths=tuple(multipaths),
        clutter=clutter,
        radar_snr_db=cfg.radar_snr_db,
        rng_seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# policy drivers
# ---------------------------------------------------------------------------


class _Driver:
    """Per-episode policy shell: pick an action, absorb the reward."""

    def __init__(self, cfg: ScenarioConfig, trial: int):
        self.cfg = cfg
        self.trial = trial

    def select(self, t: int, snr_all: np.ndarray, scene_now: sc.Scene):
        raise NotImplementedError

    def observe(self, t: int, action: bandit.Action, reward: float, snr_db: float):
        pass

    def chosen_quality(self) -> float:
        return math.nan


class _DbfDriver(_Driver):
    def select(self, t, snr_all, scene_now):
        return bandit.Action(bandit.EXPLOIT, bandit.dbf_oracle_select(snr_all))


class _RandomDriver(_Driver):
    def __init__(self, cfg, trial):
        super().__init__(cfg, trial)
        self.rng = _policy_rng(cfg, trial, "random")

    def select(self, t, snr_all, scene_now):
        return bandit.Action(bandit.EXPLOIT, bandit.random_select(self.cfg.beams, self.rng))


class _UcbSnrDriver(_Driver):
    def __init__(self, cfg, trial):
        super().__init__(cfg, trial)
        self.state = bandit.BanditState(tuple(range(cfg.beams)))
        kind = cfg.restart_ucb_snr
        self.restart = bandit.RestartPolicy(
            kind=kind,
            interval=cfg.restart_interval if kind == "periodic" else None,
        )

    def select(self, t, snr_all, scene_now):
        if bandit.maybe_restart(self.restart, t):
            self.state.reset(self.state.active_set)
        phase = (
            bandit.ROUND_ROBIN if self.state.t <= self.state.size else bandit.EXPLOIT
        )
        return bandit.Action(phase, bandit.ucb_snr_select(self.state))

    def observe(self, t, action, reward, snr_db):
        bandit.update(self.state, action.beam, reward)


class _LucbDriver(_Driver):
    def __init__(self, cfg, trial):
        super().__init__(cfg, trial)
        self.state = bandit.LucbState(tuple(range(cfg.beams)))
        kind = cfg.restart_lucb
        self.restart = bandit.RestartPolicy(
            kind=kind,
            interval=cfg.restart_interval if kind == "periodic" else None,
        )

    def select(self, t, snr_all, scene_now):
        if bandit.maybe_restart(self.restart, t):
            self.state.reset(self.state.active_set)
        beam = bandit.lucb_select(self.state)
        if np.any(self.state.pulls == 0):
            phase = bandit.ROUND_ROBIN
        elif self.state.committed is not None:
            phase = bandit.EXPLOIT
        else:
            phase = PHASE_EXPLORE
        return bandit.Action(phase, beam)

    def observe(self, t, action, reward, snr_db):
        bandit.lucb_update(self.state, action.beam, reward)


class _UcbIsacDriver(_Driver):
    """Radar search -> subset round-robin -> subset UCB, with realignment."""

    def __init__(self, cfg, trial):
        super().__init__(cfg, trial)
        self.waveform = cfg.waveform()
        self.array = cfg.bs_array()
        self.codebook = cfg.codebook()
        self.music_cfg = cfg.music()
        self.select_cfg = cfg.selection()
        self.t_isac = timing.radar_search_slots(cfg.timing_model(), cfg.beams)
        kind = cfg.isac_restart_kind()
        self.restart = bandit.RestartPolicy(
            kind=kind,
            interval=cfg.restart_interval if kind == "periodic" else None,
        )
        self.state: bandit.BanditState | None = None
        self.subset: rsp.BeamSubset | None = None
        # one SNR track per served beam; the serving (max-peak) beam's 3 dB
        # drop is the realignment trigger
        self.trackers: dict = {}
        self.phase_origin = 1
        self.scheduled_for: int | None = None
        self.restart_slots: list = []
        self.diagnostics = sc.SynthesisDiagnostics()

    def _survey(self, t: int, scene_now: sc.Scene) -> None:
        """Full radar sweep over the codebook at slot ``t``."""
        wavelength = self.array.wavelength
        per_beam = {}
        for k in range(self.codebook.size):
            rng = radar_rng(self.cfg, self.trial, t, k)
            cube = sc.synthesize_beam(
                scene_now, self.waveform, self.array, self.codebook, k, rng,
                diagnostics=self.diagnostics, dtype=np.complex64,
            )
            profiles = rsp.matched_filter(
                cube, self.waveform.pair,
                alternate=self.waveform.alternate_pair,
                sample_period=self.waveform.sample_period,
            )
            dets = rsp.process_cube(
                profiles, self.music_cfg, self.waveform.pri, wavelength,
                self.cfg.threshold_db,
            )
            if dets:
                per_beam[k] = dets
        self.subset = rsp.select_beams(per_beam, self.select_cfg)
        active = self.subset.indices or tuple(range(self.codebook.size))
        self.state = bandit.BanditState(active)
        self.trackers = {}
        self.phase_origin = t
        self.scheduled_for = None
        self.restart.next_restart_slot = None
        self.restart_slots.append(t)

    def _serving_tracker(self):
        """Track of the beam that has looked best so far, if any."""
        if not self.trackers:
            return None
        return max(self.trackers.values(), key=lambda tr: tr.peak)

    def _snr_dropped(self) -> bool:
        serving = self._serving_tracker()
        return serving.dropped if serving is not None else False

    def _maybe_schedule(self, t: int, beam: int) -> None:
        """Arm the beam-exit forecast off the exploited beam's detection."""
        if self.restart.kind != "rsp_forecast" or self.scheduled_for == beam:
            return
        dets = self.subset.detections.get(beam) if self.subset else None
        if not dets:
            return
        det = dets[0]
        if det.velocity == 0:
            return
        t_inf = rsp.estimate_t_infinity(
            det,
            beam_angle=float(self.codebook.angles[beam]),
            beamwidth=self.codebook.beamwidth,
            snr_track=self._serving_tracker(),
            slot_period=self.cfg.slot_period_s,
        )
        self.restart.schedule(self.phase_origin, t_inf, self.cfg.slot_period_s)
        self.scheduled_for = beam

    def select(self, t, snr_all, scene_now):
        if self.state is None:
            self._survey(t, scene_now)
        elif bandit.maybe_restart(self.restart, t, self._snr_dropped()):
            self._survey(t, scene_now)
        rel = self.state.t
        if rel <= self.t_isac:
            return bandit.Action(bandit.RADAR, None)
        action = bandit.ucb_isac_select(self.state, self.t_isac)
        if action.phase == bandit.EXPLOIT:
            self._maybe_schedule(t, action.beam)
        return action

    def observe(self, t, action, reward, snr_db):
        if action.phase == bandit.RADAR:
            bandit.advance_slot(self.state)
            return
        bandit.update(self.state, action.beam, reward)
        if action.beam not in self.trackers:
            self.trackers[action.beam] = rsp.SnrDropTracker()
        self.trackers[action.beam].observe(snr_db)


def _make_driver(policy: str, cfg: ScenarioConfig, trial: int) -> _Driver:
    table = {
        "dbf": _DbfDriver,
        "random": _RandomDriver,
        "ucb_snr": _UcbSnrDriver,
        "lucb": _LucbDriver,
        "ucb_isac": _UcbIsacDriver,
    }
    return table[policy](cfg, trial)


# ---------------------------------------------------------------------------
# episodes and sweeps
# ---------------------------------------------------------------------------


@dataclass
class EpisodeResult:
    policy: str
    snr_db: float
    trial: int
    beams: np.ndarray
    phases: list
    rewards: np.ndarray
    bers: np.ndarray
    cum_ber: np.ndarray
    regret: np.ndarray
    final_cum_ber: float = field(init=False)
    total_regret: float = field(init=False)
    throughput_bps: float = field(init=False)
    restart_slots: tuple = ()

    def __post_init__(self):
        self.final_cum_ber = float(self.cum_ber[-1])
        self.total_regret = float(self.regret[-1])


def run_episode(
    cfg: ScenarioConfig, policy: str, comm_snr_db: float, trial: int
) -> EpisodeResult:
    """Simulate one policy over one trial's scene at one sweep SNR."""
    if policy not in POLICIES:
        raise ConfigError("scenario.policies", policy)
    scene_now = build_scene(cfg, trial)
    array_cfg = cfg.bs_array()
    codebook = cfg.codebook()
    comm_cfg = cfg.comm()
    weights = ula.codebook_weight_matrix(array_cfg, codebook)
    driver = _make_driver(policy, cfg, trial)

    n = cfg.slots
    beams = np.full(n, -1, dtype=int)
    phases = []
    rewards = np.zeros(n)
    bers = np.zeros(n)
    regret = np.zeros(n)
    tracker = bandit.RegretTracker()

    for t in range(1, n + 1):
        snr_all = sc.downlink_snr_all(
            scene_now, array_cfg, codebook, comm_snr_db,
            user_elements=cfg.user_elements, weights=weights,
        )
        action = driver.select(t, snr_all, scene_now)
        star = bandit.normalize_reward(float(np.max(snr_all)))
        if action.phase == bandit.RADAR:
            snr_db = -math.inf
            reward = math.nan
            ber = link.BER_CEILING
            chosen_mean = 0.0
        else:
            snr_db = float(snr_all[action.beam])
            reward = bandit.normalize_reward(snr_db)
            ber = link.ber_from_snr(snr_db, comm_cfg.modulation_order)
            chosen_mean = reward
            beams[t - 1] = action.beam
        driver.observe(t, action, reward if not math.isnan(reward) else 0.0, snr_db)
        tracker.step(star, chosen_mean)
        phases.append(action.phase)
        rewards[t - 1] = 0.0 if math.isnan(reward) else reward
        bers[t - 1] = ber
        regret[t - 1] = tracker.cumulative
        scene_now = sc.advance(scene_now, comm_cfg.slot_period)

    cum = np.cumsum(bers) / np.arange(1, n + 1)
    result = EpisodeResult(
        policy=policy,
        snr_db=comm_snr_db,
        trial=trial,
        beams=beams,
        phases=phases,
        rewards=rewards,
        bers=bers,
        cum_ber=cum,
        regret=regret,
        restart_slots=tuple(getattr(driver, "restart_slots", ())),
    )
    result.throughput_bps = link.throughput(result.final_cum_ber, comm_cfg)
    return result


@dataclass
class SummaryRow:
    policy: str
    snr_db: float
    trials: int
    mean_throughput_bps: float
    mean_final_cum_ber: float
    mean_total_regret: float
    exploration_time_s: float


@dataclass
class MetricsTrace:
    config: ScenarioConfig
    episodes: list
    summaries: list


def _episode_task(args):
    cfg, policy, snr_db, trial = args
    return run_episode(cfg, policy, snr_db, trial)


def _exploration_time(cfg: ScenarioConfig, policy: str, trace_episodes) -> float:
    model = cfg.timing_model()
    if policy in ("ucb_snr", "lucb"):
        return timing.exploration_time_ucb_snr(model, cfg.beams)
    if policy == "ucb_isac":
        sizes = [
            len(set(ep.beams[ep.beams >= 0][: cfg.subset_cap]))
            for ep in trace_episodes
        ]
        k_tilde = int(round(np.mean(sizes))) if sizes else cfg.subset_cap
        return timing.exploration_time_ucb_isac(
            model, cfg.beams, max(k_tilde, 1)
        )
    return 0.0


def run_sweep(cfg: ScenarioConfig, workers: int | None = None) -> MetricsTrace:
    """Cross product of sweep SNRs x policies x trials, aggregated."""
    if workers is None:
        workers = int(os.environ.get("ISACSIM_WORKERS", "1"))
    tasks = [
        (cfg, policy, snr_db, trial)
        for snr_db in cfg.snr_sweep_db
        for policy in cfg.policies
        for trial in range(cfg.trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            episodes = list(pool.map(_episode_task, tasks, chunksize=1))
    else:
        episodes = [_episode_task(t) for t in tasks]

    summaries = []
    for snr_db in cfg.snr_sweep_db:
        for policy in cfg.policies:
            group = [
                e for e in episodes if e.policy == policy and e.snr_db == snr_db
            ]
            summaries.append(
                SummaryRow(
                    policy=policy,
                    snr_db=snr_db,
                    trials=len(group),
                    mean_throughput_bps=float(
                        np.mean([e.throughput_bps for e in group])
                    ),
                    mean_final_cum_ber=float(
                        np.mean([e.final_cum_ber for e in group])
                    ),
                    mean_total_regret=float(
                        np.mean([e.total_regret for e in group])
                    ),
                    exploration_time_s=_exploration_time(cfg, policy, group),
                )
            )
    return MetricsTrace(config=cfg, episodes=episodes, summaries=summaries)


def policy_throughput(trace: MetricsTrace, policy: str) -> float:
    """Sweep-mean throughput of one policy: (1 - mean final BER) * D / T."""
    comm = trace.config.comm()
    bers = [e.final_cum_ber for e in trace.episodes if e.policy == policy]
    if not bers:
        raise ValueError(f"no episodes for policy {policy!r}")
    return link.throughput(float(np.mean(bers)), comm)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

_SLOTS_HEADER = "trial,snr_db,policy,slot,phase,beam,reward,ber,cum_ber\n"
_SUMMARY_HEADER = (
    "policy,snr_db,trials,mean_throughput_bps,mean_final_cum_ber,"
    "mean_total_regret,exploration_time_s\n"
)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def emit_csv(trace: MetricsTrace, outdir, decision_log: bool = False) -> list:
    """Write slots.csv and summary.csv (9 significant digits, LF endings)."""
    os.makedirs(outdir, exist_ok=True)
    slots_path = os.path.join(outdir, "slots.csv")
    summary_path = os.path.join(outdir, "summary.csv")
    with open(slots_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_SLOTS_HEADER)
        for ep in trace.episodes:
            for i in range(len(ep.bers)):
                fh.write(
                    f"{ep.trial},{_fmt(ep.snr_db)},{ep.policy},{i + 1},"
                    f"{ep.phases[i]},{ep.beams[i]},{_fmt(ep.rewards[i])},"
                    f"{_fmt(ep.bers[i])},{_fmt(ep.cum_ber[i])}\n"
                )
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_SUMMARY_HEADER)
        for row in trace.summaries:
            fh.write(
                f"{row.policy},{_fmt(row.snr_db)},{row.trials},"
                f"{_fmt(row.mean_throughput_bps)},{_fmt(row.mean_final_cum_ber)},"
                f"{_fmt(row.mean_total_regret)},{_fmt(row.exploration_time_s)}\n"
            )
    written = [slots_path, summary_path]
    if decision_log:
        dpath = os.path.join(outdir, "decisions.csv")
        with open(dpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("trial,snr_db,policy,slot,phase,beam,reward\n")
            for ep in trace.episodes:
                for i in range(len(ep.bers)):
                    fh.write(
                        f"{ep.trial},{_fmt(ep.snr_db)},{ep.policy},{i + 1},"
                        f"{ep.phases[i]},{ep.beams[i]},{_fmt(ep.rewards[i])}\n"
                    )
        written.append(dpath)
    return written


def parse_summary_csv(path) -> list:
    """Read summary.csv back into SummaryRow objects (round-trip check)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if header != _SUMMARY_HEADER:
            raise ValueError("unexpected summary.csv header")
        for raw in fh:
            parts = raw.rstrip("\n").split(",")
            rows.append(
                SummaryRow(
                    policy=parts[0],
                    snr_db=float(parts[1]),
                    trials=int(parts[2]),
                    mean_throughput_bps=float(parts[3]),
                    mean_final_cum_ber=float(parts[4]),
                    mean_total_regret=float(parts[5]),
                    exploration_time_s=float(parts[6]),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# ground-truth oracle for the quasi-stationary scenario
# ---------------------------------------------------------------------------


def oracle_exit_slots(
    cfg: ScenarioConfig, trial: int, comm_snr_db: float = 0.0, limit: int = 8
) -> list:
    """Brute-force beam-exit slots: serve the best beam, flag 3 dB drops.

    Replays the true (noiseless) scene slot by slot; an exit happens when the
    served beam's SNR falls 3 dB under its running peak since service start,
    after which service switches to the then-best beam.
    """
    scene_now = build_scene(cfg, trial)
    array_cfg = cfg.bs_array()
    codebook = cfg.codebook()
    weights = ula.codebook_weight_matrix(array_cfg, codebook)
    serving = None
    peak = -math.inf
    events = []
    for t in range(1, cfg.slots + 1):
        snr_all = sc.downlink_snr_all(
            scene_now, array_cfg, codebook, comm_snr_db,
            user_elements=cfg.user_elements, weights=weights,
        )
        if serving is None:
            serving = int(np.argmax(snr_all))
            peak = snr_all[serving]
        else:
            peak = max(peak, snr_all[serving])
            if snr_all[serving] < peak - 3.0:
                events.append(t)
                serving = int(np.argmax(snr_all))
                peak = snr_all[serving]
                if len(events) >= limit:
                    break
        scene_now = sc.advance(scene_now, cfg.slot_period_s)
    return events

"""Run configuration: INI-style key = value sections, validated at parse time.

Every module precondition that can be checked statically is checked
here, with messages that name the offending key.  See README for the
full schema; defaults produce a complete desk-scale run.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .params import MODES, PotentialModel, ProblemParams, WindowSpec


@dataclass
class RunConfig:
    params: ProblemParams
    potential: PotentialModel
    mode: str = "same_sign"
    k: int = 5
    k_list: list[int] = field(default_factory=lambda: [64, 128, 256, 512, 1024])
    theta_frac: float = 0.3

    gs_r_max: float = 20.0
    gs_tol: float = 1e-10

    spec_r_max: float = 20.0
    spec_n_points: int = 2048
    spec_ells: list[int] = field(default_factory=lambda: [0, 1, 2, 3])
    spec_count: int = 2

    int_d_lo: float = 12.0
    int_d_hi: float = 16.0
    int_n: int = 5
    tail_rho: list[float] = field(default_factory=lambda: [10.0, 20.0, 40.0])

    refine_tol: float = 1e-8
    refine_max_iter: int = 30
    refine_box_margin_log: float = 13.0
    refine_n: int = 0  # 0: derive from the resolution gate
    peak_threshold: float = 0.2

    def window(self) -> WindowSpec:
        theta = self.theta_frac * WindowSpec(
            eps=self.params.eps, m=self.potential.m, mode=self.mode
        ).c
        return WindowSpec(eps=self.params.eps, m=self.potential.m,
                          mode=self.mode, theta=theta)


def _get(cp, section, key, cast, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def _get_list(cp, section, key, cast, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).replace(",", " ").split()
    try:
        return [cast(tok) for tok in raw]
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key}: {exc}") from exc


def parse_config(path: Path | str | None) -> RunConfig:
    """Parse and validate a config file; None gives the defaults."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        read = cp.read(path)
        if not read:
            raise ConfigurationError(f"config file {path} is missing or unreadable")

    params = ProblemParams(
        N=_get(cp, "problem", "N", int, 3),
        p=_get(cp, "problem", "p", float, 4.0),
        eps=_get(cp, "problem", "eps", float, 0.1),
    )
    potential = PotentialModel(
        sign=_get(cp, "potential", "sign", int, +1),
        a=_get(cp, "potential", "a", float, 0.4),
        m=_get(cp, "potential", "m", float, 2.0),
    )
    mode = _get(cp, "rings", "mode", str, "same_sign")
    if mode not in MODES:
        raise ConfigurationError(f"[rings] mode must be one of {MODES}, got {mode!r}")

    cfg = RunConfig(
        params=params,
        potential=potential,
        mode=mode,
        k=_get(cp, "rings", "k", int, 5),
        k_list=_get_list(cp, "rings", "k_list", int, [64, 128, 256, 512, 1024]),
        theta_frac=_get(cp, "rings", "theta_frac", float, 0.3),
        gs_r_max=_get(cp, "ground_state", "r_max", float, 20.0),
        gs_tol=_get(cp, "ground_state", "tol", float, 1e-10),
        spec_r_max=_get(cp, "spectrum", "r_max", float, 20.0),
        spec_n_points=_get(cp, "spectrum", "n_points", int, 2048),
        spec_ells=_get_list(cp, "spectrum", "ells", int, [0, 1, 2, 3]),
        spec_count=_get(cp, "spectrum", "count", int, 2),
        int_d_lo=_get(cp, "interaction", "d_lo", float, 12.0),
        int_d_hi=_get(cp, "interaction", "d_hi", float, 16.0),
        int_n=_get(cp, "interaction", "n", int, 5),
        tail_rho=_get_list(cp, "interaction", "tail_rho", float, [10.0, 20.0, 40.0]),
        refine_tol=_get(cp, "refine", "tol", float, 1e-8),
        refine_max_iter=_get(cp, "refine", "max_iter", int, 30),
        refine_box_margin_log=_get(cp, "refine", "box_margin_log", float, 13.0),
        refine_n=_get(cp, "refine", "grid_n", int, 0),
        peak_threshold=_get(cp, "refine", "threshold_frac", float, 0.2),
    )

    # cross-field validation with actionable messages
    if cfg.gs_r_max < 15.0:
        raise ConfigurationError("[ground_state] r_max must be >= 15")
    if not 0.0 < cfg.gs_tol <= 1e-6:
        raise ConfigurationError("[ground_state] tol must lie in (0, 1e-6]")
    if cfg.spec_n_points < 512:
        raise ConfigurationError("[spectrum] n_points must be >= 512")
    if cfg.spec_count < 1:
        raise ConfigurationError("[spectrum] count must be >= 1")
    if not cfg.int_d_hi > cfg.int_d_lo >= 8.0:
        raise ConfigurationError("[interaction] window needs d_hi > d_lo >= 8")
    if cfg.int_n < 5:
        raise ConfigurationError("[interaction] n must be >= 5")
    if any(r <= 0 for r in cfg.tail_rho):
        raise ConfigurationError("[interaction] tail_rho entries must be positive")
    if not 0.0 < cfg.theta_frac < 1.0:
        c = WindowSpec(eps=params.eps, m=potential.m, mode=mode).c
        raise ConfigurationError(
            f"[rings] theta_frac must lie in (0, 1): the window half-width "
            f"theta = theta_frac * c must stay below c = eps*m/(2pi or pi) = {c:g} "
            "or the lower window edge is not positive"
        )
    if cfg.k < 1:
        raise ConfigurationError("[rings] k must be >= 1")
    if any(k < 1 for k in cfg.k_list):
        raise ConfigurationError("[rings] k_list entries must be >= 1")
    if not 0.0 < cfg.peak_threshold < 1.0:
        raise ConfigurationError("[refine] threshold_frac must lie in (0, 1)")
    if cfg.refine_max_iter < 1:
        raise ConfigurationError("[refine] max_iter must be >= 1")
    if cfg.refine_tol <= 0:
        raise ConfigurationError("[refine] tol must be positive")
    if cfg.refine_box_margin_log <= 0:
        raise ConfigurationError("[refine] box_margin_log must be positive")
    if params.N != 3 and cfg.refine_n:
        raise ConfigurationError("[refine] the 3D lab is fixed to N = 3")
    return cfg
